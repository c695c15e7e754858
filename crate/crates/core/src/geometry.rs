//! Array geometry, user drops and the non-stationary path-loss matrix.
//!
//! The base station is a uniform linear array of `M` antennas spread over
//! `L` meters and centered at the origin. Users live in the half plane in
//! front of the array, inside the rectangle `[-L/2, L/2] x [y_min, y_max]`.
//! Because `L` is comparable to the user distances, every (antenna, user)
//! pair has its own long-term gain `beta = q * d^-kappa`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::{substream, Purpose};

/// Users closer than this to an antenna are rejected (path loss is singular at 0).
pub const MIN_DISTANCE: f64 = 1e-3;

/// Physical scenario: array, user population and link budget.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Number of base-station antennas.
    pub m: usize,
    /// Array length in meters.
    pub l: f64,
    /// Number of single-antenna users.
    pub k: usize,
    /// Path-loss exponent.
    pub kappa: f64,
    /// Path gain at the 1 m reference distance (linear).
    pub q: f64,
    /// Receiver noise power in watts.
    pub noise_power: f64,
    /// Total downlink radiated power in watts.
    pub p_max: f64,
    /// Target average received SNR (linear) that `p_max` was derived from, if any.
    pub rho: Option<f64>,
    /// Nearest user distance, as a fraction of `l`.
    pub y_min_frac: f64,
    /// Farthest user distance, as a fraction of `l`.
    pub y_max_frac: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let mut cfg = Self {
            m: 500,
            l: 30.0,
            k: 100,
            kappa: 3.0,
            q: 10f64.powf(-3.53),
            // -96 dBm
            noise_power: 10f64.powf(-12.6),
            p_max: 0.0,
            rho: Some(10.0),
            y_min_frac: 0.1,
            y_max_frac: 1.0,
        };
        cfg.p_max = p_max_from_rho(&cfg).expect("default rho is set");
        cfg
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.m == 0 {
            return bad("antenna count must be at least 1".into());
        }
        if self.k == 0 {
            return bad("user count must be at least 1".into());
        }
        for (name, v) in [
            ("array length", self.l),
            ("q", self.q),
            ("noise power", self.noise_power),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return bad(format!("path-loss exponent must be >= 0, got {}", self.kappa));
        }
        if !(self.p_max.is_finite() && self.p_max >= 0.0) {
            return bad(format!("p_max must be >= 0, got {}", self.p_max));
        }
        if !(self.y_min_frac >= 0.0 && self.y_min_frac < self.y_max_frac && self.y_max_frac.is_finite()) {
            return bad(format!(
                "user band [{}, {}] is empty or negative",
                self.y_min_frac, self.y_max_frac
            ));
        }
        Ok(())
    }

    /// Average long-term gain used for the SNR/power relation, `q * L^-kappa`.
    pub fn beta_avg(&self) -> f64 {
        self.q * self.l.powf(-self.kappa)
    }

    /// Antenna spacing `L / M`.
    pub fn spacing(&self) -> f64 {
        self.l / self.m as f64
    }

    pub fn with_users(&self, k: usize) -> Self {
        Self { k, ..self.clone() }
    }
}

/// Transmit power that yields the configured average received SNR:
/// `P_max = rho * sigma^2 / beta_avg`.
pub fn p_max_from_rho(cfg: &ScenarioConfig) -> Result<f64> {
    let rho = cfg.rho.ok_or(Error::MissingRho)?;
    let beta_avg = cfg.beta_avg();
    if beta_avg == 0.0 {
        return Err(Error::ZeroPathGain);
    }
    Ok(rho * cfg.noise_power / beta_avg)
}

/// Antenna coordinates along the array axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    pub positions: Vec<f64>,
    pub dx: f64,
}

impl ArrayGeometry {
    /// Antenna `m` (0-based) sits at `(m + 1/2) dx - L/2`.
    pub fn new(cfg: &ScenarioConfig) -> Self {
        let dx = cfg.spacing();
        let half = cfg.l / 2.0;
        let positions = (0..cfg.m).map(|m| (m as f64 + 0.5) * dx - half).collect();
        Self { positions, dx }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// User locations `(x, y)` in meters; `y` is the distance to the array axis.
#[derive(Debug, Clone, PartialEq)]
pub struct UserPositions {
    pub coords: Vec<[f64; 2]>,
}

impl UserPositions {
    pub fn random<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> Self {
        let half = cfg.l / 2.0;
        let (y_lo, y_hi) = (cfg.y_min_frac * cfg.l, cfg.y_max_frac * cfg.l);
        let coords = (0..cfg.k)
            .map(|_| {
                let x = rng.random_range(-half..=half);
                let y = rng.random_range(y_lo..=y_hi);
                [x, y]
            })
            .collect();
        Self { coords }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

/// Drops `cfg.k` users uniformly in the configured rectangle.
pub fn place_users(cfg: &ScenarioConfig, seed: u64) -> UserPositions {
    UserPositions::random(cfg, &mut substream(seed, Purpose::Users, 0))
}

/// `M x K` grid of long-term path gains, stored antenna-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LongTermFadingMatrix {
    m: usize,
    k: usize,
    data: Vec<f64>,
}

impl LongTermFadingMatrix {
    /// Wraps antenna-major data (`data[m * k + user]`). Entries must be finite and >= 0.
    pub fn new(m: usize, k: usize, data: Vec<f64>) -> Result<Self> {
        if m == 0 || k == 0 {
            return Err(Error::DimensionMismatch(format!("empty {m}x{k} gain matrix")));
        }
        if data.len() != m * k {
            return Err(Error::DimensionMismatch(format!(
                "{} gains for a {m}x{k} matrix",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParameter(format!("path gain {v} is not a finite non-negative value")));
        }
        Ok(Self { m, k, data })
    }

    /// Builds from one row per antenna.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::DimensionMismatch("ragged gain rows".into()));
        }
        Self::new(rows.len(), k, rows.concat())
    }

    /// Builds from one column per user.
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self> {
        let m = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|c| c.len() != m) {
            return Err(Error::DimensionMismatch("ragged gain columns".into()));
        }
        let data = (0..m).flat_map(|a| cols.iter().map(move |c| c[a])).collect();
        Self::new(m, cols.len(), data)
    }

    pub fn antennas(&self) -> usize {
        self.m
    }

    pub fn users(&self) -> usize {
        self.k
    }

    pub fn get(&self, antenna: usize, user: usize) -> f64 {
        self.data[antenna * self.k + user]
    }

    /// Gains from one antenna to every user.
    pub fn row(&self, antenna: usize) -> &[f64] {
        &self.data[antenna * self.k..(antenna + 1) * self.k]
    }

    pub fn column(&self, user: usize) -> Vec<f64> {
        (0..self.m).map(|a| self.get(a, user)).collect()
    }

    /// Per-user total gain over the whole array.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.k];
        for row in self.data.chunks_exact(self.k) {
            for (s, b) in sums.iter_mut().zip(row) {
                *s += b;
            }
        }
        sums
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Path gains `beta[m][k] = q * d_{m,k}^-kappa` for the given drop.
pub fn long_term_fading(
    geom: &ArrayGeometry,
    users: &UserPositions,
    cfg: &ScenarioConfig,
) -> Result<LongTermFadingMatrix> {
    let k = users.len();
    let mut data = Vec::with_capacity(geom.len() * k);
    for (a, &xa) in geom.positions.iter().enumerate() {
        for (u, &[x, y]) in users.coords.iter().enumerate() {
            let d = (xa - x).hypot(y);
            if d < MIN_DISTANCE {
                return Err(Error::TooClose {
                    antenna: a,
                    user: u,
                    distance: d,
                });
            }
            data.push(cfg.q * d.powf(-cfg.kappa));
        }
    }
    LongTermFadingMatrix::new(geom.len(), k, data)
}

/// One small-scale fading realization `H = sqrt(beta) .* Z`, `Z ~ CN(0, 1)` i.i.d.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h: DMatrix<Complex64>,
}

impl ChannelRealization {
    pub fn random<R: Rng + ?Sized>(beta: &LongTermFadingMatrix, rng: &mut R) -> Self {
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        let (m, k) = (beta.antennas(), beta.users());
        let mut h = DMatrix::<Complex64>::zeros(m, k);
        for a in 0..m {
            for u in 0..k {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                h[(a, u)] = Complex64::new(re, im) * (scale * beta.get(a, u).sqrt());
            }
        }
        Self { h }
    }

    /// Rows of `H` for the given antennas, in order.
    pub fn restrict(&self, antennas: &[usize]) -> DMatrix<Complex64> {
        self.h.select_rows(antennas)
    }
}

pub fn draw_channel(beta: &LongTermFadingMatrix, seed: u64) -> ChannelRealization {
    ChannelRealization::random(beta, &mut substream(seed, Purpose::Fading, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn one_user(y: f64, x: f64) -> UserPositions {
        UserPositions { coords: vec![[x, y]] }
    }

    #[test]
    fn default_power_matches_table_value() {
        let cfg = ScenarioConfig::default();
        // 0.23 mW radiated power at rho = 10
        assert_relative_eq!(cfg.p_max, 0.23e-3, max_relative = 0.005);
    }

    #[test]
    fn p_max_round_trips_through_rho() {
        let cfg = ScenarioConfig::default();
        let p = p_max_from_rho(&cfg).unwrap();
        let rho = p * cfg.beta_avg() / cfg.noise_power;
        assert_relative_eq!(rho, 10.0, max_relative = 1e-12);

        let zero = ScenarioConfig { rho: Some(0.0), ..cfg.clone() };
        assert_eq!(p_max_from_rho(&zero).unwrap(), 0.0);
        let unset = ScenarioConfig { rho: None, ..cfg };
        assert_eq!(p_max_from_rho(&unset), Err(Error::MissingRho));
    }

    #[test]
    fn zero_path_gain_rejected() {
        let cfg = ScenarioConfig { q: 0.0, ..Default::default() };
        assert_eq!(p_max_from_rho(&cfg), Err(Error::ZeroPathGain));
    }

    #[test]
    fn geometry_is_centered() {
        let cfg = ScenarioConfig { m: 4, l: 2.0, ..Default::default() };
        let g = ArrayGeometry::new(&cfg);
        assert_eq!(g.dx, 0.5);
        assert_eq!(g.positions, vec![-0.75, -0.25, 0.25, 0.75]);
    }

    #[test]
    fn path_loss_reference_points() {
        let q = 10f64.powf(-3.53);
        let cfg = ScenarioConfig { m: 1, l: 1e-6, k: 1, ..Default::default() };
        let g = ArrayGeometry { positions: vec![0.0], dx: 1e-6 };

        let at_1m = long_term_fading(&g, &one_user(1.0, 0.0), &cfg).unwrap();
        assert_relative_eq!(at_1m.get(0, 0), q, max_relative = 1e-15);

        let at_30m = long_term_fading(&g, &one_user(30.0, 0.0), &cfg).unwrap();
        assert_relative_eq!(at_30m.get(0, 0), 1.093e-8, max_relative = 1e-3);

        let flat = ScenarioConfig { kappa: 0.0, ..cfg.clone() };
        let b = long_term_fading(&g, &one_user(7.0, 3.0), &flat).unwrap();
        assert_eq!(b.get(0, 0), q);
    }

    #[test]
    fn user_on_top_of_antenna_rejected() {
        let cfg = ScenarioConfig { m: 1, k: 1, ..Default::default() };
        let g = ArrayGeometry { positions: vec![0.0], dx: 1.0 };
        let err = long_term_fading(&g, &one_user(1e-4, 0.0), &cfg).unwrap_err();
        assert!(matches!(err, Error::TooClose { antenna: 0, user: 0, .. }));
    }

    #[test]
    fn users_stay_in_rectangle_and_are_reproducible() {
        let cfg = ScenarioConfig { k: 1, l: 30.0, ..Default::default() };
        for seed in 0..50 {
            let u = place_users(&cfg, seed);
            let [x, y] = u.coords[0];
            assert!((-15.0..=15.0).contains(&x));
            assert!((3.0..=30.0).contains(&y));
            assert_eq!(u, place_users(&cfg, seed));
        }
    }

    #[test]
    fn mean_user_distance_matches_uniform_band() {
        let cfg = ScenarioConfig { k: 10_000, ..Default::default() };
        let u = place_users(&cfg, 11);
        let n = u.len() as f64;
        let mean = u.coords.iter().map(|c| c[1]).sum::<f64>() / n;
        // uniform on [0.1L, L]: mean 0.55L, sd 0.9L/sqrt(12)
        let se = 0.9 * cfg.l / 12f64.sqrt() / n.sqrt();
        assert!((mean - 0.55 * cfg.l).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn extreme_gain_ratio_follows_distance_ratio() {
        let cfg = ScenarioConfig { m: 64, k: 1, ..Default::default() };
        let g = ArrayGeometry::new(&cfg);
        let users = one_user(4.0, -12.0);
        let b = long_term_fading(&g, &users, &cfg).unwrap();
        let d: Vec<f64> = g.positions.iter().map(|x| (x + 12.0).hypot(4.0)).collect();
        let (imin, imax) = (0..64).fold((0, 0), |(lo, hi), i| {
            (if d[i] < d[lo] { i } else { lo }, if d[i] > d[hi] { i } else { hi })
        });
        let ratio = b.get(imin, 0) / b.get(imax, 0);
        assert_relative_eq!(ratio, (d[imax] / d[imin]).powf(3.0), max_relative = 1e-12);
    }

    #[test]
    fn zero_gain_gives_zero_channel() {
        let beta = LongTermFadingMatrix::new(3, 2, vec![0.0; 6]).unwrap();
        let h = draw_channel(&beta, 5);
        assert!(h.h.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn channel_draws_are_reproducible_with_right_power() {
        let beta = LongTermFadingMatrix::new(1, 1, vec![4.0]).unwrap();
        assert_eq!(draw_channel(&beta, 9), draw_channel(&beta, 9));

        let mut rng = substream(3, Purpose::Fading, 0);
        let n = 100_000;
        let mean = (0..n)
            .map(|_| ChannelRealization::random(&beta, &mut rng).h[(0, 0)].norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((3.9..=4.1).contains(&mean), "mean |h|^2 = {mean}");
    }

    #[test]
    fn column_and_row_access_agree() {
        let b = LongTermFadingMatrix::from_columns(&[vec![4.0, 2.0, 2.0], vec![1.0, 1.0, 2.0]]).unwrap();
        assert_eq!(b.row(2), &[2.0, 2.0]);
        assert_eq!(b.column(0), vec![4.0, 2.0, 2.0]);
        assert_eq!(b.column_sums(), vec![8.0, 4.0]);
    }

    #[test]
    fn invalid_config_rejected() {
        let base = ScenarioConfig::default();
        assert!(ScenarioConfig { m: 0, ..base.clone() }.validate().is_err());
        assert!(ScenarioConfig { l: -1.0, ..base.clone() }.validate().is_err());
        assert!(ScenarioConfig { y_min_frac: 1.0, y_max_frac: 0.5, ..base.clone() }.validate().is_err());
        assert!(base.validate().is_ok());
    }
}
