//! Closed-form EE of ZF with HRNP when every user sits at the expected
//! position, and the Newton-Raphson search for the best active-antenna count.
//!
//! With all users at distance `y` from the array center, HRNP activates the
//! `Ms` antennas nearest the center. Expanding `[1 + (m dx / y)^2]^(-kappa/2)`
//! to first order turns the ZF SINR into a rational function of `Ms` built from
//! the cubics
//!
//! ```text
//! F1(Ms) = t11 Ms - t12 Ms^2 - t13 Ms^3
//! F2(Ms) = t21 Ms - t22 Ms^2 - t23 Ms^3
//! gamma(Ms) = prefactor * (F1 - (K - 1) F2 / F1)
//! ```
//!
//! and the consumed power becomes affine, `p_bc * rate + t0 + t1 * Ms`.

use crate::error::{Error, Result};
use crate::geometry::ScenarioConfig;
use crate::power::{Complexity, PowerParams};
use crate::precoding::Precoder;

/// Expected user distance as a fraction of the array length.
pub const EXPECTED_DISTANCE_FRAC: f64 = 0.55;

/// Default threshold on `kappa Ms^2 dx^2 / (8 y^2)` for the expansion to hold.
pub const VALIDITY_THRESHOLD: f64 = 0.25;

/// Flops charged per Newton step (f, f' and the update).
pub const FLOPS_PER_STEP: f64 = 96.0;

/// Flops charged per sign check of `f` alone.
pub const FLOPS_PER_SIGN: f64 = 40.0;

/// Flops charged per analytic EE evaluation.
pub const FLOPS_PER_EE: f64 = 30.0;

/// Coefficients of the expected-position model.
#[derive(Debug, Clone, PartialEq)]
pub struct UmepModel {
    pub y: f64,
    pub dx: f64,
    pub kappa: f64,
    pub users: usize,
    pub antennas: usize,
    pub t11: f64,
    pub t12: f64,
    pub t13: f64,
    pub t21: f64,
    pub t22: f64,
    pub t23: f64,
    /// `P q y^-kappa / (K sigma^2)`.
    pub prefactor: f64,
    /// Power independent of `Ms` and of the rate (W).
    pub t0: f64,
    /// Power per active antenna (W).
    pub t1: f64,
    /// Rate-proportional power (W per bit/s).
    pub p_bc: f64,
    pub bandwidth: f64,
}

/// Builds the expected-position model for `cfg` and `pp`.
pub fn build_umep(cfg: &ScenarioConfig, pp: &PowerParams) -> Result<UmepModel> {
    cfg.validate()?;
    pp.validate()?;
    let (m, k) = (cfg.m, cfg.k);
    let y = EXPECTED_DISTANCE_FRAC * cfg.l;
    let dx = cfg.spacing();
    let c = cfg.kappa * dx * dx / (y * y);

    // Power with zero rate at Ms = 0 and 1 isolates t0 and t1.
    let at = |ms| pp.breakdown(cfg.p_max, Precoder::Zf, ms, k, 0.0, None);
    let (b0, b1) = (at(0)?, at(1)?);
    let kf = k as f64;
    let c_hrnp = Complexity::Hrnp { m, k }.flops();
    let t0 = b0.p_dagger
        + c_hrnp / (pp.t_lt * pp.l_bs)
        + pp.bandwidth * kf.powi(3) / (3.0 * pp.coherence_block * pp.l_bs);
    let t1 = b1.total - b0.total;

    Ok(UmepModel {
        y,
        dx,
        kappa: cfg.kappa,
        users: k,
        antennas: m,
        t11: 1.0 - c / 12.0,
        t12: c / 8.0,
        t13: c / 24.0,
        t21: 1.0 - c / 6.0,
        t22: c / 4.0,
        t23: c / 12.0,
        prefactor: cfg.p_max * cfg.q * y.powf(-cfg.kappa) / (kf * cfg.noise_power),
        t0,
        t1,
        p_bc: pp.p_bc(),
        bandwidth: pp.bandwidth,
    })
}

/// `(F1, F2)` with first and second derivatives: `[[F1, F1', F1''], [F2, F2', F2'']]`.
fn cubics(model: &UmepModel, ms: f64) -> [[f64; 3]; 2] {
    let eval = |a: f64, b: f64, c: f64| {
        [
            a * ms - b * ms * ms - c * ms.powi(3),
            a - 2.0 * b * ms - 3.0 * c * ms * ms,
            -2.0 * b - 6.0 * c * ms,
        ]
    };
    [
        eval(model.t11, model.t12, model.t13),
        eval(model.t21, model.t22, model.t23),
    ]
}

/// ZF SINR from the exact sums over the `Ms` centre antennas.
///
/// Odd `ms` is rounded up to the next even count; the flag reports it.
pub fn sinr_zf_me(ms: usize, model: &UmepModel) -> Result<(f64, bool)> {
    if ms == 0 || ms > model.antennas {
        return Err(Error::MsOutOfRange { ms, m: model.antennas });
    }
    let rounded = ms % 2 == 1;
    let half = ms.div_ceil(2);
    let (mut s1, mut s2) = (0.0, 0.0);
    for i in 1..=half {
        let a = 1.0 + (i as f64 * model.dx / model.y).powi(2);
        s1 += a.powf(-model.kappa / 2.0);
        s2 += a.powf(-model.kappa);
    }
    let (s1, s2) = (2.0 * s1, 2.0 * s2);
    let interference = (model.users as f64 - 1.0) * s2 / s1;
    Ok((model.prefactor * (s1 - interference), rounded))
}

/// ZF SINR under the binomial expansion; `ms` is continuous.
pub fn sinr_zf_ba(ms: f64, model: &UmepModel) -> Result<f64> {
    let [f1, f2] = cubics(model, ms);
    if !(ms > 0.0) || !(f1[0] > 0.0) {
        return Err(Error::ApproximationBreakdown { ms, f1: f1[0] });
    }
    Ok(model.prefactor * (f1[0] - (model.users as f64 - 1.0) * f2[0] / f1[0]))
}

/// Largest `Ms` with `kappa Ms^2 dx^2 / (8 y^2) < threshold`.
pub fn validity_boundary(model: &UmepModel, threshold: f64) -> usize {
    if threshold <= 0.0 {
        return 0;
    }
    if model.kappa == 0.0 || model.dx == 0.0 {
        return model.antennas;
    }
    let limit = (8.0 * threshold * model.y * model.y / (model.kappa * model.dx * model.dx)).sqrt();
    // strict inequality: an exact integer limit is excluded
    let floor = limit.floor();
    let ms = if floor == limit { floor - 1.0 } else { floor };
    ms.max(0.0) as usize
}

/// Total EE (bits/J) of the expected-position model at a continuous `ms`.
pub fn ee_analytic(ms: f64, model: &UmepModel) -> Result<f64> {
    let gamma = sinr_zf_ba(ms, model)?.max(0.0);
    Ok(ee_from_gamma(gamma, ms, model))
}

fn ee_from_gamma(gamma: f64, ms: f64, model: &UmepModel) -> f64 {
    let rate = model.bandwidth * model.users as f64 * (1.0 + gamma).log2();
    rate / (model.p_bc * rate + model.t0 + model.t1 * ms)
}

/// Optimality function `f` (zero at the stationary point of the EE) and its derivative.
///
/// `f = gamma' - t1 (1 + gamma) ln(1 + gamma) / D` with `D = t0 + t1 Ms`.
pub fn f_and_fprime(ms: f64, model: &UmepModel) -> Result<(f64, f64)> {
    let gamma = sinr_zf_ba(ms, model)?;
    let (g1, g2) = gamma_derivatives(ms, model);
    let t1 = model.t1;
    let d = model.t0 + t1 * ms;
    let ln = (1.0 + gamma).ln();
    let f = g1 - t1 * (1.0 + gamma) * ln / d;
    let fp = g2 - (t1 * d * g1 * (1.0 + ln) - t1 * t1 * (1.0 + gamma) * ln) / (d * d);
    Ok((f, fp))
}

/// First and second derivatives of the expanded SINR.
pub fn gamma_derivatives(ms: f64, model: &UmepModel) -> (f64, f64) {
    let [[f1, d1, e1], [f2, d2, e2]] = cubics(model, ms);
    let kk = model.users as f64 - 1.0;
    let cross = f1 * d2 - f2 * d1;
    let g1 = model.prefactor * (d1 - kk * cross / (f1 * f1));
    let g2 = model.prefactor
        * (e1 - kk * (f1 * f1 * (f1 * e2 - f2 * e1) - 2.0 * cross * f1 * d1) / f1.powi(4));
    (g1, g2)
}

/// Newton-Raphson controls.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOptions {
    /// Starting point; `None` means `1.5 K`.
    pub start: Option<f64>,
    /// Stop once `|delta Ms|` falls below this.
    pub tol: f64,
    pub max_iter: usize,
    pub threshold: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            start: None,
            tol: 0.5,
            max_iter: 20,
            threshold: VALIDITY_THRESHOLD,
        }
    }
}

/// How the optimum was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NewtonOutcome {
    /// Newton steps converged.
    Converged,
    /// At least one step fell back to bisection.
    Bisection,
    /// `f` keeps one sign on the interval; the better end point was returned.
    Boundary,
}

/// Result of [`optimal_ms_newton`].
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonSolution {
    pub ms_star: usize,
    /// Last real-valued iterate.
    pub root: f64,
    /// Number of updates performed.
    pub iterations: usize,
    pub outcome: NewtonOutcome,
    /// Flops spent by the solver.
    pub flops: f64,
    pub ee: f64,
    /// Search interval `[K, boundary]`.
    pub interval: (usize, usize),
}

/// Optimal active-antenna count from the root of `f` on `[K, boundary]`.
///
/// Iterates are clamped to the interval; a step that leaves it, or a
/// vanishing derivative, is replaced by bisection on the current bracket.
/// The real root is finally rounded to whichever neighboring integer has the
/// higher analytic EE.
pub fn optimal_ms_newton(model: &UmepModel, opts: &NewtonOptions) -> Result<NewtonSolution> {
    let lo_n = model.users.max(1);
    let hi_n = validity_boundary(model, opts.threshold).min(model.antennas);
    if lo_n > hi_n {
        return Err(Error::EmptySearchInterval {
            users: model.users,
            boundary: hi_n,
        });
    }
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(Error::InvalidParameter("Newton tol must be positive and max_iter at least 1".into()));
    }
    let (lo, hi) = (lo_n as f64, hi_n as f64);

    let (f_lo, _) = f_and_fprime(lo, model)?;
    let (f_hi, _) = f_and_fprime(hi, model)?;
    let mut flops = 2.0 * FLOPS_PER_SIGN;
    let mut eval = |ms: f64| {
        flops += FLOPS_PER_STEP;
        f_and_fprime(ms, model)
    };
    if f_lo.signum() == f_hi.signum() && f_lo != 0.0 && f_hi != 0.0 {
        // monotone EE on the interval
        let ms_star = if f_lo > 0.0 { hi_n } else { lo_n };
        let ee = ee_analytic(ms_star as f64, model)?;
        return Ok(NewtonSolution {
            ms_star,
            root: ms_star as f64,
            iterations: 0,
            outcome: NewtonOutcome::Boundary,
            flops: flops + FLOPS_PER_EE,
            ee,
            interval: (lo_n, hi_n),
        });
    }

    // f > 0 below the root and f < 0 above it
    let (mut below, mut above) = if f_lo > 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = opts.start.unwrap_or(1.5 * model.users as f64).clamp(lo, hi);
    let mut outcome = NewtonOutcome::Converged;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        let (f, fp) = eval(x)?;
        if f > 0.0 {
            below = x;
        } else {
            above = x;
        }
        let newton = x - f / fp;
        let inside = (below.min(above)..=below.max(above)).contains(&newton);
        let next = if fp.abs() > f64::EPSILON * f.abs().max(1e-300) && newton.is_finite() && inside {
            newton
        } else {
            outcome = NewtonOutcome::Bisection;
            0.5 * (below + above)
        };
        iterations += 1;
        let step = (next - x).abs();
        x = next;
        if step < opts.tol || f == 0.0 {
            break;
        }
    }

    let floor = (x.floor() as usize).clamp(lo_n, hi_n);
    let ceil = (x.ceil() as usize).clamp(lo_n, hi_n);
    let ee_floor = ee_analytic(floor as f64, model)?;
    let ee_ceil = ee_analytic(ceil as f64, model)?;
    flops += 2.0 * FLOPS_PER_EE;
    let (ms_star, ee) = if ee_ceil > ee_floor { (ceil, ee_ceil) } else { (floor, ee_floor) };
    Ok(NewtonSolution {
        ms_star,
        root: x,
        iterations,
        outcome,
        flops,
        ee,
        interval: (lo_n, hi_n),
    })
}

/// Integer maximizer of [`ee_analytic`] over `[lo, hi]` (first on ties).
pub fn grid_argmax(model: &UmepModel, lo: usize, hi: usize) -> Result<(usize, f64)> {
    let mut best = (lo, f64::NEG_INFINITY);
    for ms in lo..=hi {
        let ee = ee_analytic(ms as f64, model)?;
        if ee > best.1 {
            best = (ms, ee);
        }
    }
    Ok(best)
}
