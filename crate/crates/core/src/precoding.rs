//! Linear precoding and SINR.
//!
//! Two routes to the per-user SINR are provided. [`precode`] followed by
//! [`instantaneous_sinr`] works on one small-scale fading realization with
//! uniform power allocation (`p_k ||g_k||^2 = P_max / K`). [`det_sinr`] is the
//! large-array deterministic equivalent that only needs the long-term gains of
//! the active antennas, which is what antenna selection operates on.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::LongTermFadingMatrix;

/// Gram matrices with a larger eigenvalue spread are treated as singular.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precoder {
    /// Conjugate beamforming (matched filter).
    Cb,
    /// Zero forcing.
    Zf,
}

impl Precoder {
    pub fn as_str(self) -> &'static str {
        match self {
            Precoder::Cb => "cb",
            Precoder::Zf => "zf",
        }
    }
}

impl fmt::Display for Precoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Precoder {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "cb" => Ok(Precoder::Cb),
            "zf" => Ok(Precoder::Zf),
            other => Err(format!("unknown precoder `{other}` (expected cb or zf)")),
        }
    }
}

/// The set of switched-on antennas, shared by all users.
///
/// Indices are 0-based and strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActiveSet {
    antennas: usize,
    indices: Vec<usize>,
}

impl ActiveSet {
    pub fn from_indices(antennas: usize, indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyActiveSet);
        }
        if let Some(w) = indices.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidActiveSet(format!(
                "indices must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        if let Some(&last) = indices.last() {
            if last >= antennas {
                return Err(Error::InvalidActiveSet(format!(
                    "index {last} outside an array of {antennas}"
                )));
            }
        }
        Ok(Self { antennas, indices })
    }

    pub fn from_mask(mask: &[bool]) -> Result<Self> {
        let indices = mask
            .iter()
            .enumerate()
            .filter_map(|(i, &on)| on.then_some(i))
            .collect();
        Self::from_indices(mask.len(), indices)
    }

    pub fn full(antennas: usize) -> Self {
        Self {
            antennas,
            indices: (0..antennas).collect(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Number of active antennas, `M_s`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Size of the array the set was drawn from.
    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.antennas];
        for &i in &self.indices {
            mask[i] = true;
        }
        mask
    }
}

/// Precoding matrix and per-user powers under the `alpha = 1` convention.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecodingResult {
    pub kind: Precoder,
    /// `|A| x K` precoding vectors, one column per user.
    pub g: DMatrix<Complex64>,
    /// Power coefficient per user (watts per unit precoder energy).
    pub p: Vec<f64>,
}

impl PrecodingResult {
    /// `sum_k p_k ||g_k||^2`, which equals `P_max` by construction.
    pub fn radiated_power(&self) -> f64 {
        self.p
            .iter()
            .enumerate()
            .map(|(k, p)| p * self.g.column(k).norm_squared())
            .sum()
    }
}

/// Per-user SINR and spectral efficiency.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrReport {
    pub gamma: Vec<f64>,
    /// `log2(1 + gamma_k)` in bits per channel use.
    pub se: Vec<f64>,
    pub sum_se: f64,
    /// Users whose deterministic-equivalent ZF SINR went negative and was clamped to 0.
    pub clamped: usize,
}

impl SinrReport {
    pub fn from_gamma(gamma: Vec<f64>) -> Self {
        Self::with_clamped(gamma, 0)
    }

    fn with_clamped(gamma: Vec<f64>, clamped: usize) -> Self {
        let se: Vec<f64> = gamma.iter().map(|g| (1.0 + g).log2()).collect();
        let sum_se = se.iter().sum();
        Self {
            gamma,
            se,
            sum_se,
            clamped,
        }
    }

    pub fn mean_gamma(&self) -> f64 {
        self.gamma.iter().sum::<f64>() / self.gamma.len() as f64
    }
}

/// Sum spectral efficiency `sum_k log2(1 + gamma_k)` (bpcu).
pub fn sum_se(report: &SinrReport) -> f64 {
    report.se.iter().sum()
}

/// Builds the CB or ZF precoder for the restricted channel `h_a` (`|A| x K`).
pub fn precode(kind: Precoder, h_a: &DMatrix<Complex64>, p_max: f64) -> Result<PrecodingResult> {
    let (rows, k) = h_a.shape();
    if k == 0 || rows == 0 {
        return Err(Error::DimensionMismatch(format!("empty {rows}x{k} channel")));
    }
    let share = p_max / k as f64;
    match kind {
        Precoder::Cb => {
            let p = h_a
                .column_iter()
                .map(|h| share / h.norm_squared())
                .collect();
            Ok(PrecodingResult {
                kind,
                g: h_a.clone(),
                p,
            })
        }
        Precoder::Zf => {
            if rows < k {
                return Err(Error::ZfInfeasible {
                    antennas: rows,
                    users: k,
                });
            }
            let gram = h_a.adjoint() * h_a;
            let inv = invert_gram(gram)?;
            let p = (0..k).map(|i| share / inv[(i, i)].re).collect();
            Ok(PrecodingResult {
                kind,
                g: h_a * inv,
                p,
            })
        }
    }
}

fn invert_gram(gram: DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let eig = gram.clone().symmetric_eigen();
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition <= MAX_GRAM_CONDITION) {
        return Err(Error::RankDeficient { condition });
    }
    let chol = gram
        .cholesky()
        .ok_or(Error::RankDeficient { condition })?;
    Ok(chol.inverse())
}

/// SINR of every user for one fading realization:
/// `gamma_k = p_k |h_k^H g_k|^2 / (sum_{j != k} p_j |h_k^H g_j|^2 + sigma^2)`.
pub fn instantaneous_sinr(
    h_a: &DMatrix<Complex64>,
    result: &PrecodingResult,
    sigma2: f64,
) -> Result<SinrReport> {
    if h_a.shape() != result.g.shape() || result.p.len() != h_a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "channel {:?} vs precoder {:?} with {} powers",
            h_a.shape(),
            result.g.shape(),
            result.p.len()
        )));
    }
    let cross = h_a.adjoint() * &result.g;
    let k = h_a.ncols();
    let gamma = (0..k)
        .map(|u| {
            let mut interference = sigma2;
            let mut signal = 0.0;
            for j in 0..k {
                let term = result.p[j] * cross[(u, j)].norm_sqr();
                if j == u {
                    signal = term;
                } else {
                    interference += term;
                }
            }
            signal / interference
        })
        .collect();
    Ok(SinrReport::from_gamma(gamma))
}

/// Deterministic-equivalent SINR over the active set with the power
/// constraint folded in.
///
/// With `s_k = sum_{m in A} beta_mk` and
/// `I_k = sum_{j != k} sum_{m in A} beta_mk beta_mj / s_j`:
///
/// * CB: `s_k / (I_k + K sigma^2 / P_max)`
/// * ZF: `P_max / (K sigma^2) * (s_k - I_k)`, clamped at 0 (see [`SinrReport::clamped`]).
pub fn det_sinr(
    kind: Precoder,
    beta: &LongTermFadingMatrix,
    active: &ActiveSet,
    p_max: f64,
    sigma2: f64,
) -> Result<SinrReport> {
    if active.is_empty() {
        return Err(Error::EmptyActiveSet);
    }
    if active.antennas() != beta.antennas() {
        return Err(Error::DimensionMismatch(format!(
            "active set over {} antennas, gains over {}",
            active.antennas(),
            beta.antennas()
        )));
    }
    Ok(det_sinr_over(kind, beta, active.indices(), p_max, sigma2))
}

/// [`det_sinr`] over a raw, non-empty list of distinct antenna indices.
pub(crate) fn det_sinr_over(
    kind: Precoder,
    beta: &LongTermFadingMatrix,
    indices: &[usize],
    p_max: f64,
    sigma2: f64,
) -> SinrReport {
    let k = beta.users();
    let mut s = vec![0.0; k];
    for &a in indices {
        for (sk, b) in s.iter_mut().zip(beta.row(a)) {
            *sk += b;
        }
    }
    let inv_s: Vec<f64> = s.iter().map(|&v| if v > 0.0 { 1.0 / v } else { 0.0 }).collect();

    // sum_j beta_mj beta_mk / s_j regrouped per antenna: beta_mk * (w_m - beta_mk / s_k)
    let mut interference = vec![0.0; k];
    for &a in indices {
        let row = beta.row(a);
        let w: f64 = row.iter().zip(&inv_s).map(|(b, i)| b * i).sum();
        for u in 0..k {
            interference[u] += row[u] * (w - row[u] * inv_s[u]);
        }
    }
    finish_det(kind, &s, &interference, p_max, sigma2)
}

fn finish_det(kind: Precoder, s: &[f64], interference: &[f64], p_max: f64, sigma2: f64) -> SinrReport {
    let k = s.len() as f64;
    match kind {
        Precoder::Cb => {
            let noise = k * sigma2 / p_max;
            SinrReport::from_gamma(
                s.iter()
                    .zip(interference)
                    .map(|(s, i)| s / (i + noise))
                    .collect(),
            )
        }
        Precoder::Zf => {
            let scale = p_max / (k * sigma2);
            let mut clamped = 0;
            let gamma = s
                .iter()
                .zip(interference)
                .map(|(s, i)| {
                    let g = scale * (s - i);
                    if g < 0.0 {
                        clamped += 1;
                        0.0
                    } else {
                        g
                    }
                })
                .collect();
            SinrReport::with_clamped(gamma, clamped)
        }
    }
}

/// Incremental deterministic-equivalent SINR for nested active sets.
///
/// Antennas are added one at a time (e.g. in HRNP rank order); each addition
/// costs `O(K^2)` and a report for the current set costs `O(K^2)`, so a whole
/// `M_s = 1..M` sweep costs the same as a handful of direct evaluations.
#[derive(Debug, Clone)]
pub struct NestedSinr {
    k: usize,
    count: usize,
    s: Vec<f64>,
    // sum_m beta_mk beta_mj, full symmetric K x K
    cross: Vec<f64>,
}

impl NestedSinr {
    pub fn new(users: usize) -> Self {
        Self {
            k: users,
            count: 0,
            s: vec![0.0; users],
            cross: vec![0.0; users * users],
        }
    }

    pub fn push(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.k);
        for (u, &bu) in row.iter().enumerate() {
            self.s[u] += bu;
            let line = &mut self.cross[u * self.k..(u + 1) * self.k];
            for (c, &bj) in line.iter_mut().zip(row) {
                *c += bu * bj;
            }
        }
        self.count += 1;
    }

    /// Number of antennas added so far.
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn report(&self, kind: Precoder, p_max: f64, sigma2: f64) -> Result<SinrReport> {
        if self.count == 0 {
            return Err(Error::EmptyActiveSet);
        }
        let inv_s: Vec<f64> = self.s.iter().map(|&v| if v > 0.0 { 1.0 / v } else { 0.0 }).collect();
        let interference: Vec<f64> = (0..self.k)
            .map(|u| {
                let line = &self.cross[u * self.k..(u + 1) * self.k];
                let total: f64 = line.iter().zip(&inv_s).map(|(c, i)| c * i).sum();
                total - line[u] * inv_s[u]
            })
            .collect();
        Ok(finish_det(kind, &self.s, &interference, p_max, sigma2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{draw_channel, ChannelRealization};
    use crate::rng::{substream, Purpose};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_channel(m: usize, k: usize, seed: u64) -> DMatrix<Complex64> {
        let beta = LongTermFadingMatrix::new(m, k, vec![1.0; m * k]).unwrap();
        draw_channel(&beta, seed).h
    }

    // Direct double-sum form of the deterministic-equivalent interference.
    fn det_oracle(kind: Precoder, beta: &LongTermFadingMatrix, set: &[usize], p: f64, n: f64) -> Vec<f64> {
        let k = beta.users();
        let s: Vec<f64> = (0..k).map(|u| set.iter().map(|&a| beta.get(a, u)).sum()).collect();
        (0..k)
            .map(|u| {
                let i: f64 = (0..k)
                    .filter(|&j| j != u)
                    .map(|j| set.iter().map(|&a| beta.get(a, u) * beta.get(a, j)).sum::<f64>() / s[j])
                    .sum();
                match kind {
                    Precoder::Cb => s[u] / (i + k as f64 * n / p),
                    Precoder::Zf => (p / (k as f64 * n) * (s[u] - i)).max(0.0),
                }
            })
            .collect()
    }

    #[test]
    fn active_set_validation() {
        assert_eq!(ActiveSet::from_indices(4, vec![]), Err(Error::EmptyActiveSet));
        assert!(ActiveSet::from_indices(4, vec![1, 1]).is_err());
        assert!(ActiveSet::from_indices(4, vec![2, 1]).is_err());
        assert!(ActiveSet::from_indices(4, vec![4]).is_err());
        let s = ActiveSet::from_mask(&[false, true, false, true]).unwrap();
        assert_eq!(s.indices(), &[1, 3]);
        assert_eq!(s.mask(), vec![false, true, false, true]);
        assert_eq!(ActiveSet::full(3).len(), 3);
    }

    #[test]
    fn single_user_meets_power_constraint() {
        let h = random_channel(5, 1, 1);
        for kind in [Precoder::Cb, Precoder::Zf] {
            let r = precode(kind, &h, 2.5).unwrap();
            assert_relative_eq!(r.radiated_power(), 2.5, max_relative = 1e-12);
        }
    }

    #[test]
    fn orthonormal_channel_is_its_own_zf_precoder() {
        let h = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
        let r = precode(Precoder::Zf, &h, 3.0).unwrap();
        for (a, b) in r.g.iter().zip(h.iter()) {
            assert_relative_eq!((a - b).norm(), 0.0, epsilon = 1e-15);
        }
        assert_eq!(r.p, vec![1.5, 1.5]);
    }

    #[test]
    fn zf_nulls_interference() {
        let h = random_channel(8, 3, 42);
        let r = precode(Precoder::Zf, &h, 1.0).unwrap();
        let cross = h.adjoint() * &r.g;
        for k in 0..3 {
            for j in 0..3 {
                if j != k {
                    assert!(cross[(k, j)].norm() < 1e-10);
                }
            }
        }
        assert_relative_eq!(r.radiated_power(), 1.0, max_relative = 1e-9);
    }

    #[test]
    fn zf_rejects_infeasible_and_singular_channels() {
        let h = random_channel(2, 3, 1);
        assert_eq!(
            precode(Precoder::Zf, &h, 1.0).unwrap_err(),
            Error::ZfInfeasible { antennas: 2, users: 3 }
        );
        let col = DMatrix::from_fn(4, 1, |i, _| c(i as f64 + 1.0, 0.5));
        let dup = DMatrix::from_fn(4, 2, |i, _| col[(i, 0)]);
        assert!(matches!(precode(Precoder::Zf, &dup, 1.0), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn sinr_single_user_cb_and_noise_scaling() {
        let h = random_channel(6, 1, 3);
        let r = precode(Precoder::Cb, &h, 2.0).unwrap();
        let g = instantaneous_sinr(&h, &r, 0.1).unwrap();
        assert_relative_eq!(g.gamma[0], 2.0 * h.column(0).norm_squared() / 0.1, max_relative = 1e-12);

        let h = random_channel(10, 3, 4);
        let r = precode(Precoder::Zf, &h, 1.0).unwrap();
        let a = instantaneous_sinr(&h, &r, 0.01).unwrap();
        let b = instantaneous_sinr(&h, &r, 0.02).unwrap();
        for (x, y) in a.gamma.iter().zip(&b.gamma) {
            assert_relative_eq!(*x, 2.0 * y, max_relative = 1e-9);
        }
        for u in 0..3 {
            // interference is numerically zero
            assert_relative_eq!(a.gamma[u], r.p[u] / 0.01, max_relative = 1e-9);
        }
    }

    #[test]
    fn precoder_scaling_does_not_change_sinr() {
        let h = random_channel(12, 4, 8);
        for kind in [Precoder::Cb, Precoder::Zf] {
            let r = precode(kind, &h, 1.0).unwrap();
            let base = instantaneous_sinr(&h, &r, 0.05).unwrap();
            let scale = 3.7;
            let scaled = PrecodingResult {
                kind,
                g: r.g.map(|z| z * scale),
                p: r.p.iter().map(|p| p / (scale * scale)).collect(),
            };
            let other = instantaneous_sinr(&h, &scaled, 0.05).unwrap();
            for (x, y) in base.gamma.iter().zip(&other.gamma) {
                assert_relative_eq!(*x, *y, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn det_sinr_flat_gains_hand_values() {
        let beta = LongTermFadingMatrix::new(4, 2, vec![1.0; 8]).unwrap();
        let all = ActiveSet::full(4);
        let zf = det_sinr(Precoder::Zf, &beta, &all, 100.0, 1.0).unwrap();
        let cb = det_sinr(Precoder::Cb, &beta, &all, 100.0, 1.0).unwrap();
        assert_relative_eq!(zf.gamma[0], 150.0, max_relative = 1e-14);
        assert_relative_eq!(cb.gamma[1], 4.0 / 1.02, max_relative = 1e-14);
    }

    #[test]
    fn det_sinr_single_user_zf() {
        let beta = LongTermFadingMatrix::new(3, 1, vec![0.5, 0.25, 2.0]).unwrap();
        let set = ActiveSet::from_indices(3, vec![0, 2]).unwrap();
        let r = det_sinr(Precoder::Zf, &beta, &set, 4.0, 0.5).unwrap();
        assert_relative_eq!(r.gamma[0], 4.0 / 0.5 * 2.5, max_relative = 1e-14);
    }

    #[test]
    fn det_sinr_matches_double_sum() {
        let mut rng = substream(1, Purpose::Users, 0);
        use rand::Rng;
        let data: Vec<f64> = (0..40 * 6).map(|_| rng.random_range(0.1..2.0)).collect();
        let beta = LongTermFadingMatrix::new(40, 6, data).unwrap();
        let idx: Vec<usize> = (0..40).filter(|i| i % 3 != 1).collect();
        let set = ActiveSet::from_indices(40, idx.clone()).unwrap();
        for kind in [Precoder::Cb, Precoder::Zf] {
            let fast = det_sinr(kind, &beta, &set, 2.0, 0.3).unwrap();
            let slow = det_oracle(kind, &beta, &idx, 2.0, 0.3);
            for (a, b) in fast.gamma.iter().zip(&slow) {
                assert_relative_eq!(*a, *b, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn negative_zf_bracket_is_clamped() {
        // all users see almost only antenna 0: s_k = 1.02 < I_k = 2 (1 + 2e-4) / 1.02
        let beta =
            LongTermFadingMatrix::new(3, 3, vec![1.0, 1.0, 1.0, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01]).unwrap();
        let r = det_sinr(Precoder::Zf, &beta, &ActiveSet::full(3), 1.0, 1.0).unwrap();
        assert_eq!(r.gamma, vec![0.0; 3]);
        assert_eq!(r.clamped, 3);
        assert_eq!(r.sum_se, 0.0);
    }

    #[test]
    fn sum_se_exact_values() {
        assert_eq!(sum_se(&SinrReport::from_gamma(vec![0.0, 0.0])), 0.0);
        assert_eq!(sum_se(&SinrReport::from_gamma(vec![1.0, 3.0])), 3.0);
        let r = SinrReport::from_gamma(vec![27.34; 100]);
        assert_relative_eq!(r.sum_se, 100.0 * 28.34f64.log2(), max_relative = 1e-14);
        assert!((r.sum_se - 482.5).abs() < 0.1);
    }

    #[test]
    fn nested_sums_match_direct_evaluation() {
        let mut rng = substream(2, Purpose::Users, 0);
        use rand::Rng;
        let data: Vec<f64> = (0..30 * 5).map(|_| rng.random_range(0.1..2.0)).collect();
        let beta = LongTermFadingMatrix::new(30, 5, data).unwrap();
        let order: Vec<usize> = (0..30).rev().collect();
        let mut nested = NestedSinr::new(5);
        for (n, &a) in order.iter().enumerate() {
            nested.push(beta.row(a));
            let mut idx = order[..=n].to_vec();
            idx.sort_unstable();
            let set = ActiveSet::from_indices(30, idx).unwrap();
            for kind in [Precoder::Cb, Precoder::Zf] {
                let a = nested.report(kind, 1.0, 0.1).unwrap();
                let b = det_sinr(kind, &beta, &set, 1.0, 0.1).unwrap();
                for (x, y) in a.gamma.iter().zip(&b.gamma) {
                    assert_relative_eq!(*x, *y, max_relative = 1e-9, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn instantaneous_dimension_mismatch() {
        let h = random_channel(4, 2, 0);
        let r = precode(Precoder::Cb, &h, 1.0).unwrap();
        let other = ChannelRealization { h: random_channel(5, 2, 1) };
        assert!(instantaneous_sinr(&other.h, &r, 1.0).is_err());
    }
}
