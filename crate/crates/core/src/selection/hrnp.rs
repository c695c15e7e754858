//! Highest received normalized power (HRNP) ranking.

use crate::error::{Error, Result};
use crate::geometry::LongTermFadingMatrix;
use crate::precoding::ActiveSet;

/// `phi_m = sum_k beta_mk / sum_j beta_jk`: antenna `m`'s share of each
/// user's total received power, summed over users.
pub fn hrnp_metric(beta: &LongTermFadingMatrix) -> Result<Vec<f64>> {
    let sums = beta.column_sums();
    if let Some(user) = sums.iter().position(|&s| !(s > 0.0)) {
        return Err(Error::ZeroColumnSum(user));
    }
    let inv: Vec<f64> = sums.iter().map(|s| 1.0 / s).collect();
    Ok((0..beta.antennas())
        .map(|a| beta.row(a).iter().zip(&inv).map(|(b, i)| b * i).sum())
        .collect())
}

/// All antennas, best first; ties go to the lower index.
pub fn hrnp_order(beta: &LongTermFadingMatrix) -> Result<Vec<usize>> {
    let phi = hrnp_metric(beta)?;
    let mut order: Vec<usize> = (0..phi.len()).collect();
    order.sort_by(|&a, &b| phi[b].total_cmp(&phi[a]));
    Ok(order)
}

/// The `ms` antennas with the largest HRNP metric.
pub fn hrnp_select(beta: &LongTermFadingMatrix, ms: usize) -> Result<ActiveSet> {
    let m = beta.antennas();
    if ms == 0 || ms > m {
        return Err(Error::MsOutOfRange { ms, m });
    }
    let mut chosen = hrnp_order(beta)?;
    chosen.truncate(ms);
    chosen.sort_unstable();
    ActiveSet::from_indices(m, chosen)
}
