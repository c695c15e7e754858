//! First-improvement local search over Hamming neighborhoods.

use itertools::Itertools;

use super::{EeObjective, HeuristicParams, SelectionResult};
use crate::error::Result;
use crate::power::Complexity;
use crate::precoding::ActiveSet;

/// Hill climbing from `init`.
///
/// Each iteration is one sweep over every flip pattern of Hamming weight
/// `1..=d_ham`, lighter patterns first and then in lexicographic order of the
/// flipped indices, applied to the current mask. An improving neighbor is
/// accepted at once and the sweep goes on from it, so one sweep costs
/// `sum_d C(M, d)` evaluations. The search ends after a sweep without
/// improvement or after `n_it_max` sweeps.
pub fn ls_select(
    init: &ActiveSet,
    params: &HeuristicParams,
    objective: &EeObjective<'_>,
) -> Result<SelectionResult> {
    params.validate()?;
    let m = objective.antennas();
    let radius = params.d_ham.clamp(1, m);
    let mut current = init.mask();
    let mut best = objective.evaluate(&current);
    let mut trace = Vec::new();
    let mut iterations = 0;

    while iterations < params.n_it_max {
        iterations += 1;
        let improved = sweep(&mut current, &mut best, radius, objective);
        trace.push(best);
        if !improved {
            break;
        }
    }

    let flops = Complexity::LocalSearch {
        m,
        k: objective.users(),
        iterations: iterations as f64,
    }
    .flops();
    objective.finish(&current, best, iterations, flops, trace)
}

fn sweep(current: &mut [bool], best: &mut f64, radius: usize, objective: &EeObjective<'_>) -> bool {
    let m = current.len();
    let mut improved = false;
    for d in 1..=radius {
        for flips in (0..m).combinations(d) {
            flip(current, &flips);
            let ee = objective.evaluate(current);
            if ee > *best {
                *best = ee;
                improved = true;
            } else {
                flip(current, &flips);
            }
        }
    }
    improved
}

fn flip(mask: &mut [bool], at: &[usize]) {
    for &i in at {
        mask[i] = !mask[i];
    }
}
