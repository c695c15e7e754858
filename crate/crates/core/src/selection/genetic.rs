//! Genetic search over antenna masks.

use rand::Rng;

use super::{random_mask, EeObjective, HeuristicParams, SelectionResult};
use crate::error::{Error, Result};
use crate::power::Complexity;
use crate::precoding::ActiveSet;
use crate::rng::{substream, Purpose};

/// Genetic search seeded with `init` plus random masks, on a stream derived from `seed`.
pub fn ga_select(
    init: &ActiveSet,
    params: &HeuristicParams,
    objective: &EeObjective<'_>,
    seed: u64,
) -> Result<SelectionResult> {
    ga_select_with(init, params, objective, &mut substream(seed, Purpose::Genetic, 0))
}

/// [`ga_select`] drawing from a caller-supplied generator.
pub fn ga_select_with<R: Rng + ?Sized>(
    init: &ActiveSet,
    params: &HeuristicParams,
    objective: &EeObjective<'_>,
    rng: &mut R,
) -> Result<SelectionResult> {
    let m = objective.antennas();
    let size = params.population(m);
    let mut population = Vec::with_capacity(size);
    population.push(init.mask());
    population.extend((1..size).map(|_| random_mask(m, rng)));
    ga_from_population(population, params, objective, rng)
}

/// Runs the generational loop from an explicit first generation.
///
/// Every generation is sorted by EE (stable, best first), the top
/// `max(2, ceil(parent_frac * P))` become parents, and the next generation is
/// built entirely from single-point crossovers of two distinct parents
/// followed by per-bit mutation. The best mask ever seen is kept aside.
pub fn ga_from_population<R: Rng + ?Sized>(
    population: Vec<Vec<bool>>,
    params: &HeuristicParams,
    objective: &EeObjective<'_>,
    rng: &mut R,
) -> Result<SelectionResult> {
    params.validate()?;
    let m = objective.antennas();
    let size = population.len();
    if size < 2 {
        return Err(Error::InvalidParameter(format!("GA population must be at least 2, got {size}")));
    }
    if let Some(bad) = population.iter().find(|p| p.len() != m) {
        return Err(Error::DimensionMismatch(format!("mask of length {} for {m} antennas", bad.len())));
    }
    let n_parents = ((params.parent_frac * size as f64).ceil() as usize).clamp(2, size);

    let mut scored = score(population, objective);
    let (mut best_mask, mut best) = best_of(&scored);
    let mut trace = vec![best];
    let mut iterations = 1;
    let mut stall = 0;

    while !params.should_stop(iterations, stall) {
        scored.sort_by(|a, b| b.1.total_cmp(&a.1));
        let parents = &scored[..n_parents];
        let children: Vec<Vec<bool>> = (0..size)
            .map(|_| {
                let i = rng.random_range(0..n_parents);
                let mut j = rng.random_range(0..n_parents - 1);
                if j >= i {
                    j += 1;
                }
                let mut child = crossover(&parents[i].0, &parents[j].0, rng);
                mutate(&mut child, params.p_mut, rng);
                child
            })
            .collect();
        scored = score(children, objective);
        let (gen_mask, gen_best) = best_of(&scored);
        if gen_best > best {
            best = gen_best;
            best_mask = gen_mask;
            stall = 0;
        } else {
            stall += 1;
        }
        trace.push(best);
        iterations += 1;
    }

    let flops = Complexity::Genetic {
        m,
        k: objective.users(),
        iterations: iterations as f64,
        population: size,
    }
    .flops();
    objective.finish(&best_mask, best, iterations, flops, trace)
}

fn score(population: Vec<Vec<bool>>, objective: &EeObjective<'_>) -> Vec<(Vec<bool>, f64)> {
    population
        .into_iter()
        .map(|mask| {
            let ee = objective.evaluate(&mask);
            (mask, ee)
        })
        .collect()
}

/// First member with the highest EE.
fn best_of(scored: &[(Vec<bool>, f64)]) -> (Vec<bool>, f64) {
    let mut best = &scored[0];
    for s in &scored[1..] {
        if s.1 > best.1 {
            best = s;
        }
    }
    best.clone()
}

/// Head of `a` and tail of `b`, cut uniformly so that both parts are non-empty.
fn crossover<R: Rng + ?Sized>(a: &[bool], b: &[bool], rng: &mut R) -> Vec<bool> {
    if a.len() < 2 {
        return a.to_vec();
    }
    let cut = rng.random_range(1..a.len());
    a[..cut].iter().chain(&b[cut..]).copied().collect()
}

fn mutate<R: Rng + ?Sized>(mask: &mut [bool], p: f64, rng: &mut R) {
    if p <= 0.0 {
        return;
    }
    for bit in mask {
        if rng.random_bool(p) {
            *bit = !*bit;
        }
    }
}
