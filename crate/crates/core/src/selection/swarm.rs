//! Binary particle swarm search over antenna masks.

use rand::Rng;

use super::{random_mask, EeObjective, HeuristicParams, SelectionResult};
use crate::error::{Error, Result};
use crate::power::Complexity;
use crate::precoding::ActiveSet;
use crate::rng::{substream, Purpose};

/// Swarm search seeded with `init` plus random masks, on a stream derived from `seed`.
pub fn pso_select(
    init: &ActiveSet,
    params: &HeuristicParams,
    objective: &EeObjective<'_>,
    seed: u64,
) -> Result<SelectionResult> {
    pso_select_with(init, params, objective, &mut substream(seed, Purpose::Swarm, 0))
}

/// [`pso_select`] drawing from a caller-supplied generator.
pub fn pso_select_with<R: Rng + ?Sized>(
    init: &ActiveSet,
    params: &HeuristicParams,
    objective: &EeObjective<'_>,
    rng: &mut R,
) -> Result<SelectionResult> {
    let m = objective.antennas();
    let size = params.swarm_size(m);
    let mut positions = Vec::with_capacity(size);
    positions.push(init.mask());
    positions.extend((1..size).map(|_| random_mask(m, rng)));
    let velocities = (0..size)
        .map(|_| (0..m).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect();
    pso_from_state(positions, velocities, params, objective, rng)
}

/// Runs the swarm from explicit positions and velocities.
///
/// Velocities stay real and unbounded; positions are re-binarized after every
/// move (`x > 0.5` is on). Each attraction term draws its own uniform weights.
pub fn pso_from_state<R: Rng + ?Sized>(
    positions: Vec<Vec<bool>>,
    mut velocities: Vec<Vec<f64>>,
    params: &HeuristicParams,
    objective: &EeObjective<'_>,
    rng: &mut R,
) -> Result<SelectionResult> {
    params.validate()?;
    let m = objective.antennas();
    let size = positions.len();
    if size == 0 {
        return Err(Error::InvalidParameter("PSO swarm must not be empty".into()));
    }
    if velocities.len() != size
        || positions.iter().any(|p| p.len() != m)
        || velocities.iter().any(|v| v.len() != m)
    {
        return Err(Error::DimensionMismatch(format!(
            "swarm state must be {size} x {m} for positions and velocities"
        )));
    }

    let mut theta: Vec<Vec<f64>> = positions
        .iter()
        .map(|p| p.iter().map(|&b| f64::from(u8::from(b))).collect())
        .collect();
    let mut personal: Vec<(Vec<bool>, f64)> = positions
        .into_iter()
        .map(|p| {
            let ee = objective.evaluate(&p);
            (p, ee)
        })
        .collect();
    let (mut best_mask, mut best) = personal
        .iter()
        .fold(None::<&(Vec<bool>, f64)>, |acc, p| match acc {
            Some(a) if a.1 >= p.1 => Some(a),
            _ => Some(p),
        })
        .cloned()
        .expect("swarm is non-empty");
    let mut trace = vec![best];
    let mut iterations = 1;
    let mut stall = 0;

    while !params.should_stop(iterations, stall) {
        let mut improved = false;
        for (i, (x, v)) in theta.iter_mut().zip(&mut velocities).enumerate() {
            let own = &personal[i].0;
            for d in 0..m {
                let g_c: f64 = rng.random();
                let g_s: f64 = rng.random();
                v[d] = params.nu * v[d]
                    + params.mu_c * g_c * (bit(own[d]) - x[d])
                    + params.mu_s * g_s * (bit(best_mask[d]) - x[d]);
                x[d] = bit(x[d] + v[d] > 0.5);
            }
            let mask: Vec<bool> = x.iter().map(|&b| b > 0.5).collect();
            let ee = objective.evaluate(&mask);
            if ee > personal[i].1 {
                personal[i] = (mask.clone(), ee);
            }
            if ee > best {
                best = ee;
                best_mask = mask;
                improved = true;
            }
        }
        stall = if improved { 0 } else { stall + 1 };
        trace.push(best);
        iterations += 1;
    }

    let flops = Complexity::Swarm {
        m,
        k: objective.users(),
        iterations: iterations as f64,
        particles: size,
    }
    .flops();
    objective.finish(&best_mask, best, iterations, flops, trace)
}

fn bit(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power::PowerParams;
    use crate::precoding::Precoder;
    use crate::rng::StreamRng;
    use crate::selection::hrnp_select;
    use crate::selection::testing::{exhaustive, small_drop};
    use rand::SeedableRng;

    #[test]
    fn still_swarm_keeps_initial_best() {
        let (cfg, beta) = small_drop(12, 3, 2);
        let pp = PowerParams::default();
        let obj = EeObjective::new(&beta, &cfg, &pp, Precoder::Zf);
        let mut rng = StreamRng::seed_from_u64(9);
        let positions: Vec<Vec<bool>> = (0..5).map(|_| random_mask(12, &mut rng)).collect();
        let expected = positions.iter().map(|p| obj.evaluate(p)).fold(0.0, f64::max);
        let params = HeuristicParams { nu: 0.0, mu_c: 0.0, mu_s: 0.0, ..Default::default() };
        let res = pso_from_state(positions.clone(), vec![vec![0.0; 12]; 5], &params, &obj, &mut rng).unwrap();
        assert_eq!(res.raw_ee, expected);
        assert!(positions.contains(&res.active.mask()));
        assert_eq!(res.iterations, 1 + params.early_stop_window);
    }

    #[test]
    fn never_worse_than_init_and_deterministic() {
        let (cfg, beta) = small_drop(60, 6, 8);
        let pp = PowerParams::default();
        let obj = EeObjective::new(&beta, &cfg, &pp, Precoder::Cb);
        let init = hrnp_select(&beta, 20).unwrap();
        let params = HeuristicParams::default();
        for seed in 0..4 {
            let res = pso_select(&init, &params, &obj, seed).unwrap();
            assert!(res.raw_ee >= obj.evaluate(&init.mask()));
            assert!(res.trace.windows(2).all(|w| w[1] >= w[0]));
            assert_eq!(res.trace.len(), res.iterations);
            assert!(res.ee <= res.raw_ee);
            assert_eq!(res, pso_select(&init, &params, &obj, seed).unwrap());
        }
    }

    #[test]
    fn finds_enumeration_optimum_on_small_instance() {
        let (cfg, beta) = small_drop(6, 2, 11);
        let pp = PowerParams::default();
        let obj = EeObjective::new(&beta, &cfg, &pp, Precoder::Zf);
        let params = HeuristicParams {
            n_it_max: 200,
            early_stop_window: 0,
            p_pso: Some(6),
            ..Default::default()
        };
        let res = pso_select(&hrnp_select(&beta, 3).unwrap(), &params, &obj, 7).unwrap();
        let (opt, opt_ee) = exhaustive(&obj);
        assert_eq!(res.raw_ee, opt_ee);
        assert_eq!(res.active.mask(), opt);
    }

    #[test]
    fn rejects_mismatched_state() {
        let (cfg, beta) = small_drop(6, 2, 11);
        let pp = PowerParams::default();
        let obj = EeObjective::new(&beta, &cfg, &pp, Precoder::Zf);
        let mut rng = StreamRng::seed_from_u64(0);
        let params = HeuristicParams::default();
        assert!(pso_from_state(vec![vec![true; 6]], vec![], &params, &obj, &mut rng).is_err());
        assert!(pso_from_state(vec![vec![true; 5]], vec![vec![0.0; 5]], &params, &obj, &mut rng).is_err());
        assert!(pso_from_state(vec![], vec![], &params, &obj, &mut rng).is_err());
    }
}
