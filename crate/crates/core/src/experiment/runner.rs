//! Monte-Carlo orchestration.
//!
//! Trials fan out over a rayon pool. Each trial draws from its own random
//! substreams, and per-trial results are reduced serially in trial order, so
//! the output does not depend on the number of threads.

use rayon::prelude::*;
use thiserror::Error;

use super::config::{ExperimentSpec, MsChoice, Scenario};
use super::output::ResultRow;
use crate::analytic::{build_umep, optimal_ms_newton};
use crate::error::Error;
use crate::geometry::{long_term_fading, ArrayGeometry, ChannelRealization, LongTermFadingMatrix, ScenarioConfig, UserPositions};
use crate::power::Complexity;
use crate::precoding::{instantaneous_sinr, precode, ActiveSet, NestedSinr, Precoder, SinrReport};
use crate::rng::{stream_index, substream, Purpose};
use crate::selection::{hrnp_order, select, EeObjective, Scheme};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "XLMIMO_EE_THREADS";

/// Runtime failures.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid experiment: {0}")]
    Spec(#[from] super::config::ConfigError),

    #[error("cannot choose Ms for K = {k}: {source}")]
    Optimum {
        k: usize,
        #[source]
        source: Error,
    },

    #[error("trial {trial} at K = {k} failed: {source}")]
    Trial {
        trial: usize,
        k: usize,
        #[source]
        source: Error,
    },

    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

/// Runs `spec` with the worker count from [`THREADS_ENV`] (all cores when unset).
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ResultRow>, RunError> {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0);
    run_experiment_with_threads(spec, threads)
}

/// Runs `spec` on a pool of `threads` workers (`None` means all cores).
pub fn run_experiment_with_threads(spec: &ExperimentSpec, threads: Option<usize>) -> Result<Vec<ResultRow>, RunError> {
    spec.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| RunError::Pool(e.to_string()))?;
    pool.install(|| match spec.scenario {
        Scenario::SweepMs => sweep_ms(spec),
        Scenario::Convergence => convergence(spec),
        Scenario::SweepK | Scenario::SweepSelectors | Scenario::Complexity | Scenario::Single => {
            operating_points(spec)
        }
    })
}

/// Per-trial metrics of one case.
#[derive(Debug, Clone, Copy, Default)]
struct Sample {
    gamma: f64,
    se: f64,
    ee: f64,
    active: f64,
    iterations: f64,
    c_as: f64,
    /// `(c_as - C_hrnp) / C_hrnp`, averaged per trial so that equal costs give exactly 0.
    relative: f64,
}

impl Sample {
    fn mean(samples: impl ExactSizeIterator<Item = Sample>) -> Sample {
        let n = samples.len() as f64;
        let mut acc = Sample::default();
        for s in samples {
            acc.gamma += s.gamma;
            acc.se += s.se;
            acc.ee += s.ee;
            acc.active += s.active;
            acc.iterations += s.iterations;
            acc.c_as += s.c_as;
            acc.relative += s.relative;
        }
        Sample {
            gamma: acc.gamma / n,
            se: acc.se / n,
            ee: acc.ee / n,
            active: acc.active / n,
            iterations: acc.iterations / n,
            c_as: acc.c_as / n,
            relative: acc.relative / n,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Case {
    precoder: Precoder,
    scheme: Option<Scheme>,
}

#[derive(Debug, Clone)]
struct Outcome {
    sample: Sample,
    monte_carlo: Option<Sample>,
    trace: Vec<f64>,
}

struct Point {
    index: usize,
    cfg: ScenarioConfig,
    /// Antennas handed to the selectors.
    ms: usize,
}

impl Point {
    fn c_hrnp(&self) -> f64 {
        Complexity::Hrnp {
            m: self.cfg.m,
            k: self.cfg.k,
        }
        .flops()
    }
}

fn cases(spec: &ExperimentSpec) -> Vec<Case> {
    let schemes = spec.selector.schemes();
    let mut out = Vec::new();
    for precoder in spec.precoder.precoders() {
        if schemes.is_empty() {
            out.push(Case { precoder, scheme: None });
        }
        for &scheme in &schemes {
            out.push(Case {
                precoder,
                scheme: Some(scheme),
            });
        }
    }
    out
}

fn resolve_ms(spec: &ExperimentSpec, cfg: &ScenarioConfig) -> Result<usize, RunError> {
    if spec.selector.schemes().is_empty() {
        return Ok(cfg.m);
    }
    match spec.ms {
        MsChoice::Fixed(ms) => Ok(ms),
        MsChoice::Auto => build_umep(cfg, &spec.power)
            .and_then(|model| optimal_ms_newton(&model, &spec.newton))
            .map(|sol| sol.ms_star)
            .map_err(|source| RunError::Optimum { k: cfg.k, source }),
    }
}

fn user_points(spec: &ExperimentSpec) -> Result<Vec<Point>, RunError> {
    spec.grid
        .iter()
        .enumerate()
        .map(|(index, &k)| {
            let cfg = spec.scenario_cfg.with_users(k);
            let ms = resolve_ms(spec, &cfg)?;
            Ok(Point { index, cfg, ms })
        })
        .collect()
}

fn draw_beta(seed: u64, trial: usize, point: usize, cfg: &ScenarioConfig) -> Result<LongTermFadingMatrix, Error> {
    let mut rng = substream(seed, Purpose::Users, stream_index(trial, point, 0));
    let users = UserPositions::random(cfg, &mut rng);
    long_term_fading(&ArrayGeometry::new(cfg), &users, cfg)
}

fn purpose(scheme: Scheme) -> Purpose {
    match scheme {
        Scheme::Hrnp | Scheme::LocalSearch => Purpose::LocalSearch,
        Scheme::Genetic => Purpose::Genetic,
        Scheme::Swarm => Purpose::Swarm,
    }
}

/// Runs every trial of one point; results are indexed `[trial][case]`.
fn run_point(spec: &ExperimentSpec, point: &Point, cases: &[Case]) -> Result<Vec<Vec<Outcome>>, RunError> {
    let results: Vec<Result<Vec<Outcome>, Error>> = (0..spec.trials)
        .into_par_iter()
        .map(|trial| {
            let beta = draw_beta(spec.seed, trial, point.index, &point.cfg)?;
            cases
                .iter()
                .enumerate()
                .map(|(slot, case)| run_case(spec, point, &beta, *case, trial, slot))
                .collect()
        })
        .collect();
    results
        .into_iter()
        .enumerate()
        .map(|(trial, r)| {
            r.map_err(|source| RunError::Trial {
                trial,
                k: point.cfg.k,
                source,
            })
        })
        .collect()
}

fn run_case(
    spec: &ExperimentSpec,
    point: &Point,
    beta: &LongTermFadingMatrix,
    case: Case,
    trial: usize,
    slot: usize,
) -> Result<Outcome, Error> {
    let objective = EeObjective::new(beta, &point.cfg, &spec.power, case.precoder);
    let (active, flops, iterations, trace) = match case.scheme {
        None => (ActiveSet::full(point.cfg.m), None, 0, Vec::new()),
        Some(scheme) => {
            let mut rng = substream(spec.seed, purpose(scheme), stream_index(trial, point.index, slot));
            let res = select(scheme, &objective, point.ms, &spec.heuristics, &mut rng)?;
            (res.active, Some(res.flops_spent), res.iterations, res.trace)
        }
    };
    let eval = objective.evaluate_set(&active, flops)?;
    let sample = Sample {
        gamma: eval.report.mean_gamma(),
        se: eval.report.sum_se,
        ee: eval.ee,
        active: active.len() as f64,
        iterations: iterations as f64,
        c_as: flops.unwrap_or(0.0),
        relative: (flops.unwrap_or(0.0) - point.c_hrnp()) / point.c_hrnp(),
    };
    let monte_carlo = if spec.fading_draws > 0 {
        let mut rng = substream(spec.seed, Purpose::Fading, stream_index(trial, point.index, slot));
        let report = monte_carlo_sinr(beta, &active, case.precoder, &point.cfg, spec.fading_draws, &mut rng)?;
        let rate = spec.power.bandwidth * report.sum_se;
        let breakdown = spec
            .power
            .breakdown(point.cfg.p_max, case.precoder, active.len(), point.cfg.k, rate, flops)?;
        Some(Sample {
            gamma: report.mean_gamma(),
            se: report.sum_se,
            ee: crate::power::energy_efficiency(report.sum_se, spec.power.bandwidth, &breakdown)?,
            ..sample
        })
    } else {
        None
    };
    Ok(Outcome {
        sample,
        monte_carlo,
        trace,
    })
}

/// Instantaneous SINR averaged over `draws` small-scale fading realizations.
///
/// `gamma` holds the per-user mean SINR; `se` and `sum_se` are the ergodic
/// spectral efficiencies (mean of `log2(1 + gamma)` over draws).
pub fn monte_carlo_sinr<R: rand::Rng + ?Sized>(
    beta: &LongTermFadingMatrix,
    active: &ActiveSet,
    precoder: Precoder,
    cfg: &ScenarioConfig,
    draws: usize,
    rng: &mut R,
) -> Result<SinrReport, Error> {
    if draws == 0 {
        return Err(Error::InvalidParameter("at least one fading draw is required".into()));
    }
    let k = beta.users();
    let mut gamma = vec![0.0; k];
    let mut se = vec![0.0; k];
    for _ in 0..draws {
        let h = ChannelRealization::random(beta, rng).restrict(active.indices());
        let result = precode(precoder, &h, cfg.p_max)?;
        let report = instantaneous_sinr(&h, &result, cfg.noise_power)?;
        for (u, &x) in report.gamma.iter().enumerate() {
            gamma[u] += x;
            se[u] += (1.0 + x).log2();
        }
    }
    let n = draws as f64;
    let gamma: Vec<f64> = gamma.into_iter().map(|x| x / n).collect();
    let se: Vec<f64> = se.into_iter().map(|x| x / n).collect();
    let sum_se = se.iter().sum();
    Ok(SinrReport {
        gamma,
        se,
        sum_se,
        clamped: 0,
    })
}

fn db(x: f64) -> f64 {
    10.0 * x.max(f64::MIN_POSITIVE).log10()
}

fn row(scenario: &str, k: usize, ms: usize, case: Case, s: &Sample) -> ResultRow {
    ResultRow {
        scenario: scenario.to_string(),
        k,
        ms,
        precoder: case.precoder.to_string(),
        selector: case.scheme.map_or("none", Scheme::as_str).to_string(),
        mean_sinr_db: db(s.gamma),
        sum_se_bpcu: s.se,
        ee_bits_per_joule: s.ee,
        mean_active_antennas: s.active,
        mean_iterations: s.iterations,
        c_as_flops: s.c_as,
        relative_complexity: s.relative,
    }
}

fn operating_points(spec: &ExperimentSpec) -> Result<Vec<ResultRow>, RunError> {
    let cases = cases(spec);
    let name = spec.scenario.as_str();
    let mut rows = Vec::new();
    for point in user_points(spec)? {
        let outcomes = run_point(spec, &point, &cases)?;
        for (c, case) in cases.iter().enumerate() {
            let ms = if case.scheme.is_some() { point.ms } else { point.cfg.m };
            let mean = Sample::mean(outcomes.iter().map(|t| t[c].sample));
            rows.push(row(name, point.cfg.k, ms, *case, &mean));
            if spec.fading_draws > 0 {
                let mc = Sample::mean(outcomes.iter().map(|t| t[c].monte_carlo.unwrap_or_default()));
                rows.push(row(&format!("{name}_mc"), point.cfg.k, ms, *case, &mc));
            }
        }
    }
    Ok(rows)
}

/// One row per iteration: `mean_iterations` holds the 1-based iteration index
/// and `ee_bits_per_joule` the best-so-far search EE averaged over trials (a
/// trial that stopped early keeps its final value).
fn convergence(spec: &ExperimentSpec) -> Result<Vec<ResultRow>, RunError> {
    let cases: Vec<Case> = cases(spec).into_iter().filter(|c| c.scheme.is_some()).collect();
    let mut rows = Vec::new();
    for point in user_points(spec)? {
        let outcomes = run_point(spec, &point, &cases)?;
        for (c, case) in cases.iter().enumerate() {
            let final_mean = Sample::mean(outcomes.iter().map(|t| t[c].sample));
            let longest = outcomes.iter().map(|t| t[c].trace.len()).max().unwrap_or(0);
            for it in 1..=longest {
                let best = outcomes
                    .iter()
                    .map(|t| {
                        let trace = &t[c].trace;
                        trace[it.min(trace.len()) - 1]
                    })
                    .sum::<f64>()
                    / outcomes.len() as f64;
                let s = Sample {
                    ee: best,
                    iterations: it as f64,
                    ..final_mean
                };
                rows.push(row("convergence", point.cfg.k, point.ms, *case, &s));
            }
        }
    }
    Ok(rows)
}

/// HRNP sets of every grid size, evaluated incrementally along the HRNP order.
fn sweep_ms(spec: &ExperimentSpec) -> Result<Vec<ResultRow>, RunError> {
    let cfg = &spec.scenario_cfg;
    let precoders = spec.precoder.precoders();
    let mut sizes = spec.grid.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let c_hrnp = Complexity::Hrnp { m: cfg.m, k: cfg.k }.flops();

    let trial_run = |trial: usize| -> Result<Vec<Vec<Sample>>, Error> {
        let beta = draw_beta(spec.seed, trial, 0, cfg)?;
        let order = hrnp_order(&beta)?;
        let mut nested = NestedSinr::new(cfg.k);
        let mut out = Vec::with_capacity(sizes.len());
        for &ms in &sizes {
            while nested.len() < ms {
                nested.push(beta.row(order[nested.len()]));
            }
            let per_precoder = precoders
                .iter()
                .map(|&p| {
                    let report = nested.report(p, cfg.p_max, cfg.noise_power)?;
                    let rate = spec.power.bandwidth * report.sum_se;
                    let b = spec.power.breakdown(cfg.p_max, p, ms, cfg.k, rate, Some(c_hrnp))?;
                    Ok(Sample {
                        gamma: report.mean_gamma(),
                        se: report.sum_se,
                        ee: crate::power::energy_efficiency(report.sum_se, spec.power.bandwidth, &b)?,
                        active: ms as f64,
                        iterations: 0.0,
                        c_as: c_hrnp,
                        relative: 0.0,
                    })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            out.push(per_precoder);
        }
        Ok(out)
    };

    let results: Vec<Result<Vec<Vec<Sample>>, Error>> = (0..spec.trials).into_par_iter().map(trial_run).collect();
    let mut trials = Vec::with_capacity(results.len());
    for (trial, r) in results.into_iter().enumerate() {
        trials.push(r.map_err(|source| RunError::Trial { trial, k: cfg.k, source })?);
    }

    let mut rows = Vec::new();
    for &ms in &spec.grid {
        let i = sizes.binary_search(&ms).expect("grid sizes are sorted");
        for (p, &precoder) in precoders.iter().enumerate() {
            let mean = Sample::mean(trials.iter().map(|t| t[i][p]));
            let case = Case {
                precoder,
                scheme: Some(Scheme::Hrnp),
            };
            rows.push(row("sweep_ms", cfg.k, ms, case, &mean));
        }
    }
    Ok(rows)
}
