//! Antenna selection maximizing total energy efficiency.
//!
//! [`hrnp`] ranks antennas by their share of every user's received power and
//! keeps the best `Ms`. The three search heuristics ([`local_search`],
//! [`genetic`], [`swarm`]) start from the HRNP set and optimize the
//! [`EeObjective`] over binary masks.
//!
//! While searching, every candidate is priced with the HRNP selection cost so
//! that ranking is unaffected by how long the search runs; once a scheme
//! stops, its realized flop count is charged to the returned set (`ee`),
//! next to the search-time value (`raw_ee`).

pub mod genetic;
pub mod hrnp;
pub mod local_search;
pub mod swarm;

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::Result;
use crate::geometry::{LongTermFadingMatrix, ScenarioConfig};
use crate::power::{energy_efficiency, Complexity, PowerParams};
use crate::precoding::{det_sinr_over, ActiveSet, Precoder, SinrReport};

pub use genetic::{ga_from_population, ga_select, ga_select_with};
pub use hrnp::{hrnp_metric, hrnp_order, hrnp_select};
pub use local_search::ls_select;
pub use swarm::{pso_from_state, pso_select, pso_select_with};

/// Tuning of the search heuristics.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicParams {
    pub n_it_max: usize,
    /// Stop GA/PSO after this many iterations without a new best; 0 disables early stopping.
    pub early_stop_window: usize,
    /// Local-search neighborhood radius (all masks within this Hamming distance).
    pub d_ham: usize,
    /// GA population; `None` means `M / 2`.
    pub p_ga: Option<usize>,
    pub parent_frac: f64,
    pub p_mut: f64,
    /// PSO swarm size; `None` means `M / 5`.
    pub p_pso: Option<usize>,
    pub nu: f64,
    pub mu_c: f64,
    pub mu_s: f64,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        Self {
            n_it_max: 60,
            early_stop_window: 5,
            d_ham: 1,
            p_ga: None,
            parent_frac: 0.10,
            p_mut: 0.02,
            p_pso: None,
            nu: 0.5,
            mu_c: 0.5,
            mu_s: 0.5,
        }
    }
}

impl HeuristicParams {
    pub fn validate(&self) -> Result<()> {
        use crate::error::Error::InvalidParameter as bad;
        if self.n_it_max == 0 {
            return Err(bad("n_it_max must be at least 1".into()));
        }
        if !(self.parent_frac > 0.0 && self.parent_frac <= 1.0) {
            return Err(bad(format!("parent_frac must be in (0, 1], got {}", self.parent_frac)));
        }
        if !(0.0..=1.0).contains(&self.p_mut) {
            return Err(bad(format!("p_mut must be in [0, 1], got {}", self.p_mut)));
        }
        if self.p_ga.is_some_and(|p| p < 2) {
            return Err(bad("p_ga must be at least 2".into()));
        }
        if self.p_pso == Some(0) {
            return Err(bad("p_pso must be at least 1".into()));
        }
        for (name, v) in [("nu", self.nu), ("mu_c", self.mu_c), ("mu_s", self.mu_s)] {
            if !v.is_finite() {
                return Err(bad(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    pub fn population(&self, m: usize) -> usize {
        self.p_ga.unwrap_or(m / 2).max(2)
    }

    pub fn swarm_size(&self, m: usize) -> usize {
        self.p_pso.unwrap_or(m / 5).max(1)
    }

    pub(crate) fn should_stop(&self, iterations: usize, stall: usize) -> bool {
        iterations >= self.n_it_max || (self.early_stop_window > 0 && stall >= self.early_stop_window)
    }
}

/// Antenna-selection scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Hrnp,
    LocalSearch,
    Genetic,
    Swarm,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Hrnp, Scheme::LocalSearch, Scheme::Genetic, Scheme::Swarm];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Hrnp => "hrnp",
            Scheme::LocalSearch => "ls",
            Scheme::Genetic => "ga",
            Scheme::Swarm => "pso",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown selector `{s}` (expected hrnp, ls, ga or pso)"))
    }
}

/// Outcome of one selection run.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub active: ActiveSet,
    /// EE with the scheme's realized selection cost (bits/J).
    pub ee: f64,
    /// EE under the search-time cost convention (bits/J).
    pub raw_ee: f64,
    pub iterations: usize,
    /// Realized selection flops.
    pub flops_spent: f64,
    /// Best raw EE after each iteration.
    pub trace: Vec<f64>,
}

/// SINR, power and EE of one active set.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub report: SinrReport,
    pub total_power: f64,
    pub ee: f64,
}

/// Total energy efficiency of a candidate mask for one user drop.
#[derive(Debug, Clone)]
pub struct EeObjective<'a> {
    beta: &'a LongTermFadingMatrix,
    power: &'a PowerParams,
    precoder: Precoder,
    p_max: f64,
    sigma2: f64,
    search_flops: f64,
}

impl<'a> EeObjective<'a> {
    pub fn new(
        beta: &'a LongTermFadingMatrix,
        cfg: &ScenarioConfig,
        power: &'a PowerParams,
        precoder: Precoder,
    ) -> Self {
        let search_flops = Complexity::Hrnp {
            m: beta.antennas(),
            k: beta.users(),
        }
        .flops();
        Self {
            beta,
            power,
            precoder,
            p_max: cfg.p_max,
            sigma2: cfg.noise_power,
            search_flops,
        }
    }

    pub fn beta(&self) -> &LongTermFadingMatrix {
        self.beta
    }

    pub fn antennas(&self) -> usize {
        self.beta.antennas()
    }

    pub fn users(&self) -> usize {
        self.beta.users()
    }

    pub fn precoder(&self) -> Precoder {
        self.precoder
    }

    /// HRNP cost, charged to every candidate during a search.
    pub fn search_flops(&self) -> f64 {
        self.search_flops
    }

    /// Search-time EE of a mask. Empty masks, and masks with fewer than K
    /// antennas under ZF, score 0.
    pub fn evaluate(&self, mask: &[bool]) -> f64 {
        self.evaluate_with_flops(mask, self.search_flops)
    }

    pub fn evaluate_with_flops(&self, mask: &[bool], selection_flops: f64) -> f64 {
        let indices: Vec<usize> = mask
            .iter()
            .enumerate()
            .filter_map(|(i, &on)| on.then_some(i))
            .collect();
        if !self.feasible(indices.len()) {
            return 0.0;
        }
        self.evaluate_indices(&indices, Some(selection_flops))
            .map_or(0.0, |e| e.ee)
    }

    /// Full evaluation of an active set; `selection_flops = None` means no selector ran.
    pub fn evaluate_set(&self, set: &ActiveSet, selection_flops: Option<f64>) -> Result<Evaluation> {
        self.evaluate_indices(set.indices(), selection_flops)
    }

    fn feasible(&self, count: usize) -> bool {
        count > 0 && (self.precoder == Precoder::Cb || count >= self.users())
    }

    fn evaluate_indices(&self, indices: &[usize], selection_flops: Option<f64>) -> Result<Evaluation> {
        let report = det_sinr_over(self.precoder, self.beta, indices, self.p_max, self.sigma2);
        let rate = self.power.bandwidth * report.sum_se;
        let breakdown = self.power.breakdown(
            self.p_max,
            self.precoder,
            indices.len(),
            self.users(),
            rate,
            selection_flops,
        )?;
        let ee = energy_efficiency(report.sum_se, self.power.bandwidth, &breakdown)?;
        Ok(Evaluation {
            report,
            total_power: breakdown.total,
            ee,
        })
    }

    /// Packages a search outcome, charging `flops_spent` for the final EE.
    pub(crate) fn finish(
        &self,
        best: &[bool],
        raw_ee: f64,
        iterations: usize,
        flops_spent: f64,
        trace: Vec<f64>,
    ) -> Result<SelectionResult> {
        let active = ActiveSet::from_mask(best)?;
        let ee = self.evaluate_with_flops(best, flops_spent);
        Ok(SelectionResult {
            active,
            ee,
            raw_ee,
            iterations,
            flops_spent,
            trace,
        })
    }
}

/// Runs `scheme` starting from the HRNP set of size `ms`.
pub fn select<R: Rng + ?Sized>(
    scheme: Scheme,
    objective: &EeObjective<'_>,
    ms: usize,
    params: &HeuristicParams,
    rng: &mut R,
) -> Result<SelectionResult> {
    let init = hrnp_select(objective.beta(), ms)?;
    match scheme {
        Scheme::Hrnp => {
            let mask = init.mask();
            let raw = objective.evaluate(&mask);
            objective.finish(&mask, raw, 0, objective.search_flops(), vec![raw])
        }
        Scheme::LocalSearch => ls_select(&init, params, objective),
        Scheme::Genetic => ga_select_with(&init, params, objective, rng),
        Scheme::Swarm => pso_select_with(&init, params, objective, rng),
    }
}

pub(crate) fn random_mask<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<bool> {
    (0..m).map(|_| rng.random_bool(0.5)).collect()
}
