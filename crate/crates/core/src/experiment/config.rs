//! Experiment configuration: a flat JSON document of snake_case keys in SI units.
//!
//! Values are layered: built-in defaults, then the config file, then
//! command-line overrides. Every layer goes through the same key table, so a
//! flag and a file entry with the same name behave identically.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Value};
use thiserror::Error;

use crate::analytic::NewtonOptions;
use crate::geometry::{p_max_from_rho, ScenarioConfig};
use crate::power::PowerParams;
use crate::precoding::Precoder;
use crate::selection::{HeuristicParams, Scheme};

/// Configuration failures, each with its own diagnostic.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown key `{0}`")]
    UnknownKey(String),

    #[error("unit violation: {0}")]
    UnitViolation(String),
}

/// Which experiment to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// EE against the number of users.
    SweepK,
    /// EE against the number of HRNP-selected antennas.
    SweepMs,
    /// Best-so-far EE per heuristic iteration.
    Convergence,
    /// Selected antenna counts and EE of every selector against `K`.
    SweepSelectors,
    /// Selection cost relative to HRNP.
    Complexity,
    /// One operating point.
    Single,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::SweepK,
        Scenario::SweepMs,
        Scenario::Convergence,
        Scenario::SweepSelectors,
        Scenario::Complexity,
        Scenario::Single,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::SweepK => "sweep_k",
            Scenario::SweepMs => "sweep_ms",
            Scenario::Convergence => "convergence",
            Scenario::SweepSelectors => "sweep_selectors",
            Scenario::Complexity => "complexity",
            Scenario::Single => "single",
        }
    }

    /// Default trial count: cheap deterministic sweeps get many drops, heuristic runs few.
    pub fn default_trials(self) -> usize {
        match self {
            Scenario::SweepK | Scenario::SweepMs | Scenario::Single => 1000,
            Scenario::Convergence | Scenario::SweepSelectors | Scenario::Complexity => 20,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Scenario::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown scenario `{s}`"))
    }
}

/// Precoder(s) to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecoderChoice {
    Cb,
    Zf,
    Both,
}

impl PrecoderChoice {
    pub fn precoders(self) -> Vec<Precoder> {
        match self {
            PrecoderChoice::Cb => vec![Precoder::Cb],
            PrecoderChoice::Zf => vec![Precoder::Zf],
            PrecoderChoice::Both => vec![Precoder::Cb, Precoder::Zf],
        }
    }
}

impl FromStr for PrecoderChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cb" => Ok(PrecoderChoice::Cb),
            "zf" => Ok(PrecoderChoice::Zf),
            "both" => Ok(PrecoderChoice::Both),
            _ => Err(format!("unknown precoder `{s}` (expected cb, zf or both)")),
        }
    }
}

/// Selector(s) to run; `None` keeps the whole array active.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectorChoice {
    None,
    One(Scheme),
    All,
}

impl SelectorChoice {
    /// Schemes to run; an empty list means the full array.
    pub fn schemes(self) -> Vec<Scheme> {
        match self {
            SelectorChoice::None => Vec::new(),
            SelectorChoice::One(s) => vec![s],
            SelectorChoice::All => Scheme::ALL.to_vec(),
        }
    }
}

impl FromStr for SelectorChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(SelectorChoice::None),
            "all" => Ok(SelectorChoice::All),
            other => other
                .parse::<Scheme>()
                .map(SelectorChoice::One)
                .map_err(|_| format!("unknown selector `{s}` (expected none, hrnp, ls, ga, pso or all)")),
        }
    }
}

/// Number of antennas handed to the selectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsChoice {
    /// Newton-Raphson optimum of the analytic EE for each `K`.
    Auto,
    Fixed(usize),
}

impl FromStr for MsChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(MsChoice::Auto);
        }
        s.parse()
            .map(MsChoice::Fixed)
            .map_err(|_| format!("ms must be `auto` or a positive integer, got `{s}`"))
    }
}

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    pub precoder: PrecoderChoice,
    pub selector: SelectorChoice,
    pub trials: usize,
    pub seed: u64,
    /// `K` values (sweep_k, sweep_selectors, complexity) or `Ms` values (sweep_ms).
    pub grid: Vec<usize>,
    pub ms: MsChoice,
    /// Small-scale fading draws per trial for the Monte-Carlo check; 0 disables it.
    pub fading_draws: usize,
    pub scenario_cfg: ScenarioConfig,
    pub power: PowerParams,
    pub heuristics: HeuristicParams,
    pub newton: NewtonOptions,
}

impl ExperimentSpec {
    /// Defaults for `scenario` with the reference deployment.
    pub fn new(scenario: Scenario) -> Self {
        let cfg = ScenarioConfig::default();
        let mut spec = Self {
            scenario,
            precoder: PrecoderChoice::Zf,
            selector: SelectorChoice::None,
            trials: scenario.default_trials(),
            seed: 0,
            grid: Vec::new(),
            ms: MsChoice::Auto,
            fading_draws: 0,
            scenario_cfg: cfg,
            power: PowerParams::default(),
            heuristics: HeuristicParams::default(),
            newton: NewtonOptions::default(),
        };
        spec.apply_scenario_defaults(None, None, None);
        spec
    }

    fn apply_scenario_defaults(
        &mut self,
        precoder: Option<PrecoderChoice>,
        selector: Option<SelectorChoice>,
        grid: Option<Vec<usize>>,
    ) {
        let s = self.scenario;
        self.precoder = precoder.unwrap_or(match s {
            Scenario::SweepK => PrecoderChoice::Both,
            _ => PrecoderChoice::Zf,
        });
        self.selector = selector.unwrap_or(match s {
            Scenario::SweepK => SelectorChoice::None,
            Scenario::SweepMs | Scenario::Single => SelectorChoice::One(Scheme::Hrnp),
            Scenario::Convergence | Scenario::SweepSelectors | Scenario::Complexity => SelectorChoice::All,
        });
        self.grid = grid.unwrap_or_else(|| match s {
            Scenario::SweepK => vec![8, 16, 32, 64, 128, 256],
            Scenario::SweepMs => (self.scenario_cfg.k..=self.scenario_cfg.m).collect(),
            Scenario::SweepSelectors => vec![50, 100, 150],
            Scenario::Convergence | Scenario::Complexity | Scenario::Single => vec![self.scenario_cfg.k],
        });
    }

    /// Checks cross-field consistency.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let unit = |e: crate::Error| ConfigError::UnitViolation(e.to_string());
        self.scenario_cfg.validate().map_err(unit)?;
        self.power.validate().map_err(unit)?;
        self.heuristics.validate().map_err(unit)?;
        if self.trials == 0 {
            return Err(ConfigError::UnitViolation("trials must be at least 1".into()));
        }
        if self.grid.is_empty() {
            return Err(ConfigError::UnitViolation("grid must not be empty".into()));
        }
        let m = self.scenario_cfg.m;
        if self.grid.contains(&0) {
            return Err(ConfigError::UnitViolation("grid values must be at least 1".into()));
        }
        if self.scenario == Scenario::SweepMs {
            if let Some(&ms) = self.grid.iter().find(|&&ms| ms > m) {
                return Err(ConfigError::UnitViolation(format!("grid Ms = {ms} exceeds M = {m}")));
            }
            let k = self.scenario_cfg.k;
            if self.precoder != PrecoderChoice::Cb {
                if let Some(&ms) = self.grid.iter().find(|&&ms| ms < k) {
                    return Err(ConfigError::UnitViolation(format!(
                        "grid Ms = {ms} is below K = {k}; zero-forcing needs Ms >= K"
                    )));
                }
            }
        }
        if let MsChoice::Fixed(ms) = self.ms {
            if ms == 0 || ms > m {
                return Err(ConfigError::UnitViolation(format!("ms = {ms} outside [1, {m}]")));
            }
        }
        if !(self.newton.tol > 0.0) || self.newton.max_iter == 0 {
            return Err(ConfigError::UnitViolation(
                "newton_tol must be positive and newton_max_iter at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Reads `path` (if any) and applies `overrides` on top.
///
/// An empty file, or no file, yields the reference defaults.
pub fn load_config(path: Option<&Path>, overrides: &Map<String, Value>) -> Result<ExperimentSpec, ConfigError> {
    let file = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Io {
                path: p.display().to_string(),
                source,
            })?;
            parse_document(&text)?
        }
        None => Map::new(),
    };
    resolve(&[file, overrides.clone()])
}

/// Parses one JSON document into a key map; blank input is an empty map.
pub fn parse_document(text: &str) -> Result<Map<String, Value>, ConfigError> {
    if text.trim().is_empty() {
        return Ok(Map::new());
    }
    match serde_json::from_str::<Value>(text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(ConfigError::Parse("top level must be a JSON object".into())),
        Err(e) => Err(ConfigError::Parse(e.to_string())),
    }
}

/// Builds a spec from layers applied in order; later layers win.
pub fn resolve(layers: &[Map<String, Value>]) -> Result<ExperimentSpec, ConfigError> {
    let mut spec = ExperimentSpec::new(Scenario::Single);
    let mut scenario = None;
    let mut precoder = None;
    let mut selector = None;
    let mut grid = None;
    let mut trials = None;
    let mut power = PowerSource::Rho(10.0);

    for layer in layers {
        if layer.contains_key("p_max") && layer.contains_key("rho") {
            return Err(ConfigError::UnitViolation(
                "set either p_max or rho, not both".into(),
            ));
        }
        for (key, value) in layer {
            let v = Field { key, value };
            let cfg = &mut spec.scenario_cfg;
            let pp = &mut spec.power;
            let hp = &mut spec.heuristics;
            match key.as_str() {
                "scenario" => scenario = Some(v.parsed::<Scenario>()?),
                "precoder" => precoder = Some(v.parsed::<PrecoderChoice>()?),
                "selector" => selector = Some(v.parsed::<SelectorChoice>()?),
                "trials" => trials = Some(v.count()?),
                "seed" => spec.seed = v.seed()?,
                "grid" => grid = Some(v.grid()?),
                "ms" => spec.ms = v.ms()?,
                "fading_draws" => spec.fading_draws = v.count()?,

                "m" => cfg.m = v.count()?,
                "l" => cfg.l = v.positive()?,
                "k" => cfg.k = v.count()?,
                "kappa" => cfg.kappa = v.non_negative()?,
                "q" => cfg.q = v.positive()?,
                "noise_power" => cfg.noise_power = v.positive()?,
                "p_max" => power = PowerSource::PMax(v.non_negative()?),
                "rho" => power = PowerSource::Rho(v.non_negative()?),
                "y_min_frac" => cfg.y_min_frac = v.non_negative()?,
                "y_max_frac" => cfg.y_max_frac = v.positive()?,

                "bandwidth" => pp.bandwidth = v.positive()?,
                "coherence_block" => pp.coherence_block = v.positive()?,
                "tau" => pp.tau = Some(v.non_negative()?),
                "t_lt" => pp.t_lt = v.positive_or_infinite()?,
                "l_bs" => pp.l_bs = v.positive()?,
                "eta_dl" => pp.eta_dl = v.fraction()?,
                "eta_ul_mt" => pp.eta_ul_mt = v.fraction()?,
                "xi_dl" => pp.xi_dl = v.unit_interval()?,
                "xi_ul" => pp.xi_ul = v.unit_interval()?,
                "rho_p" => pp.rho_p = v.non_negative()?,
                "p_fix" => pp.p_fix = v.non_negative()?,
                "p_syn" => pp.p_syn = v.non_negative()?,
                "p_bs" => pp.p_bs = v.non_negative()?,
                "p_mt" => pp.p_mt = v.non_negative()?,
                "p_cod" => pp.p_cod = v.non_negative()?,
                "p_dec" => pp.p_dec = v.non_negative()?,
                "p_bt" => pp.p_bt = v.non_negative()?,

                "n_it_max" => hp.n_it_max = v.count()?,
                "early_stop_window" => hp.early_stop_window = v.count()?,
                "d_ham" => hp.d_ham = v.count()?,
                "p_ga" => hp.p_ga = Some(v.count()?),
                "parent_frac" => hp.parent_frac = v.fraction()?,
                "p_mut" => hp.p_mut = v.unit_interval()?,
                "p_pso" => hp.p_pso = Some(v.count()?),
                "nu" => hp.nu = v.number()?,
                "mu_c" => hp.mu_c = v.number()?,
                "mu_s" => hp.mu_s = v.number()?,

                "newton_start" => spec.newton.start = Some(v.positive()?),
                "newton_tol" => spec.newton.tol = v.positive()?,
                "newton_max_iter" => spec.newton.max_iter = v.count()?,
                "validity_threshold" => spec.newton.threshold = v.non_negative()?,

                _ => return Err(ConfigError::UnknownKey(key.clone())),
            }
        }
    }

    let cfg = &mut spec.scenario_cfg;
    match power {
        PowerSource::PMax(p) => {
            cfg.p_max = p;
            cfg.rho = None;
        }
        PowerSource::Rho(rho) => {
            cfg.rho = Some(rho);
            cfg.p_max = p_max_from_rho(cfg).map_err(|e| ConfigError::UnitViolation(e.to_string()))?;
        }
    }
    spec.scenario = scenario.unwrap_or(Scenario::Single);
    spec.trials = trials.unwrap_or(spec.scenario.default_trials());
    spec.apply_scenario_defaults(precoder, selector, grid);
    spec.validate()?;
    Ok(spec)
}

enum PowerSource {
    PMax(f64),
    Rho(f64),
}

struct Field<'a> {
    key: &'a str,
    value: &'a Value,
}

impl Field<'_> {
    fn parse_err(&self, expected: &str) -> ConfigError {
        ConfigError::Parse(format!("`{}` must be {expected}, got {}", self.key, self.value))
    }

    fn unit_err(&self, expected: &str) -> ConfigError {
        ConfigError::UnitViolation(format!("`{}` must be {expected}, got {}", self.key, self.value))
    }

    fn text(&self) -> Option<String> {
        match self.value {
            Value::String(s) => Some(s.clone()),
            Value::Number(n) => Some(n.to_string()),
            _ => None,
        }
    }

    fn parsed<T: FromStr<Err = String>>(&self) -> Result<T, ConfigError> {
        match self.value {
            Value::String(s) => s.parse().map_err(ConfigError::Parse),
            _ => Err(self.parse_err("a string")),
        }
    }

    fn number(&self) -> Result<f64, ConfigError> {
        let x = match self.value {
            Value::Number(n) => n.as_f64(),
            Value::String(s) => s.trim().parse().ok(),
            _ => None,
        }
        .ok_or_else(|| self.parse_err("a number"))?;
        if x.is_nan() {
            return Err(self.parse_err("a number"));
        }
        Ok(x)
    }

    fn positive(&self) -> Result<f64, ConfigError> {
        let x = self.number()?;
        if x > 0.0 && x.is_finite() {
            Ok(x)
        } else {
            Err(self.unit_err("positive and finite"))
        }
    }

    fn positive_or_infinite(&self) -> Result<f64, ConfigError> {
        let x = self.number()?;
        if x > 0.0 {
            Ok(x)
        } else {
            Err(self.unit_err("positive"))
        }
    }

    fn non_negative(&self) -> Result<f64, ConfigError> {
        let x = self.number()?;
        if x >= 0.0 && x.is_finite() {
            Ok(x)
        } else {
            Err(self.unit_err("non-negative and finite"))
        }
    }

    fn fraction(&self) -> Result<f64, ConfigError> {
        let x = self.number()?;
        if x > 0.0 && x <= 1.0 {
            Ok(x)
        } else {
            Err(self.unit_err("in (0, 1]"))
        }
    }

    fn unit_interval(&self) -> Result<f64, ConfigError> {
        let x = self.number()?;
        if (0.0..=1.0).contains(&x) {
            Ok(x)
        } else {
            Err(self.unit_err("in [0, 1]"))
        }
    }

    fn count(&self) -> Result<usize, ConfigError> {
        match self.value {
            Value::Number(n) => n
                .as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| self.unit_err("a non-negative integer")),
            Value::String(s) => s.trim().parse().map_err(|_| self.parse_err("a non-negative integer")),
            _ => Err(self.parse_err("a non-negative integer")),
        }
    }

    fn seed(&self) -> Result<u64, ConfigError> {
        let text = self.text().ok_or_else(|| self.parse_err("an unsigned 64-bit integer"))?;
        text.trim().parse().map_err(|_| self.parse_err("an unsigned 64-bit integer"))
    }

    fn ms(&self) -> Result<MsChoice, ConfigError> {
        let text = self.text().ok_or_else(|| self.parse_err("`auto` or an integer"))?;
        text.parse().map_err(ConfigError::Parse)
    }

    fn grid(&self) -> Result<Vec<usize>, ConfigError> {
        match self.value {
            Value::Array(items) => items
                .iter()
                .map(|item| {
                    item.as_u64()
                        .map(|x| x as usize)
                        .ok_or_else(|| self.parse_err("a list of non-negative integers"))
                })
                .collect(),
            Value::String(s) => parse_grid(s).map_err(ConfigError::Parse),
            _ => Err(self.parse_err("a list of integers")),
        }
    }
}

/// Parses `"8,16,32"`, `"100..500"` or `"100..500:10"` (inclusive ranges, optional step), mixed freely.
pub fn parse_grid(text: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let int = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad grid entry `{part}`"))
        };
        match part.split_once("..") {
            Some((lo, rest)) => {
                let (hi, step) = match rest.split_once(':') {
                    Some((hi, step)) => (int(hi)?, int(step)?),
                    None => (int(rest)?, 1),
                };
                let lo = int(lo)?;
                if step == 0 || lo > hi {
                    return Err(format!("empty grid range `{part}`"));
                }
                out.extend((lo..=hi).step_by(step));
            }
            None => out.push(int(part)?),
        }
    }
    if out.is_empty() {
        return Err("grid is empty".into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn map(v: Value) -> Map<String, Value> {
        v.as_object().unwrap().clone()
    }

    #[test]
    fn empty_layers_give_reference_defaults() {
        let spec = resolve(&[]).unwrap();
        assert_eq!(spec.power, PowerParams::default());
        assert_eq!(spec.scenario_cfg, ScenarioConfig::default());
        assert_eq!(spec.scenario, Scenario::Single);
        assert_eq!(spec.trials, 1000);
        assert_eq!(spec.grid, vec![100]);
        assert_eq!(parse_document("  \n").unwrap(), Map::new());
    }

    #[test]
    fn later_layers_win() {
        let spec = resolve(&[map(json!({"m": 512})), map(json!({"m": 500}))]).unwrap();
        assert_eq!(spec.scenario_cfg.m, 500);
    }

    #[test]
    fn distinct_diagnostics() {
        assert!(matches!(
            resolve(&[map(json!({"tau": 300}))]),
            Err(ConfigError::UnitViolation(_))
        ));
        assert!(matches!(
            resolve(&[map(json!({"antennas": 4}))]),
            Err(ConfigError::UnknownKey(k)) if k == "antennas"
        ));
        assert!(matches!(
            resolve(&[map(json!({"m": "many"}))]),
            Err(ConfigError::Parse(_))
        ));
        assert!(matches!(parse_document("{\"m\": "), Err(ConfigError::Parse(_))));
        assert!(matches!(
            resolve(&[map(json!({"p_max": 1.0, "rho": 10.0}))]),
            Err(ConfigError::UnitViolation(_))
        ));
        assert!(matches!(
            resolve(&[map(json!({"eta_dl": 1.5}))]),
            Err(ConfigError::UnitViolation(_))
        ));
    }

    #[test]
    fn power_source_follows_the_last_layer() {
        let spec = resolve(&[map(json!({"p_max": 1.0}))]).unwrap();
        assert_eq!(spec.scenario_cfg.p_max, 1.0);
        assert_eq!(spec.scenario_cfg.rho, None);
        let spec = resolve(&[map(json!({"p_max": 1.0})), map(json!({"rho": 20.0}))]).unwrap();
        assert!((spec.scenario_cfg.p_max / ScenarioConfig::default().p_max - 2.0).abs() < 1e-12);
        // rho is rescaled to the final geometry
        let spec = resolve(&[map(json!({"l": 60.0}))]).unwrap();
        assert!((spec.scenario_cfg.p_max / ScenarioConfig::default().p_max - 8.0).abs() < 1e-12);
    }

    #[test]
    fn scenario_defaults() {
        let spec = resolve(&[map(json!({"scenario": "sweep_k"}))]).unwrap();
        assert_eq!(spec.grid, vec![8, 16, 32, 64, 128, 256]);
        assert_eq!(spec.precoder, PrecoderChoice::Both);
        assert_eq!(spec.selector, SelectorChoice::None);
        let spec = resolve(&[map(json!({"scenario": "sweep_ms", "m": 120}))]).unwrap();
        assert_eq!(spec.grid, (100..=120).collect::<Vec<_>>());
        let spec = resolve(&[map(json!({"scenario": "convergence"}))]).unwrap();
        assert_eq!(spec.trials, 20);
        assert_eq!(spec.selector, SelectorChoice::All);
    }

    #[test]
    fn sweep_ms_grid_must_fit() {
        assert!(matches!(
            resolve(&[map(json!({"scenario": "sweep_ms", "grid": [50, 120]}))]),
            Err(ConfigError::UnitViolation(_))
        ));
        assert!(matches!(
            resolve(&[map(json!({"scenario": "sweep_ms", "grid": "100..600"}))]),
            Err(ConfigError::UnitViolation(_))
        ));
    }

    #[test]
    fn string_values_from_flags() {
        let spec = resolve(&[map(json!({
            "m": "64", "k": "8", "seed": "18446744073709551615", "ms": "auto",
            "grid": "8,16..24:8", "t_lt": "inf"
        }))])
        .unwrap();
        assert_eq!(spec.scenario_cfg.m, 64);
        assert_eq!(spec.seed, u64::MAX);
        assert_eq!(spec.ms, MsChoice::Auto);
        assert_eq!(spec.grid, vec![8, 16, 24]);
        assert!(spec.power.t_lt.is_infinite());
    }

    #[test]
    fn grid_syntax() {
        assert_eq!(parse_grid("1, 3..5").unwrap(), vec![1, 3, 4, 5]);
        assert_eq!(parse_grid("100..500:200").unwrap(), vec![100, 300, 500]);
        assert!(parse_grid("5..3").is_err());
        assert!(parse_grid("a").is_err());
        assert!(parse_grid("").is_err());
    }

    #[test]
    fn choices_parse() {
        assert_eq!("pso".parse::<SelectorChoice>().unwrap(), SelectorChoice::One(Scheme::Swarm));
        assert_eq!("all".parse::<SelectorChoice>().unwrap().schemes().len(), 4);
        assert!(SelectorChoice::None.schemes().is_empty());
        assert_eq!("both".parse::<PrecoderChoice>().unwrap().precoders().len(), 2);
        assert_eq!("17".parse::<MsChoice>().unwrap(), MsChoice::Fixed(17));
        assert!("x".parse::<MsChoice>().is_err());
        for s in Scenario::ALL {
            assert_eq!(s.as_str().parse::<Scenario>().unwrap(), s);
        }
    }
}
