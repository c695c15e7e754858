//! Command-line driver for the XL-MIMO energy-efficiency experiments.
//!
//! Exit codes: 0 on success, 1 for usage or configuration errors, 2 for
//! failures while running or writing results.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::{Map, Value};

use xlmimo_ee::experiment::output::{to_csv, to_json};
use xlmimo_ee::experiment::{load_config, run_experiment, write_results, Format};

#[derive(Debug, Parser)]
#[command(name = "xlmimo-ee", version, about = "Downlink XL-MIMO energy-efficiency experiments")]
struct Cli {
    /// Flat JSON configuration file (snake_case keys, SI units).
    #[arg(long)]
    config: Option<PathBuf>,

    /// sweep_k, sweep_ms, convergence, sweep_selectors, complexity or single.
    #[arg(long)]
    scenario: Option<String>,

    /// cb, zf or both.
    #[arg(long)]
    precoder: Option<String>,

    /// none, hrnp, ls, ga, pso or all.
    #[arg(long)]
    selector: Option<String>,

    /// Number of BS antennas.
    #[arg(long)]
    m: Option<u64>,

    /// Number of users.
    #[arg(long)]
    k: Option<u64>,

    /// Active antennas handed to the selectors, or `auto` for the analytic optimum.
    #[arg(long)]
    ms: Option<String>,

    #[arg(long)]
    trials: Option<u64>,

    #[arg(long)]
    seed: Option<u64>,

    /// Comma list of K (or Ms for sweep_ms) values; `lo..hi` and `lo..hi:step` ranges are inclusive.
    #[arg(long)]
    grid: Option<String>,

    /// Any other configuration key, as `key=value`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output file; results go to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
}

impl Cli {
    fn overrides(&self) -> Result<Map<String, Value>, String> {
        let mut map = Map::new();
        for entry in &self.set {
            let (key, value) = entry
                .split_once('=')
                .ok_or_else(|| format!("--set expects KEY=VALUE, got `{entry}`"))?;
            map.insert(key.trim().to_string(), Value::String(value.trim().to_string()));
        }
        let text = [
            ("scenario", &self.scenario),
            ("precoder", &self.precoder),
            ("selector", &self.selector),
            ("ms", &self.ms),
            ("grid", &self.grid),
        ];
        for (key, value) in text {
            if let Some(v) = value {
                map.insert(key.to_string(), Value::String(v.clone()));
            }
        }
        let ints = [("m", self.m), ("k", self.k), ("trials", self.trials), ("seed", self.seed)];
        for (key, value) in ints {
            if let Some(v) = value {
                map.insert(key.to_string(), Value::from(v));
            }
        }
        Ok(map)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let config_error = |msg: String| {
        eprintln!("error: {msg}");
        ExitCode::from(1)
    };
    let format: Format = match cli.format.parse() {
        Ok(f) => f,
        Err(e) => return config_error(e),
    };
    let overrides = match cli.overrides() {
        Ok(o) => o,
        Err(e) => return config_error(e),
    };
    let spec = match load_config(cli.config.as_deref(), &overrides) {
        Ok(spec) => spec,
        Err(e) => return config_error(e.to_string()),
    };

    let rows = match run_experiment(&spec) {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    let written = match &cli.out {
        Some(path) => write_results(&rows, path, format),
        None => {
            let text = match format {
                Format::Csv => to_csv(&rows),
                Format::Json => to_json(&rows) + "\n",
            };
            std::io::stdout().lock().write_all(text.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write results: {e}");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
