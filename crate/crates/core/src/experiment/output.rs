//! Result rows and their CSV/JSON serialization.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// CSV header, in column order.
pub const CSV_HEADER: &str = "scenario,k,ms,precoder,selector,mean_sinr_db,sum_se_bpcu,ee_bits_per_joule,\
mean_active_antennas,mean_iterations,c_as_flops,relative_complexity";

/// One averaged operating point. Metrics use base units: dB, bit/s/Hz, bit/J, flops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scenario: String,
    pub k: usize,
    pub ms: usize,
    pub precoder: String,
    pub selector: String,
    pub mean_sinr_db: f64,
    pub sum_se_bpcu: f64,
    pub ee_bits_per_joule: f64,
    pub mean_active_antennas: f64,
    pub mean_iterations: f64,
    pub c_as_flops: f64,
    /// `(C_as - C_hrnp) / C_hrnp`.
    pub relative_complexity: f64,
}

/// Output file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}` (expected csv or json)")),
        }
    }
}

/// Renders rows as CSV with [`CSV_HEADER`]; floats use the shortest exact decimal form.
pub fn to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.scenario,
            r.k,
            r.ms,
            r.precoder,
            r.selector,
            r.mean_sinr_db,
            r.sum_se_bpcu,
            r.ee_bits_per_joule,
            r.mean_active_antennas,
            r.mean_iterations,
            r.c_as_flops,
            r.relative_complexity
        );
    }
    out
}

pub fn to_json(rows: &[ResultRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows hold only finite numbers and strings")
}

/// Writes `rows` to `path`.
pub fn write_results(rows: &[ResultRow], path: &Path, format: Format) -> std::io::Result<()> {
    if rows.is_empty() {
        return Err(std::io::Error::new(std::io::ErrorKind::InvalidInput, "no result rows to write"));
    }
    let text = match format {
        Format::Csv => to_csv(rows),
        Format::Json => to_json(rows),
    };
    std::fs::write(path, text)
}

/// Reads rows back from a JSON result file.
pub fn read_json(path: &Path) -> std::io::Result<Vec<ResultRow>> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(std::io::Error::other)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> ResultRow {
        ResultRow {
            scenario: "single".into(),
            k: 100,
            ms: 146,
            precoder: "zf".into(),
            selector: "hrnp".into(),
            mean_sinr_db: 14.361_239_871_2,
            sum_se_bpcu: 482.5,
            ee_bits_per_joule: 34.85e6,
            mean_active_antennas: 146.0,
            mean_iterations: 0.0,
            c_as_flops: 153_107.5,
            relative_complexity: 0.0,
        }
    }

    #[test]
    fn csv_layout() {
        let csv = to_csv(&[row()]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1].split(',').count(), 12);
        assert!(lines[1].contains(",34850000,"));
        assert!(lines[1].contains(",14.3612398712,"));
    }

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.json");
        let mut other = row();
        other.mean_sinr_db = 0.1 + 0.2;
        let rows = vec![row(), other];
        write_results(&rows, &path, Format::Json).unwrap();
        assert_eq!(read_json(&path).unwrap(), rows);
    }

    #[test]
    fn refuses_empty_or_unwritable() {
        let dir = tempfile::tempdir().unwrap();
        assert!(write_results(&[], &dir.path().join("x.csv"), Format::Csv).is_err());
        let missing = dir.path().join("no/such/dir/x.csv");
        assert!(write_results(&[row()], &missing, Format::Csv).is_err());
    }
}
