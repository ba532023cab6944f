//! CSV, JSON and complexity-table output.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{sweep, RunResult, SimSpec};
use crate::channel::sig6;
use crate::detectors::{OpAverages, OpCounts};
use crate::error::{Error, Result};

/// First line of every BER CSV file.
pub const CSV_VERSION: &str = "# eqlab-ber-csv v1";

/// `format_version` of the JSON report.
pub const JSON_VERSION: u32 = 1;

const CSV_HEADER: &str = "channel,detector,snr_db,bits,bit_errors,ber,stderr,seed";

/// The version line, the configuration as `# key=value` comments, the
/// header and one row per grid point. Contains nothing run-dependent beyond
/// the configuration, so reruns are byte-identical.
pub fn write_csv(result: &RunResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{CSV_VERSION}");
    for (k, v) in &result.config {
        let _ = writeln!(out, "# {k}={v}");
    }
    let _ = writeln!(out, "{CSV_HEADER}");
    for p in &result.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            result.channel,
            result.detector,
            sig6(p.snr_db),
            p.bits,
            p.bit_errors,
            sig6(p.ber),
            sig6(p.stderr()),
            p.seed
        );
    }
    out
}

#[derive(Serialize)]
struct JsonPoint<'a> {
    #[serde(flatten)]
    point: &'a super::BerPoint,
    stderr: f64,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    format_version: u32,
    channel: &'a str,
    detector: &'a str,
    config: &'a [(String, String)],
    points: Vec<JsonPoint<'a>>,
    wall_clock_s: f64,
}

/// Structured report; identical to the CSV content plus symbol errors,
/// operation tallies and wall-clock time.
pub fn write_json(result: &RunResult) -> Result<String> {
    let report = JsonReport {
        format_version: result.format_version,
        channel: &result.channel,
        detector: &result.detector,
        config: &result.config,
        points: result.points.iter().map(|p| JsonPoint { point: p, stderr: p.stderr() }).collect(),
        wall_clock_s: result.wall_clock_s,
    };
    serde_json::to_string_pretty(&report).map_err(|e| Error::Config(format!("cannot serialize report: {e}")))
}

/// One line of a complexity table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpsRow {
    pub channel: String,
    pub detector: String,
    pub counts: OpCounts,
    pub per_symbol: OpAverages,
}

/// Average per-symbol operations of each spec over its whole grid.
pub fn ops_report(specs: &[SimSpec]) -> Result<Vec<OpsRow>> {
    specs
        .iter()
        .map(|spec| {
            let run = sweep(spec)?;
            let mut counts = OpCounts::default();
            for p in &run.points {
                counts.merge(&p.ops);
            }
            Ok(OpsRow {
                channel: run.channel,
                detector: run.detector,
                counts,
                per_symbol: counts.per_symbol(),
            })
        })
        .collect()
}

impl OpsRow {
    pub const CSV_HEADER: &'static str = "channel,detector,cost_evals,mults,adds,arithmetic,comparisons,total";

    pub fn csv_line(&self) -> String {
        let a = &self.per_symbol;
        format!(
            "{},{},{},{},{},{},{},{}",
            self.channel,
            self.detector,
            sig6(a.cost_evals),
            sig6(a.mults),
            sig6(a.adds),
            sig6(a.arithmetic),
            sig6(a.search),
            sig6(a.total)
        )
    }

    /// Fixed-width table with cost evaluations, arithmetic (mults + adds),
    /// search comparisons and totals per symbol.
    pub fn table(rows: &[OpsRow]) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<8} {:<10} {:>10} {:>12} {:>12} {:>12}",
            "channel", "detector", "cost evals", "mult+add", "comparisons", "total"
        );
        for r in rows {
            let a = &r.per_symbol;
            let _ = writeln!(
                out,
                "{:<8} {:<10} {:>10} {:>12} {:>12} {:>12}",
                r.channel,
                r.detector,
                sig6(a.cost_evals),
                sig6(a.arithmetic),
                sig6(a.search),
                sig6(a.total)
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::BerPoint;

    fn result() -> RunResult {
        RunResult {
            format_version: JSON_VERSION,
            channel: "tc1".into(),
            detector: "dfe".into(),
            config: vec![("channel".into(), "tc1".into()), ("seed".into(), "7".into())],
            points: vec![BerPoint::from_counts(10.0, 4000, 40), BerPoint::from_counts(12.5, 4000, 3)],
            wall_clock_s: 0.25,
        }
    }

    #[test]
    fn csv_layout() {
        let csv = write_csv(&result());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_VERSION);
        assert_eq!(lines[1], "# channel=tc1");
        assert_eq!(lines[2], "# seed=7");
        assert_eq!(lines[3], CSV_HEADER);
        assert_eq!(lines[4], "tc1,dfe,10,4000,40,0.01,0.00157321,0");
        assert_eq!(lines[5].split(',').nth(2), Some("12.5"));
        assert_eq!(lines.len(), 6);
    }

    #[test]
    fn json_round_trips_points() {
        let json = write_json(&result()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["format_version"], 1);
        assert_eq!(v["points"][0]["bit_errors"], 40);
        assert_eq!(v["points"].as_array().unwrap().len(), 2);
        assert!(v["points"][0]["stderr"].as_f64().unwrap() > 0.0);
    }
}
