use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::process::Command;

use serde::Serialize;

use crate::dem::HistogramRow;

use super::{ExperimentError, ExperimentResult, TimingTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    /// `.json` gives JSON, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => ReportFormat::Json,
            _ => ReportFormat::Csv,
        }
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    family: &'a str,
    lattice: &'a str,
    ell: usize,
    n: usize,
    periods: usize,
    noise: &'a str,
    basis: String,
    decoder: &'a str,
    p: f64,
    shots: usize,
    failures: usize,
    p_l: f64,
    std_err: f64,
    ci_low: f64,
    ci_high: f64,
    decode_errors: usize,
    /// Per-observable failure counts joined with `;`.
    observable_failures: String,
}

/// One row per (size, p, decoder). Timing is left out so that equal seeds
/// give byte-identical files.
pub fn write_csv<W: Write>(results: &[ExperimentResult], out: W) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    for r in results {
        let c = &r.config;
        for pt in &r.points {
            w.serialize(CsvRow {
                family: c.family.name(),
                lattice: &c.lattice,
                ell: c.ell,
                n: r.num_qubits,
                periods: c.periods,
                noise: c.noise.name(),
                basis: c.basis.to_string(),
                decoder: c.decoder.kind.name(),
                p: pt.p,
                shots: pt.shots,
                failures: pt.failures,
                p_l: pt.p_l,
                std_err: pt.std_err,
                ci_low: pt.ci_low,
                ci_high: pt.ci_high,
                decode_errors: pt.decode_errors,
                observable_failures: pt.observable_failures.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";"),
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonRun<'a> {
    config_hash: String,
    #[serde(flatten)]
    result: &'a ExperimentResult,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    tool: &'static str,
    version: &'static str,
    git_describe: String,
    runs: Vec<JsonRun<'a>>,
}

/// Full results with config echo, config hash, seed and timing.
pub fn write_json<W: Write>(results: &[ExperimentResult], out: W) -> Result<(), ExperimentError> {
    let report = JsonReport {
        tool: "floqsim",
        version: env!("CARGO_PKG_VERSION"),
        git_describe: git_describe(),
        runs: results.iter().map(|r| JsonRun { config_hash: r.config.hash(), result: r }).collect(),
    };
    serde_json::to_writer_pretty(out, &report)?;
    Ok(())
}

/// Detector weight histogram with columns `w, count, percent`.
pub fn write_histogram_csv<W: Write>(rows: &[HistogramRow], out: W) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct TimingCsvRow {
    n: usize,
    ell: usize,
    decoder: &'static str,
    shots: usize,
    min_s: f64,
    median_s: f64,
    mean_s: f64,
    max_s: f64,
    osd_fraction: Option<f64>,
}

pub fn write_timing_csv<W: Write>(table: &TimingTable, out: W) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    for r in &table.rows {
        w.serialize(TimingCsvRow {
            n: r.n,
            ell: r.ell,
            decoder: r.decoder.name(),
            shots: r.shots,
            min_s: r.stats.min,
            median_s: r.stats.median,
            mean_s: r.stats.mean,
            max_s: r.stats.max,
            osd_fraction: r.osd_fraction,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Write results to `path` in the given format.
pub fn report(results: &[ExperimentResult], format: ReportFormat, path: &Path) -> Result<(), ExperimentError> {
    let mut out = BufWriter::new(File::create(path)?);
    match format {
        ReportFormat::Csv => write_csv(results, &mut out)?,
        ReportFormat::Json => write_json(results, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

/// `git describe --always --dirty` of the working directory, or `unknown`.
pub fn git_describe() -> String {
    Command::new("git")
        .args(["describe", "--always", "--dirty"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Family;
    use crate::experiments::{logical_error_rate_with, worker_pool_with, ExperimentConfig};

    fn run() -> ExperimentResult {
        let c = ExperimentConfig { periods: 2, p: vec![4e-3, 1e-2], shots: 300, seed: 5, ..ExperimentConfig::memory(Family::Hcf, 1, 0.0) };
        logical_error_rate_with(&c, &worker_pool_with(Some(2)).unwrap()).unwrap()
    }

    #[test]
    fn csv_is_reproducible_and_reingestable() {
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_csv(&[run()], &mut a).unwrap();
        write_csv(&[run()], &mut b).unwrap();
        assert_eq!(a, b);
        let mut rdr = csv::Reader::from_reader(&a[..]);
        let headers = rdr.headers().unwrap().clone();
        assert!(headers.iter().any(|h| h == "p_l"));
        let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 2);
        let p_l: f64 = rows[1][headers.iter().position(|h| h == "p_l").unwrap()].parse().unwrap();
        assert!((0.0..=1.0).contains(&p_l));
    }

    #[test]
    fn json_carries_metadata() {
        let r = run();
        let mut out = Vec::new();
        write_json(&[r.clone()], &mut out).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
        let run0 = &v["runs"][0];
        assert_eq!(run0["config_hash"], r.config.hash());
        assert_eq!(run0["config"]["seed"], 5);
        assert!(v["git_describe"].is_string());
        assert!(run0["points"][0]["timing"]["mean"].is_number());
    }

    #[test]
    fn histogram_columns() {
        let rows = [HistogramRow { w: 2, count: 928, percent: 100.0 }];
        let mut out = Vec::new();
        write_histogram_csv(&rows, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "w,count,percent\n2,928,100.0\n");
    }

    #[test]
    fn unwritable_path_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("missing").join("out.csv");
        assert!(matches!(report(&[], ReportFormat::Csv, &bad), Err(ExperimentError::Io(_))));
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(ReportFormat::from_path(Path::new("a.json")), ReportFormat::Json);
        assert_eq!(ReportFormat::from_path(Path::new("a.csv")), ReportFormat::Csv);
    }
}
