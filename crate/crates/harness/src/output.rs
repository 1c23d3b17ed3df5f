//! Result files of a run: raw rows, aggregates, timings, charts, manifest.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sparse_qubo::Metric;

use crate::aggregate::{aggregate, AggregateRow};
use crate::config::ExperimentGrid;
use crate::error::{HarnessError, Result};
use crate::experiment::{CellFailure, ExperimentOutcome, ResultRow};
use crate::formats::{read_file, write_file};
use crate::svg::line_chart;

pub const RAW_ROWS: &str = "raw_rows.csv";
pub const AGGREGATES: &str = "aggregates.csv";
pub const TIMINGS: &str = "timings.csv";
pub const MANIFEST: &str = "manifest.json";

const RAW_HEADER: [&str; 9] = [
    "method",
    "tuned_for",
    "sweep_value",
    "repetition",
    "seed",
    "tuned_param",
    "reconstruction_error",
    "support_error",
    "energy",
];
const AGGREGATE_HEADER: [&str; 8] = [
    "method",
    "tuned_for",
    "sweep_value",
    "count",
    "reconstruction_mean",
    "reconstruction_stderr",
    "support_mean",
    "support_stderr",
];
const TIMING_HEADER: [&str; 4] = ["method", "sweep_value", "repetition", "wall_time_ms"];

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    started_unix: f64,
    finished_unix: f64,
    grid: &'a ExperimentGrid,
    rows: usize,
    failures: &'a [CellFailure],
}

/// CSV with an explicit header, so an empty table still has one.
pub fn to_csv<T: Serialize>(
    header: &[&str],
    records: &[T],
) -> std::result::Result<Vec<u8>, csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(header)?;
    for r in records {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| csv::Error::from(e.into_error()))
}

pub fn rows_to_csv(rows: &[ResultRow]) -> Vec<u8> {
    to_csv(&RAW_HEADER, rows).expect("result rows serialize")
}

pub fn parse_rows(text: &str, path: &Path) -> Result<Vec<ResultRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| HarnessError::csv(path, e))?;
    if headers.iter().ne(RAW_HEADER) {
        return Err(HarnessError::Parse {
            path: path.to_path_buf(),
            message: format!("unexpected header {headers:?}"),
        });
    }
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<ResultRow>, _>>()
        .map_err(|e| HarnessError::csv(path, e))
}

pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>> {
    parse_rows(&read_file(path)?, path)
}

/// Writes every output file into `out_dir` (created if missing) and returns the
/// aggregates.
pub fn emit_outputs(
    grid: &ExperimentGrid,
    outcome: &ExperimentOutcome,
    out_dir: &Path,
    started: SystemTime,
) -> Result<Vec<AggregateRow>> {
    fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    let aggregates = aggregate(&outcome.rows);

    write_file(&out_dir.join(RAW_ROWS), rows_to_csv(&outcome.rows))?;
    let path = out_dir.join(AGGREGATES);
    write_file(
        &path,
        to_csv(&AGGREGATE_HEADER, &aggregates).map_err(|e| HarnessError::csv(&path, e))?,
    )?;
    let path = out_dir.join(TIMINGS);
    write_file(
        &path,
        to_csv(&TIMING_HEADER, &outcome.timings).map_err(|e| HarnessError::csv(&path, e))?,
    )?;

    let label = grid.sweep.axis.name();
    for metric in Metric::ALL {
        let title = format!("{} error, tuned for {} error", metric.name(), metric.name());
        let title = if grid.name.is_empty() {
            title
        } else {
            format!("{}: {title}", grid.name)
        };
        let svg = line_chart(&aggregates, metric, label, &title);
        write_file(&out_dir.join(format!("{}.svg", metric.name())), svg)?;
    }

    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        started_unix: unix_seconds(started),
        finished_unix: unix_seconds(SystemTime::now()),
        grid,
        rows: outcome.rows.len(),
        failures: &outcome.failures,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&out_dir.join(MANIFEST), text + "\n")?;
    Ok(aggregates)
}

fn unix_seconds(t: SystemTime) -> f64 {
    t.duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Method;

    #[test]
    fn empty_rows_still_have_header() {
        let text = String::from_utf8(rows_to_csv(&[])).unwrap();
        assert_eq!(text, RAW_HEADER.join(",") + "\n");
        assert!(parse_rows(&text, Path::new("r.csv")).unwrap().is_empty());
    }

    #[test]
    fn rows_round_trip() {
        let rows = vec![
            ResultRow {
                method: Method::QuboSa,
                tuned_for: Metric::Support,
                sweep_value: 0.1,
                repetition: 3,
                seed: u64::MAX,
                tuned_param: 1.0 / 3.0,
                reconstruction_error: 0.123_456_789_012_345_67,
                support_error: 4,
                energy: Some(-2.5e-7),
            },
            ResultRow {
                method: Method::Omp,
                tuned_for: Metric::Reconstruction,
                sweep_value: 8.0,
                repetition: 0,
                seed: 1,
                tuned_param: 3.0,
                reconstruction_error: 0.0,
                support_error: 0,
                energy: None,
            },
        ];
        let text = String::from_utf8(rows_to_csv(&rows)).unwrap();
        assert!(text.starts_with("method,tuned_for,"));
        assert!(text.contains("qubo_sa,support,"));
        assert_eq!(parse_rows(&text, Path::new("r.csv")).unwrap(), rows);
    }

    #[test]
    fn wrong_header_is_rejected() {
        assert!(parse_rows("a,b\n1,2\n", Path::new("r.csv")).is_err());
    }
}
