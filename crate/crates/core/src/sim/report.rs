//! Run-directory output: per-frame metrics, Table-1 style summaries,
//! per-phase throughput and a manifest that echoes the configuration.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::fatigue::write_alert_log;
use crate::gaze::sample::csv_error;
use crate::gaze::write_interest_table;

use super::run::{FrameMetrics, ScenarioResult, ScenarioRun};
use super::scenario::PhaseKind;

pub const SUMMARY_FILE: &str = "summary.csv";
pub const DETECTIONS_FILE: &str = "detections.csv";
pub const THROUGHPUT_FILE: &str = "throughput.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

/// One row of the accuracy table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub scenario: String,
    pub detected: usize,
    pub total: usize,
}

impl SummaryRow {
    pub fn new(scenario: impl Into<String>, detected: usize, total: usize) -> Self {
        Self {
            scenario: scenario.into(),
            detected,
            total,
        }
    }
}

/// Detection accuracy in percent; 100 when there was nothing to detect.
pub fn accuracy_percent(detected: usize, total: usize) -> f64 {
    if total == 0 {
        100.0
    } else {
        100.0 * detected as f64 / total as f64
    }
}

/// Accuracy in percent rounded to one decimal, e.g. `"56.7"` for 55 of 97.
pub fn format_accuracy(detected: usize, total: usize) -> String {
    format!("{:.1}", accuracy_percent(detected, total))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes `scenario,detected,total,accuracy`, accuracy in percent.
pub fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut out = String::from("scenario,detected,total,accuracy\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.scenario,
            r.detected,
            r.total,
            format_accuracy(r.detected, r.total)
        );
    }
    write_file(path, &out)
}

/// Reads the first three columns of a summary table; the accuracy column is
/// recomputed rather than trusted.
pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    #[derive(Deserialize)]
    struct Raw {
        scenario: String,
        detected: usize,
        total: usize,
    }
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    rdr.deserialize::<Raw>()
        .map(|r| {
            let r = r.map_err(|e| csv_error(path, e))?;
            if r.detected > r.total {
                return Err(Error::parse(path, format!("{}: detected exceeds total", r.scenario)));
            }
            Ok(SummaryRow::new(r.scenario, r.detected, r.total))
        })
        .collect()
}

pub fn write_metrics_csv(path: &Path, metrics: &[FrameMetrics]) -> Result<()> {
    let mut out = String::from(
        "frame,t,phase,bytes_prediction,bytes_baseline,nodes_loaded,nodes_baseline,fatigue_level,flight_risk,alerts\n",
    );
    for m in metrics {
        let _ = writeln!(
            out,
            "{},{:.3},{},{},{},{},{},{:.6},{:.6},{}",
            m.frame,
            m.t,
            m.phase.as_str(),
            m.bytes_prediction,
            m.bytes_baseline,
            m.nodes_loaded,
            m.nodes_baseline,
            m.fatigue_level,
            m.flight_risk,
            m.alerts
        );
    }
    write_file(path, &out)
}

fn write_detections_csv(path: &Path, results: &[&ScenarioResult]) -> Result<()> {
    let mut out = String::from(
        "scenario,seed,detected,total,accuracy_by_convention,episodes_alerted,episodes_total,fatigue_alerts,flight_risk_alerts\n",
    );
    for r in results {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.scenario,
            r.seed,
            r.detected,
            r.total,
            r.accuracy_by_convention,
            r.episodes_alerted,
            r.episodes_total,
            r.fatigue_alerts,
            r.flight_risk_alerts
        );
    }
    write_file(path, &out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThroughputRow {
    pub scenario: String,
    pub phase: String,
    pub frames: usize,
    pub bytes_prediction: u64,
    pub bytes_baseline: u64,
    pub mean_prediction: f64,
    pub mean_baseline: f64,
    pub ratio: f64,
}

fn write_throughput_csv(path: &Path, results: &[&ScenarioResult]) -> Result<()> {
    let mut out = String::from(
        "scenario,phase,frames,bytes_prediction,bytes_baseline,mean_prediction,mean_baseline,ratio\n",
    );
    for r in results {
        for kind in [PhaseKind::Takeoff, PhaseKind::Cruise, PhaseKind::Landing] {
            let p = r.phase(kind);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.3},{:.3},{:.6}",
                r.scenario,
                kind.as_str(),
                p.frames,
                p.bytes_prediction,
                p.bytes_baseline,
                p.mean_prediction(),
                p.mean_baseline(),
                p.ratio()
            );
        }
    }
    write_file(path, &out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub key: String,
    pub scenario: String,
    pub seed: u64,
    pub source: String,
    pub metrics: String,
    pub alerts: String,
    pub interests: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    /// Cruise-phase prediction bytes must stay below this fraction of the
    /// baseline.
    pub cruise_throughput_bound: f64,
    pub config: RunConfig,
    pub scenarios: Vec<ManifestEntry>,
    pub results: Vec<ScenarioResult>,
}

/// Writes every report file for `runs` into `dir`, creating it if needed.
/// `sources` names where each scenario came from and is echoed into the
/// manifest. Returns the paths written.
pub fn emit_report(
    dir: &Path,
    runs: &[ScenarioRun],
    cfg: &RunConfig,
    sources: &[String],
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut keys = BTreeSet::new();
    let mut entries = Vec::new();
    for (i, run) in runs.iter().enumerate() {
        let r = &run.result;
        let mut key = format!("{}-s{}", r.scenario, r.seed);
        if !keys.insert(key.clone()) {
            key = format!("{key}-{i}");
            keys.insert(key.clone());
        }
        let metrics = format!("metrics_{key}.csv");
        let alerts = format!("alerts_{key}.csv");
        let interests = format!("interests_{key}.csv");
        write_metrics_csv(&dir.join(&metrics), &run.metrics)?;
        write_alert_log(&dir.join(&alerts), &run.alerts)?;
        write_interest_table(&dir.join(&interests), &run.interests)?;
        for f in [&metrics, &alerts, &interests] {
            written.push(dir.join(f));
        }
        entries.push(ManifestEntry {
            key,
            scenario: r.scenario.clone(),
            seed: r.seed,
            source: sources.get(i).cloned().unwrap_or_default(),
            metrics,
            alerts,
            interests,
        });
    }

    let results: Vec<&ScenarioResult> = runs.iter().map(|r| &r.result).collect();
    let rows: Vec<SummaryRow> = results
        .iter()
        .map(|r| SummaryRow::new(r.scenario.clone(), r.detected, r.total))
        .collect();
    let path = dir.join(SUMMARY_FILE);
    write_summary_csv(&path, &rows)?;
    written.push(path);
    let path = dir.join(DETECTIONS_FILE);
    write_detections_csv(&path, &results)?;
    written.push(path);
    let path = dir.join(THROUGHPUT_FILE);
    write_throughput_csv(&path, &results)?;
    written.push(path);

    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        cruise_throughput_bound: cfg.cruise_throughput_bound,
        config: cfg.clone(),
        scenarios: entries,
        results: results.into_iter().cloned().collect(),
    };
    let path = dir.join(MANIFEST_FILE);
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    write_file(&path, &json)?;
    written.push(path);
    Ok(written)
}

/// Human-readable digest of a run directory: the accuracy table and the
/// per-phase throughput.
pub fn summarize_run_dir(dir: &Path) -> Result<String> {
    let rows = read_summary(&dir.join(SUMMARY_FILE))?;
    let path = dir.join(THROUGHPUT_FILE);
    let mut rdr = csv::Reader::from_path(&path).map_err(|e| csv_error(&path, e))?;
    let phases: Vec<ThroughputRow> = rdr
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| csv_error(&path, e))?;

    let mut out = String::new();
    let _ = writeln!(out, "{:<24} {:>8} {:>6} {:>9}", "scenario", "detected", "total", "accuracy");
    for r in &rows {
        let _ = writeln!(
            out,
            "{:<24} {:>8} {:>6} {:>8}%",
            r.scenario,
            r.detected,
            r.total,
            format_accuracy(r.detected, r.total)
        );
    }
    let (d, t) = rows.iter().fold((0, 0), |(d, t), r| (d + r.detected, t + r.total));
    let _ = writeln!(out, "{:<24} {:>8} {:>6} {:>8}%", "all", d, t, format_accuracy(d, t));
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<24} {:<8} {:>14} {:>14} {:>7}",
        "scenario", "phase", "mean pred B", "mean base B", "ratio"
    );
    for p in &phases {
        let _ = writeln!(
            out,
            "{:<24} {:<8} {:>14.1} {:>14.1} {:>7.3}",
            p.scenario, p.phase, p.mean_prediction, p.mean_baseline, p.ratio
        );
    }
    Ok(out)
}
