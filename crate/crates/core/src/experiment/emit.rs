use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::run::{ExitStatus, Frame, RunResult, TrajectoryRecord};
use crate::error::{GatherError, Result};
use crate::model::Point2;
use crate::monitors::{MonitorReport, Violation, METRIC_COLUMNS};

pub const TRAJECTORY_HEADER: [&str; 7] = ["step", "t", "agent", "x", "y", "active", "locked"];

/// 17 significant digits; parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| GatherError::Config(format!("bad number {s:?} in column {what}")))
}

fn parse_u64(s: &str, what: &str) -> Result<u64> {
    s.trim()
        .parse()
        .map_err(|_| GatherError::Config(format!("bad integer {s:?} in column {what}")))
}

fn parse_bool(s: &str, what: &str) -> Result<bool> {
    match s.trim() {
        "1" => Ok(true),
        "0" => Ok(false),
        other => Err(GatherError::Config(format!("bad flag {other:?} in column {what}"))),
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> GatherError {
    GatherError::Io(format!("{}: {e}", path.display()))
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| io_err(path, e))
}

pub fn write_trajectory(record: &TrajectoryRecord, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(TRAJECTORY_HEADER)?;
    for f in &record.frames {
        for (i, p) in f.positions.iter().enumerate() {
            w.write_record([
                f.step.to_string(),
                fmt_f64(f.time),
                i.to_string(),
                fmt_f64(p.x),
                fmt_f64(p.y),
                u8::from(f.active[i]).to_string(),
                u8::from(f.locked[i]).to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}

pub fn read_trajectory(path: &Path) -> Result<TrajectoryRecord> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    if r.headers()?.iter().collect::<Vec<_>>() != TRAJECTORY_HEADER {
        return Err(GatherError::Config(format!("{}: unexpected trajectory header", path.display())));
    }
    let mut record = TrajectoryRecord::default();
    for row in r.records() {
        let row = row?;
        let step = parse_u64(&row[0], "step")?;
        let time = parse_f64(&row[1], "t")?;
        let agent = parse_u64(&row[2], "agent")? as usize;
        let p = Point2::new(parse_f64(&row[3], "x")?, parse_f64(&row[4], "y")?);
        let active = parse_bool(&row[5], "active")?;
        let locked = parse_bool(&row[6], "locked")?;
        if agent == 0 {
            record.frames.push(Frame {
                step,
                time,
                positions: Vec::new(),
                active: Vec::new(),
                locked: Vec::new(),
            });
        }
        let f = record
            .frames
            .last_mut()
            .filter(|f| f.step == step && f.positions.len() == agent)
            .ok_or_else(|| GatherError::Config(format!("agent rows out of order at step {step}")))?;
        f.positions.push(p);
        f.active.push(active);
        f.locked.push(locked);
    }
    Ok(record)
}

pub fn write_metrics(report: &MonitorReport, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(METRIC_COLUMNS)?;
    for k in 0..report.len() {
        let row = report.row(k);
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, v)| match c {
                0 | 13 => (*v as u64).to_string(),
                _ => fmt_f64(*v),
            })
            .collect();
        w.write_record(&cells)?;
    }
    w.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}

pub fn read_metrics(path: &Path) -> Result<MonitorReport> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    if r.headers()?.iter().collect::<Vec<_>>() != METRIC_COLUMNS {
        return Err(GatherError::Config(format!("{}: unexpected metrics header", path.display())));
    }
    let mut report = MonitorReport::default();
    for row in r.records() {
        let row = row?;
        let mut vals = [0.0; 16];
        for (k, v) in vals.iter_mut().enumerate() {
            *v = parse_f64(&row[k], METRIC_COLUMNS[k])?;
        }
        report.push_row(&vals);
    }
    Ok(report)
}

/// Run summary written next to the tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub system: String,
    pub seed: u64,
    pub status: ExitStatus,
    pub exit_code: i32,
    pub steps: u64,
    pub final_time: f64,
    pub initial_diameter: f64,
    pub final_diameter: f64,
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub richardson: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s4_post_entry_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl RunSummary {
    pub fn new(cfg: &ExperimentConfig, r: &RunResult) -> Self {
        RunSummary {
            system: cfg.system.name().into(),
            seed: cfg.seed_or_default(),
            status: r.status,
            exit_code: r.status.code(),
            steps: r.steps,
            final_time: r.last.time,
            initial_diameter: r.initial.diameter(),
            final_diameter: r.last.diameter(),
            violations: r.report.violations.clone(),
            warnings: r.warnings.clone(),
            richardson: r.richardson,
            s4_post_entry_radius: r.s4_post_entry_radius,
            failure: r.failure.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmittedFiles {
    pub config: PathBuf,
    pub summary: PathBuf,
    pub metrics: PathBuf,
    pub trajectory: Option<PathBuf>,
}

/// Write `config.json`, `summary.json`, the metrics table and (when recorded)
/// the trajectory table into `out_dir`.
pub fn emit(cfg: &ExperimentConfig, r: &RunResult, out_dir: &Path) -> Result<EmittedFiles> {
    fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let mut resolved = cfg.clone();
    resolved.seed = Some(cfg.seed_or_default());
    let config = out_dir.join("config.json");
    fs::write(&config, resolved.to_json() + "\n").map_err(|e| io_err(&config, e))?;
    let summary = out_dir.join("summary.json");
    let text = serde_json::to_string_pretty(&RunSummary::new(cfg, r))?;
    fs::write(&summary, text + "\n").map_err(|e| io_err(&summary, e))?;
    let metrics = out_dir.join(cfg.outputs.metrics.as_deref().unwrap_or("metrics.csv"));
    write_metrics(&r.report, &metrics)?;
    let trajectory = if cfg.record_trajectory {
        let p = out_dir.join(cfg.outputs.trajectory.as_deref().unwrap_or("trajectory.csv"));
        write_trajectory(&r.record, &p)?;
        Some(p)
    } else {
        None
    };
    Ok(EmittedFiles {
        config,
        summary,
        metrics,
        trajectory,
    })
}
