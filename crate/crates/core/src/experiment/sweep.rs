use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::ExperimentConfig;
use super::emit::fmt_f64;
use super::run::{run_experiment, ExitStatus};
use crate::error::{GatherError, Result};

/// Parameter grid over config fields. Keys are dotted paths into the config
/// (`sigma`, `initial.n`, `system.alpha`).
pub type Grid = BTreeMap<String, Vec<Value>>;

/// Sweep file: a base config, a grid, and the seeds to repeat each cell with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: ExperimentConfig,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default)]
    pub seeds: Vec<u64>,
}

impl SweepConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| GatherError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub cell: usize,
    pub values: BTreeMap<String, Value>,
    pub seed: u64,
    pub status: ExitStatus,
    pub gathered: bool,
    pub steps: u64,
    pub final_diameter: f64,
    pub violations: usize,
    pub max_violation: f64,
    pub s4_post_entry_radius: Option<f64>,
}

fn set_path(root: &mut Value, key: &str, v: Value) -> Result<()> {
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (depth, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| GatherError::param(key, "path does not lead to a config field"))?;
        if depth + 1 == parts.len() {
            let known = obj.contains_key(*part) || known_optional(&parts[..=depth]);
            if !known {
                return Err(GatherError::param(key, "unknown config field"));
            }
            obj.insert((*part).to_string(), v);
            return Ok(());
        }
        node = obj
            .get_mut(*part)
            .ok_or_else(|| GatherError::param(key, "unknown config field"))?;
    }
    unreachable!("split yields at least one part")
}

/// Optional top-level fields omitted from serialized configs when unset.
fn known_optional(path: &[&str]) -> bool {
    matches!(path, ["visibility"] | ["delta"] | ["seed"] | ["checks"] | ["initial", "n"] | ["initial", "scale"])
}

/// Expand the grid into concrete configs, one per cell, in lexicographic key
/// order with the last key varying fastest. An empty grid yields the base.
pub fn expand_grid(base: &ExperimentConfig, grid: &Grid) -> Result<Vec<(BTreeMap<String, Value>, ExperimentConfig)>> {
    let base_value = serde_json::to_value(base)?;
    let mut cells: Vec<BTreeMap<String, Value>> = vec![BTreeMap::new()];
    for (key, values) in grid {
        if values.is_empty() {
            return Err(GatherError::param(key.clone(), "grid axis has no values"));
        }
        cells = cells
            .into_iter()
            .flat_map(|cell| {
                values.iter().map(move |v| {
                    let mut c = cell.clone();
                    c.insert(key.clone(), v.clone());
                    c
                })
            })
            .collect();
    }
    cells
        .into_iter()
        .map(|cell| {
            let mut v = base_value.clone();
            for (key, val) in &cell {
                set_path(&mut v, key, val.clone())?;
            }
            let cfg: ExperimentConfig =
                serde_json::from_value(v).map_err(|e| GatherError::Config(e.to_string()))?;
            cfg.validate()?;
            Ok((cell, cfg))
        })
        .collect()
}

/// Run every grid cell for every seed, in parallel. Rows come back in
/// `(cell, seed)` order regardless of scheduling.
pub fn sweep(base: &ExperimentConfig, grid: &Grid, seeds: &[u64]) -> Result<Vec<SweepRow>> {
    let cells = expand_grid(base, grid)?;
    let seeds: Vec<u64> = if seeds.is_empty() {
        vec![base.seed_or_default()]
    } else {
        seeds.to_vec()
    };
    let jobs: Vec<(usize, &BTreeMap<String, Value>, &ExperimentConfig, u64)> = cells
        .iter()
        .enumerate()
        .flat_map(|(k, (vals, cfg))| seeds.iter().map(move |&s| (k, vals, cfg, s)))
        .collect();
    jobs.par_iter()
        .map(|&(cell, vals, cfg, seed)| {
            let mut cfg = cfg.clone();
            cfg.seed = Some(seed);
            cfg.record_trajectory = false;
            let r = run_experiment(&cfg)?;
            Ok(SweepRow {
                cell,
                values: vals.clone(),
                seed,
                status: r.status,
                gathered: r.gathered(),
                steps: r.steps,
                final_diameter: r.last.diameter(),
                violations: r.report.violations.len(),
                max_violation: r.report.max_violation(),
                s4_post_entry_radius: r.s4_post_entry_radius,
            })
        })
        .collect()
}

/// Summary table: one row per `(cell, seed)` with the grid values as leading columns.
pub fn write_sweep_csv(rows: &[SweepRow], grid: &Grid, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| GatherError::Io(format!("{}: {e}", path.display())))?;
    let mut header: Vec<String> = vec!["cell".into()];
    header.extend(grid.keys().cloned());
    header.extend(
        [
            "seed",
            "status",
            "gathered",
            "steps",
            "final_diameter",
            "violations",
            "max_violation",
            "s4_post_entry_radius",
        ]
        .map(String::from),
    );
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.cell.to_string()];
        rec.extend(grid.keys().map(|k| r.values.get(k).map(|v| v.to_string()).unwrap_or_default()));
        rec.push(r.seed.to_string());
        rec.push(serde_json::to_value(r.status)?.as_str().unwrap_or_default().to_string());
        rec.push(u8::from(r.gathered).to_string());
        rec.push(r.steps.to_string());
        rec.push(fmt_f64(r.final_diameter));
        rec.push(r.violations.to_string());
        rec.push(fmt_f64(r.max_violation));
        rec.push(r.s4_post_entry_radius.map(fmt_f64).unwrap_or_default());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
