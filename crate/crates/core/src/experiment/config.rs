use std::f64::consts::TAU;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::SystemKind;
use crate::error::{GatherError, Result};
use crate::model::{Constellation, Point2, SystemParams};
use crate::monitors::GatherMode;
use crate::scheduler::{derive_rng, stream, Schedule, ScheduleKind};

pub const SPEC_VERSION: u32 = 1;

/// Fraction of `V` used as the largest link length by `connected-random`.
pub const DEFAULT_REACH: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialSpec {
    Explicit {
        points: Vec<[f64; 2]>,
    },
    /// Uniform in `[0, width] x [0, height]`.
    UniformBox {
        n: usize,
        width: f64,
        height: f64,
    },
    /// Each new agent lands within `reach * V` of a random earlier agent, so the
    /// V-disk graph starts connected.
    ConnectedRandom {
        n: usize,
        #[serde(default = "default_reach")]
        reach: f64,
    },
    Preset {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
}

fn default_reach() -> f64 {
    DEFAULT_REACH
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopCondition {
    #[default]
    Gathered,
    Budget,
}

/// Run-time invariant checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    /// Centroid drift per step at most 1e-10.
    Centroid,
    /// Hull perimeter never increases.
    Hull,
    /// No edge of the sensed graph is lost.
    Edges,
    /// Confinement radius after the entry condition.
    S4Confinement,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<String>,
}

fn default_version() -> u32 {
    SPEC_VERSION
}
fn default_sigma() -> f64 {
    1.0
}
fn default_dt() -> f64 {
    1e-3
}
fn default_eps() -> f64 {
    1e-6
}
fn default_max_steps() -> u64 {
    1000
}
fn default_schedule() -> ScheduleKind {
    ScheduleKind::Synchronous
}
fn default_every() -> u64 {
    1
}
fn default_true() -> bool {
    true
}

/// A complete, versioned experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_version")]
    pub spec_version: u32,
    pub system: SystemKind,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    /// `None` means unlimited visibility.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub visibility: Option<f64>,
    /// Defaults to `0.1 V`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_eps")]
    pub epsilon_gather: f64,
    pub initial: InitialSpec,
    #[serde(default = "default_schedule")]
    pub schedule: ScheduleKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
    #[serde(default)]
    pub stop: StopCondition,
    #[serde(default)]
    pub gather_mode: GatherMode,
    /// `None` selects the checks each system is known to satisfy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<Check>>,
    #[serde(default)]
    pub fatal_invariants: bool,
    #[serde(default = "default_every")]
    pub record_every: u64,
    #[serde(default = "default_true")]
    pub record_trajectory: bool,
    /// Re-run continuous systems at `dt / 2` and report the endpoint gap.
    #[serde(default)]
    pub richardson: bool,
    #[serde(default)]
    pub outputs: Outputs,
}

impl ExperimentConfig {
    pub fn new(system: SystemKind, initial: InitialSpec) -> Self {
        ExperimentConfig {
            spec_version: SPEC_VERSION,
            system,
            sigma: default_sigma(),
            visibility: None,
            delta: None,
            dt: default_dt(),
            epsilon_gather: default_eps(),
            initial,
            schedule: default_schedule(),
            seed: None,
            max_steps: default_max_steps(),
            stop: StopCondition::Gathered,
            gather_mode: GatherMode::Point,
            checks: None,
            fatal_invariants: false,
            record_every: default_every(),
            record_trajectory: true,
            richardson: false,
            outputs: Outputs::default(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| GatherError::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GatherError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn seed_or_default(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn params(&self) -> SystemParams {
        let v = self.visibility.unwrap_or(f64::INFINITY);
        let delta = self
            .delta
            .unwrap_or(if v.is_finite() { 0.1 * v } else { 0.1 });
        let rho = match self.schedule {
            ScheduleKind::Bernoulli { rho } => rho,
            _ => 1.0,
        };
        SystemParams {
            sigma: self.sigma,
            visibility: v,
            delta,
            rho,
            dt: self.dt,
            epsilon_gather: self.epsilon_gather,
        }
    }

    pub fn schedule(&self) -> Schedule {
        Schedule {
            kind: self.schedule.clone(),
            seed: self.seed_or_default(),
        }
    }

    pub fn initial_constellation(&self) -> Result<Constellation> {
        build_initial(&self.initial, &self.params(), self.seed_or_default())
    }

    /// Checks used when none are configured.
    pub fn default_checks(&self) -> Vec<Check> {
        let sync = matches!(self.schedule, ScheduleKind::Synchronous);
        let mut checks = Vec::new();
        match &self.system {
            SystemKind::S1 | SystemKind::S3 => {
                checks.extend([Check::Centroid, Check::Hull]);
            }
            SystemKind::S2 | SystemKind::S2Scaled if sync => checks.push(Check::Centroid),
            SystemKind::S4 => {
                if sync {
                    checks.push(Check::Centroid);
                }
                checks.push(Check::S4Confinement);
            }
            SystemKind::S5 | SystemKind::S6 | SystemKind::S7 | SystemKind::S8 { .. } => {
                checks.extend([Check::Edges, Check::Hull]);
            }
            SystemKind::S5je | SystemKind::S7Proportional => checks.push(Check::Edges),
            SystemKind::Laplacian { matrix, .. } if sync && matrix.is_balanced() => {
                checks.push(Check::Centroid)
            }
            _ => {}
        }
        checks
    }

    pub fn active_checks(&self) -> Vec<Check> {
        self.checks.clone().unwrap_or_else(|| self.default_checks())
    }

    /// Field-level validation against the chosen system.
    pub fn validate(&self) -> Result<()> {
        if self.spec_version != SPEC_VERSION {
            return Err(GatherError::param(
                "spec_version",
                format!("unsupported version {}, expected {SPEC_VERSION}", self.spec_version),
            ));
        }
        if let Some(v) = self.visibility {
            if !(v > 0.0) {
                return Err(GatherError::param("visibility", "must be positive"));
            }
        }
        if self.system.needs_visibility() && self.visibility.is_none() {
            return Err(GatherError::param(
                "visibility",
                format!("system {} needs a finite visibility range", self.system.name()),
            ));
        }
        let params = self.params();
        params.validate()?;
        if self.max_steps == 0 {
            return Err(GatherError::param("max_steps", "must be at least 1"));
        }
        if self.record_every == 0 {
            return Err(GatherError::param("record_every", "must be at least 1"));
        }
        if self.gather_mode == GatherMode::Disc && self.visibility.is_none() {
            return Err(GatherError::param("gather_mode", "disc gathering needs a finite visibility"));
        }
        validate_initial(&self.initial)?;
        let n = initial_size(&self.initial)?;
        self.system.validate(&params, n)?;
        let schedule = self.schedule();
        schedule.validate(n).map_err(|e| match e {
            GatherError::InvalidParam { field, reason } => GatherError::param(field, reason),
            other => other,
        })?;
        if self.system.is_continuous() && !schedule.is_synchronous() {
            return Err(GatherError::param(
                "schedule",
                format!("continuous system {} runs synchronously only", self.system.name()),
            ));
        }
        if let InitialSpec::ConnectedRandom { .. } = self.initial {
            if self.visibility.is_none() {
                return Err(GatherError::param("initial", "connected-random needs a finite visibility"));
            }
        }
        Ok(())
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if let Ok(n) = initial_size(&self.initial) {
            w.extend(self.system.warnings(&self.params(), n));
        }
        if matches!(self.system, SystemKind::S8 { .. }) && self.schedule().is_synchronous() {
            w.push("S8 gathering relies on strong asynchronicity; the schedule activates everyone".into());
        }
        w
    }
}

fn validate_initial(spec: &InitialSpec) -> Result<()> {
    match spec {
        InitialSpec::Explicit { points } => {
            if points.is_empty() {
                return Err(GatherError::param("initial.points", "needs at least one point"));
            }
            if let Some(k) = points.iter().position(|p| !p[0].is_finite() || !p[1].is_finite()) {
                return Err(GatherError::param("initial.points", format!("point {k} is not finite")));
            }
        }
        InitialSpec::UniformBox { n, width, height } => {
            if *n == 0 {
                return Err(GatherError::param("initial.n", "must be at least 1"));
            }
            if !(*width >= 0.0 && *height >= 0.0 && width.is_finite() && height.is_finite()) {
                return Err(GatherError::param("initial.width", "box sides must be finite and non-negative"));
            }
        }
        InitialSpec::ConnectedRandom { n, reach } => {
            if *n == 0 {
                return Err(GatherError::param("initial.n", "must be at least 1"));
            }
            if !(*reach > 0.0 && *reach < 1.0) {
                return Err(GatherError::param("initial.reach", "must lie in (0, 1)"));
            }
        }
        InitialSpec::Preset { name, n, scale } => {
            let p = find_preset(name)?;
            if let Some(n) = n {
                if !p.sized {
                    return Err(GatherError::param("initial.n", format!("preset {name} has a fixed size")));
                }
                if *n == 0 {
                    return Err(GatherError::param("initial.n", "must be at least 1"));
                }
            }
            if let Some(s) = scale {
                if !(*s > 0.0 && s.is_finite()) {
                    return Err(GatherError::param("initial.scale", "must be positive"));
                }
            }
        }
    }
    Ok(())
}

fn initial_size(spec: &InitialSpec) -> Result<usize> {
    Ok(match spec {
        InitialSpec::Explicit { points } => points.len(),
        InitialSpec::UniformBox { n, .. } | InitialSpec::ConnectedRandom { n, .. } => *n,
        InitialSpec::Preset { name, n, .. } => {
            let p = find_preset(name)?;
            n.unwrap_or(p.default_n)
        }
    })
}

/// Materialize an initial constellation; random kinds draw from `seed`.
pub fn build_initial(spec: &InitialSpec, params: &SystemParams, seed: u64) -> Result<Constellation> {
    validate_initial(spec)?;
    let mut rng = derive_rng(seed, stream::INITIAL, 0, 0);
    let pts: Vec<Point2> = match spec {
        InitialSpec::Explicit { points } => points.iter().map(|p| Point2::new(p[0], p[1])).collect(),
        InitialSpec::UniformBox { n, width, height } => (0..*n)
            .map(|_| Point2::new(rng.random::<f64>() * width, rng.random::<f64>() * height))
            .collect(),
        InitialSpec::ConnectedRandom { n, reach } => {
            if !params.visibility.is_finite() {
                return Err(GatherError::param("initial", "connected-random needs a finite visibility"));
            }
            let r = reach * params.visibility;
            let mut pts = vec![Point2::ZERO];
            while pts.len() < *n {
                let anchor = pts[rng.random_range(0..pts.len())];
                let d = r * rng.random::<f64>().max(1e-3);
                pts.push(anchor + Point2::from_angle(rng.random::<f64>() * TAU) * d);
            }
            pts
        }
        InitialSpec::Preset { name, n, scale } => {
            let p = find_preset(name)?;
            (p.build)(n.unwrap_or(p.default_n), scale.unwrap_or(1.0))
        }
    };
    Constellation::new(pts)
}

/// A named starting constellation.
#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub default_n: usize,
    /// Whether `n` may be overridden.
    pub sized: bool,
    build: fn(usize, f64) -> Vec<Point2>,
}

fn gordon_locked(_n: usize, s: f64) -> Vec<Point2> {
    // Rows just inside one unit apart so only the middle agents see across.
    let h = -(1.0 - 1e-6);
    [(-0.1, 0.0), (0.0, 0.0), (0.1, 0.0), (-0.05, h), (0.0, h), (0.15, h)]
        .iter()
        .map(|&(x, y)| Point2::new(x * s, y * s))
        .collect()
}

fn line(n: usize, s: f64) -> Vec<Point2> {
    (0..n).map(|k| Point2::new(k as f64 * s, 0.0)).collect()
}

fn ring(n: usize, s: f64) -> Vec<Point2> {
    (0..n)
        .map(|k| Point2::from_angle(TAU * k as f64 / n as f64) * s)
        .collect()
}

fn two_clusters(n: usize, s: f64) -> Vec<Point2> {
    let half = n.div_ceil(2);
    (0..n)
        .map(|k| {
            let (base, idx) = if k < half { (0.0, k) } else { (s, k - half) };
            Point2::new(base, 0.0) + Point2::from_angle(TAU * idx as f64 / half as f64) * (0.05 * s)
        })
        .collect()
}

pub const PRESETS: [Preset; 4] = [
    Preset {
        name: "gordon-locked",
        description: "six agents in two rows about one unit apart, linked only through the middle pair; deterministic bisector jumps swap the row ends forever (use V = 1, sigma = 0.2)",
        default_n: 6,
        sized: false,
        build: gordon_locked,
    },
    Preset {
        name: "line-n-agents",
        description: "n agents evenly spaced on a horizontal line, spacing = scale",
        default_n: 10,
        sized: true,
        build: line,
    },
    Preset {
        name: "ring",
        description: "n agents evenly spaced on a circle of radius = scale",
        default_n: 8,
        sized: true,
        build: ring,
    },
    Preset {
        name: "two-clusters",
        description: "two tight rings of agents whose centers are scale apart",
        default_n: 8,
        sized: true,
        build: two_clusters,
    },
];

pub fn find_preset(name: &str) -> Result<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name).ok_or_else(|| {
        let names: Vec<_> = PRESETS.iter().map(|p| p.name).collect();
        GatherError::param("initial.name", format!("unknown preset {name}; known: {}", names.join(", ")))
    })
}
