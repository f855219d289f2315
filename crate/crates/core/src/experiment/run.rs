use serde::{Deserialize, Serialize};

use super::config::{Check, ExperimentConfig, StopCondition};
use crate::dynamics::{SystemKind, Stepper};
use crate::error::{GatherError, Result};
use crate::model::{Constellation, Point2, TOL_GEOM};
use crate::monitors::{
    check_edges_kept, check_gathered, lyapunov_sum, s4_confinement_radius, s4_entry_threshold,
    MonitorReport, Violation,
};

/// Largest per-step centroid drift accepted by the centroid check.
pub const CENTROID_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExitStatus {
    Gathered,
    Completed,
    BudgetExhausted,
    InvariantViolated,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Gathered | ExitStatus::Completed => 0,
            ExitStatus::BudgetExhausted => 1,
            ExitStatus::InvariantViolated => 3,
        }
    }
}

/// One recorded instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub step: u64,
    pub time: f64,
    pub positions: Vec<Point2>,
    pub active: Vec<bool>,
    pub locked: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryRecord {
    pub frames: Vec<Frame>,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub record: TrajectoryRecord,
    pub report: MonitorReport,
    pub status: ExitStatus,
    pub initial: Constellation,
    pub last: Constellation,
    /// Steps actually taken.
    pub steps: u64,
    pub warnings: Vec<String>,
    /// Largest endpoint gap against a half-step re-run.
    pub richardson: Option<f64>,
    /// Largest distance from the centroid after the confinement entry condition.
    pub s4_post_entry_radius: Option<f64>,
    /// Error that ended the run early, if any.
    pub failure: Option<String>,
}

impl RunResult {
    pub fn gathered(&self) -> bool {
        self.status == ExitStatus::Gathered
    }
}

struct Checker {
    checks: Vec<Check>,
    edge_slack: f64,
    visibility: f64,
    sigma: f64,
    n: usize,
    prev_l3: f64,
    s4_entered: bool,
    s4_radius: Option<f64>,
}

impl Checker {
    fn has(&self, c: Check) -> bool {
        self.checks.contains(&c)
    }

    fn before_step(&mut self, c: &Constellation) {
        if self.has(Check::S4Confinement) && !self.s4_entered {
            self.s4_entered = lyapunov_sum(c) <= s4_entry_threshold(self.n, self.sigma);
        }
    }

    fn after_step(
        &mut self,
        prev: &Constellation,
        next: &Constellation,
        sensed: &crate::visibility::VisibilityGraph,
        l3_next: f64,
    ) -> Vec<Violation> {
        let mut v = Vec::new();
        let k = next.step;
        if self.has(Check::Centroid) {
            let d = next.centroid().dist(prev.centroid());
            if d > CENTROID_TOL {
                v.push(Violation::new(k, "centroid-drift", d));
            }
        }
        if self.has(Check::Hull) {
            let rise = l3_next - self.prev_l3;
            if rise > TOL_GEOM {
                v.push(Violation::new(k, "hull-growth", rise));
            }
        }
        if self.has(Check::Edges) && self.visibility.is_finite() {
            v.extend(check_edges_kept(sensed, next, self.visibility, self.edge_slack));
        }
        if self.has(Check::S4Confinement) && self.s4_entered {
            let r = crate::model::max_radius(next);
            self.s4_radius = Some(self.s4_radius.map_or(r, |m: f64| m.max(r)));
            let bound = s4_confinement_radius(self.n, self.sigma);
            if r > bound {
                v.push(Violation::new(k, "s4-confinement", r - bound));
            }
        }
        self.prev_l3 = l3_next;
        v
    }
}

fn frame(c: &Constellation, active: Vec<bool>, locked: Vec<bool>) -> Frame {
    Frame {
        step: c.step,
        time: c.time,
        positions: c.positions().to_vec(),
        active,
        locked,
    }
}

/// Run one configured experiment. Validation errors are returned as `Err`;
/// failures during the run end it with [`ExitStatus::InvariantViolated`].
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunResult> {
    cfg.validate()?;
    let params = cfg.params();
    let seed = cfg.seed_or_default();
    let c0 = cfg.initial_constellation()?;
    let n = c0.len();
    let schedule = cfg.schedule();
    let mut stepper = Stepper::new(cfg.system.clone(), params, seed, &c0)?;
    let alpha = match cfg.system {
        SystemKind::PotentialAlpha { alpha } => alpha,
        _ => 2.0,
    };

    let mut report = MonitorReport::new(alpha);
    let mut record = TrajectoryRecord::default();
    let g0 = stepper.graph(&c0)?;
    report.record(&c0, &g0, 0, &params);
    if cfg.record_trajectory {
        record.frames.push(frame(&c0, vec![true; n], vec![false; n]));
    }
    let mut checker = Checker {
        checks: cfg.active_checks(),
        edge_slack: if cfg.system.is_continuous() {
            2.0 * params.dt * params.sigma
        } else {
            TOL_GEOM
        },
        visibility: params.visibility,
        sigma: params.sigma,
        n,
        prev_l3: report.l3[0],
        s4_entered: false,
        s4_radius: None,
    };

    let gathered = |c: &Constellation| check_gathered(c, &params, cfg.gather_mode);
    let mut c = c0.clone();
    let mut status = None;
    let mut failure = None;
    let mut steps = 0;
    while steps < cfg.max_steps {
        if cfg.stop == StopCondition::Gathered && gathered(&c) {
            status = Some(ExitStatus::Gathered);
            break;
        }
        checker.before_step(&c);
        let mask = schedule.activation_mask(c.step, n)?;
        let sensed = stepper.graph(&c)?;
        let out = match stepper.step(&c, &mask) {
            Ok(out) => out,
            Err(e @ (GatherError::Blowup(_) | GatherError::Geometry(_) | GatherError::NonFinite { .. })) => {
                report.flag(Violation::new(c.step + 1, "step-failure", f64::INFINITY));
                failure = Some(e.to_string());
                status = Some(ExitStatus::InvariantViolated);
                break;
            }
            Err(e) => return Err(e),
        };
        steps += 1;
        let next = out.next;
        let l3 = crate::monitors::lyapunov_l3(&next);
        let found = checker.after_step(&c, &next, &sensed, l3);
        let fatal = cfg.fatal_invariants && !found.is_empty();
        report.violations.extend(found);
        let last_step = steps == cfg.max_steps;
        if next.step % cfg.record_every == 0 || last_step || fatal {
            let g = stepper.graph(&next)?;
            report.record(&next, &g, out.agents.iter().filter(|a| a.locked).count(), &params);
            if cfg.record_trajectory {
                let active = out.agents.iter().map(|a| a.active).collect();
                let locked = out.agents.iter().map(|a| a.locked).collect();
                record.frames.push(frame(&next, active, locked));
            }
        }
        c = next;
        if fatal {
            status = Some(ExitStatus::InvariantViolated);
            break;
        }
    }
    let status = status.unwrap_or(match cfg.stop {
        StopCondition::Gathered if gathered(&c) => ExitStatus::Gathered,
        StopCondition::Gathered => ExitStatus::BudgetExhausted,
        StopCondition::Budget => ExitStatus::Completed,
    });

    let richardson = if cfg.richardson && cfg.system.is_continuous() && failure.is_none() {
        Some(richardson_gap(cfg, &c0, &c, steps)?)
    } else {
        None
    };

    Ok(RunResult {
        record,
        report,
        status,
        initial: c0,
        last: c,
        steps,
        warnings: cfg.warnings(),
        richardson,
        s4_post_entry_radius: checker.s4_radius,
        failure,
    })
}

/// Re-run `2 * steps` steps at `dt / 2` and return the largest endpoint gap.
fn richardson_gap(cfg: &ExperimentConfig, c0: &Constellation, end: &Constellation, steps: u64) -> Result<f64> {
    let mut params = cfg.params();
    params.dt /= 2.0;
    let mut stepper = Stepper::new(cfg.system.clone(), params, cfg.seed_or_default(), c0)?;
    let mask = vec![true; c0.len()];
    let mut c = c0.clone();
    for _ in 0..2 * steps {
        c = stepper.step(&c, &mask)?.next;
    }
    Ok(c.positions()
        .iter()
        .zip(end.positions())
        .map(|(a, b)| a.dist(*b))
        .fold(0.0, f64::max))
}
