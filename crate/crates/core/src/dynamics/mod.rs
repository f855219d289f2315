//! One stepper per gathering system plus the Laplacian and potential families.
//!
//! Continuous systems advance by one explicit Euler step of length `dt`;
//! discrete systems are exact maps. Every stepper reads only the pre-step
//! constellation, so all agents act simultaneously.

mod bearing;
mod laplacian;
mod limited;
mod linear;

use serde::{Deserialize, Serialize};

use crate::error::{GatherError, Result};
use crate::model::{Constellation, Point2, SystemParams};
use crate::visibility::{build_visibility, GraphMode, VisibilityGraph};

pub use bearing::{step_potential_alpha, step_s3, step_s4};
pub use laplacian::{eigen_trajectory, step_laplacian, Horizon, LaplacianMatrix, LaplacianMode};
pub use limited::{step_s5, step_s5je, step_s6, step_s7, step_s8, S5Mode, S8Variant};
pub use linear::{closed_form_s1, step_s1, step_s2};

/// Per-agent diagnostics of one step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AgentStep {
    /// Displacement applied this step (velocity in query mode).
    pub step: Point2,
    pub active: bool,
    pub wedge_angle: Option<f64>,
    pub goal: Option<f64>,
    pub limit: Option<f64>,
    pub step_len: Option<f64>,
    pub locked: bool,
}

impl AgentStep {
    pub fn moved(step: Point2) -> Self {
        AgentStep {
            step,
            active: true,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub next: Constellation,
    pub agents: Vec<AgentStep>,
    /// Agent pairs snapped together this step.
    pub merges: usize,
    /// Updated memory graph for systems that carry one.
    pub graph: Option<VisibilityGraph>,
}

impl StepOutcome {
    pub(crate) fn from_steps(c: &Constellation, agents: Vec<AgentStep>, dt: f64) -> Result<Self> {
        let next = c
            .positions()
            .iter()
            .zip(&agents)
            .map(|(&p, a)| p + a.step)
            .collect();
        Ok(StepOutcome {
            next: c.advance(next, dt)?,
            agents,
            merges: 0,
            graph: None,
        })
    }

    pub fn lock_count(&self) -> usize {
        self.agents.iter().filter(|a| a.locked).count()
    }

    pub fn max_step(&self) -> f64 {
        self.agents.iter().map(|a| a.step.norm()).fold(0.0, f64::max)
    }
}

/// Hold inactive agents at their pre-step positions.
///
/// Valid for any stepper whose per-agent update reads only the pre-step state.
pub fn apply_activation(c: &Constellation, mut out: StepOutcome, mask: &[bool]) -> Result<StepOutcome> {
    if mask.len() != c.len() {
        return Err(GatherError::Dimension {
            expected: c.len(),
            actual: mask.len(),
        });
    }
    if mask.iter().all(|&a| a) {
        return Ok(out);
    }
    let mut next = out.next.positions().to_vec();
    for (i, &active) in mask.iter().enumerate() {
        if !active {
            next[i] = c.get(i);
            out.agents[i] = AgentStep {
                active: false,
                ..out.agents[i]
            };
            out.agents[i].step = Point2::ZERO;
        }
    }
    out.next = Constellation::at(next, out.next.step, out.next.time)?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SystemKind {
    S1,
    S2,
    S2Scaled,
    S3,
    S4,
    S5je,
    S5,
    S6,
    S7,
    S7Proportional,
    S8 {
        #[serde(default)]
        variant: S8Variant,
    },
    Laplacian {
        matrix: LaplacianMatrix,
        #[serde(default)]
        mode: LaplacianMode,
    },
    PotentialAlpha {
        alpha: f64,
    },
}

impl SystemKind {
    pub fn name(&self) -> &'static str {
        match self {
            SystemKind::S1 => "s1",
            SystemKind::S2 => "s2",
            SystemKind::S2Scaled => "s2-scaled",
            SystemKind::S3 => "s3",
            SystemKind::S4 => "s4",
            SystemKind::S5je => "s5je",
            SystemKind::S5 => "s5",
            SystemKind::S6 => "s6",
            SystemKind::S7 => "s7",
            SystemKind::S7Proportional => "s7-proportional",
            SystemKind::S8 { .. } => "s8",
            SystemKind::Laplacian { .. } => "laplacian",
            SystemKind::PotentialAlpha { .. } => "potential-alpha",
        }
    }

    /// Continuous systems integrate with `dt`; the rest are exact maps.
    pub fn is_continuous(&self) -> bool {
        match self {
            SystemKind::S1
            | SystemKind::S3
            | SystemKind::S5je
            | SystemKind::S5
            | SystemKind::S7
            | SystemKind::S7Proportional
            | SystemKind::PotentialAlpha { .. } => true,
            SystemKind::Laplacian { mode, .. } => *mode == LaplacianMode::Continuous,
            _ => false,
        }
    }

    pub fn needs_visibility(&self) -> bool {
        matches!(
            self,
            SystemKind::S5je
                | SystemKind::S5
                | SystemKind::S6
                | SystemKind::S7
                | SystemKind::S7Proportional
                | SystemKind::S8 { .. }
        )
    }

    /// Neighbor relation the system senses.
    pub fn graph_mode(&self, params: &SystemParams) -> GraphMode {
        match self {
            SystemKind::S5je => GraphMode::Hysteresis,
            SystemKind::S5
            | SystemKind::S6
            | SystemKind::S7
            | SystemKind::S7Proportional
            | SystemKind::S8 { .. } => GraphMode::VDisk,
            SystemKind::PotentialAlpha { .. } if params.visibility.is_finite() => GraphMode::VDisk,
            _ => GraphMode::Complete,
        }
    }

    /// Pre-step displacement grows with `dt`; step-to-step time is `dt` or 1.
    pub fn time_step(&self, params: &SystemParams) -> f64 {
        if self.is_continuous() {
            params.dt
        } else {
            1.0
        }
    }

    pub fn validate(&self, params: &SystemParams, n: usize) -> Result<()> {
        params.validate()?;
        if self.needs_visibility() && !params.visibility.is_finite() {
            return Err(GatherError::param("visibility", format!("{} needs a finite V", self.name())));
        }
        match self {
            SystemKind::S1 if params.dt * params.sigma * n as f64 >= 1.0 => Err(GatherError::param(
                "dt",
                format!("dt*sigma*n = {} must stay below 1", params.dt * params.sigma * n as f64),
            )),
            SystemKind::Laplacian { matrix, .. } if matrix.dim() != n => Err(GatherError::Dimension {
                expected: n,
                actual: matrix.dim(),
            }),
            SystemKind::PotentialAlpha { alpha } if !(*alpha > 0.0) => {
                Err(GatherError::param("alpha", "must be positive"))
            }
            _ => Ok(()),
        }
    }

    /// Non-fatal notes about parameters outside a system's proven regime.
    pub fn warnings(&self, params: &SystemParams, n: usize) -> Vec<String> {
        let mut w = Vec::new();
        let nf = n as f64;
        match self {
            SystemKind::S2 if params.sigma >= 2.0 / nf => w.push(format!(
                "sigma = {} is outside the stable window (0, 2/n = {})",
                params.sigma,
                2.0 / nf
            )),
            SystemKind::S2Scaled if params.sigma >= 2.0 => {
                w.push(format!("sigma = {} is outside the stable window (0, 2)", params.sigma))
            }
            _ => {}
        }
        w
    }
}

/// Stateful driver for one system: owns the memory graph and the motion seed.
#[derive(Debug, Clone)]
pub struct Stepper {
    pub kind: SystemKind,
    pub params: SystemParams,
    pub seed: u64,
    graph: Option<VisibilityGraph>,
}

impl Stepper {
    pub fn new(kind: SystemKind, params: SystemParams, seed: u64, initial: &Constellation) -> Result<Self> {
        kind.validate(&params, initial.len())?;
        let graph = match kind {
            SystemKind::S5je => Some(build_visibility(initial, &params, GraphMode::Hysteresis, None)?),
            _ => None,
        };
        Ok(Stepper {
            kind,
            params,
            seed,
            graph,
        })
    }

    /// Graph the next step will sense.
    pub fn graph(&self, c: &Constellation) -> Result<VisibilityGraph> {
        match &self.graph {
            Some(g) => Ok(g.clone()),
            None => build_visibility(c, &self.params, self.kind.graph_mode(&self.params), None),
        }
    }

    pub fn step(&mut self, c: &Constellation, mask: &[bool]) -> Result<StepOutcome> {
        let p = &self.params;
        let out = match &self.kind {
            SystemKind::S1 => step_s1(c, p)?,
            SystemKind::S2 => step_s2(c, p, false)?,
            SystemKind::S2Scaled => step_s2(c, p, true)?,
            SystemKind::S3 => step_s3(c, p)?,
            SystemKind::S4 => step_s4(c, p)?,
            SystemKind::S5je => {
                let g = self.graph.as_ref().expect("hysteresis graph initialised");
                let out = step_s5je(c, g, p)?;
                self.graph = out.graph.clone();
                out
            }
            SystemKind::S5 => step_s5(c, p, S5Mode::Euler)?,
            SystemKind::S6 => step_s6(c, p)?,
            SystemKind::S7 => step_s7(c, p, false)?,
            SystemKind::S7Proportional => step_s7(c, p, true)?,
            SystemKind::S8 { variant } => return step_s8(c, p, mask, self.seed, *variant),
            SystemKind::Laplacian { matrix, mode } => step_laplacian(c, matrix, p.sigma, *mode, p.dt)?,
            SystemKind::PotentialAlpha { alpha } => {
                let g = self.graph(c)?;
                step_potential_alpha(c, &g, p, *alpha)?
            }
        };
        apply_activation(c, out, mask)
    }
}

/// Sum over `others` of `f(p_i - p_j)` for every agent, pairwise and symmetric.
pub(crate) fn pair_sum<F>(c: &Constellation, g: Option<&VisibilityGraph>, f: F) -> Vec<Point2>
where
    F: Fn(Point2) -> Point2,
{
    let p = c.positions();
    let n = p.len();
    let mut acc = vec![Point2::ZERO; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if g.is_some_and(|g| !g.has_edge(i, j)) {
                continue;
            }
            let v = f(p[i] - p[j]);
            acc[i] += v;
            acc[j] -= v;
        }
    }
    acc
}
