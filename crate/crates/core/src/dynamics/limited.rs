use serde::{Deserialize, Serialize};

use super::bearing::snap_clusters;
use super::{pair_sum, AgentStep, StepOutcome};
use crate::error::{GatherError, Result};
use crate::geometry::{allowable_region, limit_ij, min_enclosing_circle, sample_uniform, wedge_of, Wedge};
use crate::model::{Constellation, Point2, SystemParams, TOL_GEOM};
use crate::scheduler::{derive_rng, stream};
use crate::visibility::{build_visibility, GraphMode, VisibilityGraph};

fn vdisk(c: &Constellation, params: &SystemParams) -> Result<VisibilityGraph> {
    build_visibility(c, params, GraphMode::VDisk, None)
}

fn wedge_over(c: &Constellation, i: usize, nbrs: &[usize]) -> Option<Wedge> {
    let targets: Vec<Point2> = nbrs.iter().map(|&j| c.get(j)).collect();
    wedge_of(c.get(i), &targets).ok()
}

/// Shorten an Euler displacement so it ends inside the allowable region of `nbrs`.
fn cap_to_region(
    c: &Constellation,
    i: usize,
    nbrs: &[usize],
    params: &SystemParams,
    disp: Point2,
) -> Point2 {
    let Some(dir) = disp.normalized() else {
        return disp;
    };
    let mut g = VisibilityGraph::empty(c.len(), GraphMode::Fixed);
    for &j in nbrs {
        g.set_edge(i, j);
    }
    let region = allowable_region(i, c, &g, params, params.visibility / 2.0);
    let chord = region.chord_along(dir);
    if disp.norm() > chord {
        dir * chord
    } else {
        disp
    }
}

/// Euler step of `p_i' = -sigma * sum_{j in N_i} w(l_ij) (p_i - p_j)` with
/// `w(l) = (2V - l) / (V - l)^2`, followed by the hysteresis update of `g`.
pub fn step_s5je(c: &Constellation, g: &VisibilityGraph, params: &SystemParams) -> Result<StepOutcome> {
    let v = params.visibility;
    if g.len() != c.len() {
        return Err(GatherError::Dimension {
            expected: c.len(),
            actual: g.len(),
        });
    }
    for (i, j) in g.edges() {
        let l = c.get(i).dist(c.get(j));
        if l >= v - TOL_GEOM {
            return Err(GatherError::Blowup(format!(
                "edge ({i}, {j}) reached length {l} against V = {v} at step {}; reduce dt",
                c.step
            )));
        }
    }
    let forces = pair_sum(c, Some(g), |d| {
        let l = d.norm();
        d * ((2.0 * v - l) / ((v - l) * (v - l)))
    });
    let k = params.dt * params.sigma;
    let steps = forces.into_iter().map(|f| AgentStep::moved(f * -k)).collect();
    let mut out = StepOutcome::from_steps(c, steps, params.dt)?;
    out.graph = Some(g.hysteresis_update(&out.next, params)?);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum S5Mode {
    /// Advance by one Euler step of length `dt`.
    #[default]
    Euler,
    /// Report velocities in `AgentStep::step` and leave positions unchanged.
    Query,
}

/// Band rule: agents with no neighbor in `[V - delta, V)` follow the linear
/// flow over their neighbors; otherwise they move along `sigma (u_R + u_L)` of
/// the band wedge, or hold when that wedge spans half a turn.
pub fn step_s5(c: &Constellation, params: &SystemParams, mode: S5Mode) -> Result<StepOutcome> {
    let g = vdisk(c, params)?;
    let v = params.visibility;
    let p = c.positions();
    let mut agents = Vec::with_capacity(c.len());
    for i in 0..c.len() {
        let nbrs: Vec<usize> = g.neighbors(i).collect();
        let band: Vec<usize> = nbrs
            .iter()
            .copied()
            .filter(|&j| p[i].dist(p[j]) >= v - params.delta)
            .collect();
        let mut a = AgentStep {
            active: true,
            ..Default::default()
        };
        let velocity = if band.is_empty() {
            nbrs.iter().fold(Point2::ZERO, |acc, &j| acc + (p[j] - p[i])) * params.sigma
        } else {
            match wedge_over(c, i, &band) {
                Some(w) => {
                    a.wedge_angle = Some(w.angle);
                    if w.is_locked() {
                        a.locked = true;
                        Point2::ZERO
                    } else {
                        w.direction_sum() * params.sigma
                    }
                }
                None => Point2::ZERO,
            }
        };
        a.step = match mode {
            S5Mode::Query => velocity,
            S5Mode::Euler if band.is_empty() => velocity * params.dt,
            S5Mode::Euler => cap_to_region(c, i, &band, params, velocity * params.dt),
        };
        a.step_len = Some(a.step.norm());
        agents.push(a);
    }
    match mode {
        S5Mode::Euler => StepOutcome::from_steps(c, agents, params.dt),
        S5Mode::Query => Ok(StepOutcome {
            next: c.clone(),
            agents,
            merges: 0,
            graph: None,
        }),
    }
}

/// Enclosing-circle rule: each agent moves toward the center of the smallest
/// circle holding itself and its neighbors, by `min(sigma, Goal, Limit)`.
pub fn step_s6(c: &Constellation, params: &SystemParams) -> Result<StepOutcome> {
    let g = vdisk(c, params)?;
    let v = params.visibility;
    let mut agents = Vec::with_capacity(c.len());
    for i in 0..c.len() {
        let pi = c.get(i);
        let mut pts = vec![pi];
        pts.extend(g.neighbors(i).map(|j| c.get(j)));
        let center = min_enclosing_circle(&pts)?.center;
        let goal = pi.dist(center);
        let mut a = AgentStep {
            active: true,
            goal: Some(goal),
            ..Default::default()
        };
        if let Some(dir) = (center - pi).normalized() {
            let mut limit = f64::INFINITY;
            for j in g.neighbors(i) {
                limit = limit.min(limit_ij(pi, c.get(j), dir, v)?);
            }
            let len = params.sigma.min(goal).min(limit);
            a.limit = Some(limit);
            a.step_len = Some(len);
            a.step = dir * len;
        } else {
            a.step_len = Some(0.0);
        }
        agents.push(a);
    }
    StepOutcome::from_steps(c, agents, 1.0)
}

/// Bisector rule: an agent whose neighbors fit in a wedge narrower than half a
/// turn moves at speed `sigma` along the wedge bisector, or with velocity
/// `sigma (p_R + p_L - 2 p_i)` when `proportional`. Displacements stay inside
/// the allowable region; unit-speed agents whose paths meet are merged.
pub fn step_s7(c: &Constellation, params: &SystemParams, proportional: bool) -> Result<StepOutcome> {
    let g = vdisk(c, params)?;
    let p = c.positions();
    let mut agents = Vec::with_capacity(c.len());
    for i in 0..c.len() {
        let nbrs: Vec<usize> = g.neighbors(i).collect();
        let mut a = AgentStep {
            active: true,
            ..Default::default()
        };
        if let Some(w) = wedge_over(c, i, &nbrs) {
            a.wedge_angle = Some(w.angle);
            if w.is_locked() {
                a.locked = true;
            } else {
                let velocity = if proportional {
                    let (r, l) = (p[nbrs[w.right_target]], p[nbrs[w.left_target]]);
                    (r + l - p[i] * 2.0) * params.sigma
                } else {
                    w.bisector().unwrap_or(Point2::ZERO) * params.sigma
                };
                a.step = cap_to_region(c, i, &nbrs, params, velocity * params.dt);
            }
        }
        agents.push(a);
    }
    let mut out = StepOutcome::from_steps(c, agents, params.dt)?;
    if !proportional {
        let mut q = out.next.positions().to_vec();
        out.merges = snap_clusters(p, &mut q, params.sigma * params.dt);
        for (i, a) in out.agents.iter_mut().enumerate() {
            a.step = q[i] - p[i];
        }
        out.next = Constellation::at(q, out.next.step, out.next.time)?;
    }
    for a in &mut out.agents {
        a.step_len = Some(a.step.norm());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum S8Variant {
    /// Jump to a uniform point of the allowable region.
    #[default]
    Randomized,
    /// Jump `min(sigma, chord)` along the wedge bisector.
    Bisector,
}

/// Discrete allowable-region rule. Inactive, isolated or locked agents hold.
///
/// Agent `i` at step `k` draws from its own stream of `seed`, so results do
/// not depend on evaluation order.
pub fn step_s8(
    c: &Constellation,
    params: &SystemParams,
    activation: &[bool],
    seed: u64,
    variant: S8Variant,
) -> Result<StepOutcome> {
    if activation.len() != c.len() {
        return Err(GatherError::Dimension {
            expected: c.len(),
            actual: activation.len(),
        });
    }
    let g = vdisk(c, params)?;
    let mu = (params.visibility / 2.0).min(params.sigma);
    let mut agents = Vec::with_capacity(c.len());
    for (i, &active) in activation.iter().enumerate() {
        let nbrs: Vec<usize> = g.neighbors(i).collect();
        let mut a = AgentStep {
            active,
            ..Default::default()
        };
        let wedge = wedge_over(c, i, &nbrs);
        if let Some(w) = wedge {
            a.wedge_angle = Some(w.angle);
            a.locked = w.is_locked();
        }
        if active && !a.locked {
            if let Some(w) = wedge {
                let region = allowable_region(i, c, &g, params, mu);
                a.step = match variant {
                    S8Variant::Randomized => {
                        let mut rng = derive_rng(seed, stream::MOTION, c.step, i as u64);
                        sample_uniform(&region, &mut rng).point - c.get(i)
                    }
                    S8Variant::Bisector => {
                        let dir = w.bisector().unwrap_or(Point2::ZERO);
                        let chord = region.chord_along(dir);
                        a.limit = Some(chord);
                        dir * params.sigma.min(chord)
                    }
                };
            }
        }
        a.step_len = Some(a.step.norm());
        agents.push(a);
    }
    StepOutcome::from_steps(c, agents, 1.0)
}
