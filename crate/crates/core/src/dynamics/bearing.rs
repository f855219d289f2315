use super::{pair_sum, AgentStep, StepOutcome};
use crate::error::{GatherError, Result};
use crate::model::{Constellation, Point2, SystemParams, TOL_GEOM};
use crate::visibility::VisibilityGraph;

fn unit(d: Point2) -> Point2 {
    d.normalized().unwrap_or(Point2::ZERO)
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Smallest distance between agents `i` and `j` while both move linearly from
/// `p` to `q` over one step.
fn closest_approach(p: &[Point2], q: &[Point2], i: usize, j: usize) -> f64 {
    let r0 = p[i] - p[j];
    let dr = (q[i] - q[j]) - r0;
    let len2 = dr.norm_sq();
    let s = if len2 > 0.0 {
        (-r0.dot(dr) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (r0 + dr * s).norm()
}

/// Snap every cluster of agents whose paths come within `tol` to the cluster
/// mean of the post-step positions. Returns the number of new contacts.
pub(crate) fn snap_clusters(p: &[Point2], q: &mut [Point2], tol: f64) -> usize {
    let n = p.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut merges = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if closest_approach(p, q, i, j) <= tol {
                if p[i].dist(p[j]) > TOL_GEOM {
                    merges += 1;
                }
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut sum = vec![Point2::ZERO; n];
    let mut count = vec![0usize; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        sum[r] += q[i];
        count[r] += 1;
    }
    for i in 0..n {
        let r = find(&mut parent, i);
        if count[r] > 1 {
            q[i] = sum[r] / count[r] as f64;
        }
    }
    merges
}

/// Euler step of `p_i' = -sigma * sum_j unit(p_i - p_j)`, coincident pairs
/// contributing nothing. Agents whose paths pass within `sigma * dt` of each
/// other are merged and travel together afterwards.
pub fn step_s3(c: &Constellation, params: &SystemParams) -> Result<StepOutcome> {
    let k = params.dt * params.sigma;
    let forces = pair_sum(c, None, unit);
    let p = c.positions();
    let mut q: Vec<Point2> = p.iter().zip(&forces).map(|(&p, &f)| p + f * -k).collect();
    let merges = snap_clusters(p, &mut q, params.sigma * params.dt);
    let steps = p.iter().zip(&q).map(|(&a, &b)| AgentStep::moved(b - a)).collect();
    let mut out = StepOutcome::from_steps(c, steps, params.dt)?;
    out.merges = merges;
    Ok(out)
}

/// Exact jump `p_i <- p_i - sigma * sum_j unit(p_i - p_j)`.
pub fn step_s4(c: &Constellation, params: &SystemParams) -> Result<StepOutcome> {
    let forces = pair_sum(c, None, unit);
    let steps = forces.into_iter().map(|f| AgentStep::moved(f * -params.sigma)).collect();
    StepOutcome::from_steps(c, steps, 1.0)
}

/// Euler step of `p_i' = -sigma * sum_{j in N_i} (p_i - p_j) / |p_i - p_j|^(2 - alpha)`.
pub fn step_potential_alpha(
    c: &Constellation,
    g: &VisibilityGraph,
    params: &SystemParams,
    alpha: f64,
) -> Result<StepOutcome> {
    if !(alpha > 0.0) {
        return Err(GatherError::param("alpha", "must be positive"));
    }
    if g.len() != c.len() {
        return Err(GatherError::Dimension {
            expected: c.len(),
            actual: g.len(),
        });
    }
    let expo = 2.0 - alpha;
    let forces = pair_sum(c, Some(g), |d| {
        let l = d.norm();
        if expo > 0.0 && l <= TOL_GEOM {
            Point2::ZERO
        } else {
            d / l.powf(expo)
        }
    });
    let k = params.dt * params.sigma;
    let steps = forces.into_iter().map(|f| AgentStep::moved(f * -k)).collect();
    StepOutcome::from_steps(c, steps, params.dt)
}
