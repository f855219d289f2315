use super::{pair_sum, AgentStep, StepOutcome};
use crate::error::{GatherError, Result};
use crate::model::{Constellation, SystemParams};

/// One Euler step of `p_i' = -sigma * sum_j (p_i - p_j)` over all agents.
pub fn step_s1(c: &Constellation, params: &SystemParams) -> Result<StepOutcome> {
    let n = c.len() as f64;
    let guard = params.dt * params.sigma * n;
    if guard >= 1.0 {
        return Err(GatherError::Config(format!(
            "unstable step: dt*sigma*n = {guard} must stay below 1"
        )));
    }
    let k = params.dt * params.sigma;
    let forces = pair_sum(c, None, |d| d);
    let steps = forces.into_iter().map(|f| AgentStep::moved(f * -k)).collect();
    StepOutcome::from_steps(c, steps, params.dt)
}

/// Exact solution of the linear flow at time `t`: `p_bar + (p_i(0) - p_bar) e^{-sigma n t}`.
pub fn closed_form_s1(c0: &Constellation, params: &SystemParams, t: f64) -> Result<Constellation> {
    let bar = c0.centroid();
    let decay = (-params.sigma * c0.len() as f64 * t).exp();
    let pos = c0.positions().iter().map(|&p| bar + (p - bar) * decay).collect();
    Constellation::at(pos, c0.step, c0.time + t)
}

/// Discrete jump `p_i <- p_i - s * sum_j (p_i - p_j)` with `s = sigma` or `sigma / n`.
pub fn step_s2(c: &Constellation, params: &SystemParams, scaled: bool) -> Result<StepOutcome> {
    let s = if scaled {
        params.sigma / c.len() as f64
    } else {
        params.sigma
    };
    let forces = pair_sum(c, None, |d| d);
    let steps = forces.into_iter().map(|f| AgentStep::moved(f * -s)).collect();
    StepOutcome::from_steps(c, steps, 1.0)
}
