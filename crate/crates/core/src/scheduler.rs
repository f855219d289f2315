//! Activation policies and seed derivation.
//!
//! All randomness in a run comes from one master seed. Each consumer asks for a
//! stream keyed by `(purpose, step, agent)`, so the draws for one agent at one
//! step never depend on how many draws anyone else made.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GatherError, Result};

/// Stream purpose tags.
pub mod stream {
    pub const ACTIVATION: u64 = 1;
    pub const MOTION: u64 = 2;
    pub const INITIAL: u64 = 3;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for `(master, purpose, step, agent)`.
pub fn derive_rng(master: u64, purpose: u64, step: u64, agent: u64) -> ChaCha8Rng {
    let mut h = splitmix64(master);
    for word in [purpose, step, agent] {
        h = splitmix64(h ^ word);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(h);
    rng.set_stream(purpose);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScheduleKind {
    Synchronous,
    Bernoulli { rho: f64 },
    Scripted { masks: Vec<Vec<bool>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    #[serde(flatten)]
    pub kind: ScheduleKind,
    #[serde(default)]
    pub seed: u64,
}

impl Schedule {
    pub fn synchronous() -> Self {
        Schedule {
            kind: ScheduleKind::Synchronous,
            seed: 0,
        }
    }

    pub fn bernoulli(rho: f64, seed: u64) -> Self {
        Schedule {
            kind: ScheduleKind::Bernoulli { rho },
            seed,
        }
    }

    pub fn scripted(masks: Vec<Vec<bool>>) -> Self {
        Schedule {
            kind: ScheduleKind::Scripted { masks },
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn is_synchronous(&self) -> bool {
        matches!(self.kind, ScheduleKind::Synchronous)
            || matches!(self.kind, ScheduleKind::Bernoulli { rho } if rho >= 1.0)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match &self.kind {
            ScheduleKind::Synchronous => Ok(()),
            ScheduleKind::Bernoulli { rho } => {
                if *rho > 0.0 && *rho <= 1.0 {
                    Ok(())
                } else {
                    Err(GatherError::param("schedule.rho", "must lie in (0, 1]"))
                }
            }
            ScheduleKind::Scripted { masks } => {
                if masks.is_empty() {
                    return Err(GatherError::param("schedule.masks", "needs at least one mask"));
                }
                match masks.iter().position(|m| m.len() != n) {
                    Some(k) => Err(GatherError::param(
                        "schedule.masks",
                        format!("mask {k} has length {}, expected {n}", masks[k].len()),
                    )),
                    None => Ok(()),
                }
            }
        }
    }

    /// Which agents act at step `k`.
    pub fn activation_mask(&self, k: u64, n: usize) -> Result<Vec<bool>> {
        activation_mask(self, k, n)
    }

    pub fn delta_lower_bound(&self, n: usize) -> Result<f64> {
        delta_lower_bound(self, n)
    }
}

/// Synchronous: all true. Bernoulli: independent draws with `P(true) = rho`.
/// Scripted: mask `k mod len`.
pub fn activation_mask(s: &Schedule, k: u64, n: usize) -> Result<Vec<bool>> {
    match &s.kind {
        ScheduleKind::Synchronous => Ok(vec![true; n]),
        ScheduleKind::Bernoulli { rho } => {
            s.validate(n)?;
            let mut rng = derive_rng(s.seed, stream::ACTIVATION, k, 0);
            Ok((0..n).map(|_| rng.random::<f64>() < *rho).collect())
        }
        ScheduleKind::Scripted { masks } => {
            s.validate(n)?;
            Ok(masks[(k % masks.len() as u64) as usize].clone())
        }
    }
}

/// Smallest probability that any fixed subset is exactly the active set:
/// `min(rho, 1 - rho)^n`. Zero when `rho = 1` (strong asynchronicity fails).
pub fn delta_lower_bound(s: &Schedule, n: usize) -> Result<f64> {
    match s.kind {
        ScheduleKind::Bernoulli { rho } => {
            s.validate(n)?;
            Ok(rho.min(1.0 - rho).powi(n as i32))
        }
        _ => Err(GatherError::Config(
            "delta lower bound is defined for Bernoulli schedules only".into(),
        )),
    }
}
