//! Simulation engine for multi-agent gathering in the plane.
//!
//! Agents live in a [`Constellation`]; each system in [`dynamics`] maps one
//! constellation to the next. [`monitors`] turn a trajectory into Lyapunov
//! series and invariant checks, and [`experiment`] wires everything into
//! reproducible runs driven by a JSON config.

pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod model;
pub mod monitors;
pub mod scheduler;
pub mod visibility;

pub use error::{GatherError, Result};
pub use model::{centroid, diameter, max_radius, Constellation, Point2, SystemParams, TOL_GEOM};
pub use scheduler::{activation_mask, delta_lower_bound, Schedule, ScheduleKind};
pub use visibility::{build_visibility, is_connected, GraphMode, VisibilityGraph};
