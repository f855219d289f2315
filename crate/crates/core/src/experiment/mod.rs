//! Config-driven runs: build the system and schedule, step, monitor, emit.

mod config;
mod emit;
mod run;
mod sweep;

pub use config::{
    build_initial, find_preset, Check, ExperimentConfig, InitialSpec, Outputs, Preset, StopCondition,
    DEFAULT_REACH, PRESETS, SPEC_VERSION,
};
pub use emit::{
    emit, fmt_f64, read_metrics, read_trajectory, write_metrics, write_trajectory, EmittedFiles, RunSummary,
    TRAJECTORY_HEADER,
};
pub use run::{run_experiment, ExitStatus, Frame, RunResult, TrajectoryRecord, CENTROID_TOL};
pub use sweep::{expand_grid, sweep, write_sweep_csv, Grid, SweepConfig, SweepRow};
