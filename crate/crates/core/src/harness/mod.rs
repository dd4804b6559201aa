//! Experiment orchestration: ablation presets, runs with their output files,
//! checkpoints, message logs and γ sweeps.

mod checkpoint;
mod msglog;
mod pool;
mod presets;
mod run;
mod sweep;

pub use checkpoint::{Checkpoint, CHECKPOINT_VERSION};
pub use msglog::{replay, LogHeader, MessageLogReader, MessageLogWriter};
pub use pool::{with_workers, worker_count, WORKERS_ENV};
pub use presets::{preset, preset_names, AblationPreset, Profile, PRESETS};
pub use run::{
    run, write_events_csv, write_fitness_csv, write_outputs, write_stats_csv, FitnessRow, RunOptions, RunSummary,
    Simulation, CHECKPOINT_FILE, CONFIG_FILE, EVENTS_FILE, FAULTS_FILE, FITNESS_FILE, LOG_FILE, RASTER_FILE, REGISTRY_FILE,
    STATS_FILE, SUMMARY_FILE,
};
pub use sweep::{read_sweep_csv, run_cell, sweep, write_sweep_csv, SweepRow, SweepSpec};
