//! Configuration files, checkpoints, solve and sweep drivers and their tables.

mod checkpoint;
mod config;
mod run;

pub use checkpoint::{decode_checkpoint, encode_checkpoint, read_checkpoint, write_checkpoint, Checkpoint, MAGIC, VERSION as CHECKPOINT_VERSION};
pub use config::{parse_config, parse_config_with, ObservablesConfig, RunConfig, SolverConfig};
pub use run::{
    husimi_csv, husimi_params, momentum_profile_csv, preamble, profile_csv, reference_table, run_directory, run_solve,
    run_sweep, trace_csv, EnergyReport, FillingRow, HusimiReport, RunReport, SweepPoint, SweepReport, SOURCE_HASH,
    SWEEP_CSV, SWEEP_REPORT, VERSION,
};

use crate::error::{Error, Result};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "ANYON_THREADS";

/// Sizes the global worker pool from [`THREADS_ENV`], defaulting to the available
/// parallelism. Returns the thread count in use.
pub fn configure_threads() -> Result<usize> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => n,
            _ => return Err(Error::InvalidInput(format!("{THREADS_ENV} must be a positive integer, got \"{v}\""))),
        },
        Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    // a pool that already exists (e.g. in tests) is kept
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(rayon::current_num_threads())
}
