//! Stop a solve early, write a checkpoint, and resume from it.

use std::error::Error;

use anyon_hartree::io::{read_checkpoint, run_solve, RunConfig};

fn main() -> Result<(), Box<dyn Error>> {
    let dir = std::env::temp_dir().join("anyon_checkpoint_example");
    let mut config = RunConfig::new(6, vec![0.5], 2.0);
    config.output_dir = dir.join("partial");
    config.solver.max_iterations = 20;
    let partial = run_solve(&config)?;
    println!("after {} iterations: E/N^2 = {:.10} ({})", partial.iterations, partial.energy_over_n2, partial.termination);

    let checkpoint = partial.files.iter().find(|f| f.extension().is_some_and(|e| e == "anyh")).expect("checkpoint written");
    let state = read_checkpoint(checkpoint)?;
    println!(
        "checkpoint: {} orbitals on {} x {}, Gram deviation {:.1e}",
        state.orbitals.count(),
        state.orbitals.grid().points(),
        state.orbitals.grid().points(),
        state.orbitals.gram_deviation()
    );

    config.output_dir = dir.join("resumed");
    config.solver.max_iterations = 2000;
    config.checkpoint_in = Some(checkpoint.clone());
    let resumed = run_solve(&config)?;
    println!("resumed: E/N^2 = {:.10} after {} more iterations ({})", resumed.energy_over_n2, resumed.iterations, resumed.termination);
    Ok(())
}
