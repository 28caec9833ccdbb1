//! Self-consistent ground state of trapped anyons compared with magnetic Thomas-Fermi.
//!
//! Usage: cargo run --release --example anyon_ground_state -- [N] [alpha] [q_p]

use std::error::Error;
use std::time::Instant;

use anyon_hartree::analytic::MtfModel;
use anyon_hartree::gauge::default_reference_width;
use anyon_hartree::grid::{size_grid, DEFAULT_MAX_POINTS};
use anyon_hartree::hartree::{initialize_orbitals, minimize, HartreeProblem, InitMode, SolverParams};

fn main() -> Result<(), Box<dyn Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let particles: usize = args.first().map_or(Ok(12), |s| s.parse())?;
    let alpha: f64 = args.get(1).map_or(Ok(0.5), |s| s.parse())?;
    let q_p: f64 = args.get(2).map_or(Ok(6.0), |s| s.parse())?;
    let n2 = (particles * particles) as f64;

    let sizing = size_grid(particles, alpha, 2.0, 2.0, q_p, DEFAULT_MAX_POINTS)?;
    let grid = &sizing.grid;
    println!("N = {particles}, alpha = {alpha}: L = {:.4}, M = {}", grid.box_length(), grid.points());
    let problem =
        HartreeProblem::power_trap(grid, 2.0, alpha, particles, default_reference_width(sizing.support_radius))?;
    let start = Instant::now();
    let init = initialize_orbitals(&problem, InitMode::Linear, 0)?;
    println!("linear initialization: {:.2?}", start.elapsed());
    let outcome = minimize(&problem, init, &SolverParams::default(), |_, entry| {
        if entry.iteration % 25 == 0 {
            println!("  iter {:4}  E/N^2 = {:.10}  |g|/N = {:.2e}", entry.iteration, entry.energy / n2, entry.gradient_norm);
        }
        Ok(())
    })?;
    let mtf = MtfModel::new(particles as f64, alpha, 2.0)?;
    println!(
        "{:?} after {} iterations ({:.2?}): E/N^2 = {:.8}, mTF = {:.8}",
        outcome.termination,
        outcome.iterations,
        start.elapsed(),
        outcome.energy.total / n2,
        mtf.energy_per_particle_squared()
    );
    Ok(())
}
