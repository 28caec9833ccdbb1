//! Momentum density of a Hartree ground state next to the semiclassical mTF
//! prediction, both on the rescaled axis `q = p / sqrt(N)`.
//!
//! Usage: cargo run --release --example momentum_density -- [N] [alpha]

use std::error::Error;

use anyon_hartree::analytic::MtfModel;
use anyon_hartree::gauge::default_reference_width;
use anyon_hartree::grid::{size_grid, DEFAULT_MAX_POINTS};
use anyon_hartree::hartree::{initialize_orbitals, minimize, HartreeProblem, InitMode, SolverParams};
use anyon_hartree::observables::{momentum_density, rescale_momentum_profile, tf_momentum_profile_mc};

fn main() -> Result<(), Box<dyn Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(8), |s| s.parse())?;
    let alpha: f64 = args.get(1).map_or(Ok(0.5), |s| s.parse())?;

    let sizing = size_grid(n, alpha, 2.0, 2.0, 6.0, DEFAULT_MAX_POINTS)?;
    let problem = HartreeProblem::power_trap(&sizing.grid, 2.0, alpha, n, default_reference_width(sizing.support_radius))?;
    let start = initialize_orbitals(&problem, InitMode::Linear, 0)?;
    let solved = minimize(&problem, start, &SolverParams::default(), |_, _| Ok(()))?;

    let t = momentum_density(&solved.orbitals);
    println!("lattice mass {:.12} (N = {n})", t.mass());
    let sqrt_n = (n as f64).sqrt();
    let q: Vec<f64> = (0..=12).map(|i| 0.25 * i as f64).collect();
    let momenta: Vec<f64> = q.iter().map(|q| q * sqrt_n).collect();
    let hartree = rescale_momentum_profile(&t.radial_profile(&momenta)?, n as f64)?;
    let model = MtfModel::new(n as f64, alpha, 2.0)?;
    let mc = rescale_momentum_profile(&tf_momentum_profile_mc(&model, &momenta, 200_000, 7)?, n as f64)?;
    let errors = mc.errors.as_ref().expect("Monte-Carlo errors");

    println!("{:>6} {:>12} {:>12} {:>10}", "q", "Hartree", "mTF (MC)", "stderr");
    for i in 0..q.len() {
        println!("{:>6.2} {:>12.6} {:>12.6} {:>10.2e}", hartree.momenta[i], hartree.values[i], mc.values[i], errors[i]);
    }
    Ok(())
}
