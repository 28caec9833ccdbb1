//! Landau-level fillings: a completely filled lowest level, then the centre of a
//! trapped anyon cloud.
//!
//! Usage: cargo run --release --example husimi_filling -- [N] [alpha]

use std::error::Error;
use std::f64::consts::PI;

use anyon_hartree::analytic::{theoretical_ll_fillings, MtfModel};
use anyon_hartree::gauge::default_reference_width;
use anyon_hartree::grid::{size_grid, Grid, DEFAULT_MAX_POINTS};
use anyon_hartree::hartree::{initialize_orbitals, minimize, HartreeProblem, InitMode, SolverParams};
use anyon_hartree::io::husimi_params;
use anyon_hartree::observables::{husimi_ll_filling, landau_states, HusimiParams};

fn main() -> Result<(), Box<dyn Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(12), |s| s.parse())?;
    let alpha: f64 = args.get(1).map_or(Ok(0.75), |s| s.parse())?;

    let (field, width) = (4.0, 1.5);
    let grid = Grid::new(16.0, 96)?;
    let full = landau_states(&grid, field, 60)?;
    let bound = field / (2.0 * PI);
    let params = HusimiParams { width, field, center: [0.0, 0.0], max_level: 2, reference_density: bound };
    let result = husimi_ll_filling(&full, &params)?;
    let b_eps2 = field * width * width;
    println!("filled lowest level, B eps^2 = {b_eps2}:");
    for f in &result.fillings {
        println!("  n = {}: m / (B/2pi) = {:.5}", f.level, f.normalized);
    }
    println!("  expected for n = 0: {:.5}", b_eps2 / (b_eps2 + 1.0));

    let sizing = size_grid(n, alpha, 2.0, 3.0, 6.0, DEFAULT_MAX_POINTS)?;
    let problem = HartreeProblem::power_trap(&sizing.grid, 2.0, alpha, n, default_reference_width(sizing.support_radius))?;
    let start = initialize_orbitals(&problem, InitMode::Linear, 0)?;
    let solved = minimize(&problem, start, &SolverParams::default(), |_, _| Ok(()))?;
    let model = MtfModel::new(n as f64, alpha, 2.0)?;
    let params = husimi_params(&model, None, None, [0.0, 0.0])?;
    let result = husimi_ll_filling(&solved.orbitals, &params)?;
    let theory = theoretical_ll_fillings(alpha, params.max_level)?;
    println!("N = {n}, alpha = {alpha} at the centre (width {:.3}, B = {:.3}):", params.width, params.field);
    for (f, t) in result.fillings.iter().zip(&theory) {
        println!("  n = {}: m / rho_mTF = {:.4}   mTF filling {:.4}", f.level, f.normalized, t);
    }
    println!("  level sum {:.4} of completeness {:.4}", result.level_sum(), result.completeness);
    Ok(())
}
