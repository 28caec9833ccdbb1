//! Free fermions (`alpha = 0`) in a harmonic trap: the minimizer, the block
//! eigensolver and the oscillator shell sum agree.
//!
//! Usage: cargo run --release --example oscillator_shells -- [N]

use std::error::Error;

use anyon_hartree::gauge::default_reference_width;
use anyon_hartree::grid::{size_grid, DEFAULT_MAX_POINTS};
use anyon_hartree::hartree::{
    initialize_orbitals, lowest_eigenpairs, minimize, EigenOptions, HartreeProblem, InitMode, SolverParams,
};

fn main() -> Result<(), Box<dyn Error>> {
    let n: usize = std::env::args().nth(1).map_or(Ok(6), |s| s.parse())?;
    let sizing = size_grid(n, 0.0, 2.0, 2.0, 6.0, DEFAULT_MAX_POINTS)?;
    let problem = HartreeProblem::power_trap(&sizing.grid, 2.0, 0.0, n, default_reference_width(sizing.support_radius))?;

    let pairs = lowest_eigenpairs(&problem, n, EigenOptions::default())?;
    println!("eigenvalues of -Laplacian + N|x|^2: {:.6?}", pairs.values);

    // shell k holds k states at 2 sqrt(N) k
    let mut shell_sum = 0.0;
    let (mut left, mut k) = (n, 1);
    while left > 0 {
        let take = left.min(k);
        shell_sum += (take * k) as f64;
        left -= take;
        k += 1;
    }
    let start = initialize_orbitals(&problem, InitMode::Random, 1)?;
    let solved = minimize(&problem, start, &SolverParams::default(), |_, _| Ok(()))?;
    println!("minimized energy   {:.8} ({:?}, {} iterations)", solved.energy.total, solved.termination, solved.iterations);
    println!("eigenvalue sum     {:.8}", pairs.values.iter().sum::<f64>());
    println!("shell sum          {:.8}", 2.0 * (n as f64).sqrt() * shell_sum);
    Ok(())
}
