//! Box and resolution chosen from the mTF profile for a few particle numbers.
//!
//! Usage: cargo run --release --example grid_sizing -- [alpha] [q_x] [q_p]

use std::error::Error;

use anyon_hartree::grid::{size_grid, DEFAULT_MAX_POINTS};

fn main() -> Result<(), Box<dyn Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let alpha = args.first().copied().unwrap_or(0.75);
    let q_x = args.get(1).copied().unwrap_or(2.0);
    let q_p = args.get(2).copied().unwrap_or(6.0);
    println!("{:>5} {:>9} {:>9} {:>9} {:>6}", "N", "R", "W_p", "L", "M");
    for n in [4, 8, 16, 25, 50, 100] {
        match size_grid(n, alpha, 2.0, q_x, q_p, DEFAULT_MAX_POINTS) {
            Ok(s) => println!(
                "{n:>5} {:>9.4} {:>9.4} {:>9.4} {:>6}",
                s.support_radius,
                s.momentum_width,
                s.grid.box_length(),
                s.grid.points()
            ),
            Err(e) => println!("{n:>5} {e}"),
        }
    }
    Ok(())
}
