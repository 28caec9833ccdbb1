//! Magnetic Thomas-Fermi constants across the statistics parameter.
//!
//! Usage: cargo run --release --example reference_table -- [exponent]

use std::error::Error;

use anyon_hartree::analytic::{mtf_constant, MtfModel};
use anyon_hartree::io::reference_table;

fn main() -> Result<(), Box<dyn Error>> {
    let exponent: f64 = std::env::args().nth(1).map_or(Ok(2.0), |s| s.parse())?;
    let alphas: Vec<f64> = (0..20).map(|k| k as f64 / 20.0).collect();
    print!("{}", reference_table(&alphas, exponent)?);

    let (best, c) = (0..1000)
        .map(|k| k as f64 / 1000.0)
        .map(|a| (a, mtf_constant(a).unwrap()))
        .fold((0.0, 0.0), |m, x| if x.1 > m.1 { x } else { m });
    println!("# largest c on a 1e-3 grid: c({best}) = {c}");
    let model = MtfModel::new(100.0, best, exponent)?;
    println!("# N = 100 there: radius {:.4}, central field {:.3}", model.radius, model.central_field());
    Ok(())
}
