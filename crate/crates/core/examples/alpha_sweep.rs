//! Energy across the statistics parameter through the configuration-driven sweep
//! driver, writing its tables to a directory.
//!
//! Usage: cargo run --release --example alpha_sweep -- [output_dir]

use std::error::Error;

use anyon_hartree::io::{parse_config_with, run_sweep};

const CONFIG: &str = r#"
particles = 6
alpha = [0.1, 0.3, 0.5, 0.7, 0.75, 0.8, 0.9]
exponent = 2
seed = 1
checkpoint_every = 0

[observables]
momentum_points = 60
radial_points = 60
"#;

fn main() -> Result<(), Box<dyn Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "sweep_out".into());
    let config = parse_config_with(CONFIG, &[("output_dir".into(), format!("{out:?}"))])?;
    let report = run_sweep(&config)?;
    println!("{:>6} {:>12} {:>12} {:>6}", "alpha", "E/N^2", "mTF", "iter");
    for p in &report.points {
        match &p.report {
            Some(r) => println!("{:>6} {:>12.6} {:>12.6} {:>6}", p.alpha, r.energy_over_n2, p.mtf_energy_over_n2, r.iterations),
            None => println!("{:>6} failed: {}", p.alpha, p.error.as_deref().unwrap_or("")),
        }
    }
    println!("table: {}", report.csv.display());
    Ok(())
}
