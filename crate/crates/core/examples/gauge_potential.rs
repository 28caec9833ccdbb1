//! Self-generated vector potential of an off-centre density, checked against
//! `curl A = 2 pi rho`.

use std::error::Error;
use std::f64::consts::PI;

use anyon_hartree::gauge::{curl_residual, solve_correction, solve_vector_potential, GaussianReference};
use anyon_hartree::grid::{Grid, ScalarField};

fn main() -> Result<(), Box<dyn Error>> {
    let grid = Grid::new(14.0, 96)?;
    let lumps = [
        GaussianReference { mass: 3.0, width: 1.0, center: [1.0, 0.5] },
        GaussianReference { mass: 1.0, width: 0.5, center: [-1.5, -1.0] },
    ];
    let rho = ScalarField::from_fn(&grid, |x| lumps.iter().map(|g| g.density(x)).sum());
    let reference = GaussianReference::new(rho.integral(&grid), 1.5)?;

    let a = solve_vector_potential(&grid, &rho, &reference)?;
    let correction = solve_correction(&grid, &rho, &reference)?;
    let residual = curl_residual(&grid, &rho, &reference, &correction);
    let worst = residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    println!("mass {:.6}, max |A| = {:.4}", reference.mass, a.max_norm());
    println!("max |curl A - 2 pi rho| / max 2 pi rho = {:.2e}", worst / (2.0 * PI * rho.max_abs()));

    Ok(())
}
