//! Geometry of orthonormal orbital blocks: tangent projection, retraction and the
//! real metric `Re <., .>`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::orbitals::{cholesky_qr, combine, overlap, OrbitalSet};
use crate::error::{Error, Result};

/// `Re <a, b>` summed over the block, `h^2`-weighted.
pub fn real_inner(cell_area: f64, a: &[Complex64], b: &[Complex64]) -> f64 {
    a.par_chunks(4096)
        .zip(b.par_chunks(4096))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p.re * q.re + p.im * q.im).sum::<f64>())
        .collect::<Vec<_>>()
        .into_iter()
        .sum::<f64>()
        * cell_area
}

pub fn block_norm(cell_area: f64, a: &[Complex64]) -> f64 {
    real_inner(cell_area, a, a).sqrt()
}

/// `G - U herm(U^H G)`: the component of `G` tangent to the orthonormality constraint.
pub fn project_tangent(orbitals: &OrbitalSet, direction: &[Complex64]) -> Result<Vec<Complex64>> {
    let grid = orbitals.grid();
    if direction.len() != orbitals.data().len() {
        return Err(Error::GridMismatch("direction does not match the orbital block".into()));
    }
    let s = overlap(grid, orbitals.count(), orbitals.data(), direction);
    let sym: DMatrix<Complex64> = (&s + s.adjoint()) * Complex64::new(0.5, 0.0);
    let correction = combine(grid.len(), orbitals.data(), &sym);
    Ok(direction.iter().zip(&correction).map(|(g, c)| g - c).collect())
}

/// `qf(U + t xi)`, the orthonormal factor of a QR decomposition with positive diagonal.
/// `t = 0` returns `U` unchanged.
pub fn retract(orbitals: &OrbitalSet, direction: &[Complex64], step: f64) -> Result<OrbitalSet> {
    if direction.len() != orbitals.data().len() {
        return Err(Error::GridMismatch("direction does not match the orbital block".into()));
    }
    if step == 0.0 {
        return Ok(orbitals.clone());
    }
    if !step.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite retraction step {step}")));
    }
    let grid = orbitals.grid();
    let count = orbitals.count();
    let mut x: Vec<Complex64> = orbitals
        .data()
        .iter()
        .zip(direction)
        .map(|(u, d)| u + d * step)
        .collect();
    for _ in 0..2 {
        x = cholesky_qr(grid, count, &x)?;
    }
    OrbitalSet::from_raw(grid, count, x)
}
