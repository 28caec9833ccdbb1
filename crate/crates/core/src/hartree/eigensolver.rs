//! Block preconditioned conjugate-gradient (LOBPCG) for the lowest eigenpairs of
//! `-Laplacian + N V`, plus orbital initialization.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::energy::HartreeProblem;
use super::orbitals::{combine, overlap, OrbitalSet};
use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Clone, Copy, Debug)]
pub struct EigenOptions {
    /// Converged when `||H x - theta x|| <= tolerance * max(1, |theta|)` for every wanted pair.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Extra block columns beyond the wanted count; `None` picks a size that covers a
    /// partially filled oscillator shell.
    pub extra: Option<usize>,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { tolerance: 1e-9, max_iterations: 1000, extra: None }
    }
}

#[derive(Clone, Debug)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, vector-major.
    pub vectors: Vec<Complex64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Lowest `count` eigenpairs of the linear operator `-Laplacian + N V` of `problem`.
pub fn lowest_eigenpairs(problem: &HartreeProblem, count: usize, options: EigenOptions) -> Result<Eigenpairs> {
    let grid = problem.grid();
    if count == 0 || count >= grid.len() {
        return Err(Error::InvalidInput(format!("cannot compute {count} eigenpairs")));
    }
    let extra = options
        .extra
        .unwrap_or_else(|| ((2.0 * count as f64).sqrt().ceil() as usize + 2).max(4));
    let block = (count + extra).min(grid.len() - 1);
    let width = problem.gauge().width() / ((2.0 * count as f64).sqrt() + 1.0).sqrt();
    let initial = polynomial_block(grid, block, width);
    lobpcg(problem, initial, block, count, options)
}

/// `z^a conj(z)^b exp(-|x|^2 / (2 w^2))`, ordered by total degree.
fn polynomial_block(grid: &Grid, block: usize, width: f64) -> Vec<Complex64> {
    let mut exponents = Vec::with_capacity(block);
    'outer: for degree in 0.. {
        for a in 0..=degree {
            exponents.push((a, degree - a));
            if exponents.len() == block {
                break 'outer;
            }
        }
    }
    let mut data = Vec::with_capacity(block * grid.len());
    for &(a, b) in &exponents {
        for idx in 0..grid.len() {
            let [x, y] = grid.position(idx);
            let z = Complex64::new(x / width, y / width);
            let env = (-(x * x + y * y) / (2.0 * width * width)).exp();
            data.push(z.powu(a) * z.conj().powu(b) * env);
        }
    }
    data
}

fn apply_block(problem: &HartreeProblem, x: &[Complex64]) -> Vec<Complex64> {
    let n = problem.grid().len();
    let blocks: Vec<Vec<Complex64>> = x.par_chunks(n).map(|u| problem.apply_linear(u)).collect();
    blocks.concat()
}

fn hermitian_eigen(m: DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = nalgebra::linalg::SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Maps a block to an orthonormal basis of its span, dropping numerically dependent
/// directions. Returns the transformation `T` with `basis = block * T`.
fn orthonormal_transform(grid: &Grid, cols: usize, block: &[Complex64]) -> Result<DMatrix<Complex64>> {
    let gram = overlap(grid, cols, block, block);
    let (values, vectors) = hermitian_eigen(gram);
    let max = values.last().copied().unwrap_or(0.0);
    if !(max > 0.0) {
        return Err(Error::RankDeficient);
    }
    let keep: Vec<usize> = (0..values.len()).filter(|&i| values[i] > 1e-12 * max).collect();
    Ok(DMatrix::from_fn(cols, keep.len(), |r, c| {
        vectors[(r, keep[c])] / values[keep[c]].sqrt()
    }))
}

fn normalize_columns(grid: &Grid, block: &mut [Complex64]) {
    let n = grid.len();
    let h2 = grid.cell_area();
    block.par_chunks_mut(n).for_each(|col| {
        let norm = (col.iter().map(|z| z.norm_sqr()).sum::<f64>() * h2).sqrt();
        if norm > 0.0 {
            col.iter_mut().for_each(|z| *z /= norm);
        }
    });
}

/// `v -= Q (Q^H v)` for an orthonormal block `Q`.
fn remove_span(grid: &Grid, q: &[Complex64], v: &mut [Complex64]) {
    let n = grid.len();
    if q.is_empty() || v.is_empty() {
        return;
    }
    let c = overlap(grid, q.len() / n, q, v);
    let proj = combine(n, q, &c);
    v.iter_mut().zip(&proj).for_each(|(a, b)| *a -= b);
}

/// Orthonormal basis of the part of `v` orthogonal to `q`; may have fewer columns.
fn orthonormal_complement(grid: &Grid, q: &[Complex64], mut v: Vec<Complex64>) -> Vec<Complex64> {
    let n = grid.len();
    normalize_columns(grid, &mut v);
    for _ in 0..2 {
        remove_span(grid, q, &mut v);
        let cols = v.len() / n;
        if cols == 0 {
            break;
        }
        match orthonormal_transform(grid, cols, &v) {
            Ok(t) => v = combine(n, &v, &t),
            Err(_) => return Vec::new(),
        }
    }
    v
}

fn lobpcg(
    problem: &HartreeProblem,
    initial: Vec<Complex64>,
    block: usize,
    wanted: usize,
    options: EigenOptions,
) -> Result<Eigenpairs> {
    let grid = problem.grid();
    let n = grid.len();
    let h2 = grid.cell_area();
    let k2 = grid.k_squared();

    let x0 = orthonormal_complement(grid, &[], initial);
    if x0.len() / n < block {
        return Err(Error::RankDeficient);
    }
    let hx0 = apply_block(problem, &x0);
    let (mut theta, c) = hermitian_eigen(overlap(grid, block, &x0, &hx0));
    let mut x = combine(n, &x0, &c);
    let mut hx = apply_block(problem, &x);
    let mut p: Vec<Complex64> = Vec::new();
    let mut residual = f64::INFINITY;

    for iteration in 0..options.max_iterations {
        let mut r: Vec<Complex64> = hx.clone();
        for j in 0..block {
            for i in 0..n {
                r[j * n + i] -= x[j * n + i] * theta[j];
            }
        }
        residual = (0..wanted)
            .map(|j| {
                let norm = (r[j * n..(j + 1) * n].iter().map(|z| z.norm_sqr()).sum::<f64>() * h2).sqrt();
                norm / theta[j].abs().max(1.0)
            })
            .fold(0.0f64, f64::max);
        if residual <= options.tolerance {
            let values = theta[..wanted].to_vec();
            x.truncate(wanted * n);
            return Ok(Eigenpairs { values, vectors: x, iterations: iteration, residual });
        }

        let mut w = r;
        w.par_chunks_mut(n).enumerate().for_each(|(j, col)| {
            let shift = theta[j].abs().max(1.0);
            grid.fft(col);
            for (z, k) in col.iter_mut().zip(&k2) {
                *z /= k + shift;
            }
            grid.ifft(col);
        });
        let w = orthonormal_complement(grid, &x, w);
        let mut xw = x.clone();
        xw.extend_from_slice(&w);
        let p_basis = orthonormal_complement(grid, &xw, std::mem::take(&mut p));

        let mut basis = xw;
        basis.extend_from_slice(&p_basis);
        let cols = basis.len() / n;
        let mut hbasis = hx.clone();
        hbasis.extend_from_slice(&apply_block(problem, &w));
        hbasis.extend_from_slice(&apply_block(problem, &p_basis));

        let (values, vecs) = hermitian_eigen(overlap(grid, cols, &basis, &hbasis));
        let c = vecs.columns(0, block).into_owned();
        x = combine(n, &basis, &c);
        // New search direction: the non-X part of the update.
        let mut c_dir = c;
        c_dir.rows_mut(0, block).fill(Complex64::default());
        p = if cols > block { combine(n, &basis, &c_dir) } else { Vec::new() };
        theta = values[..block].to_vec();
        hx = apply_block(problem, &x);
    }
    Err(Error::EigensolverNotConverged { iterations: options.max_iterations, residual })
}

/// Residual tolerance for starting orbitals; the minimizer does the rest.
const INIT_TOLERANCE: f64 = 1e-5;

/// How the minimizer's starting orbitals are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitMode {
    /// Lowest eigenstates of `-Laplacian + N V`.
    Linear,
    /// Seeded complex noise under a Gaussian envelope.
    Random,
}

pub fn initialize_orbitals(problem: &HartreeProblem, mode: InitMode, seed: u64) -> Result<OrbitalSet> {
    let grid = problem.grid();
    let count = problem.particles();
    match mode {
        InitMode::Linear => {
            let options = EigenOptions { tolerance: INIT_TOLERANCE, ..EigenOptions::default() };
            let pairs = lowest_eigenpairs(problem, count, options)?;
            OrbitalSet::orthonormalized(grid, count, pairs.vectors)
        }
        InitMode::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let width = problem.gauge().width() * 2.0;
            let mut data = Vec::with_capacity(count * grid.len());
            for _ in 0..count {
                for idx in 0..grid.len() {
                    let [x, y] = grid.position(idx);
                    let env = (-(x * x + y * y) / (width * width)).exp();
                    let amp: f64 = rng.gen::<f64>();
                    let phase: f64 = rng.gen::<f64>() * 2.0 * PI;
                    data.push(Complex64::from_polar(amp * env, phase));
                }
            }
            OrbitalSet::orthonormalized(grid, count, data)
        }
    }
}
