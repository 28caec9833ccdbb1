use nalgebra::{DMatrix, DMatrixView};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField};

/// `N` complex orbitals on a grid, stored orbital-major (`N * M^2` values).
///
/// The inner product is the `h^2`-weighted sum `<u, v> = h^2 sum_x conj(u) v`.
#[derive(Clone, Debug)]
pub struct OrbitalSet {
    grid: Grid,
    count: usize,
    data: Vec<Complex64>,
}

impl OrbitalSet {
    /// Wraps raw values without orthonormalizing them.
    pub fn from_raw(grid: &Grid, count: usize, data: Vec<Complex64>) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidInput("an orbital set needs at least one orbital".into()));
        }
        if data.len() != count * grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for {count} orbitals on {} points",
                data.len(),
                grid.len()
            )));
        }
        Ok(Self { grid: grid.clone(), count, data })
    }

    /// Orthonormalizes `data` (QR with positive real diagonal, computed as two
    /// Cholesky-QR passes).
    pub fn orthonormalized(grid: &Grid, count: usize, data: Vec<Complex64>) -> Result<Self> {
        let mut set = Self::from_raw(grid, count, data)?;
        for _ in 0..2 {
            set.data = cholesky_qr(&set.grid, count, &set.data)?;
        }
        Ok(set)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn orbital(&self, j: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.data[j * n..(j + 1) * n]
    }

    pub fn orbitals(&self) -> std::slice::Chunks<'_, Complex64> {
        self.data.chunks(self.grid.len())
    }

    pub fn gram(&self) -> DMatrix<Complex64> {
        overlap(&self.grid, self.count, &self.data, &self.data)
    }

    /// `max_ij |<u_i, u_j> - delta_ij|`.
    pub fn gram_deviation(&self) -> f64 {
        let g = self.gram();
        let mut dev = 0.0f64;
        for i in 0..self.count {
            for j in 0..self.count {
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((g[(i, j)] - target).norm());
            }
        }
        dev
    }

    /// `rho(x) = sum_j |u_j(x)|^2`.
    pub fn density(&self) -> ScalarField {
        compute_density(self)
    }
}

pub fn compute_density(orbitals: &OrbitalSet) -> ScalarField {
    let n = orbitals.grid.len();
    let data = &orbitals.data;
    let count = orbitals.count;
    let values = (0..n)
        .into_par_iter()
        .map(|i| (0..count).map(|j| data[j * n + i].norm_sqr()).sum())
        .collect();
    ScalarField { values }
}

fn as_real(data: &[Complex64]) -> &[f64] {
    bytemuck::cast_slice(data)
}

fn times_i(data: &[Complex64]) -> Vec<Complex64> {
    data.iter().map(|z| Complex64::new(-z.im, z.re)).collect()
}

/// `S_ij = <a_i, b_j>` for two blocks of `count` vectors.
///
/// Blocks are viewed as real `2n x cols` matrices (interleaved re/im) so the work runs
/// through real matrix products.
pub(crate) fn overlap(grid: &Grid, count: usize, a: &[Complex64], b: &[Complex64]) -> DMatrix<Complex64> {
    let n = grid.len();
    let h2 = grid.cell_area();
    let cols_b = b.len() / n;
    let ar = DMatrixView::from_slice(as_real(&a[..count * n]), 2 * n, count);
    let br = DMatrixView::from_slice(as_real(b), 2 * n, cols_b);
    let ib = times_i(b);
    let ibr = DMatrixView::from_slice(as_real(&ib), 2 * n, cols_b);
    let re = ar.tr_mul(&br);
    let neg_im = ar.tr_mul(&ibr);
    DMatrix::from_fn(count, cols_b, |i, j| Complex64::new(re[(i, j)], -neg_im[(i, j)]) * h2)
}

/// Block times matrix: column `j` of the result is `sum_i a_i C_ij`.
pub(crate) fn combine(n: usize, a: &[Complex64], coeffs: &DMatrix<Complex64>) -> Vec<Complex64> {
    let rows = coeffs.nrows();
    debug_assert_eq!(a.len(), rows * n);
    let ar = DMatrixView::from_slice(as_real(a), 2 * n, rows);
    let mut out = ar * coeffs.map(|z| z.re);
    let imag = coeffs.map(|z| z.im);
    if imag.iter().any(|&v| v != 0.0) {
        let ia = times_i(a);
        let iar = DMatrixView::from_slice(as_real(&ia), 2 * n, rows);
        out.gemm(1.0, &iar, &imag, 1.0);
    }
    bytemuck::cast_slice(out.as_slice()).to_vec()
}

/// One Cholesky-QR pass: `Q = X R^{-1}` with `X^H X = R^H R`.
pub(crate) fn cholesky_qr(grid: &Grid, count: usize, x: &[Complex64]) -> Result<Vec<Complex64>> {
    let s = overlap(grid, count, x, x);
    let s = (&s + s.adjoint()) * Complex64::new(0.5, 0.0);
    let chol = nalgebra::linalg::Cholesky::new(s).ok_or(Error::RankDeficient)?;
    let l = chol.l();
    let max_diag = (0..count).map(|i| l[(i, i)].re).fold(0.0f64, f64::max);
    let min_diag = (0..count).map(|i| l[(i, i)].re).fold(f64::INFINITY, f64::min);
    if !(min_diag > 1e-10 * max_diag) {
        return Err(Error::RankDeficient);
    }
    let r = l.adjoint();
    let r_inv = r.try_inverse().ok_or(Error::RankDeficient)?;
    Ok(combine(grid.len(), x, &r_inv))
}
