//! Periodic square box discretization.
//!
//! Values live on an `M x M` lattice stored row-major: entry `i * M + j` is the
//! point `x = ((i - M/2) h, (j - M/2) h)` with `h = L / M`, so the box center (the
//! trap center) is the lattice point `(M/2, M/2)`. Raw FFT buffers are kept in the
//! usual FFT order, the signed wavenumber of index `m` being `m` for `m < M/2` and
//! `m - M` otherwise.
//!
//! The physical transform convention is the unitary one,
//! `f^(k) = h^2 / (2 pi) sum_x f(x) e^{-i k.x}`, which approximates the continuum
//! Fourier transform `(2 pi)^{-1} int f e^{-i k.x} dx` and satisfies
//! `sum_x |f|^2 h^2 = sum_k |f^|^2 (2 pi / L)^2`.

mod bessel;
mod sizing;

pub use bessel::bessel_j0;
pub use sizing::{planned_points, size_grid, GridSizing, DEFAULT_MAX_POINTS, MIN_POINTS};

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Square periodic box of side `box_length` sampled with `points` per side.
#[derive(Clone)]
pub struct Grid {
    box_length: f64,
    points: usize,
    forward: Arc<dyn Fft<f64>>,
    backward: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("box_length", &self.box_length)
            .field("points", &self.points)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.box_length == other.box_length
    }
}

impl Grid {
    pub fn new(box_length: f64, points: usize) -> Result<Self> {
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidInput(format!(
                "box length must be positive and finite, got {box_length}"
            )));
        }
        if points < MIN_POINTS || points % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "points per side must be even and at least {MIN_POINTS}, got {points}"
            )));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            box_length,
            points,
            forward: planner.plan_fft_forward(points),
            backward: planner.plan_fft_inverse(points),
        })
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Points per side `M`.
    pub fn points(&self) -> usize {
        self.points
    }

    /// Total number of lattice points, `M^2`.
    pub fn len(&self) -> usize {
        self.points * self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.points as f64
    }

    /// Area element `h^2` of the real-space quadrature.
    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    /// Spacing `2 pi / L` of the momentum lattice.
    pub fn momentum_spacing(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        (i as f64 - (self.points / 2) as f64) * self.spacing()
    }

    pub fn position(&self, index: usize) -> [f64; 2] {
        let m = self.points;
        [self.coordinate(index / m), self.coordinate(index % m)]
    }

    /// Signed lattice wavenumber (integer units) of FFT index `m`.
    pub fn signed_index(&self, m: usize) -> i64 {
        let half = self.points / 2;
        if m < half {
            m as i64
        } else {
            m as i64 - self.points as i64
        }
    }

    pub fn frequency(&self, m: usize) -> f64 {
        self.signed_index(m) as f64 * self.momentum_spacing()
    }

    /// Wavevector of FFT-ordered entry `index`.
    pub fn wavevector(&self, index: usize) -> [f64; 2] {
        let m = self.points;
        [self.frequency(index / m), self.frequency(index % m)]
    }

    /// `|k|^2` for every FFT-ordered entry.
    pub fn k_squared(&self) -> Vec<f64> {
        (0..self.len())
            .map(|idx| {
                let [k1, k2] = self.wavevector(idx);
                k1 * k1 + k2 * k2
            })
            .collect()
    }

    /// The momentum lattice viewed as a grid of its own (side `2 pi M / L`), with the
    /// same centered layout: entry `i * M + j` is `p = ((i - M/2), (j - M/2)) 2 pi / L`.
    pub fn momentum_grid(&self) -> Grid {
        Grid {
            box_length: 2.0 * PI * self.points as f64 / self.box_length,
            points: self.points,
            forward: Arc::clone(&self.forward),
            backward: Arc::clone(&self.backward),
        }
    }

    /// Unnormalized forward DFT in place.
    pub fn fft(&self, data: &mut [Complex64]) {
        self.transform_2d(data, &self.forward);
    }

    /// Inverse DFT in place, including the `1 / M^2` factor.
    pub fn ifft(&self, data: &mut [Complex64]) {
        self.transform_2d(data, &self.backward);
        let scale = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|z| *z *= scale);
    }

    fn transform_2d(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let m = self.points;
        assert_eq!(data.len(), m * m, "buffer does not match grid");
        let scratch_len = plan.get_inplace_scratch_len();
        let rows = |buf: &mut [Complex64]| {
            buf.par_chunks_mut(m).for_each_init(
                || vec![Complex64::default(); scratch_len],
                |scratch, row| plan.process_with_scratch(row, scratch),
            );
        };
        rows(data);
        transpose_square(data, m);
        rows(data);
        transpose_square(data, m);
    }

    /// Unitary transform to momentum space (FFT order). See the module docs for the
    /// convention.
    pub fn forward_transform(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.fft(&mut buf);
        let scale = self.cell_area() / (2.0 * PI);
        let m = self.points;
        for (idx, z) in buf.iter_mut().enumerate() {
            *z *= scale * centering_sign(idx / m, idx % m);
        }
        buf
    }

    /// Exact inverse of [`Grid::forward_transform`].
    pub fn inverse_transform(&self, coefficients: &[Complex64]) -> Vec<Complex64> {
        let m = self.points;
        let scale = 2.0 * PI / self.cell_area();
        let mut buf: Vec<Complex64> = coefficients
            .iter()
            .enumerate()
            .map(|(idx, z)| z * (scale * centering_sign(idx / m, idx % m)))
            .collect();
        self.ifft(&mut buf);
        buf
    }

    /// Applies a Fourier multiplier to a real periodic field and keeps the real part.
    pub fn apply_real_multiplier<F>(&self, values: &[f64], multiplier: F) -> Vec<f64>
    where
        F: Fn([f64; 2]) -> Complex64,
    {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft(&mut buf);
        for (idx, z) in buf.iter_mut().enumerate() {
            *z *= multiplier(self.wavevector(idx));
        }
        self.ifft(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// Spectral partial derivative of a real periodic field along `axis` (0 or 1).
    pub fn derivative(&self, values: &[f64], axis: usize) -> Vec<f64> {
        self.apply_real_multiplier(values, |k| Complex64::new(0.0, k[axis]))
    }

    /// Spectral `curl v = d1 v2 - d2 v1` of a periodic vector field.
    pub fn curl(&self, field: &VectorField) -> Vec<f64> {
        let d1v2 = self.derivative(&field.y, 0);
        let d2v1 = self.derivative(&field.x, 1);
        d1v2.iter().zip(&d2v1).map(|(a, b)| a - b).collect()
    }

    /// Spectral `div v` of a periodic vector field.
    pub fn divergence(&self, field: &VectorField) -> Vec<f64> {
        let d1v1 = self.derivative(&field.x, 0);
        let d2v2 = self.derivative(&field.y, 1);
        d1v1.iter().zip(&d2v2).map(|(a, b)| a + b).collect()
    }

    /// Quadrature `sum_x f(x) h^2`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().sum::<f64>() * self.cell_area()
    }

    /// Exact circle average around the box center of the trigonometric interpolant
    /// of `field`, using `<e^{ik.x}>_{|x|=r} = J0(|k| r)`.
    pub fn radial_average(&self, field: &ScalarField, radii: &[f64]) -> Result<RadialProfile> {
        self.check_len(field.values.len())?;
        let half = 0.5 * self.box_length;
        let mut previous = -1.0;
        for &r in radii {
            if !r.is_finite() || r < 0.0 {
                return Err(Error::InvalidInput(format!("radius {r} is not a valid radius")));
            }
            if r > half * (1.0 + 1e-12) {
                return Err(Error::RadiusOutsideBox { radius: r, half_box: half });
            }
            if r <= previous {
                return Err(Error::InvalidInput("radii must be strictly increasing".into()));
            }
            previous = r;
        }

        let m = self.points;
        let mut buf: Vec<Complex64> =
            field.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft(&mut buf);
        let norm = 1.0 / self.len() as f64;

        // Group the coefficients by integer |n|^2 so each shell needs one J0 per radius.
        let mut shells: std::collections::BTreeMap<i64, f64> = Default::default();
        for (idx, z) in buf.iter().enumerate() {
            let (i, j) = (idx / m, idx % m);
            let (a, b) = (self.signed_index(i), self.signed_index(j));
            *shells.entry(a * a + b * b).or_insert(0.0) += z.re * norm * centering_sign(i, j);
        }
        let shells: Vec<(f64, f64)> = shells
            .into_iter()
            .map(|(n2, c)| ((n2 as f64).sqrt() * self.momentum_spacing(), c))
            .collect();

        let values = radii
            .par_iter()
            .map(|&r| shells.iter().map(|&(k, c)| c * bessel_j0(k * r)).sum())
            .collect();
        Ok(RadialProfile { radii: radii.to_vec(), values })
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::GridMismatch(format!(
                "field has {len} values, grid has {}",
                self.len()
            )));
        }
        Ok(())
    }
}

fn centering_sign(i: usize, j: usize) -> f64 {
    if (i + j) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn transpose_square(data: &mut [Complex64], m: usize) {
    for i in 0..m {
        for j in (i + 1)..m {
            data.swap(i * m + j, j * m + i);
        }
    }
}

/// `count` equally spaced radii from 0 to `r_max` inclusive.
pub fn uniform_radii(count: usize, r_max: f64) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..count)
            .map(|i| r_max * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Real scalar field on a grid (density, potential, convolution output).
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        Self { values: vec![0.0; grid.len()] }
    }

    pub fn from_fn<F: Fn([f64; 2]) -> f64 + Sync>(grid: &Grid, f: F) -> Self {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|idx| f(grid.position(idx)))
            .collect();
        Self { values }
    }

    pub fn integral(&self, grid: &Grid) -> f64 {
        grid.integrate(&self.values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Two-component real field (vector potential, current).
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl VectorField {
    pub fn zeros(grid: &Grid) -> Self {
        Self { x: vec![0.0; grid.len()], y: vec![0.0; grid.len()] }
    }

    pub fn from_fn<F: Fn([f64; 2]) -> [f64; 2] + Sync>(grid: &Grid, f: F) -> Self {
        let pairs: Vec<[f64; 2]> = (0..grid.len())
            .into_par_iter()
            .map(|idx| f(grid.position(idx)))
            .collect();
        Self {
            x: pairs.iter().map(|p| p[0]).collect(),
            y: pairs.iter().map(|p| p[1]).collect(),
        }
    }

    pub fn at(&self, index: usize) -> [f64; 2] {
        [self.x[index], self.y[index]]
    }

    pub fn max_norm(&self) -> f64 {
        self.x
            .iter()
            .zip(&self.y)
            .fold(0.0f64, |m, (a, b)| m.max(a.hypot(*b)))
    }
}

/// Circle averages `f(r)` of a field around the box center. Values are plain
/// averages over the circle, not weighted by `2 pi r`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadialProfile {
    /// `2 pi int f(r) r dr` by the trapezoid rule on the stored radii.
    pub fn radial_integral(&self) -> f64 {
        self.radii
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(r, f)| 0.5 * (r[1] - r[0]) * (f[0] * r[0] + f[1] * r[1]))
            .sum::<f64>()
            * 2.0
            * PI
    }
}
