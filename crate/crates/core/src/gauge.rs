//! Coulomb-gauge vector potential `curl A = 2 pi rho`, `div A = 0` on the periodic box.
//!
//! A periodic Fourier solve cannot represent the `N x^perp / |x|^2` tail of `A`, so the
//! density is split into a Gaussian of the same mass, whose potential is known in
//! closed form, and a zero-mass remainder solved spectrally.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField, VectorField};

/// Pointwise tolerance below zero accepted for densities.
const NEGATIVE_TOLERANCE: f64 = -1e-12;
const MASS_TOLERANCE: f64 = 1e-8;

/// `rho_ref(x) = N / (pi sigma^2) exp(-|x - x0|^2 / sigma^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianReference {
    pub mass: f64,
    pub width: f64,
    pub center: [f64; 2],
}

impl GaussianReference {
    /// Reference centered on the box center.
    pub fn new(mass: f64, width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidInput(format!("reference width must be positive, got {width}")));
        }
        if !mass.is_finite() {
            return Err(Error::InvalidInput("reference mass is not finite".into()));
        }
        Ok(Self { mass, width, center: [0.0, 0.0] })
    }

    pub fn density(&self, x: [f64; 2]) -> f64 {
        let d2 = (x[0] - self.center[0]).powi(2) + (x[1] - self.center[1]).powi(2);
        self.mass / (PI * self.width * self.width) * (-d2 / (self.width * self.width)).exp()
    }

    /// `N (1 - e^{-r^2/sigma^2}) (x - x0)^perp / r^2`, equal to `N (x - x0)^perp / sigma^2`
    /// to leading order at the center.
    pub fn potential(&self, x: [f64; 2]) -> [f64; 2] {
        let d = [x[0] - self.center[0], x[1] - self.center[1]];
        let s2 = self.width * self.width;
        let u = (d[0] * d[0] + d[1] * d[1]) / s2;
        let factor = if u == 0.0 { 1.0 } else { -(-u).exp_m1() / u };
        let a = self.mass * factor / s2;
        [-a * d[1], a * d[0]]
    }
}

pub fn reference_potential(reference: &GaussianReference, x: [f64; 2]) -> [f64; 2] {
    reference.potential(x)
}

/// Default reference width: half the support radius of the mTF profile.
pub fn default_reference_width(support_radius: f64) -> f64 {
    0.5 * support_radius
}

/// Spectral solution of `curl A = 2 pi sigma`, `div A = 0` for a periodic source,
/// `A^(k) = -2 pi i k^perp sigma^(k) / |k|^2`, with the `k = 0` mode dropped.
pub fn periodic_potential(grid: &Grid, source: &[f64]) -> VectorField {
    let mut hat: Vec<Complex64> = source.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    grid.fft(&mut hat);
    let (mut a1, mut a2): (Vec<Complex64>, Vec<Complex64>) = hat
        .iter()
        .enumerate()
        .map(|(idx, &s)| {
            let [k1, k2] = grid.wavevector(idx);
            let k2n = k1 * k1 + k2 * k2;
            if k2n == 0.0 {
                return (Complex64::default(), Complex64::default());
            }
            let f = Complex64::new(0.0, 2.0 * PI / k2n) * s;
            (f * k2, -f * k1)
        })
        .unzip();
    grid.ifft(&mut a1);
    grid.ifft(&mut a2);
    VectorField {
        x: a1.into_iter().map(|z| z.re).collect(),
        y: a2.into_iter().map(|z| z.re).collect(),
    }
}

fn validate_density(grid: &Grid, rho: &ScalarField, reference: &GaussianReference) -> Result<()> {
    grid.check_len(rho.values.len())?;
    let min = rho.values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < NEGATIVE_TOLERANCE {
        return Err(Error::NegativeDensity { min });
    }
    let mass = rho.integral(grid);
    if (mass - reference.mass).abs() > MASS_TOLERANCE * reference.mass.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::MassMismatch { actual: mass, expected: reference.mass });
    }
    Ok(())
}

/// The periodic correction `A_diff` solving `curl A_diff = 2 pi (rho - rho_ref)`.
pub fn solve_correction(
    grid: &Grid,
    rho: &ScalarField,
    reference: &GaussianReference,
) -> Result<VectorField> {
    validate_density(grid, rho, reference)?;
    let source: Vec<f64> = rho
        .values
        .par_iter()
        .enumerate()
        .map(|(idx, v)| v - reference.density(grid.position(idx)))
        .collect();
    Ok(periodic_potential(grid, &source))
}

/// Full vector potential `A = A_ref + A_diff`.
pub fn solve_vector_potential(
    grid: &Grid,
    rho: &ScalarField,
    reference: &GaussianReference,
) -> Result<VectorField> {
    let mut a = solve_correction(grid, rho, reference)?;
    for idx in 0..grid.len() {
        let r = reference.potential(grid.position(idx));
        a.x[idx] += r[0];
        a.y[idx] += r[1];
    }
    Ok(a)
}

/// `W(x) = int (x - y)^perp / |x - y|^2 . J(y) dy`, i.e.
/// `W^(k) = -2 pi i k^perp . J^(k) / |k|^2`, with the `k = 0` mode set to zero.
pub fn current_convolution(grid: &Grid, current: &VectorField) -> ScalarField {
    let to_hat = |v: &[f64]| {
        let mut h: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        grid.fft(&mut h);
        h
    };
    let j1 = to_hat(&current.x);
    let j2 = to_hat(&current.y);
    let mut w: Vec<Complex64> = (0..grid.len())
        .map(|idx| {
            let [k1, k2] = grid.wavevector(idx);
            let k2n = k1 * k1 + k2 * k2;
            if k2n == 0.0 {
                return Complex64::default();
            }
            Complex64::new(0.0, 2.0 * PI / k2n) * (k2 * j1[idx] - k1 * j2[idx])
        })
        .collect();
    grid.ifft(&mut w);
    ScalarField { values: w.into_iter().map(|z| z.re).collect() }
}

/// Residual `curl A - 2 pi rho` of a solution, with the periodic correction
/// differentiated spectrally and the reference part using its exact curl
/// `2 pi rho_ref`.
pub fn curl_residual(
    grid: &Grid,
    rho: &ScalarField,
    reference: &GaussianReference,
    correction: &VectorField,
) -> Vec<f64> {
    let curl = grid.curl(correction);
    curl.iter()
        .enumerate()
        .map(|(idx, c)| {
            let x = grid.position(idx);
            c + 2.0 * PI * reference.density(x) - 2.0 * PI * rho.values[idx]
        })
        .collect()
}

/// The linear map `rho -> A[rho]` used inside the energy functional, with the
/// reference mass taken equal to the mass of `rho` itself. Unit-mass reference
/// samples are cached so each application costs three transforms.
#[derive(Clone, Debug)]
pub struct GaugeOperator {
    grid: Grid,
    width: f64,
    unit_density: Vec<f64>,
    unit_potential: VectorField,
}

impl GaugeOperator {
    pub fn new(grid: &Grid, width: f64) -> Result<Self> {
        let unit = GaussianReference::new(1.0, width)?;
        Ok(Self {
            grid: grid.clone(),
            width,
            unit_density: ScalarField::from_fn(grid, |x| unit.density(x)).values,
            unit_potential: VectorField::from_fn(grid, |x| unit.potential(x)),
        })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn reference(&self, mass: f64) -> GaussianReference {
        GaussianReference { mass, width: self.width, center: [0.0, 0.0] }
    }

    /// `A[rho] = m a_ref + P(rho - m g)` with `m = int rho`.
    pub fn potential(&self, rho: &[f64]) -> VectorField {
        let mass = self.grid.integrate(rho);
        let source: Vec<f64> = rho
            .iter()
            .zip(&self.unit_density)
            .map(|(r, g)| r - mass * g)
            .collect();
        let mut a = periodic_potential(&self.grid, &source);
        for idx in 0..self.grid.len() {
            a.x[idx] += mass * self.unit_potential.x[idx];
            a.y[idx] += mass * self.unit_potential.y[idx];
        }
        a
    }

    /// Gradient with respect to `rho` (in the `h^2`-weighted inner product) of
    /// `rho -> <J, A[rho]>`, for fixed `J`. Equals `-W + const`, the constant coming
    /// from the mass dependence of the reference.
    pub fn coupling_gradient(&self, current: &VectorField) -> Vec<f64> {
        let w = current_convolution(&self.grid, current).values;
        let h2 = self.grid.cell_area();
        let j_dot_ref: f64 = (0..self.grid.len())
            .map(|i| current.x[i] * self.unit_potential.x[i] + current.y[i] * self.unit_potential.y[i])
            .sum::<f64>()
            * h2;
        let w_dot_g: f64 = w.iter().zip(&self.unit_density).map(|(a, b)| a * b).sum::<f64>() * h2;
        let shift = j_dot_ref + w_dot_g;
        w.into_iter().map(|v| shift - v).collect()
    }
}
