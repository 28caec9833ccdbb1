//! Landau-level resolved Husimi functions.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::hartree::OrbitalSet;

/// Laguerre polynomials `L_0(t) ..= L_{n_max}(t)` by the three-term recurrence.
pub fn laguerre_all(n_max: u32, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max as usize + 1);
    out.push(1.0);
    if n_max >= 1 {
        out.push(1.0 - t);
    }
    for k in 1..n_max as usize {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - t) * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

pub fn laguerre(n: u32, t: f64) -> f64 {
    laguerre_all(n, t)[n as usize]
}

/// Integral kernel of the projector onto the `n`-th Landau level of the field `B > 0`
/// in the symmetric gauge `A = (B/2)(-x2, x1)`:
/// `(B / 2pi) exp(i (B/2)(x1 y2 - x2 y1) - B|x-y|^2/4) L_n(B|x-y|^2/2)`.
pub fn laguerre_kernel(field: f64, n: u32, x: [f64; 2], y: [f64; 2]) -> Complex64 {
    let d2 = (x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2);
    let phase = 0.5 * field * (x[0] * y[1] - x[1] * y[0]);
    let amp = field / (2.0 * PI) * (-field * d2 / 4.0).exp() * laguerre(n, field * d2 / 2.0);
    Complex64::from_polar(amp, phase)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HusimiParams {
    /// Localization width `eps` of the Gaussian window.
    pub width: f64,
    /// Field strength `B` defining the Landau levels.
    pub field: f64,
    pub center: [f64; 2],
    pub max_level: u32,
    /// Density used for the normalized fillings (e.g. the mTF central density).
    pub reference_density: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HusimiFilling {
    pub level: u32,
    pub value: f64,
    pub normalized: f64,
    pub width: f64,
    pub field: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HusimiResult {
    pub fillings: Vec<HusimiFilling>,
    /// `(|g|^2 * rho)(R)`, the limit of the level sum.
    pub completeness: f64,
    /// Window points used in the quadrature.
    pub window_points: usize,
}

impl HusimiResult {
    pub fn level_sum(&self) -> f64 {
        self.fillings.iter().map(|f| f.value).sum()
    }

    /// Pauli bound `B / 2pi`.
    pub fn bound(&self) -> f64 {
        self.fillings.first().map_or(0.0, |f| f.field / (2.0 * PI))
    }
}

/// Drops kernel terms below this fraction of the diagonal value.
const KERNEL_CUTOFF: f64 = 1e-17;

/// `m(n, R) = sum_j <v_j, Pi_n v_j>` with `v_j = g_eps(. - R) u_j` by direct double
/// quadrature over the window `|x - R| <= 5 eps`.
pub fn husimi_ll_filling(orbitals: &OrbitalSet, params: &HusimiParams) -> Result<HusimiResult> {
    let HusimiParams { width, field, center, max_level, reference_density } = *params;
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::InvalidInput(format!("localization width must be positive, got {width}")));
    }
    if !(field > 0.0 && field.is_finite()) {
        return Err(Error::InvalidInput(format!("field must be positive, got {field}")));
    }
    if !(reference_density > 0.0) {
        return Err(Error::InvalidInput("reference density must be positive".into()));
    }
    let grid = orbitals.grid();
    let window = 5.0 * width;
    let half = grid.box_length() / 2.0;
    let lowest = -half;
    let highest = half - grid.spacing();
    if center[0] - window < lowest
        || center[0] + window > highest
        || center[1] - window < lowest
        || center[1] + window > highest
    {
        return Err(Error::WindowOutsideBox { radius: window, cx: center[0], cy: center[1] });
    }
    let magnetic_length = field.powf(-0.5);
    if width <= magnetic_length {
        log::warn!("localization width {width} does not exceed the magnetic length {magnetic_length:.4}");
    }

    let norm = (2.0 / (PI * width * width)).sqrt();
    let count = orbitals.count();
    let mut points = Vec::new();
    let mut values = Vec::new();
    for idx in 0..grid.len() {
        let x = grid.position(idx);
        let d2 = (x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2);
        if d2 <= window * window {
            let g = norm * (-d2 / (width * width)).exp();
            points.push(x);
            for j in 0..count {
                values.push(orbitals.orbital(j)[idx] * g);
            }
        }
    }
    let h2 = grid.cell_area();
    let completeness = values.iter().map(|z| z.norm_sqr()).sum::<f64>() * h2;

    let levels = max_level as usize + 1;
    let prefactor = field / (2.0 * PI);
    let rows: Vec<Vec<f64>> = (0..points.len())
        .into_par_iter()
        .map(|a| {
            let mut acc = vec![0.0; levels];
            let xa = points[a];
            let va = &values[a * count..(a + 1) * count];
            // diagonal: Pi_n(x, x) = B / 2pi
            let diag: f64 = va.iter().map(|z| z.norm_sqr()).sum();
            acc.iter_mut().for_each(|m| *m += prefactor * diag);
            for b in (a + 1)..points.len() {
                let xb = points[b];
                let d2 = (xa[0] - xb[0]).powi(2) + (xa[1] - xb[1]).powi(2);
                let t = field * d2 / 2.0;
                let decay = (-t / 2.0).exp();
                if decay * (1.0 + t).powi(max_level as i32) < KERNEL_CUTOFF {
                    continue;
                }
                let vb = &values[b * count..(b + 1) * count];
                let g: Complex64 = va.iter().zip(vb).map(|(p, q)| p.conj() * q).sum();
                let phase = Complex64::from_polar(1.0, 0.5 * field * (xa[0] * xb[1] - xa[1] * xb[0]));
                let overlap = (phase * g).re;
                let poly = laguerre_all(max_level, t);
                for (m, l) in acc.iter_mut().zip(&poly) {
                    *m += 2.0 * prefactor * decay * l * overlap;
                }
            }
            acc
        })
        .collect();
    let mut totals = vec![0.0; levels];
    for row in &rows {
        for (t, v) in totals.iter_mut().zip(row) {
            *t += v;
        }
    }
    let h4 = h2 * h2;
    let fillings = totals
        .into_iter()
        .enumerate()
        .map(|(n, m)| HusimiFilling {
            level: n as u32,
            value: m * h4,
            normalized: m * h4 / reference_density,
            width,
            field,
        })
        .collect();
    Ok(HusimiResult { fillings, completeness, window_points: points.len() })
}

/// The `count` lowest-angular-momentum states `conj(z)^k exp(-B|x|^2/4)` of the lowest
/// Landau level of the field `B` (symmetric gauge, same orientation as
/// [`laguerre_kernel`]), orthonormalized on the grid.
pub fn landau_states(grid: &Grid, field: f64, count: usize) -> Result<OrbitalSet> {
    if !(field > 0.0 && field.is_finite()) {
        return Err(Error::InvalidInput(format!("field must be positive, got {field}")));
    }
    let mut data = Vec::with_capacity(count * grid.len());
    let mut log_factorial = 0.0;
    for k in 0..count {
        if k > 0 {
            log_factorial += (k as f64).ln();
        }
        for idx in 0..grid.len() {
            let [x, y] = grid.position(idx);
            let r2 = x * x + y * y;
            // |phi_k| = (B/2)^{(k+1)/2} r^k exp(-B r^2 / 4) / sqrt(pi k!)
            let log_mod = 0.5 * (k as f64 + 1.0) * (field / 2.0).ln() + 0.5 * k as f64 * r2.ln()
                - field * r2 / 4.0
                - 0.5 * (PI.ln() + log_factorial);
            let modulus = if r2 == 0.0 {
                if k == 0 { (field / (2.0 * PI)).sqrt() } else { 0.0 }
            } else {
                log_mod.exp()
            };
            data.push(Complex64::from_polar(modulus, -(k as f64) * y.atan2(x)));
        }
    }
    OrbitalSet::orthonormalized(grid, count, data)
}
