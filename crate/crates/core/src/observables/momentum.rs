use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, RadialProfile, ScalarField};
use crate::hartree::OrbitalSet;

/// `t(k) = sum_j |u_j^(k)|^2` on the dual lattice, stored in the same centered layout as
/// position fields (so the momentum grid's radial average applies directly).
#[derive(Clone, Debug)]
pub struct MomentumDensity {
    grid: Grid,
    values: ScalarField,
    particles: f64,
}

impl MomentumDensity {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &ScalarField {
        &self.values
    }

    pub fn particles(&self) -> f64 {
        self.particles
    }

    /// Lattice sum `sum_k t(k) (2 pi / L)^2`.
    pub fn mass(&self) -> f64 {
        self.values.integral(&self.grid)
    }

    pub fn radial_profile(&self, momenta: &[f64]) -> Result<MomentumProfile> {
        let RadialProfile { radii, values } = self.grid.radial_average(&self.values, momenta)?;
        Ok(MomentumProfile { momenta: radii, values, errors: None, particles: self.particles, rescaled: false })
    }
}

pub fn momentum_density(orbitals: &OrbitalSet) -> MomentumDensity {
    let grid = orbitals.grid();
    let m = grid.points();
    let half = m / 2;
    let mut fft_order = vec![0.0; grid.len()];
    for u in orbitals.orbitals() {
        let coeffs: Vec<Complex64> = grid.forward_transform(u);
        for (t, c) in fft_order.iter_mut().zip(&coeffs) {
            *t += c.norm_sqr();
        }
    }
    let values = (0..grid.len())
        .map(|idx| {
            let (i, j) = (idx / m, idx % m);
            fft_order[((i + half) % m) * m + (j + half) % m]
        })
        .collect();
    MomentumDensity {
        grid: grid.momentum_grid(),
        values: ScalarField { values },
        particles: orbitals.count() as f64,
    }
}

/// Radial momentum profile, possibly with Monte-Carlo standard errors.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumProfile {
    pub momenta: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Option<Vec<f64>>,
    pub particles: f64,
    /// Whether `momenta` are already divided by `sqrt(N)`.
    pub rescaled: bool,
}

impl MomentumProfile {
    /// `p / sqrt(N)` for each sample.
    pub fn rescaled_momenta(&self) -> Vec<f64> {
        if self.rescaled {
            return self.momenta.clone();
        }
        let s = self.particles.sqrt();
        self.momenta.iter().map(|p| p / s).collect()
    }

    /// `2 pi int t(p) p dp` by the trapezoid rule over the sampled range.
    pub fn mass(&self) -> f64 {
        let f: Vec<f64> = self.momenta.iter().zip(&self.values).map(|(p, t)| p * t).collect();
        2.0 * std::f64::consts::PI * trapezoid(&self.momenta, &f)
    }

    /// Standard error of [`MomentumProfile::mass`] assuming independent samples.
    pub fn mass_error(&self) -> Option<f64> {
        let errors = self.errors.as_ref()?;
        let n = self.momenta.len();
        let mut var = 0.0;
        for i in 0..n {
            let left = if i > 0 { self.momenta[i] - self.momenta[i - 1] } else { 0.0 };
            let right = if i + 1 < n { self.momenta[i + 1] - self.momenta[i] } else { 0.0 };
            let w = 0.5 * (left + right) * self.momenta[i];
            var += (w * errors[i]).powi(2);
        }
        Some(2.0 * std::f64::consts::PI * var.sqrt())
    }
}

pub(crate) fn trapezoid(x: &[f64], f: &[f64]) -> f64 {
    x.windows(2).zip(f.windows(2)).map(|(x, f)| 0.5 * (x[1] - x[0]) * (f[0] + f[1])).sum()
}

/// `t~(q) = t(sqrt(N) q)`: momenta divided by `sqrt(N)`, values unchanged, so a profile
/// of mass `N` becomes one of mass 1.
pub fn rescale_momentum_profile(profile: &MomentumProfile, particles: f64) -> Result<MomentumProfile> {
    if !(particles.is_finite() && particles > 0.0) {
        return Err(Error::InvalidInput(format!("particle number must be positive, got {particles}")));
    }
    if profile.rescaled {
        return Err(Error::InvalidInput("profile is already rescaled".into()));
    }
    let s = particles.sqrt();
    Ok(MomentumProfile {
        momenta: profile.momenta.iter().map(|p| p / s).collect(),
        values: profile.values.clone(),
        errors: profile.errors.clone(),
        particles,
        rescaled: true,
    })
}

/// Radial position profile `rho(r) / N`, the position-space counterpart of a rescaled
/// momentum profile.
pub fn normalized_position_profile(
    grid: &Grid,
    density: &ScalarField,
    particles: f64,
    radii: &[f64],
) -> Result<RadialProfile> {
    let mut profile = grid.radial_average(density, radii)?;
    profile.values.iter_mut().for_each(|v| *v /= particles);
    Ok(profile)
}

/// Fraction of the density's variance explained by its radial average,
/// `1 - sum (rho - rho_bar(|x|))^2 / sum (rho - mean)^2`.
pub fn radial_symmetry_fraction(grid: &Grid, density: &ScalarField) -> Result<f64> {
    let half = grid.box_length() / 2.0;
    let samples = 4 * grid.points();
    let radii: Vec<f64> = (0..=samples).map(|i| half * i as f64 / samples as f64).collect();
    let profile = grid.radial_average(density, &radii)?;
    let step = half / samples as f64;
    let mean = density.values.iter().sum::<f64>() / grid.len() as f64;
    let (mut resid, mut total) = (0.0, 0.0);
    for (idx, &rho) in density.values.iter().enumerate() {
        let [x, y] = grid.position(idx);
        let r = x.hypot(y);
        if r > half {
            continue;
        }
        let pos = r / step;
        let k = (pos.floor() as usize).min(samples - 1);
        let frac = pos - k as f64;
        let bar = profile.values[k] * (1.0 - frac) + profile.values[k + 1] * frac;
        resid += (rho - bar).powi(2);
        total += (rho - mean).powi(2);
    }
    Ok(if total > 0.0 { 1.0 - resid / total } else { 1.0 })
}
