//! Closed-form Thomas-Fermi and magnetic Thomas-Fermi theory for power-law traps
//! `V(x) = |x|^s`, in units `hbar = c = 2m = 1` with the trap multiplied by `N`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Distance below which `1/alpha` is treated as an integer.
const INTEGER_SNAP: f64 = 1e-12;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && (0.0..1.0).contains(&alpha)) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    Ok(())
}

/// Integer and fractional parts of `1/alpha`, snapped to the integer when within
/// `1e-12` of it. Requires `alpha > 0`.
pub fn inverse_alpha_parts(alpha: f64) -> (u64, f64) {
    let inv = 1.0 / alpha;
    let nearest = inv.round();
    if (inv - nearest).abs() < INTEGER_SNAP {
        (nearest as u64, 0.0)
    } else {
        let floor = inv.floor();
        (floor as u64, inv - floor)
    }
}

/// The statistics constant `c(alpha) = 1 + alpha^2 (1 - {1/alpha}) {1/alpha}`, with
/// `c(0) = 1`.
pub fn mtf_constant(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha == 0.0 {
        return Ok(1.0);
    }
    let (_, frac) = inverse_alpha_parts(alpha);
    Ok(1.0 + alpha * alpha * (1.0 - frac) * frac)
}

/// The same constant in its expanded form
/// `alpha + 2 alpha n - (alpha n)^2 - alpha^2 n` with `n = floor(1/alpha)`.
pub fn mtf_constant_expanded(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha == 0.0 {
        return Ok(1.0);
    }
    let (n, _) = inverse_alpha_parts(alpha);
    let n = n as f64;
    Ok(alpha + 2.0 * alpha * n - (alpha * n).powi(2) - alpha * alpha * n)
}

/// Energy per unit area `2 pi c(alpha) rho^2` of the homogeneous gas at density `rho`.
pub fn homogeneous_energy_density(alpha: f64, density: f64) -> Result<f64> {
    if !(density.is_finite() && density >= 0.0) {
        return Err(Error::InvalidInput(format!("density must be nonnegative, got {density}")));
    }
    Ok(2.0 * PI * mtf_constant(alpha)? * density * density)
}

fn check_exponent(s: f64) -> Result<()> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::InvalidInput(format!("trap exponent must be positive, got {s}")));
    }
    Ok(())
}

/// Chemical potential `lambda_alpha = (4 c (s+2)/s)^{s/(s+2)}`.
pub fn mtf_chemical_potential(alpha: f64, s: f64) -> Result<f64> {
    check_exponent(s)?;
    let c = mtf_constant(alpha)?;
    Ok(chemical_potential_for(c, s))
}

fn chemical_potential_for(c: f64, s: f64) -> f64 {
    (4.0 * c * (s + 2.0) / s).powf(s / (s + 2.0))
}

/// Magnetic Thomas-Fermi minimizer for `N` particles in the trap `|x|^s`.
///
/// With `c = 1` (see [`MtfModel::thomas_fermi`]) this is ordinary Thomas-Fermi theory.
#[derive(Clone, Debug, PartialEq)]
pub struct MtfModel {
    pub particles: f64,
    pub alpha: f64,
    pub exponent: f64,
    pub constant: f64,
    pub chemical_potential: f64,
    pub radius: f64,
}

impl MtfModel {
    pub fn new(particles: f64, alpha: f64, exponent: f64) -> Result<Self> {
        let constant = mtf_constant(alpha)?;
        Self::with_constant(particles, alpha, exponent, constant)
    }

    /// Ordinary Thomas-Fermi theory (`c = 1`), the `alpha -> 0` limit.
    pub fn thomas_fermi(particles: f64, exponent: f64) -> Result<Self> {
        Self::with_constant(particles, 0.0, exponent, 1.0)
    }

    fn with_constant(particles: f64, alpha: f64, exponent: f64, constant: f64) -> Result<Self> {
        check_exponent(exponent)?;
        if !(particles.is_finite() && particles > 0.0) {
            return Err(Error::InvalidInput(format!(
                "particle number must be positive, got {particles}"
            )));
        }
        let chemical_potential = chemical_potential_for(constant, exponent);
        Ok(Self {
            particles,
            alpha,
            exponent,
            constant,
            chemical_potential,
            radius: chemical_potential.powf(1.0 / exponent),
        })
    }

    /// `rho(r) = N / (4 pi c) (lambda - r^s)_+`.
    pub fn density_radial(&self, r: f64) -> f64 {
        let v = self.chemical_potential - r.abs().powf(self.exponent);
        if v > 0.0 {
            self.particles / (4.0 * PI * self.constant) * v
        } else {
            0.0
        }
    }

    pub fn density(&self, x: [f64; 2]) -> f64 {
        self.density_radial(x[0].hypot(x[1]))
    }

    /// Azimuthal component `A_theta(r)` of the self-generated vector potential.
    pub fn vector_potential_radial(&self, r: f64) -> f64 {
        let r = r.abs();
        let n = self.particles;
        if r < self.radius {
            let s = self.exponent;
            n * r / (4.0 * self.constant)
                * (self.chemical_potential - 2.0 / (s + 2.0) * r.powf(s))
        } else {
            n / r
        }
    }

    /// `A(x) = A_theta(|x|) x^perp / |x|` with `x^perp = (-x2, x1)`.
    pub fn vector_potential(&self, x: [f64; 2]) -> [f64; 2] {
        let r = x[0].hypot(x[1]);
        if r == 0.0 {
            return [0.0, 0.0];
        }
        let a = self.vector_potential_radial(r) / r;
        [-a * x[1], a * x[0]]
    }

    /// Ground-state energy
    /// `N^2 s/(8(s+1)) (4(s+2)/s)^{(2s+2)/(s+2)} c^{s/(s+2)}`.
    pub fn energy(&self) -> f64 {
        let s = self.exponent;
        self.particles.powi(2) * s / (8.0 * (s + 1.0))
            * (4.0 * (s + 2.0) / s).powf((2.0 * s + 2.0) / (s + 2.0))
            * self.constant.powf(s / (s + 2.0))
    }

    pub fn energy_per_particle_squared(&self) -> f64 {
        self.energy() / self.particles.powi(2)
    }

    /// `max_x (alpha |A(x)| + sqrt(4 pi rho(x)))` over the support, sampled on
    /// `samples` equally spaced radii: the largest momentum in the semiclassical
    /// phase-space ball.
    pub fn momentum_width(&self, samples: usize) -> f64 {
        let samples = samples.max(2);
        (0..samples)
            .map(|i| {
                let r = self.radius * i as f64 / (samples - 1) as f64;
                self.alpha * self.vector_potential_radial(r).abs() + (4.0 * PI * self.density_radial(r)).sqrt()
            })
            .fold(0.0f64, f64::max)
    }

    /// Self-generated field `B(0) = 2 pi alpha rho(0)` at the trap center.
    pub fn central_field(&self) -> f64 {
        2.0 * PI * self.alpha * self.density_radial(0.0)
    }
}

/// Landau levels `E_n = 2B(n + 1/2)` with degeneracy `B / 2pi` per unit area.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LandauSpectrum {
    pub field: f64,
}

impl LandauSpectrum {
    pub fn level(&self, n: u32) -> f64 {
        2.0 * self.field * (n as f64 + 0.5)
    }

    pub fn degeneracy_density(&self) -> f64 {
        self.field / (2.0 * PI)
    }

    /// Magnetic length `B^{-1/2}`.
    pub fn magnetic_length(&self) -> f64 {
        self.field.sqrt().recip()
    }
}

pub fn landau_spectrum(field: f64) -> Result<LandauSpectrum> {
    if !(field.is_finite() && field > 0.0) {
        return Err(Error::InvalidInput(format!("field must be positive, got {field}")));
    }
    Ok(LandauSpectrum { field })
}

/// Fraction of the local density expected in Landau level `n`: `alpha` for the
/// `floor(1/alpha)` filled levels, `alpha {1/alpha}` for the top one, zero above.
pub fn theoretical_ll_filling(alpha: f64, n: u32) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha == 0.0 {
        return Err(Error::InvalidInput(
            "alpha = 0 fills infinitely many levels; use Thomas-Fermi theory".into(),
        ));
    }
    let (filled, frac) = inverse_alpha_parts(alpha);
    let n = n as u64;
    Ok(if n < filled {
        alpha
    } else if n == filled {
        alpha * frac
    } else {
        0.0
    })
}

/// [`theoretical_ll_filling`] for levels `0..=n_max`.
pub fn theoretical_ll_fillings(alpha: f64, n_max: u32) -> Result<Vec<f64>> {
    (0..=n_max).map(|n| theoretical_ll_filling(alpha, n)).collect()
}

/// One row of the reference table for an alpha sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceRow {
    pub alpha: f64,
    pub constant: f64,
    pub chemical_potential: f64,
    pub energy_over_n2: f64,
}

pub fn reference_rows(alphas: &[f64], exponent: f64) -> Result<Vec<ReferenceRow>> {
    alphas
        .iter()
        .map(|&alpha| {
            let model = MtfModel::new(1.0, alpha, exponent)?;
            Ok(ReferenceRow {
                alpha,
                constant: model.constant,
                chemical_potential: model.chemical_potential,
                energy_over_n2: model.energy_per_particle_squared(),
            })
        })
        .collect()
}
