use num_complex::Complex64;
use rayon::prelude::*;

use super::orbitals::OrbitalSet;
use crate::error::{Error, Result};
use crate::gauge::GaugeOperator;
use crate::grid::{Grid, ScalarField, VectorField};

/// Parts of the Hartree energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyBreakdown {
    /// `sum_j ||(-i grad + alpha A[rho]) u_j||^2`.
    pub kinetic: f64,
    /// `N <V, rho>`.
    pub trap: f64,
    pub total: f64,
}

/// Average-field Hartree functional for `N` orbitals in an external trap `N V`.
#[derive(Clone, Debug)]
pub struct HartreeProblem {
    grid: Grid,
    trap: ScalarField,
    alpha: f64,
    particles: usize,
    gauge: GaugeOperator,
    wavevectors: Vec<[f64; 2]>,
}

impl HartreeProblem {
    pub fn new(
        grid: &Grid,
        trap: ScalarField,
        alpha: f64,
        particles: usize,
        reference_width: f64,
    ) -> Result<Self> {
        grid.check_len(trap.values.len())?;
        if !alpha.is_finite() || !(0.0..1.0).contains(&alpha) {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        if particles == 0 {
            return Err(Error::InvalidInput("at least one particle is required".into()));
        }
        Ok(Self {
            grid: grid.clone(),
            trap,
            alpha,
            particles,
            gauge: GaugeOperator::new(grid, reference_width)?,
            wavevectors: (0..grid.len()).map(|i| grid.wavevector(i)).collect(),
        })
    }

    /// Trap `|x|^s`.
    pub fn power_trap(
        grid: &Grid,
        exponent: f64,
        alpha: f64,
        particles: usize,
        reference_width: f64,
    ) -> Result<Self> {
        if !(exponent.is_finite() && exponent > 0.0) {
            return Err(Error::InvalidInput(format!("trap exponent must be positive, got {exponent}")));
        }
        let trap = ScalarField::from_fn(grid, |x| (x[0] * x[0] + x[1] * x[1]).powf(exponent / 2.0));
        Self::new(grid, trap, alpha, particles, reference_width)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn trap(&self) -> &ScalarField {
        &self.trap
    }

    pub fn gauge(&self) -> &GaugeOperator {
        &self.gauge
    }

    /// Local part `N V` of the one-body operator at `alpha = 0`.
    pub fn scaled_trap(&self) -> Vec<f64> {
        let n = self.particles as f64;
        self.trap.values.iter().map(|v| n * v).collect()
    }

    pub fn vector_potential(&self, density: &ScalarField) -> VectorField {
        if self.alpha == 0.0 {
            return VectorField::zeros(&self.grid);
        }
        self.gauge.potential(&density.values)
    }

    fn check(&self, orbitals: &OrbitalSet) -> Result<()> {
        if orbitals.grid() != &self.grid {
            return Err(Error::GridMismatch("orbitals live on a different grid".into()));
        }
        if orbitals.count() != self.particles {
            return Err(Error::GridMismatch(format!(
                "{} orbitals for {} particles",
                orbitals.count(),
                self.particles
            )));
        }
        Ok(())
    }

    /// Covariant derivatives `(K_d + alpha A_d) u` for both axes.
    fn covariant(&self, u: &[Complex64], a: &VectorField) -> [Vec<Complex64>; 2] {
        let mut spectrum = u.to_vec();
        self.grid.fft(&mut spectrum);
        let axis = |d: usize| {
            let mut buf: Vec<Complex64> = spectrum
                .iter()
                .zip(&self.wavevectors)
                .map(|(z, k)| z * k[d])
                .collect();
            self.grid.ifft(&mut buf);
            let field = if d == 0 { &a.x } else { &a.y };
            if self.alpha != 0.0 {
                for ((p, ui), ai) in buf.iter_mut().zip(u).zip(field) {
                    *p += ui * (self.alpha * ai);
                }
            }
            buf
        };
        [axis(0), axis(1)]
    }

    pub fn energy(&self, orbitals: &OrbitalSet) -> Result<EnergyBreakdown> {
        self.check(orbitals)?;
        let density = orbitals.density();
        let a = self.vector_potential(&density);
        let per_orbital: Vec<f64> = (0..self.particles)
            .into_par_iter()
            .map(|j| {
                let [px, py] = self.covariant(orbitals.orbital(j), &a);
                px.iter().chain(&py).map(|z| z.norm_sqr()).sum::<f64>()
            })
            .collect();
        Ok(self.breakdown(per_orbital.iter().sum(), &density))
    }

    fn breakdown(&self, kinetic_sum: f64, density: &ScalarField) -> EnergyBreakdown {
        let h2 = self.grid.cell_area();
        let kinetic = kinetic_sum * h2;
        let trap = self.particles as f64
            * density.values.iter().zip(&self.trap.values).map(|(r, v)| r * v).sum::<f64>()
            * h2;
        EnergyBreakdown { kinetic, trap, total: kinetic + trap }
    }

    /// Energy and its gradient with respect to the real inner product
    /// `Re <., .>` on the orbital block (orbital-major, like the input).
    pub fn energy_and_gradient(&self, orbitals: &OrbitalSet) -> Result<(EnergyBreakdown, Vec<Complex64>)> {
        self.check(orbitals)?;
        let n = self.grid.len();
        let density = orbitals.density();
        let a = self.vector_potential(&density);
        let momenta: Vec<[Vec<Complex64>; 2]> = (0..self.particles)
            .into_par_iter()
            .map(|j| self.covariant(orbitals.orbital(j), &a))
            .collect();
        let kinetic_sum: f64 = momenta
            .iter()
            .map(|[px, py]| px.iter().chain(py).map(|z| z.norm_sqr()).sum::<f64>())
            .sum();
        let energy = self.breakdown(kinetic_sum, &density);

        let mut local = self.scaled_trap();
        if self.alpha != 0.0 {
            let current = current_from_momenta(orbitals, &momenta);
            let coupling = self.gauge.coupling_gradient(&current);
            for (l, c) in local.iter_mut().zip(&coupling) {
                *l += 2.0 * self.alpha * c;
            }
        }

        let blocks: Vec<Vec<Complex64>> = (0..self.particles)
            .into_par_iter()
            .map(|j| {
                let u = orbitals.orbital(j);
                let [px, py] = &momenta[j];
                let mut fx = px.clone();
                let mut fy = py.clone();
                self.grid.fft(&mut fx);
                self.grid.fft(&mut fy);
                let mut g: Vec<Complex64> = fx
                    .iter()
                    .zip(&fy)
                    .zip(&self.wavevectors)
                    .map(|((x, y), k)| x * k[0] + y * k[1])
                    .collect();
                self.grid.ifft(&mut g);
                for i in 0..n {
                    let mut v = g[i] + u[i] * local[i];
                    if self.alpha != 0.0 {
                        v += (px[i] * a.x[i] + py[i] * a.y[i]) * self.alpha;
                    }
                    g[i] = v * 2.0;
                }
                g
            })
            .collect();
        Ok((energy, blocks.concat()))
    }

    /// `J_d = sum_j Re(conj(u_j) (K_d + alpha A_d) u_j)` with `A = A[rho]` of the orbitals.
    pub fn current(&self, orbitals: &OrbitalSet) -> Result<VectorField> {
        self.check(orbitals)?;
        let a = self.vector_potential(&orbitals.density());
        Ok(compute_current(orbitals, &a, self.alpha))
    }

    /// Applies the linear operator `-Laplacian + N V` to one function.
    pub fn apply_linear(&self, u: &[Complex64]) -> Vec<Complex64> {
        let mut buf = u.to_vec();
        self.grid.fft(&mut buf);
        for (z, k) in buf.iter_mut().zip(&self.wavevectors) {
            *z *= k[0] * k[0] + k[1] * k[1];
        }
        self.grid.ifft(&mut buf);
        let n = self.particles as f64;
        for ((b, x), v) in buf.iter_mut().zip(u).zip(&self.trap.values) {
            *b += x * (n * v);
        }
        buf
    }
}

/// Paramagnetic-plus-diamagnetic current `sum_j Re(conj(u_j) (K + alpha A) u_j)` for a
/// given vector potential.
pub fn compute_current(orbitals: &OrbitalSet, a: &VectorField, alpha: f64) -> VectorField {
    let grid = orbitals.grid();
    let wavevectors: Vec<[f64; 2]> = (0..grid.len()).map(|i| grid.wavevector(i)).collect();
    let momenta: Vec<[Vec<Complex64>; 2]> = orbitals
        .orbitals()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|u| {
            let mut spectrum = u.to_vec();
            grid.fft(&mut spectrum);
            let axis = |d: usize| {
                let mut buf: Vec<Complex64> =
                    spectrum.iter().zip(&wavevectors).map(|(z, k)| z * k[d]).collect();
                grid.ifft(&mut buf);
                let field = if d == 0 { &a.x } else { &a.y };
                for ((p, ui), ai) in buf.iter_mut().zip(u).zip(field) {
                    *p += ui * (alpha * ai);
                }
                buf
            };
            [axis(0), axis(1)]
        })
        .collect();
    current_from_momenta(orbitals, &momenta)
}

fn current_from_momenta(orbitals: &OrbitalSet, momenta: &[[Vec<Complex64>; 2]]) -> VectorField {
    let n = orbitals.grid().len();
    let axis = |d: usize| -> Vec<f64> {
        (0..n)
            .into_par_iter()
            .map(|i| {
                momenta
                    .iter()
                    .enumerate()
                    .map(|(j, p)| (orbitals.orbital(j)[i].conj() * p[d][i]).re)
                    .sum()
            })
            .collect()
    };
    VectorField { x: axis(0), y: axis(1) }
}
