//! Riemannian L-BFGS on orthonormal orbital blocks with backtracking Armijo search.

use std::collections::VecDeque;

use num_complex::Complex64;
use rayon::prelude::*;

use super::energy::{EnergyBreakdown, HartreeProblem};
use super::orbitals::OrbitalSet;
use super::stiefel::{project_tangent, real_inner, retract};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverParams {
    /// Stored curvature pairs.
    pub history: usize,
    /// Stop when `||grad|| / N` falls below this.
    pub gradient_tolerance: f64,
    pub max_iterations: usize,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    /// Step shrink factor per backtrack.
    pub backtrack: f64,
    pub max_backtracks: usize,
    /// Scale the search direction by `(|k|^2 + shift)^{-1}`.
    pub precondition: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            history: 10,
            gradient_tolerance: 1e-6,
            max_iterations: 2000,
            armijo: 1e-4,
            backtrack: 0.5,
            max_backtracks: 40,
            precondition: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIterations,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceEntry {
    pub iteration: usize,
    pub energy: f64,
    /// `||grad|| / N` of the Riemannian gradient.
    pub gradient_norm: f64,
    /// Accepted step length (0 for the initial point).
    pub step: f64,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub orbitals: OrbitalSet,
    pub energy: EnergyBreakdown,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub termination: Termination,
    pub trace: Vec<TraceEntry>,
}

impl SolveOutcome {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }
}

struct Preconditioner {
    k2: Vec<f64>,
    shift: f64,
}

impl Preconditioner {
    fn apply(&self, problem: &HartreeProblem, v: &[Complex64]) -> Vec<Complex64> {
        let grid = problem.grid();
        let n = grid.len();
        let mut out = v.to_vec();
        out.par_chunks_mut(n).for_each(|col| {
            grid.fft(col);
            for (z, k) in col.iter_mut().zip(&self.k2) {
                *z /= 2.0 * (k + self.shift);
            }
            grid.ifft(col);
        });
        out
    }
}

/// Minimizes the Hartree energy starting from `initial`. `observer` sees every accepted
/// iterate and may abort the run by returning an error.
pub fn minimize<F>(
    problem: &HartreeProblem,
    initial: OrbitalSet,
    params: &SolverParams,
    mut observer: F,
) -> Result<SolveOutcome>
where
    F: FnMut(&OrbitalSet, &TraceEntry) -> Result<()>,
{
    if params.history == 0 || !(params.gradient_tolerance > 0.0) {
        return Err(Error::InvalidInput("history and tolerance must be positive".into()));
    }
    if !(params.armijo > 0.0 && params.armijo < 1.0 && params.backtrack > 0.0 && params.backtrack < 1.0) {
        return Err(Error::InvalidInput("line-search constants must lie in (0, 1)".into()));
    }
    let h2 = problem.grid().cell_area();
    let particles = problem.particles() as f64;
    let mut orbitals = initial;
    let (mut energy, raw) = problem.energy_and_gradient(&orbitals)?;
    let mut grad = project_tangent(&orbitals, &raw)?;
    let mut gnorm = real_inner(h2, &grad, &grad).sqrt() / particles;

    let preconditioner = params.precondition.then(|| Preconditioner {
        k2: problem.grid().k_squared(),
        shift: (energy.total / particles).max(1.0),
    });
    let precondition = |v: &[Complex64]| match &preconditioner {
        Some(p) => p.apply(problem, v),
        None => v.iter().map(|z| z * 0.5).collect(),
    };

    let mut trace = vec![TraceEntry { iteration: 0, energy: energy.total, gradient_norm: gnorm, step: 0.0 }];
    observer(&orbitals, &trace[0])?;
    let mut pairs: VecDeque<(Vec<Complex64>, Vec<Complex64>, f64)> = VecDeque::new();
    let mut iteration = 0;

    while gnorm >= params.gradient_tolerance {
        if iteration >= params.max_iterations {
            return Ok(SolveOutcome {
                orbitals,
                energy,
                gradient_norm: gnorm,
                iterations: iteration,
                termination: Termination::MaxIterations,
                trace,
            });
        }
        iteration += 1;

        let mut direction = two_loop(h2, &grad, &pairs, &precondition);
        direction = project_tangent(&orbitals, &direction)?;
        let mut slope = real_inner(h2, &grad, &direction);
        if !(slope < 0.0) {
            pairs.clear();
            direction = project_tangent(&orbitals, &precondition(&grad))?;
            direction.iter_mut().for_each(|z| *z = -*z);
            slope = real_inner(h2, &grad, &direction);
        }

        let (step, next, next_energy) = match line_search(problem, &orbitals, energy.total, &direction, slope, params)? {
            Some(found) => found,
            None if !pairs.is_empty() => {
                pairs.clear();
                let mut sd = project_tangent(&orbitals, &precondition(&grad))?;
                sd.iter_mut().for_each(|z| *z = -*z);
                direction = sd;
                slope = real_inner(h2, &grad, &direction);
                line_search(problem, &orbitals, energy.total, &direction, slope, params)?.ok_or(
                    Error::LineSearchFailed {
                        backtracks: params.max_backtracks,
                        step: params.backtrack.powi(params.max_backtracks as i32),
                    },
                )?
            }
            None => {
                return Err(Error::LineSearchFailed {
                    backtracks: params.max_backtracks,
                    step: params.backtrack.powi(params.max_backtracks as i32),
                })
            }
        };

        let (_, raw) = problem.energy_and_gradient(&next)?;
        let next_grad = project_tangent(&next, &raw)?;
        // Transport the previous gradient and step to the new point by projection.
        let old_grad = project_tangent(&next, &grad)?;
        let scaled: Vec<Complex64> = direction.iter().map(|z| z * step).collect();
        let s = project_tangent(&next, &scaled)?;
        let y: Vec<Complex64> = next_grad.iter().zip(&old_grad).map(|(a, b)| a - b).collect();
        let sy = real_inner(h2, &s, &y);
        let ss = real_inner(h2, &s, &s);
        let yy = real_inner(h2, &y, &y);
        if sy > 1e-12 * (ss * yy).sqrt() {
            pairs.push_back((s, y, 1.0 / sy));
            if pairs.len() > params.history {
                pairs.pop_front();
            }
        }

        orbitals = next;
        energy = next_energy;
        grad = next_grad;
        gnorm = real_inner(h2, &grad, &grad).sqrt() / particles;
        let entry = TraceEntry { iteration, energy: energy.total, gradient_norm: gnorm, step };
        trace.push(entry);
        log::debug!("iter {iteration}: E = {:.12e}, |g|/N = {gnorm:.3e}, t = {step:.3e}", energy.total);
        observer(&orbitals, &entry)?;
    }

    Ok(SolveOutcome {
        orbitals,
        energy,
        gradient_norm: gnorm,
        iterations: iteration,
        termination: Termination::Converged,
        trace,
    })
}

/// Returns `-H grad` for the limited-memory inverse Hessian `H`.
fn two_loop<P>(
    h2: f64,
    grad: &[Complex64],
    pairs: &VecDeque<(Vec<Complex64>, Vec<Complex64>, f64)>,
    precondition: &P,
) -> Vec<Complex64>
where
    P: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let mut q = grad.to_vec();
    let mut alphas = Vec::with_capacity(pairs.len());
    for (s, y, rho) in pairs.iter().rev() {
        let a = rho * real_inner(h2, s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= yi * a);
        alphas.push(a);
    }
    let mut r = precondition(&q);
    if let Some((s, y, _)) = pairs.back() {
        let py = precondition(y);
        let gamma = real_inner(h2, s, y) / real_inner(h2, y, &py);
        r.iter_mut().for_each(|z| *z *= gamma);
    }
    for ((s, y, rho), a) in pairs.iter().zip(alphas.iter().rev()) {
        let b = rho * real_inner(h2, y, &r);
        r.iter_mut().zip(s).for_each(|(ri, si)| *ri += si * (a - b));
    }
    r.iter_mut().for_each(|z| *z = -*z);
    r
}

fn line_search(
    problem: &HartreeProblem,
    orbitals: &OrbitalSet,
    energy: f64,
    direction: &[Complex64],
    slope: f64,
    params: &SolverParams,
) -> Result<Option<(f64, OrbitalSet, EnergyBreakdown)>> {
    // Allow for round-off in the energy itself near convergence.
    let noise = 8.0 * f64::EPSILON * energy.abs();
    let mut step = 1.0;
    for _ in 0..params.max_backtracks {
        match retract(orbitals, direction, step) {
            Ok(candidate) => {
                let e = problem.energy(&candidate)?;
                if e.total <= energy + params.armijo * step * slope + noise {
                    return Ok(Some((step, candidate, e)));
                }
            }
            Err(Error::RankDeficient) => {}
            Err(e) => return Err(e),
        }
        step *= params.backtrack;
    }
    Ok(None)
}
