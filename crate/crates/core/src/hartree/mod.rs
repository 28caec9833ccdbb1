//! Self-consistent average-field (Hartree) ground states of trapped anyons.

mod eigensolver;
mod energy;
mod lbfgs;
mod orbitals;
mod stiefel;

pub use eigensolver::{initialize_orbitals, lowest_eigenpairs, EigenOptions, Eigenpairs, InitMode};
pub use energy::{compute_current, EnergyBreakdown, HartreeProblem};
pub use lbfgs::{minimize, SolveOutcome, SolverParams, Termination, TraceEntry};
pub use orbitals::{compute_density, OrbitalSet};
pub use stiefel::{block_norm, project_tangent, real_inner, retract};

#[cfg(test)]
mod tests;
