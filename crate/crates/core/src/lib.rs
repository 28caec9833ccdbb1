//! Ground states of trapped two-dimensional anyons in the Hartree
//! (fermionic Chern-Simons-Schrodinger) approximation, with the Thomas-Fermi and
//! magnetic Thomas-Fermi theories they are compared against.
//!
//! Units are `hbar = c = 2m = 1`; the trap `V` is multiplied by the particle number
//! `N` so that the cloud has size of order one.

pub mod analytic;
pub mod error;
pub mod gauge;
pub mod grid;
pub mod hartree;
pub mod io;
pub mod observables;

pub use error::{Error, Result};
