//! Numerical laboratory for ideal compressible MHD and incompressible Euler
//! flow on the periodic 3-D box, built around a Fourier pseudo-spectral
//! discretization with 2/3-rule dealiasing.
//!
//! The crate provides:
//! * [`fieldcalc`] — spectral field calculus and discrete exterior calculus;
//! * [`mhd`] — the compressible superfluid MHD system with magnetic
//!   potentials carried in two gauges;
//! * [`euler`] — the Leray-projected incompressible solver with vorticity
//!   and frozen-in diagnostics;
//! * [`invariants`] — helicity-type invariant hierarchies generated by
//!   iterated Lie derivatives, plus drift reporting;
//! * [`hamiltonian`] — the semidirect-product Poisson bracket engine with a
//!   registry of functionals and their variational derivatives;
//! * [`oracle`] — a deliberately independent finite-difference reference
//!   implementation used to cross-check the spectral hierarchies.

pub mod error;
pub mod euler;
pub mod fieldcalc;
pub mod hamiltonian;
pub mod invariants;
pub mod mhd;
pub mod oracle;

pub use error::{Error, Result};
