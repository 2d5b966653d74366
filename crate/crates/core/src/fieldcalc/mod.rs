//! Periodic-box spectral field calculus: grids and fields, Fourier
//! transforms and derivatives, the discrete exterior calculus, and a
//! particle tracer.

pub mod analytic;
pub mod forms;
pub mod grid;
pub mod particles;
pub mod random;
pub mod spectral;

pub use forms::{exterior_d, interior, lie_derivative, lie_derivative_vector, wedge, KForm};
pub use grid::{GridSpec, ScalarField, VectorField};
pub use particles::{advect_particles, Interpolation, ParticleSet};
pub use spectral::SpectralField;
