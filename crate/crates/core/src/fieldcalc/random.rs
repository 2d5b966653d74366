//! Seeded random smooth fields: white noise shaped by a Gaussian spectral
//! envelope, fully reproducible for a fixed seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::grid::{GridSpec, ScalarField, VectorField};
use super::spectral::SpectralField;

/// Smooth random scalar with unit-order amplitude: real white noise filtered
/// by `exp(-(|k| / k0)^2)` with `k0 = n/8`, then dealiased and zero-centered.
pub fn smooth_scalar(grid: GridSpec, seed: u64, amplitude: f64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    smooth_scalar_with(grid, &mut rng, amplitude)
}

/// Same as [`smooth_scalar`] but drawing from a caller-owned generator.
pub fn smooth_scalar_with(grid: GridSpec, rng: &mut ChaCha8Rng, amplitude: f64) -> ScalarField {
    let [nx, ny, nz] = grid.points();
    let k0 = (nx.min(ny).min(nz) as f64 / 8.0).max(1.0);
    banded_scalar_with(grid, rng, amplitude, k0)
}

/// Random smooth scalar with an explicit envelope wavenumber `k0`; small
/// `k0` concentrates the field in the lowest modes, which keeps truncation
/// tails of derived nonlinear quantities negligible.
pub fn banded_scalar(grid: GridSpec, seed: u64, amplitude: f64, k0: f64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    banded_scalar_with(grid, &mut rng, amplitude, k0)
}

pub fn banded_scalar_with(
    grid: GridSpec,
    rng: &mut ChaCha8Rng,
    amplitude: f64,
    k0: f64,
) -> ScalarField {
    let noise = ScalarField::from_raw(
        grid,
        ndarray::Array3::from_shape_fn(grid.shape(), |_| rng.gen_range(-1.0..1.0)),
    );
    let hat = SpectralField::forward_unchecked(&noise);
    let mut modes = hat.modes().clone();
    for (idx, m) in modes.indexed_iter_mut() {
        let [kx, ky, kz] = hat.wavenumber_at(idx);
        let k2 = (kx * kx + ky * ky + kz * kz) as f64;
        *m *= (-k2 / (k0 * k0)).exp();
        if kx == 0 && ky == 0 && kz == 0 {
            *m = num_complex::Complex64::new(0.0, 0.0);
        }
    }
    let shaped = SpectralField::from_parts(grid, modes).backward().dealias();
    let peak = shaped.max_abs();
    if peak == 0.0 {
        shaped
    } else {
        shaped.scale(amplitude / peak)
    }
}

/// Random smooth vector field (independent components).
pub fn smooth_vector(grid: GridSpec, seed: u64, amplitude: f64) -> VectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    smooth_vector_with(grid, &mut rng, amplitude)
}

pub fn smooth_vector_with(grid: GridSpec, rng: &mut ChaCha8Rng, amplitude: f64) -> VectorField {
    VectorField::from_components(
        smooth_scalar_with(grid, rng, amplitude),
        smooth_scalar_with(grid, rng, amplitude),
        smooth_scalar_with(grid, rng, amplitude),
    )
}

/// Random divergence-free vector field (Leray projection of smooth noise,
/// rescaled to the requested peak norm).
pub fn solenoidal_vector(grid: GridSpec, seed: u64, amplitude: f64) -> VectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    solenoidal_vector_with(grid, &mut rng, amplitude)
}

pub fn solenoidal_vector_with(grid: GridSpec, rng: &mut ChaCha8Rng, amplitude: f64) -> VectorField {
    let projected = smooth_vector_with(grid, rng, 1.0).leray_project();
    let peak = projected.max_norm();
    if peak == 0.0 {
        projected
    } else {
        projected.scale(amplitude / peak)
    }
}

/// Divergence-free random field with an explicit envelope wavenumber.
pub fn banded_solenoidal_vector(grid: GridSpec, seed: u64, amplitude: f64, k0: f64) -> VectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let projected = VectorField::from_components(
        banded_scalar_with(grid, &mut rng, 1.0, k0),
        banded_scalar_with(grid, &mut rng, 1.0, k0),
        banded_scalar_with(grid, &mut rng, 1.0, k0),
    )
    .leray_project();
    let peak = projected.max_norm();
    if peak == 0.0 {
        projected
    } else {
        projected.scale(amplitude / peak)
    }
}
