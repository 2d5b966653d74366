//! Canned analytic fields with closed-form calculus, used for initial
//! conditions and as oracles in tests.

use super::grid::{GridSpec, ScalarField, VectorField};

/// ABC (Arnold-Beltrami-Childress) flow. On the `2 pi` box it is a curl
/// eigenfield, `curl u = u`, so its helicity integral is
/// `(A^2 + B^2 + C^2) * volume`.
pub fn abc_field(grid: GridSpec, amplitudes: [f64; 3]) -> VectorField {
    abc_field_shifted(grid, amplitudes, [0.0, 0.0, 0.0])
}

/// ABC flow with phase shifts per axis. Translations preserve the Beltrami
/// property, so `curl u = u` still holds.
pub fn abc_field_shifted(grid: GridSpec, amplitudes: [f64; 3], shifts: [f64; 3]) -> VectorField {
    let [a, b, c] = amplitudes;
    let [sx, sy, sz] = shifts;
    VectorField::from_fn(grid, |x, y, z| {
        let (x, y, z) = (x + sx, y + sy, z + sz);
        [
            a * z.sin() + c * y.cos(),
            b * x.sin() + a * z.cos(),
            c * y.sin() + b * x.cos(),
        ]
    })
}

/// Taylor-Green vortex: divergence-free, mirror-symmetric, zero helicity.
pub fn taylor_green(grid: GridSpec, amplitude: f64) -> VectorField {
    VectorField::from_fn(grid, |x, y, z| {
        [
            amplitude * x.sin() * y.cos() * z.cos(),
            -amplitude * x.cos() * y.sin() * z.cos(),
            0.0,
        ]
    })
}

/// Reflect a vector field through the `x = 0` plane: `u(x) -> R u(R x)` with
/// `R = diag(-1, 1, 1)`. Flips the sign of every helicity-type invariant.
pub fn mirror_x(field: &VectorField) -> VectorField {
    let grid = field.grid();
    let [nx, _, _] = grid.points();
    let reflect = |comp: &ScalarField, sign: f64| {
        let values = comp.values();
        let out = ndarray::Array3::from_shape_fn(grid.shape(), |(i, j, k)| {
            sign * values[[(nx - i) % nx, j, k]]
        });
        ScalarField::from_raw(grid, out)
    };
    VectorField::from_components(
        reflect(field.x(), -1.0),
        reflect(field.y(), 1.0),
        reflect(field.z(), 1.0),
    )
}
