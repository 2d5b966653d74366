//! Independent reference implementations used to cross-check the spectral
//! engine: 6th-order centered finite differences on the periodic grid and
//! plain trapezoidal quadrature. Nothing here touches the Fourier machinery;
//! agreement between the two routes is evidence, not construction.

use ndarray::Array3;

use crate::fieldcalc::{ScalarField, VectorField};

/// 6th-order centered first derivative along `axis`, periodic wrap.
pub fn fd_derivative(f: &ScalarField, axis: usize) -> ScalarField {
    let grid = f.grid();
    let n = grid.points()[axis];
    let h = grid.spacing()[axis];
    let values = f.values();
    let shifted = |idx: (usize, usize, usize), offset: i64| -> f64 {
        let mut i = [idx.0 as i64, idx.1 as i64, idx.2 as i64];
        i[axis] = (i[axis] + offset).rem_euclid(n as i64);
        values[[i[0] as usize, i[1] as usize, i[2] as usize]]
    };
    let out = Array3::from_shape_fn(grid.shape(), |idx| {
        (45.0 * (shifted(idx, 1) - shifted(idx, -1))
            - 9.0 * (shifted(idx, 2) - shifted(idx, -2))
            + (shifted(idx, 3) - shifted(idx, -3)))
            / (60.0 * h)
    });
    ScalarField::from_raw(grid, out)
}

/// Directional derivative `<v, grad f>` with finite differences, no
/// dealiasing.
pub fn fd_directional_derivative(v: &VectorField, f: &ScalarField) -> ScalarField {
    let mut out = v.comp(0).product(&fd_derivative(f, 0));
    for axis in 1..3 {
        out = &out + &v.comp(axis).product(&fd_derivative(f, axis));
    }
    out
}

/// Finite-difference curl.
pub fn fd_curl(u: &VectorField) -> VectorField {
    VectorField::from_components(
        &fd_derivative(u.z(), 1) - &fd_derivative(u.y(), 2),
        &fd_derivative(u.x(), 2) - &fd_derivative(u.z(), 0),
        &fd_derivative(u.y(), 0) - &fd_derivative(u.x(), 1),
    )
}

/// Trapezoidal quadrature; on the uniform periodic grid this is the plain
/// sample sum times the cell volume (summed sequentially, independent of the
/// pairwise reduction used by the spectral path).
pub fn trapezoid_integrate(f: &ScalarField) -> f64 {
    let grid = f.grid();
    let cell = grid.volume() / grid.cell_count() as f64;
    f.values().iter().sum::<f64>() * cell
}

/// Full hierarchy oracle: `values[n] = integral(rho * L_v^n f0)` with the
/// Lie steps done by finite differences and the quadrature by trapezoid.
pub fn fd_hierarchy(
    v: &VectorField,
    rho: &ScalarField,
    f0: &ScalarField,
    order: usize,
) -> Vec<f64> {
    let mut values = Vec::with_capacity(order + 1);
    let mut f = f0.clone();
    values.push(trapezoid_integrate(&rho.product(&f)));
    for _ in 0..order {
        f = fd_directional_derivative(v, &f);
        values.push(trapezoid_integrate(&rho.product(&f)));
    }
    values
}
