//! Fourier pseudo-spectral machinery: transforms, wavenumbers, derivatives,
//! 2/3-rule dealiasing and the inverse Laplacian.
//!
//! Conventions: the forward transform is unnormalized (a constant field `c`
//! has zero mode `c * N^3`), the backward transform divides by `N^3`, so the
//! round trip is the identity per point. Derivative multipliers zero the
//! Nyquist mode, which keeps spectral derivatives real and skew-symmetric.

use ndarray::{Array3, Zip};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::f64::consts::TAU;
use std::sync::Arc;

use super::grid::{GridSpec, ScalarField, VectorField};
use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if forward {
            p.plan_fft_forward(len)
        } else {
            p.plan_fft_inverse(len)
        }
    })
}

/// Integer wavenumber for index `i` on an `n`-point axis
/// (`0, 1, ..., n/2, -(n/2-1), ..., -1`).
fn wavenumber_index(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Physical wavenumbers `2 pi k / L` per axis; the Nyquist entry is zeroed
/// so first derivatives of real fields stay real.
fn derivative_wavenumbers(n: usize, len: f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i == n / 2 {
                0.0
            } else {
                TAU * wavenumber_index(i, n) as f64 / len
            }
        })
        .collect()
}

/// Physical wavenumbers with the Nyquist mode kept (used for |k|^2 factors).
fn squared_wavenumbers(n: usize, len: f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let k = if i == n / 2 {
                (n / 2) as f64
            } else {
                wavenumber_index(i, n) as f64
            };
            TAU * k / len
        })
        .collect()
}

/// Transform every lane along `axis` in place. Lanes are independent, so the
/// slab loop parallelizes without affecting determinism.
fn fft_axis(data: &mut Array3<Complex64>, axis: usize, forward: bool) {
    let n = data.dim();
    let len = [n.0, n.1, n.2][axis];
    let fft = plan(len, forward);
    if axis == 2 {
        data.as_slice_mut()
            .expect("standard layout")
            .par_chunks_mut(len)
            .for_each(|lane| fft.process(lane));
    } else {
        // Bring the target axis last, transform contiguous lanes, restore.
        let perm: [usize; 3] = if axis == 0 { [1, 2, 0] } else { [0, 2, 1] };
        let inv: [usize; 3] = if axis == 0 { [2, 0, 1] } else { [0, 2, 1] };
        let mut scratch = data
            .view()
            .permuted_axes(perm)
            .as_standard_layout()
            .into_owned();
        scratch
            .as_slice_mut()
            .expect("owned permuted copy is standard layout")
            .par_chunks_mut(len)
            .for_each(|lane| fft.process(lane));
        data.assign(&scratch.view().permuted_axes(inv));
    }
}

fn fft3(data: &mut Array3<Complex64>, forward: bool) {
    fft_axis(data, 2, forward);
    fft_axis(data, 1, forward);
    fft_axis(data, 0, forward);
}

/// Complex Fourier coefficients of a real field.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: GridSpec,
    modes: Array3<Complex64>,
}

impl SpectralField {
    /// Forward transform. Rejects non-finite samples.
    pub fn forward(field: &ScalarField) -> Result<Self> {
        if !field.is_finite() {
            return Err(Error::NonFinite {
                context: "fft_forward",
            });
        }
        Ok(Self::forward_unchecked(field))
    }

    pub(crate) fn forward_unchecked(field: &ScalarField) -> Self {
        let mut modes = field.values().mapv(|v| Complex64::new(v, 0.0));
        fft3(&mut modes, true);
        Self {
            grid: field.grid(),
            modes,
        }
    }

    /// Backward transform with `1/N^3` normalization; imaginary residue of
    /// Hermitian-symmetric inputs is discarded.
    pub fn backward(&self) -> ScalarField {
        let mut modes = self.modes.clone();
        fft3(&mut modes, false);
        let scale = 1.0 / self.grid.cell_count() as f64;
        ScalarField::from_raw(self.grid, modes.mapv(|c| c.re * scale))
    }

    pub(crate) fn from_parts(grid: GridSpec, modes: Array3<Complex64>) -> Self {
        debug_assert_eq!(modes.dim(), grid.shape());
        Self { grid, modes }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn modes(&self) -> &Array3<Complex64> {
        &self.modes
    }

    /// Integer wavenumber triple of the mode at the given storage indices.
    pub fn wavenumber_at(&self, idx: (usize, usize, usize)) -> [i64; 3] {
        let [nx, ny, nz] = self.grid.points();
        [
            wavenumber_index(idx.0, nx),
            wavenumber_index(idx.1, ny),
            wavenumber_index(idx.2, nz),
        ]
    }

    fn map_modes(&self, f: impl Fn((usize, usize, usize), Complex64) -> Complex64 + Sync) -> Self {
        let mut modes = self.modes.clone();
        Zip::indexed(&mut modes).par_for_each(|idx, m| *m = f(idx, *m));
        Self {
            grid: self.grid,
            modes,
        }
    }

    /// Spectral partial derivative along one axis.
    pub fn derivative(&self, axis: usize) -> Self {
        let [nx, ny, nz] = self.grid.points();
        let len = self.grid.lengths();
        let k = derivative_wavenumbers([nx, ny, nz][axis], len[axis]);
        self.map_modes(|idx, m| {
            let ki = k[[idx.0, idx.1, idx.2][axis]];
            Complex64::new(0.0, ki) * m
        })
    }

    /// Multiply by `-|k|^2`.
    pub fn laplacian(&self) -> Self {
        let [nx, ny, nz] = self.grid.points();
        let len = self.grid.lengths();
        let (kx, ky, kz) = (
            squared_wavenumbers(nx, len[0]),
            squared_wavenumbers(ny, len[1]),
            squared_wavenumbers(nz, len[2]),
        );
        self.map_modes(|(i, j, k), m| {
            let k2 = kx[i] * kx[i] + ky[j] * ky[j] + kz[k] * kz[k];
            m * (-k2)
        })
    }

    /// Divide by `-|k|^2`, zeroing the mean mode (it has no inverse).
    pub fn inverse_laplacian(&self) -> Self {
        let [nx, ny, nz] = self.grid.points();
        let len = self.grid.lengths();
        let (kx, ky, kz) = (
            squared_wavenumbers(nx, len[0]),
            squared_wavenumbers(ny, len[1]),
            squared_wavenumbers(nz, len[2]),
        );
        self.map_modes(|(i, j, k), m| {
            let k2 = kx[i] * kx[i] + ky[j] * ky[j] + kz[k] * kz[k];
            if k2 == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                m / (-k2)
            }
        })
    }

    /// 2/3-rule truncation: zero every mode with `3 |k_i| > n_i` on any axis.
    pub fn dealias(&self) -> Self {
        let [nx, ny, nz] = self.grid.points();
        self.map_modes(|idx, m| {
            let kx = wavenumber_index(idx.0, nx).unsigned_abs() as usize;
            let ky = wavenumber_index(idx.1, ny).unsigned_abs() as usize;
            let kz = wavenumber_index(idx.2, nz).unsigned_abs() as usize;
            if 3 * kx > nx || 3 * ky > ny || 3 * kz > nz {
                Complex64::new(0.0, 0.0)
            } else {
                m
            }
        })
    }
}

impl ScalarField {
    pub fn gradient(&self) -> VectorField {
        let hat = SpectralField::forward_unchecked(self);
        VectorField::from_components(
            hat.derivative(0).backward(),
            hat.derivative(1).backward(),
            hat.derivative(2).backward(),
        )
    }

    pub fn laplacian(&self) -> ScalarField {
        SpectralField::forward_unchecked(self).laplacian().backward()
    }

    /// Zero-mean solution of the Poisson problem `lap(out) = self - mean(self)`.
    pub fn inverse_laplacian(&self) -> ScalarField {
        SpectralField::forward_unchecked(self)
            .inverse_laplacian()
            .backward()
    }

    /// 2/3-rule spectral truncation; a projection, applied after every
    /// pointwise product of band-limited fields.
    pub fn dealias(&self) -> ScalarField {
        SpectralField::forward_unchecked(self).dealias().backward()
    }

    /// Dealiased pointwise product.
    pub fn product_dealiased(&self, rhs: &Self) -> Self {
        self.product(rhs).dealias()
    }
}

impl VectorField {
    pub fn divergence(&self) -> ScalarField {
        let x = SpectralField::forward_unchecked(self.x()).derivative(0);
        let y = SpectralField::forward_unchecked(self.y()).derivative(1);
        let z = SpectralField::forward_unchecked(self.z()).derivative(2);
        let mut modes = x.modes.clone();
        Zip::from(&mut modes)
            .and(&y.modes)
            .and(&z.modes)
            .for_each(|m, &b, &c| *m += b + c);
        SpectralField {
            grid: self.grid(),
            modes,
        }
        .backward()
    }

    pub fn curl(&self) -> VectorField {
        let x = SpectralField::forward_unchecked(self.x());
        let y = SpectralField::forward_unchecked(self.y());
        let z = SpectralField::forward_unchecked(self.z());
        let combine = |a: &SpectralField, ai: usize, b: &SpectralField, bi: usize| {
            let da = a.derivative(ai);
            let db = b.derivative(bi);
            let mut modes = da.modes;
            Zip::from(&mut modes).and(&db.modes).for_each(|m, &s| *m -= s);
            SpectralField {
                grid: self.grid(),
                modes,
            }
            .backward()
        };
        VectorField::from_components(
            combine(&z, 1, &y, 2),
            combine(&x, 2, &z, 0),
            combine(&y, 0, &x, 1),
        )
    }

    pub fn dealias(&self) -> VectorField {
        self.map_components(|c| c.dealias())
    }

    /// Dealiased cross product.
    pub fn cross_dealiased(&self, rhs: &Self) -> VectorField {
        self.cross(rhs).dealias()
    }

    /// Dealiased scalar product.
    pub fn dot_dealiased(&self, rhs: &Self) -> ScalarField {
        self.dot(rhs).dealias()
    }

    /// Dealiased scaling by a scalar field.
    pub fn scaled_by_dealiased(&self, s: &ScalarField) -> VectorField {
        self.scaled_by(s).dealias()
    }

    /// Dealiased directional derivative `<self, grad f>`.
    pub fn directional_derivative(&self, f: &ScalarField) -> ScalarField {
        self.dot(&f.gradient()).dealias()
    }

    /// Dealiased advection `(self . grad) w`, component by component.
    pub fn advect_vector(&self, w: &VectorField) -> VectorField {
        VectorField::from_components(
            self.directional_derivative(w.x()),
            self.directional_derivative(w.y()),
            self.directional_derivative(w.z()),
        )
    }

    /// Remove the gradient part: `F - grad(lap^-1(div F))`. Idempotent, and
    /// the result has spectral divergence at rounding level.
    pub fn leray_project(&self) -> VectorField {
        let potential = self.divergence().inverse_laplacian();
        self - &potential.gradient()
    }

    /// Coulomb-gauge vector potential of a zero-mean solenoidal field:
    /// `A = curl((-lap)^-1 self)`, so `curl A = self` and `div A = 0`.
    pub fn vector_potential(&self) -> VectorField {
        self.map_components(|c| -&c.inverse_laplacian()).curl()
    }

    /// Apply the transposed velocity gradient: `out_i = sum_j w_j d_i self_j`
    /// (the non-advective half of the Lie derivative of a one-form).
    pub fn grad_transpose_apply(&self, w: &VectorField) -> VectorField {
        let mut out = self.x().gradient().scaled_by(w.x());
        out = &out + &self.y().gradient().scaled_by(w.y());
        out = &out + &self.z().gradient().scaled_by(w.z());
        out.dealias()
    }
}
