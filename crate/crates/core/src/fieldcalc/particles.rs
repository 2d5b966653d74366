//! Passive particle tracing along a velocity field: one classical
//! Runge-Kutta stage per call, positions wrapped back into the box.

use super::grid::{GridSpec, VectorField};
use super::spectral::SpectralField;

/// Particle positions inside the periodic box; every coordinate is kept
/// reduced modulo the box lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSet {
    grid: GridSpec,
    positions: Vec<[f64; 3]>,
}

impl ParticleSet {
    pub fn new(grid: GridSpec, positions: Vec<[f64; 3]>) -> Self {
        let positions = positions
            .into_iter()
            .map(|p| wrap(grid, p))
            .collect();
        Self { grid, positions }
    }

    pub fn positions(&self) -> &[[f64; 3]] {
        &self.positions
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }
}

fn wrap(grid: GridSpec, p: [f64; 3]) -> [f64; 3] {
    let len = grid.lengths();
    [
        p[0].rem_euclid(len[0]),
        p[1].rem_euclid(len[1]),
        p[2].rem_euclid(len[2]),
    ]
}

/// How the velocity field is evaluated between collocation points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    /// Trilinear interpolation of the grid samples (cheap, second order).
    #[default]
    Trilinear,
    /// Exact evaluation of the trigonometric interpolant (spectral accuracy,
    /// costs one full mode sum per sample). For convergence studies.
    Spectral,
}

/// Advance every particle by one 4-stage Runge-Kutta step of size `dt`
/// through the (time-frozen) velocity field.
pub fn advect_particles(
    particles: &ParticleSet,
    velocity: &VectorField,
    dt: f64,
    interpolation: Interpolation,
) -> ParticleSet {
    assert!(dt.is_finite(), "advection step must be finite");
    let sampler = Sampler::new(velocity, interpolation);
    let grid = particles.grid;
    let moved = particles
        .positions
        .iter()
        .map(|&p| {
            let k1 = sampler.velocity(p);
            let k2 = sampler.velocity(offset(p, k1, dt / 2.0));
            let k3 = sampler.velocity(offset(p, k2, dt / 2.0));
            let k4 = sampler.velocity(offset(p, k3, dt));
            let mut out = p;
            for a in 0..3 {
                out[a] += dt / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
            }
            wrap(grid, out)
        })
        .collect();
    ParticleSet {
        grid,
        positions: moved,
    }
}

fn offset(p: [f64; 3], v: [f64; 3], h: f64) -> [f64; 3] {
    [p[0] + h * v[0], p[1] + h * v[1], p[2] + h * v[2]]
}

enum Sampler<'a> {
    Trilinear(&'a VectorField),
    Spectral([SpectralField; 3], GridSpec),
}

impl<'a> Sampler<'a> {
    fn new(velocity: &'a VectorField, interpolation: Interpolation) -> Self {
        match interpolation {
            Interpolation::Trilinear => Sampler::Trilinear(velocity),
            Interpolation::Spectral => Sampler::Spectral(
                [
                    SpectralField::forward_unchecked(velocity.x()),
                    SpectralField::forward_unchecked(velocity.y()),
                    SpectralField::forward_unchecked(velocity.z()),
                ],
                velocity.grid(),
            ),
        }
    }

    fn velocity(&self, p: [f64; 3]) -> [f64; 3] {
        match self {
            Sampler::Trilinear(field) => trilinear(field, p),
            Sampler::Spectral(hats, grid) => {
                let mut out = [0.0; 3];
                for (axis, hat) in hats.iter().enumerate() {
                    out[axis] = fourier_eval(hat, *grid, p);
                }
                out
            }
        }
    }
}

fn trilinear(field: &VectorField, p: [f64; 3]) -> [f64; 3] {
    let grid = field.grid();
    let p = wrap(grid, p);
    let n = grid.points();
    let h = grid.spacing();
    let mut base = [0usize; 3];
    let mut frac = [0f64; 3];
    for a in 0..3 {
        let s = p[a] / h[a];
        let i = s.floor() as usize;
        base[a] = i % n[a];
        frac[a] = s - s.floor();
    }
    let mut out = [0.0; 3];
    for axis in 0..3 {
        let values = field.comp(axis).values();
        let mut acc = 0.0;
        for (di, wi) in [(0, 1.0 - frac[0]), (1, frac[0])] {
            for (dj, wj) in [(0, 1.0 - frac[1]), (1, frac[1])] {
                for (dk, wk) in [(0, 1.0 - frac[2]), (1, frac[2])] {
                    let idx = [
                        (base[0] + di) % n[0],
                        (base[1] + dj) % n[1],
                        (base[2] + dk) % n[2],
                    ];
                    acc += wi * wj * wk * values[[idx[0], idx[1], idx[2]]];
                }
            }
        }
        out[axis] = acc;
    }
    out
}

/// Evaluate the trigonometric interpolant at an arbitrary point by direct
/// mode summation.
fn fourier_eval(hat: &SpectralField, grid: GridSpec, p: [f64; 3]) -> f64 {
    use std::f64::consts::TAU;
    let len = grid.lengths();
    let scale = 1.0 / grid.cell_count() as f64;
    let mut acc = 0.0;
    for (idx, mode) in hat.modes().indexed_iter() {
        let k = hat.wavenumber_at(idx);
        let phase = TAU
            * (k[0] as f64 * p[0] / len[0]
                + k[1] as f64 * p[1] / len[1]
                + k[2] as f64 * p[2] / len[2]);
        acc += mode.re * phase.cos() - mode.im * phase.sin();
    }
    acc * scale
}
