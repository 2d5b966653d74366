//! Periodic grid description and real-valued scalar / vector fields.

use ndarray::{Array3, Zip};
use std::f64::consts::TAU;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Uniform collocation grid on the periodic box `[0,Lx) x [0,Ly) x [0,Lz)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n: [usize; 3],
    len: [f64; 3],
}

impl GridSpec {
    /// Cubic box of `n` points per axis with side length `2 pi`.
    pub fn cubic(n: usize) -> Result<Self> {
        Self::new([n, n, n], [TAU, TAU, TAU])
    }

    pub fn new(n: [usize; 3], len: [f64; 3]) -> Result<Self> {
        for (i, &ni) in n.iter().enumerate() {
            if ni < 4 || ni % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "axis {i} has {ni} points; need an even count >= 4"
                )));
            }
        }
        for (i, &li) in len.iter().enumerate() {
            if !(li > 0.0 && li.is_finite()) {
                return Err(Error::InvalidGrid(format!("axis {i} has length {li}")));
            }
        }
        Ok(Self { n, len })
    }

    pub fn points(&self) -> [usize; 3] {
        self.n
    }

    pub fn lengths(&self) -> [f64; 3] {
        self.len
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.n[0], self.n[1], self.n[2])
    }

    /// Grid spacing per axis.
    pub fn spacing(&self) -> [f64; 3] {
        [
            self.len[0] / self.n[0] as f64,
            self.len[1] / self.n[1] as f64,
            self.len[2] / self.n[2] as f64,
        ]
    }

    pub fn min_spacing(&self) -> f64 {
        let h = self.spacing();
        h[0].min(h[1]).min(h[2])
    }

    pub fn volume(&self) -> f64 {
        self.len[0] * self.len[1] * self.len[2]
    }

    pub fn cell_count(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    /// Coordinates of the collocation point with the given indices.
    pub fn coord(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        let h = self.spacing();
        [i as f64 * h[0], j as f64 * h[1], k as f64 * h[2]]
    }
}

/// Real scalar samples on a [`GridSpec`]. All values are finite by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Array3<f64>,
}

impl ScalarField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: Array3::zeros(grid.shape()),
        }
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        assert!(c.is_finite(), "constant field value must be finite");
        Self {
            grid,
            values: Array3::from_elem(grid.shape(), c),
        }
    }

    /// Sample a closure of the physical coordinates at every grid point.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let h = grid.spacing();
        let values = Array3::from_shape_fn(grid.shape(), |(i, j, k)| {
            let v = f(i as f64 * h[0], j as f64 * h[1], k as f64 * h[2]);
            assert!(v.is_finite(), "non-finite sample at ({i},{j},{k})");
            v
        });
        Self { grid, values }
    }

    /// Wrap existing samples, rejecting non-finite entries.
    pub fn from_values(grid: GridSpec, values: Array3<f64>) -> Result<Self> {
        if values.dim() != grid.shape() {
            return Err(Error::GridMismatch { op: "from_values" });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite {
                context: "ScalarField::from_values",
            });
        }
        Ok(Self { grid, values })
    }

    /// Internal constructor for values produced by our own finite arithmetic.
    pub(crate) fn from_raw(grid: GridSpec, values: Array3<f64>) -> Self {
        debug_assert_eq!(values.dim(), grid.shape());
        Self { grid, values }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn values(&self) -> &Array3<f64> {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.mapv(|v| f(v)),
        }
    }

    /// Pointwise product. Callers quadratically coupling band-limited fields
    /// should dealias the result (see [`ScalarField::dealias`]).
    pub fn product(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a * b)
    }

    /// Pointwise reciprocal; errors when the field is not strictly positive.
    pub fn reciprocal(&self, context: &'static str) -> Result<Self> {
        let min = self.min();
        if min <= 0.0 {
            return Err(Error::NonPositiveDensity { min, context });
        }
        Ok(self.map(|v| 1.0 / v))
    }

    pub fn zip_with(&self, rhs: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.grid, rhs.grid, "scalar fields live on different grids");
        let mut out = self.values.clone();
        Zip::from(&mut out).and(&rhs.values).for_each(|o, &b| *o = f(*o, b));
        Self {
            grid: self.grid,
            values: out,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    /// Mean over grid points, summed in a fixed pairwise order over z-slabs.
    pub fn mean(&self) -> f64 {
        slab_pairwise_sum(&self.values) / self.grid.cell_count() as f64
    }

    /// `integral over the box = mean * volume`; spectrally exact for
    /// trigonometric integrands.
    pub fn integrate(&self) -> f64 {
        self.mean() * self.grid.volume()
    }
}

/// Deterministic reduction: sequential sums per z-slab, pairwise across slabs.
fn slab_pairwise_sum(values: &Array3<f64>) -> f64 {
    let nz = values.dim().2;
    let mut partials: Vec<f64> = (0..nz)
        .map(|k| {
            values
                .index_axis(ndarray::Axis(2), k)
                .iter()
                .fold(0.0, |acc, v| acc + v)
        })
        .collect();
    while partials.len() > 1 {
        let half = partials.len().div_ceil(2);
        for i in 0..partials.len() / 2 {
            partials[i] = partials[2 * i] + partials[2 * i + 1];
        }
        if partials.len() % 2 == 1 {
            partials[half - 1] = partials[partials.len() - 1];
        }
        partials.truncate(half);
    }
    partials.first().copied().unwrap_or(0.0)
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: Self) -> ScalarField {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: Self) -> ScalarField {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &ScalarField {
    type Output = ScalarField;
    fn mul(self, s: f64) -> ScalarField {
        self.scale(s)
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.scale(-1.0)
    }
}

/// Three scalar components sharing one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: [ScalarField; 3],
}

impl VectorField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            components: [
                ScalarField::zeros(grid),
                ScalarField::zeros(grid),
                ScalarField::zeros(grid),
            ],
        }
    }

    pub fn from_components(x: ScalarField, y: ScalarField, z: ScalarField) -> Self {
        assert!(
            x.grid() == y.grid() && y.grid() == z.grid(),
            "vector components live on different grids"
        );
        Self {
            components: [x, y, z],
        }
    }

    /// Sample a closure returning all three components at once.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64, f64) -> [f64; 3]) -> Self {
        let sample = |axis: usize| ScalarField::from_fn(grid, |x, y, z| f(x, y, z)[axis]);
        Self {
            components: [sample(0), sample(1), sample(2)],
        }
    }

    pub fn constant(grid: GridSpec, v: [f64; 3]) -> Self {
        Self {
            components: [
                ScalarField::constant(grid, v[0]),
                ScalarField::constant(grid, v[1]),
                ScalarField::constant(grid, v[2]),
            ],
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.components[0].grid()
    }

    pub fn comp(&self, axis: usize) -> &ScalarField {
        &self.components[axis]
    }

    pub fn x(&self) -> &ScalarField {
        &self.components[0]
    }

    pub fn y(&self) -> &ScalarField {
        &self.components[1]
    }

    pub fn z(&self) -> &ScalarField {
        &self.components[2]
    }

    pub fn map_components(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self {
            components: [f(&self.components[0]), f(&self.components[1]), f(&self.components[2])],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(ScalarField::is_finite)
    }

    /// Pointwise scalar product `<self, rhs>`.
    pub fn dot(&self, rhs: &Self) -> ScalarField {
        let mut out = self.components[0].product(&rhs.components[0]);
        for axis in 1..3 {
            out = &out + &self.components[axis].product(&rhs.components[axis]);
        }
        out
    }

    /// Pointwise cross product `self x rhs`.
    pub fn cross(&self, rhs: &Self) -> Self {
        let [ax, ay, az] = &self.components;
        let [bx, by, bz] = &rhs.components;
        Self::from_components(
            &ay.product(bz) - &az.product(by),
            &az.product(bx) - &ax.product(bz),
            &ax.product(by) - &ay.product(bx),
        )
    }

    /// Scale every component by the same scalar field.
    pub fn scaled_by(&self, s: &ScalarField) -> Self {
        self.map_components(|c| c.product(s))
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_components(|c| c.scale(s))
    }

    /// Max over grid points of the Euclidean norm.
    pub fn max_norm(&self) -> f64 {
        let [x, y, z] = &self.components;
        let mut m = 0.0_f64;
        Zip::from(x.values())
            .and(y.values())
            .and(z.values())
            .for_each(|&a, &b, &c| {
                m = m.max(a * a + b * b + c * c);
            });
        m.sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .map(ScalarField::max_abs)
            .fold(0.0, f64::max)
    }
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: Self) -> VectorField {
        VectorField::from_components(
            self.x() + rhs.x(),
            self.y() + rhs.y(),
            self.z() + rhs.z(),
        )
    }
}

impl Sub for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: Self) -> VectorField {
        VectorField::from_components(
            self.x() - rhs.x(),
            self.y() - rhs.y(),
            self.z() - rhs.z(),
        )
    }
}

impl Mul<f64> for &VectorField {
    type Output = VectorField;
    fn mul(self, s: f64) -> VectorField {
        self.scale(s)
    }
}

impl Neg for &VectorField {
    type Output = VectorField;
    fn neg(self) -> VectorField {
        self.scale(-1.0)
    }
}
