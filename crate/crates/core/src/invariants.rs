//! Invariant-generation engine: hierarchies of helicity-type functionals
//! built by iterating the Lie derivative along a frozen-in generator, plus
//! the named helicities and drift reporting.
//!
//! The hierarchies are computed on scalar densities. For a generator `v`
//! with `div(rho v) = 0` the mass form `rho dV` is invariant under `v`, so
//! the Lie derivative of the 3-form `rho f dV` reduces to the scalar
//! recursion `f_{n+1} = <v, grad f_n>`; each invariant is then the
//! quadrature of `rho f_n`. The solenoidality residual that justifies the
//! reduction is always computed and attached to the result.

use crate::error::{Error, Result};
use crate::euler::EulerState;
use crate::fieldcalc::{ScalarField, VectorField};
use crate::mhd::MhdState;

/// Default cap on the hierarchy order: each Lie derivative costs roughly one
/// order of effective resolution, and beyond n = 4 at 32^3 the drift is
/// dominated by truncation noise.
pub const DEFAULT_MAX_ORDER: usize = 4;

/// Residual threshold (relative to the flux magnitude) above which the
/// scalar reduction of the hierarchy is flagged as unreliable.
pub const SOLENOIDALITY_WARN: f64 = 1e-8;

/// Scalar fields `f_0 .. f_N` of one hierarchy together with the
/// solenoidality diagnostic of the mass flux `rho v`.
#[derive(Debug, Clone)]
pub struct ScalarHierarchy {
    pub fields: Vec<ScalarField>,
    /// `|div(rho v)|_inf`.
    pub flux_divergence: f64,
    /// `|rho v|_inf`, the scale against which the residual is judged.
    pub flux_scale: f64,
}

impl ScalarHierarchy {
    /// Whether the cancellation `L_v(rho dV) = 0` holds to tolerance.
    pub fn solenoidal_ok(&self) -> bool {
        self.flux_divergence <= SOLENOIDALITY_WARN * self.flux_scale.max(1e-30)
    }
}

/// Iterated dealiased directional derivatives `f_{n+1} = <v, grad f_n>`,
/// starting from `f_0 = f`.
pub fn lie_scalar_hierarchy(
    v: &VectorField,
    rho: &ScalarField,
    f: &ScalarField,
    order: usize,
    max_order: usize,
) -> Result<ScalarHierarchy> {
    if order > max_order {
        return Err(Error::HierarchyOrder {
            requested: order,
            max: max_order,
        });
    }
    let flux = v.scaled_by_dealiased(rho);
    let flux_divergence = flux.divergence().max_abs();
    let flux_scale = flux.max_abs();

    let mut fields = Vec::with_capacity(order + 1);
    fields.push(f.clone());
    for n in 0..order {
        let next = v.directional_derivative(&fields[n]);
        fields.push(next);
    }
    Ok(ScalarHierarchy {
        fields,
        flux_divergence,
        flux_scale,
    })
}

/// Values `integral(rho f_n)` of a hierarchy plus its diagnostics.
///
/// For orders n >= 1 the exact value of the integral is zero: the integrand
/// is `rho L_v(...) = <rho v, grad(...)>`, a divergence when `div(rho v) =
/// 0`, so it integrates away over the periodic box. The computed values
/// measure how well the discretization reproduces that cancellation, and
/// meaningful relative statements about them are against the integrand mass
/// `integral(|rho f_n|)` carried in `integrand_scales`, not against the
/// vanishing value itself.
#[derive(Debug, Clone)]
pub struct InvariantHierarchy {
    pub values: Vec<f64>,
    /// `integral(|rho f_n|)` per order, the natural drift normalization.
    pub integrand_scales: Vec<f64>,
    pub flux_divergence: f64,
    pub flux_scale: f64,
}

impl InvariantHierarchy {
    pub fn solenoidal_ok(&self) -> bool {
        self.flux_divergence <= SOLENOIDALITY_WARN * self.flux_scale.max(1e-30)
    }
}

fn hierarchy_values(
    v: &VectorField,
    rho: &ScalarField,
    f0: &ScalarField,
    order: usize,
    max_order: usize,
) -> Result<InvariantHierarchy> {
    let hierarchy = lie_scalar_hierarchy(v, rho, f0, order, max_order)?;
    let mut values = Vec::with_capacity(order + 1);
    let mut integrand_scales = Vec::with_capacity(order + 1);
    for f in &hierarchy.fields {
        let density = rho.product(f);
        values.push(density.integrate());
        integrand_scales.push(density.map(f64::abs).integrate());
    }
    Ok(InvariantHierarchy {
        values,
        integrand_scales,
        flux_divergence: hierarchy.flux_divergence,
        flux_scale: hierarchy.flux_scale,
    })
}

/// Magnetic helicity `integral <A, curl A>`; the field is recomputed from
/// the potential for self-consistency.
pub fn magnetic_helicity(state: &MhdState) -> f64 {
    state.a.dot(&state.a.curl()).integrate()
}

/// Kinematic helicity `integral <u, curl u>`.
pub fn kinematic_helicity(u: &VectorField) -> f64 {
    u.dot(&u.curl()).integrate()
}

/// Cross helicity `integral <u, B>` (extra functional for the bracket
/// consistency suite; not conserved for non-isentropic states).
pub fn cross_helicity(state: &MhdState) -> f64 {
    state.u.dot(&state.b).integrate()
}

/// Which magnetic potential feeds the helicity density `<B, A> / rho`.
///
/// The Weyl-gauge potential (`dA/dt = u x B`) keeps the field two-form
/// invariant and is the natural choice at order 0; the transport gauge keeps
/// the potential one-form itself invariant, which the hierarchy proof needs
/// for orders >= 1. Both tracks agree at order 0 up to a gauge term that
/// vanishes with `div B = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeTrack {
    Weyl,
    Transport,
}

/// Hierarchy of magnetic-helicity invariants
/// `H_n = integral rho L_v^n (rho^-1 <B, A>)` with generator `v = rho^-1 B`.
pub fn magnetic_helicity_hierarchy(
    state: &MhdState,
    order: usize,
    track: GaugeTrack,
    max_order: usize,
) -> Result<InvariantHierarchy> {
    let rho_inv = state.rho.reciprocal("magnetic_helicity_hierarchy")?;
    let v = state.b.scaled_by_dealiased(&rho_inv);
    let potential = match track {
        GaugeTrack::Weyl => &state.a,
        GaugeTrack::Transport => &state.a_g,
    };
    let f0 = state.b.dot(potential).product(&rho_inv);
    hierarchy_values(&v, &state.rho, &f0, order, max_order)
}

/// Generalized helicity invariants of the incompressible flow:
/// `H_n = integral rho L_v^n (rho^-1 <u, xi>)` with `v = rho^-1 xi`.
/// At order 0 with unit density this is exactly the kinematic helicity.
pub fn generalized_helicity_hierarchy(
    state: &EulerState,
    order: usize,
    max_order: usize,
) -> Result<InvariantHierarchy> {
    let rho_inv = state.rho.reciprocal("generalized_helicity_hierarchy")?;
    let xi = state.u.curl();
    let v = xi.scaled_by_dealiased(&rho_inv);
    let f0 = state.u.dot(&xi).product(&rho_inv);
    hierarchy_values(&v, &state.rho, &f0, order, max_order)
}

/// Boundary-condition-free modification built on the shifted one-form:
/// `M_n = integral rho L_v^n (rho^-1 <u - grad phi, xi>)`.
pub fn m_hierarchy(state: &EulerState, order: usize, max_order: usize) -> Result<InvariantHierarchy> {
    let rho_inv = state.rho.reciprocal("m_hierarchy")?;
    let xi = state.u.curl();
    let v = xi.scaled_by_dealiased(&rho_inv);
    let shifted = &state.u - &state.phi.gradient();
    let f0 = shifted.dot(&xi).product(&rho_inv);
    hierarchy_values(&v, &state.rho, &f0, order, max_order)
}

/// Time trace of one invariant.
#[derive(Debug, Clone)]
pub struct InvariantSeries {
    name: String,
    order: usize,
    times: Vec<f64>,
    values: Vec<f64>,
}

impl InvariantSeries {
    pub fn new(name: impl Into<String>, order: usize) -> Self {
        Self {
            name: name.into(),
            order,
            times: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Append a sample; times must be strictly increasing.
    pub fn push(&mut self, t: f64, value: f64) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(Error::Config(format!(
                    "series '{}': time {t} does not increase past {last}",
                    self.name
                )));
            }
        }
        self.times.push(t);
        self.values.push(value);
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Summary of how far a series wandered from its initial value.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport {
    pub name: String,
    pub order: usize,
    pub baseline: f64,
    pub max_abs_drift: f64,
    /// `max_abs_drift / max(|baseline|, series sup-norm, 1e-30)`.
    pub rel_drift: f64,
}

pub fn drift_report(series: &InvariantSeries) -> Result<DriftReport> {
    if series.is_empty() {
        return Err(Error::SeriesTooShort { needed: 1, got: 0 });
    }
    let baseline = series.values[0];
    let max_abs_drift = series
        .values
        .iter()
        .map(|v| (v - baseline).abs())
        .fold(0.0, f64::max);
    let sup = series.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let scale = baseline.abs().max(sup).max(1e-30);
    Ok(DriftReport {
        name: series.name.clone(),
        order: series.order,
        baseline,
        max_abs_drift,
        rel_drift: max_abs_drift / scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldcalc::analytic::{abc_field, mirror_x, taylor_green};
    use crate::fieldcalc::{GridSpec, ScalarField, VectorField};
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn grid() -> GridSpec {
        GridSpec::cubic(16).unwrap()
    }

    fn unit_density_state(grid: GridSpec, b: VectorField) -> MhdState {
        let a = b.vector_potential();
        let b = a.curl();
        MhdState {
            u: VectorField::zeros(grid),
            rho: ScalarField::constant(grid, 1.0),
            eta: ScalarField::zeros(grid),
            a_g: a.clone(),
            a,
            b,
            t: 0.0,
        }
    }

    #[test]
    fn hierarchy_of_constant_is_zero_above_base() {
        let g = grid();
        let v = crate::fieldcalc::random::solenoidal_vector(g, 2, 1.0);
        let rho = ScalarField::constant(g, 1.0);
        let f = ScalarField::constant(g, 3.14);
        let h = lie_scalar_hierarchy(&v, &rho, &f, 3, DEFAULT_MAX_ORDER).unwrap();
        assert_eq!(h.fields.len(), 4);
        for field in &h.fields[1..] {
            assert!(field.max_abs() < 1e-12);
        }
        assert!(h.solenoidal_ok());
    }

    #[test]
    fn hierarchy_rotates_sine_by_quarter_periods() {
        let g = grid();
        let v = VectorField::constant(g, [1.0, 0.0, 0.0]);
        let rho = ScalarField::constant(g, 1.0);
        let f = ScalarField::from_fn(g, |x, _, _| x.sin());
        let h = lie_scalar_hierarchy(&v, &rho, &f, 4, DEFAULT_MAX_ORDER).unwrap();
        for (n, field) in h.fields.iter().enumerate() {
            let expected = ScalarField::from_fn(g, |x, _, _| (x + n as f64 * FRAC_PI_2).sin());
            assert!(
                (field - &expected).max_abs() < 1e-10,
                "order {n} deviates"
            );
        }
    }

    #[test]
    fn hierarchy_order_zero_and_cap() {
        let g = grid();
        let v = VectorField::zeros(g);
        let rho = ScalarField::constant(g, 1.0);
        let f = ScalarField::from_fn(g, |x, _, _| x.cos());
        let h = lie_scalar_hierarchy(&v, &rho, &f, 0, DEFAULT_MAX_ORDER).unwrap();
        assert_eq!(h.fields.len(), 1);
        assert_eq!(h.fields[0], f);
        assert!(matches!(
            lie_scalar_hierarchy(&v, &rho, &f, 5, DEFAULT_MAX_ORDER),
            Err(Error::HierarchyOrder { requested: 5, max: 4 })
        ));
    }

    #[test]
    fn magnetic_helicity_closed_forms() {
        let g = grid();
        let abc = abc_field(g, [1.0, 1.0, 1.0]);
        let state = MhdState {
            a: abc.clone(),
            b: abc.clone(),
            ..unit_density_state(g, abc.clone())
        };
        let expected = 3.0 * g.volume();
        assert_relative_eq!(magnetic_helicity(&state), expected, max_relative = 1e-12);

        // Pure gradient potential: <grad g, curl grad g> integrates to zero.
        let gradient = ScalarField::from_fn(g, |x, y, _| (x + y).sin()).gradient();
        let state = MhdState {
            a: gradient,
            ..unit_density_state(g, VectorField::zeros(g))
        };
        assert!(magnetic_helicity(&state).abs() < 1e-12 * g.volume());

        // Mirror reflection flips the sign.
        let mirrored = mirror_x(&abc);
        let state = MhdState {
            a: mirrored.clone(),
            b: mirrored.curl(),
            ..unit_density_state(g, VectorField::zeros(g))
        };
        assert_relative_eq!(magnetic_helicity(&state), -expected, max_relative = 1e-12);
    }

    #[test]
    fn gauge_shift_leaves_magnetic_helicity() {
        let g = grid();
        let state = MhdState::random(g, 77);
        let h0 = magnetic_helicity(&state);
        let shifted = MhdState {
            a: &state.a + &ScalarField::from_fn(g, |x, y, z| x.sin() + (y - z).cos()).gradient(),
            ..state
        };
        let h1 = magnetic_helicity(&shifted);
        assert!(
            (h0 - h1).abs() < 1e-11 * h0.abs().max(1.0),
            "gauge dependence: {h0} vs {h1}"
        );
    }

    #[test]
    fn kinematic_helicity_closed_forms() {
        let g = grid();
        let abc = abc_field(g, [1.0, 1.0, 1.0]);
        assert_relative_eq!(
            kinematic_helicity(&abc),
            3.0 * g.volume(),
            max_relative = 1e-12
        );
        let gradient = ScalarField::from_fn(g, |x, y, z| (x + y).cos() * z.sin()).gradient();
        assert!(kinematic_helicity(&gradient).abs() < 1e-12 * g.volume());
        assert!(kinematic_helicity(&taylor_green(g, 1.0)).abs() < 1e-12 * g.volume());
        assert_relative_eq!(
            kinematic_helicity(&mirror_x(&abc)),
            -3.0 * g.volume(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn magnetic_hierarchy_base_cases() {
        let g = grid();
        // B = 0: every order vanishes.
        let zero = unit_density_state(g, VectorField::zeros(g));
        let h = magnetic_helicity_hierarchy(&zero, 2, GaugeTrack::Transport, 4).unwrap();
        for v in &h.values {
            assert!(v.abs() < 1e-13);
        }

        // Beltrami with A_g = B at unit density: H1 = integral <B, grad |B|^2>
        // = integral div(B |B|^2) = 0 on the torus.
        let abc = abc_field(g, [1.0, 1.0, 1.0]);
        let state = MhdState {
            a: abc.clone(),
            a_g: abc.clone(),
            b: abc.clone(),
            ..unit_density_state(g, abc.clone())
        };
        let h = magnetic_helicity_hierarchy(&state, 1, GaugeTrack::Transport, 4).unwrap();
        assert_relative_eq!(h.values[0], 3.0 * g.volume(), max_relative = 1e-12);
        assert!(h.values[1].abs() < 1e-10 * g.volume(), "H1 = {}", h.values[1]);
        assert!(h.solenoidal_ok());

        // Order 0 with the Weyl track matches magnetic_helicity when
        // curl A = B holds.
        let state = MhdState::random(g, 21);
        let h = magnetic_helicity_hierarchy(&state, 0, GaugeTrack::Weyl, 4).unwrap();
        let direct = magnetic_helicity(&state);
        assert_relative_eq!(h.values[0], direct, max_relative = 1e-10);
    }

    #[test]
    fn generalized_hierarchy_base_cases() {
        let g = grid();
        // Irrotational flow: xi = 0, all orders vanish.
        let state = EulerState {
            u: VectorField::constant(g, [0.7, -0.1, 0.3]),
            rho: ScalarField::constant(g, 1.0),
            phi: ScalarField::zeros(g),
            t: 0.0,
        };
        let h = generalized_helicity_hierarchy(&state, 2, 4).unwrap();
        for v in &h.values {
            assert!(v.abs() < 1e-12);
        }

        // Order 0 at unit density is exactly the kinematic helicity.
        let state = EulerState::random(g, 5);
        let h = generalized_helicity_hierarchy(&state, 0, 4).unwrap();
        assert_eq!(h.values[0], kinematic_helicity(&state.u));
    }

    #[test]
    fn m_hierarchy_reduces_to_generalized_for_constant_phi() {
        let g = grid();
        let mut state = EulerState::random(g, 9);
        state.phi = ScalarField::constant(g, 4.2);
        let m = m_hierarchy(&state, 2, 4).unwrap();
        let h = generalized_helicity_hierarchy(&state, 2, 4).unwrap();
        for (a, b) in m.values.iter().zip(&h.values) {
            assert_eq!(a, b, "constant phi must not change the hierarchy");
        }

        // xi = 0 keeps every order at zero even with a live phi.
        let state = EulerState {
            u: VectorField::constant(g, [0.4, 0.0, 0.0]),
            rho: ScalarField::constant(g, 1.0),
            phi: ScalarField::from_fn(g, |x, _, _| x.sin()),
            t: 0.0,
        };
        let m = m_hierarchy(&state, 1, 4).unwrap();
        for v in &m.values {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn cross_helicity_cases() {
        let g = grid();
        let abc = abc_field(g, [1.0, 1.0, 1.0]);
        // Orthogonal pointwise fields pair to zero.
        let u = VectorField::from_fn(g, |_, _, _| [1.0, 0.0, 0.0]);
        let b = VectorField::from_fn(g, |_, _, _| [0.0, 1.0, 0.0]);
        let state = MhdState {
            u,
            ..unit_density_state(g, b)
        };
        assert!(cross_helicity(&state).abs() < 1e-13);

        let state = MhdState {
            u: abc.clone(),
            a: abc.clone(),
            a_g: abc.clone(),
            b: abc.clone(),
            rho: ScalarField::constant(g, 1.0),
            eta: ScalarField::zeros(g),
            t: 0.0,
        };
        assert_relative_eq!(cross_helicity(&state), 3.0 * g.volume(), max_relative = 1e-12);
    }

    #[test]
    fn drift_report_arithmetic() {
        let mut s = InvariantSeries::new("energy", 0);
        s.push(0.0, 1.0).unwrap();
        s.push(0.5, 1.0).unwrap();
        s.push(1.0, 1.0).unwrap();
        let r = drift_report(&s).unwrap();
        assert_eq!(r.rel_drift, 0.0);

        // Ramp 1 -> 1.001: scale is the sup-norm 1.001, so the relative
        // drift is 1e-3 up to that normalization.
        let mut s = InvariantSeries::new("ramp", 1);
        s.push(0.0, 1.0).unwrap();
        s.push(1.0, 1.001).unwrap();
        let r = drift_report(&s).unwrap();
        assert_relative_eq!(r.rel_drift, 1e-3, max_relative = 2e-3);

        let mut s = InvariantSeries::new("zero", 0);
        s.push(0.0, 0.0).unwrap();
        s.push(1.0, 0.0).unwrap();
        let r = drift_report(&s).unwrap();
        assert_eq!(r.rel_drift, 0.0);

        let empty = InvariantSeries::new("empty", 0);
        assert!(drift_report(&empty).is_err());

        let mut s = InvariantSeries::new("times", 0);
        s.push(0.0, 1.0).unwrap();
        assert!(s.push(0.0, 2.0).is_err(), "times must strictly increase");
    }

    #[test]
    fn parity_of_hierarchies_under_reflection() {
        let g = grid();
        let state = EulerState::random(g, 13);
        let mirrored = EulerState {
            u: mirror_x(&state.u),
            rho: state.rho.clone(),
            phi: state.phi.clone(),
            t: 0.0,
        };
        let h = generalized_helicity_hierarchy(&state, 1, 4).unwrap();
        let hm = generalized_helicity_hierarchy(&mirrored, 1, 4).unwrap();
        for (a, b) in h.values.iter().zip(&hm.values) {
            assert!(
                (a + b).abs() < 1e-10 * a.abs().max(1.0),
                "parity violation: {a} vs {b}"
            );
        }
    }
}
