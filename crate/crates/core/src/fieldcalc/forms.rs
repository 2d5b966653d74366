//! Differential forms on the periodic box and the Cartan calculus.
//!
//! Component conventions (fixed once, verified by the `d.d = 0` and Cartan
//! property tests):
//!   * a 1-form is stored as the vector with equal components,
//!   * a 2-form `b` is stored as the vector proxy `w` with `b = i_w(dV)`,
//!   * a 3-form is stored as the scalar density `g` with `omega = g dV`.
//! Under these proxies: (1,1)-wedge is the cross product, (1,2)-wedge the
//! dot product, `i_v` on a 2-form with proxy `w` gives the vector `w x v`,
//! and `i_v` on `g dV` gives the 2-form proxy `g v`.

use super::grid::{GridSpec, ScalarField, VectorField};
use crate::error::{Error, Result};

/// Differential form of degree 0..=3, carried by its component proxy.
#[derive(Debug, Clone)]
pub enum KForm {
    Zero(ScalarField),
    One(VectorField),
    Two(VectorField),
    Three(ScalarField),
}

impl KForm {
    pub fn degree(&self) -> u8 {
        match self {
            KForm::Zero(_) => 0,
            KForm::One(_) => 1,
            KForm::Two(_) => 2,
            KForm::Three(_) => 3,
        }
    }

    pub fn grid(&self) -> GridSpec {
        match self {
            KForm::Zero(f) | KForm::Three(f) => f.grid(),
            KForm::One(v) | KForm::Two(v) => v.grid(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            KForm::Zero(f) | KForm::Three(f) => f.max_abs(),
            KForm::One(v) | KForm::Two(v) => v.max_abs(),
        }
    }

    pub fn scalar(&self) -> Option<&ScalarField> {
        match self {
            KForm::Zero(f) | KForm::Three(f) => Some(f),
            _ => None,
        }
    }

    pub fn vector(&self) -> Option<&VectorField> {
        match self {
            KForm::One(v) | KForm::Two(v) => Some(v),
            _ => None,
        }
    }
}

/// Exterior derivative, realized as gradient (0 -> 1), curl (1 -> 2) and
/// divergence (2 -> 3). Degree-3 input is rejected.
pub fn exterior_d(form: &KForm) -> Result<KForm> {
    match form {
        KForm::Zero(f) => Ok(KForm::One(f.gradient())),
        KForm::One(v) => Ok(KForm::Two(v.curl())),
        KForm::Two(v) => Ok(KForm::Three(v.divergence())),
        KForm::Three(_) => Err(Error::ExteriorDegree { degree: 3 }),
    }
}

/// Graded wedge product; errors when the total degree exceeds 3.
///
/// Products are raw pointwise algebra, so exact identities (graded
/// antisymmetry, `i_v i_v = 0`) hold to rounding; solvers coupling
/// band-limited fields dealias the results themselves.
pub fn wedge(a: &KForm, b: &KForm) -> Result<KForm> {
    use KForm::*;
    Ok(match (a, b) {
        (Zero(f), Zero(g)) => Zero(f.product(g)),
        (Zero(f), One(v)) => One(v.scaled_by(f)),
        (One(v), Zero(f)) => One(v.scaled_by(f)),
        (Zero(f), Two(v)) => Two(v.scaled_by(f)),
        (Two(v), Zero(f)) => Two(v.scaled_by(f)),
        (Zero(f), Three(g)) => Three(f.product(g)),
        (Three(g), Zero(f)) => Three(f.product(g)),
        (One(v), One(w)) => Two(v.cross(w)),
        // deg(a) * deg(b) is even for the (1,2) pairs, so both orders agree.
        (One(v), Two(w)) => Three(v.dot(w)),
        (Two(w), One(v)) => Three(v.dot(w)),
        (a, b) => {
            return Err(Error::WedgeDegree {
                a: a.degree(),
                b: b.degree(),
            })
        }
    })
}

/// Interior product `i_v`; errors on 0-forms.
pub fn interior(v: &VectorField, form: &KForm) -> Result<KForm> {
    Ok(match form {
        KForm::Zero(_) => return Err(Error::InteriorDegree { degree: 0 }),
        KForm::One(a) => KForm::Zero(v.dot(a)),
        KForm::Two(w) => KForm::One(w.cross(v)),
        KForm::Three(g) => KForm::Two(v.scaled_by(g)),
    })
}

/// Lie derivative along `v` by the Cartan formula `L_v = i_v d + d i_v`.
///
/// On 0-forms this reduces to `<v, grad f>`, on densities `g dV` to
/// `div(g v) dV`; the mid-degree cases combine both Cartan summands.
pub fn lie_derivative(v: &VectorField, form: &KForm) -> KForm {
    match form {
        KForm::Zero(_) => {
            let d = exterior_d(form).expect("d of a 0-form");
            interior(v, &d).expect("contraction of a 1-form")
        }
        KForm::Three(_) => {
            let contracted = interior(v, form).expect("contraction of a 3-form");
            exterior_d(&contracted).expect("d of a 2-form")
        }
        _ => {
            let d = exterior_d(form).expect("degree <= 2");
            let term_a = interior(v, &d).expect("degree >= 1 after d");
            let contracted = interior(v, form).expect("degree >= 1");
            let term_b = exterior_d(&contracted).expect("degree <= 2 after contraction");
            add(&term_a, &term_b)
        }
    }
}

fn add(a: &KForm, b: &KForm) -> KForm {
    use KForm::*;
    match (a, b) {
        (Zero(f), Zero(g)) => Zero(f + g),
        (One(v), One(w)) => One(v + w),
        (Two(v), Two(w)) => Two(v + w),
        (Three(f), Three(g)) => Three(f + g),
        _ => unreachable!("forms of unequal degree are never added"),
    }
}

/// Canonical Lie bracket of vector fields, `[v,w] = (v.grad)w - (w.grad)v`.
pub fn lie_derivative_vector(v: &VectorField, w: &VectorField) -> VectorField {
    assert_eq!(v.grid(), w.grid(), "bracket operands on different grids");
    &v.advect_vector(w) - &w.advect_vector(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::cubic(16).unwrap()
    }

    fn random_smooth(grid: GridSpec, seed: u64) -> ScalarField {
        crate::fieldcalc::random::smooth_scalar(grid, seed, 1.0)
    }

    fn random_smooth_vector(grid: GridSpec, seed: u64) -> VectorField {
        crate::fieldcalc::random::smooth_vector(grid, seed, 1.0)
    }

    #[test]
    fn d_of_scalar_is_gradient() {
        let g = grid();
        let f = KForm::Zero(ScalarField::from_fn(g, |x, _, _| x.sin()));
        let d = exterior_d(&f).unwrap();
        let expected = ScalarField::from_fn(g, |x, _, _| x.cos());
        let v = d.vector().unwrap();
        assert!((v.x() - &expected).max_abs() < 1e-12);
        assert!(v.y().max_abs() < 1e-13 && v.z().max_abs() < 1e-13);
    }

    #[test]
    fn d_squared_vanishes() {
        let g = grid();
        for seed in [1, 2, 3] {
            let f = KForm::Zero(random_smooth(g, seed));
            let dd = exterior_d(&exterior_d(&f).unwrap()).unwrap();
            assert!(dd.max_abs() < 1e-12 * f.max_abs().max(1.0));

            let a = KForm::One(random_smooth_vector(g, seed + 10));
            let dda = exterior_d(&exterior_d(&a).unwrap()).unwrap();
            assert!(dda.max_abs() < 1e-12 * a.max_abs().max(1.0));
        }
    }

    #[test]
    fn d_of_one_form_is_curl() {
        let g = grid();
        let a = random_smooth_vector(g, 7);
        let d = exterior_d(&KForm::One(a.clone())).unwrap();
        let diff = (d.vector().unwrap() - &a.curl()).max_abs();
        assert!(diff < 1e-13 * a.max_abs());
    }

    #[test]
    fn d_of_volume_form_is_rejected() {
        let g = grid();
        let form = KForm::Three(ScalarField::constant(g, 1.0));
        assert!(matches!(
            exterior_d(&form),
            Err(Error::ExteriorDegree { degree: 3 })
        ));
    }

    #[test]
    fn wedge_by_scalar_scales() {
        let g = grid();
        let f = ScalarField::constant(g, 2.0);
        let v = random_smooth_vector(g, 3);
        let scaled = wedge(&KForm::Zero(f), &KForm::One(v.clone())).unwrap();
        let expected = v.scale(2.0);
        assert!((scaled.vector().unwrap() - &expected).max_abs() < 1e-13 * v.max_abs());
    }

    #[test]
    fn wedge_graded_antisymmetry() {
        let g = grid();
        let a1 = KForm::One(random_smooth_vector(g, 21));
        let b1 = KForm::One(random_smooth_vector(g, 22));
        let ab = wedge(&a1, &b1).unwrap();
        let ba = wedge(&b1, &a1).unwrap();
        let sum = (ab.vector().unwrap() + ba.vector().unwrap()).max_abs();
        assert!(sum < 1e-13 * ab.max_abs().max(1.0));

        let b2 = KForm::Two(random_smooth_vector(g, 23));
        let ab = wedge(&a1, &b2).unwrap();
        let ba = wedge(&b2, &a1).unwrap();
        let diff = (ab.scalar().unwrap() - ba.scalar().unwrap()).max_abs();
        assert!(diff < 1e-13 * ab.max_abs().max(1.0));
    }

    #[test]
    fn wedge_rejects_degree_overflow() {
        let g = grid();
        let two = KForm::Two(random_smooth_vector(g, 1));
        assert!(matches!(
            wedge(&two, &two),
            Err(Error::WedgeDegree { a: 2, b: 2 })
        ));
    }

    #[test]
    fn abc_helicity_density_integrates_to_closed_form() {
        let g = grid();
        let u = crate::fieldcalc::analytic::abc_field(g, [1.0, 1.0, 1.0]);
        let beta = KForm::One(u.clone());
        let d_beta = exterior_d(&beta).unwrap();
        let density = wedge(&beta, &d_beta).unwrap();
        let integral = density.scalar().unwrap().integrate();
        let expected = 3.0 * g.volume();
        assert!((integral - expected).abs() < 1e-10 * expected);
    }

    #[test]
    fn interior_examples() {
        let g = grid();
        let v = random_smooth_vector(g, 31);

        let dens = random_smooth(g, 32);
        let contracted = interior(&v, &KForm::Three(dens.clone())).unwrap();
        let expected = v.scaled_by(&dens);
        assert!((contracted.vector().unwrap() - &expected).max_abs() < 1e-13 * expected.max_abs());

        let a = random_smooth_vector(g, 33);
        let paired = interior(&v, &KForm::One(a.clone())).unwrap();
        let expected = v.dot(&a);
        assert!((paired.scalar().unwrap() - &expected).max_abs() < 1e-13 * expected.max_abs());

        assert!(interior(&v, &KForm::Zero(dens)).is_err());
    }

    #[test]
    fn double_contraction_vanishes() {
        let g = grid();
        let v = random_smooth_vector(g, 41);
        for form in [
            KForm::Two(random_smooth_vector(g, 42)),
            KForm::Three(random_smooth(g, 43)),
        ] {
            let once = interior(&v, &form).unwrap();
            let twice = interior(&v, &once).unwrap();
            assert!(twice.max_abs() < 1e-12 * form.max_abs() * v.max_abs().powi(2).max(1.0));
        }
    }

    #[test]
    fn lie_derivative_of_constant_vanishes() {
        let g = grid();
        let v = random_smooth_vector(g, 50);
        let out = lie_derivative(&v, &KForm::Zero(ScalarField::constant(g, 4.2)));
        assert!(out.max_abs() < 1e-13);
    }

    #[test]
    fn lie_derivative_scalar_is_directional_derivative() {
        let g = grid();
        let f = ScalarField::from_fn(g, |x, _, _| x.sin());
        let v = VectorField::constant(g, [1.0, 0.0, 0.0]);
        let out = lie_derivative(&v, &KForm::Zero(f));
        let expected = ScalarField::from_fn(g, |x, _, _| x.cos());
        assert!((out.scalar().unwrap() - &expected).max_abs() < 1e-12);
    }

    #[test]
    fn mass_form_is_frozen_for_solenoidal_flux() {
        // v = B / rho with div B = 0 makes rho dV invariant: div(rho v) = 0.
        let g = grid();
        let rho = ScalarField::from_fn(g, |x, y, _| 1.0 + 0.2 * x.sin() + 0.1 * (y + 1.0).cos());
        let b = random_smooth_vector(g, 61).curl(); // solenoidal by construction
        let v = b.scaled_by(&rho.reciprocal("test").unwrap());
        let out = lie_derivative(&v, &KForm::Three(rho.clone()));
        let scale = rho.max_abs() * v.max_abs().max(1.0);
        assert!(out.max_abs() < 1e-10 * scale, "residual {}", out.max_abs());
    }

    #[test]
    fn vector_bracket_examples() {
        let g = grid();
        let v = random_smooth_vector(g, 71);
        let w = random_smooth_vector(g, 72);

        assert!(lie_derivative_vector(&v, &v).max_abs() < 1e-13 * v.max_abs());

        let vw = lie_derivative_vector(&v, &w);
        let wv = lie_derivative_vector(&w, &v);
        assert!((&vw + &wv).max_abs() < 1e-13 * vw.max_abs().max(1.0));

        let e1 = VectorField::constant(g, [1.0, 0.0, 0.0]);
        let shear = VectorField::from_fn(g, |x, _, _| [0.0, x.sin(), 0.0]);
        let bracket = lie_derivative_vector(&e1, &shear);
        let expected = ScalarField::from_fn(g, |x, _, _| x.cos());
        assert!((bracket.y() - &expected).max_abs() < 1e-12);
        assert!(bracket.x().max_abs() < 1e-13 && bracket.z().max_abs() < 1e-13);
    }
}
