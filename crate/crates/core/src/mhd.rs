//! Compressible ideal MHD superfluid dynamics on the periodic box:
//! polytropic thermodynamic closure, spectral right-hand side with
//! per-product dealiasing, magnetic potential transport in two gauges,
//! and a classical Runge-Kutta integrator.

use crate::error::{Error, Result};
use crate::fieldcalc::forms::{lie_derivative, KForm};
use crate::fieldcalc::{GridSpec, ScalarField, VectorField};

/// Polytropic closure `e(rho, eta) = K exp(eta/c_v) rho^(gamma-1) / (gamma-1)`,
/// which gives `P = K exp(eta/c_v) rho^gamma` and `T = e / c_v`, consistent
/// with the first thermodynamic law in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EosParams {
    /// Adiabatic exponent, > 1.
    pub gamma: f64,
    /// Entropy-scale constant `K`, > 0.
    pub entropy_scale: f64,
    /// Specific heat `c_v`, > 0.
    pub c_v: f64,
}

impl Default for EosParams {
    fn default() -> Self {
        Self {
            gamma: 5.0 / 3.0,
            entropy_scale: 1.0,
            c_v: 1.0,
        }
    }
}

impl EosParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 1.0 && self.entropy_scale > 0.0 && self.c_v > 0.0) {
            return Err(Error::Config(format!(
                "EOS parameters out of range: gamma {}, K {}, c_v {}",
                self.gamma, self.entropy_scale, self.c_v
            )));
        }
        Ok(())
    }
}

fn check_density(rho: &ScalarField, context: &'static str) -> Result<()> {
    let min = rho.min();
    if min <= 0.0 {
        return Err(Error::NonPositiveDensity { min, context });
    }
    Ok(())
}

/// Specific internal energy `e(rho, eta)`.
pub fn eos_energy(rho: &ScalarField, eta: &ScalarField, params: &EosParams) -> Result<ScalarField> {
    check_density(rho, "eos_energy")?;
    let g1 = params.gamma - 1.0;
    let k = params.entropy_scale;
    let cv = params.c_v;
    Ok(rho.zip_with(eta, |r, s| k * (s / cv).exp() * r.powf(g1) / g1))
}

/// Pressure `P = rho^2 de/drho = K exp(eta/c_v) rho^gamma`.
pub fn eos_pressure(
    rho: &ScalarField,
    eta: &ScalarField,
    params: &EosParams,
) -> Result<ScalarField> {
    check_density(rho, "eos_pressure")?;
    let k = params.entropy_scale;
    let cv = params.c_v;
    let gamma = params.gamma;
    Ok(rho.zip_with(eta, |r, s| k * (s / cv).exp() * r.powf(gamma)))
}

/// Temperature `T = de/deta = e / c_v`.
pub fn eos_temperature(
    rho: &ScalarField,
    eta: &ScalarField,
    params: &EosParams,
) -> Result<ScalarField> {
    Ok(eos_energy(rho, eta, params)?.scale(1.0 / params.c_v))
}

/// Phase point of the compressible superfluid: velocity, density, specific
/// entropy, magnetic field, and the magnetic potential in the Weyl gauge
/// (`a`, with `dA/dt = u x B`) and the transport gauge (`a_g`, with the
/// potential one-form exactly advected).
#[derive(Debug, Clone)]
pub struct MhdState {
    pub u: VectorField,
    pub rho: ScalarField,
    pub eta: ScalarField,
    pub b: VectorField,
    pub a: VectorField,
    pub a_g: VectorField,
    pub t: f64,
}

impl MhdState {
    /// Assemble and validate a state: positive density, matching grids, and
    /// spectrally solenoidal `B`.
    pub fn new(
        u: VectorField,
        rho: ScalarField,
        eta: ScalarField,
        b: VectorField,
        a: VectorField,
        a_g: VectorField,
    ) -> Result<Self> {
        let grid = u.grid();
        if rho.grid() != grid
            || eta.grid() != grid
            || b.grid() != grid
            || a.grid() != grid
            || a_g.grid() != grid
        {
            return Err(Error::GridMismatch { op: "MhdState" });
        }
        check_density(&rho, "MhdState")?;
        let state = Self {
            u,
            rho,
            eta,
            b,
            a,
            a_g,
            t: 0.0,
        };
        let div = state.solenoidality_residual();
        let scale = state.b.max_abs().max(1e-300);
        if div > 1e-10 * scale {
            return Err(Error::InvalidGrid(format!(
                "magnetic field is not solenoidal: |div B| = {div:.3e} vs |B| = {scale:.3e}"
            )));
        }
        Ok(state)
    }

    pub fn grid(&self) -> GridSpec {
        self.u.grid()
    }

    /// Specific momentum `mu = rho u`.
    pub fn momentum_density(&self) -> VectorField {
        self.u.scaled_by(&self.rho)
    }

    /// `|div B|_inf` — stays at rounding level along trajectories because the
    /// induction tendency is a spectral curl.
    pub fn solenoidality_residual(&self) -> f64 {
        self.b.divergence().max_abs()
    }

    /// `|curl A_g - B|_inf`; grows only at the time-integration error.
    pub fn gauge_residual(&self) -> f64 {
        (&self.a_g.curl() - &self.b).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite()
            && self.rho.is_finite()
            && self.eta.is_finite()
            && self.b.is_finite()
            && self.a.is_finite()
            && self.a_g.is_finite()
    }

    /// Smooth randomized state for property tests and bracket sweeps:
    /// solenoidal velocity and magnetic field, gentle density and entropy
    /// modulation, potentials consistent with `B`.
    pub fn random(grid: GridSpec, seed: u64) -> Self {
        use crate::fieldcalc::random;
        let u = random::solenoidal_vector(grid, seed, 0.5);
        let rho = {
            let bump = random::smooth_scalar(grid, seed.wrapping_add(101), 0.1);
            bump.map(|v| 1.0 + v)
        };
        let eta = random::smooth_scalar(grid, seed.wrapping_add(202), 0.1);
        let b = random::solenoidal_vector(grid, seed.wrapping_add(303), 0.5);
        let a = b.vector_potential();
        let b = a.curl();
        let a_g = a.clone();
        Self {
            u,
            rho,
            eta,
            b,
            a,
            a_g,
            t: 0.0,
        }
    }
}

/// Right-hand sides of the evolution system, including both potentials.
#[derive(Debug, Clone)]
pub struct Tendency {
    pub du: VectorField,
    pub drho: ScalarField,
    pub deta: ScalarField,
    pub db: VectorField,
    pub da: VectorField,
    pub da_g: VectorField,
}

/// Evaluate the MHD right-hand side. Every pointwise product is dealiased;
/// `dB` is the curl of `dA`, so the two are consistent as an algebraic
/// identity and `div B` is preserved spectrally.
pub fn mhd_rhs(state: &MhdState, params: &EosParams) -> Result<Tendency> {
    let rho_inv = state.rho.reciprocal("mhd_rhs")?;
    let pressure = eos_pressure(&state.rho, &state.eta, params)?;

    let advection = state.u.advect_vector(&state.u);
    let pressure_accel = pressure.gradient().scaled_by_dealiased(&rho_inv);
    let lorentz_accel = state
        .b
        .curl()
        .cross_dealiased(&state.b)
        .scaled_by_dealiased(&rho_inv);
    let du = &(&-&advection - &pressure_accel) + &lorentz_accel;

    let drho = -&state.u.scaled_by_dealiased(&state.rho).divergence();
    let deta = -&state.u.directional_derivative(&state.eta);

    // Superconductivity: E = -dA/dt and E + u x B = 0.
    let da = state.u.cross_dealiased(&state.b);
    let db = da.curl();

    // Transport gauge: the potential one-form is exactly advected. The
    // Cartan-formula products are truncated once at the end (dealiasing is
    // linear, so this equals per-product truncation).
    let da_g = match lie_derivative(&state.u, &KForm::One(state.a_g.clone())) {
        KForm::One(v) => -&v.dealias(),
        _ => unreachable!("Lie derivative preserves the degree"),
    };

    Ok(Tendency {
        du,
        drho,
        deta,
        db,
        da,
        da_g,
    })
}

fn advanced(state: &MhdState, k: &Tendency, h: f64) -> MhdState {
    MhdState {
        u: &state.u + &k.du.scale(h),
        rho: &state.rho + &k.drho.scale(h),
        eta: &state.eta + &k.deta.scale(h),
        b: &state.b + &k.db.scale(h),
        a: &state.a + &k.da.scale(h),
        a_g: &state.a_g + &k.da_g.scale(h),
        t: state.t + h,
    }
}

fn check_stage(state: &MhdState, stage: usize) -> Result<()> {
    if !state.is_finite() {
        return Err(Error::NanAtStage { stage });
    }
    Ok(())
}

/// One classical 4-stage Runge-Kutta step over all state fields. The state
/// is checked for non-finite values after every stage; `dt` may be negative
/// (used by the consistency probes to rewind).
pub fn rk4_step(state: &MhdState, dt: f64, params: &EosParams) -> Result<MhdState> {
    if !(dt.is_finite() && dt != 0.0) {
        return Err(Error::Config(format!("invalid time step {dt}")));
    }
    let k1 = mhd_rhs(state, params)?;
    let s2 = advanced(state, &k1, dt / 2.0);
    check_stage(&s2, 1)?;
    let k2 = mhd_rhs(&s2, params)?;
    let s3 = advanced(state, &k2, dt / 2.0);
    check_stage(&s3, 2)?;
    let k3 = mhd_rhs(&s3, params)?;
    let s4 = advanced(state, &k3, dt);
    check_stage(&s4, 3)?;
    let k4 = mhd_rhs(&s4, params)?;

    let combine_v = |a: &VectorField, b: &VectorField, c: &VectorField, d: &VectorField| {
        &(&(a + &b.scale(2.0)) + &c.scale(2.0)) + d
    };
    let combine_s = |a: &ScalarField, b: &ScalarField, c: &ScalarField, d: &ScalarField| {
        &(&(a + &b.scale(2.0)) + &c.scale(2.0)) + d
    };
    let sixth = dt / 6.0;
    let next = MhdState {
        u: &state.u + &combine_v(&k1.du, &k2.du, &k3.du, &k4.du).scale(sixth),
        rho: &state.rho + &combine_s(&k1.drho, &k2.drho, &k3.drho, &k4.drho).scale(sixth),
        eta: &state.eta + &combine_s(&k1.deta, &k2.deta, &k3.deta, &k4.deta).scale(sixth),
        b: &state.b + &combine_v(&k1.db, &k2.db, &k3.db, &k4.db).scale(sixth),
        a: &state.a + &combine_v(&k1.da, &k2.da, &k3.da, &k4.da).scale(sixth),
        a_g: &state.a_g + &combine_v(&k1.da_g, &k2.da_g, &k3.da_g, &k4.da_g).scale(sixth),
        t: state.t + dt,
    };
    check_stage(&next, 4)?;
    Ok(next)
}

/// Advective CFL bound `dt = courant * dx_min / max(|u| + c_s + c_A, eps)`
/// with the fast speeds evaluated at their grid maxima.
pub fn cfl_dt(state: &MhdState, params: &EosParams, courant: f64) -> Result<f64> {
    if !(courant > 0.0 && courant <= 1.0) {
        return Err(Error::Config(format!("courant {courant} not in (0, 1]")));
    }
    let pressure = eos_pressure(&state.rho, &state.eta, params)?;
    let ratio = pressure.zip_with(&state.rho, |p, r| p / r);
    let sound = (params.gamma * ratio.values().iter().fold(0.0_f64, |m, &v| m.max(v))).sqrt();
    let alfven = state.b.max_norm() / state.rho.min().sqrt();
    let speed = (state.u.max_norm() + sound + alfven).max(1e-12);
    Ok(courant * state.grid().min_spacing() / speed)
}

/// Total energy `H = integral of |mu|^2/(2 rho) + rho e + |B|^2/2`.
pub fn total_energy(state: &MhdState, params: &EosParams) -> Result<f64> {
    let e = eos_energy(&state.rho, &state.eta, params)?;
    let kinetic = state.u.dot(&state.u).product(&state.rho).scale(0.5);
    let internal = state.rho.product(&e);
    let magnetic = state.b.dot(&state.b).scale(0.5);
    Ok((&(&kinetic + &internal) + &magnetic).integrate())
}

pub fn total_mass(state: &MhdState) -> f64 {
    state.rho.integrate()
}

pub fn total_momentum(state: &MhdState) -> [f64; 3] {
    let mu = state.momentum_density();
    [
        mu.x().integrate(),
        mu.y().integrate(),
        mu.z().integrate(),
    ]
}

/// Integral of `rho * eta` (advected entropy content).
pub fn total_entropy(state: &MhdState) -> f64 {
    state.rho.product(&state.eta).integrate()
}
