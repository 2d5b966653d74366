//! Incompressible superfluid flow: Leray-projected spectral Euler solver,
//! vorticity and frozen-in diagnostics, and the transported scalar that
//! shifts the velocity one-form into exactly-advected form.
//!
//! Pressure sign bookkeeping: the solver works with the scalar `q` solving
//! `div(rho^-1 grad q) = div((u.grad)u)`, so that `du = -(u.grad)u +
//! rho^-1 grad q` is divergence-free. The reported pressure is `P = -q`
//! (the conventional `du = -(u.grad)u - rho^-1 grad P`); a comparison flag
//! flips the report to `+q`. The transported-scalar source must be built
//! against `q` itself — that is what makes the shifted one-form exactly
//! advected — so [`phi_rhs`] takes `q`, not `P`.

use crate::error::{Error, Result};
use crate::fieldcalc::{GridSpec, ScalarField, VectorField};

/// Incompressible phase point: divergence-free velocity, advected density
/// (identically 1 in the default mode), transported potential `phi`.
#[derive(Debug, Clone)]
pub struct EulerState {
    pub u: VectorField,
    pub rho: ScalarField,
    pub phi: ScalarField,
    pub t: f64,
}

impl EulerState {
    pub fn new(u: VectorField, rho: ScalarField, phi: ScalarField) -> Result<Self> {
        if rho.grid() != u.grid() || phi.grid() != u.grid() {
            return Err(Error::GridMismatch { op: "EulerState" });
        }
        let min = rho.min();
        if min <= 0.0 {
            return Err(Error::NonPositiveDensity {
                min,
                context: "EulerState",
            });
        }
        let div = u.divergence().max_abs();
        if div > 1e-11 * u.max_abs().max(1e-300) {
            return Err(Error::InvalidGrid(format!(
                "velocity is not divergence-free: |div u| = {div:.3e}"
            )));
        }
        Ok(Self {
            u,
            rho,
            phi,
            t: 0.0,
        })
    }

    /// Constant-density state with `phi = 0` from any velocity field
    /// (projected divergence-free).
    pub fn from_velocity(u: VectorField) -> Self {
        let grid = u.grid();
        Self {
            u: u.leray_project(),
            rho: ScalarField::constant(grid, 1.0),
            phi: ScalarField::zeros(grid),
            t: 0.0,
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.u.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.rho.is_finite() && self.phi.is_finite()
    }

    /// Random solenoidal state at unit density (for property tests).
    pub fn random(grid: GridSpec, seed: u64) -> Self {
        Self::from_velocity(crate::fieldcalc::random::solenoidal_vector(grid, seed, 1.0))
    }
}

/// Solver options; the defaults give the constant-density fast path.
#[derive(Debug, Clone, Copy)]
pub struct EulerOptions {
    /// Solve the variable-coefficient pressure problem instead of assuming
    /// `rho = 1`.
    pub variable_density: bool,
    /// Report the pressure with the sign printed in the source equations
    /// (`du = -(u.grad)u + rho^-1 grad P`) instead of the standard one.
    pub paper_pressure_sign: bool,
    /// Infinity-norm tolerance of the variable-density pressure iteration,
    /// relative to the source term.
    pub pressure_tolerance: f64,
    pub pressure_max_iterations: usize,
}

impl Default for EulerOptions {
    fn default() -> Self {
        Self {
            variable_density: false,
            paper_pressure_sign: false,
            pressure_tolerance: 1e-10,
            pressure_max_iterations: 200,
        }
    }
}

/// Pressure Poisson solution and its achieved residual.
#[derive(Debug, Clone)]
pub struct PressureSolve {
    pub pressure: ScalarField,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct EulerTendency {
    pub du: VectorField,
    pub drho: ScalarField,
    pub dphi: ScalarField,
}

/// Divergence-free projection re-export at the operation granularity the
/// solver uses (see `VectorField::leray_project` for the implementation).
pub fn leray_project(f: &VectorField) -> VectorField {
    f.leray_project()
}

/// Vorticity `xi = curl u`.
pub fn vorticity(u: &VectorField) -> VectorField {
    u.curl()
}

/// Solve for the pressure-like scalar `q` with `div(rho^-1 grad q) =
/// div(adv)`: one spectral inverse for constant density, otherwise a
/// mean-preconditioned fixed-point iteration.
fn solve_pressure_scalar(
    adv: &VectorField,
    rho: &ScalarField,
    opts: &EulerOptions,
) -> Result<(ScalarField, f64, usize)> {
    let rhs = adv.divergence();
    if !opts.variable_density {
        let q = rhs.inverse_laplacian();
        let residual = (&q.laplacian() - &rhs).max_abs();
        return Ok((q, residual, 1));
    }

    let rho_inv = rho.reciprocal("pressure solve")?;
    let mean_inv = rho_inv.mean();
    let scale = rhs.max_abs().max(1e-30);
    let mut q = rhs.inverse_laplacian().scale(1.0 / mean_inv);
    for iteration in 1..=opts.pressure_max_iterations {
        let flux = q.gradient().scaled_by_dealiased(&rho_inv);
        let residual_field = &rhs - &flux.divergence();
        let residual = residual_field.max_abs();
        if residual <= opts.pressure_tolerance * scale {
            return Ok((q, residual, iteration));
        }
        q = &q + &residual_field.inverse_laplacian().scale(1.0 / mean_inv);
    }
    let flux = q.gradient().scaled_by_dealiased(&rho_inv);
    let residual = (&rhs - &flux.divergence()).max_abs();
    Err(Error::PressureDiverged {
        residual,
        iterations: opts.pressure_max_iterations,
    })
}

/// Transported-scalar source: `dphi = -<u, grad phi> + h` with
/// `h = rho^-1 q + |u|^2 / 2`, where `q` is the scalar whose `rho^-1`-scaled
/// gradient is the potential part of the acceleration. With this pairing the
/// one-form built on `u - grad phi` is exactly advected.
pub fn phi_rhs(state: &EulerState, q: &ScalarField) -> Result<ScalarField> {
    let rho_inv = state.rho.reciprocal("phi_rhs")?;
    let h = &q.product_dealiased(&rho_inv) + &state.u.dot_dealiased(&state.u).scale(0.5);
    Ok(&h - &state.u.directional_derivative(&state.phi))
}

/// Euler right-hand side with the pressure eliminated through the
/// incompressibility constraint; `du` is spectrally divergence-free.
pub fn euler_rhs(state: &EulerState, opts: &EulerOptions) -> Result<(EulerTendency, PressureSolve)> {
    let adv = state.u.advect_vector(&state.u);
    let (q, residual, iterations) = solve_pressure_scalar(&adv, &state.rho, opts)?;

    let du = if opts.variable_density {
        let rho_inv = state.rho.reciprocal("euler_rhs")?;
        let accel = q.gradient().scaled_by_dealiased(&rho_inv);
        (&accel - &adv).leray_project()
    } else {
        &q.gradient() - &adv
    };

    let drho = -&state.u.directional_derivative(&state.rho);
    let dphi = phi_rhs(state, &q)?;

    let pressure = if opts.paper_pressure_sign { q } else { -&q };
    Ok((
        EulerTendency { du, drho, dphi },
        PressureSolve {
            pressure,
            residual,
            iterations,
        },
    ))
}

/// `|curl(du) - curl(u x xi)|_inf`: the vorticity equation as an algebraic
/// identity of the discretization, expected at rounding level.
pub fn vorticity_residual(state: &EulerState, opts: &EulerOptions) -> Result<f64> {
    let (tendency, _) = euler_rhs(state, opts)?;
    let xi = vorticity(&state.u);
    let rhs = state.u.cross_dealiased(&xi).curl();
    Ok((&tendency.du.curl() - &rhs).max_abs())
}

/// Residual of the frozen-in condition for the generator `v = rho^-1 xi`:
/// `|dv/dt + (u.grad)v - (v.grad)u + v div u|_inf`, with `dv/dt` assembled
/// from the vorticity and density tendencies.
pub fn frozen_in_residual(state: &EulerState, opts: &EulerOptions) -> Result<f64> {
    let (tendency, _) = euler_rhs(state, opts)?;
    let rho_inv = state.rho.reciprocal("frozen_in_residual")?;
    let xi = vorticity(&state.u);
    let v = xi.scaled_by_dealiased(&rho_inv);

    let dxi = tendency.du.curl();
    // dv = rho^-1 dxi - rho^-2 drho xi
    let dv = &dxi.scaled_by_dealiased(&rho_inv)
        - &xi
            .scaled_by_dealiased(&tendency.drho)
            .scaled_by_dealiased(&rho_inv)
            .scaled_by_dealiased(&rho_inv);

    let transport = &state.u.advect_vector(&v) - &v.advect_vector(&state.u);
    let compress = v.scaled_by_dealiased(&state.u.divergence());
    Ok((&(&dv + &transport) + &compress).max_abs())
}

/// Kinetic energy `integral of rho |u|^2 / 2`.
pub fn kinetic_energy(state: &EulerState) -> f64 {
    state
        .u
        .dot(&state.u)
        .product(&state.rho)
        .scale(0.5)
        .integrate()
}

fn advanced(state: &EulerState, k: &EulerTendency, h: f64) -> EulerState {
    EulerState {
        u: (&state.u + &k.du.scale(h)).leray_project(),
        rho: &state.rho + &k.drho.scale(h),
        phi: &state.phi + &k.dphi.scale(h),
        t: state.t + h,
    }
}

/// Classical Runge-Kutta step; the velocity is re-projected after every
/// stage to suppress divergence drift.
pub fn euler_rk4_step(state: &EulerState, dt: f64, opts: &EulerOptions) -> Result<EulerState> {
    if !(dt.is_finite() && dt != 0.0) {
        return Err(Error::Config(format!("invalid time step {dt}")));
    }
    let check = |s: &EulerState, stage: usize| -> Result<()> {
        if !s.is_finite() {
            return Err(Error::NanAtStage { stage });
        }
        Ok(())
    };
    let (k1, _) = euler_rhs(state, opts)?;
    let s2 = advanced(state, &k1, dt / 2.0);
    check(&s2, 1)?;
    let (k2, _) = euler_rhs(&s2, opts)?;
    let s3 = advanced(state, &k2, dt / 2.0);
    check(&s3, 2)?;
    let (k3, _) = euler_rhs(&s3, opts)?;
    let s4 = advanced(state, &k3, dt);
    check(&s4, 3)?;
    let (k4, _) = euler_rhs(&s4, opts)?;

    let sixth = dt / 6.0;
    let du = &(&(&k1.du + &k2.du.scale(2.0)) + &k3.du.scale(2.0)) + &k4.du;
    let drho = &(&(&k1.drho + &k2.drho.scale(2.0)) + &k3.drho.scale(2.0)) + &k4.drho;
    let dphi = &(&(&k1.dphi + &k2.dphi.scale(2.0)) + &k3.dphi.scale(2.0)) + &k4.dphi;
    let next = EulerState {
        u: (&state.u + &du.scale(sixth)).leray_project(),
        rho: &state.rho + &drho.scale(sixth),
        phi: &state.phi + &dphi.scale(sixth),
        t: state.t + dt,
    };
    check(&next, 4)?;
    Ok(next)
}

/// Advective CFL bound for the incompressible solver.
pub fn euler_cfl_dt(state: &EulerState, courant: f64) -> Result<f64> {
    if !(courant > 0.0 && courant <= 1.0) {
        return Err(Error::Config(format!("courant {courant} not in (0, 1]")));
    }
    let speed = state.u.max_norm().max(1e-12);
    Ok(courant * state.grid().min_spacing() / speed)
}
