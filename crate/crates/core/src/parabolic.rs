//! Reference solver for the classical isentropic system
//! `v_t = u_x`, `u_t + p(v)_x = (mu u_x / v)_x` with `u = 0` at both ends.
//!
//! The viscous flux `mu (u_{i+1} - u_i) / (dx v_{i+1/2})` lives on cell
//! midpoints, so the discrete dissipation `sum mu (du)^2 / (dx v_mid)` is
//! sign-definite. Time stepping is the same two-stage SSP Runge-Kutta as the
//! transport stage of the relaxed solver, under the explicit diffusion bound.

use crate::error::{Error, Result};
use crate::forcing::Forcing;
use crate::grid::Grid1D;
use crate::model::{dpressure, pressure};
use crate::params::FluidParams;
use crate::relaxed::SchemeConfig;
use crate::state::{check_floor, ParabolicState};

/// Fraction of the forward-Euler diffusion limit used for the time step.
pub const DIFFUSION_SAFETY: f64 = 0.4;

pub fn rhs_parabolic(
    state: &ParabolicState,
    p: &FluidParams,
    grid: &Grid1D,
    forcing: Option<&dyn Forcing>,
    v_floor: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_floor(&state.v, v_floor, state.t)?;
    let n = grid.n();
    let dx = grid.dx();
    let vt = grid.ddx(&state.u);
    let pr = state
        .v
        .iter()
        .map(|&v| pressure(v, p))
        .collect::<Result<Vec<_>>>()?;
    let dp = grid.ddx(&pr);
    let flux: Vec<f64> = (0..n - 1)
        .map(|i| {
            let vm = 0.5 * (state.v[i] + state.v[i + 1]);
            p.mu * (state.u[i + 1] - state.u[i]) / (dx * vm)
        })
        .collect();
    let mut ut = vec![0.0; n];
    for i in 1..n - 1 {
        ut[i] = (flux[i] - flux[i - 1]) / dx - dp[i];
    }
    let mut vt = vt;
    if let Some(f) = forcing {
        for (i, &x) in grid.x().iter().enumerate() {
            let [fv, fu, _] = f.eval(state.t, x);
            vt[i] += fv;
            if i != 0 && i != n - 1 {
                ut[i] += fu;
            }
        }
    }
    Ok((vt, ut))
}

/// Limit stress `mu u_x / v`, the value the relaxed `S` approaches as tau -> 0.
pub fn effective_stress(state: &ParabolicState, p: &FluidParams, grid: &Grid1D) -> Vec<f64> {
    let ux = grid.ddx(&state.u);
    ux.iter().zip(&state.v).map(|(d, v)| p.mu * d / v).collect()
}

/// Discrete viscous dissipation `sum mu (u_{i+1} - u_i)^2 / (dx v_{i+1/2})`.
pub fn viscous_dissipation(state: &ParabolicState, p: &FluidParams, grid: &Grid1D) -> f64 {
    (0..grid.n() - 1)
        .map(|i| {
            let du = state.u[i + 1] - state.u[i];
            let vm = 0.5 * (state.v[i] + state.v[i + 1]);
            p.mu * du * du / (grid.dx() * vm)
        })
        .sum()
}

/// `min(cfl dx / sqrt(-p'(v_min)), 0.4 dx^2 v_min / mu)`.
pub fn stable_dt_parabolic(
    state: &ParabolicState,
    p: &FluidParams,
    grid: &Grid1D,
    cfg: &SchemeConfig,
) -> Result<f64> {
    let vmin = state.v.iter().copied().fold(f64::INFINITY, f64::min);
    let c = (-dpressure(vmin, p)?).sqrt();
    let dx = grid.dx();
    Ok((cfg.cfl * dx / c).min(DIFFUSION_SAFETY * dx * dx * vmin / p.mu))
}

pub fn step_parabolic(
    state: &ParabolicState,
    dt: f64,
    p: &FluidParams,
    grid: &Grid1D,
    cfg: &SchemeConfig,
) -> Result<ParabolicState> {
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(Error::Misuse(format!(
            "time step must be finite and >= 0, got {dt}"
        )));
    }
    state.check(cfg.v_floor)?;
    let n = grid.n();
    let forcing = cfg.forcing.as_deref();
    let (kv, ku) = rhs_parabolic(state, p, grid, forcing, cfg.v_floor)?;
    let stage = ParabolicState {
        t: state.t + dt,
        v: (0..n).map(|i| state.v[i] + dt * kv[i]).collect(),
        u: (0..n).map(|i| state.u[i] + dt * ku[i]).collect(),
    };
    let (kv1, ku1) = rhs_parabolic(&stage, p, grid, forcing, cfg.v_floor)?;
    let mut next = ParabolicState {
        t: state.t + dt,
        v: (0..n)
            .map(|i| 0.5 * (state.v[i] + stage.v[i] + dt * kv1[i]))
            .collect(),
        u: (0..n)
            .map(|i| 0.5 * (state.u[i] + stage.u[i] + dt * ku1[i]))
            .collect(),
    };
    next.u[0] = 0.0;
    next.u[n - 1] = 0.0;
    next.check(cfg.v_floor)?;
    Ok(next)
}
