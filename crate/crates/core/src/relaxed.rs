//! Method-of-lines integrator for the relaxed system
//!
//! ```text
//! v_t = u_x
//! u_t + p(v)_x = S_x
//! tau (S_t + eps b(x) S_x) + v S = mu u_x,     u(t, 0) = u(t, 1) = 0
//! ```
//!
//! Each step is a Strang splitting: an exact relaxation half-step for the
//! stiff part `(mu u_x - v S) / tau`, a two-stage SSP Runge-Kutta transport
//! step for `v_t = u_x`, `u_t = (S - p)_x`, `S_t = -eps b S_x`, and a second
//! relaxation half-step. No boundary value is imposed on `v` or `S`: at
//! `eps = 0` the boundary is characteristic for them and at `eps > 0` the
//! extra transport leaves the domain at both ends.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::forcing::Forcing;
use crate::grid::Grid1D;
use crate::model::{boundary_weight, max_char_speed, pressure, relax_exact_update};
use crate::params::FluidParams;
use crate::state::{check_floor, State};

#[derive(Clone)]
pub struct SchemeConfig {
    pub cfl: f64,
    pub v_floor: f64,
    pub forcing: Option<Arc<dyn Forcing>>,
    /// Store a full state every this many steps.
    pub record_every: usize,
    /// Store an energy snapshot every this many steps.
    pub energy_every: usize,
    /// Times the integrator must land on exactly; a snapshot is stored at each.
    pub sample_times: Vec<f64>,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            v_floor: 1e-6,
            forcing: None,
            record_every: 1,
            energy_every: 1,
            sample_times: Vec::new(),
        }
    }
}

impl fmt::Debug for SchemeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SchemeConfig")
            .field("cfl", &self.cfl)
            .field("v_floor", &self.v_floor)
            .field("forcing", &self.forcing.as_ref().map(|_| "<fn>"))
            .field("record_every", &self.record_every)
            .field("energy_every", &self.energy_every)
            .field("sample_times", &self.sample_times.len())
            .finish()
    }
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "cfl must lie in (0, 1], got {}",
                self.cfl
            )));
        }
        if !(self.v_floor.is_finite() && self.v_floor > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "v_floor must be > 0, got {}",
                self.v_floor
            )));
        }
        if self.record_every == 0 || self.energy_every == 0 {
            return Err(Error::InvalidParameter(
                "record_every and energy_every must be >= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn with_forcing(mut self, f: impl Forcing + 'static) -> Self {
        self.forcing = Some(Arc::new(f));
        self
    }
}

/// Time derivatives of `(v, u, S)` at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct Rates {
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub s: Vec<f64>,
}

impl Rates {
    fn zeros(n: usize) -> Self {
        Self {
            v: vec![0.0; n],
            u: vec![0.0; n],
            s: vec![0.0; n],
        }
    }
}

/// Transport velocity `eps * b(x_i)` of the regularizing term.
pub(crate) fn transport_speed(grid: &Grid1D, p: &FluidParams) -> Vec<f64> {
    grid.sample(|x| p.epsilon * boundary_weight(x))
}

/// `D(S - p(v))` with the Dirichlet rows zeroed.
fn momentum_rate(state: &State, p: &FluidParams, grid: &Grid1D, out: &mut [f64]) -> Result<()> {
    let n = grid.n();
    let mut flux = Vec::with_capacity(n);
    for i in 0..n {
        flux.push(state.s[i] - pressure(state.v[i], p)?);
    }
    grid.ddx_into(&flux, out);
    out[0] = 0.0;
    out[n - 1] = 0.0;
    Ok(())
}

fn add_forcing(
    rates: &mut Rates,
    forcing: Option<&dyn Forcing>,
    t: f64,
    grid: &Grid1D,
    with_s: bool,
) {
    if let Some(f) = forcing {
        let n = grid.n();
        for (i, &x) in grid.x().iter().enumerate() {
            let [fv, fu, fs] = f.eval(t, x);
            rates.v[i] += fv;
            if i != 0 && i != n - 1 {
                rates.u[i] += fu;
            }
            if with_s {
                rates.s[i] += fs;
            }
        }
    }
}

/// Full right-hand side of the relaxed system (no splitting).
pub fn rhs_relaxed(
    state: &State,
    p: &FluidParams,
    grid: &Grid1D,
    forcing: Option<&dyn Forcing>,
    v_floor: f64,
) -> Result<Rates> {
    p.require_relaxed()?;
    check_floor(&state.v, v_floor, state.t)?;
    let n = grid.n();
    let mut r = Rates::zeros(n);
    grid.ddx_into(&state.u, &mut r.v);
    momentum_rate(state, p, grid, &mut r.u)?;
    let speed = transport_speed(grid, p);
    let mut ds = vec![0.0; n];
    grid.ddx_upwind_into(&state.s, &speed, &mut ds);
    for i in 0..n {
        r.s[i] = (p.mu * r.v[i] - state.v[i] * state.s[i]) / p.tau - speed[i] * ds[i];
    }
    add_forcing(&mut r, forcing, state.t, grid, true);
    Ok(r)
}

/// Non-stiff part integrated in the transport stage.
fn transport_rhs(
    state: &State,
    p: &FluidParams,
    grid: &Grid1D,
    speed: &[f64],
    forcing: Option<&dyn Forcing>,
    v_floor: f64,
) -> Result<Rates> {
    check_floor(&state.v, v_floor, state.t)?;
    let mut r = Rates::zeros(grid.n());
    grid.ddx_into(&state.u, &mut r.v);
    momentum_rate(state, p, grid, &mut r.u)?;
    if p.epsilon > 0.0 {
        let mut ds = vec![0.0; grid.n()];
        grid.ddx_upwind_into(&state.s, speed, &mut ds);
        for (rs, (c, d)) in r.s.iter_mut().zip(speed.iter().zip(&ds)) {
            *rs = -c * d;
        }
    }
    add_forcing(&mut r, forcing, state.t, grid, true);
    Ok(r)
}

fn relax_substep(state: &mut State, dt: f64, p: &FluidParams, grid: &Grid1D) -> Result<()> {
    let ux = grid.ddx(&state.u);
    for i in 0..grid.n() {
        state.s[i] = relax_exact_update(state.s[i], ux[i], state.v[i], dt, p)?;
    }
    Ok(())
}

/// CFL-limited step `cfl * dx / max_char_speed`, never above `dx`.
pub fn stable_dt(state: &State, p: &FluidParams, grid: &Grid1D, cfg: &SchemeConfig) -> Result<f64> {
    let speed = max_char_speed(&state.v, p)?;
    Ok((cfg.cfl * grid.dx() / speed).min(grid.dx()))
}

/// Advances `state` by `dt`.
pub fn step(
    state: &State,
    dt: f64,
    p: &FluidParams,
    grid: &Grid1D,
    cfg: &SchemeConfig,
) -> Result<State> {
    p.require_relaxed()?;
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(Error::Misuse(format!(
            "time step must be finite and >= 0, got {dt}"
        )));
    }
    state.check(cfg.v_floor)?;
    let n = grid.n();
    let forcing = cfg.forcing.as_deref();
    let speed = transport_speed(grid, p);
    let t0 = state.t;

    let mut base = state.clone();
    relax_substep(&mut base, 0.5 * dt, p, grid)?;

    let k0 = transport_rhs(&base, p, grid, &speed, forcing, cfg.v_floor)?;
    let mut stage = base.clone();
    stage.t = t0 + dt;
    for i in 0..n {
        stage.v[i] += dt * k0.v[i];
        stage.u[i] += dt * k0.u[i];
        stage.s[i] += dt * k0.s[i];
    }
    let k1 = transport_rhs(&stage, p, grid, &speed, forcing, cfg.v_floor)?;
    let mut next = base;
    for i in 0..n {
        next.v[i] = 0.5 * (next.v[i] + stage.v[i] + dt * k1.v[i]);
        next.u[i] = 0.5 * (next.u[i] + stage.u[i] + dt * k1.u[i]);
        next.s[i] = 0.5 * (next.s[i] + stage.s[i] + dt * k1.s[i]);
    }
    check_floor(&next.v, cfg.v_floor, t0 + dt)?;
    relax_substep(&mut next, 0.5 * dt, p, grid)?;

    next.u[0] = 0.0;
    next.u[n - 1] = 0.0;
    next.t = t0 + dt;
    next.check(cfg.v_floor)?;
    Ok(next)
}
