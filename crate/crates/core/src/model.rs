//! Constitutive closures, the relaxation update and characteristic speeds.
//!
//! The pressure law is `p(v) = a v^{-gamma}` in terms of the specific volume
//! `v = 1/rho`. The enthalpy-like potential `h` satisfies `h' = p`, `h(1) = 0`.

use crate::error::{Error, Result};
use crate::params::FluidParams;

fn check_volume(what: &'static str, v: f64) -> Result<()> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain { what, value: v })
    }
}

pub fn pressure(v: f64, p: &FluidParams) -> Result<f64> {
    check_volume("pressure", v)?;
    Ok(p.a * v.powf(-p.gamma))
}

pub fn dpressure(v: f64, p: &FluidParams) -> Result<f64> {
    check_volume("dpressure", v)?;
    Ok(-p.a * p.gamma * v.powf(-p.gamma - 1.0))
}

/// `h(v) = a (v^{1-gamma} - 1) / (1 - gamma)`.
pub fn enthalpy(v: f64, p: &FluidParams) -> Result<f64> {
    check_volume("enthalpy", v)?;
    Ok(p.a * (v.powf(1.0 - p.gamma) - 1.0) / (1.0 - p.gamma))
}

/// Convex potential-energy density `a (v - 1) - h(v)`, zero only at `v = 1`.
///
/// The `a (v - 1)` part integrates to a conserved quantity, so it does not
/// change the energy balance; it only shifts the minimum to `v = 1`.
pub fn potential_energy_density(v: f64, p: &FluidParams) -> Result<f64> {
    Ok(p.a * (v - 1.0) - enthalpy(v, p)?)
}

/// Weight of the boundary-regularizing transport, `b(x) = 2x - 1`.
pub fn boundary_weight(x: f64) -> f64 {
    2.0 * x - 1.0
}

/// Exact solution of `tau S' + v S = mu ux` over `dt` with `v`, `ux` frozen.
pub fn relax_exact_update(s: f64, ux: f64, v: f64, dt: f64, p: &FluidParams) -> Result<f64> {
    p.require_relaxed()?;
    check_volume("relax_exact_update", v)?;
    let target = p.mu * ux / v;
    Ok(target + (s - target) * (-v * dt / p.tau).exp())
}

/// Largest characteristic speed at one node: `sqrt(mu/tau - p'(v)) + epsilon`.
pub fn char_speed(v: f64, p: &FluidParams) -> Result<f64> {
    p.require_relaxed()?;
    Ok((p.mu / p.tau - dpressure(v, p)?).sqrt() + p.epsilon)
}

/// Maximum of [`char_speed`] over a field of specific volumes.
pub fn max_char_speed(v: &[f64], p: &FluidParams) -> Result<f64> {
    p.require_relaxed()?;
    let mut vmin = f64::INFINITY;
    for &vi in v {
        check_volume("max_char_speed", vi)?;
        vmin = vmin.min(vi);
    }
    // -p' is decreasing in v, so the fastest node is the most compressed one.
    char_speed(vmin, p)
}
