//! Energy functionals and residuals evaluated on recorded states.
//!
//! Time derivatives are obtained by substituting the equations rather than by
//! differencing a trajectory:
//!
//! ```text
//! v_tt = D u_t
//! u_tt = D (S_t - p'(v) v_t)
//! S_tt = (mu D u_t - v_t S - v S_t) / tau - eps b D S_t
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::model::{dpressure, potential_energy_density};
use crate::parabolic::{effective_stress, rhs_parabolic, viscous_dissipation};
use crate::params::FluidParams;
use crate::relaxed::{rhs_relaxed, transport_speed, Rates};
use crate::state::{ParabolicState, State};

const NO_FLOOR: f64 = 0.0;

/// Sobolev-type norm of nodal data: 0 = L², 1 = H¹, 2 = H².
pub fn discrete_norm(field: &[f64], grid: &Grid1D, order: u8) -> Result<f64> {
    Ok(discrete_norm_sq(field, grid, order)?.sqrt())
}

pub fn discrete_norm_sq(field: &[f64], grid: &Grid1D, order: u8) -> Result<f64> {
    if order > 2 {
        return Err(Error::Misuse(format!(
            "norm order must be 0, 1 or 2, got {order}"
        )));
    }
    if field.len() != grid.n() {
        return Err(Error::Misuse(format!(
            "field has {} values, grid has {} nodes",
            field.len(),
            grid.n()
        )));
    }
    let sq = |f: &[f64]| grid.trapz_map(f, |y| y * y);
    let mut acc = sq(field);
    if order >= 1 {
        acc += sq(&grid.ddx_o2(field));
    }
    if order >= 2 {
        acc += sq(&grid.d2dx2(field));
    }
    Ok(acc)
}

fn l2_sq(field: &[f64], grid: &Grid1D) -> f64 {
    grid.trapz_map(field, |y| y * y)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeDerivatives {
    pub first: Rates,
    pub second: Rates,
}

/// First and second time derivatives of `(v, u, S)` by equation substitution.
pub fn time_derivative_fields(
    state: &State,
    p: &FluidParams,
    grid: &Grid1D,
) -> Result<TimeDerivatives> {
    let first = rhs_relaxed(state, p, grid, None, NO_FLOOR)?;
    let n = grid.n();
    let v_tt = grid.ddx(&first.u);
    let mut flux = vec![0.0; n];
    for i in 0..n {
        flux[i] = first.s[i] - dpressure(state.v[i], p)? * first.v[i];
    }
    let mut u_tt = grid.ddx(&flux);
    u_tt[0] = 0.0;
    u_tt[n - 1] = 0.0;
    let speed = transport_speed(grid, p);
    let mut ds_t = vec![0.0; n];
    grid.ddx_upwind_into(&first.s, &speed, &mut ds_t);
    let dut = grid.ddx(&first.u);
    let s_tt = (0..n)
        .map(|i| {
            (p.mu * dut[i] - first.v[i] * state.s[i] - state.v[i] * first.s[i]) / p.tau
                - speed[i] * ds_t[i]
        })
        .collect();
    Ok(TimeDerivatives {
        first,
        second: Rates {
            v: v_tt,
            u: u_tt,
            s: s_tt,
        },
    })
}

/// Squared-norm parts of the energy functional `E` at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EComponents {
    /// `||(v-1, u, sqrt(tau) S)||_{H2}^2`
    pub h2: f64,
    /// `||d_t (v, u, sqrt(tau) S)||_{H1}^2`
    pub dt_h1: f64,
    /// `tau^2 ||d_tt (v, u, sqrt(tau) S)||_{L2}^2`
    pub dt2_l2: f64,
}

impl EComponents {
    pub fn total(&self) -> f64 {
        self.h2 + self.dt_h1 + self.dt2_l2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySnapshot {
    pub t: f64,
    /// `int (a(v-1) - h(v) + u^2/2 + tau S^2 / (2 mu)) dx`
    pub e_phys: f64,
    /// `(1/mu) int v S^2 dx`; for the parabolic solver the discrete viscous
    /// dissipation.
    pub diss_rate: f64,
    pub e_components: EComponents,
    pub d_value: f64,
    /// `||S - mu D u / v||_{L2}`
    pub relax_residual: f64,
    /// `int S^2 dx`
    pub s_l2_sq: f64,
    /// `int v dx`
    pub mass: f64,
    pub v_min: f64,
    pub v_max: f64,
}

fn v_range(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| {
            (lo.min(y), hi.max(y))
        })
}

pub fn relaxation_residual(state: &State, p: &FluidParams, grid: &Grid1D) -> f64 {
    let ux = grid.ddx(&state.u);
    let r: Vec<f64> = (0..grid.n())
        .map(|i| state.s[i] - p.mu * ux[i] / state.v[i])
        .collect();
    l2_sq(&r, grid).sqrt()
}

pub fn energy_snapshot(state: &State, p: &FluidParams, grid: &Grid1D) -> Result<EnergySnapshot> {
    let n = grid.n();
    let tau = p.tau;
    let dens = (0..n)
        .map(|i| {
            Ok(potential_energy_density(state.v[i], p)?
                + 0.5 * state.u[i] * state.u[i]
                + tau * state.s[i] * state.s[i] / (2.0 * p.mu))
        })
        .collect::<Result<Vec<_>>>()?;
    let vs2: Vec<f64> = (0..n)
        .map(|i| state.v[i] * state.s[i] * state.s[i])
        .collect();
    let dv: Vec<f64> = state.v.iter().map(|v| v - 1.0).collect();

    let td = time_derivative_fields(state, p, grid)?;
    let (f, s) = (&td.first, &td.second);
    let h = |y: &[f64], k| discrete_norm_sq(y, grid, k);

    let s_h2 = h(&state.s, 2)?;
    let s_t_h1 = h(&f.s, 1)?;
    let s_tt = l2_sq(&s.s, grid);
    let e_components = EComponents {
        h2: h(&dv, 2)? + h(&state.u, 2)? + tau * s_h2,
        dt_h1: h(&f.v, 1)? + h(&f.u, 1)? + tau * s_t_h1,
        dt2_l2: tau * tau * (l2_sq(&s.v, grid) + l2_sq(&s.u, grid) + tau * s_tt),
    };
    let d_value = vu_derivative_sq(&state.v, &state.u, &f.v, &f.u, Some((&s.v, &s.u)), grid)
        + s_h2
        + s_t_h1
        + tau * tau * s_tt;
    let (v_min, v_max) = v_range(&state.v);
    Ok(EnergySnapshot {
        t: state.t,
        e_phys: grid.trapz(&dens),
        diss_rate: grid.trapz(&vs2) / p.mu,
        e_components,
        d_value,
        relax_residual: relaxation_residual(state, p, grid),
        s_l2_sq: l2_sq(&state.s, grid),
        mass: grid.trapz(&state.v),
        v_min,
        v_max,
    })
}

/// `sum_{1 <= |alpha| <= 2} ||D^alpha (v, u)||^2` over `D = (d_t, d_x)`.
/// The `d_tt` terms are skipped when `second` is `None`.
fn vu_derivative_sq(
    v: &[f64],
    u: &[f64],
    v_t: &[f64],
    u_t: &[f64],
    second: Option<(&[f64], &[f64])>,
    grid: &Grid1D,
) -> f64 {
    let mut acc = 0.0;
    for (y, y_t) in [(v, v_t), (u, u_t)] {
        acc += l2_sq(y_t, grid)
            + l2_sq(&grid.ddx_o2(y), grid)
            + l2_sq(&grid.ddx_o2(y_t), grid)
            + l2_sq(&grid.d2dx2(y), grid);
    }
    if let Some((v_tt, u_tt)) = second {
        acc += l2_sq(v_tt, grid) + l2_sq(u_tt, grid);
    }
    acc
}

/// Energy snapshot of the classical system. `S` is the effective stress
/// `mu u_x / v`, the `tau`-weighted parts vanish, and the `d_tt` terms of the
/// dissipation are omitted.
pub fn energy_snapshot_parabolic(
    state: &ParabolicState,
    p: &FluidParams,
    grid: &Grid1D,
) -> Result<EnergySnapshot> {
    let n = grid.n();
    let dens = (0..n)
        .map(|i| Ok(potential_energy_density(state.v[i], p)? + 0.5 * state.u[i] * state.u[i]))
        .collect::<Result<Vec<_>>>()?;
    let dv: Vec<f64> = state.v.iter().map(|v| v - 1.0).collect();
    let (vt, ut) = rhs_parabolic(state, p, grid, None, NO_FLOOR)?;
    let s = effective_stress(state, p, grid);
    let e_components = EComponents {
        h2: discrete_norm_sq(&dv, grid, 2)? + discrete_norm_sq(&state.u, grid, 2)?,
        dt_h1: discrete_norm_sq(&vt, grid, 1)? + discrete_norm_sq(&ut, grid, 1)?,
        dt2_l2: 0.0,
    };
    let d_value =
        vu_derivative_sq(&state.v, &state.u, &vt, &ut, None, grid) + discrete_norm_sq(&s, grid, 2)?;
    let (v_min, v_max) = v_range(&state.v);
    Ok(EnergySnapshot {
        t: state.t,
        e_phys: grid.trapz(&dens),
        diss_rate: viscous_dissipation(state, p, grid),
        e_components,
        d_value,
        relax_residual: 0.0,
        s_l2_sq: l2_sq(&s, grid),
        mass: grid.trapz(&state.v),
        v_min,
        v_max,
    })
}

/// Three-point derivative on a possibly non-uniform stencil; reduces to the
/// centered difference when both gaps are equal.
fn three_point_slope(t: [f64; 3], y: [f64; 3]) -> f64 {
    let h1 = t[1] - t[0];
    let h2 = t[2] - t[1];
    -h2 / (h1 * (h1 + h2)) * y[0] + (h2 - h1) / (h1 * h2) * y[1] + h1 / (h2 * (h1 + h2)) * y[2]
}

/// Energy-balance residual `r(t_k) = d/dt e_phys + diss_rate` at every
/// interior snapshot. Zero up to truncation error when `eps = 0`.
pub fn dissipation_residual(series: &[EnergySnapshot]) -> Result<Vec<(f64, f64)>> {
    if series.len() < 3 {
        return Err(Error::Misuse(format!(
            "dissipation residual needs at least 3 snapshots, got {}",
            series.len()
        )));
    }
    Ok(series
        .windows(3)
        .filter(|w| w[1].t > w[0].t && w[2].t > w[1].t)
        .map(|w| {
            let slope = three_point_slope(
                [w[0].t, w[1].t, w[2].t],
                [w[0].e_phys, w[1].e_phys, w[2].e_phys],
            );
            (w[1].t, slope + w[1].diss_rate)
        })
        .collect())
}

/// Upper bound `(eps / mu) int S^2 dx` for the residual when `eps > 0`.
pub fn regularization_bound(snap: &EnergySnapshot, p: &FluidParams) -> f64 {
    p.epsilon / p.mu * snap.s_l2_sq
}

/// Band that keeps the specific volume in the small-data regime.
pub const REGIME_V_MIN: f64 = 0.75;
pub const REGIME_V_MAX: f64 = 1.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub series: Vec<EnergySnapshot>,
    /// Running sup of the `E` components, one entry per snapshot.
    pub e_sup: Vec<f64>,
    /// Trapezoidal time integral of `D_value`.
    pub d_integral: f64,
    pub monotone: bool,
    /// Component sum at the first snapshot.
    pub e0: f64,
    pub in_regime: bool,
}

impl EnergyReport {
    pub fn from_series(series: Vec<EnergySnapshot>) -> Self {
        let mut e_sup = Vec::with_capacity(series.len());
        let mut running = f64::NEG_INFINITY;
        for s in &series {
            running = running.max(s.e_components.total());
            e_sup.push(running);
        }
        let d_integral = series
            .windows(2)
            .map(|w| 0.5 * (w[1].t - w[0].t) * (w[0].d_value + w[1].d_value))
            .sum();
        let monotone = series.windows(2).all(|w| w[1].e_phys <= w[0].e_phys);
        let in_regime = series
            .iter()
            .all(|s| s.v_min >= REGIME_V_MIN && s.v_max <= REGIME_V_MAX);
        Self {
            e0: series.first().map_or(0.0, |s| s.e_components.total()),
            e_sup,
            d_integral,
            monotone,
            in_regime,
            series,
        }
    }

    pub fn final_e_sup(&self) -> f64 {
        self.e_sup.last().copied().unwrap_or(0.0)
    }

    /// `int D dt` restricted to `t >= t_from`.
    pub fn d_integral_from(&self, t_from: f64) -> f64 {
        self.series
            .windows(2)
            .filter(|w| w[0].t >= t_from)
            .map(|w| 0.5 * (w[1].t - w[0].t) * (w[0].d_value + w[1].d_value))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AprioriVerdict {
    Pass { ratios: Vec<f64>, spread: f64 },
    Fail { ratios: Vec<f64>, spread: f64 },
    Vacuous,
    Invalid { reason: String },
}

/// Maximum relative spread of `(E_sup + int D) / E0` allowed across a family.
pub const APRIORI_SPREAD: f64 = 0.5;

/// Checks that `(E_sup + int D) / E0` stays put across an amplitude family.
pub fn apriori_check(reports: &[EnergyReport]) -> AprioriVerdict {
    if reports.len() < 3 {
        return AprioriVerdict::Invalid {
            reason: format!("need at least 3 amplitudes, got {}", reports.len()),
        };
    }
    if let Some(i) = reports.iter().position(|r| !r.in_regime) {
        return AprioriVerdict::Invalid {
            reason: format!("run {i} leaves the band {REGIME_V_MIN} <= v <= {REGIME_V_MAX}"),
        };
    }
    if reports.iter().all(|r| r.e0 == 0.0) {
        return AprioriVerdict::Vacuous;
    }
    if reports.iter().any(|r| r.e0 == 0.0) {
        return AprioriVerdict::Invalid {
            reason: "family mixes zero and non-zero initial energy".into(),
        };
    }
    let ratios: Vec<f64> = reports
        .iter()
        .map(|r| (r.final_e_sup() + r.d_integral) / r.e0)
        .collect();
    apriori_from_ratios(ratios)
}

/// Verdict on precomputed `(E_sup + int D) / E0` ratios.
pub fn apriori_from_ratios(ratios: Vec<f64>) -> AprioriVerdict {
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = (hi - lo) / lo;
    if spread < APRIORI_SPREAD {
        AprioriVerdict::Pass { ratios, spread }
    } else {
        AprioriVerdict::Fail { ratios, spread }
    }
}

/// Per-snapshot relaxation residual and its `L2`-in-time norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxationResidual {
    pub series: Vec<(f64, f64)>,
    pub integrated: f64,
}

impl RelaxationResidual {
    /// First recorded time at which the residual drops below `fraction` of
    /// its initial value.
    pub fn first_time_below(&self, fraction: f64) -> Option<f64> {
        let r0 = self.series.first()?.1;
        self.series
            .iter()
            .find(|(_, r)| *r < fraction * r0)
            .map(|(t, _)| *t)
    }
}

pub fn relaxation_residual_series(series: &[EnergySnapshot]) -> RelaxationResidual {
    let pts: Vec<(f64, f64)> = series.iter().map(|s| (s.t, s.relax_residual)).collect();
    let integrated = pts
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 * w[0].1 + w[1].1 * w[1].1))
        .sum::<f64>()
        .sqrt();
    RelaxationResidual {
        series: pts,
        integrated,
    }
}
