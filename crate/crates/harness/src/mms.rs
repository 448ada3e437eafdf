//! Manufactured solutions and grid-refinement studies.
//!
//! Target fields, with `A = 0.1` and `B = 0.05`:
//!
//! ```text
//! v* = 1 + A cos(pi x) cos t
//! u* = A sin(pi x) sin t
//! S* = mu u*_x / v* + B tau sin(pi x) cos t
//! ```
//!
//! `u*` vanishes at both ends for all t. Sources are obtained by inserting
//! these fields into the governing equations:
//!
//! ```text
//! relaxed:    f_v = v*_t - u*_x
//!             f_u = u*_t + p'(v*) v*_x - S*_x
//!             f_S = S*_t + eps b(x) S*_x + (v* S* - mu u*_x) / tau
//! parabolic:  f_v = v*_t - u*_x
//!             f_u = u*_t + p'(v*) v*_x - mu (u*_x / v*)_x
//! ```
//!
//! Note `(v* S* - mu u*_x) / tau = B v* sin(pi x) cos t` stays bounded as
//! `tau -> 0`.

use std::f64::consts::PI;

use hcns_core::grid::Grid1D;
use hcns_core::model::{boundary_weight, dpressure};
use hcns_core::{run, run_parabolic, FluidParams, ParabolicState, SchemeConfig, SolverKind, State};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::verdict::Verdict;

pub const AMP_V: f64 = 0.1;
pub const AMP_S: f64 = 0.05;

/// Accepted range of the fitted order.
pub const ORDER_RANGE: (f64, f64) = (1.8, 2.2);

#[derive(Debug, Clone, Copy)]
struct Fields {
    v: f64,
    v_t: f64,
    v_x: f64,
    u_t: f64,
    u_x: f64,
    /// `(u_x / v)_x`
    q_x: f64,
    s: f64,
    s_t: f64,
    s_x: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct Manufactured {
    pub params: FluidParams,
}

impl Manufactured {
    pub fn new(params: FluidParams) -> Self {
        Self { params }
    }

    fn fields(&self, t: f64, x: f64) -> Fields {
        let (mu, tau) = (self.params.mu, self.params.tau);
        let (sx, cx) = (PI * x).sin_cos();
        let (st, ct) = t.sin_cos();
        let v = 1.0 + AMP_V * cx * ct;
        let v_t = -AMP_V * cx * st;
        let v_x = -AMP_V * PI * sx * ct;
        let u_t = AMP_V * sx * ct;
        let u_x = AMP_V * PI * cx * st;
        let u_xt = AMP_V * PI * cx * ct;
        let u_xx = -AMP_V * PI * PI * sx * st;
        let q = u_x / v;
        let q_t = (u_xt * v - u_x * v_t) / (v * v);
        let q_x = (u_xx * v - u_x * v_x) / (v * v);
        Fields {
            v,
            v_t,
            v_x,
            u_t,
            u_x,
            q_x,
            s: mu * q + AMP_S * tau * sx * ct,
            s_t: mu * q_t - AMP_S * tau * sx * st,
            s_x: mu * q_x + AMP_S * tau * PI * cx * ct,
        }
    }

    pub fn v(&self, t: f64, x: f64) -> f64 {
        1.0 + AMP_V * (PI * x).cos() * t.cos()
    }

    pub fn u(&self, t: f64, x: f64) -> f64 {
        AMP_V * (PI * x).sin() * t.sin()
    }

    pub fn s(&self, t: f64, x: f64) -> f64 {
        self.fields(t, x).s
    }

    pub fn state(&self, t: f64, grid: &Grid1D) -> State {
        State {
            t,
            v: grid.sample(|x| self.v(t, x)),
            u: grid.sample(|x| self.u(t, x)),
            s: grid.sample(|x| self.s(t, x)),
        }
    }

    pub fn relaxed_source(&self, t: f64, x: f64) -> [f64; 3] {
        let p = &self.params;
        let f = self.fields(t, x);
        let dp = dpressure(f.v, p).expect("manufactured v stays positive");
        [
            f.v_t - f.u_x,
            f.u_t + dp * f.v_x - f.s_x,
            f.s_t + p.epsilon * boundary_weight(x) * f.s_x + AMP_S * f.v * (PI * x).sin() * t.cos(),
        ]
    }

    pub fn parabolic_source(&self, t: f64, x: f64) -> [f64; 3] {
        let f = self.fields(t, x);
        let dp = dpressure(f.v, &self.params).expect("manufactured v stays positive");
        [
            f.v_t - f.u_x,
            f.u_t + dp * f.v_x - self.params.mu * f.q_x,
            0.0,
        ]
    }
}

/// Least-squares slope of `log(err)` against `log(dx)`.
pub fn fitted_order(dx: &[f64], err: &[f64]) -> f64 {
    let xs: Vec<f64> = dx.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = err.iter().map(|e| e.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmsRow {
    pub n: usize,
    pub dx: f64,
    pub error: f64,
    /// `|int v(t_end) - int v(0)|`; the manufactured `v` has constant mass.
    pub mass_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmsResult {
    pub solver: SolverKind,
    pub t_end: f64,
    pub rows: Vec<MmsRow>,
    pub order: f64,
    pub verdict: Verdict,
}

/// Verdict of a refinement table: errors must decrease monotonically and the
/// fitted order must fall in [`ORDER_RANGE`].
pub fn mms_verdict(rows: &[MmsRow]) -> (f64, Verdict) {
    let dx: Vec<f64> = rows.iter().map(|r| r.dx).collect();
    let err: Vec<f64> = rows.iter().map(|r| r.error).collect();
    let order = fitted_order(&dx, &err);
    let monotone = err.windows(2).all(|w| w[1] < w[0]);
    let verdict = if monotone && order >= ORDER_RANGE.0 && order <= ORDER_RANGE.1 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    (order, verdict)
}

/// Runs the manufactured problem on `n = base_n * 2^k - (2^k - 1)` nodes,
/// i.e. halving `dx` at each level starting from `base_n` nodes.
pub fn mms_convergence(
    solver: SolverKind,
    base_n: usize,
    levels: usize,
    p: &FluidParams,
    t_end: f64,
    cfl: f64,
) -> Result<MmsResult, HarnessError> {
    if levels < 3 {
        return Err(HarnessError::Config(format!(
            "MMS study needs at least 3 levels, got {levels}"
        )));
    }
    let mms = Manufactured::new(*p);
    let rows = (0..levels)
        .into_par_iter()
        .map(|k| -> Result<MmsRow, HarnessError> {
            let cells = (base_n - 1) << k;
            let grid = Grid1D::new(cells + 1)?;
            let base = SchemeConfig {
                cfl,
                record_every: usize::MAX,
                energy_every: usize::MAX,
                ..SchemeConfig::default()
            };
            let init = mms.state(0.0, &grid);
            let art = match solver {
                SolverKind::Relaxed => {
                    let cfg = base.with_forcing(move |t, x| mms.relaxed_source(t, x));
                    run(&init, t_end, p, &grid, &cfg)
                }
                SolverKind::Parabolic => {
                    let cfg = base.with_forcing(move |t, x| mms.parabolic_source(t, x));
                    run_parabolic(&ParabolicState::from(&init), t_end, p, &grid, &cfg)
                }
            };
            if let hcns_core::RunStatus::Aborted(reason) = &art.status {
                return Err(HarnessError::Core(hcns_core::Error::Misuse(format!(
                    "MMS run at n = {} aborted: {reason}",
                    grid.n()
                ))));
            }
            let fin = art.final_state().expect("completed run has a final state");
            let exact = mms.state(t_end, &grid);
            let sq = |a: &[f64], b: &[f64]| {
                let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                grid.trapz_map(&d, |y| y * y)
            };
            let mut e2 = sq(&fin.v, &exact.v) + sq(&fin.u, &exact.u);
            if solver == SolverKind::Relaxed {
                e2 += sq(&fin.s, &exact.s);
            }
            Ok(MmsRow {
                n: grid.n(),
                dx: grid.dx(),
                error: e2.sqrt(),
                mass_drift: (grid.trapz(&fin.v) - grid.trapz(&init.v)).abs(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (order, verdict) = mms_verdict(&rows);
    Ok(MmsResult {
        solver,
        t_end,
        rows,
        order,
        verdict,
    })
}
