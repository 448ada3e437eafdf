//! Numerical laboratory for the one-dimensional relaxed compressible
//! Navier-Stokes system in Lagrangian mass coordinates on `[0, 1]`:
//!
//! ```text
//! v_t = u_x,   u_t + p(v)_x = S_x,   tau S_t + v S = mu u_x,   u = 0 at x = 0, 1
//! ```
//!
//! together with its boundary-regularized variant (`tau eps b(x) S_x` added
//! to the stress equation, `b(x) = 2x - 1`) and the classical parabolic limit
//! `u_t + p(v)_x = (mu u_x / v)_x`. The Eulerian density is `rho = 1 / v`.

pub mod diagnostics;
pub mod error;
pub mod forcing;
pub mod grid;
pub mod model;
pub mod parabolic;
pub mod params;
pub mod relaxed;
pub mod run;
pub mod state;

pub use diagnostics::{
    apriori_check, apriori_from_ratios, discrete_norm, dissipation_residual, energy_snapshot,
    energy_snapshot_parabolic, relaxation_residual_series, time_derivative_fields, AprioriVerdict,
    EComponents, EnergyReport, EnergySnapshot,
};
pub use error::{Error, Result};
pub use forcing::Forcing;
pub use grid::Grid1D;
pub use params::FluidParams;
pub use relaxed::{rhs_relaxed, stable_dt, step, Rates, SchemeConfig};
pub use run::{run, run_parabolic, RunArtifact, RunStatus, SolverKind};
pub use state::{ParabolicState, State};
