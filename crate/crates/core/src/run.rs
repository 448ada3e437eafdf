//! Time loops for both solvers and the recorded trajectory.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{energy_snapshot, energy_snapshot_parabolic, EnergySnapshot};
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::parabolic::{effective_stress, stable_dt_parabolic, step_parabolic};
use crate::params::FluidParams;
use crate::relaxed::{stable_dt, step, SchemeConfig};
use crate::state::{ParabolicState, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Relaxed,
    Parabolic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "lowercase")]
pub enum RunStatus {
    Completed,
    Aborted(String),
}

/// Recorded trajectory of one run. For the parabolic solver the `S` column
/// holds the effective stress `mu u_x / v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunArtifact {
    pub solver: SolverKind,
    pub params: FluidParams,
    pub n: usize,
    pub t_end: f64,
    /// Echo of the configuration that produced the run, filled by callers.
    #[serde(default)]
    pub config: Option<serde_json::Value>,
    pub snapshots: Vec<State>,
    pub energy: Vec<EnergySnapshot>,
    pub status: RunStatus,
    pub steps: usize,
    pub wall_time: f64,
}

impl RunArtifact {
    pub fn is_completed(&self) -> bool {
        self.status == RunStatus::Completed
    }

    pub fn final_state(&self) -> Option<&State> {
        self.snapshots.last()
    }

    /// Snapshot recorded exactly at `t`, if any.
    pub fn snapshot_at(&self, t: f64) -> Option<&State> {
        self.snapshots.iter().find(|s| s.t == t)
    }
}

trait Scheme {
    type St: Clone;
    fn time(s: &Self::St) -> f64;
    fn set_time(s: &mut Self::St, t: f64);
    fn stable_dt(&self, s: &Self::St) -> Result<f64>;
    fn step(&self, s: &Self::St, dt: f64) -> Result<Self::St>;
    fn record(&self, s: &Self::St) -> State;
    fn energy(&self, s: &Self::St) -> Result<EnergySnapshot>;
}

struct Relaxed<'a> {
    p: &'a FluidParams,
    grid: &'a Grid1D,
    cfg: &'a SchemeConfig,
}

impl Scheme for Relaxed<'_> {
    type St = State;
    fn time(s: &State) -> f64 {
        s.t
    }
    fn set_time(s: &mut State, t: f64) {
        s.t = t;
    }
    fn stable_dt(&self, s: &State) -> Result<f64> {
        stable_dt(s, self.p, self.grid, self.cfg)
    }
    fn step(&self, s: &State, dt: f64) -> Result<State> {
        step(s, dt, self.p, self.grid, self.cfg)
    }
    fn record(&self, s: &State) -> State {
        s.clone()
    }
    fn energy(&self, s: &State) -> Result<EnergySnapshot> {
        energy_snapshot(s, self.p, self.grid)
    }
}

struct Parabolic<'a> {
    p: &'a FluidParams,
    grid: &'a Grid1D,
    cfg: &'a SchemeConfig,
}

impl Scheme for Parabolic<'_> {
    type St = ParabolicState;
    fn time(s: &ParabolicState) -> f64 {
        s.t
    }
    fn set_time(s: &mut ParabolicState, t: f64) {
        s.t = t;
    }
    fn stable_dt(&self, s: &ParabolicState) -> Result<f64> {
        stable_dt_parabolic(s, self.p, self.grid, self.cfg)
    }
    fn step(&self, s: &ParabolicState, dt: f64) -> Result<ParabolicState> {
        step_parabolic(s, dt, self.p, self.grid, self.cfg)
    }
    fn record(&self, s: &ParabolicState) -> State {
        State {
            t: s.t,
            v: s.v.clone(),
            u: s.u.clone(),
            s: effective_stress(s, self.p, self.grid),
        }
    }
    fn energy(&self, s: &ParabolicState) -> Result<EnergySnapshot> {
        energy_snapshot_parabolic(s, self.p, self.grid)
    }
}

struct Recorder<'a, S: Scheme> {
    scheme: &'a S,
    snapshots: Vec<State>,
    energy: Vec<EnergySnapshot>,
}

impl<S: Scheme> Recorder<'_, S> {
    fn push(&mut self, st: &S::St, state: bool, energy: bool) -> Result<()> {
        if state {
            self.snapshots.push(self.scheme.record(st));
        }
        if energy {
            self.energy.push(self.scheme.energy(st)?);
        }
        Ok(())
    }
}

fn drive<S: Scheme>(
    scheme: &S,
    init: &S::St,
    t_end: f64,
    cfg: &SchemeConfig,
) -> (Vec<State>, Vec<EnergySnapshot>, RunStatus, usize) {
    let mut rec = Recorder {
        scheme,
        snapshots: Vec::new(),
        energy: Vec::new(),
    };
    let mut targets: Vec<f64> = cfg
        .sample_times
        .iter()
        .copied()
        .filter(|&t| t > S::time(init) && t < t_end)
        .collect();
    targets.sort_by(f64::total_cmp);
    targets.dedup();
    targets.push(t_end);

    let mut steps = 0usize;
    let mut st = init.clone();
    let outcome = (|| -> Result<()> {
        cfg.validate()?;
        if !(t_end.is_finite() && t_end >= S::time(init)) {
            return Err(Error::Misuse(format!(
                "t_end = {t_end} is before the initial time {}",
                S::time(init)
            )));
        }
        rec.push(init, true, true)?;
        let mut next_target = 0usize;
        while S::time(&st) < t_end {
            let t = S::time(&st);
            let target = targets[next_target];
            let mut dt = scheme.stable_dt(&st)?;
            let landing = t + dt >= target;
            if landing {
                dt = target - t;
            }
            let mut next = scheme.step(&st, dt)?;
            if landing {
                S::set_time(&mut next, target);
                next_target += 1;
            }
            st = next;
            steps += 1;
            let state_due = landing || steps.is_multiple_of(cfg.record_every);
            let energy_due = landing || steps.is_multiple_of(cfg.energy_every);
            rec.push(&st, state_due, energy_due)?;
        }
        Ok(())
    })();

    let status = match outcome {
        Ok(()) => RunStatus::Completed,
        Err(e) => {
            let t = S::time(&st);
            if steps > 0 && rec.snapshots.last().is_some_and(|s| s.t < t) {
                rec.snapshots.push(scheme.record(&st));
            }
            RunStatus::Aborted(e.to_string())
        }
    };
    (rec.snapshots, rec.energy, status, steps)
}

/// Integrates the relaxed system from `init` to `t_end`.
///
/// Snapshots are stored every `record_every` steps, at each requested sample
/// time and at `t_end`; the last step is shortened to land on `t_end`
/// exactly. Failures produce a partial artifact tagged as aborted whose last
/// snapshot is the last accepted state.
pub fn run(
    init: &State,
    t_end: f64,
    p: &FluidParams,
    grid: &Grid1D,
    cfg: &SchemeConfig,
) -> RunArtifact {
    let clock = Instant::now();
    let (snapshots, energy, status, steps) = match p.require_relaxed() {
        Ok(()) => drive(&Relaxed { p, grid, cfg }, init, t_end, cfg),
        Err(e) => (Vec::new(), Vec::new(), RunStatus::Aborted(e.to_string()), 0),
    };
    RunArtifact {
        solver: SolverKind::Relaxed,
        params: *p,
        n: grid.n(),
        t_end,
        config: None,
        snapshots,
        energy,
        status,
        steps,
        wall_time: clock.elapsed().as_secs_f64(),
    }
}

/// Parabolic counterpart of [`run`]. `tau` and `epsilon` are ignored.
pub fn run_parabolic(
    init: &ParabolicState,
    t_end: f64,
    p: &FluidParams,
    grid: &Grid1D,
    cfg: &SchemeConfig,
) -> RunArtifact {
    let clock = Instant::now();
    let (snapshots, energy, status, steps) = drive(&Parabolic { p, grid, cfg }, init, t_end, cfg);
    RunArtifact {
        solver: SolverKind::Parabolic,
        params: *p,
        n: grid.n(),
        t_end,
        config: None,
        snapshots,
        energy,
        status,
        steps,
        wall_time: clock.elapsed().as_secs_f64(),
    }
}
