//! Parameter sweeps and long-time experiments built on the two solvers.
//!
//! Every sweep member runs on the same grid with the same initial `(v, u)`
//! and is sampled at the same instants, so differences between members are
//! free of first-order discretization and time-alignment effects.

use hcns_core::diagnostics::{REGIME_V_MAX, REGIME_V_MIN};
use hcns_core::grid::Grid1D;
use hcns_core::params::EPSILON_MAX;
use hcns_core::{
    apriori_check, apriori_from_ratios, relaxation_residual_series, run, run_parabolic,
    AprioriVerdict, EnergyReport, FluidParams, ParabolicState, RunArtifact, RunStatus,
    SchemeConfig, State,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::initial::{make_initial_data, IcConfig, IcFamily};
use crate::mms::fitted_order;
use crate::verdict::{strictly_decreasing, Verdict};

/// Settings shared by every member of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepBase {
    pub params: FluidParams,
    pub n: usize,
    pub t_end: f64,
    pub cfl: f64,
    pub ic: IcConfig,
    /// Number of equally spaced comparison instants in `(0, t_end]`.
    pub samples: usize,
}

impl SweepBase {
    pub fn new(params: FluidParams, n: usize, t_end: f64, ic: IcConfig) -> Self {
        Self {
            params,
            n,
            t_end,
            cfl: 0.4,
            ic,
            samples: 200,
        }
    }

    pub fn sample_times(&self) -> Vec<f64> {
        (1..=self.samples)
            .map(|k| self.t_end * k as f64 / self.samples as f64)
            .collect()
    }

    fn sampled_config(&self) -> SchemeConfig {
        SchemeConfig {
            cfl: self.cfl,
            record_every: usize::MAX,
            energy_every: usize::MAX,
            sample_times: self.sample_times(),
            ..SchemeConfig::default()
        }
    }

    fn grid(&self) -> Result<Grid1D, HarnessError> {
        Ok(Grid1D::new(self.n)?)
    }

    fn validate(&self) -> Result<(), HarnessError> {
        self.params.validate()?;
        if self.samples == 0 || !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(HarnessError::Config(
                "sweep needs t_end > 0 and at least one sample".into(),
            ));
        }
        Ok(())
    }
}

fn aborted(art: &RunArtifact) -> Option<String> {
    match &art.status {
        RunStatus::Completed => None,
        RunStatus::Aborted(r) => Some(r.clone()),
    }
}

fn l2_diff_sq(grid: &Grid1D, a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    grid.trapz_map(&d, |y| y * y)
}

/// `sup_t ||(v - v_ref, u - u_ref [, S - S_ref])||_{L2}` over the snapshots
/// both runs recorded at identical times.
pub fn sup_distance(grid: &Grid1D, a: &RunArtifact, b: &RunArtifact, with_stress: bool) -> f64 {
    a.snapshots
        .iter()
        .filter_map(|sa| b.snapshot_at(sa.t).map(|sb| (sa, sb)))
        .map(|(sa, sb)| state_distance(grid, sa, sb, with_stress))
        .fold(0.0, f64::max)
}

fn state_distance(grid: &Grid1D, a: &State, b: &State, with_stress: bool) -> f64 {
    let mut d = l2_diff_sq(grid, &a.v, &b.v) + l2_diff_sq(grid, &a.u, &b.u);
    if with_stress {
        d += l2_diff_sq(grid, &a.s, &b.s);
    }
    d.sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauRow {
    #[serde(rename = "param_value")]
    pub tau: f64,
    /// Sup-in-time L2 distance of `(v, u)` to the parabolic reference.
    pub distance: f64,
    /// `(int ||S - mu u_x / v||^2 dt)^{1/2}`
    pub residual: f64,
    pub aborted: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerRow {
    #[serde(rename = "param_value")]
    pub tau: f64,
    pub initial_residual: f64,
    /// First recorded time with residual below 10 % of the initial value.
    pub collapse_time: Option<f64>,
    /// `collapse_time / tau`
    pub collapse_in_tau: Option<f64>,
}

/// Initial-layer collapse must happen before this many relaxation times.
pub const LAYER_LIMIT_IN_TAU: f64 = 20.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauSweep {
    pub rows: Vec<TauRow>,
    /// Log-log slope of the distance column against `tau`.
    pub slope: Option<f64>,
    pub residual_slope: Option<f64>,
    pub verdict: Verdict,
    pub layer: Vec<LayerRow>,
    pub layer_verdict: Verdict,
}

fn tau_verdict(rows: &[TauRow]) -> Verdict {
    if rows.iter().any(|r| r.aborted.is_some()) {
        return Verdict::Invalid;
    }
    if rows.len() < 2 {
        return Verdict::None;
    }
    let d: Vec<f64> = rows.iter().map(|r| r.distance).collect();
    let r: Vec<f64> = rows.iter().map(|r| r.residual).collect();
    if strictly_decreasing(&d) && strictly_decreasing(&r) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn layer_verdict(rows: &[LayerRow]) -> Verdict {
    if rows.is_empty() {
        return Verdict::None;
    }
    let ok = rows
        .iter()
        .all(|r| r.collapse_in_tau.is_some_and(|k| k < LAYER_LIMIT_IN_TAU));
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn slope(rows: &[TauRow], f: impl Fn(&TauRow) -> f64) -> Option<f64> {
    (rows.len() >= 2).then(|| {
        let taus: Vec<f64> = rows.iter().map(|r| r.tau).collect();
        let ys: Vec<f64> = rows.iter().map(f).collect();
        fitted_order(&taus, &ys)
    })
}

impl TauSweep {
    /// Recomputes the verdicts from the stored tables.
    pub fn reverify(&self) -> (Verdict, Verdict) {
        (tau_verdict(&self.rows), layer_verdict(&self.layer))
    }
}

/// Relaxation-limit sweep against the parabolic reference solution.
///
/// Relaxed members start from `base.ic` (normally well-prepared). When
/// `with_layer` is set, each `tau` is also run from unprepared data up to
/// `LAYER_LIMIT_IN_TAU * tau` to time the collapse of the initial layer.
pub fn tau_sweep(
    taus: &[f64],
    base: &SweepBase,
    with_layer: bool,
) -> Result<TauSweep, HarnessError> {
    base.validate()?;
    if taus.is_empty() {
        return Err(HarnessError::Config(
            "tau sweep needs at least one tau".into(),
        ));
    }
    if taus.iter().any(|&t| t.is_nan() || t <= 0.0) || !strictly_decreasing(taus) {
        return Err(HarnessError::Config(
            "taus must be positive and strictly decreasing".into(),
        ));
    }
    let grid = base.grid()?;
    let cfg = base.sampled_config();
    let init = make_initial_data(&base.ic, &grid, &base.params)?;
    let reference = run_parabolic(
        &ParabolicState::from(&init),
        base.t_end,
        &base.params,
        &grid,
        &cfg,
    );
    if let Some(reason) = aborted(&reference) {
        return Err(HarnessError::Core(hcns_core::Error::Misuse(format!(
            "parabolic reference aborted: {reason}"
        ))));
    }

    let rows: Vec<TauRow> = taus
        .par_iter()
        .map(|&tau| -> Result<TauRow, HarnessError> {
            let p = base.params.with_tau(tau)?;
            let init = make_initial_data(&base.ic, &grid, &p)?;
            let mut cfg = cfg.clone();
            cfg.energy_every = usize::MAX;
            let art = run(&init, base.t_end, &p, &grid, &cfg);
            let residual = relaxation_residual_series(&art.energy).integrated;
            Ok(TauRow {
                tau,
                distance: sup_distance(&grid, &art, &reference, false),
                residual,
                aborted: aborted(&art),
            })
        })
        .collect::<Result<_, _>>()?;

    let layer: Vec<LayerRow> = if with_layer {
        let ic = IcConfig {
            family: IcFamily::UnpreparedSine,
            ..base.ic.clone()
        };
        taus.par_iter()
            .map(|&tau| -> Result<LayerRow, HarnessError> {
                let p = base.params.with_tau(tau)?;
                let init = make_initial_data(&ic, &grid, &p)?;
                let cfg = SchemeConfig {
                    cfl: base.cfl,
                    record_every: usize::MAX,
                    energy_every: 1,
                    ..SchemeConfig::default()
                };
                let art = run(&init, LAYER_LIMIT_IN_TAU * tau, &p, &grid, &cfg);
                let res = relaxation_residual_series(&art.energy);
                let collapse_time = res.first_time_below(0.1);
                Ok(LayerRow {
                    tau,
                    initial_residual: res.series.first().map_or(0.0, |r| r.1),
                    collapse_time,
                    collapse_in_tau: collapse_time.map(|t| t / tau),
                })
            })
            .collect::<Result<_, _>>()?
    } else {
        Vec::new()
    };

    Ok(TauSweep {
        slope: slope(&rows, |r| r.distance),
        residual_slope: slope(&rows, |r| r.residual),
        verdict: tau_verdict(&rows),
        layer_verdict: layer_verdict(&layer),
        rows,
        layer,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsRow {
    #[serde(rename = "param_value")]
    pub epsilon: f64,
    /// Sup-in-time L2 distance of `(v, u, S)` to the `eps = 0` run.
    pub distance: f64,
    /// Same distance evaluated on the reflected states `x -> 1 - x`.
    pub distance_mirrored: f64,
    pub aborted: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsSweep {
    pub rows: Vec<EpsRow>,
    pub slope: Option<f64>,
    pub verdict: Verdict,
}

fn eps_verdict(rows: &[EpsRow]) -> Verdict {
    if rows.iter().any(|r| r.aborted.is_some()) {
        return Verdict::Invalid;
    }
    let positive: Vec<f64> = rows
        .iter()
        .filter(|r| r.epsilon > 0.0)
        .map(|r| r.distance)
        .collect();
    if positive.len() < 2 {
        return Verdict::None;
    }
    if strictly_decreasing(&positive) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

impl EpsSweep {
    pub fn reverify(&self) -> Verdict {
        eps_verdict(&self.rows)
    }
}

/// Boundary-regularization sweep: every `eps` against the `eps = 0` run.
/// The list must contain 0 and otherwise be strictly decreasing.
pub fn eps_sweep(epsilons: &[f64], base: &SweepBase) -> Result<EpsSweep, HarnessError> {
    base.validate()?;
    base.params.require_relaxed()?;
    if let Some(&bad) = epsilons
        .iter()
        .find(|&&e| !(0.0..=EPSILON_MAX).contains(&e))
    {
        return Err(HarnessError::Config(format!(
            "epsilon {bad} outside [0, {EPSILON_MAX}]"
        )));
    }
    if !epsilons.contains(&0.0) {
        return Err(HarnessError::Config("epsilon list must include 0".into()));
    }
    let positive: Vec<f64> = epsilons.iter().copied().filter(|&e| e > 0.0).collect();
    if !strictly_decreasing(&positive) {
        return Err(HarnessError::Config(
            "positive epsilons must be strictly decreasing".into(),
        ));
    }
    let grid = base.grid()?;
    let cfg = base.sampled_config();
    let runs: Vec<(f64, RunArtifact)> = epsilons
        .par_iter()
        .map(|&eps| -> Result<_, HarnessError> {
            let p = base.params.with_epsilon(eps)?;
            let init = make_initial_data(&base.ic, &grid, &p)?;
            Ok((eps, run(&init, base.t_end, &p, &grid, &cfg)))
        })
        .collect::<Result<_, _>>()?;
    let reference = &runs
        .iter()
        .find(|(e, _)| *e == 0.0)
        .expect("checked above")
        .1;
    let mirrored = |a: &RunArtifact| RunArtifact {
        snapshots: a.snapshots.iter().map(State::mirrored).collect(),
        ..a.clone()
    };
    let reference_m = mirrored(reference);
    let rows: Vec<EpsRow> = runs
        .iter()
        .map(|(eps, art)| EpsRow {
            epsilon: *eps,
            distance: sup_distance(&grid, art, reference, true),
            distance_mirrored: sup_distance(&grid, &mirrored(art), &reference_m, true),
            aborted: aborted(art).or_else(|| aborted(reference)),
        })
        .collect();
    let slope = {
        let pos: Vec<&EpsRow> = rows.iter().filter(|r| r.epsilon > 0.0).collect();
        (pos.len() >= 2).then(|| {
            let e: Vec<f64> = pos.iter().map(|r| r.epsilon).collect();
            let d: Vec<f64> = pos.iter().map(|r| r.distance).collect();
            fitted_order(&e, &d)
        })
    };
    Ok(EpsSweep {
        verdict: eps_verdict(&rows),
        rows,
        slope,
    })
}

/// Whether the initial specific volume already leaves the small-data band.
fn initial_out_of_regime(init: &State) -> bool {
    init.v
        .iter()
        .any(|&v| !(REGIME_V_MIN..=REGIME_V_MAX).contains(&v))
}

pub const BOUNDED_MIN_T_END: f64 = 50.0;
/// Allowed growth of the composite H2 norm over its initial value.
pub const BOUNDED_GROWTH: f64 = 10.0;
/// Allowed share of `int D dt` accumulated over the second half of the run.
pub const BOUNDED_TAIL: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Boundedness {
    pub initial_h2: f64,
    pub sup_h2: f64,
    pub d_integral: f64,
    pub tail_fraction: f64,
    pub verdict: Verdict,
    pub reason: Option<String>,
}

/// Runs the relaxed system with energy tracking at every step.
pub fn tracked_run(base: &SweepBase) -> Result<(RunArtifact, EnergyReport), HarnessError> {
    let grid = base.grid()?;
    let init = make_initial_data(&base.ic, &grid, &base.params)?;
    let cfg = SchemeConfig {
        cfl: base.cfl,
        record_every: usize::MAX,
        energy_every: 1,
        ..SchemeConfig::default()
    };
    let art = run(&init, base.t_end, &base.params, &grid, &cfg);
    let report = EnergyReport::from_series(art.energy.clone());
    Ok((art, report))
}

fn boundedness_from(art: &RunArtifact, report: &EnergyReport) -> Boundedness {
    let h2: Vec<f64> = report.series.iter().map(|s| s.e_components.h2).collect();
    let initial_h2 = h2.first().copied().unwrap_or(0.0);
    let sup_h2 = h2.iter().copied().fold(0.0, f64::max);
    let half = art.t_end / 2.0;
    let tail = report.d_integral_from(half);
    let tail_fraction = if report.d_integral > 0.0 {
        tail / report.d_integral
    } else {
        0.0
    };
    let (verdict, reason) = if let Some(r) = aborted(art) {
        (Verdict::Fail, Some(r))
    } else if !report.in_regime {
        (
            Verdict::Invalid,
            Some(format!("v left [{REGIME_V_MIN}, {REGIME_V_MAX}]")),
        )
    } else if sup_h2 <= BOUNDED_GROWTH * initial_h2 && tail_fraction <= BOUNDED_TAIL {
        (Verdict::Pass, None)
    } else {
        (Verdict::Fail, None)
    };
    Boundedness {
        initial_h2,
        sup_h2,
        d_integral: report.d_integral,
        tail_fraction,
        verdict,
        reason,
    }
}

impl Boundedness {
    /// Recomputes the verdict from the stored numbers. Regime and abort
    /// outcomes carry a reason and are kept as recorded.
    pub fn reverify(&self) -> Verdict {
        if self.reason.is_some() {
            return self.verdict;
        }
        if self.sup_h2 <= BOUNDED_GROWTH * self.initial_h2 && self.tail_fraction <= BOUNDED_TAIL {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Long-time uniform-boundedness proxy for small data.
pub fn boundedness_proxy(base: &SweepBase) -> Result<Boundedness, HarnessError> {
    base.validate()?;
    if base.t_end < BOUNDED_MIN_T_END {
        return Err(HarnessError::Config(format!(
            "boundedness proxy needs t_end >= {BOUNDED_MIN_T_END}, got {}",
            base.t_end
        )));
    }
    let grid = base.grid()?;
    let init = make_initial_data(&base.ic, &grid, &base.params)?;
    if initial_out_of_regime(&init) {
        return Ok(Boundedness {
            initial_h2: f64::NAN,
            sup_h2: f64::NAN,
            d_integral: f64::NAN,
            tail_fraction: f64::NAN,
            verdict: Verdict::Invalid,
            reason: Some(format!(
                "initial v outside [{REGIME_V_MIN}, {REGIME_V_MAX}]"
            )),
        });
    }
    let (art, report) = tracked_run(base)?;
    Ok(boundedness_from(&art, &report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AprioriFamily {
    pub amplitudes: Vec<f64>,
    pub check: AprioriVerdict,
    pub verdict: Verdict,
}

impl AprioriFamily {
    pub fn reverify(&self) -> Verdict {
        match &self.check {
            AprioriVerdict::Pass { ratios, .. } | AprioriVerdict::Fail { ratios, .. } => {
                apriori_verdict(&apriori_from_ratios(ratios.clone()))
            }
            other => apriori_verdict(other),
        }
    }
}

pub fn apriori_verdict(check: &AprioriVerdict) -> Verdict {
    match check {
        AprioriVerdict::Pass { .. } => Verdict::Pass,
        AprioriVerdict::Fail { .. } => Verdict::Fail,
        AprioriVerdict::Vacuous => Verdict::Vacuous,
        AprioriVerdict::Invalid { .. } => Verdict::Invalid,
    }
}

/// Runs one tracked simulation per amplitude and checks the stability of
/// `(E_sup + int D) / E0` across the family.
pub fn apriori_family(amplitudes: &[f64], base: &SweepBase) -> Result<AprioriFamily, HarnessError> {
    base.validate()?;
    let grid = base.grid()?;
    for &d in amplitudes {
        let ic = IcConfig {
            delta: d,
            ..base.ic.clone()
        };
        if initial_out_of_regime(&make_initial_data(&ic, &grid, &base.params)?) {
            let check = AprioriVerdict::Invalid {
                reason: format!("amplitude {d} starts outside [{REGIME_V_MIN}, {REGIME_V_MAX}]"),
            };
            return Ok(AprioriFamily {
                amplitudes: amplitudes.to_vec(),
                verdict: apriori_verdict(&check),
                check,
            });
        }
    }
    let reports: Vec<EnergyReport> = amplitudes
        .par_iter()
        .map(|&d| {
            let b = SweepBase {
                ic: IcConfig {
                    delta: d,
                    ..base.ic.clone()
                },
                ..base.clone()
            };
            tracked_run(&b).map(|(_, r)| r)
        })
        .collect::<Result<_, _>>()?;
    let check = apriori_check(&reports);
    Ok(AprioriFamily {
        amplitudes: amplitudes.to_vec(),
        verdict: apriori_verdict(&check),
        check,
    })
}
