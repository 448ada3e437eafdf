//! Summary files for experiments, plots derived from them, and offline
//! re-verification of saved verdicts.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::experiments::{AprioriFamily, Boundedness, EpsSweep, TauSweep};
use crate::io::{write_json, Table, ENERGY_FILE};
use crate::mms::{mms_verdict, MmsResult};
use crate::svg::{Plot, Series};
use crate::verdict::Verdict;

pub const MMS_FILE: &str = "mms.json";
pub const TAU_FILE: &str = "tau_sweep.json";
pub const EPS_FILE: &str = "eps_sweep.json";
pub const BOUNDED_FILE: &str = "bounded.json";

/// An experiment result together with the settings that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary<T> {
    pub kind: String,
    pub config: serde_json::Value,
    #[serde(flatten)]
    pub result: T,
}

impl<T: Serialize> Summary<T> {
    pub fn new(kind: &str, config: serde_json::Value, result: T) -> Self {
        Self {
            kind: kind.into(),
            config,
            result,
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), HarnessError> {
        write_json(path, self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmsStudies {
    pub studies: Vec<MmsResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedResult {
    pub boundedness: Boundedness,
    pub apriori: Option<AprioriFamily>,
}

impl BoundedResult {
    pub fn verdicts(&self) -> Vec<Verdict> {
        let mut v = vec![self.boundedness.verdict];
        v.extend(self.apriori.as_ref().map(|a| a.verdict));
        v
    }
}

pub fn energy_plot(table: &Table) -> Option<Plot> {
    let t = table.column("t")?;
    let mut plot = Plot::new("energy", "t", "value");
    for name in ["e_phys", "E_H2", "D_value"] {
        plot = plot.with(Series::new(name, &t, &table.column(name)?));
    }
    Some(plot)
}

pub fn mms_plot(studies: &[MmsResult]) -> Plot {
    studies.iter().fold(
        Plot::new("manufactured-solution error", "dx", "L2 error").log_log(),
        |plot, s| {
            let dx: Vec<f64> = s.rows.iter().map(|r| r.dx).collect();
            let err: Vec<f64> = s.rows.iter().map(|r| r.error).collect();
            let label = format!("{:?} (order {:.3})", s.solver, s.order).to_lowercase();
            plot.with(Series::new(label, &dx, &err))
        },
    )
}

pub fn tau_plot(sweep: &TauSweep) -> Plot {
    let tau: Vec<f64> = sweep.rows.iter().map(|r| r.tau).collect();
    let d: Vec<f64> = sweep.rows.iter().map(|r| r.distance).collect();
    let r: Vec<f64> = sweep.rows.iter().map(|r| r.residual).collect();
    Plot::new("relaxation limit", "tau", "value")
        .log_log()
        .with(Series::new("distance to parabolic", &tau, &d))
        .with(Series::new("integrated residual", &tau, &r))
}

pub fn eps_plot(sweep: &EpsSweep) -> Plot {
    let rows: Vec<_> = sweep.rows.iter().filter(|r| r.epsilon > 0.0).collect();
    let e: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
    let d: Vec<f64> = rows.iter().map(|r| r.distance).collect();
    Plot::new("boundary regularization", "epsilon", "distance to eps = 0")
        .log_log()
        .with(Series::new("distance", &e, &d))
}

/// Outcome of re-checking one saved summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Recheck {
    pub file: PathBuf,
    pub kind: String,
    pub stored: Vec<Verdict>,
    pub recomputed: Vec<Verdict>,
}

impl Recheck {
    pub fn consistent(&self) -> bool {
        self.stored == self.recomputed
    }
}

fn read_summary<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Summary<T>, HarnessError> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Input(format!("{}: {e}", path.display())))
}

/// Re-verifies every summary found in `dir` and regenerates the SVG plots
/// from the saved tables. Returns the checks and the plots written.
pub fn report_dir(dir: &Path) -> Result<(Vec<Recheck>, Vec<PathBuf>), HarnessError> {
    if !dir.is_dir() {
        return Err(HarnessError::Input(format!(
            "{} is not a directory",
            dir.display()
        )));
    }
    let mut checks = Vec::new();
    let mut plots = Vec::new();
    let mut emit = |name: &str, plot: Plot| -> Result<(), HarnessError> {
        let path = dir.join(name);
        fs::write(&path, plot.render())?;
        plots.push(path);
        Ok(())
    };

    let energy = dir.join(ENERGY_FILE);
    if energy.exists() {
        if let Some(plot) = energy_plot(&Table::read(&energy)?) {
            emit("energy.svg", plot)?;
        }
    }
    let mms = dir.join(MMS_FILE);
    if mms.exists() {
        let s: Summary<MmsStudies> = read_summary(&mms)?;
        checks.push(Recheck {
            file: mms,
            kind: s.kind.clone(),
            stored: s.result.studies.iter().map(|r| r.verdict).collect(),
            recomputed: s
                .result
                .studies
                .iter()
                .map(|r| mms_verdict(&r.rows).1)
                .collect(),
        });
        emit("mms.svg", mms_plot(&s.result.studies))?;
    }
    let tau = dir.join(TAU_FILE);
    if tau.exists() {
        let s: Summary<TauSweep> = read_summary(&tau)?;
        let (a, b) = s.result.reverify();
        checks.push(Recheck {
            file: tau,
            kind: s.kind.clone(),
            stored: vec![s.result.verdict, s.result.layer_verdict],
            recomputed: vec![a, b],
        });
        emit("tau_sweep.svg", tau_plot(&s.result))?;
    }
    let eps = dir.join(EPS_FILE);
    if eps.exists() {
        let s: Summary<EpsSweep> = read_summary(&eps)?;
        checks.push(Recheck {
            file: eps,
            kind: s.kind.clone(),
            stored: vec![s.result.verdict],
            recomputed: vec![s.result.reverify()],
        });
        emit("eps_sweep.svg", eps_plot(&s.result))?;
    }
    let bounded = dir.join(BOUNDED_FILE);
    if bounded.exists() {
        let s: Summary<BoundedResult> = read_summary(&bounded)?;
        let mut recomputed = vec![s.result.boundedness.reverify()];
        recomputed.extend(s.result.apriori.as_ref().map(AprioriFamily::reverify));
        checks.push(Recheck {
            file: bounded,
            kind: s.kind.clone(),
            stored: s.result.verdicts(),
            recomputed,
        });
    }
    Ok((checks, plots))
}
