//! Strict JSON run configuration.

use std::path::{Path, PathBuf};

use hcns_core::grid::{Grid1D, MIN_NODES};
use hcns_core::{
    run, run_parabolic, FluidParams, ParabolicState, RunArtifact, SchemeConfig, SolverKind,
};
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::initial::{make_initial_data, IcConfig};
use crate::mms::Manufactured;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForcingKind {
    #[default]
    None,
    /// Manufactured-solution sources; the initial state is then the
    /// manufactured field at `t = 0` and `ic` is ignored.
    Mms,
}

fn default_cfl() -> f64 {
    0.4
}
fn default_every() -> usize {
    1
}
fn default_v_floor() -> f64 {
    1e-6
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub solver: SolverKind,
    pub params: FluidParams,
    pub n: usize,
    pub t_end: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_every")]
    pub record_every: usize,
    #[serde(default = "default_every")]
    pub energy_every: usize,
    #[serde(default = "default_v_floor")]
    pub v_floor: f64,
    pub ic: IcConfig,
    #[serde(default)]
    pub forcing: ForcingKind,
    /// Reserved for randomized initial-data families; none of the built-in
    /// families draws random numbers.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.params.validate()?;
        if self.solver == SolverKind::Relaxed {
            self.params.require_relaxed()?;
        }
        if self.n < MIN_NODES {
            return Err(HarnessError::Config(format!(
                "n = {} below the minimum of {MIN_NODES} nodes",
                self.n
            )));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(HarnessError::Config(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        self.ic.validate()?;
        self.scheme().validate()?;
        Ok(())
    }

    /// Scheme settings without forcing.
    pub fn scheme(&self) -> SchemeConfig {
        SchemeConfig {
            cfl: self.cfl,
            v_floor: self.v_floor,
            record_every: self.record_every,
            energy_every: self.energy_every,
            ..SchemeConfig::default()
        }
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

/// Runs a single configured simulation.
pub fn execute(cfg: &RunConfig) -> Result<RunArtifact, HarnessError> {
    cfg.validate()?;
    let grid = Grid1D::new(cfg.n)?;
    let p = cfg.params;
    let scheme = cfg.scheme();
    let init = match cfg.forcing {
        ForcingKind::None => make_initial_data(&cfg.ic, &grid, &p)?,
        ForcingKind::Mms => Manufactured::new(p).state(0.0, &grid),
    };
    let mms = Manufactured::new(p);
    let mut art = match (cfg.solver, cfg.forcing) {
        (SolverKind::Relaxed, ForcingKind::None) => run(&init, cfg.t_end, &p, &grid, &scheme),
        (SolverKind::Relaxed, ForcingKind::Mms) => {
            let scheme = scheme.with_forcing(move |t, x| mms.relaxed_source(t, x));
            run(&init, cfg.t_end, &p, &grid, &scheme)
        }
        (SolverKind::Parabolic, forcing) => {
            let scheme = match forcing {
                ForcingKind::None => scheme,
                ForcingKind::Mms => scheme.with_forcing(move |t, x| mms.parabolic_source(t, x)),
            };
            run_parabolic(&ParabolicState::from(&init), cfg.t_end, &p, &grid, &scheme)
        }
    };
    art.config = Some(cfg.to_value());
    Ok(art)
}
