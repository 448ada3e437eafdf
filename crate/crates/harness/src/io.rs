//! CSV and JSON artifact files.
//!
//! Floats are written with 17 significant digits so that every value
//! round-trips exactly and identical runs produce identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use hcns_core::grid::Grid1D;
use hcns_core::{EnergySnapshot, RunArtifact, State};
use serde::Serialize;

use crate::error::HarnessError;

pub const SNAPSHOT_HEADER: &str = "t,x,v,u,S";
pub const ENERGY_HEADER: &str = "t,e_phys,diss_rate,E_H2,E_dtH1,E_dt2L2,D_value,relax_residual";

pub const SNAPSHOT_FILE: &str = "snapshots.csv";
pub const ENERGY_FILE: &str = "energy.csv";
pub const RUN_FILE: &str = "run.json";

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn join(values: &[f64]) -> String {
    values.iter().map(|&x| num(x)).collect::<Vec<_>>().join(",")
}

pub fn snapshot_csv(grid: &Grid1D, snapshots: &[State]) -> String {
    let mut out = String::from(SNAPSHOT_HEADER);
    out.push('\n');
    for s in snapshots {
        for (i, &x) in grid.x().iter().enumerate() {
            let _ = writeln!(out, "{}", join(&[s.t, x, s.v[i], s.u[i], s.s[i]]));
        }
    }
    out
}

pub fn energy_csv(series: &[EnergySnapshot]) -> String {
    let mut out = String::from(ENERGY_HEADER);
    out.push('\n');
    for e in series {
        let c = &e.e_components;
        let row = [
            e.t,
            e.e_phys,
            e.diss_rate,
            c.h2,
            c.dt_h1,
            c.dt2_l2,
            e.d_value,
            e.relax_residual,
        ];
        let _ = writeln!(out, "{}", join(&row));
    }
    out
}

/// Numeric CSV with a header line.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| HarnessError::Input("empty CSV".into()))?
            .split(',')
            .map(|h| h.trim().to_string())
            .collect();
        let rows = lines
            .enumerate()
            .map(|(k, line)| {
                let row: Vec<f64> = line
                    .split(',')
                    .map(|c| c.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| HarnessError::Input(format!("row {}: {e}", k + 1)))?;
                if row.len() != header.len() {
                    return Err(HarnessError::Input(format!(
                        "row {} has {} columns, header has {}",
                        k + 1,
                        row.len(),
                        header.len()
                    )));
                }
                Ok(row)
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { header, rows })
    }

    pub fn read(path: &Path) -> Result<Self, HarnessError> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[derive(Serialize)]
struct RunRecord<'a> {
    config: &'a Option<serde_json::Value>,
    solver: hcns_core::SolverKind,
    n: usize,
    t_end: f64,
    status: &'a hcns_core::RunStatus,
    steps: usize,
    wall_time: f64,
    snapshots: usize,
    energy_rows: usize,
}

/// Writes `snapshots.csv`, `energy.csv` and `run.json` into `dir`.
pub fn write_run(dir: &Path, art: &RunArtifact) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir)?;
    let grid = Grid1D::new(art.n)?;
    let files = [
        dir.join(SNAPSHOT_FILE),
        dir.join(ENERGY_FILE),
        dir.join(RUN_FILE),
    ];
    fs::write(&files[0], snapshot_csv(&grid, &art.snapshots))?;
    fs::write(&files[1], energy_csv(&art.energy))?;
    write_json(
        &files[2],
        &RunRecord {
            config: &art.config,
            solver: art.solver,
            n: art.n,
            t_end: art.t_end,
            status: &art.status,
            steps: art.steps,
            wall_time: art.wall_time,
            snapshots: art.snapshots.len(),
            energy_rows: art.energy.len(),
        },
    )?;
    Ok(files.to_vec())
}
