//! Initial-data families and their compatibility measurements.

use std::f64::consts::PI;
use std::path::Path;

use hcns_core::grid::Grid1D;
use hcns_core::model::dpressure;
use hcns_core::{FluidParams, State};
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IcFamily {
    Equilibrium,
    WellPreparedSine,
    UnpreparedSine,
    CustomTable,
}

fn default_mode() -> u32 {
    1
}

/// Initial-condition selection as it appears in a run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IcConfig {
    pub family: IcFamily,
    #[serde(default)]
    pub delta: f64,
    /// Wavenumber `k` of the sine families: `v = 1 + delta cos(k pi x)`,
    /// `u = delta sin(k pi x)`. Even `k` gives mirror-symmetric data.
    #[serde(default = "default_mode")]
    pub mode: u32,
    /// CSV file with header `x,v,u,S`, for the custom-table family.
    #[serde(default)]
    pub table: Option<String>,
}

impl IcConfig {
    pub fn new(family: IcFamily, delta: f64) -> Self {
        Self {
            family,
            delta,
            mode: 1,
            table: None,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(HarnessError::Config(format!(
                "ic.delta must be finite and >= 0, got {}",
                self.delta
            )));
        }
        if self.mode == 0 {
            return Err(HarnessError::Config("ic.mode must be >= 1".into()));
        }
        if self.family == IcFamily::CustomTable && self.table.is_none() {
            return Err(HarnessError::Config(
                "custom-table family needs ic.table".into(),
            ));
        }
        Ok(())
    }
}

/// Nodal fields together with the spatial derivatives the compatibility
/// conditions need. Analytic families carry exact derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub v: Vec<f64>,
    pub v_x: Vec<f64>,
    pub u: Vec<f64>,
    pub u_x: Vec<f64>,
    pub u_xx: Vec<f64>,
    pub s: Vec<f64>,
    pub s_x: Vec<f64>,
}

impl Profile {
    pub fn to_state(&self) -> State {
        State {
            t: 0.0,
            v: self.v.clone(),
            u: self.u.clone(),
            s: self.s.clone(),
        }
    }

    /// Derivatives estimated from nodal data with second-order stencils.
    pub fn from_state(state: &State, grid: &Grid1D) -> Self {
        let u_x = grid.ddx_o2(&state.u);
        Self {
            v_x: grid.ddx_o2(&state.v),
            u_xx: grid.d2dx2(&state.u),
            s_x: grid.ddx_o2(&state.s),
            u_x,
            v: state.v.clone(),
            u: state.u.clone(),
            s: state.s.clone(),
        }
    }
}

fn sine_profile(delta: f64, mode: u32, prepared: bool, grid: &Grid1D, p: &FluidParams) -> Profile {
    let k = mode as f64 * PI;
    let v = grid.sample(|x| 1.0 + delta * (k * x).cos());
    let v_x = grid.sample(|x| -delta * k * (k * x).sin());
    let u = grid.sample(|x| delta * (k * x).sin());
    let u_x = grid.sample(|x| delta * k * (k * x).cos());
    let u_xx = grid.sample(|x| -delta * k * k * (k * x).sin());
    let n = grid.n();
    let (s, s_x) = if prepared {
        let s = (0..n).map(|i| p.mu * u_x[i] / v[i]).collect();
        let s_x = (0..n)
            .map(|i| p.mu * (u_xx[i] / v[i] - u_x[i] * v_x[i] / (v[i] * v[i])))
            .collect();
        (s, s_x)
    } else {
        (vec![0.0; n], vec![0.0; n])
    };
    Profile {
        v,
        v_x,
        u,
        u_x,
        u_xx,
        s,
        s_x,
    }
}

/// Reads a `x,v,u,S` table whose nodes coincide with the grid.
pub fn read_table(path: &Path, grid: &Grid1D) -> Result<State, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Input(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| HarnessError::Input(format!("{}: empty table", path.display())))?
        .split(',')
        .map(|h| h.trim().to_string())
        .collect();
    if header != ["x", "v", "u", "S"] {
        return Err(HarnessError::Input(format!(
            "{}: expected header x,v,u,S, got {}",
            path.display(),
            header.join(",")
        )));
    }
    let mut st = State {
        t: 0.0,
        v: Vec::new(),
        u: Vec::new(),
        s: Vec::new(),
    };
    for (row, line) in lines.enumerate() {
        let vals = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| HarnessError::Input(format!("{} row {}: {e}", path.display(), row + 1)))?;
        if vals.len() != 4 {
            return Err(HarnessError::Input(format!(
                "{} row {}: expected 4 columns, got {}",
                path.display(),
                row + 1,
                vals.len()
            )));
        }
        let x = grid.x().get(row).copied().unwrap_or(f64::NAN);
        if (vals[0] - x).abs().is_nan() || (vals[0] - x).abs() > 1e-9 {
            return Err(HarnessError::Input(format!(
                "{} row {}: x = {} does not match grid node {x}",
                path.display(),
                row + 1,
                vals[0]
            )));
        }
        st.v.push(vals[1]);
        st.u.push(vals[2]);
        st.s.push(vals[3]);
    }
    if st.len() != grid.n() {
        return Err(HarnessError::Input(format!(
            "{}: {} rows for a grid of {} nodes",
            path.display(),
            st.len(),
            grid.n()
        )));
    }
    Ok(st)
}

/// Builds the initial profile of a family on `grid`.
pub fn make_profile(
    ic: &IcConfig,
    grid: &Grid1D,
    p: &FluidParams,
) -> Result<Profile, HarnessError> {
    ic.validate()?;
    Ok(match ic.family {
        IcFamily::Equilibrium => {
            let n = grid.n();
            Profile {
                v: vec![1.0; n],
                v_x: vec![0.0; n],
                u: vec![0.0; n],
                u_x: vec![0.0; n],
                u_xx: vec![0.0; n],
                s: vec![0.0; n],
                s_x: vec![0.0; n],
            }
        }
        IcFamily::WellPreparedSine => sine_profile(ic.delta, ic.mode, true, grid, p),
        IcFamily::UnpreparedSine => sine_profile(ic.delta, ic.mode, false, grid, p),
        IcFamily::CustomTable => {
            let path = ic.table.as_deref().unwrap_or_default();
            Profile::from_state(&read_table(Path::new(path), grid)?, grid)
        }
    })
}

/// Initial state of a family.
///
/// Well-prepared data sets `S0 = mu u0_x / v0` with the exact derivative, so
/// `v0 S0 - mu u0_x` vanishes identically; unprepared data starts from
/// `S0 = 0`.
pub fn make_initial_data(
    ic: &IcConfig,
    grid: &Grid1D,
    p: &FluidParams,
) -> Result<State, HarnessError> {
    Ok(make_profile(ic, grid, p)?.to_state())
}

/// Residuals of the boundary compatibility conditions and of
/// well-preparedness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityReport {
    pub u_left: f64,
    pub u_right: f64,
    /// `|S_x - p(v)_x|` at `x = 0`: the first time derivative of `u` there.
    pub ut_left: f64,
    pub ut_right: f64,
    pub v_min: f64,
    /// `||v S - mu u_x||_{H1}`
    pub well_prepared_h1: f64,
}

impl CompatibilityReport {
    pub fn max_boundary_residual(&self) -> f64 {
        self.u_left
            .max(self.u_right)
            .max(self.ut_left)
            .max(self.ut_right)
    }
}

pub fn compatibility_report(
    profile: &Profile,
    p: &FluidParams,
    grid: &Grid1D,
) -> Result<CompatibilityReport, HarnessError> {
    let n = grid.n();
    let ut = |i: usize| -> Result<f64, HarnessError> {
        Ok((profile.s_x[i] - dpressure(profile.v[i], p)? * profile.v_x[i]).abs())
    };
    let w: Vec<f64> = (0..n)
        .map(|i| profile.v[i] * profile.s[i] - p.mu * profile.u_x[i])
        .collect();
    let w_x: Vec<f64> = (0..n)
        .map(|i| {
            profile.v_x[i] * profile.s[i] + profile.v[i] * profile.s_x[i] - p.mu * profile.u_xx[i]
        })
        .collect();
    let sq = |f: &[f64]| grid.trapz_map(f, |y| y * y);
    Ok(CompatibilityReport {
        u_left: profile.u[0].abs(),
        u_right: profile.u[n - 1].abs(),
        ut_left: ut(0)?,
        ut_right: ut(n - 1)?,
        v_min: profile.v.iter().copied().fold(f64::INFINITY, f64::min),
        well_prepared_h1: (sq(&w) + sq(&w_x)).sqrt(),
    })
}
