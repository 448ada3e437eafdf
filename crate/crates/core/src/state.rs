use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nodal fields of the relaxed system at one time level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub t: f64,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub s: Vec<f64>,
}

impl State {
    pub fn new(t: f64, v: Vec<f64>, u: Vec<f64>, s: Vec<f64>) -> Result<Self> {
        if v.len() != u.len() || v.len() != s.len() {
            return Err(Error::InvalidParameter(format!(
                "field lengths differ: v {}, u {}, S {}",
                v.len(),
                u.len(),
                s.len()
            )));
        }
        Ok(Self { t, v, u, s })
    }

    /// The rest state `(v, u, S) = (1, 0, 0)`.
    pub fn equilibrium(n: usize) -> Self {
        Self {
            t: 0.0,
            v: vec![1.0; n],
            u: vec![0.0; n],
            s: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Density `rho = 1 / v` for conversion back to Eulerian variables.
    pub fn density(&self) -> Vec<f64> {
        self.v.iter().map(|v| 1.0 / v).collect()
    }

    /// Reflection about `x = 1/2`: `v`, `S` even and `u` odd.
    pub fn mirrored(&self) -> Self {
        let rev = |f: &[f64], sign: f64| f.iter().rev().map(|y| sign * y).collect();
        Self {
            t: self.t,
            v: rev(&self.v, 1.0),
            u: rev(&self.u, -1.0),
            s: rev(&self.s, 1.0),
        }
    }

    /// Checks positivity above `floor` and finiteness of every field.
    pub fn check(&self, floor: f64) -> Result<()> {
        for (name, f) in [("v", &self.v), ("u", &self.u), ("S", &self.s)] {
            if let Some(node) = f.iter().position(|y| !y.is_finite()) {
                return Err(Error::NonFinite {
                    field: name,
                    node,
                    t: self.t,
                });
            }
        }
        check_floor(&self.v, floor, self.t)
    }

    /// Max-norm distance between two states of the same size.
    pub fn max_deviation(&self, other: &State) -> f64 {
        let d = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max)
        };
        d(&self.v, &other.v)
            .max(d(&self.u, &other.u))
            .max(d(&self.s, &other.s))
    }
}

pub(crate) fn check_floor(v: &[f64], floor: f64, t: f64) -> Result<()> {
    match v.iter().position(|&y| y.is_nan() || y <= floor) {
        Some(node) => Err(Error::Positivity {
            node,
            value: v[node],
            floor,
            t,
        }),
        None => Ok(()),
    }
}

/// Nodal fields of the classical (parabolic) system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParabolicState {
    pub t: f64,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
}

impl ParabolicState {
    pub fn equilibrium(n: usize) -> Self {
        Self {
            t: 0.0,
            v: vec![1.0; n],
            u: vec![0.0; n],
        }
    }

    pub fn check(&self, floor: f64) -> Result<()> {
        for (name, f) in [("v", &self.v), ("u", &self.u)] {
            if let Some(node) = f.iter().position(|y| !y.is_finite()) {
                return Err(Error::NonFinite {
                    field: name,
                    node,
                    t: self.t,
                });
            }
        }
        check_floor(&self.v, floor, self.t)
    }

    pub fn mirrored(&self) -> Self {
        Self {
            t: self.t,
            v: self.v.iter().rev().copied().collect(),
            u: self.u.iter().rev().map(|y| -y).collect(),
        }
    }
}

impl From<&State> for ParabolicState {
    fn from(s: &State) -> Self {
        Self {
            t: s.t,
            v: s.v.clone(),
            u: s.u.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mirror_is_an_involution() {
        let s = State::new(
            0.3,
            vec![1.0, 2.0, 3.0],
            vec![0.0, 1.0, 0.0],
            vec![4.0, 5.0, 6.0],
        )
        .unwrap();
        let m = s.mirrored();
        assert_eq!(m.u, vec![-0.0, -1.0, -0.0]);
        assert_eq!(m.mirrored(), s);
    }

    #[test]
    fn check_flags_floor_and_nan() {
        let mut s = State::equilibrium(5);
        assert!(s.check(1e-6).is_ok());
        s.v[2] = 1e-7;
        assert!(matches!(
            s.check(1e-6),
            Err(Error::Positivity { node: 2, .. })
        ));
        s.v[2] = 1.0;
        s.s[4] = f64::NAN;
        assert!(matches!(
            s.check(1e-6),
            Err(Error::NonFinite {
                field: "S",
                node: 4,
                ..
            })
        ));
    }

    #[test]
    fn mismatched_lengths_rejected() {
        assert!(State::new(0.0, vec![1.0; 3], vec![0.0; 2], vec![0.0; 3]).is_err());
    }
}
