use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible boundary-regularization strength.
pub const EPSILON_MAX: f64 = 0.25;

/// Physical and regularization constants of the relaxed system.
///
/// `a`, `gamma` define the pressure law `p(v) = a v^{-gamma}`, `mu` is the
/// viscosity, `tau` the stress relaxation time and `epsilon` the strength of
/// the artificial transport `epsilon * b(x) * S_x` that makes the boundary
/// non-characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidParams {
    pub a: f64,
    pub gamma: f64,
    pub mu: f64,
    pub tau: f64,
    #[serde(default)]
    pub epsilon: f64,
}

impl FluidParams {
    pub fn new(a: f64, gamma: f64, mu: f64, tau: f64, epsilon: f64) -> Result<Self> {
        let p = Self {
            a,
            gamma,
            mu,
            tau,
            epsilon,
        };
        p.validate()?;
        Ok(p)
    }

    /// Checks every invariant; also used after deserialization.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.a.is_finite() && self.a > 0.0) {
            return bad(format!("a must be > 0, got {}", self.a));
        }
        if !(self.gamma.is_finite() && self.gamma > 1.0) {
            return bad(format!("gamma must be > 1, got {}", self.gamma));
        }
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return bad(format!("mu must be > 0, got {}", self.mu));
        }
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return bad(format!("tau must be >= 0, got {}", self.tau));
        }
        if !(self.epsilon.is_finite() && (0.0..=EPSILON_MAX).contains(&self.epsilon)) {
            return bad(format!(
                "epsilon must lie in [0, {EPSILON_MAX}], got {}",
                self.epsilon
            ));
        }
        Ok(())
    }

    /// Errors unless `tau > 0`, which the relaxed solver needs.
    pub fn require_relaxed(&self) -> Result<()> {
        if self.tau > 0.0 {
            Ok(())
        } else {
            Err(Error::Misuse(format!(
                "relaxed system needs tau > 0 (got {}); use the parabolic solver for tau = 0",
                self.tau
            )))
        }
    }

    pub fn with_tau(self, tau: f64) -> Result<Self> {
        Self::new(self.a, self.gamma, self.mu, tau, self.epsilon)
    }

    pub fn with_epsilon(self, epsilon: f64) -> Result<Self> {
        Self::new(self.a, self.gamma, self.mu, self.tau, epsilon)
    }
}

impl Default for FluidParams {
    fn default() -> Self {
        Self {
            a: 1.0,
            gamma: 2.0,
            mu: 1.0,
            tau: 0.1,
            epsilon: 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_admissible_values() {
        assert!(FluidParams::new(1.0, 1.4, 0.5, 0.0, 0.25).is_ok());
        assert!(FluidParams::default().validate().is_ok());
    }

    #[test]
    fn rejects_each_violation() {
        assert!(FluidParams::new(0.0, 2.0, 1.0, 0.1, 0.0).is_err());
        assert!(FluidParams::new(1.0, 1.0, 1.0, 0.1, 0.0).is_err());
        assert!(FluidParams::new(1.0, 2.0, 0.0, 0.1, 0.0).is_err());
        assert!(FluidParams::new(1.0, 2.0, 1.0, -1e-3, 0.0).is_err());
        assert!(FluidParams::new(1.0, 2.0, 1.0, 0.1, 0.26).is_err());
        assert!(FluidParams::new(1.0, 2.0, 1.0, 0.1, -0.01).is_err());
        assert!(FluidParams::new(f64::NAN, 2.0, 1.0, 0.1, 0.0).is_err());
    }

    #[test]
    fn tau_zero_is_parabolic_only() {
        let p = FluidParams::new(1.0, 2.0, 1.0, 0.0, 0.0).unwrap();
        assert!(matches!(p.require_relaxed(), Err(Error::Misuse(_))));
    }

    #[test]
    fn unknown_keys_rejected() {
        let js = r#"{"a":1,"gamma":2,"mu":1,"tau":0.1,"epsilon":0,"zeta":3}"#;
        assert!(serde_json::from_str::<FluidParams>(js).is_err());
    }
}
