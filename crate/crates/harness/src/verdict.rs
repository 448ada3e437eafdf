use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    /// Inputs outside the regime the check is meaningful for.
    Invalid,
    /// Degenerate input where the check has nothing to measure.
    Vacuous,
    /// Too few data points to judge.
    None,
}

impl Verdict {
    /// Process exit code: 0 pass, 1 fail, 2 invalid.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass | Verdict::Vacuous | Verdict::None => 0,
            Verdict::Fail => 1,
            Verdict::Invalid => 2,
        }
    }
}

/// Whether `values` strictly decrease along the slice.
pub fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}
