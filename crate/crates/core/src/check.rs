use serde::{Deserialize, Serialize};

/// A named pass/fail verdict with the residual it was decided on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    /// Passes iff `residual < tolerance`. Non-finite residuals fail and are
    /// recorded as `f64::MAX`.
    pub fn below(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let finite = residual.is_finite();
        Self {
            name: name.into(),
            passed: finite && residual < tolerance,
            residual: if finite { residual } else { f64::MAX },
            tolerance,
        }
    }

    /// Integer equality; the residual is the absolute difference.
    pub fn equal(name: impl Into<String>, left: usize, right: usize) -> Self {
        Self {
            name: name.into(),
            passed: left == right,
            residual: left.abs_diff(right) as f64,
            tolerance: 0.0,
        }
    }

    pub fn flag(name: impl Into<String>, passed: bool) -> Self {
        Self {
            name: name.into(),
            passed,
            residual: if passed { 0.0 } else { 1.0 },
            tolerance: 0.5,
        }
    }
}
