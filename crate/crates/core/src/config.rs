use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mass and box length. The box is `[-l/2, l/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxConfig {
    pub m: f64,
    #[serde(rename = "L")]
    pub l: f64,
}

impl BoxConfig {
    pub fn new(m: f64, l: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::Config(format!("mass must be positive, got {m}")));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::Config(format!("length must be positive, got {l}")));
        }
        Ok(Self { m, l })
    }

    pub fn half(&self) -> f64 {
        0.5 * self.l
    }

    /// True when `x` is inside the closed box, allowing a few ulps at the ends.
    pub fn contains(&self, x: f64) -> bool {
        x.abs() <= self.half() * (1.0 + 1e-14)
    }

    /// Full revival time `4 m L^2 / pi` of the Dirichlet and Neumann spectra.
    pub fn revival_time(&self) -> f64 {
        4.0 * self.m * self.l * self.l / std::f64::consts::PI
    }

    pub(crate) fn check_same(&self, other: &BoxConfig) -> Result<()> {
        if self != other {
            return Err(Error::Config(format!(
                "mismatched boxes: (m={}, L={}) vs (m={}, L={})",
                self.m, self.l, other.m, other.l
            )));
        }
        Ok(())
    }
}

impl Default for BoxConfig {
    fn default() -> Self {
        Self { m: 1.0, l: 1.0 }
    }
}
