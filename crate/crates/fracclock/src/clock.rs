//! Random time changes applied to the killed process.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which random clock runs the spatial process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClockKind {
    /// Inverse (hitting time) of a stable subordinator of index beta.
    InverseStable { beta: f64 },
    /// |I_k(t)|, the k-fold nested composition of independent Brownian
    /// motions; matches InverseStable(1/2^k) in one-dimensional law.
    IteratedBm { k: u32 },
    /// J_k(t), the two-sided nested composition; signed clock values.
    TwoSidedIterated { k: u32 },
    /// |Y(t)| for a symmetric alpha-stable process Y.
    AlphaStable { alpha: f64 },
}

impl ClockKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ClockKind::InverseStable { beta } => {
                if !beta.is_finite() || !(0.0 < beta && beta < 1.0) {
                    return Err(Error::parameter(format!(
                        "inverse-stable clock: need 0 < beta < 1, got {beta}"
                    )));
                }
            }
            ClockKind::IteratedBm { k } | ClockKind::TwoSidedIterated { k } => {
                if k < 1 {
                    return Err(Error::parameter("iterated clock: need k >= 1"));
                }
                if k > 30 {
                    return Err(Error::parameter("iterated clock: k > 30 is not supported"));
                }
            }
            ClockKind::AlphaStable { alpha } => {
                if !alpha.is_finite() || !(0.0 < alpha && alpha <= 2.0) {
                    return Err(Error::parameter(format!(
                        "alpha-stable clock: need 0 < alpha <= 2, got {alpha}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// True when draws may be negative (two-sided clocks).
    pub fn signed(&self) -> bool {
        matches!(self, ClockKind::TwoSidedIterated { .. })
    }
}
