use serde::Serialize;

use crate::error::{Error, Result};

/// Width, in standard deviations, of the reported Wilson interval.
pub const WILSON_Z: f64 = 3.0;

/// Outcome counts of a seeded Bernoulli experiment with a Wilson score
/// interval at [`WILSON_Z`] sigma.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialBatch {
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    pub wilson_3sigma_low: f64,
    pub wilson_3sigma_high: f64,
    pub seed: u64,
}

impl TrialBatch {
    pub fn new(trials: u64, successes: u64, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::ZeroCount { name: "trials" });
        }
        if successes > trials {
            return Err(Error::DimensionMismatch { left: successes as usize, right: trials as usize });
        }
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = WILSON_Z * WILSON_Z;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        Ok(TrialBatch {
            trials,
            successes,
            estimate: p,
            wilson_3sigma_low: (center - half).max(0.0).min(p),
            wilson_3sigma_high: (center + half).min(1.0).max(p),
            seed,
        })
    }

    /// Whether `p` lies inside the Wilson interval.
    pub fn contains(&self, p: f64) -> bool {
        self.wilson_3sigma_low <= p && p <= self.wilson_3sigma_high
    }
}
