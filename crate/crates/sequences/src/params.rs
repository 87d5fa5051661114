use serde::Serialize;

use vortex_core::{Error, Result};

/// Scales `(r_k, θ_k, θ̄_k)` of the approximating maps at index `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SequenceParams {
    pub k: u32,
    pub r_k: f64,
    pub theta_k: f64,
    pub theta_bar_k: f64,
}

impl SequenceParams {
    /// `(1/k, 1/k², 2/k²)`, so that `k θ_k → 0`.
    pub fn standard(k: u32) -> Result<Self> {
        let kf = k as f64;
        SequenceParams::new(k, 1.0 / kf, 1.0 / (kf * kf), 2.0 / (kf * kf))
    }

    pub fn new(k: u32, r_k: f64, theta_k: f64, theta_bar_k: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidRange(format!("k must be at least 2, got {k}")));
        }
        if !(r_k > 0.0 && theta_k > 0.0 && theta_bar_k > theta_k && theta_bar_k < std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidRange(format!(
                "need r_k > 0 and 0 < θ_k < θ̄_k < π/2, got ({r_k}, {theta_k}, {theta_bar_k})"
            )));
        }
        Ok(SequenceParams { k, r_k, theta_k, theta_bar_k })
    }

    pub fn check_radius(&self, l: f64) -> Result<()> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidRange(format!("l must be positive, got {l}")));
        }
        if self.r_k >= l {
            return Err(Error::InvalidRange(format!("r_k = {} must be below l = {l}", self.r_k)));
        }
        Ok(())
    }
}

/// Doubling schedule `8, 16, 32, 64`.
pub const DEFAULT_KS: [u32; 4] = [8, 16, 32, 64];
