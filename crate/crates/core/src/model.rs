use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Disc radius `l` and the inner cutoff `epsilon` of the polar quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub l: f64,
    pub epsilon: f64,
}

impl ProblemParams {
    pub fn new(l: f64, epsilon: f64) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidRange(format!("l must be positive, got {l}")));
        }
        if !(0.0..=l).contains(&epsilon) {
            return Err(Error::InvalidRange(format!("need 0 <= epsilon <= l, got epsilon = {epsilon}, l = {l}")));
        }
        Ok(ProblemParams { l, epsilon })
    }
}

/// Rectangle `(0, 2l) x (-1, 1)` with `n1 x n2` cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectDomain {
    pub l: f64,
    pub n1: usize,
    pub n2: usize,
}

impl RectDomain {
    pub fn new(l: f64, n1: usize, n2: usize) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidRange(format!("l must be positive, got {l}")));
        }
        if n1 < 2 || n2 < 2 {
            return Err(Error::GridTooCoarse(format!("need at least 2 cells per side, got {n1} x {n2}")));
        }
        Ok(RectDomain { l, n1, n2 })
    }

    /// `n` nodes per side, i.e. `n - 1` cells.
    pub fn with_nodes(l: f64, n: usize) -> Result<Self> {
        Self::new(l, n.saturating_sub(1), n.saturating_sub(1))
    }

    pub fn width(&self) -> f64 {
        2.0 * self.l
    }

    pub fn height(&self) -> f64 {
        2.0
    }
}

/// Dirichlet data: `φ(w₂) = √(1 - w₂²)` on the two vertical sides, zero on the
/// bottom and on the graph of `h`; optionally truncated to `φ_m = (φ - 2/m) ∨ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundaryTrace {
    pub truncation_m: Option<f64>,
}

impl BoundaryTrace {
    pub fn exact() -> Self {
        BoundaryTrace { truncation_m: None }
    }

    pub fn truncated(m: f64) -> Self {
        BoundaryTrace { truncation_m: Some(m) }
    }

    /// The half-circle `√(1 - w₂²)`, which is also the extension `φ̂` to the rectangle.
    pub fn phi_hat(w2: f64) -> f64 {
        (1.0 - w2 * w2).max(0.0).sqrt()
    }

    pub fn side(&self, w2: f64) -> f64 {
        let p = Self::phi_hat(w2);
        match self.truncation_m {
            Some(m) => (p - 2.0 / m).max(0.0),
            None => p,
        }
    }

    pub fn bottom(&self) -> f64 {
        0.0
    }
}
