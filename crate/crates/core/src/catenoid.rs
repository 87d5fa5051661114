use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Catenary `ρ̄(t) = a cosh((t - l)/a)` on `[0, 2l]` with `ρ̄(0) = ρ̄(2l) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CatenoidProfile {
    pub a: f64,
    pub half_length: f64,
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Minimizer `m*` of `cosh(m)/m`, the root of `m tanh m = 1`.
pub fn critical_m() -> f64 {
    bisect(0.5, 2.0, |m| m * m.tanh() - 1.0)
}

/// Largest `l` for which the catenoid exists: `l_c = m* / cosh(m*)`.
pub fn critical_l() -> f64 {
    let m = critical_m();
    m / m.cosh()
}

impl CatenoidProfile {
    /// Solves `a cosh(l/a) = 1` through `cosh(m)/m = 1/l`, `m = l/a`, keeping the root
    /// with the larger neck (smaller `m`).
    pub fn new(l: f64) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidRange(format!("l must be positive, got {l}")));
        }
        let ms = critical_m();
        let g = |m: f64| m.cosh() - m / l;
        if g(ms) > 0.0 {
            return Err(Error::NoCatenoid(l));
        }
        // g > 0 near 0 and g(m*) <= 0
        let m = bisect(0.0, ms, g);
        Ok(CatenoidProfile { a: l / m, half_length: l })
    }

    pub fn rho_bar(&self, t: f64) -> f64 {
        self.a * ((t - self.half_length) / self.a).cosh()
    }

    pub fn rho_bar_prime(&self, t: f64) -> f64 {
        ((t - self.half_length) / self.a).sinh()
    }

    /// `a cosh(l/a) - 1`.
    pub fn residual(&self) -> f64 {
        self.a * (self.half_length / self.a).cosh() - 1.0
    }

    /// Area of the catenoid over `[0, 2l]`.
    pub fn catenoid_area(&self) -> f64 {
        let (a, l) = (self.a, self.half_length);
        2.0 * PI * a * l + PI * a * a * (2.0 * l / a).sinh()
    }

    /// Area of the flap `{(t, r): ρ̄(t) ≤ r ≤ 1}` over `[0, 2l]`.
    pub fn flap_area(&self) -> f64 {
        let (a, l) = (self.a, self.half_length);
        2.0 * l - 2.0 * a * a * (l / a).sinh()
    }
}
