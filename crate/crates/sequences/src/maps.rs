use std::f64::consts::{PI, TAU};

use vortex_core::polar::graded_nodes;
use vortex_core::{CatenoidProfile, PolarMapField, Result};

use crate::params::SequenceParams;

/// A map `B_l → ℝ²` in polar coordinates, `θ ∈ [0, 2π)`.
pub trait PolarMap: Sync {
    fn radius(&self) -> f64;
    fn eval(&self, r: f64, theta: f64) -> [f64; 2];
    /// Radii in `[0, l]` and angles in `[0, 2π]` (both ends included) across which the map
    /// switches formula; the sampling grid refines each piece separately.
    fn breaks(&self) -> (Vec<f64>, Vec<f64>);
}

/// Samples `map` with `n` uniform cells on every piece between consecutive breaks.
pub fn sample(map: &dyn PolarMap, n: usize) -> PolarMapField {
    let (rb, tb) = map.breaks();
    let r = graded_nodes(&rb, &vec![n; rb.len() - 1]);
    let mut theta = graded_nodes(&tb, &vec![n; tb.len() - 1]);
    theta.pop();
    PolarMapField::sample(r, theta, |r, t| map.eval(r, t))
}

/// Angle in `(-π, π]`.
pub(crate) fn signed(theta: f64) -> f64 {
    if theta > PI {
        theta - TAU
    } else {
        theta
    }
}

pub(crate) fn unit(a: f64) -> [f64; 2] {
    [a.cos(), a.sin()]
}

/// Sorted, deduplicated breaks.
pub(crate) fn tidy(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// S¹-valued maps that bend every circle `∂B_r`, `r ≥ r_k`, onto the arc outside the wedge
/// `(-θ_k, θ_k)`, and wind down to `(-1, 0)` inside `B_{r_k}`.
#[derive(Debug, Clone, Copy)]
pub struct CylinderMap {
    pub p: SequenceParams,
    pub l: f64,
}

impl CylinderMap {
    pub fn new(p: SequenceParams, l: f64) -> Result<Self> {
        p.check_radius(l)?;
        Ok(CylinderMap { p, l })
    }

    /// Offset from `π` of the target angle on `∂B_{r_k}`; odd in `θ` and zero at `θ = ±π`.
    fn beta(&self, t: f64) -> f64 {
        let tk = self.p.theta_k;
        if t.abs() < tk {
            (tk - PI) / tk * t
        } else {
            t - PI.copysign(t)
        }
    }
}

impl PolarMap for CylinderMap {
    fn radius(&self) -> f64 {
        self.l
    }

    fn eval(&self, r: f64, theta: f64) -> [f64; 2] {
        let s = (r / self.p.r_k).min(1.0);
        unit(PI + s * self.beta(signed(theta)))
    }

    fn breaks(&self) -> (Vec<f64>, Vec<f64>) {
        let tk = self.p.theta_k;
        (vec![0.0, self.p.r_k, self.l], vec![0.0, tk, TAU - tk, TAU])
    }
}

/// `φ_k(r) u` with the linear ramp `φ_k` from 0 at `1/k²` to 1 at `1/k`.
#[derive(Debug, Clone, Copy)]
pub struct TwoDiscsMap {
    pub k: u32,
    pub l: f64,
}

impl TwoDiscsMap {
    pub fn new(k: u32, l: f64) -> Result<Self> {
        SequenceParams::standard(k)?.check_radius(l)?;
        Ok(TwoDiscsMap { k, l })
    }

    fn ends(&self) -> (f64, f64) {
        let k = self.k as f64;
        (1.0 / (k * k), 1.0 / k)
    }

    pub fn ramp(&self, r: f64) -> f64 {
        let (a, b) = self.ends();
        ((r - a) / (b - a)).clamp(0.0, 1.0)
    }

    /// Slope of the ramp, `k² / (k - 1) ≤ 2k`.
    pub fn ramp_slope(&self) -> f64 {
        let (a, b) = self.ends();
        1.0 / (b - a)
    }
}

impl PolarMap for TwoDiscsMap {
    fn radius(&self) -> f64 {
        self.l
    }

    fn eval(&self, r: f64, theta: f64) -> [f64; 2] {
        let f = self.ramp(r);
        [f * theta.cos(), f * theta.sin()]
    }

    fn breaks(&self) -> (Vec<f64>, Vec<f64>) {
        let (a, b) = self.ends();
        (vec![0.0, a, b, self.l], vec![0.0, PI, TAU])
    }
}

/// Replaces the wedge sweep of [`CylinderMap`] by a half catenoid and a doubly covered flap.
/// On `∂B_t`, `t ∈ (r_k, l)`: `θ ∈ (θ_k, θ̄_k)` covers the unit arc `(0, θ̄_k)`,
/// `θ ∈ [θ_k/2, θ_k]` runs along the segment from `(1, 0)` to `(ρ(t), 0)` and
/// `θ ∈ (0, θ_k/2)` along the upper half of `∂B_{ρ(t)}`; negative angles are conjugate.
#[derive(Debug, Clone, Copy)]
pub struct CatenoidFlapMap {
    pub p: SequenceParams,
    pub l: f64,
    pub catenoid: CatenoidProfile,
}

impl CatenoidFlapMap {
    pub fn new(p: SequenceParams, l: f64) -> Result<Self> {
        p.check_radius(l)?;
        let catenoid = CatenoidProfile::new(l)?;
        Ok(CatenoidFlapMap { p, l, catenoid })
    }

    /// `ρ(t) = ρ̄(l (t - r_k) / (l - r_k))`, running from 1 at `r_k` to the neck `a` at `l`.
    pub fn rho(&self, t: f64) -> f64 {
        self.catenoid.rho_bar(self.l * (t - self.p.r_k) / (self.l - self.p.r_k))
    }

    /// Upper-half image on `∂B_t` for `t ≥ r_k` and `0 ≤ θ ≤ θ̄_k`.
    fn wedge(&self, t: f64, th: f64) -> [f64; 2] {
        let (tk, tb) = (self.p.theta_k, self.p.theta_bar_k);
        let rho = self.rho(t);
        if th > tk {
            unit(tb * (th - tk) / (tb - tk))
        } else if th >= 0.5 * tk {
            [rho + (1.0 - rho) * (th - 0.5 * tk) / (0.5 * tk), 0.0]
        } else {
            let a = PI * (1.0 - th / (0.5 * tk));
            [rho * a.cos(), rho * a.sin()]
        }
    }

    /// Offset from `π` of the target angle on `∂B_{r_k}` (upper half, `θ ∈ [0, π]`).
    fn beta(&self, th: f64) -> f64 {
        let (tk, tb) = (self.p.theta_k, self.p.theta_bar_k);
        let gamma = if th >= tb {
            th
        } else if th > tk {
            tb * (th - tk) / (tb - tk)
        } else if th >= 0.5 * tk {
            0.0
        } else {
            PI * (1.0 - th / (0.5 * tk))
        };
        gamma - PI
    }

    fn upper(&self, r: f64, th: f64) -> [f64; 2] {
        if r < self.p.r_k {
            unit(PI + r / self.p.r_k * self.beta(th))
        } else if th < self.p.theta_bar_k {
            self.wedge(r, th)
        } else {
            unit(th)
        }
    }
}

impl PolarMap for CatenoidFlapMap {
    fn radius(&self) -> f64 {
        self.l
    }

    fn eval(&self, r: f64, theta: f64) -> [f64; 2] {
        let t = signed(theta);
        let v = self.upper(r, t.abs());
        if t < 0.0 {
            [v[0], -v[1]]
        } else {
            v
        }
    }

    fn breaks(&self) -> (Vec<f64>, Vec<f64>) {
        let (tk, tb) = (self.p.theta_k, self.p.theta_bar_k);
        let up = [0.0, 0.5 * tk, tk, tb, PI];
        let mut angles: Vec<f64> = up.to_vec();
        angles.extend(up.iter().map(|a| TAU - a));
        (vec![0.0, self.p.r_k, self.l], tidy(angles))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> SequenceParams {
        SequenceParams::new(8, 0.1, 0.05, 0.1).unwrap()
    }

    fn close(a: [f64; 2], b: [f64; 2], tol: f64) -> bool {
        (a[0] - b[0]).abs() < tol && (a[1] - b[1]).abs() < tol
    }

    #[test]
    fn cylinder_branches() {
        let m = CylinderMap::new(params(), 1.0).unwrap();
        // outside the wedge and the small disc: the vortex map
        assert!(close(m.eval(0.5, 1.0), unit(1.0), 1e-15));
        assert!(close(m.eval(0.5, TAU - 1.0), unit(-1.0), 1e-15));
        assert!(close(m.eval(0.1, PI), [-1.0, 0.0], 1e-15));
        assert!(close(m.eval(0.0, 0.3), [-1.0, 0.0], 1e-15));
        for r in [0.05, 0.3, 0.9] {
            assert!(close(m.eval(r, 0.0), [-1.0, 0.0], 1e-15));
        }
        // wedge edges meet the vortex map
        assert!(close(m.eval(0.5, 0.05), unit(0.05), 1e-14));
        assert!(close(m.eval(0.5, TAU - 0.05), unit(-0.05), 1e-12));
    }

    #[test]
    fn cylinder_is_continuous_across_branch_cut() {
        let m = CylinderMap::new(params(), 1.0).unwrap();
        for r in [0.02, 0.07, 0.5] {
            assert!(close(m.eval(r, PI - 1e-9), m.eval(r, PI + 1e-9), 1e-7));
        }
    }

    #[test]
    fn two_discs_ramp() {
        let m = TwoDiscsMap::new(16, 1.0).unwrap();
        assert_eq!(m.eval(1.0 / 256.0 * 0.5, 1.0), [0.0, 0.0]);
        assert!(close(m.eval(1.0 / 16.0, 0.7), unit(0.7), 1e-15));
        assert!(m.ramp_slope() <= 2.0 * 16.0);
        assert!(m.ramp_slope() >= 0.0);
    }

    #[test]
    fn catenoid_flap_slices() {
        let l = 0.4;
        let m = CatenoidFlapMap::new(params(), l).unwrap();
        assert!((m.rho(0.1) - 1.0).abs() < 1e-12);
        assert!((m.rho(l) - m.catenoid.a).abs() < 1e-12);
        let t = 0.3;
        let rho = m.rho(t);
        // θ = θ_k/2 is the inner end of the flap, θ_k its outer end
        assert!(close(m.eval(t, 0.025), [rho, 0.0], 1e-15));
        assert!(close(m.eval(t, 0.05), [1.0, 0.0], 1e-15));
        assert!(close(m.eval(t, 0.0), [-rho, 0.0], 1e-15));
        assert!(close(m.eval(t, 0.0125), [0.0, rho], 1e-12));
        assert!(close(m.eval(t, TAU - 0.0125), [0.0, -rho], 1e-12));
        // outside (-θ̄_k, θ̄_k) the vortex map
        assert!(close(m.eval(t, 0.1), unit(0.1), 1e-15));
        assert!(close(m.eval(t, 2.0), unit(2.0), 1e-15));
        assert!(close(m.eval(0.0, 1.0), [-1.0, 0.0], 1e-15));
    }

    #[test]
    fn catenoid_flap_glues_on_small_circle() {
        let m = CatenoidFlapMap::new(params(), 0.4).unwrap();
        for th in [0.0, 0.01, 0.03, 0.05, 0.07, 0.1, 1.0, 3.0, 4.0, TAU - 0.03] {
            let a = m.eval(0.1 - 1e-12, th);
            let b = m.eval(0.1, th);
            assert!(close(a, b, 1e-9), "θ = {th}: {a:?} vs {b:?}");
        }
    }

    #[test]
    fn catenoid_flap_needs_a_catenoid() {
        assert!(CatenoidFlapMap::new(params(), 1.0).is_err());
    }
}
