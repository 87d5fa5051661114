use std::f64::consts::{PI, TAU};

use vortex_core::{BoundaryTrace, ConvexProfile, Error, Result, ScalarField};

use crate::maps::{signed, tidy, unit, PolarMap};
use crate::params::SequenceParams;

/// Maps built from a nontrivial pair `(h⋆, ψ⋆)` on `R_{2l}`. On the cone `|θ| ≤ θ_k`,
/// `r ≥ r_k`, the map is `(s_k, ψ⋆_k ∘ 𝒯_k)` where `𝒯_k(r, θ) = (τ_k(r), -s_k(r, θ))`
/// parametrizes the subgraph of the regularized profile `h⋆_k`; a transition wedge
/// `θ_k < |θ| ≤ θ̄_k` and the disc `B_{r_k}` glue it to the vortex map.
#[derive(Debug, Clone)]
pub struct RecoveryMap {
    pub p: SequenceParams,
    pub l: f64,
    h: ConvexProfile,
    psi: ScalarField,
    /// Regularization index `m = k` of `ψ⋆_k` and `h⋆_k`.
    m: f64,
}

impl RecoveryMap {
    pub fn new(p: SequenceParams, l: f64, h: ConvexProfile, psi: ScalarField) -> Result<Self> {
        p.check_radius(l)?;
        if h.is_degenerate() {
            return Err(Error::DegenerateProfile);
        }
        if (h.l() - l).abs() > 1e-12 || (psi.chart.w1()[psi.chart.nx() - 1] - 2.0 * l).abs() > 1e-9 {
            return Err(Error::InvalidRange(format!("profile and field must live on [0, {}]", 2.0 * l)));
        }
        let m = p.k as f64;
        if 1.0 / m >= l {
            return Err(Error::InvalidRange(format!("1/k = {} must be below l = {l}", 1.0 / m)));
        }
        Ok(RecoveryMap { p, l, h, psi, m })
    }

    /// `h⋆_k`: the chord from `(0, 1)` to `(1/k, h⋆(1/k))`, then `h⋆`.
    pub fn h_k(&self, w1: f64) -> f64 {
        let a = 1.0 / self.m;
        if w1 < a {
            1.0 + (self.h.eval(a) - 1.0) * w1 / a
        } else {
            self.h.eval(w1)
        }
    }

    /// `ψ⋆_k = ((ψ⋆ - 1/k) ∨ 0) ∧ φ_k`, zero above the graph of `h⋆`.
    pub fn psi_k(&self, w1: f64, w2: f64) -> f64 {
        let v = self.psi.eval(w1, w2).unwrap_or(0.0);
        (v - 1.0 / self.m).max(0.0).min(BoundaryTrace::truncated(self.m).side(w2))
    }

    fn tau(&self, r: f64) -> f64 {
        self.l * (r - self.p.r_k) / (self.l - self.p.r_k)
    }

    fn s(&self, r: f64, th: f64) -> f64 {
        let hk = self.h_k(self.tau(r));
        (1.0 + hk) * th / self.p.theta_k - hk
    }

    /// Radial projection onto the unit circle (the graph of `ψ⋆(0, ·)`).
    fn retract(p: [f64; 2]) -> [f64; 2] {
        let n = p[0].hypot(p[1]);
        [p[0] / n, p[1] / n]
    }

    /// Point of the wall graph `(x, ψ⋆_k(0, -x))`.
    fn wall(&self, x: f64) -> [f64; 2] {
        [x, self.psi_k(0.0, -x)]
    }

    fn upper(&self, r: f64, th: f64) -> [f64; 2] {
        let (rk, tk, tb) = (self.p.r_k, self.p.theta_k, self.p.theta_bar_k);
        if th <= tk {
            if r >= rk {
                let s = self.s(r, th);
                [s, self.psi_k(self.tau(r), -s)]
            } else if r >= 0.5 * rk {
                let p = self.wall(2.0 * th / tk - 1.0);
                let q = Self::retract(p);
                let w = 2.0 * r / rk - 1.0;
                [(1.0 - w) * q[0] + w * p[0], (1.0 - w) * q[1] + w * p[1]]
            } else {
                Self::retract(self.wall(4.0 * r * th / (rk * tk) - 1.0))
            }
        } else if th <= tb {
            let w = (tb - th) / (tb - tk);
            if r <= 0.5 * rk {
                let alpha = Self::retract(self.wall(4.0 * r / rk - 1.0))[0].clamp(-1.0, 1.0).acos();
                unit(w * alpha + (1.0 - w) * (2.0 * r / rk * (tb - PI) + PI))
            } else {
                unit((1.0 - w) * tb)
            }
        } else if r >= 0.5 * rk {
            unit(th)
        } else {
            unit(2.0 * r / rk * (th - PI) + PI)
        }
    }
}

impl PolarMap for RecoveryMap {
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
        let (rk, tk, tb) = (self.p.r_k, self.p.theta_k, self.p.theta_bar_k);
        // the kink of h⋆_k at w₁ = 1/k sits at r = R_k(1/k)
        let kink = rk + (self.l - rk) / (self.m * self.l);
        let up = [0.0, tk, tb, PI];
        let mut angles = up.to_vec();
        angles.extend(up.iter().map(|a| TAU - a));
        (tidy(vec![0.0, 0.5 * rk, rk, kink, self.l]), tidy(angles))
    }
}

#[cfg(test)]
mod tests {
    use vortex_core::{MappedChart, RectDomain};

    use super::*;

    const L: f64 = 0.4;

    /// A convex profile with a neck at `w₁ = l` and a field that equals the half-circle
    /// trace on the walls and vanishes on the graph of `h`.
    fn synthetic(k: u32) -> RecoveryMap {
        let h = ConvexProfile::sampled(L, 17, |w| 0.2 + 0.8 * ((w - L) / L).powi(2)).unwrap();
        let chart = MappedChart::from_profile(&h, &RectDomain::new(L, 64, 64).unwrap()).unwrap();
        let hc = h.clone();
        let psi = ScalarField::from_fn(chart, move |w1, w2| {
            let top = hc.eval(w1);
            let wall = (w1.min(2.0 * L - w1) / L).min(1.0);
            (1.0 - w2 * w2).max(0.0).sqrt() * ((top - w2) / (top + 1.0)).clamp(0.0, 1.0).powf(wall)
        });
        RecoveryMap::new(SequenceParams::standard(k).unwrap(), L, h, psi).unwrap()
    }

    fn close(a: [f64; 2], b: [f64; 2], tol: f64) -> bool {
        (a[0] - b[0]).abs() < tol && (a[1] - b[1]).abs() < tol
    }

    #[test]
    fn regularized_profile() {
        let m = synthetic(8);
        assert_eq!(m.h_k(0.0), 1.0);
        assert!((m.h_k(0.125) - m.h.eval(0.125)).abs() < 1e-15);
        assert_eq!(m.h_k(0.3), m.h.eval(0.3));
        // the chord lies above the convex profile
        assert!(m.h_k(0.06) >= m.h.eval(0.06));
        // ψ⋆_k vanishes on the walls' ends and below 1/k
        assert_eq!(m.psi_k(0.0, 1.0), 0.0);
        assert_eq!(m.psi_k(0.0, -1.0), 0.0);
    }

    #[test]
    fn vortex_map_away_from_the_cone() {
        let m = synthetic(16);
        for (r, th) in [(0.1, 0.5), (0.39, 3.0), (0.05, 5.0), (1.0 / 32.0, 1.0)] {
            assert!(close(m.eval(r, th), unit(th), 1e-15), "({r}, {th})");
        }
        assert!(close(m.eval(0.0, 0.7), [-1.0, 0.0], 1e-15));
    }

    #[test]
    fn cone_edge_maps_to_east_pole() {
        let m = synthetic(16);
        let tk = m.p.theta_k;
        for r in [m.p.r_k, 0.1, 0.25, L] {
            assert!(close(m.eval(r, tk), [1.0, 0.0], 1e-12), "r = {r}");
            assert!(close(m.eval(r, TAU - tk), [1.0, 0.0], 1e-12), "r = {r}");
        }
    }

    #[test]
    fn cone_centre_line_is_real() {
        let m = synthetic(16);
        for r in [0.01, 0.05, 0.2, 0.35] {
            let v = m.eval(r, 0.0);
            assert!(v[1].abs() < 1e-12, "r = {r}: {v:?}");
        }
    }

    #[test]
    fn seams_are_continuous() {
        let m = synthetic(8);
        let (rk, tk, tb) = (m.p.r_k, m.p.theta_k, m.p.theta_bar_k);
        let d = 1e-10;
        let thetas = [0.0, 0.3 * tk, 0.5 * tk, 0.9 * tk, tk, 1.5 * tk, tb, 0.5, 3.0];
        for &r in &[0.5 * rk, rk] {
            for &th in &thetas {
                assert!(close(m.eval(r - d, th), m.eval(r + d, th), 1e-6), "r = {r}, θ = {th}");
            }
        }
        for &r in &[0.01, 0.3 * rk, 0.7 * rk, 0.2, L] {
            for &th in &[tk, tb] {
                assert!(close(m.eval(r, th - d), m.eval(r, th + d), 1e-6), "r = {r}, θ = {th}");
                assert!(close(m.eval(r, TAU - th - d), m.eval(r, TAU - th + d), 1e-6), "r = {r}, θ = -{th}");
            }
            assert!(close(m.eval(r, TAU - d), m.eval(r, d), 1e-6), "r = {r}, θ = 0");
        }
    }

    #[test]
    fn stays_in_the_disc() {
        let m = synthetic(8);
        let f = crate::maps::sample(&m, 24);
        for v in &f.values {
            assert!(v[0].hypot(v[1]) <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let m = synthetic(8);
        let p = SequenceParams::standard(8).unwrap();
        assert!(RecoveryMap::new(p, 0.5, m.h.clone(), m.psi.clone()).is_err());
        assert!(RecoveryMap::new(p, L, ConvexProfile::degenerate(L).unwrap(), m.psi.clone()).is_err());
        let p2 = SequenceParams::standard(2).unwrap();
        assert!(RecoveryMap::new(p2, L, m.h.clone(), m.psi.clone()).is_err());
    }
}
