use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on unit-scaled second differences of a convex profile.
pub const TOL_CONV: f64 = 1e-10;
/// Columns with `1 + h` below this are treated as collapsed.
pub const TOL_COL: f64 = 1e-8;

// Hull points within this distance above a chord are kept as vertices, so that
// projecting an already projected profile reproduces it bit for bit.
const HULL_SLACK: f64 = 1e-13;

/// Piecewise-linear convex symmetric profile `h` on `[0, 2l]` with values in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileRepr", into = "ProfileRepr")]
pub struct ConvexProfile {
    knots: Vec<f64>,
    values: Vec<f64>,
    degenerate: bool,
}

#[derive(Serialize, Deserialize)]
struct ProfileRepr {
    knots: Vec<f64>,
    values: Vec<f64>,
    #[serde(default)]
    degenerate: bool,
}

impl TryFrom<ProfileRepr> for ConvexProfile {
    type Error = Error;

    fn try_from(r: ProfileRepr) -> Result<Self> {
        if r.degenerate {
            let l = r.knots.last().copied().unwrap_or(0.0) / 2.0;
            return ConvexProfile::degenerate(l);
        }
        ConvexProfile::new(r.knots, r.values)
    }
}

impl From<ConvexProfile> for ProfileRepr {
    fn from(p: ConvexProfile) -> Self {
        ProfileRepr { knots: p.knots, values: p.values, degenerate: p.degenerate }
    }
}

/// Uniform knots on `[0, 2l]`; the middle one sits exactly at `l` when `n` is odd.
pub fn uniform_knots(l: f64, n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            // mirror-exact: knot n-1-i is computed as 2l - knot i
            if 2 * i < n {
                2.0 * l * i as f64 / last
            } else {
                2.0 * l - 2.0 * l * (n - 1 - i) as f64 / last
            }
        })
        .collect()
}

impl ConvexProfile {
    /// Validated constructor.
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let p = ConvexProfile { knots, values, degenerate: false };
        p.validate()?;
        Ok(p)
    }

    /// The branch `h ≡ -1`.
    pub fn degenerate(l: f64) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidRange(format!("l must be positive, got {l}")));
        }
        Ok(ConvexProfile { knots: vec![0.0, 2.0 * l], values: vec![-1.0, -1.0], degenerate: true })
    }

    pub fn constant(l: f64, n: usize, c: f64) -> Result<Self> {
        Self::new(uniform_knots(l, n), vec![c; n])
    }

    /// Samples `f` on `n` uniform knots and projects the samples onto the admissible set.
    pub fn sampled(l: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::InvalidRange(format!("knot count must be odd and >= 3, got {n}")));
        }
        let knots = uniform_knots(l, n);
        let raw: Vec<f64> = knots.iter().map(|&x| f(x)).collect();
        project_convex_symmetric(&knots, &raw)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn l(&self) -> f64 {
        self.knots[self.knots.len() - 1] / 2.0
    }

    /// True when `h(0) = h(2l) = 1`.
    pub fn is_pinned(&self) -> bool {
        !self.degenerate && self.values[0] == 1.0 && self.values[self.values.len() - 1] == 1.0
    }

    /// Piecewise-linear interpolant, clamped to the knot range.
    pub fn eval(&self, w1: f64) -> f64 {
        let k = &self.knots;
        if w1 <= k[0] {
            return self.values[0];
        }
        if w1 >= k[k.len() - 1] {
            return self.values[k.len() - 1];
        }
        let i = k.partition_point(|&x| x <= w1) - 1;
        let t = (w1 - k[i]) / (k[i + 1] - k[i]);
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }

    /// Hat function of knot `i` evaluated at `w1`.
    pub fn hat(&self, i: usize, w1: f64) -> f64 {
        let k = &self.knots;
        if i > 0 && w1 >= k[i - 1] && w1 <= k[i] {
            return (w1 - k[i - 1]) / (k[i] - k[i - 1]);
        }
        if i + 1 < k.len() && w1 >= k[i] && w1 <= k[i + 1] {
            return (k[i + 1] - w1) / (k[i + 1] - k[i]);
        }
        0.0
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Unit-scaled second differences at interior knots.
    pub fn second_differences(&self) -> Vec<f64> {
        let k = &self.knots;
        let v = &self.values;
        (1..k.len().saturating_sub(1))
            .map(|i| {
                let s0 = (v[i] - v[i - 1]) / (k[i] - k[i - 1]);
                let s1 = (v[i + 1] - v[i]) / (k[i + 1] - k[i]);
                (s1 - s0) * 0.5 * (k[i + 1] - k[i - 1])
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let k = &self.knots;
        let v = &self.values;
        let bad = |m: String| Err(Error::InvalidRange(m));
        if k.len() < 2 || k.len() != v.len() {
            return bad(format!("need >= 2 knots with matching values, got {} / {}", k.len(), v.len()));
        }
        if k[0] != 0.0 || !(k[k.len() - 1] > 0.0) || !k[k.len() - 1].is_finite() {
            return bad("knots must cover [0, 2l] with l > 0".into());
        }
        if k.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("knots must be strictly increasing".into());
        }
        let two_l = k[k.len() - 1];
        let n = k.len();
        for i in 0..n {
            if (k[i] + k[n - 1 - i] - two_l).abs() > 1e-12 * two_l {
                return bad(format!("knots not symmetric at index {i}"));
            }
            if v[i] != v[n - 1 - i] {
                return bad(format!("values not symmetric at index {i}"));
            }
            if !(-1.0..=1.0).contains(&v[i]) {
                return bad(format!("value {} at index {i} outside [-1, 1]", v[i]));
            }
        }
        if let Some(d) = self.second_differences().into_iter().find(|&d| d < -TOL_CONV) {
            return bad(format!("profile not convex (second difference {d:e})"));
        }
        Ok(())
    }
}

/// Symmetrizes by the pointwise minimum with the mirror image, takes the lower convex
/// envelope and clips to `[-1, 1]`. Never exceeds the (clamped) input.
pub fn project_convex_symmetric(knots: &[f64], raw: &[f64]) -> Result<ConvexProfile> {
    let n = knots.len();
    if n < 2 || raw.len() != n {
        return Err(Error::InvalidRange(format!("{} knots but {} values", n, raw.len())));
    }
    let clamped: Vec<f64> = raw.iter().map(|v| v.clamp(-1.0, 1.0)).collect();
    let sym: Vec<f64> = (0..n).map(|i| clamped[i].min(clamped[n - 1 - i])).collect();

    let hull = lower_hull(knots, &sym);
    let mut out = sym.clone();
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        for (i, o) in out.iter_mut().enumerate().take(b).skip(a + 1) {
            let t = (knots[i] - knots[a]) / (knots[b] - knots[a]);
            *o = sym[a] + t * (sym[b] - sym[a]);
        }
    }
    for i in n.div_ceil(2)..n {
        out[i] = out[n - 1 - i];
    }
    for o in &mut out {
        *o = o.max(-1.0);
    }
    ConvexProfile::new(knots.to_vec(), out)
}

/// Indices of the lower convex hull vertices (monotone chain).
fn lower_hull(x: &[f64], y: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(x.len());
    for p in 0..x.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let chord = y[a] + (y[p] - y[a]) * (x[b] - x[a]) / (x[p] - x[a]);
            if y[b] - chord > HULL_SLACK {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;

    // brute force: the lower envelope at x_i is the minimum over all chords through x_i
    fn brute_envelope(x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|i| {
                let mut best = y[i];
                for a in 0..=i {
                    for b in i..n {
                        if a == b {
                            continue;
                        }
                        let t = (x[i] - x[a]) / (x[b] - x[a]);
                        best = best.min(y[a] + t * (y[b] - y[a]));
                    }
                }
                best
            })
            .collect()
    }

    #[test]
    fn w_shaped_input_matches_brute_force() {
        let knots = uniform_knots(1.0, 5);
        let raw = [1.0, -0.5, 0.5, -0.5, 1.0];
        let p = project_convex_symmetric(&knots, &raw).unwrap();
        let want = brute_envelope(&knots, &raw);
        for (a, b) in p.values().iter().zip(&want) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
        assert_eq!(p.values()[2], -0.5);
    }

    #[test]
    fn constant_one_is_fixed() {
        let p = ConvexProfile::constant(0.7, 9, 1.0).unwrap();
        let q = project_convex_symmetric(p.knots(), p.values()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn convex_symmetric_input_is_fixed() {
        let knots = uniform_knots(1.0, 11);
        let mut raw: Vec<f64> = knots.iter().map(|&x| 0.6 * (x - 1.0).powi(2) + 0.4).collect();
        for i in 6..11 {
            raw[i] = raw[10 - i];
        }
        let p = project_convex_symmetric(&knots, &raw).unwrap();
        assert_eq!(p.values(), &raw[..]);
    }

    #[test]
    fn asymmetric_input_takes_mirror_minimum() {
        let knots = uniform_knots(1.0, 5);
        let p = project_convex_symmetric(&knots, &[1.0, 0.0, -0.2, 0.4, 1.0]).unwrap();
        assert_eq!(p.values(), &[1.0, 0.0, -0.2, 0.0, 1.0]);
    }

    #[test]
    fn eval_and_hat() {
        let p = ConvexProfile::new(uniform_knots(1.0, 3), vec![1.0, 0.25, 1.0]).unwrap();
        assert_eq!(p.eval(1.0), 0.25);
        assert!((p.eval(0.5) - 0.625).abs() < 1e-15);
        assert_eq!(p.hat(1, 1.0), 1.0);
        assert!((p.hat(1, 0.5) - 0.5).abs() < 1e-15);
        assert_eq!(p.hat(0, 1.5), 0.0);
    }

    #[test]
    fn rejects_non_convex() {
        let r = ConvexProfile::new(uniform_knots(1.0, 3), vec![0.0, 0.5, 0.0]);
        assert!(r.is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = ConvexProfile::constant(0.5, 5, 0.2).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let q: ConvexProfile = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        let bad = r#"{"knots":[0,0.5,1],"values":[0,0.5,0]}"#;
        assert!(serde_json::from_str::<ConvexProfile>(bad).is_err());
    }
}
