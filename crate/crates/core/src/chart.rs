use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::RectDomain;
use crate::profile::{ConvexProfile, TOL_COL};

/// Column-normalized chart `(w₁, σ) ↦ (w₁, b(w₁) + σ (t(w₁) - b(w₁)))` sampled on a
/// tensor grid. For the subgraph of `h`, `b = -1` and `t = h`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MappedChart {
    w1: Vec<f64>,
    bottom: Vec<f64>,
    top: Vec<f64>,
    sigma: Vec<f64>,
    collapsed: Vec<bool>,
}

/// Node indices of one triangle, counter-clockwise in chart coordinates.
pub type Tri = [usize; 3];

fn uniform(a: f64, b: f64, cells: usize) -> Vec<f64> {
    (0..=cells).map(|i| a + (b - a) * i as f64 / cells as f64).collect()
}

impl MappedChart {
    /// Generic chart over the given columns with `n_sigma` cells across each column.
    pub fn from_bounds(
        w1: Vec<f64>,
        n_sigma: usize,
        bottom: impl Fn(f64) -> f64,
        top: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if w1.len() < 2 || n_sigma < 1 {
            return Err(Error::GridTooCoarse(format!("{} columns, {} rows", w1.len(), n_sigma + 1)));
        }
        let bottom: Vec<f64> = w1.iter().map(|&x| bottom(x)).collect();
        let top: Vec<f64> = w1.iter().map(|&x| top(x)).collect();
        if bottom.iter().zip(&top).any(|(b, t)| t < b) {
            return Err(Error::InvalidRange("chart top below bottom".into()));
        }
        let collapsed = bottom.iter().zip(&top).map(|(b, t)| t - b < TOL_COL).collect();
        Ok(MappedChart { w1, bottom, top, sigma: uniform(0.0, 1.0, n_sigma), collapsed })
    }

    /// Plain rectangle `[x0, x1] x [y0, y1]`.
    pub fn rect(x0: f64, x1: f64, y0: f64, y1: f64, n1: usize, n2: usize) -> Result<Self> {
        Self::from_bounds(uniform(x0, x1, n1), n2, |_| y0, |_| y1)
    }

    /// Closure of the subgraph `SG_h` in `R_{2l}`.
    pub fn from_profile(h: &ConvexProfile, grid: &RectDomain) -> Result<Self> {
        Self::profile_columns(h, grid, grid.n1)
    }

    /// Left half of `SG_h`, columns in `[0, l]`; requires an even cell count.
    pub fn from_profile_half(h: &ConvexProfile, grid: &RectDomain) -> Result<Self> {
        if grid.n1 % 2 != 0 {
            return Err(Error::InvalidRange(format!("half chart needs an even cell count, got {}", grid.n1)));
        }
        Self::profile_columns(h, grid, grid.n1 / 2)
    }

    fn profile_columns(h: &ConvexProfile, grid: &RectDomain, last: usize) -> Result<Self> {
        if h.is_degenerate() {
            return Err(Error::DegenerateProfile);
        }
        let n1 = grid.n1;
        let l = grid.l;
        // left half computed directly, right half mirrored so the chart is exactly symmetric
        let left = |i: usize| 2.0 * l * i as f64 / n1 as f64;
        let w1: Vec<f64> =
            (0..=last).map(|i| if 2 * i <= n1 { left(i) } else { 2.0 * l - left(n1 - i) }).collect();
        let mut top: Vec<f64> = (0..=last).map(|i| if 2 * i <= n1 { h.eval(left(i)) } else { 0.0 }).collect();
        for i in 0..=last {
            if 2 * i > n1 {
                top[i] = top[n1 - i];
            }
        }
        let bottom = vec![-1.0; last + 1];
        let collapsed = top.iter().map(|t| 1.0 + t < TOL_COL).collect();
        Ok(MappedChart { w1, bottom, top, sigma: uniform(0.0, 1.0, grid.n2), collapsed })
    }

    /// Mirror of a half chart about its last column.
    pub fn mirrored_full(&self) -> MappedChart {
        let n = self.nx();
        let c = self.w1[n - 1];
        let ext = |v: &[f64]| -> Vec<f64> { v.iter().copied().chain(v[..n - 1].iter().rev().copied()).collect() };
        let mut w1 = ext(&self.w1);
        for i in n..w1.len() {
            w1[i] = 2.0 * c - self.w1[2 * (n - 1) - i];
        }
        MappedChart {
            w1,
            bottom: ext(&self.bottom),
            top: ext(&self.top),
            sigma: self.sigma.clone(),
            collapsed: self.collapsed.iter().copied().chain(self.collapsed[..n - 1].iter().rev().copied()).collect(),
        }
    }

    pub fn nx(&self) -> usize {
        self.w1.len()
    }

    pub fn ny(&self) -> usize {
        self.sigma.len()
    }

    pub fn len(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx() + i
    }

    pub fn w1(&self) -> &[f64] {
        &self.w1
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn bottom(&self, i: usize) -> f64 {
        self.bottom[i]
    }

    pub fn top(&self, i: usize) -> f64 {
        self.top[i]
    }

    /// Column height `t - b`, the metric determinant of the chart.
    pub fn det(&self, i: usize) -> f64 {
        self.top[i] - self.bottom[i]
    }

    pub fn is_collapsed(&self, i: usize) -> bool {
        self.collapsed[i]
    }

    /// Physical position of node `(i, j)`.
    #[inline]
    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        [self.w1[i], self.bottom[i] + self.sigma[j] * (self.top[i] - self.bottom[i])]
    }

    /// `∂w₂/∂t` at node `(i, j)`: how the node moves when the column top moves.
    pub fn dtop(&self, j: usize) -> f64 {
        self.sigma[j]
    }

    /// Inverse map `(w₁, w₂) ↦ (w₁, σ)` with bounds interpolated linearly between columns.
    pub fn inverse(&self, w1: f64, w2: f64) -> Option<(f64, f64)> {
        let (b, t) = self.bounds_at(w1)?;
        if t - b < TOL_COL {
            return None;
        }
        Some((w1, (w2 - b) / (t - b)))
    }

    pub(crate) fn bounds_at(&self, w1: f64) -> Option<(f64, f64)> {
        let (i, s) = self.locate_column(w1)?;
        let b = self.bottom[i] + s * (self.bottom[i + 1] - self.bottom[i]);
        let t = self.top[i] + s * (self.top[i + 1] - self.top[i]);
        Some((b, t))
    }

    pub(crate) fn locate_column(&self, w1: f64) -> Option<(usize, f64)> {
        let n = self.nx();
        if w1 < self.w1[0] || w1 > self.w1[n - 1] {
            return None;
        }
        let i = (self.w1.partition_point(|&x| x <= w1).max(1) - 1).min(n - 2);
        Some((i, (w1 - self.w1[i]) / (self.w1[i + 1] - self.w1[i])))
    }

    /// The four triangles of cell `(i, j)` (both diagonal splits); each carries weight 1/2.
    #[inline]
    pub fn cell_triangles(&self, i: usize, j: usize) -> [Tri; 4] {
        let a = self.idx(i, j);
        let b = self.idx(i + 1, j);
        let c = self.idx(i + 1, j + 1);
        let d = self.idx(i, j + 1);
        [[a, b, c], [a, c, d], [a, b, d], [b, c, d]]
    }

    /// Physical positions of all nodes.
    pub fn positions(&self) -> Vec<[f64; 2]> {
        let mut p = Vec::with_capacity(self.len());
        for j in 0..self.ny() {
            for i in 0..self.nx() {
                p.push(self.node(i, j));
            }
        }
        p
    }
}

/// Nodal samples of a graph function on a chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub chart: MappedChart,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(chart: MappedChart, values: Vec<f64>) -> Result<Self> {
        if values.len() != chart.len() {
            return Err(Error::InvalidRange(format!("{} values for {} nodes", values.len(), chart.len())));
        }
        Ok(ScalarField { chart, values })
    }

    pub fn zeros(chart: MappedChart) -> Self {
        let n = chart.len();
        ScalarField { chart, values: vec![0.0; n] }
    }

    pub fn from_fn(chart: MappedChart, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = chart.positions().into_iter().map(|[x, y]| f(x, y)).collect();
        ScalarField { chart, values }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.chart.idx(i, j)]
    }

    /// Nodes outside the subgraph (collapsed columns) must carry zero.
    pub fn check_support(&self, tol: f64) -> Result<()> {
        for i in 0..self.chart.nx() {
            if !self.chart.is_collapsed(i) {
                continue;
            }
            for j in 0..self.chart.ny() {
                let v = self.at(i, j);
                if v > tol {
                    return Err(Error::ConstraintViolation(format!(
                        "psi = {v:e} at node ({i}, {j}) outside the subgraph"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Mirror a field on a half chart about its last column.
    pub fn mirrored_full(&self) -> ScalarField {
        let chart = self.chart.mirrored_full();
        let (nh, nf) = (self.chart.nx(), chart.nx());
        let mut values = vec![0.0; chart.len()];
        for j in 0..chart.ny() {
            for i in 0..nf {
                let src = if i < nh { i } else { 2 * (nh - 1) - i };
                values[chart.idx(i, j)] = self.at(src, j);
            }
        }
        ScalarField { chart, values }
    }

    /// Bilinear interpolation in chart coordinates; `σ` is clamped to `[0, 1]`.
    pub fn eval_chart(&self, w1: f64, sigma: f64) -> Option<f64> {
        let (i, s) = self.chart.locate_column(w1)?;
        let ny = self.chart.ny();
        let y = sigma.clamp(0.0, 1.0) * (ny - 1) as f64;
        let j = (y.floor() as usize).min(ny - 2);
        let t = y - j as f64;
        let v00 = self.at(i, j);
        let v10 = self.at(i + 1, j);
        let v01 = self.at(i, j + 1);
        let v11 = self.at(i + 1, j + 1);
        Some((1.0 - s) * ((1.0 - t) * v00 + t * v01) + s * ((1.0 - t) * v10 + t * v11))
    }

    /// Value at a physical point of the chart's region, zero above the top curve.
    pub fn eval(&self, w1: f64, w2: f64) -> Option<f64> {
        let (b, t) = self.chart.bounds_at(w1)?;
        if w2 >= t || t - b < TOL_COL {
            return Some(0.0);
        }
        self.eval_chart(w1, (w2 - b) / (t - b))
    }

    /// Rows `(w₁, w₂, value)` in node order.
    pub fn rows(&self) -> Vec<[f64; 3]> {
        self.chart.positions().into_iter().zip(&self.values).map(|([x, y], &v)| [x, y, v]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile_quarter() -> ConvexProfile {
        ConvexProfile::new(crate::profile::uniform_knots(1.0, 3), vec![1.0, 0.25, 1.0]).unwrap()
    }

    #[test]
    fn chart_examples() {
        let grid = RectDomain::new(1.0, 4, 4).unwrap();
        let one = ConvexProfile::constant(1.0, 5, 1.0).unwrap();
        let c = MappedChart::from_profile(&one, &grid).unwrap();
        assert_eq!(c.node(2, 2), [1.0, 0.0]);
        let zero = ConvexProfile::constant(1.0, 5, 0.0).unwrap();
        let c = MappedChart::from_profile(&zero, &grid).unwrap();
        for i in 0..c.nx() {
            assert_eq!(c.node(i, 4)[1], 0.0);
        }
        let c = MappedChart::from_profile(&profile_quarter(), &grid).unwrap();
        assert_eq!(c.det(2), 1.25);
    }

    #[test]
    fn degenerate_profile_rejected() {
        let grid = RectDomain::new(1.0, 4, 4).unwrap();
        let h = ConvexProfile::degenerate(1.0).unwrap();
        assert_eq!(MappedChart::from_profile(&h, &grid), Err(Error::DegenerateProfile));
    }

    #[test]
    fn round_trip_interior_nodes() {
        let grid = RectDomain::new(0.8, 16, 12).unwrap();
        let h = ConvexProfile::sampled(0.8, 9, |x| 1.2 * (x - 0.8).powi(2) - 0.3).unwrap();
        let c = MappedChart::from_profile(&h, &grid).unwrap();
        for j in 1..c.ny() - 1 {
            for i in 1..c.nx() - 1 {
                let [x, y] = c.node(i, j);
                let (x2, s) = c.inverse(x, y).unwrap();
                let [_, y2] = [x2, c.bottom(i) + s * c.det(i)];
                assert!((x2 - x).abs() <= 1e-12 * x.abs());
                assert!((y2 - y).abs() <= 1e-12 * y.abs().max(1e-300) + 1e-15);
            }
        }
    }

    #[test]
    fn half_chart_mirrors_to_full() {
        let grid = RectDomain::new(0.6, 10, 6).unwrap();
        let h = ConvexProfile::sampled(0.6, 7, |x| (x - 0.6).powi(2)).unwrap();
        let full = MappedChart::from_profile(&h, &grid).unwrap();
        let half = MappedChart::from_profile_half(&h, &grid).unwrap();
        assert_eq!(half.nx(), 6);
        assert_eq!(half.mirrored_full(), full);
    }

    #[test]
    fn collapsed_columns_flagged() {
        let grid = RectDomain::new(1.0, 4, 4).unwrap();
        let h = ConvexProfile::new(crate::profile::uniform_knots(1.0, 3), vec![1.0, -1.0, 1.0]).unwrap();
        let c = MappedChart::from_profile(&h, &grid).unwrap();
        assert!(c.is_collapsed(2));
        assert!(!c.is_collapsed(1));
        let mut f = ScalarField::zeros(c.clone());
        assert!(f.check_support(1e-12).is_ok());
        let k = c.idx(2, 1);
        f.values[k] = 0.1;
        assert!(matches!(f.check_support(1e-12), Err(Error::ConstraintViolation(_))));
    }

    #[test]
    fn bilinear_eval_reproduces_affine() {
        let c = MappedChart::rect(0.0, 2.0, -1.0, 1.0, 8, 8).unwrap();
        let f = ScalarField::from_fn(c, |x, y| 0.3 * x - 0.2 * y + 0.1);
        let v = f.eval(0.77, 0.31).unwrap();
        assert!((v - (0.3 * 0.77 - 0.2 * 0.31 + 0.1)).abs() < 1e-14);
    }
}
