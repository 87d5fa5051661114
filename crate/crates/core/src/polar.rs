use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// A map `B_l → ℝ²` sampled on a tensor `(r, θ)` grid; `θ` nodes lie in `[0, 2π)` and
/// wrap periodically.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarMapField {
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    /// Row-major in `r`: `values[i * theta.len() + j]`.
    pub values: Vec<[f64; 2]>,
}

impl PolarMapField {
    pub fn sample(r: Vec<f64>, theta: Vec<f64>, f: impl Fn(f64, f64) -> [f64; 2] + Sync) -> Self {
        let nt = theta.len();
        let values = r
            .par_iter()
            .flat_map_iter(|&ri| theta.iter().map(move |&tj| (ri, tj)).collect::<Vec<_>>())
            .map(|(ri, tj)| f(ri, tj))
            .collect::<Vec<_>>();
        debug_assert_eq!(values.len(), r.len() * nt);
        PolarMapField { r, theta, values }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> [f64; 2] {
        self.values[i * self.theta.len() + j]
    }

    /// Largest `|u|` over the samples.
    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max)
    }
}

/// `n` cells uniformly on `[a, b]`, endpoints included.
pub fn uniform_nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// `n` uniform periodic nodes on `[0, 2π)`.
pub fn periodic_nodes(n: usize) -> Vec<f64> {
    (0..n).map(|j| TAU * j as f64 / n as f64).collect()
}

/// Concatenation of uniform pieces: `breaks[k]` to `breaks[k+1]` with `cells[k]` cells.
pub fn graded_nodes(breaks: &[f64], cells: &[usize]) -> Vec<f64> {
    assert_eq!(breaks.len(), cells.len() + 1);
    let mut out = vec![breaks[0]];
    for k in 0..cells.len() {
        let piece = uniform_nodes(breaks[k], breaks[k + 1], cells[k]);
        out.extend_from_slice(&piece[1..]);
    }
    out
}

/// Graph area `∫√(1 + |∂_r v|² + r⁻²(|∂_θ v|² + (∂_r v₁ ∂_θ v₂ − ∂_θ v₁ ∂_r v₂)²)) r dr dθ`
/// by the midpoint rule in each grid cell, derivatives from cell-corner differences.
pub fn map_graph_area_polar(u: &PolarMapField) -> Result<f64> {
    let (nr, nt) = (u.r.len(), u.theta.len());
    if nr < 4 || nt < 4 {
        return Err(Error::GridTooCoarse(format!("{nr} x {nt} nodes, need at least 4 x 4")));
    }
    if u.values.len() != nr * nt {
        return Err(Error::InvalidRange(format!("{} samples for {nr} x {nt} nodes", u.values.len())));
    }
    let rows: Vec<f64> = (0..nr - 1)
        .into_par_iter()
        .map(|i| {
            let (r0, r1) = (u.r[i], u.r[i + 1]);
            let dr = r1 - r0;
            let rm = 0.5 * (r0 + r1);
            let mut s = 0.0;
            for j in 0..nt {
                let jn = (j + 1) % nt;
                let dt = if jn == 0 { u.theta[0] + TAU - u.theta[j] } else { u.theta[jn] - u.theta[j] };
                let (a, b, c, d) = (u.at(i, j), u.at(i + 1, j), u.at(i + 1, jn), u.at(i, jn));
                let mut vr = [0.0; 2];
                let mut vt = [0.0; 2];
                for k in 0..2 {
                    vr[k] = 0.5 * ((b[k] - a[k]) + (c[k] - d[k])) / dr;
                    vt[k] = 0.5 * ((d[k] - a[k]) + (c[k] - b[k])) / dt;
                }
                let jac = vr[0] * vt[1] - vt[0] * vr[1];
                let inner = rm * rm * (1.0 + vr[0] * vr[0] + vr[1] * vr[1])
                    + vt[0] * vt[0]
                    + vt[1] * vt[1]
                    + jac * jac;
                // √(1 + … + r⁻²(…)) · r, written to stay finite at r = 0
                s += inner.sqrt() * dr * dt;
            }
            s
        })
        .collect();
    Ok(rows.iter().sum())
}
