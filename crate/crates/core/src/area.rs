use std::f64::consts::PI;

use quadrature::double_exponential;
use rayon::prelude::*;

use crate::chart::{ScalarField, Tri};
use crate::error::{Error, Result};
use crate::model::{BoundaryTrace, ProblemParams};
use crate::profile::ConvexProfile;

/// Values above this outside the subgraph are rejected.
pub const SUPPORT_TOL: f64 = 1e-12;

/// `D_i u_j` of the vortex map `x/|x|`.
pub fn vortex_jacobian(x: [f64; 2]) -> [[f64; 2]; 2] {
    let r2 = x[0] * x[0] + x[1] * x[1];
    let r = r2.sqrt();
    let r3 = r2 * r;
    let mut d = [[0.0; 2]; 2];
    for (i, row) in d.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let delta = if i == j { 1.0 } else { 0.0 };
            *v = delta / r - x[i] * x[j] / r3;
        }
    }
    d
}

/// `Σ_ij (D_i u_j)²` summed from the sampled Jacobian (equals `1/|x|²`).
pub fn vortex_gradient_sq(x: [f64; 2]) -> f64 {
    vortex_jacobian(x).iter().flatten().map(|v| v * v).sum()
}

fn check_annulus(p: &ProblemParams) -> Result<()> {
    if p.epsilon > p.l {
        return Err(Error::InvalidRange(format!("epsilon {} exceeds l {}", p.epsilon, p.l)));
    }
    Ok(())
}

/// `∫_{ε<|x|<l} √(1 + |∇u|²) dx` in closed form, using `|∇u|² = 1/r²`.
pub fn vortex_graph_area(p: &ProblemParams) -> Result<f64> {
    check_annulus(p)?;
    let g = |r: f64| r * (1.0 + r * r).sqrt() + r.asinh();
    Ok(PI * (g(p.l) - g(p.epsilon)))
}

/// The same integral by adaptive radial quadrature of the sampled Jacobian norm.
pub fn vortex_graph_area_quadrature(p: &ProblemParams, tol: f64) -> Result<f64> {
    check_annulus(p)?;
    if p.epsilon == p.l {
        return Ok(0.0);
    }
    let f = |r: f64| 2.0 * PI * r * (1.0 + vortex_gradient_sq([r, 0.0])).sqrt();
    Ok(double_exponential::integrate(f, p.epsilon, p.l, tol).integral)
}

/// Relaxed area of the vortex map on `B_l`: graph area plus the infimum of `F_{2l}`.
pub fn relaxed_area(l: f64, f_star: f64) -> Result<f64> {
    Ok(vortex_graph_area(&ProblemParams::new(l, 0.0)?)? + f_star)
}

#[inline]
pub(crate) fn tri_area3(p: &[[f64; 2]], z: &[f64], t: Tri) -> f64 {
    let [a, b, c] = t;
    let e1 = [p[b][0] - p[a][0], p[b][1] - p[a][1], z[b] - z[a]];
    let e2 = [p[c][0] - p[a][0], p[c][1] - p[a][1], z[c] - z[a]];
    let n = [e1[1] * e2[2] - e1[2] * e2[1], e1[2] * e2[0] - e1[0] * e2[2], e1[0] * e2[1] - e1[1] * e2[0]];
    0.5 * (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt()
}

/// Area of the piecewise-linear graph over the chart region, averaged over both
/// diagonal splits of every cell.
pub fn scalar_graph_area(psi: &ScalarField) -> f64 {
    let c = &psi.chart;
    let pos = c.positions();
    let rows: Vec<f64> = (0..c.ny() - 1)
        .into_par_iter()
        .map(|j| {
            let mut s = 0.0;
            for i in 0..c.nx() - 1 {
                for t in c.cell_triangles(i, j) {
                    s += tri_area3(&pos, &psi.values, t);
                }
            }
            0.5 * s
        })
        .collect();
    rows.iter().sum()
}

/// Antiderivative of `√(1 - y²)`.
fn half_disc_primitive(y: f64) -> f64 {
    let y = y.clamp(-1.0, 1.0);
    0.5 * (y * (1.0 - y * y).max(0.0).sqrt() + y.asin())
}

/// Shift `c = 2/m` and support half-width `y_m` of the (possibly truncated) side data.
fn truncation(phi: &BoundaryTrace) -> (f64, f64) {
    let c = phi.truncation_m.map_or(0.0, |m| 2.0 / m);
    (c, (1.0 - c * c).max(0.0).sqrt())
}

/// Antiderivative of the side data `φ` or `φ_m`.
fn side_primitive(y: f64, phi: &BoundaryTrace) -> f64 {
    let (c, ym) = truncation(phi);
    if c >= 1.0 {
        return 0.0;
    }
    let y = y.clamp(-ym, ym);
    half_disc_primitive(y) - c * y
}

/// `∫_{y0}^{y1} |φ(y) - L(y)|` for the line `L` through `(y0, p0)`, `(y1, p1)`, split
/// exactly at the points where the sign can change.
fn exact_mismatch(y0: f64, y1: f64, p0: f64, p1: f64, phi: &BoundaryTrace) -> f64 {
    if y1 <= y0 {
        return 0.0;
    }
    let (c, ym) = truncation(phi);
    let beta = (p1 - p0) / (y1 - y0);
    let alpha = p0 - beta * y0;
    let mut cuts = vec![y0, y1];
    if c < 1.0 {
        cuts.extend([-ym, ym]);
        // √(1 - y²) - c = α + βy, i.e. (α + c + βy)² = 1 - y² with α + βy ≥ 0
        let a1 = alpha + c;
        let qa = 1.0 + beta * beta;
        let qb = 2.0 * a1 * beta;
        let qc = a1 * a1 - 1.0;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc > 0.0 {
            let s = disc.sqrt();
            for r in [(-qb - s) / (2.0 * qa), (-qb + s) / (2.0 * qa)] {
                if alpha + beta * r >= 0.0 && r.abs() <= ym {
                    cuts.push(r);
                }
            }
        }
    }
    // where the data vanishes the sign changes with the line itself
    if beta != 0.0 {
        let r = -alpha / beta;
        if r.abs() >= ym {
            cuts.push(r);
        }
    }
    cuts.retain(|&y| y >= y0 && y <= y1);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .map(|w| {
            let (u, v) = (w[0], w[1]);
            let data = side_primitive(v, phi) - side_primitive(u, phi);
            let line = alpha * (v - u) + 0.5 * beta * (v * v - u * u);
            (data - line).abs()
        })
        .sum()
}

/// `∫ |φ - trace|` along one wall for the piecewise-linear trace through the given nodes.
fn wall_mismatch(ys: &[f64], vs: &[f64], phi: &BoundaryTrace) -> f64 {
    (0..ys.len() - 1).map(|j| exact_mismatch(ys[j], ys[j + 1], vs[j], vs[j + 1], phi)).sum()
}

/// `∫_{h0}^{1} φ`, the vertical segment of `L_h` above the wall trace.
fn wall_above(h0: f64, phi: &BoundaryTrace) -> f64 {
    side_primitive(1.0, phi) - side_primitive(h0, phi)
}

/// `∫ |L|` over a segment of length `len` for the line through `p0`, `p1`.
fn abs_line_integral(len: f64, p0: f64, p1: f64) -> f64 {
    if p0 * p1 >= 0.0 {
        0.5 * len * (p0.abs() + p1.abs())
    } else {
        0.5 * len * (p0 * p0 + p1 * p1) / (p0.abs() + p1.abs())
    }
}

/// Penalty terms along the bottom edge and the graph of `h`.
fn bottom_and_top(psi: &ScalarField) -> f64 {
    let c = &psi.chart;
    let (nx, ny) = (c.nx(), c.ny());
    let mut s = 0.0;
    for i in 0..nx - 1 {
        let [x0, b0] = c.node(i, 0);
        let [x1, b1] = c.node(i + 1, 0);
        let len = (x1 - x0).hypot(b1 - b0);
        s += abs_line_integral(len, psi.at(i, 0), psi.at(i + 1, 0));
        let [_, t0] = c.node(i, ny - 1);
        let [_, t1] = c.node(i + 1, ny - 1);
        if t0 <= -1.0 && t1 <= -1.0 {
            continue;
        }
        let len = (x1 - x0).hypot(t1 - t0);
        s += abs_line_integral(len, psi.at(i, ny - 1), psi.at(i + 1, ny - 1));
    }
    s
}

/// Wall contribution of column `i`: trace mismatch below `h` plus `φ` on `L_h` above it.
fn wall_terms(psi: &ScalarField, i: usize, phi: &BoundaryTrace) -> f64 {
    let c = &psi.chart;
    let ys: Vec<f64> = (0..c.ny()).map(|j| c.node(i, j)[1]).collect();
    let vs: Vec<f64> = (0..c.ny()).map(|j| psi.at(i, j)).collect();
    wall_mismatch(&ys, &vs, phi) + wall_above(c.top(i), phi)
}

fn degenerate_side(phi: &BoundaryTrace) -> f64 {
    match phi.truncation_m {
        // a unit half-disc
        None => PI / 2.0,
        Some(_) => wall_above(-1.0, phi),
    }
}

fn require_field<'a>(h: &ConvexProfile, psi: Option<&'a ScalarField>) -> Result<&'a ScalarField> {
    let psi = psi.ok_or_else(|| Error::InvalidRange("a field is required for a non-degenerate profile".into()))?;
    if (psi.chart.top(0) - h.eval(0.0)).abs() > 1e-12 {
        return Err(Error::InvalidRange("field chart does not match the profile".into()));
    }
    psi.check_support(SUPPORT_TOL)?;
    Ok(psi)
}

/// `F_{2l}(h, ψ)` in the subgraph form: graph area over `SG_h`, trace mismatch on the
/// walls and bottom, `|ψ⁻|` on the graph of `h`, and `φ` on the wall segments above `h`.
/// `psi = None` stands for `ψ ≡ 0` and is only meaningful for the degenerate profile.
pub fn functional_f2l(h: &ConvexProfile, psi: Option<&ScalarField>, phi: &BoundaryTrace) -> Result<f64> {
    if h.is_degenerate() {
        if psi.is_some_and(|f| f.values.iter().any(|&v| v.abs() > SUPPORT_TOL)) {
            return Err(Error::ConstraintViolation("psi must vanish for h = -1".into()));
        }
        return Ok(2.0 * degenerate_side(phi));
    }
    let psi = require_field(h, psi)?;
    let last = psi.chart.nx() - 1;
    if (psi.chart.w1()[last] - 2.0 * h.l()).abs() > 1e-12 * h.l() {
        return Err(Error::InvalidRange("field must cover [0, 2l]".into()));
    }
    Ok(scalar_graph_area(psi) + wall_terms(psi, 0, phi) + wall_terms(psi, last, phi) + bottom_and_top(psi))
}

/// `F_l` on `R_l = (0, l) x (-1, 1)` with a free edge at `w₁ = l`.
pub fn functional_fl(h: &ConvexProfile, psi: Option<&ScalarField>, phi: &BoundaryTrace) -> Result<f64> {
    if h.is_degenerate() {
        if psi.is_some_and(|f| f.values.iter().any(|&v| v.abs() > SUPPORT_TOL)) {
            return Err(Error::ConstraintViolation("psi must vanish for h = -1".into()));
        }
        return Ok(degenerate_side(phi));
    }
    let psi = require_field(h, psi)?;
    let last = psi.chart.nx() - 1;
    if (psi.chart.w1()[last] - h.l()).abs() > 1e-12 * h.l() {
        return Err(Error::InvalidRange("field must cover [0, l]".into()));
    }
    Ok(scalar_graph_area(psi) + wall_terms(psi, 0, phi) + bottom_and_top(psi))
}
