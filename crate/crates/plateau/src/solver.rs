use nalgebra::DVector;
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::pattern::SparsityPattern;
use nalgebra_sparse::CscMatrix;
use rayon::prelude::*;
use serde::Serialize;

use vortex_core::{BoundaryTrace, Error, MappedChart, Result, ScalarField};

const NONE: usize = usize::MAX;
// triangles with a smaller planar area carry no graph area and are skipped
const TINY_AREA: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveOptions {
    /// Max-norm tolerance on the discrete mean-curvature residual.
    pub tol_res: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol_res: 1e-8, max_iter: 500 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub residual: f64,
    pub area: f64,
    /// Whether the `[0, 1]` clamp changed the final iterate.
    pub clamp_active: bool,
    pub gradient_steps: usize,
}

#[derive(Debug, Clone, Copy)]
struct TriGeom {
    nodes: [usize; 3],
    grads: [[f64; 2]; 3],
    /// Planar area times the split weight 1/2.
    area: f64,
}

/// Piecewise-linear graph-area energy on a chart, with a set of pinned nodes.
pub struct Discretization {
    chart: MappedChart,
    fixed: Vec<bool>,
    free_index: Vec<usize>,
    free_nodes: Vec<usize>,
    tris: Vec<TriGeom>,
    /// Triangles grouped by cell row, for deterministic parallel sums.
    row_ranges: Vec<(usize, usize)>,
    lumped: Vec<f64>,
    pattern: SparsityPattern,
    slots: Vec<[usize; 9]>,
    /// Free (row, column) of each stored Hessian entry.
    entries: Vec<(usize, usize)>,
    bounds: (f64, f64),
}

fn tri_geom(p: &[[f64; 2]], nodes: [usize; 3]) -> Option<TriGeom> {
    let [a, b, c] = nodes;
    let (pa, pb, pc) = (p[a], p[b], p[c]);
    let twice = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]);
    if twice.abs() <= TINY_AREA {
        return None;
    }
    let g = |q: [f64; 2], r: [f64; 2]| [(q[1] - r[1]) / twice, (r[0] - q[0]) / twice];
    Some(TriGeom { nodes, grads: [g(pb, pc), g(pc, pa), g(pa, pb)], area: 0.25 * twice.abs() })
}

impl Discretization {
    /// `fixed[k]` pins node `k` to whatever value it carries.
    pub fn new(chart: MappedChart, fixed: Vec<bool>) -> Result<Self> {
        if fixed.len() != chart.len() {
            return Err(Error::InvalidRange("mask length does not match the chart".into()));
        }
        let pos = chart.positions();
        let (nx, ny) = (chart.nx(), chart.ny());
        let mut tris = Vec::with_capacity(4 * (nx - 1) * (ny - 1));
        let mut row_ranges = Vec::with_capacity(ny - 1);
        for j in 0..ny - 1 {
            let start = tris.len();
            for i in 0..nx - 1 {
                tris.extend(chart.cell_triangles(i, j).into_iter().filter_map(|t| tri_geom(&pos, t)));
            }
            row_ranges.push((start, tris.len()));
        }
        let mut free_index = vec![NONE; chart.len()];
        let mut free_nodes = Vec::new();
        for (k, &f) in fixed.iter().enumerate() {
            if !f {
                free_index[k] = free_nodes.len();
                free_nodes.push(k);
            }
        }
        let mut lumped = vec![0.0; chart.len()];
        for t in &tris {
            for &k in &t.nodes {
                lumped[k] += t.area / 3.0;
            }
        }
        if free_nodes.iter().any(|&k| lumped[k] <= 0.0) {
            return Err(Error::InvalidRange("a free node touches no triangle of positive area".into()));
        }
        let (pattern, slots) = build_pattern(&tris, &free_index, free_nodes.len());
        let mut entries = Vec::with_capacity(pattern.nnz());
        for c in 0..pattern.major_dim() {
            entries.extend(pattern.lane(c).iter().map(|&r| (r, c)));
        }
        Ok(Discretization {
            chart,
            fixed,
            free_index,
            free_nodes,
            tris,
            row_ranges,
            lumped,
            pattern,
            slots,
            entries,
            bounds: (f64::NEG_INFINITY, f64::INFINITY),
        })
    }

    /// Box constraint applied by projection during the iteration.
    pub fn with_bounds(mut self, lo: f64, hi: f64) -> Self {
        self.bounds = (lo, hi);
        self
    }

    pub fn chart(&self) -> &MappedChart {
        &self.chart
    }

    pub fn is_fixed(&self, k: usize) -> bool {
        self.fixed[k]
    }

    pub fn n_free(&self) -> usize {
        self.free_nodes.len()
    }

    fn row_sum(&self, f: impl Fn(&TriGeom) -> f64 + Sync) -> f64 {
        let rows: Vec<f64> = self.row_ranges.par_iter().map(|&(a, b)| self.tris[a..b].iter().map(&f).sum()).collect();
        rows.iter().sum()
    }

    /// Discrete graph area `Σ |T| √(1 + |∇ψ|²)`.
    pub fn energy(&self, z: &[f64]) -> f64 {
        self.row_sum(|t| t.area * slope(t, z).1)
    }

    /// Gradient of the energy with respect to every nodal value.
    pub fn gradient(&self, z: &[f64]) -> Vec<f64> {
        let parts: Vec<Vec<(usize, f64)>> = self
            .row_ranges
            .par_iter()
            .map(|&(a, b)| {
                let mut out = Vec::with_capacity(3 * (b - a));
                for t in &self.tris[a..b] {
                    let (g, w) = slope(t, z);
                    for (k, gl) in t.nodes.iter().zip(&t.grads) {
                        out.push((*k, t.area * (g[0] * gl[0] + g[1] * gl[1]) / w));
                    }
                }
                out
            })
            .collect();
        let mut grad = vec![0.0; z.len()];
        for part in parts {
            for (k, v) in part {
                grad[k] += v;
            }
        }
        grad
    }

    /// Nodal mean-curvature residual `-∂E/∂ψ_k / m_k` (lumped mass `m_k`); zero on pinned nodes.
    pub fn residual(&self, z: &[f64]) -> Vec<f64> {
        let g = self.gradient(z);
        (0..z.len()).map(|k| if self.fixed[k] { 0.0 } else { -g[k] / self.lumped[k] }).collect()
    }

    /// Free nodes held at a bound by a gradient pointing outwards (the active set).
    fn active_set(&self, z: &[f64], grad: &[f64]) -> Vec<bool> {
        let (lo, hi) = self.bounds;
        self.free_nodes.iter().map(|&k| (z[k] <= lo && grad[k] > 0.0) || (z[k] >= hi && grad[k] < 0.0)).collect()
    }

    /// Max-norm residual over free nodes outside the active set.
    fn max_residual(&self, grad: &[f64], active: &[bool]) -> f64 {
        self.free_nodes
            .iter()
            .zip(active)
            .filter(|(_, &a)| !a)
            .map(|(&k, _)| (grad[k] / self.lumped[k]).abs())
            .fold(0.0, f64::max)
    }

    /// Hessian values on the free-free pattern; `linear` assembles the stiffness matrix
    /// of the flat graph instead (used for the harmonic start).
    fn hessian_values(&self, z: &[f64], linear: bool) -> Vec<f64> {
        let mut vals = vec![0.0; self.pattern.nnz()];
        for (t, slots) in self.tris.iter().zip(&self.slots) {
            let (g, w) = if linear { ([0.0, 0.0], 1.0) } else { slope(t, z) };
            let w3 = w * w * w;
            let gl = &t.grads;
            let dots = [g[0] * gl[0][0] + g[1] * gl[0][1], g[0] * gl[1][0] + g[1] * gl[1][1], g[0] * gl[2][0] + g[1] * gl[2][1]];
            for a in 0..3 {
                for b in 0..3 {
                    let s = slots[3 * a + b];
                    if s == NONE {
                        continue;
                    }
                    let ll = gl[a][0] * gl[b][0] + gl[a][1] * gl[b][1];
                    vals[s] += t.area * (ll / w - dots[a] * dots[b] / w3);
                }
            }
        }
        vals
    }

    fn project(&self, z: &mut [f64]) -> bool {
        let (lo, hi) = self.bounds;
        let mut active = false;
        for &k in &self.free_nodes {
            let c = z[k].clamp(lo, hi);
            if c != z[k] {
                active = true;
                z[k] = c;
            }
        }
        active
    }

    /// Harmonic interpolant of the pinned values (the flat-graph stiffness system).
    pub fn harmonic(&self, z: &[f64]) -> Result<Vec<f64>> {
        let mut out = z.to_vec();
        if self.n_free() == 0 {
            return Ok(out);
        }
        let mut zf = z.to_vec();
        for &k in &self.free_nodes {
            zf[k] = 0.0;
        }
        // right-hand side: minus the stiffness action of the pinned values
        let mut rhs = vec![0.0; self.n_free()];
        for t in &self.tris {
            for a in 0..3 {
                let fa = self.free_index[t.nodes[a]];
                if fa == NONE {
                    continue;
                }
                for b in 0..3 {
                    let kb = t.nodes[b];
                    if self.free_index[kb] != NONE {
                        continue;
                    }
                    let ll = t.grads[a][0] * t.grads[b][0] + t.grads[a][1] * t.grads[b][1];
                    rhs[fa] -= t.area * ll * zf[kb];
                }
            }
        }
        let vals = self.hessian_values(z, true);
        let chol = factor(&self.pattern, vals)?;
        let x = chol.solve(&DVector::from_vec(rhs));
        for (f, &k) in self.free_nodes.iter().enumerate() {
            out[k] = x[f];
        }
        self.project(&mut out);
        Ok(out)
    }

    /// Damped Newton with Armijo backtracking on the area, projection onto the box
    /// bounds and a gradient step when the Newton direction fails.
    pub fn minimize(&self, z0: Vec<f64>, opts: &SolveOptions) -> Result<(Vec<f64>, SolveReport)> {
        let mut z = z0;
        let mut clamp_active = self.project(&mut z);
        let mut energy = self.energy(&z);
        let mut chol: Option<CscCholesky<f64>> = None;
        let mut gradient_steps = 0;
        let mut residual = f64::INFINITY;
        for it in 0..=opts.max_iter {
            let grad = self.gradient(&z);
            let active = self.active_set(&z, &grad);
            residual = self.max_residual(&grad, &active);
            if residual < opts.tol_res {
                return Ok((z, SolveReport { iterations: it, residual, area: energy, clamp_active, gradient_steps }));
            }
            if it == opts.max_iter {
                break;
            }
            let gf: Vec<f64> = self.free_nodes.iter().zip(&active).map(|(&k, &a)| if a { 0.0 } else { grad[k] }).collect();
            let mut vals = self.hessian_values(&z, false);
            // projected Newton: active nodes are decoupled and do not move
            if active.iter().any(|&a| a) {
                for (v, &(r, c)) in vals.iter_mut().zip(&self.entries) {
                    if active[r] || active[c] {
                        *v = if r == c { 1.0 } else { 0.0 };
                    }
                }
            }
            let newton = match chol.as_mut() {
                Some(c) => c.refactor(&vals).ok().map(|_| ()),
                None => factor(&self.pattern, vals).ok().map(|c| chol = Some(c)),
            };
            let mut dir: Vec<f64> = match (newton, chol.as_ref()) {
                (Some(()), Some(c)) => {
                    let x = c.solve(&DVector::from_column_slice(&gf));
                    x.iter().map(|v| -v).collect()
                }
                _ => {
                    chol = None;
                    Vec::new()
                }
            };
            let descent = |d: &[f64]| d.iter().zip(&gf).map(|(a, b)| a * b).sum::<f64>();
            if dir.is_empty() || !(descent(&dir) < 0.0) {
                dir = self.gradient_direction(&gf);
                gradient_steps += 1;
            }
            match self.line_search(&z, energy, &dir, descent(&dir)) {
                Some((zn, en, act)) => {
                    z = zn;
                    energy = en;
                    clamp_active = act;
                }
                None => {
                    // Newton direction rejected: fall back to a scaled gradient step
                    let d = self.gradient_direction(&gf);
                    gradient_steps += 1;
                    match self.line_search(&z, energy, &d, descent(&d)) {
                        Some((zn, en, act)) => {
                            z = zn;
                            energy = en;
                            clamp_active = act;
                        }
                        None => break,
                    }
                }
            }
        }
        Err(Error::NoConvergence { iter: opts.max_iter, residual })
    }

    fn gradient_direction(&self, gf: &[f64]) -> Vec<f64> {
        self.free_nodes.iter().zip(gf).map(|(&k, g)| -g / self.lumped[k]).collect()
    }

    fn line_search(&self, z: &[f64], e0: f64, dir: &[f64], slope0: f64) -> Option<(Vec<f64>, f64, bool)> {
        let mut t = 1.0;
        // below this predicted decrease the energy difference is rounding noise
        let noise = 1e-14 * e0.abs().max(1.0);
        while t > 1e-12 {
            let mut zn = z.to_vec();
            for (&k, d) in self.free_nodes.iter().zip(dir) {
                zn[k] += t * d;
            }
            let act = self.project(&mut zn);
            let en = self.energy(&zn);
            if en <= e0 + 1e-4 * t * slope0 || (-t * slope0 < noise && en <= e0 + noise) {
                return Some((zn, en, act));
            }
            t *= 0.5;
        }
        None
    }

    /// `∂E/∂w₂` at every node for the current values (planar positions move, values fixed).
    pub fn position_gradient_y(&self, z: &[f64]) -> Vec<f64> {
        let pos = self.chart.positions();
        let (nx, ny) = (self.chart.nx(), self.chart.ny());
        let mut out = vec![0.0; z.len()];
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                for t in self.chart.cell_triangles(i, j) {
                    let d = tri_area_dy(&pos, z, t);
                    for (k, v) in t.iter().zip(d) {
                        out[*k] += 0.5 * v;
                    }
                }
            }
        }
        out
    }
}

#[inline]
fn slope(t: &TriGeom, z: &[f64]) -> ([f64; 2], f64) {
    let mut g = [0.0; 2];
    for (k, gl) in t.nodes.iter().zip(&t.grads) {
        g[0] += z[*k] * gl[0];
        g[1] += z[*k] * gl[1];
    }
    (g, (1.0 + g[0] * g[0] + g[1] * g[1]).sqrt())
}

/// `∂/∂y` of the 3D area of a triangle at each vertex: `½ (n̂ × (P_{k+2} - P_{k+1}))_y`.
fn tri_area_dy(p: &[[f64; 2]], z: &[f64], t: [usize; 3]) -> [f64; 3] {
    let pt = |k: usize| [p[k][0], p[k][1], z[k]];
    let v = [pt(t[0]), pt(t[1]), pt(t[2])];
    let sub = |a: [f64; 3], b: [f64; 3]| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let cross = |a: [f64; 3], b: [f64; 3]| [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let n = cross(sub(v[1], v[0]), sub(v[2], v[0]));
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if len == 0.0 {
        return [0.0; 3];
    }
    let nh = [n[0] / len, n[1] / len, n[2] / len];
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let e = sub(v[(k + 2) % 3], v[(k + 1) % 3]);
        *o = 0.5 * cross(nh, e)[1];
    }
    out
}

fn build_pattern(tris: &[TriGeom], free_index: &[usize], n: usize) -> (SparsityPattern, Vec<[usize; 9]>) {
    let mut cols: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in tris {
        for &a in &t.nodes {
            for &b in &t.nodes {
                let (fa, fb) = (free_index[a], free_index[b]);
                if fa != NONE && fb != NONE {
                    cols[fb].push(fa);
                }
            }
        }
    }
    let mut offsets = Vec::with_capacity(n + 1);
    let mut indices = Vec::new();
    offsets.push(0);
    for c in &mut cols {
        c.sort_unstable();
        c.dedup();
        indices.extend_from_slice(c);
        offsets.push(indices.len());
    }
    let slots = tris
        .iter()
        .map(|t| {
            let mut s = [NONE; 9];
            for a in 0..3 {
                for b in 0..3 {
                    let (fa, fb) = (free_index[t.nodes[a]], free_index[t.nodes[b]]);
                    if fa != NONE && fb != NONE {
                        let col = &indices[offsets[fb]..offsets[fb + 1]];
                        s[3 * a + b] = offsets[fb] + col.binary_search(&fa).expect("entry in pattern");
                    }
                }
            }
            s
        })
        .collect();
    let pattern = SparsityPattern::try_from_offsets_and_indices(n, n, offsets, indices).expect("valid pattern");
    (pattern, slots)
}

fn factor(pattern: &SparsityPattern, vals: Vec<f64>) -> Result<CscCholesky<f64>> {
    let m = CscMatrix::try_from_pattern_and_values(pattern.clone(), vals)
        .map_err(|e| Error::InvalidRange(format!("sparse assembly: {e}")))?;
    CscCholesky::factor(&m).map_err(|_| Error::InvalidRange("Hessian not positive definite".into()))
}

/// Which nodes of a subgraph chart carry Dirichlet data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Walls {
    /// Both `w₁ = 0` and `w₁ = 2l` are pinned (full rectangle).
    Both,
    /// Only `w₁ = 0`; the last column is a free (natural) edge, used on `R_l`.
    LeftOnly,
}

/// Pinned nodes and their values for the subgraph problem: `φ` on the walls, zero on the
/// bottom, on the graph of `h` and in collapsed columns.
pub fn subgraph_data(chart: &MappedChart, bc: &BoundaryTrace, walls: Walls) -> (Vec<f64>, Vec<bool>) {
    let (nx, ny) = (chart.nx(), chart.ny());
    let mut z = vec![0.0; chart.len()];
    let mut fixed = vec![false; chart.len()];
    for j in 0..ny {
        for i in 0..nx {
            let k = chart.idx(i, j);
            let wall = i == 0 || (i == nx - 1 && walls == Walls::Both);
            if j == 0 || j == ny - 1 || chart.is_collapsed(i) {
                fixed[k] = true;
            } else if wall {
                fixed[k] = true;
                z[k] = bc.side(chart.node(i, j)[1]);
            }
        }
    }
    (z, fixed)
}

/// Minimal graph over `SG_h` with the subgraph boundary data.
pub fn solve_minimal_graph(
    chart: &MappedChart,
    bc: &BoundaryTrace,
    walls: Walls,
    warm: Option<&[f64]>,
    opts: &SolveOptions,
) -> Result<(ScalarField, SolveReport)> {
    let (z, fixed) = subgraph_data(chart, bc, walls);
    let disc = Discretization::new(chart.clone(), fixed)?.with_bounds(0.0, 1.0);
    let start = match warm {
        Some(w) if w.len() == z.len() => {
            let mut s = z.clone();
            for k in 0..s.len() {
                if !disc.is_fixed(k) {
                    s[k] = w[k];
                }
            }
            s
        }
        _ => disc.harmonic(&z)?,
    };
    let (v, rep) = disc.minimize(start, opts)?;
    Ok((ScalarField::new(chart.clone(), v)?, rep))
}

/// Minimal graph over a chart with Dirichlet data `g` on its whole boundary.
pub fn solve_dirichlet(
    chart: &MappedChart,
    g: impl Fn(f64, f64) -> f64,
    opts: &SolveOptions,
) -> Result<(ScalarField, SolveReport)> {
    let (nx, ny) = (chart.nx(), chart.ny());
    let mut z = vec![0.0; chart.len()];
    let mut fixed = vec![false; chart.len()];
    for j in 0..ny {
        for i in 0..nx {
            if i == 0 || j == 0 || i == nx - 1 || j == ny - 1 {
                let k = chart.idx(i, j);
                let [x, y] = chart.node(i, j);
                z[k] = g(x, y);
                fixed[k] = true;
            }
        }
    }
    let disc = Discretization::new(chart.clone(), fixed)?;
    let start = disc.harmonic(&z)?;
    let (v, rep) = disc.minimize(start, opts)?;
    Ok((ScalarField::new(chart.clone(), v)?, rep))
}

/// Discrete mean-curvature residual of a field at its interior nodes.
pub fn mean_curvature_residual(psi: &ScalarField) -> Result<Vec<f64>> {
    let (nx, ny) = (psi.chart.nx(), psi.chart.ny());
    let fixed = (0..psi.chart.len()).map(|k| {
        let (i, j) = (k % nx, k / nx);
        i == 0 || j == 0 || i == nx - 1 || j == ny - 1
    });
    let disc = Discretization::new(psi.chart.clone(), fixed.collect())?;
    Ok(disc.residual(&psi.values))
}

/// `ψ_m = ((ψ - 1/m) ∨ 0) ∧ φ_m` with `φ_m = (φ̂ - 2/m) ∨ 0`.
pub fn regularize_boundary(psi: &ScalarField, m: f64) -> Result<ScalarField> {
    if !(m >= 1.0) {
        return Err(Error::InvalidRange(format!("m must be >= 1, got {m}")));
    }
    let bc = BoundaryTrace::truncated(m);
    let values = psi
        .chart
        .positions()
        .iter()
        .zip(&psi.values)
        .map(|(&[_, y], &v)| (v - 1.0 / m).max(0.0).min(bc.side(y)))
        .collect();
    ScalarField::new(psi.chart.clone(), values)
}
