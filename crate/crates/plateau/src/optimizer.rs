use std::f64::consts::PI;

use serde::Serialize;

use vortex_core::profile::uniform_knots;
use vortex_core::{
    functional_fl, project_convex_symmetric, relaxed_area, BoundaryTrace, CatenoidProfile, ConvexProfile, Error,
    MappedChart, RectDomain, Result, ScalarField,
};

use crate::solver::{subgraph_data, Discretization, SolveOptions, SolveReport, Walls};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    CatenoidType,
    TwoDiscs,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::CatenoidType => "catenoid-type",
            Branch::TwoDiscs => "two-discs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizeOptions {
    /// Knots of the piecewise-linear profile on `[0, 2l]` (odd, >= 5).
    pub n_knots: usize,
    /// Nodes per side of the inner grid on `R_{2l}` (odd).
    pub grid: usize,
    pub solve: SolveOptions,
    /// Projected-gradient iterations.
    pub max_outer: usize,
    /// Relative decrease below which the projected-gradient phase stops.
    pub tol_f: f64,
    /// Coordinate-descent step schedule: start, floor (halved in between).
    pub polish_start: f64,
    pub polish_floor: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            n_knots: 17,
            grid: 129,
            solve: SolveOptions::default(),
            max_outer: 200,
            tol_f: 1e-10,
            polish_start: 0.02,
            polish_floor: 1e-3,
        }
    }
}

/// Result of the outer search at one `l`.
#[derive(Debug, Clone)]
pub struct Optimum {
    pub l: f64,
    /// Best convex profile with `h(0) = h(2l) = 1`.
    pub h_nontrivial: ConvexProfile,
    /// Minimal graph for `h_nontrivial` on the full rectangle.
    pub psi_nontrivial: ScalarField,
    pub f_nontrivial: f64,
    /// `min(F_nontrivial, π)`.
    pub f_star: f64,
    pub branch: Branch,
    /// Whether some knot of the best profile reached `-1`.
    pub collapsed: bool,
    /// Accepted `F` values along the search.
    pub history: Vec<f64>,
    pub inner_solves: usize,
    pub last_report: SolveReport,
}

impl Optimum {
    /// `π - F_nontrivial`, positive while the nontrivial branch beats the two discs.
    pub fn gap(&self) -> f64 {
        PI - self.f_nontrivial
    }

    pub fn h_star(&self) -> ConvexProfile {
        match self.branch {
            Branch::CatenoidType => self.h_nontrivial.clone(),
            Branch::TwoDiscs => ConvexProfile::degenerate(self.l).expect("l > 0"),
        }
    }

    pub fn psi_star(&self) -> Option<&ScalarField> {
        match self.branch {
            Branch::CatenoidType => Some(&self.psi_nontrivial),
            Branch::TwoDiscs => None,
        }
    }
}

struct Eval {
    h: ConvexProfile,
    f: f64,
    field: ScalarField,
    grad: Vec<f64>,
    report: SolveReport,
}

/// Evaluates `F_{2l}` on the half rectangle for profiles given by their free knot values.
pub struct ProfileProblem {
    grid: RectDomain,
    knots: Vec<f64>,
    bc: BoundaryTrace,
    solve: SolveOptions,
    solves: usize,
}

impl ProfileProblem {
    pub fn new(l: f64, opts: &OptimizeOptions) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidRange(format!("l must be positive, got {l}")));
        }
        if opts.n_knots < 5 || opts.n_knots % 2 == 0 {
            return Err(Error::InvalidRange(format!("knot count must be odd and >= 5, got {}", opts.n_knots)));
        }
        if opts.grid < 17 || opts.grid % 2 == 0 {
            return Err(Error::InvalidRange(format!("grid must be odd and >= 17, got {}", opts.grid)));
        }
        Ok(ProfileProblem {
            grid: RectDomain::with_nodes(l, opts.grid)?,
            knots: uniform_knots(l, opts.n_knots),
            bc: BoundaryTrace::exact(),
            solve: opts.solve,
            solves: 0,
        })
    }

    /// Number of free parameters: knots `1..=c`, `c` the centre knot.
    pub fn n_params(&self) -> usize {
        (self.knots.len() - 1) / 2
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    fn full_values(&self, p: &[f64]) -> Vec<f64> {
        let n = self.knots.len();
        let c = self.n_params();
        (0..n)
            .map(|i| {
                let k = if i <= c { i } else { n - 1 - i };
                if k == 0 {
                    1.0
                } else {
                    p[k - 1]
                }
            })
            .collect()
    }

    /// Admissible profile closest (in the projection sense) to the given parameters.
    pub fn profile(&self, p: &[f64]) -> Result<ConvexProfile> {
        project_convex_symmetric(&self.knots, &self.full_values(p))
    }

    pub fn params(&self, h: &ConvexProfile) -> Vec<f64> {
        h.values()[1..=self.n_params()].to_vec()
    }

    fn evaluate(&mut self, h: ConvexProfile, warm: Option<&[f64]>) -> Result<Eval> {
        let wrap = |e: Error, h: &ConvexProfile| Error::InnerFailure { values: h.values().to_vec(), source: Box::new(e) };
        let chart = MappedChart::from_profile_half(&h, &self.grid)?;
        let (z, fixed) = subgraph_data(&chart, &self.bc, Walls::LeftOnly);
        let disc = Discretization::new(chart.clone(), fixed).map_err(|e| wrap(e, &h))?.with_bounds(0.0, 1.0);
        let start = match warm {
            Some(w) if w.len() == z.len() => {
                (0..z.len()).map(|k| if disc.is_fixed(k) { z[k] } else { w[k] }).collect()
            }
            _ => disc.harmonic(&z).map_err(|e| wrap(e, &h))?,
        };
        self.solves += 1;
        let (values, report) = disc.minimize(start, &self.solve).map_err(|e| wrap(e, &h))?;
        let field = ScalarField::new(chart.clone(), values)?;
        let f = 2.0 * functional_fl(&h, Some(&field), &self.bc)?;

        // envelope theorem: only node positions depend on h; w₂ = -1 + σ (1 + h(w₁))
        let gy = disc.position_gradient_y(&field.values);
        let mut grad = vec![0.0; self.n_params()];
        for (k, g) in grad.iter_mut().enumerate() {
            let knot = k + 1;
            let mut s = 0.0;
            for i in 0..chart.nx() {
                let b = h.hat(knot, chart.w1()[i]);
                if b == 0.0 {
                    continue;
                }
                for j in 0..chart.ny() {
                    s += gy[chart.idx(i, j)] * chart.dtop(j) * b;
                }
            }
            *g = 2.0 * s;
        }
        Ok(Eval { h, f, field, grad, report })
    }

    /// Like `evaluate`, but an inner non-convergence yields `None` so that a trial step can be
    /// rejected instead of aborting the search.
    fn trial(&mut self, h: ConvexProfile, warm: Option<&[f64]>) -> Result<Option<Eval>> {
        match self.evaluate(h, warm) {
            Ok(e) => Ok(Some(e)),
            Err(e) if e.is_non_convergence() => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// `F_{2l}` and its gradient with respect to the free knot values.
    pub fn value_and_gradient(&mut self, h: &ConvexProfile) -> Result<(f64, Vec<f64>)> {
        let e = self.evaluate(h.clone(), None)?;
        Ok((e.f, e.grad))
    }
}

/// Default starting profile: `2ρ̄ - 1` from the catenoid when it exists, else `h ≡ 1`.
pub fn initial_profile(l: f64, n_knots: usize) -> Result<ConvexProfile> {
    match CatenoidProfile::new(l) {
        Ok(c) => ConvexProfile::sampled(l, n_knots, |t| 2.0 * c.rho_bar(t) - 1.0),
        Err(Error::NoCatenoid(_)) => ConvexProfile::constant(l, n_knots, 1.0),
        Err(e) => Err(e),
    }
}

fn collapsed(h: &ConvexProfile) -> bool {
    h.min_value() <= -1.0 + vortex_core::profile::TOL_COL
}

/// Nested descent over convex symmetric pinned profiles, compared against `h ≡ -1`.
pub fn optimize_profile(l: f64, opts: &OptimizeOptions) -> Result<Optimum> {
    optimize_profile_from(l, opts, None)
}

/// As [`optimize_profile`], starting from the free knot values of `start` (same knot count).
pub fn optimize_profile_from(l: f64, opts: &OptimizeOptions, start: Option<&[f64]>) -> Result<Optimum> {
    let mut prob = ProfileProblem::new(l, opts)?;
    let h0 = match start {
        Some(p) if p.len() == prob.n_params() => prob.profile(p)?,
        _ => initial_profile(l, opts.n_knots)?,
    };
    let mut cur = prob.evaluate(h0, None)?;
    let mut history = vec![cur.f];

    // projected gradient with Armijo backtracking along the projection arc
    let mut step = {
        let gmax = cur.grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if gmax > 0.0 { 0.1 / gmax } else { 0.0 }
    };
    for _ in 0..opts.max_outer {
        if step < 1e-12 {
            break;
        }
        let p = prob.params(&cur.h);
        let raw: Vec<f64> = p.iter().zip(&cur.grad).map(|(x, g)| x - step * g).collect();
        let h = prob.profile(&raw)?;
        let q = prob.params(&h);
        if q == p {
            break;
        }
        let decrease: f64 = p.iter().zip(&q).zip(&cur.grad).map(|((a, b), g)| g * (a - b)).sum();
        let trial = prob.trial(h, Some(&cur.field.values))?;
        if let Some(trial) = trial.filter(|t| t.f <= cur.f - 1e-4 * decrease) {
            let rel = (cur.f - trial.f) / cur.f.abs().max(1.0);
            cur = trial;
            history.push(cur.f);
            step *= 1.5;
            if rel < opts.tol_f {
                break;
            }
        } else {
            step *= 0.5;
        }
    }

    // coordinate descent with a shrinking step
    let mut delta = opts.polish_start;
    while delta >= opts.polish_floor {
        let mut improved = false;
        for k in 0..prob.n_params() {
            for sign in [-1.0, 1.0] {
                let mut p = prob.params(&cur.h);
                p[k] += sign * delta;
                let h = prob.profile(&p)?;
                if h == cur.h {
                    continue;
                }
                let trial = prob.trial(h, Some(&cur.field.values))?;
                if let Some(trial) = trial.filter(|t| t.f < cur.f) {
                    cur = trial;
                    history.push(cur.f);
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            delta *= 0.5;
        }
    }

    let f_nontrivial = cur.f;
    let branch = if f_nontrivial < PI { Branch::CatenoidType } else { Branch::TwoDiscs };
    Ok(Optimum {
        l,
        collapsed: collapsed(&cur.h),
        psi_nontrivial: cur.field.mirrored_full(),
        h_nontrivial: cur.h,
        f_nontrivial,
        f_star: f_nontrivial.min(PI),
        branch,
        history,
        inner_solves: prob.solves,
        last_report: cur.report,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdStep {
    pub l: f64,
    pub gap: f64,
    pub f_nontrivial: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Threshold {
    pub l0: f64,
    pub lo: f64,
    pub hi: f64,
    pub gap_lo: f64,
    pub gap_hi: f64,
    pub steps: Vec<ThresholdStep>,
}

/// Bisection on `g(l) = π - F_nontrivial(l)`; each evaluation starts from the last
/// catenoid-type optimum found on the low side of the bracket.
pub fn find_threshold(lo: f64, hi: f64, tol_l: f64, opts: &OptimizeOptions) -> Result<Threshold> {
    if !(lo > 0.0 && hi > lo && tol_l > 0.0) {
        return Err(Error::InvalidRange(format!("need 0 < lo < hi and tol_l > 0, got ({lo}, {hi}, {tol_l})")));
    }
    let mut steps = Vec::new();
    let mut record = |o: &Optimum| steps.push(ThresholdStep { l: o.l, gap: o.gap(), f_nontrivial: o.f_nontrivial });

    let low = optimize_profile(lo, opts)?;
    record(&low);
    let high = optimize_profile(hi, opts)?;
    record(&high);
    let (g_lo, g_hi) = (low.gap(), high.gap());
    if !(g_lo > 0.0 && g_hi <= 0.0) {
        return Err(Error::NoSignChange { lo, hi, g_lo, g_hi });
    }
    let (mut a, mut b, mut ga, mut gb) = (lo, hi, g_lo, g_hi);
    let mut warm = ProfileProblem::new(lo, opts)?.params(&low.h_nontrivial);
    while b - a > tol_l {
        let m = 0.5 * (a + b);
        let o = optimize_profile_from(m, opts, Some(&warm))?;
        record(&o);
        if o.gap() > 0.0 {
            a = m;
            ga = o.gap();
            warm = ProfileProblem::new(m, opts)?.params(&o.h_nontrivial);
        } else {
            b = m;
            gb = o.gap();
        }
    }
    Ok(Threshold { l0: 0.5 * (a + b), lo: a, hi: b, gap_lo: ga, gap_hi: gb, steps })
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveRow {
    pub l: f64,
    #[serde(rename = "F")]
    pub f: Option<f64>,
    pub branch: Option<Branch>,
    pub relaxed_area: Option<f64>,
    pub error: Option<String>,
}

/// `(l, F_star, branch, relaxed area)` for each `l`, sorted by `l`; failures are recorded per row.
pub fn value_curve(ls: &[f64], opts: &OptimizeOptions) -> Vec<CurveRow> {
    use rayon::prelude::*;
    let mut ls = ls.to_vec();
    ls.sort_by(f64::total_cmp);
    ls.par_iter()
        .map(|&l| match optimize_profile(l, opts).and_then(|o| Ok((relaxed_area(l, o.f_star)?, o))) {
            Ok((ra, o)) => CurveRow { l, f: Some(o.f_star), branch: Some(o.branch), relaxed_area: Some(ra), error: None },
            Err(e) => CurveRow { l, f: None, branch: None, relaxed_area: None, error: Some(e.to_string()) },
        })
        .collect()
}
