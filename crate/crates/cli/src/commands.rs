use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use vortex_core::{
    functional_f2l, functional_fl, relaxed_area, vortex_graph_area, vortex_graph_area_quadrature, BoundaryTrace,
    ConvexProfile, MappedChart, PolarMapField, ProblemParams, RectDomain, ScalarField,
};
use vortex_plateau::{
    find_threshold, optimize_profile, solve_minimal_graph, value_curve, OptimizeOptions, SolveOptions, SolveReport,
    Walls,
};
use vortex_sequences as seq;
use vortex_symmetry as sym;

use crate::args::*;
use crate::output::{Failure, Outcome};

fn check(ok: bool, message: impl FnOnce() -> String, context: Value) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::validation(message(), context))
    }
}

fn positive(name: &str, v: f64) -> Result<(), Failure> {
    check(v > 0.0 && v.is_finite(), || format!("--{name} must be positive and finite, got {v}"), json!({ name: v }))
}

fn odd_at_least(name: &str, v: usize, min: usize) -> Result<(), Failure> {
    check(v >= min && v % 2 == 1, || format!("--{name} must be odd and >= {min}, got {v}"), json!({ name: v }))
}

fn inner_opts(a: &InnerArgs) -> Result<SolveOptions, Failure> {
    odd_at_least("grid", a.grid, 5)?;
    positive("tol", a.tol)?;
    Ok(SolveOptions { tol_res: a.tol, ..Default::default() })
}

fn outer_opts(a: &OuterArgs) -> Result<OptimizeOptions, Failure> {
    odd_at_least("knots", a.knots, 5)?;
    odd_at_least("grid", a.inner.grid, 17)?;
    let solve = inner_opts(&a.inner)?;
    Ok(OptimizeOptions { n_knots: a.knots, grid: a.inner.grid, solve, ..Default::default() })
}

fn read_profile(path: &Path, l: f64) -> Result<ConvexProfile, Failure> {
    let f = File::open(path).map_err(|e| Failure::io(e, path))?;
    let h: ConvexProfile = serde_json::from_reader(BufReader::new(f))
        .map_err(|e| Failure::validation(format!("bad profile: {e}"), json!({ "path": path })))?;
    check(
        (h.l() - l).abs() <= 1e-9 * l,
        || format!("profile lives on [0, {}], expected [0, {}]", 2.0 * h.l(), 2.0 * l),
        json!({ "path": path, "l": l }),
    )?;
    Ok(h)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| Failure::io(e, path))
}

fn write_csv<R: Serialize>(path: &Path, rows: impl IntoIterator<Item = R>) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for r in rows {
        w.serialize(r).map_err(|e| Failure::io(e, path))?;
    }
    w.flush().map_err(|e| Failure::io(e, path))
}

fn field_csv(path: &Path, psi: &ScalarField) -> Result<(), Failure> {
    #[derive(Serialize)]
    struct Row {
        w1: f64,
        w2: f64,
        value: f64,
    }
    write_csv(path, psi.rows().into_iter().map(|[w1, w2, value]| Row { w1, w2, value }))
}

fn map_csv(path: &Path, u: &PolarMapField) -> Result<(), Failure> {
    #[derive(Serialize)]
    struct Row {
        r: f64,
        theta: f64,
        u1: f64,
        u2: f64,
    }
    let nt = u.theta.len();
    write_csv(
        path,
        u.values.iter().enumerate().map(|(k, v)| Row { r: u.r[k / nt], theta: u.theta[k % nt], u1: v[0], u2: v[1] }),
    )
}

/// Minimal graph over the subgraph of `h` on the full rectangle or on its left half.
fn minimal_graph(h: &ConvexProfile, grid: usize, half: bool, opts: &SolveOptions) -> Result<(ScalarField, SolveReport), Failure> {
    let ctx = || json!({ "l": h.l(), "grid": grid, "profile": h.values() });
    let dom = RectDomain::with_nodes(h.l(), grid).map_err(|e| Failure::core(e, ctx()))?;
    let (chart, walls) = if half {
        (MappedChart::from_profile_half(h, &dom), Walls::LeftOnly)
    } else {
        (MappedChart::from_profile(h, &dom), Walls::Both)
    };
    let chart = chart.map_err(|e| Failure::core(e, ctx()))?;
    solve_minimal_graph(&chart, &BoundaryTrace::exact(), walls, None, opts).map_err(|e| Failure::core(e, ctx()))
}

pub fn area(a: &AreaArgs) -> Outcome {
    positive("l", a.l)?;
    let ctx = json!({ "l": a.l, "epsilon": a.epsilon });
    if let Functional::Vortex = a.functional {
        check(a.epsilon >= 0.0 && a.epsilon <= a.l, || format!("need 0 <= epsilon <= l, got {}", a.epsilon), ctx.clone())?;
        let p = ProblemParams::new(a.l, a.epsilon).map_err(|e| Failure::core(e, ctx.clone()))?;
        let value = vortex_graph_area(&p).map_err(|e| Failure::core(e, ctx.clone()))?;
        let quadrature = vortex_graph_area_quadrature(&p, 1e-12).map_err(|e| Failure::core(e, ctx))?;
        return Ok(json!({ "functional": "vortex", "value": value, "quadrature": quadrature, "grid": null }));
    }
    let opts = inner_opts(&a.inner)?;
    let half = matches!(a.functional, Functional::Fl);
    let phi = BoundaryTrace::exact();
    let (h, psi, report) = match &a.h_file {
        Some(path) => {
            let h = read_profile(path, a.l)?;
            if h.is_degenerate() {
                (h, None, None)
            } else {
                let (psi, rep) = minimal_graph(&h, a.inner.grid, half, &opts)?;
                (h, Some(psi), Some(rep))
            }
        }
        None => {
            let h = ConvexProfile::constant(a.l, 5, 1.0).map_err(|e| Failure::core(e, ctx.clone()))?;
            let dom = RectDomain::with_nodes(a.l, a.inner.grid).map_err(|e| Failure::core(e, ctx.clone()))?;
            let chart = if half { MappedChart::from_profile_half(&h, &dom) } else { MappedChart::from_profile(&h, &dom) }
                .map_err(|e| Failure::core(e, ctx.clone()))?;
            let psi = ScalarField::from_fn(chart, |_, y| BoundaryTrace::phi_hat(y));
            (h, Some(psi), None)
        }
    };
    let f = if half { functional_fl } else { functional_f2l };
    let value = f(&h, psi.as_ref(), &phi).map_err(|e| Failure::core(e, ctx))?;
    Ok(json!({
        "functional": if half { "Fl" } else { "F2l" },
        "value": value,
        "grid": a.inner.grid,
        "profile": if a.h_file.is_some() { "file" } else { "cylinder" },
        "solve": report,
    }))
}

pub fn solve(a: &SolveArgs) -> Outcome {
    positive("l", a.l)?;
    let opts = inner_opts(&a.inner)?;
    let h = read_profile(&a.h_file, a.l)?;
    let phi = BoundaryTrace::exact();
    if h.is_degenerate() {
        let value = functional_f2l(&h, None, &phi).map_err(|e| Failure::core(e, json!({ "l": a.l })))?;
        return Ok(json!({ "F_value": value, "residual": 0.0, "iters": 0, "grid": a.inner.grid, "degenerate": true }));
    }
    let (psi, rep) = minimal_graph(&h, a.inner.grid, false, &opts)?;
    let value = functional_f2l(&h, Some(&psi), &phi).map_err(|e| Failure::core(e, json!({ "l": a.l })))?;
    if let Some(out) = &a.out {
        field_csv(out, &psi)?;
    }
    Ok(json!({
        "F_value": value,
        "residual": rep.residual,
        "iters": rep.iterations,
        "grid": a.inner.grid,
        "graph_area": rep.area,
        "clamp_active": rep.clamp_active,
        "degenerate": false,
    }))
}

fn profile_json(h: &ConvexProfile) -> Value {
    json!({ "knots": h.knots(), "values": h.values() })
}

pub fn optimize(a: &OptimizeArgs) -> Outcome {
    positive("l", a.l)?;
    let opts = outer_opts(&a.outer)?;
    let ctx = json!({ "l": a.l, "knots": a.outer.knots, "grid": a.outer.inner.grid });
    let o = optimize_profile(a.l, &opts).map_err(|e| Failure::core(e, ctx.clone()))?;
    let ra = relaxed_area(a.l, o.f_star).map_err(|e| Failure::core(e, ctx))?;
    if let Some(out) = &a.out {
        #[derive(Serialize)]
        struct Row {
            w1: f64,
            h: f64,
        }
        let h = &o.h_nontrivial;
        write_csv(out, h.knots().iter().zip(h.values()).map(|(&w1, &h)| Row { w1, h }))?;
    }
    if let Some(out) = &a.profile_out {
        let path = out.as_path();
        serde_json::to_writer_pretty(create(path)?, &o.h_nontrivial).map_err(|e| Failure::io(e, path))?;
    }
    Ok(json!({
        "F": o.f_star,
        "branch": o.branch,
        "F_nontrivial": o.f_nontrivial,
        "relaxed_area": ra,
        "collapsed": o.collapsed,
        "h_star": profile_json(&o.h_star()),
        "h_nontrivial": profile_json(&o.h_nontrivial),
        "inner_solves": o.inner_solves,
        "accepted_steps": o.history.len(),
        "last_solve": o.last_report,
    }))
}

pub fn threshold(a: &ThresholdArgs) -> Outcome {
    positive("lo", a.lo)?;
    positive("tol-l", a.tol_l)?;
    check(a.hi > a.lo, || format!("--hi must exceed --lo, got ({}, {})", a.lo, a.hi), json!({ "lo": a.lo, "hi": a.hi }))?;
    let opts = outer_opts(&a.outer)?;
    let t = find_threshold(a.lo, a.hi, a.tol_l, &opts).map_err(|e| Failure::core(e, json!({ "lo": a.lo, "hi": a.hi })))?;
    if let Some(out) = &a.out {
        write_csv(out, &t.steps)?;
    }
    Ok(json!(t))
}

pub fn sequence(a: &SequenceArgs) -> Outcome {
    positive("l", a.l)?;
    check(a.grid >= 2, || format!("--grid must be at least 2, got {}", a.grid), json!({ "grid": a.grid }))?;
    let ctx = json!({ "l": a.l, "k": a.k });
    let p = seq::SequenceParams::standard(a.k).map_err(|e| Failure::core(e, ctx.clone()))?;
    p.check_radius(a.l).map_err(|e| Failure::core(e, ctx.clone()))?;
    let core = |e| Failure::core(e, ctx.clone());
    let n = a.grid;
    let (report, field) = match a.which {
        WhichArg::Cylinder => (
            seq::cylinder_area(p, a.l, n).map_err(core)?,
            a.out.as_ref().map(|_| seq::cylinder_sequence(p, a.l, n)).transpose().map_err(core)?,
        ),
        WhichArg::TwoDiscs => (
            seq::two_discs_area(p, a.l, n).map_err(core)?,
            a.out.as_ref().map(|_| seq::two_discs_sequence(p, a.l, n)).transpose().map_err(core)?,
        ),
        WhichArg::CatenoidFlap => (
            seq::catenoid_flap_area(p, a.l, n).map_err(core)?,
            a.out.as_ref().map(|_| seq::catenoid_flap_sequence(p, a.l, n)).transpose().map_err(core)?,
        ),
        WhichArg::Recovery => {
            let outer = OuterArgs { knots: a.knots, inner: InnerArgs { grid: a.inner_grid, tol: 1e-8 } };
            let opts = outer_opts(&outer)?;
            let o = optimize_profile(a.l, &opts).map_err(core)?;
            (
                seq::recovery_area_from(&o, p, n).map_err(core)?,
                a.out.as_ref().map(|_| seq::recovery_field(&o, p, n)).transpose().map_err(core)?,
            )
        }
    };
    if let (Some(out), Some(u)) = (&a.out, &field) {
        map_csv(out, u)?;
    }
    Ok(json!(report))
}

fn read_solid(path: &Path) -> Result<vortex_core::VoxelSolid, Failure> {
    let f = File::open(path).map_err(|e| Failure::io(e, path))?;
    sym::read_vox(BufReader::new(f)).map_err(|e| Failure::validation(format!("bad solid: {e}"), json!({ "path": path })))
}

pub fn symmetrize(a: &SymmetrizeArgs) -> Outcome {
    let mode = match a.mode {
        ModeArg::Cylindrical => sym::Mode::Cylindrical,
        ModeArg::Classical => sym::Mode::Classical,
    };
    if let Some(count) = a.random {
        check(a.n >= 2, || format!("--n must be at least 2, got {}", a.n), json!({ "n": a.n }))?;
        let report = sym::property_suite(mode, count, a.n, a.seed);
        if let Some(out) = &a.out {
            write_csv(out, &report.checks)?;
        }
        return Ok(json!(report));
    }
    let path = a.input.as_deref().expect("clap requires --in without --random");
    let u = read_solid(path)?;
    let axis = match a.axis {
        AxisArg::W1 => sym::Axis::W1,
        AxisArg::W2 => sym::Axis::W2,
        AxisArg::W3 => sym::Axis::W3,
    };
    let ctx = json!({ "path": path, "geometry": format!("{:?}", u.geometry()) });
    let s = match mode {
        sym::Mode::Cylindrical => sym::cylindrical_steiner(&u),
        sym::Mode::Classical => sym::classical_steiner(&u, axis),
    }
    .map_err(|e| Failure::core(e, ctx))?;
    if let Some(out) = &a.out {
        let mut w = create(out)?;
        sym::write_vox(&s, &mut w).and_then(|_| std::io::Write::flush(&mut w)).map_err(|e| Failure::io(e, out))?;
    }
    let (pb, pa) = (sym::voxel_perimeter(&u), sym::voxel_perimeter(&s));
    Ok(json!({
        "mode": mode,
        "axis": if matches!(mode, sym::Mode::Classical) { Some(axis) } else { None },
        "dims": u.dims(),
        "cells": u.count(),
        "volume_before": sym::voxel_volume(&u),
        "volume_after": sym::voxel_volume(&s),
        "perimeter_before": pb,
        "perimeter_after": pa,
        "face_tolerance": sym::face_tolerance(&u),
        "unchanged": s == u,
    }))
}

pub fn curve(a: &ValueCurveArgs) -> Outcome {
    check(!a.ls.is_empty(), || "--ls is empty".into(), json!({}))?;
    for &l in &a.ls {
        positive("ls", l)?;
    }
    let opts = outer_opts(&a.outer)?;
    let rows = value_curve(&a.ls, &opts);
    if let Some(out) = &a.out {
        #[derive(Serialize)]
        struct Row<'a> {
            l: f64,
            #[serde(rename = "F")]
            f: Option<f64>,
            branch: Option<&'a str>,
            relaxed_area: Option<f64>,
        }
        write_csv(
            out,
            rows.iter().map(|r| Row { l: r.l, f: r.f, branch: r.branch.map(|b| b.as_str()), relaxed_area: r.relaxed_area }),
        )?;
    }
    let failures = rows.iter().filter(|r| r.error.is_some()).count();
    Ok(json!({ "rows": rows, "failures": failures }))
}
