use std::f64::consts::PI;
use std::time::Instant;

use vortex_core::{
    functional_f2l, map_graph_area_polar, vortex_graph_area, vortex_graph_area_quadrature, BoundaryTrace,
    ConvexProfile, MappedChart, PolarMapField, ProblemParams, RectDomain, ScalarField,
};

fn cylinder_competitor(l: f64, n: usize) -> f64 {
    let h = ConvexProfile::constant(l, 5, 1.0).unwrap();
    let chart = MappedChart::from_profile(&h, &RectDomain::with_nodes(l, n).unwrap()).unwrap();
    let psi = ScalarField::from_fn(chart, |_, y| BoundaryTrace::phi_hat(y));
    functional_f2l(&h, Some(&psi), &BoundaryTrace::exact()).unwrap()
}

#[test]
fn cylinder_lateral_area() {
    for l in [0.25, 0.5, 1.0] {
        let t = Instant::now();
        let f = cylinder_competitor(l, 513);
        let exact = 2.0 * PI * l;
        assert!(((f - exact) / exact).abs() < 1e-3, "l = {l}: {f} vs {exact}");
        eprintln!("l = {l}: {f:.8} ({:?})", t.elapsed());
    }
}

#[test]
fn vortex_quadrature_matches_closed_form() {
    for l in [0.5, 1.0, 2.0] {
        let p = ProblemParams::new(l, 0.0).unwrap();
        let exact = PI * (l * (1.0 + l * l).sqrt() + l.asinh());
        assert!((vortex_graph_area(&p).unwrap() - exact).abs() < 1e-13);
        let q = vortex_graph_area_quadrature(&p, 1e-12).unwrap();
        assert!(((q - exact) / exact).abs() < 1e-6);
    }
    let p = ProblemParams::new(2.0, 1.0).unwrap();
    let v1 = vortex_graph_area(&ProblemParams::new(1.0, 0.0).unwrap()).unwrap();
    let v2 = vortex_graph_area(&ProblemParams::new(2.0, 0.0).unwrap()).unwrap();
    assert!((vortex_graph_area(&p).unwrap() - (v2 - v1)).abs() < 1e-12);
}

#[test]
fn vortex_annulus_by_polar_quadrature() {
    let n = 512;
    let r: Vec<f64> = (0..=n).map(|i| 0.5 + 0.5 * i as f64 / n as f64).collect();
    let theta: Vec<f64> = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
    let u = PolarMapField::sample(r, theta, |_, t| [t.cos(), t.sin()]);
    let a = map_graph_area_polar(&u).unwrap();
    let exact = vortex_graph_area(&ProblemParams::new(1.0, 0.5).unwrap()).unwrap();
    assert!((a - exact).abs() < 1e-3, "{a} vs {exact}");
}
