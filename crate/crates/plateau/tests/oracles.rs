use std::time::Instant;

use vortex_core::{CatenoidProfile, MappedChart};
use vortex_plateau::{solve_dirichlet, SolveOptions};

fn scherk(x: f64, y: f64) -> f64 {
    (x.cos() / y.cos()).ln()
}

fn scherk_error(n: usize) -> f64 {
    let c = MappedChart::rect(-1.2, 1.2, -1.2, 1.2, n - 1, n - 1).unwrap();
    let t = Instant::now();
    let (f, rep) = solve_dirichlet(&c, scherk, &SolveOptions::default()).unwrap();
    let err = f.rows().iter().map(|[x, y, v]| (v - scherk(*x, *y)).abs()).fold(0.0, f64::max);
    eprintln!("scherk n={n}: err {err:.3e}, iters {}, {:?}", rep.iterations, t.elapsed());
    err
}

#[test]
fn scherk_second_order() {
    let e65 = scherk_error(65);
    let e129 = scherk_error(129);
    assert!(e129 <= 5e-3);
    let ratio = e65 / e129;
    assert!((3.2..=4.8).contains(&ratio), "ratio {ratio}");
}

#[test]
fn half_catenoid_inset() {
    let cat = CatenoidProfile::new(0.4).unwrap();
    let n = 129;
    let w1: Vec<f64> = (0..n).map(|i| 0.8 * i as f64 / (n - 1) as f64).collect();
    let c = MappedChart::from_bounds(w1, n - 1, |t| -0.9 * cat.rho_bar(t), |t| 0.9 * cat.rho_bar(t)).unwrap();
    let exact = |t: f64, y: f64| (cat.rho_bar(t).powi(2) - y * y).max(0.0).sqrt();
    let (f, _) = solve_dirichlet(&c, exact, &SolveOptions::default()).unwrap();
    let err = f.rows().iter().map(|[x, y, v]| (v - exact(*x, *y)).abs()).fold(0.0, f64::max);
    eprintln!("catenoid err {err:.3e}");
    assert!(err <= 1e-2);
}
