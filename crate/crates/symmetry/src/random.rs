use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use vortex_core::{Geometry, VoxelSolid};

use crate::measure::{face_tolerance, line_counts, voxel_perimeter, voxel_volume};
use crate::steiner::{classical_steiner, cylindrical_steiner, Axis};

/// Union of 1 to 5 random balls with a sprinkle of isolated cells (probability 0.5%), on
/// the layout of `template`. Cylindrical cells are placed by their Cartesian centre
/// `(t, ρ cos θ, ρ sin θ)`.
pub fn random_solid(template: &VoxelSolid, rng: &mut impl Rng) -> VoxelSolid {
    let cyl = template.geometry() == Geometry::Cylindrical;
    let [n0, n1, n2] = template.dims();
    let (o, c) = (template.origin(), template.cell());
    let (lo, hi): ([f64; 3], [f64; 3]) = if cyl {
        ([o[0], -1.0, -1.0], [o[0] + n0 as f64 * c[0], 1.0, 1.0])
    } else {
        (o, [o[0] + n0 as f64 * c[0], o[1] + n1 as f64 * c[1], o[2] + n2 as f64 * c[2]])
    };
    let span = (0..3).map(|k| hi[k] - lo[k]).fold(f64::INFINITY, f64::min);
    let balls: Vec<([f64; 3], f64)> = (0..rng.gen_range(1..=5))
        .map(|_| {
            let centre = std::array::from_fn(|k| rng.gen_range(lo[k]..hi[k]));
            (centre, rng.gen_range(0.08..0.3) * span)
        })
        .collect();
    let mut s = template.cleared().with_cells(|p| {
        let q = if cyl { [p[0], p[1] * p[2].cos(), p[1] * p[2].sin()] } else { p };
        balls.iter().any(|(ctr, r)| (0..3).map(|k| (q[k] - ctr[k]).powi(2)).sum::<f64>() < r * r)
    });
    for v in s.occupancy_mut() {
        if rng.gen_bool(0.005) {
            *v = !*v;
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Cylindrical,
    Classical,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolidCheck {
    pub index: usize,
    pub cells: usize,
    pub volume_before: f64,
    pub volume_after: f64,
    pub perimeter_before: f64,
    pub perimeter_after: f64,
    pub tolerance: f64,
    pub counts_preserved: bool,
    pub volume_exact: bool,
    pub perimeter_ok: bool,
    pub idempotent: bool,
    pub empty_slices_kept: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub mode: Mode,
    pub seed: u64,
    pub solids: usize,
    pub volume_exact: usize,
    pub perimeter_ok: usize,
    pub idempotent: usize,
    pub empty_slices_kept: usize,
    pub checks: Vec<SolidCheck>,
}

fn empty_slices(s: &VoxelSolid) -> Vec<bool> {
    let per = s.len() / s.dims()[0];
    s.occupancy().chunks(per).map(|c| !c.iter().any(|&b| b)).collect()
}

/// Symmetrizes `solids` random solids of size `n³` and checks volume, perimeter, idempotence
/// and empty first-axis slices. Solid `i` uses the stream `ChaCha8(seed + i)`, so the report
/// does not depend on the thread count.
pub fn property_suite(mode: Mode, solids: usize, n: usize, seed: u64) -> SuiteReport {
    let template = match mode {
        Mode::Cylindrical => VoxelSolid::cylinder(1.0, [n; 3]),
        Mode::Classical => VoxelSolid::cartesian([-1.0; 3], [2.0 / n as f64; 3], [n; 3]),
    }
    .expect("valid layout");
    let sym = |s: &VoxelSolid| match mode {
        Mode::Cylindrical => cylindrical_steiner(s),
        Mode::Classical => classical_steiner(s, Axis::W3),
    }
    .expect("matching geometry");
    let checks: Vec<SolidCheck> = (0..solids)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(index as u64));
            let u = random_solid(&template, &mut rng);
            let s = sym(&u);
            let (vb, va) = (voxel_volume(&u), voxel_volume(&s));
            let (pb, pa) = (voxel_perimeter(&u), voxel_perimeter(&s));
            let tolerance = face_tolerance(&u);
            SolidCheck {
                index,
                cells: u.count(),
                volume_before: vb,
                volume_after: va,
                perimeter_before: pb,
                perimeter_after: pa,
                tolerance,
                counts_preserved: line_counts(&u) == line_counts(&s),
                volume_exact: vb == va,
                perimeter_ok: pa <= pb + tolerance,
                idempotent: sym(&s) == s,
                empty_slices_kept: empty_slices(&u).iter().zip(empty_slices(&s)).all(|(a, b)| !a || b),
            }
        })
        .collect();
    let count = |f: fn(&SolidCheck) -> bool| checks.iter().filter(|c| f(c)).count();
    SuiteReport {
        mode,
        seed,
        solids,
        volume_exact: count(|c| c.volume_exact && c.counts_preserved),
        perimeter_ok: count(|c| c.perimeter_ok),
        idempotent: count(|c| c.idempotent),
        empty_slices_kept: count(|c| c.empty_slices_kept),
        checks,
    }
}
