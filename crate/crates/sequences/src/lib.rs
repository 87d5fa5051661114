//! Explicit approximating sequences for the vortex map and the polar quadrature of their
//! graph areas.

pub mod maps;
pub mod params;
pub mod recovery;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use vortex_core::{map_graph_area_polar, vortex_graph_area, CatenoidProfile, PolarMapField, ProblemParams, Result};
use vortex_plateau::{optimize_profile, Branch, OptimizeOptions, Optimum};

pub use maps::{sample, CatenoidFlapMap, CylinderMap, PolarMap, TwoDiscsMap};
pub use params::{SequenceParams, DEFAULT_KS};
pub use recovery::RecoveryMap;

/// Cells per piece of the graded polar grids.
pub const DEFAULT_CELLS: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Which {
    Cylinder,
    TwoDiscs,
    CatenoidFlap,
    Recovery,
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceReport {
    pub which: Which,
    pub l: f64,
    pub params: SequenceParams,
    pub cells_per_piece: usize,
    pub samples: usize,
    pub area: f64,
    pub limit_prediction: f64,
    /// `(area - limit) / limit`.
    pub relative_gap: f64,
    /// Catenoid-flap only: vortex term plus the area swept by the image slices for
    /// `t ∈ (0, l)`, i.e. half the catenoid and one copy of the flap over `[0, 2l]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub swept_surface_limit: Option<f64>,
    /// Recovery only: branch of the optimum the map was built from.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
}

fn vortex(l: f64) -> Result<f64> {
    vortex_graph_area(&ProblemParams::new(l, 0.0)?)
}

fn report(which: Which, l: f64, p: SequenceParams, n: usize, field: &PolarMapField, limit: f64) -> Result<SequenceReport> {
    let area = map_graph_area_polar(field)?;
    Ok(SequenceReport {
        which,
        l,
        params: p,
        cells_per_piece: n,
        samples: field.values.len(),
        area,
        limit_prediction: limit,
        relative_gap: (area - limit) / limit,
        swept_surface_limit: None,
        branch: None,
    })
}

pub fn cylinder_sequence(p: SequenceParams, l: f64, n: usize) -> Result<PolarMapField> {
    Ok(sample(&CylinderMap::new(p, l)?, n))
}

pub fn two_discs_sequence(p: SequenceParams, l: f64, n: usize) -> Result<PolarMapField> {
    Ok(sample(&TwoDiscsMap::new(p.k, l)?, n))
}

pub fn catenoid_flap_sequence(p: SequenceParams, l: f64, n: usize) -> Result<PolarMapField> {
    Ok(sample(&CatenoidFlapMap::new(p, l)?, n))
}

pub fn cylinder_area(p: SequenceParams, l: f64, n: usize) -> Result<SequenceReport> {
    let f = cylinder_sequence(p, l, n)?;
    report(Which::Cylinder, l, p, n, &f, vortex(l)? + 2.0 * PI * l)
}

pub fn two_discs_area(p: SequenceParams, l: f64, n: usize) -> Result<SequenceReport> {
    let f = two_discs_sequence(p, l, n)?;
    report(Which::TwoDiscs, l, p, n, &f, vortex(l)? + PI)
}

pub fn catenoid_flap_area(p: SequenceParams, l: f64, n: usize) -> Result<SequenceReport> {
    let f = catenoid_flap_sequence(p, l, n)?;
    let c = CatenoidProfile::new(l)?;
    let v = vortex(l)?;
    let mut r = report(Which::CatenoidFlap, l, p, n, &f, v + c.catenoid_area() + 2.0 * c.flap_area())?;
    r.swept_surface_limit = Some(v + 0.5 * c.catenoid_area() + c.flap_area());
    Ok(r)
}

/// Samples the recovery map of an optimizer result; on the two-discs branch the map is the
/// radial ramp.
pub fn recovery_field(opt: &Optimum, p: SequenceParams, n: usize) -> Result<PolarMapField> {
    Ok(match opt.branch {
        Branch::CatenoidType => {
            let map = RecoveryMap::new(p, opt.l, opt.h_nontrivial.clone(), opt.psi_nontrivial.clone())?;
            sample(&map, n)
        }
        Branch::TwoDiscs => sample(&TwoDiscsMap::new(p.k, opt.l)?, n),
    })
}

/// Area of [`recovery_field`]; the limit is the relaxed area `vortex + F_star`.
pub fn recovery_area_from(opt: &Optimum, p: SequenceParams, n: usize) -> Result<SequenceReport> {
    let field = recovery_field(opt, p, n)?;
    let mut r = report(Which::Recovery, opt.l, p, n, &field, vortex(opt.l)? + opt.f_star)?;
    r.branch = Some(opt.branch);
    Ok(r)
}

/// Optimizes at `l`, then integrates the recovery map at index `k` with the standard scales.
pub fn recovery_sequence_area(l: f64, k: u32, n: usize, opts: &OptimizeOptions) -> Result<SequenceReport> {
    let p = SequenceParams::standard(k)?;
    p.check_radius(l)?;
    let opt = optimize_profile(l, opts)?;
    recovery_area_from(&opt, p, n)
}

/// Area reports for each `k` with the standard scales (the optimum is computed once for the
/// recovery maps).
pub fn k_sweep(which: Which, l: f64, ks: &[u32], n: usize, opts: &OptimizeOptions) -> Result<Vec<SequenceReport>> {
    let opt = match which {
        Which::Recovery => Some(optimize_profile(l, opts)?),
        _ => None,
    };
    ks.par_iter()
        .map(|&k| {
            let p = SequenceParams::standard(k)?;
            match which {
                Which::Cylinder => cylinder_area(p, l, n),
                Which::TwoDiscs => two_discs_area(p, l, n),
                Which::CatenoidFlap => catenoid_flap_area(p, l, n),
                Which::Recovery => recovery_area_from(opt.as_ref().expect("optimized"), p, n),
            }
        })
        .collect()
}
