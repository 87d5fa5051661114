use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use vortex_core::{Error, Geometry, Result, VoxelSolid};

/// Start index of a run of `m` cells centred in a line of `n` cells. When the centre falls
/// between cells the extra half cell goes to the positive side.
pub fn centred_start(n: usize, m: usize) -> usize {
    debug_assert!(m <= n);
    (n - m).div_ceil(2)
}

fn require(solid: &VoxelSolid, g: Geometry) -> Result<()> {
    if solid.geometry() == g {
        Ok(())
    } else {
        Err(Error::InvalidRange(format!("expected a {g:?} solid, got {:?}", solid.geometry())))
    }
}

/// Occupied angular measure of the shell `(t_index, rho_index)`, in radians.
pub fn shell_angle(solid: &VoxelSolid, t_index: usize, rho_index: usize) -> Result<f64> {
    require(solid, Geometry::Cylindrical)?;
    let [nt, nr, na] = solid.dims();
    if t_index >= nt || rho_index >= nr {
        return Err(Error::IndexOutOfRange(format!("shell ({t_index}, {rho_index}) outside {nt} x {nr}")));
    }
    let count = (0..na).filter(|&c| solid.get(t_index, rho_index, c)).count();
    Ok(if count == na { TAU } else { count as f64 * solid.cell()[2] })
}

/// Rearranges every line along the last axis into a run of the same length centred on the
/// middle of that axis.
fn centre_lines(solid: &VoxelSolid) -> VoxelSolid {
    let n = solid.dims()[2];
    let mut out = solid.cleared();
    out.occupancy_mut().par_chunks_mut(n).zip(solid.occupancy().par_chunks(n)).for_each(|(dst, src)| {
        let m = src.iter().filter(|&&b| b).count();
        let s = centred_start(n, m);
        dst[s..s + m].fill(true);
    });
    out
}

/// Cylindrical Steiner symmetrization: each `(t, ρ)` shell becomes one arc centred at `θ = 0`
/// with the same number of cells.
pub fn cylindrical_steiner(solid: &VoxelSolid) -> Result<VoxelSolid> {
    require(solid, Geometry::Cylindrical)?;
    // θ cells span (-π, π), so the middle of the axis is θ = 0
    Ok(centre_lines(solid))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    W1,
    W2,
    W3,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::W1 => 0,
            Axis::W2 => 1,
            Axis::W3 => 2,
        }
    }
}

/// Copy of a Cartesian solid with `axis` moved to the last position; returns the
/// permutation used.
fn to_last(solid: &VoxelSolid, axis: usize) -> (VoxelSolid, [usize; 3]) {
    let perm = match axis {
        0 => [1, 2, 0],
        1 => [0, 2, 1],
        _ => [0, 1, 2],
    };
    let (d, o, c) = (solid.dims(), solid.origin(), solid.cell());
    let mut out = VoxelSolid::cartesian(perm.map(|k| o[k]), perm.map(|k| c[k]), perm.map(|k| d[k])).expect("same layout");
    for a in 0..d[0] {
        for b in 0..d[1] {
            for e in 0..d[2] {
                if solid.get(a, b, e) {
                    let p = [a, b, e];
                    out.set(p[perm[0]], p[perm[1]], p[perm[2]], true);
                }
            }
        }
    }
    (out, perm)
}

fn from_last(perm_solid: &VoxelSolid, perm: [usize; 3], like: &VoxelSolid) -> VoxelSolid {
    let mut out = like.cleared();
    let d = perm_solid.dims();
    for a in 0..d[0] {
        for b in 0..d[1] {
            for e in 0..d[2] {
                if perm_solid.get(a, b, e) {
                    let q = [a, b, e];
                    let mut p = [0; 3];
                    for k in 0..3 {
                        p[perm[k]] = q[k];
                    }
                    out.set(p[0], p[1], p[2], true);
                }
            }
        }
    }
    out
}

/// Classical Steiner symmetrization about the mid-plane of the box along `axis`: every
/// column keeps its cell count and becomes one centred run.
pub fn classical_steiner(solid: &VoxelSolid, axis: Axis) -> Result<VoxelSolid> {
    require(solid, Geometry::Cartesian)?;
    if axis == Axis::W3 {
        return Ok(centre_lines(solid));
    }
    let (p, perm) = to_last(solid, axis.index());
    Ok(from_last(&centre_lines(&p), perm, solid))
}

/// Half the occupied length of each column along the symmetrization axis, on the grid of the
/// two remaining axes (in their original order, the later one fastest).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfThickness {
    pub dims: [usize; 2],
    pub values: Vec<f64>,
}

impl HalfThickness {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.dims[1] + j]
    }
}

pub fn half_thickness(solid: &VoxelSolid, axis: Axis) -> Result<HalfThickness> {
    require(solid, Geometry::Cartesian)?;
    let ax = axis.index();
    let p = if ax == 2 { solid.clone() } else { to_last(solid, ax).0 };
    let d = p.dims();
    let h = solid.cell()[ax];
    let values = p.occupancy().chunks(d[2]).map(|col| 0.5 * h * col.iter().filter(|&&b| b).count() as f64).collect();
    Ok(HalfThickness { dims: [d[0], d[1]], values })
}
