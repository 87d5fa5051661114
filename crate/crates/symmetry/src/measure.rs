use vortex_core::{Geometry, VoxelSolid};

/// Occupied cell counts per `(t, ρ)` shell (cylinders) or per column along the last axis.
pub fn line_counts(solid: &VoxelSolid) -> Vec<usize> {
    let n = solid.dims()[2];
    solid.occupancy().chunks(n).map(|c| c.iter().filter(|&&b| b).count()).collect()
}

/// Volume of a cylindrical cell in radial layer `b`: `ρ_c Δρ Δθ Δt`.
fn cyl_cell_volume(solid: &VoxelSolid, b: usize) -> f64 {
    let [dt, _, da] = solid.cell();
    let (r0, r1) = solid.radii(b);
    0.5 * (r1 * r1 - r0 * r0) * da * dt
}

/// Sum of occupied cell measures. Lines are accumulated in a fixed order from their counts,
/// so solids with equal line counts have bit-identical volumes.
pub fn voxel_volume(solid: &VoxelSolid) -> f64 {
    let counts = line_counts(solid);
    match solid.geometry() {
        Geometry::Cartesian => {
            let [a, b, c] = solid.cell();
            counts.iter().sum::<usize>() as f64 * a * b * c
        }
        Geometry::Cylindrical => {
            let nr = solid.dims()[1];
            (0..nr)
                .map(|b| {
                    let n: usize = counts.iter().skip(b).step_by(nr).sum();
                    n as f64 * cyl_cell_volume(solid, b)
                })
                .sum()
        }
    }
}

/// Area of the faces between occupied cells and empty cells or the outside of the box.
/// Cylindrical faces: `ρ_c Δρ Δθ` across `t`, `ρ Δθ Δt` across `ρ` (zero on the axis) and
/// `Δρ Δt` across `θ`, which wraps around.
pub fn voxel_perimeter(solid: &VoxelSolid) -> f64 {
    let [n0, n1, n2] = solid.dims();
    let occ = |a: isize, b: isize, c: isize| -> bool {
        a >= 0 && b >= 0 && c >= 0 && (a as usize) < n0 && (b as usize) < n1 && (c as usize) < n2 && solid.get(a as usize, b as usize, c as usize)
    };
    let cyl = solid.geometry() == Geometry::Cylindrical;
    let [d0, d1, d2] = solid.cell();
    let mut total = 0.0;
    for b in 0..n1 {
        let (r0, r1) = solid.radii(b);
        // face areas normal to each axis, and the radial faces at r0 and r1
        let (f0, f1_in, f1_out, f2) = if cyl {
            (0.5 * (r1 * r1 - r0 * r0) * d2, r0 * d2 * d0, r1 * d2 * d0, d1 * d0)
        } else {
            (d1 * d2, d0 * d2, d0 * d2, d0 * d1)
        };
        let mut layer = 0.0;
        for a in 0..n0 {
            for c in 0..n2 {
                if !solid.get(a, b, c) {
                    continue;
                }
                let (ai, bi, ci) = (a as isize, b as isize, c as isize);
                let mut s = 0.0;
                s += f0 * (!occ(ai - 1, bi, ci) as u8 + !occ(ai + 1, bi, ci) as u8) as f64;
                s += f1_in * (!occ(ai, bi - 1, ci) as u8) as f64;
                s += f1_out * (!occ(ai, bi + 1, ci) as u8) as f64;
                if cyl {
                    if n2 > 1 {
                        let prev = solid.get(a, b, (c + n2 - 1) % n2);
                        let next = solid.get(a, b, (c + 1) % n2);
                        s += f2 * (!prev as u8 + !next as u8) as f64;
                    }
                } else {
                    s += f2 * (!occ(ai, bi, ci - 1) as u8 + !occ(ai, bi, ci + 1) as u8) as f64;
                }
                layer += s;
            }
        }
        total += layer;
    }
    total
}

/// Slack for the perimeter comparison: one largest face per non-empty line.
pub fn face_tolerance(solid: &VoxelSolid) -> f64 {
    let [_, n1, _] = solid.dims();
    let [d0, d1, d2] = solid.cell();
    let counts = line_counts(solid);
    counts
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0)
        .map(|(k, _)| {
            if solid.geometry() == Geometry::Cylindrical {
                let (r0, r1) = solid.radii(k % n1);
                (0.5 * (r1 * r1 - r0 * r0) * d2).max(r1 * d2 * d0).max(d1 * d0)
            } else {
                (d1 * d2).max(d0 * d2).max(d0 * d1)
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn unit_cube() {
        let mut s = VoxelSolid::cartesian([0.0; 3], [1.0; 3], [1, 1, 1]).unwrap();
        assert_eq!((voxel_volume(&s), voxel_perimeter(&s)), (0.0, 0.0));
        s.set(0, 0, 0, true);
        assert_eq!(voxel_volume(&s), 1.0);
        assert_eq!(voxel_perimeter(&s), 6.0);
    }

    #[test]
    fn two_cubes_share_a_face() {
        let s = VoxelSolid::cartesian([0.0; 3], [0.5, 1.0, 2.0], [2, 1, 1]).unwrap().with_cells(|_| true);
        assert_eq!(voxel_volume(&s), 2.0);
        // the surface of a 1 x 1 x 2 box
        assert_eq!(voxel_perimeter(&s), 10.0);
    }

    #[test]
    fn full_cylinder_measures() {
        let l = 1.0;
        let h = 1.0 + l;
        let s = VoxelSolid::cylinder(l, [8, 16, 32]).unwrap().with_cells(|_| true);
        assert!((voxel_volume(&s) - PI * h).abs() < 1e-12);
        // two end discs and the lateral surface
        assert!((voxel_perimeter(&s) - (2.0 * PI + 2.0 * PI * h)).abs() < 1e-12);
    }

    #[test]
    fn axis_cylinder_at_64() {
        let l = 1.0;
        let s = VoxelSolid::cylinder(l, [64, 64, 64]).unwrap().with_cells(|p| p[1] <= 0.5);
        let exact = PI * (1.0 + l) / 4.0;
        assert!((voxel_volume(&s) / exact - 1.0).abs() < 0.02);
    }

    #[test]
    fn half_shell_has_two_radial_faces() {
        let s = VoxelSolid::cylinder(1.0, [1, 1, 8]).unwrap().with_cells(|p| p[2] > 0.0);
        let dt = 2.0;
        // t faces: two half discs of area π/2 each; outer arc π·1·Δt; two flat θ faces 1·Δt
        assert!((voxel_perimeter(&s) - (PI + PI * dt + 2.0 * dt)).abs() < 1e-12);
    }
}
