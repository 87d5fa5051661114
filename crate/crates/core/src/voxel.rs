use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    /// Axes `(t, ρ, θ)` over `C_l = (-1, l) × B₁`; `θ ∈ (-π, π)` with periodic wrap.
    Cylindrical,
    /// Axes `(w₁, w₂, w₃)` over an axis-aligned box.
    Cartesian,
}

/// Binary occupancy on a tensor grid of cells. Cell `(a, b, c)` is stored at
/// `(a * dims[1] + b) * dims[2] + c`, so the last axis (`θ` for cylinders) is fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelSolid {
    geometry: Geometry,
    dims: [usize; 3],
    origin: [f64; 3],
    cell: [f64; 3],
    occ: Vec<bool>,
}

impl VoxelSolid {
    /// Empty solid with the given layout. Cylindrical layouts must start at `ρ = 0` and cover a
    /// full turn in `θ`.
    pub fn empty(geometry: Geometry, dims: [usize; 3], origin: [f64; 3], cell: [f64; 3]) -> Result<Self> {
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidRange(format!("dimensions must be positive, got {dims:?}")));
        }
        if cell.iter().any(|&c| !(c > 0.0 && c.is_finite())) || origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidRange(format!("bad cell sizes {cell:?} or origin {origin:?}")));
        }
        if geometry == Geometry::Cylindrical {
            if origin[1] != 0.0 {
                return Err(Error::InvalidRange(format!("radial origin must be 0, got {}", origin[1])));
            }
            if (dims[2] as f64 * cell[2] - TAU).abs() > 1e-12 {
                return Err(Error::InvalidRange("angular cells must cover exactly 2π".into()));
            }
        }
        let n = dims[0] * dims[1] * dims[2];
        Ok(VoxelSolid { geometry, dims, origin, cell, occ: vec![false; n] })
    }

    /// Empty solid on `C_l` with `dims = (n_t, n_ρ, n_θ)`.
    pub fn cylinder(l: f64, dims: [usize; 3]) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidRange(format!("l must be positive, got {l}")));
        }
        let [nt, nr, na] = dims;
        let cell = [(1.0 + l) / nt as f64, 1.0 / nr as f64, TAU / na as f64];
        VoxelSolid::empty(Geometry::Cylindrical, dims, [-1.0, 0.0, -PI], cell)
    }

    pub fn cartesian(origin: [f64; 3], cell: [f64; 3], dims: [usize; 3]) -> Result<Self> {
        VoxelSolid::empty(Geometry::Cartesian, dims, origin, cell)
    }

    /// Fills every cell whose centre satisfies `f`.
    pub fn with_cells(mut self, f: impl Fn([f64; 3]) -> bool) -> Self {
        for a in 0..self.dims[0] {
            for b in 0..self.dims[1] {
                for c in 0..self.dims[2] {
                    let k = self.index(a, b, c);
                    self.occ[k] = f(self.centre(a, b, c));
                }
            }
        }
        self
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    pub fn cell(&self) -> [f64; 3] {
        self.cell
    }

    pub fn len(&self) -> usize {
        self.occ.len()
    }

    pub fn is_empty(&self) -> bool {
        !self.occ.iter().any(|&b| b)
    }

    #[inline]
    pub fn index(&self, a: usize, b: usize, c: usize) -> usize {
        (a * self.dims[1] + b) * self.dims[2] + c
    }

    pub fn centre(&self, a: usize, b: usize, c: usize) -> [f64; 3] {
        let p = [a, b, c];
        std::array::from_fn(|k| self.origin[k] + (p[k] as f64 + 0.5) * self.cell[k])
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> bool {
        self.occ[self.index(a, b, c)]
    }

    pub fn set(&mut self, a: usize, b: usize, c: usize, v: bool) {
        let k = self.index(a, b, c);
        self.occ[k] = v;
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occ
    }

    pub fn occupancy_mut(&mut self) -> &mut [bool] {
        &mut self.occ
    }

    pub fn count(&self) -> usize {
        self.occ.iter().filter(|&&b| b).count()
    }

    /// Same layout, no occupied cells.
    pub fn cleared(&self) -> Self {
        VoxelSolid { occ: vec![false; self.occ.len()], ..self.clone() }
    }

    /// Inner and outer radius of radial cell `b` (cylindrical layouts).
    pub fn radii(&self, b: usize) -> (f64, f64) {
        (b as f64 * self.cell[1], (b + 1) as f64 * self.cell[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_checks() {
        assert!(VoxelSolid::cylinder(1.0, [4, 4, 0]).is_err());
        assert!(VoxelSolid::cylinder(-1.0, [4, 4, 4]).is_err());
        assert!(VoxelSolid::empty(Geometry::Cylindrical, [2, 2, 4], [0.0, 0.1, 0.0], [1.0, 1.0, PI / 2.0]).is_err());
        assert!(VoxelSolid::empty(Geometry::Cylindrical, [2, 2, 4], [0.0, 0.0, 0.0], [1.0, 1.0, 1.0]).is_err());
        let s = VoxelSolid::cylinder(1.0, [4, 8, 16]).unwrap();
        assert_eq!(s.len(), 4 * 8 * 16);
        assert!(s.is_empty());
        let c = s.centre(0, 0, 8);
        assert!((c[0] + 0.75).abs() < 1e-15 && (c[1] - 1.0 / 16.0).abs() < 1e-15);
        assert!((c[2] - PI / 16.0).abs() < 1e-15);
    }

    #[test]
    fn fill_by_predicate() {
        let s = VoxelSolid::cartesian([0.0; 3], [1.0; 3], [3, 3, 3]).unwrap().with_cells(|p| p[2] < 1.0);
        assert_eq!(s.count(), 9);
        assert!(s.get(2, 1, 0) && !s.get(2, 1, 1));
    }
}
