//! Cylindrical and classical Steiner symmetrization of voxel solids.

pub mod measure;
pub mod random;
pub mod steiner;
pub mod vox;

pub use measure::{face_tolerance, line_counts, voxel_perimeter, voxel_volume};
pub use random::{property_suite, random_solid, Mode, SuiteReport};
pub use steiner::{classical_steiner, cylindrical_steiner, half_thickness, shell_angle, Axis, HalfThickness};
pub use vox::{read_vox, write_vox};
