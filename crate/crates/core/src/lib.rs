//! Domain types and area functionals for the relaxed area of the vortex map `x/|x|`.

pub mod area;
pub mod catenoid;
pub mod chart;
pub mod error;
pub mod model;
pub mod polar;
pub mod profile;
pub mod voxel;

pub use area::{
    functional_f2l, functional_fl, relaxed_area, scalar_graph_area, vortex_graph_area,
    vortex_graph_area_quadrature,
};
pub use catenoid::CatenoidProfile;
pub use chart::{MappedChart, ScalarField};
pub use error::{Error, Result};
pub use model::{BoundaryTrace, ProblemParams, RectDomain};
pub use polar::{map_graph_area_polar, PolarMapField};
pub use profile::{project_convex_symmetric, ConvexProfile};
pub use voxel::{Geometry, VoxelSolid};
