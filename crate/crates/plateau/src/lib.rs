//! Minimal graphs over the subgraph of a convex profile, and the outer search over profiles.

pub mod solver;

pub use solver::{
    mean_curvature_residual, regularize_boundary, solve_dirichlet, solve_minimal_graph, Discretization,
    SolveOptions, SolveReport, Walls,
};
pub mod optimizer;

pub use optimizer::{
    find_threshold, initial_profile, optimize_profile, optimize_profile_from, value_curve, Branch, CurveRow,
    OptimizeOptions, Optimum, ProfileProblem, Threshold,
};
