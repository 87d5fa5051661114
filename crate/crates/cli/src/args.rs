use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "vortex-area", version, about = "Relaxed area of the vortex map on a disc")]
pub struct Cli {
    /// Worker threads (0: one per core). VORTEX_THREADS takes precedence.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Closed-form and discrete area functionals.
    Area(AreaArgs),
    /// Minimal graph over the subgraph of a given profile.
    Solve(SolveArgs),
    /// Minimize over convex profiles at one radius.
    Optimize(OptimizeArgs),
    /// Bisection for the radius where the two branches exchange.
    Threshold(ThresholdArgs),
    /// Graph area of an explicit approximating sequence.
    Sequence(SequenceArgs),
    /// Steiner symmetrization of a voxel solid, or the seeded random property suite.
    Symmetrize(SymmetrizeArgs),
    /// Optimal value and relaxed area over a list of radii.
    ValueCurve(ValueCurveArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum Functional {
    #[value(name = "vortex")]
    #[serde(rename = "vortex")]
    Vortex,
    #[value(name = "F2l")]
    F2l,
    #[value(name = "Fl")]
    Fl,
}

/// Inner solver settings shared by the commands that solve for `ψ`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct InnerArgs {
    /// Nodes per side of the grid on the rectangle (odd).
    #[arg(long, default_value_t = 129)]
    pub grid: usize,
    /// Max-norm tolerance on the mean-curvature residual.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct AreaArgs {
    #[arg(long, value_enum, default_value = "vortex")]
    pub functional: Functional,
    #[arg(long)]
    pub l: f64,
    /// Inner radius of the annulus (vortex functional only).
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    /// Profile JSON (`knots`, `values`); `F2l`/`Fl` solve for `ψ` over it. Without a file
    /// they evaluate the cylinder competitor `h ≡ 1`, `ψ = √(1 - w₂²)`.
    #[arg(long)]
    pub h_file: Option<PathBuf>,
    #[command(flatten)]
    pub inner: InnerArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct SolveArgs {
    #[arg(long)]
    pub l: f64,
    #[arg(long)]
    pub h_file: PathBuf,
    #[command(flatten)]
    pub inner: InnerArgs,
    /// CSV of `ψ` (`w1,w2,value` per node).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OuterArgs {
    /// Knots of the profile on `[0, 2l]` (odd, at least 5).
    #[arg(long, default_value_t = 17)]
    pub knots: usize,
    #[command(flatten)]
    pub inner: InnerArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub l: f64,
    #[command(flatten)]
    pub outer: OuterArgs,
    /// CSV of the optimal nontrivial profile (`w1,h`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON of the optimal nontrivial profile, readable by `solve --h-file`.
    #[arg(long)]
    pub profile_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct ThresholdArgs {
    #[arg(long, default_value_t = 0.5)]
    pub lo: f64,
    #[arg(long, default_value_t = 1.5)]
    pub hi: f64,
    #[arg(long, default_value_t = 0.01)]
    pub tol_l: f64,
    #[command(flatten)]
    pub outer: OuterArgs,
    /// CSV of the bisection steps (`l,gap,F`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WhichArg {
    Cylinder,
    TwoDiscs,
    CatenoidFlap,
    Recovery,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct SequenceArgs {
    #[arg(long, value_enum)]
    pub which: WhichArg,
    #[arg(long)]
    pub l: f64,
    #[arg(long, default_value_t = 64)]
    pub k: u32,
    /// Polar cells per piece between consecutive breaks of the map.
    #[arg(long, default_value_t = 128)]
    pub grid: usize,
    /// Profile knots for the recovery optimizer.
    #[arg(long, default_value_t = 17)]
    pub knots: usize,
    /// Inner grid for the recovery optimizer.
    #[arg(long, default_value_t = 129)]
    pub inner_grid: usize,
    /// CSV dump of the sampled map (`r,theta,u1,u2`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Cylindrical,
    Classical,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxisArg {
    W1,
    W2,
    W3,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct SymmetrizeArgs {
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    /// Axis of classical symmetrization.
    #[arg(long, value_enum, default_value = "w3")]
    pub axis: AxisArg,
    #[arg(long = "in", required_unless_present = "random")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run the property suite on this many random solids instead of reading a file.
    #[arg(long, conflicts_with = "input")]
    pub random: Option<usize>,
    /// Cells per side of the random solids.
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct ValueCurveArgs {
    /// Radii, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.8,1,1.5,2")]
    pub ls: Vec<f64>,
    #[command(flatten)]
    pub outer: OuterArgs,
    /// CSV with header `l,F,branch,relaxed_area`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
