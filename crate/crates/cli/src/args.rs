use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "ncrealize", version, about = "Free noncommutative series, order tests and realizations")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct GlobalArgs {
    /// Master seed for every sampling command.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Numerical tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Worker threads (falls back to NCREALIZE_THREADS).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Output path; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Expand an expression into a truncated series file.
    Expand(ExpandArgs),
    /// Extract coefficients of a function through nilpotent probes.
    Coeffs(CoeffsArgs),
    /// Randomized matrix-monotonicity test.
    CheckMonotone(CheckArgs),
    /// Randomized matrix-convexity test.
    CheckConvex(CheckArgs),
    /// Localizing-matrix or convex Gram positivity.
    Localize(LocalizeArgs),
    /// Build a monotone or butterfly realization.
    Realize(RealizeArgs),
    /// Evaluate a stored realization at a point file.
    EvalRealization(EvalArgs),
    /// Worst `min_eig(Im f(Z))` over random upper half-plane points.
    PickCheck(PickArgs),
    /// Recover a discrete measure from one-letter Taylor coefficients.
    FitMeasure(FitArgs),
    /// Continuation radius from homogeneous sup-norm bounds.
    WedgeRadius(WedgeArgs),
    /// Empirical interpolation constants over random sets.
    EstimateWedgeConstants(LagrangeArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ExpandArgs {
    #[arg(long)]
    pub expr: String,
    #[arg(long)]
    pub letters: usize,
    #[arg(long)]
    pub degree: usize,
}

/// Where the function under test comes from; exactly one source.
#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct FunctionArgs {
    #[arg(long)]
    pub expr: Option<String>,
    #[arg(long)]
    pub series: Option<String>,
    /// sqrt1p, log1p, geom, exp, power:p, schur, geomean, nevanlinna:FILE, kraus:FILE.
    #[arg(long)]
    pub function: Option<String>,
    /// Letter count for --expr (defaults to the largest variable used).
    #[arg(long)]
    pub letters: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct CoeffsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: FunctionArgs,
    #[arg(long)]
    pub degree: usize,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct CheckArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: FunctionArgs,
    #[arg(long, default_value = "ball:0.9")]
    pub domain: String,
    #[arg(long, default_value = "1..3")]
    pub levels: String,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Report path (same as --out).
    #[arg(long)]
    #[serde(skip)]
    pub report: Option<String>,
    /// Re-validate the witness of a stored report.
    #[arg(long)]
    #[serde(skip)]
    pub recheck: Option<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RealKind {
    Monotone,
    Butterfly,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct LocalizeArgs {
    #[arg(long)]
    pub series: String,
    #[arg(long, value_enum, default_value = "monotone")]
    pub kind: RealKind,
    #[arg(long)]
    pub basis_degree: usize,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct RealizeArgs {
    #[arg(long)]
    pub series: String,
    #[arg(long, value_enum)]
    pub kind: RealKind,
    #[arg(long)]
    pub basis_degree: usize,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub realization: String,
    #[arg(long)]
    pub point: String,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct PickArgs {
    #[arg(long)]
    pub realization: String,
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    #[arg(long, default_value_t = 3)]
    pub max_level: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureForm {
    Nevanlinna,
    Kraus,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct FitArgs {
    #[arg(long)]
    pub series: String,
    #[arg(long)]
    pub atoms: usize,
    #[arg(long, value_enum, default_value = "nevanlinna")]
    pub form: MeasureForm,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct WedgeArgs {
    #[arg(long)]
    pub series: String,
    #[arg(long, default_value_t = 1.0)]
    pub target: f64,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Matrix sizes used for the sup-norm estimates.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub sizes: Vec<usize>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct LagrangeArgs {
    #[arg(long)]
    pub vars: usize,
    #[arg(long)]
    pub measure: f64,
    #[arg(long)]
    pub dmax: usize,
    #[arg(long)]
    pub trials: usize,
}
