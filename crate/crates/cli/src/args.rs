use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "diamond-forests",
    version,
    about = "Diamond-product forest expansions, exact model evaluators, a convolution Riccati solver and a Monte Carlo oracle"
)]
pub struct Cli {
    /// `key = value` file supplying defaults for the subcommand's flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Forests of the 𝕂, 𝔾 or SPX-𝔾 expansion with exact coefficients.
    #[command(args_override_self = true)]
    Expand(ExpandArgs),
    /// Lévy area cumulant series against −log cos T.
    #[command(args_override_self = true)]
    Levy(LevyArgs),
    /// Cameron–Martin series for log E exp(−λ∫₀¹B²) against the closed form.
    #[command(name = "cameron-martin", args_override_self = true)]
    CameronMartin(CameronMartinArgs),
    /// Squared Bessel Laplace functional: ψ-series against the closed form.
    #[command(args_override_self = true)]
    Bessel(BesselArgs),
    /// Cumulants of a second-chaos variable with kernel read from CSV.
    #[command(args_override_self = true)]
    Chaos2(Chaos2Args),
    /// Diamond product of two iterated Brownian integrals.
    #[command(args_override_self = true)]
    Signature(SignatureArgs),
    /// Convolution Riccati solve and joint MGF for affine forward variance.
    #[command(args_override_self = true)]
    Riccati(RiccatiArgs),
    /// Monte Carlo simulation and cumulant estimates.
    #[command(args_override_self = true)]
    Mc(McArgs),
    /// Runs a named verification suite.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Expand(_) => "expand",
            Command::Levy(_) => "levy",
            Command::CameronMartin(_) => "cameron-martin",
            Command::Bessel(_) => "bessel",
            Command::Chaos2(_) => "chaos2",
            Command::Signature(_) => "signature",
            Command::Riccati(_) => "riccati",
            Command::Mc(_) => "mc",
            Command::Verify(_) => "verify",
        }
    }

    pub fn config_json(&self) -> serde_json::Value {
        let v = match self {
            Command::Expand(a) => serde_json::to_value(a),
            Command::Levy(a) => serde_json::to_value(a),
            Command::CameronMartin(a) => serde_json::to_value(a),
            Command::Bessel(a) => serde_json::to_value(a),
            Command::Chaos2(a) => serde_json::to_value(a),
            Command::Signature(a) => serde_json::to_value(a),
            Command::Riccati(a) => serde_json::to_value(a),
            Command::Mc(a) => serde_json::to_value(a),
            Command::Verify(a) => serde_json::to_value(a),
        };
        v.expect("argument structs serialize")
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ExpandArgs {
    /// K, G or SPXG.
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub order: usize,
    /// Comma-separated `symbol=polynomial` bindings, e.g. `b=-a^2/2`.
    #[arg(long)]
    pub bind: Option<String>,
    #[arg(long, default_value_t = 12)]
    pub order_cap: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct LevyArgs {
    #[arg(long, default_value_t = 20)]
    pub order: usize,
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub horizon: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct CameronMartinArgs {
    #[arg(long, default_value_t = 10)]
    pub order: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BesselWeightKind {
    /// Unit mass at T: the Laplace transform of X_T.
    Terminal,
    /// Constant μ over [t, T]: the Laplace transform of μ∫X.
    Constant,
}

#[derive(Debug, Args, Serialize)]
pub struct BesselArgs {
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub horizon: f64,
    #[arg(long, default_value_t = 1.0)]
    pub x: f64,
    #[arg(long, value_enum, default_value_t = BesselWeightKind::Terminal)]
    pub weight: BesselWeightKind,
    /// Level of the constant weight.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 48)]
    pub n_max: usize,
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct Chaos2Args {
    /// CSV with rows `w,v,f(w,v)` on a uniform grid.
    #[arg(long, value_name = "FILE")]
    pub kernel: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    /// Horizon; defaults to the number of grid points times the step.
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Calculus {
    Ito,
    Strat,
}

#[derive(Debug, Args, Serialize)]
pub struct SignatureArgs {
    /// Word `a` of the left factor B^{ai} (digits 1-9, `∅` for empty).
    #[arg(long)]
    pub left: String,
    #[arg(long)]
    pub i: u8,
    #[arg(long)]
    pub right: String,
    #[arg(long)]
    pub j: u8,
    #[arg(long, value_enum, default_value_t = Calculus::Ito)]
    pub calculus: Calculus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Exp,
    Power,
}

#[derive(Debug, Args, Serialize)]
pub struct RiccatiArgs {
    #[arg(long, value_enum)]
    pub kernel: KernelKind,
    #[arg(long)]
    pub nu: f64,
    /// Mean reversion of the exponential kernel.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Exponent of the power-law kernel, in (½, 1).
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rho: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub c: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub horizon: f64,
    #[arg(long, default_value_t = 1024)]
    pub steps: usize,
    /// Flat forward variance (ignored with --curve).
    #[arg(long, default_value_t = 0.04)]
    pub xi0: f64,
    /// CSV with rows `u,ξ₀(u)`.
    #[arg(long, value_name = "FILE")]
    pub curve: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub x: f64,
    /// ζ₀(T); defaults to the curve integrated over [T, T+Δ].
    #[arg(long)]
    pub zeta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum McModelName {
    BmDrift,
    LevyArea,
    Besq,
    Heston,
    StoppedBm,
    Chaos2,
}

#[derive(Debug, Args, Serialize)]
pub struct McArgs {
    #[arg(long, value_enum)]
    pub model: McModelName,
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "T", default_value_t = 1.0)]
    #[serde(rename = "T")]
    pub horizon: f64,
    /// Highest cumulant order estimated (at most 6).
    #[arg(long, default_value_t = 4)]
    pub orders: usize,
    /// Output column to estimate from; defaults to the first.
    #[arg(long)]
    pub column: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a0: Option<f64>,
    #[arg(long)]
    pub x0: Option<f64>,
    /// BESQ dimension, or the Heston ζ window.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub xi0: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b0: Option<f64>,
    /// Chaos kernel CSV; its grid must match --steps and --T.
    #[arg(long, value_name = "FILE")]
    pub kernel: Option<PathBuf>,
    /// Heston joint MGF weights `(a, b, c)` on `(X, QV, ζ)`.
    #[arg(long, allow_negative_numbers = true)]
    pub mgf_a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mgf_b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mgf_c: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Reorder,
    Levy,
    CameronMartin,
    Bessel,
    Chaos2,
    HestonRiccati,
    McCross,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Expansion order for `reorder`.
    #[arg(long, default_value_t = 8)]
    pub order: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Paths per Monte Carlo check in `mc-cross`.
    #[arg(long, default_value_t = 200_000)]
    pub paths: usize,
}
