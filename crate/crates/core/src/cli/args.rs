use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::walk::Mode;

#[derive(Debug, Parser)]
#[command(
    name = "simplexwalk",
    version,
    about = "First-passage random walks on the probability simplex"
)]
pub(super) struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub(super) enum Sub {
    /// Run an ensemble and report vertex frequencies and passage times.
    Simulate(WalkArgs),
    /// Run an ensemble and test the vertex frequencies against |a_i|².
    Compare(WalkArgs),
    /// Run a two-state ensemble and test the mean passage time.
    Mfpt(WalkArgs),
    /// Run a two-state ensemble and tabulate the passage-time density.
    Density(WalkArgs),
    /// Evaluate a closed-form quantity without simulating.
    Analytic(AnalyticArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub(super) struct StateArgs {
    /// Comma-separated complex amplitudes, e.g. 0.6,0.8i or 0.6+0.8i,0.
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub amps: Option<String>,
    /// Comma-separated start point on the simplex, e.g. 0.3,0.7.
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub point: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub(super) struct WalkArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Continuum)]
    pub mode: Mode,
    /// Total chips K of the discrete game.
    #[arg(long, default_value_t = 100)]
    pub chips: u32,
    /// Pseudo-time per continuum step.
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
    #[arg(long, default_value_t = 1.0)]
    pub diffusion: f64,
    #[arg(long, default_value_t = 10_000_000)]
    pub max_steps: u64,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: Option<u32>,
    /// Result file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also write every trajectory to <out>.trace.csv (trace.csv without --out).
    #[arg(long)]
    pub trace: bool,
    /// Record the wall-clock run time in the JSON output.
    #[arg(long)]
    pub wall_clock: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    /// Vertex absorption probabilities.
    Fpp,
    /// Mean passage time of the two-state walk.
    Mfpt,
    /// Green's function at --x for Laplace variable --s.
    Green,
    /// Passage-time density of the two-state walk at times --t.
    Density,
}

#[derive(Debug, Args)]
pub(super) struct AnalyticArgs {
    #[arg(value_enum)]
    pub quantity: Quantity,
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, default_value_t = 1.0)]
    pub diffusion: f64,
    /// Laplace variable (green).
    #[arg(long)]
    pub s: Option<f64>,
    /// Field point, comma-separated (green).
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Times, comma-separated (density).
    #[arg(long, value_name = "LIST")]
    pub t: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}
