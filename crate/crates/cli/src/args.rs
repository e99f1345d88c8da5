use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "cox", version, about = "Exactly solvable coupled-channel Cox potentials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON config; command-line flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    /// Seed for random parameter suites.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Tolerance override.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Potential matrix on a radial grid.
    Potential(PotentialArgs),
    /// Jost-determinant zeros and the (n_b, n_r) counts.
    Spectrum(ParamArgs),
    /// Parameters from spectral data.
    Invert(InvertArgs),
    /// Open-channel S, phase shift and cross section below the second threshold.
    Observables(ObservablesArgs),
    /// Magnetic Feshbach resonance fit and field scans.
    Feshbach(FeshbachArgs),
    /// Closed forms against direct integration of the radial equation.
    Verify(VerifyArgs),
    /// Region labels over the scaled (alpha1/beta, alpha2/beta) plane.
    Atlas(AtlasArgs),
}

/// Two-channel parameters; each flag overrides the config field of the same name.
#[derive(Debug, Args, Clone, Default)]
pub struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa1: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PotentialArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Grid end; default max(20, 30 / smallest kappa).
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Number of grid points, both ends included.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    #[command(subcommand)]
    pub kind: InvertKind,
}

#[derive(Debug, Subcommand)]
pub enum InvertKind {
    /// One visible resonance E_r - i E_i, no bound state.
    Resonance(ResonanceArgs),
    /// Two bound states -l1^2 and -l2^2.
    Bound2(Bound2Args),
    /// One bound state -lb^2 with alpha1 chosen freely.
    Bound1(Bound1Args),
    /// One visible resonance and one bound state -lb^2.
    Resbound(ResboundArgs),
}

#[derive(Debug, Args)]
pub struct ResonanceArgs {
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub er: Option<f64>,
    #[arg(long)]
    pub ei: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Default 1.
    #[arg(long)]
    pub kappa1: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BranchArg {
    Upper,
    Lower,
}

#[derive(Debug, Args)]
pub struct Bound2Args {
    #[arg(long)]
    pub l1: Option<f64>,
    #[arg(long)]
    pub l2: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, value_enum)]
    pub branch: Option<BranchArg>,
    /// Default max(l1, l2) + 0.01.
    #[arg(long)]
    pub kappa1: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Bound1Args {
    #[arg(long)]
    pub lb: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha1: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Default lb + 0.01.
    #[arg(long)]
    pub kappa1: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ResboundArgs {
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub er: Option<f64>,
    #[arg(long)]
    pub ei: Option<f64>,
    #[arg(long)]
    pub lb: Option<f64>,
    /// Default lb + 0.01.
    #[arg(long)]
    pub kappa1: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ObservablesArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Number of energies strictly inside (0, Delta).
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FeshbachArgs {
    #[command(subcommand)]
    pub mode: FeshbachMode,
}

#[derive(Debug, Subcommand)]
pub enum FeshbachMode {
    /// Parameters from a_bg, B0 and Gamma_B.
    Fit(FitArgs),
    /// Follow the zeros across a field window.
    Scan(ScanArgs),
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha1: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub hi: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// With --seed and no parameters: number of random regular draws.
    #[arg(long, default_value_t = 20)]
    pub draws: usize,
}

#[derive(Debug, Args)]
pub struct AtlasArgs {
    /// Delta / beta^2.
    #[arg(long)]
    pub delta_d: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub hi: Option<f64>,
    /// Points per axis.
    #[arg(long)]
    pub n: Option<usize>,
}
