use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "slly", version, about = "Exact and lattice checks for the supersymmetric delta-interacting Bose gas")]
pub struct Cli {
    /// TOML file with default values; flags win on conflict.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the report here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Acceptance tolerance of the command's checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub group: Group,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Group {
    /// Bethe eigenstates with their matching residuals.
    #[command(subcommand)]
    Bethe(BetheCmd),
    /// Supercharge algebra, zero modes, partners and sector blocks.
    #[command(subcommand)]
    Susy(SusyCmd),
    /// Finite-difference spectra on a Dirichlet box.
    #[command(subcommand)]
    Lattice(LatticeCmd),
}

#[derive(Debug, Subcommand)]
pub enum BetheCmd {
    /// Scattering state for real, strictly decreasing momenta.
    Collision(BetheArgs),
    /// Two-particle bound state (attractive c).
    Dimer(BetheArgs),
    /// Three-particle bound state (attractive c).
    Trimer(BetheArgs),
    /// A free particle next to a bound pair (attractive c).
    MonomerDimer(BetheArgs),
    /// N-particle ground bound state.
    Nmer(BetheArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct BetheArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub k: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum SusyCmd {
    /// Q^2 = 0 and {Q, Q†}/2 = H in the bulk on random spinors.
    Algebra(SusyArgs),
    /// The two constructed zero modes.
    ZeroModes(SusyArgs),
    /// Witten index over the constructed zero modes.
    Census(SusyArgs),
    /// Partner of a collision state under Q† (raise) or Q (lower).
    Partner(SusyArgs),
    /// Delta-coupling blocks of one fermion-number sector.
    Sector(SusyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionArg {
    Raise,
    Lower,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SusyArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub k: Option<Vec<f64>>,
    #[arg(long)]
    pub grade: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, value_enum)]
    pub direction: Option<DirectionArg>,
}

#[derive(Debug, Subcommand)]
pub enum LatticeCmd {
    /// Lowest eigenvalues of one sector, or of all three with the
    /// supersymmetry checks when --sector is omitted.
    Spectrum(LatticeArgs),
    /// Ground energy of one sector on refined grids.
    Converge(LatticeArgs),
    /// Positivity of the lattice {Q, Q†}/2 and the support of Q^2.
    Diagnostic(LatticeArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct LatticeArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    #[arg(long)]
    pub sector: Option<usize>,
    /// Box edge length L.
    #[arg(long = "box")]
    pub box_length: Option<f64>,
    /// Interior points per axis; a comma list for `converge`.
    #[arg(long, value_delimiter = ',')]
    pub points: Option<Vec<usize>>,
    #[arg(long)]
    pub eigs: Option<usize>,
    /// Largest number of unknowns allowed.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub max_iter: Option<usize>,
}
