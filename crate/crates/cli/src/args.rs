use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::config::{Profile, ToleranceOverrides};

const PROFILE_HELP: &str = "\
Tolerance profiles (flags > --config file > --profile / HARDYLT_TOL_PROFILE):
  profile   quad_tol  opt_tol  grid   opt_grid
  default   1e-10     1e-6     4000   200
  fast      1e-8      1e-4     1000   60
  strict    1e-12     1e-8     16000  400
Exit status: 0 ok, 1 verification failed, 2 invalid input or parameters, 3 numerical failure.";

#[derive(Debug, Clone, Parser)]
#[command(
    name = "hardylt",
    version,
    about = "Lieb-Thirring certificates for half-line Schrödinger operators with the critical Hardy term",
    after_help = PROFILE_HELP
)]
pub struct Cli {
    /// Tolerance profile; falls back to the config file, then HARDYLT_TOL_PROFILE.
    #[arg(long, global = true, value_enum)]
    pub profile: Option<Profile>,
    /// TOML file with `profile`, `seed` and a `[tolerances]` table.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, short = 'o', global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub tolerances: ToleranceOverrides,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Certified right-hand side of the Lieb-Thirring inequality.
    Bound(BoundArgs),
    /// Certificate against the computed Riesz mean.
    Verify(VerifyArgs),
    /// Negative eigenvalues and Riesz mean.
    Spectrum(SpectrumArgs),
    /// The constants behind the certificate.
    #[command(subcommand)]
    Constants(ConstantsCommand),
    /// The σ-family of operators and its reduction to the half-line.
    SigmaMap(SigmaArgs),
    /// Reference constants and a seeded random certificate check.
    Regress(RegressArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bound(_) => "bound",
            Command::Verify(_) => "verify",
            Command::Spectrum(_) => "spectrum",
            Command::Constants(ConstantsCommand::Green(_)) => "constants green",
            Command::Constants(ConstantsCommand::Sobolev(_)) => "constants sobolev",
            Command::Constants(ConstantsCommand::Lower(_)) => "constants lower",
            Command::SigmaMap(_) => "sigma-map",
            Command::Regress(_) => "regress",
        }
    }
}

/// A spec file, or a narrow box standing in for `s·δ_R`.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PotentialArgs {
    #[arg(long, value_name = "FILE", conflicts_with = "delta_at")]
    pub potential: Option<PathBuf>,
    /// Centre `R` of a box of mass `--delta-strength` and width `--delta-width`.
    #[arg(long, value_name = "R")]
    pub delta_at: Option<f64>,
    #[arg(long, default_value_t = 1.0, requires = "delta_at")]
    pub delta_strength: f64,
    #[arg(long, default_value_t = 1e-3, requires = "delta_at")]
    pub delta_width: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BoundArgs {
    #[command(flatten)]
    pub source: PotentialArgs,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Spectral parameter of the Green function bound; chosen automatically if absent.
    #[arg(long)]
    pub k: Option<f64>,
    /// Bound for `−d²/dr² − V` without the Hardy term, via `(V − 1/(4r²))₊`.
    #[arg(long)]
    pub plain: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: PotentialArgs,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long)]
    pub k: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Operator {
    Halfline,
    Interval { b: f64 },
    Sigma { sigma: f64 },
}

impl FromStr for Operator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let number = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("invalid number '{t}' in operator '{s}'"));
        match s.split_once(':') {
            None if s == "halfline" => Ok(Operator::Halfline),
            Some(("interval", b)) => Ok(Operator::Interval { b: number(b)? }),
            Some(("sigma", v)) => Ok(Operator::Sigma { sigma: number(v)? }),
            _ => Err(format!("unknown operator '{s}' (expected halfline, interval:B or sigma:S)")),
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operator::Halfline => write!(f, "halfline"),
            Operator::Interval { b } => write!(f, "interval:{b}"),
            Operator::Sigma { sigma } => write!(f, "sigma:{sigma}"),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub source: PotentialArgs,
    /// `halfline`, `interval:B` (the interval `(B, B+1)`) or `sigma:S`.
    #[arg(long, default_value = "halfline")]
    pub operator: Operator,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    /// Truncation radius; chosen from a coarse solve if absent.
    #[arg(long)]
    pub rmax: Option<f64>,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantsCommand {
    /// `C_α(k)`, the supremum of the weighted Green function diagonal.
    Green(GreenArgs),
    /// `S_α`, the weighted Sobolev constant on unit intervals.
    Sobolev(CurveArgs),
    /// `sup_R R^{1−α} I₀(R) K₀(R)` from delta potentials.
    Lower(CurveArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CurveArgs {
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Also write the underlying curve as CSV.
    #[arg(long, value_name = "FILE")]
    pub curve: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GreenArgs {
    #[command(flatten)]
    pub common: CurveArgs,
    #[arg(long)]
    pub k: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SigmaArgs {
    #[arg(long)]
    pub sigma: f64,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[command(flatten)]
    pub source: PotentialArgs,
    /// Write the transformed half-line potential as a spec file.
    #[arg(long, value_name = "FILE")]
    pub write_potential: Option<PathBuf>,
    /// Whole-line constant for `σ = 2`; defaults to 1/2 at `γ = 1/2, α = 0`.
    #[arg(long)]
    pub c_ek: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct RegressArgs {
    /// Random potentials to certify.
    #[arg(long, default_value_t = 12)]
    pub cases: usize,
}
