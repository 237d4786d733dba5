//! Tolerance profiles and their layering: flags over config file over profile.

use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

/// Environment variable selecting the profile when neither flag nor file does.
pub const PROFILE_ENV: &str = "HARDYLT_TOL_PROFILE";
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    #[default]
    Default,
    Fast,
    Strict,
}

impl Profile {
    pub fn tolerances(self) -> Tolerances {
        match self {
            Profile::Default => Tolerances { quad_tol: 1e-10, opt_tol: 1e-6, grid: 4000, opt_grid: 200, doubling: true, extend_domain: true },
            Profile::Fast => Tolerances { quad_tol: 1e-8, opt_tol: 1e-4, grid: 1000, opt_grid: 60, doubling: true, extend_domain: true },
            Profile::Strict => Tolerances { quad_tol: 1e-12, opt_tol: 1e-8, grid: 16000, opt_grid: 400, doubling: true, extend_domain: true },
        }
    }

    fn from_name(name: &str) -> Result<Profile, String> {
        Profile::from_str(name, true).map_err(|_| format!("unknown tolerance profile '{name}' (expected default, fast or strict)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute tolerance of weighted integrals.
    pub quad_tol: f64,
    /// Relative tolerance of constant optimisation.
    pub opt_tol: f64,
    /// Finite-element count across the support.
    pub grid: usize,
    /// Grid of the supremum scans.
    pub opt_grid: usize,
    pub doubling: bool,
    pub extend_domain: bool,
}

/// Per-field overrides from flags or the `[tolerances]` table.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[arg(long, global = true)]
    pub quad_tol: Option<f64>,
    #[arg(long, global = true)]
    pub opt_tol: Option<f64>,
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true)]
    pub opt_grid: Option<usize>,
    #[arg(long, global = true)]
    pub doubling: Option<bool>,
    #[arg(long, global = true)]
    pub extend_domain: Option<bool>,
}

impl ToleranceOverrides {
    fn apply(&self, t: &mut Tolerances) {
        if let Some(x) = self.quad_tol {
            t.quad_tol = x;
        }
        if let Some(x) = self.opt_tol {
            t.opt_tol = x;
        }
        if let Some(x) = self.grid {
            t.grid = x;
        }
        if let Some(x) = self.opt_grid {
            t.opt_grid = x;
        }
        if let Some(x) = self.doubling {
            t.doubling = x;
        }
        if let Some(x) = self.extend_domain {
            t.extend_domain = x;
        }
    }
}

/// Contents of a `--config` TOML file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub profile: Option<Profile>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Settings a run actually used; echoed into every report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resolved {
    pub profile: Profile,
    pub tolerances: Tolerances,
    pub seed: u64,
}

impl Resolved {
    /// `flag_profile > file > env > default` for the profile, then
    /// `flags > file > profile` per tolerance field.
    pub fn resolve(
        flag_profile: Option<Profile>,
        env_profile: Option<&str>,
        file: &FileConfig,
        flags: &ToleranceOverrides,
        flag_seed: Option<u64>,
    ) -> Result<Resolved, String> {
        let profile = match (flag_profile, file.profile, env_profile) {
            (Some(p), _, _) | (None, Some(p), _) => p,
            (None, None, Some(name)) if !name.is_empty() => Profile::from_name(name)?,
            _ => Profile::Default,
        };
        let mut tolerances = profile.tolerances();
        file.tolerances.apply(&mut tolerances);
        flags.apply(&mut tolerances);
        if !(tolerances.quad_tol > 0.0 && tolerances.opt_tol > 0.0 && tolerances.opt_tol < 1.0) {
            return Err("tolerances must be positive (and opt_tol < 1)".into());
        }
        if tolerances.grid < 16 || tolerances.opt_grid < 8 {
            return Err("grid needs at least 16 elements and opt_grid at least 8 points".into());
        }
        let seed = flag_seed.or(file.seed).unwrap_or(DEFAULT_SEED);
        Ok(Resolved { profile, tolerances, seed })
    }
}
