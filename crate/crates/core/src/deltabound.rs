//! Lower bounds on the optimal constant from `V = β δ_R`.
//!
//! `H₀ − βδ_R` has a bound state at `−1` exactly when
//! `β = 1/(R I₀(R) K₀(R))`, with eigenfunction `√r I₀(r) K₀(R)` for `r < R`
//! and `√r K₀(r) I₀(R)` beyond. Scaling then gives
//! `C_{(1−α)/2,α} ≥ R^{1−α} I₀(R) K₀(R)` for every `R > 0`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::green::log_depth;
use crate::optimize::{golden_max, golden_min};
use crate::specfun::{bessel_scaled, DEFAULT_TOLERANCE};

/// Screening interval for the minimiser of `β`.
pub const SCREEN: (f64, f64) = (0.1, 20.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaResult {
    pub r: f64,
    /// Coupling with eigenvalue exactly `−1`.
    pub beta: f64,
    /// `I₀(R) K₀(R)`.
    pub i0k0: f64,
}

impl DeltaResult {
    /// `R^{1−α} I₀(R) K₀(R)`.
    pub fn lower_bound(&self, alpha: f64) -> f64 {
        self.r.powf(1.0 - alpha) * self.i0k0
    }
}

fn i0k0(r: f64) -> Result<f64> {
    let b = bessel_scaled(r, DEFAULT_TOLERANCE)?;
    // the exponential scalings cancel
    Ok(b.i0 * b.k0)
}

pub fn beta_of_r(r: f64) -> Result<DeltaResult> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(domain(format!("R must be positive and finite, got {r}")));
    }
    let p = i0k0(r)?;
    Ok(DeltaResult { r, beta: 1.0 / (r * p), i0k0: p })
}

/// Eigenfunction of `H₀ − β(R) δ_R` at `−1`, continuous at `R` with a kink.
pub fn eigenfunction(r_delta: f64) -> Result<impl Fn(f64) -> f64> {
    let at = bessel_scaled(r_delta, DEFAULT_TOLERANCE)?;
    Ok(move |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        let b = bessel_scaled(r, DEFAULT_TOLERANCE).expect("r > 0");
        if r < r_delta {
            r.sqrt() * b.i0 * at.k0 * (r - r_delta).exp()
        } else {
            r.sqrt() * b.k0 * at.i0 * (r_delta - r).exp()
        }
    })
}

/// Minimiser of `β(R)`, after checking on a grid over [`SCREEN`] that `β`
/// decreases and then increases.
pub fn minimize_beta(search_tol: f64) -> Result<DeltaResult> {
    let n = 400;
    let (lo, hi) = (SCREEN.0.ln(), SCREEN.1.ln());
    let ts: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let betas = ts.iter().map(|t| Ok(beta_of_r(t.exp())?.beta)).collect::<Result<Vec<f64>>>()?;
    let turns = betas
        .windows(3)
        .filter(|w| (w[1] - w[0]).signum() != (w[2] - w[1]).signum())
        .count();
    let best = (0..=n).min_by(|&i, &j| betas[i].total_cmp(&betas[j])).unwrap();
    if turns != 1 || best == 0 || best == n {
        return Err(domain("beta(R) is not unimodal on the screening interval"));
    }
    let (t, _) = golden_min(|t| beta_of_r(t.exp()).map(|d| d.beta).unwrap_or(f64::INFINITY), ts[best - 1], ts[best + 1], search_tol);
    beta_of_r(t.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaLowerBound {
    pub alpha: f64,
    /// `sup_R R^{1−α} I₀(R) K₀(R)`.
    pub value: f64,
    pub r_star: f64,
    /// False when the supremum sits at the end of the searched range and is
    /// only approached.
    pub attained: bool,
}

/// `sup_R R^{1−α} I₀ K₀`. The map tends to `0` at both ends for `α > 0` and to
/// `1/2` at infinity for `α = 0`, so the supremum is an interior maximum.
pub fn lower_bound_alpha(alpha: f64, search_tol: f64) -> Result<AlphaLowerBound> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(domain(format!("alpha must lie in [0, 1), got {alpha}")));
    }
    let f = |t: f64| beta_of_r(t.exp()).map(|d| d.lower_bound(alpha)).unwrap_or(f64::NEG_INFINITY);
    let (lo, hi) = (-log_depth(alpha), 12.0);
    let n = 800;
    let ts: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let vals: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
    let best = (0..=n).max_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap();
    let a = ts[best.saturating_sub(1)];
    let b = ts[(best + 1).min(n)];
    let (t, value) = golden_max(f, a, b, search_tol);
    Ok(AlphaLowerBound { alpha, value, r_star: t.exp(), attained: best > 0 && best < n })
}
