//! The constructive upper bound.
//!
//! With `Ψ(k) = max{S_α, C_α(k)}`, the support of `V ≥ 0` is cut at
//! `a₁ = min supp V < a₂ < …` where
//! `(a_{j+1} − a_j)^{1−α} ∫_{a_j}^{a_{j+1}} V r^α dr = 1/Ψ(k)`, until
//! `a_N ≥ max supp V`. Each piece then carries at most one bound state of
//! depth at most `(k/l_j)²`, which gives
//!
//! ```text
//! tr(H₀ − V)_−^{(1−α)/2} ≤ k^{1−α} Ψ(k) ∫ V r^α dr.
//! ```
//!
//! Larger `γ` follow from the Aizenman–Lieb integral identity.

use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{domain, input, Error, Result};
use crate::green::{compute_c_alpha_with_grid, DiagonalBound, DEFAULT_GRID};
use crate::optimize::golden_min;
use crate::poincare::{compute_s_alpha_with_grid, SobolevConstant};
use crate::potential::Potential;
use crate::specfun::euler_beta;

/// The spectral parameter used for `α = 0`.
pub const DEFAULT_K_ALPHA0: f64 = 3.555;
/// Search range for `k` when `α > 0`.
pub const K_SEARCH: (f64, f64) = (0.5, 50.0);
const COARSE_GRID: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionResult {
    pub alpha: f64,
    pub k: f64,
    pub psi_k: f64,
    /// `a₁ < … < a_N`; `a₀ = 0` and `a_{N+1} = ∞` are implicit.
    pub breakpoints: Vec<f64>,
    /// `∫_{a_j}^{a_{j+1}} V r^α dr` for `j = 1, …, N−1`.
    pub integrals: Vec<f64>,
}

impl PartitionResult {
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.breakpoints.windows(2).map(|w| (w[0], w[1]))
    }
}

/// Recursive breakpoints for `V ≥ 0`.
pub fn build_partition(v: &Potential, alpha: f64, k: f64, psi_k: f64, quad_tol: f64) -> Result<PartitionResult> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(domain(format!("alpha must lie in [0, 1), got {alpha}")));
    }
    if !(psi_k > 0.0 && psi_k.is_finite()) {
        return Err(domain(format!("Psi(k) must be positive, got {psi_k}")));
    }
    if v.known_nonnegative() == Some(false) {
        return Err(input("the partition needs V >= 0; pass the positive part"));
    }
    let Some((lo, hi)) = v.support() else {
        return Err(input("the partition needs V not identically zero"));
    };
    let total = v.weighted_integral(lo, hi, 1.0, alpha, quad_tol)?;
    if !(total > 0.0) {
        return Err(input("the partition needs V not identically zero"));
    }
    let target = 1.0 / psi_k;
    let expo = 1.0 - alpha;
    let min_len = (psi_k * total).powf(-1.0 / expo);
    let n_est = (1.0 + (hi - lo) / min_len).min(1e6);
    let tol = quad_tol / n_est;

    let mut breakpoints = vec![lo];
    let mut integrals = Vec::new();
    let mut a = lo;
    while a < hi {
        let f = |x: f64| -> Result<f64> { Ok((x - a).powf(expo) * v.weighted_integral(a, x, 1.0, alpha, tol)?) };
        let mut lo_b = a + min_len.min(hi - a) * 0.5;
        while f(lo_b)? > target {
            lo_b = a + 0.5 * (lo_b - a);
        }
        let mut step = (hi - a).max(min_len);
        let mut hi_b = a + step;
        while f(hi_b)? < target {
            lo_b = hi_b;
            step *= 2.0;
            hi_b = a + step;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo_b + hi_b);
            if f(mid)? < target {
                lo_b = mid;
            } else {
                hi_b = mid;
            }
            if hi_b - lo_b <= 4.0 * f64::EPSILON * hi_b {
                break;
            }
        }
        let next = hi_b;
        integrals.push(v.weighted_integral(a, next, 1.0, alpha, tol)?);
        breakpoints.push(next);
        a = next;
    }
    Ok(PartitionResult { alpha, k, psi_k, breakpoints, integrals })
}

/// `B_{s,t} = B(s − t, t + 1)`, the constant of
/// `B_{s,t} λ_−^s = ∫₀^∞ μ^{s−t−1} (λ + μ)_−^t dμ`.
pub fn b_st(s: f64, t: f64) -> Result<f64> {
    if !(s > t && t >= 0.0) {
        return Err(domain(format!("B_(s,t) needs s > t >= 0, got s={s}, t={t}")));
    }
    euler_beta(s - t, t + 1.0)
}

/// `B_{γ,γ₀}^{−1} B_{γ+(1+α)/2, γ₀+(1+α)/2} C`, lifting a constant from moment
/// order `γ₀` to `γ`. Equal orders return `C` unchanged.
pub fn aizenman_lieb_lift(gamma_target: f64, gamma_base: f64, alpha: f64, base_constant: f64) -> Result<f64> {
    if gamma_target == gamma_base {
        return Ok(base_constant);
    }
    if !(gamma_target > gamma_base) {
        return Err(domain(format!(
            "lift needs gamma_target > gamma_base, got {gamma_target} <= {gamma_base}"
        )));
    }
    let shift = (1.0 + alpha) / 2.0;
    Ok(b_st(gamma_target + shift, gamma_base + shift)? / b_st(gamma_target, gamma_base)? * base_constant)
}

/// How `k` was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KChoice {
    Default,
    User,
    Optimized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub gamma: f64,
    pub alpha: f64,
    pub k: f64,
    pub k_choice: KChoice,
    pub s_alpha: f64,
    pub c_alpha_k: f64,
    pub psi_k: f64,
    /// `k^{1−α} Ψ(k)`, the constant at `γ = (1−α)/2`.
    pub critical_constant: f64,
    /// Aizenman–Lieb factor (1 at the critical order).
    pub lift_factor: f64,
    pub constant_used: f64,
    /// Power of `V₊` in the bound, `γ + (1+α)/2`.
    pub exponent: f64,
    pub partition: Option<PartitionResult>,
    pub per_interval_bounds: Vec<f64>,
    pub total: f64,
    /// Whether `V` had a negative part that was dropped.
    pub positive_part_substituted: bool,
}

/// Computes and caches `S_α` and `C_α(k)`; shared by all certificates.
#[derive(Debug)]
pub struct Certifier {
    pub opt_tol: f64,
    pub grid: usize,
    s_cache: Mutex<HashMap<u64, SobolevConstant>>,
    c_cache: Mutex<HashMap<(u64, u64, usize), DiagonalBound>>,
    k_cache: Mutex<HashMap<u64, f64>>,
}

impl Default for Certifier {
    fn default() -> Self {
        Certifier::new(crate::green::DEFAULT_OPT_TOL, DEFAULT_GRID)
    }
}

impl Certifier {
    pub fn new(opt_tol: f64, grid: usize) -> Self {
        Certifier {
            opt_tol,
            grid,
            s_cache: Mutex::default(),
            c_cache: Mutex::default(),
            k_cache: Mutex::default(),
        }
    }

    pub fn s_alpha(&self, alpha: f64) -> Result<SobolevConstant> {
        if let Some(s) = self.s_cache.lock().unwrap().get(&alpha.to_bits()) {
            return Ok(*s);
        }
        let s = compute_s_alpha_with_grid(alpha, self.opt_tol, self.grid)?;
        self.s_cache.lock().unwrap().insert(alpha.to_bits(), s);
        Ok(s)
    }

    fn c_alpha_grid(&self, alpha: f64, k: f64, grid: usize, opt_tol: f64) -> Result<DiagonalBound> {
        let key = (alpha.to_bits(), k.to_bits(), grid);
        if let Some(c) = self.c_cache.lock().unwrap().get(&key) {
            return Ok(*c);
        }
        let c = compute_c_alpha_with_grid(alpha, k, opt_tol, grid)?;
        self.c_cache.lock().unwrap().insert(key, c);
        Ok(c)
    }

    pub fn c_alpha(&self, alpha: f64, k: f64) -> Result<DiagonalBound> {
        self.c_alpha_grid(alpha, k, self.grid, self.opt_tol)
    }

    pub fn psi(&self, alpha: f64, k: f64) -> Result<f64> {
        Ok(self.s_alpha(alpha)?.s_alpha.max(self.c_alpha(alpha, k)?.c_alpha_k))
    }

    /// `k` minimising `k^{1−α} Ψ(k)`: 3.555 for `α = 0`, otherwise a golden
    /// search in `log k` on a coarse `C_α(k)`.
    pub fn default_k(&self, alpha: f64) -> Result<(f64, KChoice)> {
        if alpha == 0.0 {
            return Ok((DEFAULT_K_ALPHA0, KChoice::Default));
        }
        if let Some(&k) = self.k_cache.lock().unwrap().get(&alpha.to_bits()) {
            return Ok((k, KChoice::Optimized));
        }
        let s = self.s_alpha(alpha)?.s_alpha;
        let failure = std::cell::RefCell::new(None);
        let objective = |t: f64| {
            let k = t.exp();
            match self.c_alpha_grid(alpha, k, COARSE_GRID, 1e-4) {
                Ok(c) => k.powf(1.0 - alpha) * s.max(c.c_alpha_k),
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::INFINITY
                }
            }
        };
        let (t, _) = golden_min(objective, K_SEARCH.0.ln(), K_SEARCH.1.ln(), 1e-3);
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        let k = t.exp();
        self.k_cache.lock().unwrap().insert(alpha.to_bits(), k);
        Ok((k, KChoice::Optimized))
    }

    /// `C_{γ,α}` as certified: `k^{1−α}Ψ(k)` at the default `k`, lifted to `γ`.
    pub fn constant(&self, gamma: f64, alpha: f64) -> Result<f64> {
        check_hypotheses(gamma, alpha)?;
        let (k, _) = self.default_k(alpha)?;
        let critical = k.powf(1.0 - alpha) * self.psi(alpha, k)?;
        aizenman_lieb_lift(gamma, (1.0 - alpha) / 2.0, alpha, critical)
    }

    /// Right-hand side of the main inequality for `V`, using `V₊` only.
    pub fn certify(&self, v: &Potential, gamma: f64, alpha: f64, k: Option<f64>, tol: f64) -> Result<BoundCertificate> {
        check_hypotheses(gamma, alpha)?;
        let (k, k_choice) = match k {
            Some(k) if k > 0.0 && k.is_finite() => (k, KChoice::User),
            Some(k) => return Err(domain(format!("k must be positive, got {k}"))),
            None => self.default_k(alpha)?,
        };
        let s = self.s_alpha(alpha)?.s_alpha;
        let c = self.c_alpha(alpha, k)?.c_alpha_k;
        let psi_k = s.max(c);
        let critical_constant = k.powf(1.0 - alpha) * psi_k;
        let gamma_c = (1.0 - alpha) / 2.0;
        let constant_used = aizenman_lieb_lift(gamma, gamma_c, alpha, critical_constant)?;
        let exponent = gamma + (1.0 + alpha) / 2.0;

        let positive_part_substituted = v.known_nonnegative() != Some(true);
        let vp = v.positive_part();
        let has_mass = vp.support().is_some() && vp.total_weighted_integral(1.0, alpha, tol)? > 0.0;
        let (partition, per_interval_bounds) = if has_mass {
            let part = build_partition(&vp, alpha, k, psi_k, tol)?;
            let n = part.breakpoints.len().max(2) - 1;
            let bounds = part
                .intervals()
                .map(|(a, b)| Ok(constant_used * vp.weighted_integral(a, b, exponent, alpha, tol / n as f64)?))
                .collect::<Result<Vec<f64>>>()?;
            (Some(part), bounds)
        } else {
            (None, Vec::new())
        };
        let total = per_interval_bounds.iter().fold(0.0, |a, b| a + b);
        Ok(BoundCertificate {
            gamma,
            alpha,
            k,
            k_choice,
            s_alpha: s,
            c_alpha_k: c,
            psi_k,
            critical_constant,
            lift_factor: constant_used / critical_constant,
            constant_used,
            exponent,
            partition,
            per_interval_bounds,
            total,
            positive_part_substituted,
        })
    }
}

/// `0 ≤ α < 1` and `γ ≥ (1−α)/2` (equivalently `γ + (1+α)/2 ≥ 1`).
pub fn check_hypotheses(gamma: f64, alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Hypothesis { condition: format!("0 <= alpha < 1 (alpha = {alpha})") });
    }
    if !(gamma + (1.0 + alpha) / 2.0 >= 1.0) || !gamma.is_finite() {
        return Err(Error::Hypothesis {
            condition: format!("gamma >= (1-alpha)/2 = {} (gamma = {gamma})", (1.0 - alpha) / 2.0),
        });
    }
    Ok(())
}
