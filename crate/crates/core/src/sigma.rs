//! The operators `H_σ` with form `∫ r^σ|u′|² − (σ−1)²|u|²/(4r^{2−σ}) dr`.
//!
//! For `σ ≠ 2` the unitary `(U_σ u)(r) = |q|^{1/2} r^{−σ/4} u(r^q)`,
//! `q = (2−σ)/2`, gives `U_σ* H_σ U_σ = q² H₀`, so
//! `tr(H_σ − V)_−^γ = |q|^{2γ} tr(H₀ − V_σ)_−^γ` with
//! `V_σ(r) = q^{−2} V(r^{1/q})`. For `σ = 2`, `r = eˣ` turns `H₂` into
//! `−d²/dx²` on the line.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::partition::Certifier;
use crate::potential::{Change, Potential};
use crate::spectral::{
    assemble_pencil, eigenvalues_below, riesz_sum, Mesh, MIN_ELEMENTS,
};

/// `(σ, γ, α)` and the equivalent half-line parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaParams {
    pub sigma: f64,
    pub gamma: f64,
    pub alpha: f64,
    /// `(2α+σ)/(2−σ)`.
    pub mapped_alpha: f64,
    /// `|2/(2−σ)|^{mapped_alpha}`.
    pub prefactor: f64,
    /// `((2−σ)/2)²`.
    pub energy_scale: f64,
    /// `γ + (1+α)/(2−σ)`, the power of `V₊` in the bound.
    pub exponent: f64,
    pub valid: bool,
    /// Hypotheses that fail, empty when `valid`.
    pub violated: Vec<String>,
}

/// Computes the mapping and checks the hypotheses without rejecting.
pub fn evaluate_params(sigma: f64, gamma: f64, alpha: f64) -> Result<SigmaParams> {
    if sigma == 2.0 {
        return Err(domain("sigma = 2 reduces to the whole line; use map_sigma2"));
    }
    if !(sigma.is_finite() && gamma.is_finite() && alpha.is_finite()) {
        return Err(domain("sigma, gamma and alpha must be finite"));
    }
    let q = (2.0 - sigma) / 2.0;
    let mapped_alpha = (2.0 * alpha + sigma) / (2.0 - sigma);
    let exponent = gamma + (1.0 + alpha) / (2.0 - sigma);
    let mut violated = Vec::new();
    if !(gamma > 0.0) {
        violated.push(format!("gamma > 0 (gamma = {gamma})"));
    }
    if sigma > 2.0 {
        if !(alpha <= -sigma / 2.0) {
            violated.push(format!("alpha <= -sigma/2 for sigma > 2 (alpha = {alpha})"));
        }
        let lhs = gamma - (1.0 + alpha) / (sigma - 2.0);
        if !(lhs >= 1.0) {
            violated.push(format!("gamma - (1+alpha)/(sigma-2) >= 1 (value {lhs})"));
        }
    } else {
        if !(alpha >= -sigma / 2.0) {
            violated.push(format!("alpha >= -sigma/2 for sigma < 2 (alpha = {alpha})"));
        }
        if !(exponent >= 1.0) {
            violated.push(format!("gamma + (1+alpha)/(2-sigma) >= 1 (value {exponent})"));
        }
    }
    if !(0.0..1.0).contains(&mapped_alpha) {
        violated.push(format!("mapped alpha (2alpha+sigma)/(2-sigma) in [0, 1) (value {mapped_alpha})"));
    }
    Ok(SigmaParams {
        sigma,
        gamma,
        alpha,
        mapped_alpha,
        prefactor: (1.0 / q).abs().powf(mapped_alpha),
        energy_scale: q * q,
        exponent,
        valid: violated.is_empty(),
        violated,
    })
}

/// As [`evaluate_params`], rejecting parameters outside the hypotheses.
pub fn map_params(sigma: f64, gamma: f64, alpha: f64) -> Result<SigmaParams> {
    let p = evaluate_params(sigma, gamma, alpha)?;
    if !p.valid {
        return Err(Error::Hypothesis { condition: p.violated.join("; ") });
    }
    Ok(p)
}

/// `V_σ(r) = (2/(2−σ))² V(r^{2/(2−σ)})`.
pub fn transform_potential(v: &Potential, sigma: f64) -> Result<Potential> {
    if sigma == 2.0 {
        return Err(domain("sigma = 2 has no half-line reduction; use map_sigma2"));
    }
    if sigma == 0.0 {
        return Ok(v.clone());
    }
    let q = (2.0 - sigma) / 2.0;
    v.change_variables(Change { scale: 1.0 / (q * q), factor: 1.0, exponent: 1.0 / q })
}

/// `V₂(x) = V(eˣ)` on the real line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WholeLinePotential {
    pub source: Potential,
    /// `[log lo, log hi]`.
    pub support: (f64, f64),
}

impl WholeLinePotential {
    pub fn from_halfline(v: &Potential) -> Result<Self> {
        map_sigma2(v)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.source.eval(x.exp())
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.source.breakpoints().into_iter().filter(|&r| r > 0.0).map(f64::ln).collect()
    }

    /// `∫ (V₂)₊^p |x|^α dx` by adaptive quadrature.
    pub fn weighted_integral(&self, p: f64, alpha: f64, tol: f64) -> Result<f64> {
        let (a, b) = self.support;
        let mut cuts = self.breakpoints();
        cuts.push(0.0);
        let f = |x: f64| {
            let v = self.eval(x).max(0.0);
            if v == 0.0 {
                0.0
            } else {
                v.powf(p) * if alpha == 0.0 { 1.0 } else { x.abs().powf(alpha) }
            }
        };
        crate::quadrature::integrate_pieces(&f, a, b, &cuts, tol)
    }
}

pub fn map_sigma2(v: &Potential) -> Result<WholeLinePotential> {
    let (lo, hi) = v.support().unwrap_or((1.0, 1.0));
    if !(lo > 0.0) {
        return Err(domain("support touching r = 0 has no image under log"));
    }
    Ok(WholeLinePotential { source: v.clone(), support: (lo.ln(), hi.ln()) })
}

/// Negative spectrum of `−d²/dx² − V₂` from the Dirichlet truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WholeLineSpectrum {
    pub eigenvalues: Vec<f64>,
    /// Half-width beyond the support at which the values settled.
    pub reach: f64,
    pub riesz_mean: f64,
    pub gamma: f64,
}

fn whole_line_eigenvalues(w: &WholeLinePotential, per_unit: f64, reach: f64) -> Result<Vec<f64>> {
    let (a, b) = w.support;
    let (lo, hi) = (a - reach, b + reach);
    let n = ((hi - lo) * per_unit).ceil() as usize;
    if n > 4_000_000 {
        return Err(Error::Convergence {
            message: format!("whole-line truncation needs {n} elements"),
            dump: vec![(lo, hi, per_unit)],
        });
    }
    let mut nodes: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    nodes.extend(w.breakpoints().into_iter().filter(|&x| x > lo && x < hi));
    nodes.sort_by(f64::total_cmp);
    nodes.dedup_by(|x, y| (*x - *y).abs() < 1e-12 * (1.0 + y.abs()));
    let mesh = Mesh { nodes, free_lo: false, free_hi: false };
    let pencil = assemble_pencil(&mesh, |_| 1.0, |_| 1.0, |x| w.eval(x))?;
    Ok(eigenvalues_below(&pencil, 0.0, w.source.max_value()))
}

/// Typical decay length scale: `10/√|λ_shallow|` from a coarse solve.
pub fn whole_line_reach(w: &WholeLinePotential) -> Result<f64> {
    let width = (w.support.1 - w.support.0).max(1e-3);
    let evs = whole_line_eigenvalues(w, 200.0 / width, 20.0 * width + 20.0)?;
    Ok(match evs.last() {
        Some(&l) => (10.0 / (-l).sqrt()).max(width),
        None => 10.0 * width + 10.0,
    })
}

/// Whole-line reference solver: `n` elements per support width, truncation
/// `[a − L, b + L]` with `L` doubled until the eigenvalues move by less than
/// `rel_tol` relative.
pub fn whole_line_spectrum(w: &WholeLinePotential, n: usize, gamma: f64, rel_tol: f64) -> Result<WholeLineSpectrum> {
    if n < MIN_ELEMENTS {
        return Err(domain(format!("need at least {MIN_ELEMENTS} elements")));
    }
    let width = (w.support.1 - w.support.0).max(1e-3);
    let per_unit = n as f64 / width;
    let mut reach = whole_line_reach(w)?;
    let mut prev = whole_line_eigenvalues(w, per_unit, reach)?;
    for _ in 0..8 {
        reach *= 2.0;
        let next = whole_line_eigenvalues(w, per_unit, reach)?;
        let settled = next.len() == prev.len()
            && next.iter().zip(&prev).all(|(a, b)| (a - b).abs() <= rel_tol * a.abs());
        prev = next;
        if settled {
            return Ok(WholeLineSpectrum {
                riesz_mean: riesz_sum(&prev, gamma),
                eigenvalues: prev,
                reach,
                gamma,
            });
        }
    }
    Err(Error::Convergence {
        message: "whole-line eigenvalues did not settle under truncation doubling".into(),
        dump: prev.iter().enumerate().map(|(i, &l)| (i as f64, l, reach)).collect(),
    })
}

/// Right-hand side of the σ-family bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaBound {
    pub params: SigmaParams,
    /// `C_{γ, mapped_alpha}` of the half-line theorem as certified here.
    pub half_line_constant: f64,
    /// `∫ V₊^{exponent} r^α dr`.
    pub integral: f64,
    pub total: f64,
}

pub fn sigma_bound(
    v: &Potential,
    params: &SigmaParams,
    certifier: &Certifier,
    tol: f64,
) -> Result<SigmaBound> {
    if !params.valid {
        return Err(Error::Hypothesis { condition: params.violated.join("; ") });
    }
    let constant = certifier.constant(params.gamma, params.mapped_alpha)?;
    let integral = v.positive_part().total_weighted_integral(params.exponent, params.alpha, tol)?;
    Ok(SigmaBound {
        params: params.clone(),
        half_line_constant: constant,
        integral,
        total: params.prefactor * constant * integral,
    })
}

/// Bound for `σ = 2` with the external whole-line constant `c_ek`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sigma2Bound {
    pub gamma: f64,
    pub alpha: f64,
    pub c_ek: f64,
    /// `∫ V₊^{γ+(1+α)/2} |log r|^α r^{−1} dr`.
    pub integral: f64,
    pub total: f64,
}

pub fn sigma2_bound(v: &Potential, gamma: f64, alpha: f64, c_ek: f64, tol: f64) -> Result<Sigma2Bound> {
    let ok = (gamma >= 0.5 && alpha == 0.0)
        || (gamma > 0.0 && alpha > 0.0 && gamma + (1.0 + alpha) / 2.0 >= 1.0 + alpha);
    if !ok {
        return Err(Error::Hypothesis {
            condition: "gamma >= 1/2 with alpha = 0, or alpha > 0 with gamma + (1+alpha)/2 >= 1 + alpha"
                .into(),
        });
    }
    let w = map_sigma2(&v.positive_part())?;
    let integral = w.weighted_integral(gamma + (1.0 + alpha) / 2.0, alpha, tol)?;
    Ok(Sigma2Bound { gamma, alpha, c_ek, integral, total: c_ek * integral })
}
