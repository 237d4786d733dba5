//! Modified Bessel functions of order zero and one, and the Euler beta function.
//!
//! `I₀, I₁` come from their power series up to [`I_ASYMPTOTIC_FROM`] and from the
//! Hankel asymptotic expansion beyond it. The asymptotic series has its smallest
//! term near index `2x`, of size about `e^{-2x}`; that drops below the rounding
//! floor of the (positive-term) power series at `x ≈ 20`, which fixes the crossover.
//!
//! `K₀, K₁` use the logarithmic power series up to `x = 2`. Above that the series
//! cancels catastrophically and the asymptotic series is not yet accurate, so the
//! range `x > 2` is covered by Steed's continued fraction (Temme's CF2), which
//! converges for every `x > 0` and is used all the way out.
//!
//! Every routine works internally with exponentially scaled values
//! `e^{-x} I_n(x)` and `e^{x} K_n(x)`, which are what the Green's-function code
//! needs at large arguments.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Argument above which `I₀, I₁` are taken from the asymptotic expansion.
pub const I_ASYMPTOTIC_FROM: f64 = 20.0;

/// Argument above which `K₀, K₁` are taken from the continued fraction.
pub const K_CONTINUED_FRACTION_FROM: f64 = 2.0;

/// Finest relative tolerance the evaluators honour.
pub const FINEST_TOLERANCE: f64 = 1e-14;

/// Default tolerance used by the convenience wrappers.
pub const DEFAULT_TOLERANCE: f64 = 1e-14;

const MAX_TERMS: usize = 500;

/// Whether the unscaled values could be represented in `f64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BesselStatus {
    Normal,
    /// `K₀, K₁` underflowed; they are reported as exact zeros.
    KUnderflow,
    /// `I₀, I₁` overflowed; they are reported as `+∞`.
    IOverflow,
}

/// `I₀, I₁, K₀, K₁` at one argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselQuad {
    pub x: f64,
    pub i0: f64,
    pub i1: f64,
    pub k0: f64,
    pub k1: f64,
    pub status: BesselStatus,
}

impl BesselQuad {
    /// `|I₁K₀ + I₀K₁ − 1/x|`, meaningful only for [`BesselStatus::Normal`].
    pub fn wronskian_residual(&self) -> f64 {
        (self.i1 * self.k0 + self.i0 * self.k1 - 1.0 / self.x).abs()
    }
}

/// Exponentially scaled values: `e^{-x}I₀, e^{-x}I₁, e^{x}K₀, e^{x}K₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledBessel {
    pub x: f64,
    pub i0: f64,
    pub i1: f64,
    pub k0: f64,
    pub k1: f64,
}

fn check_args(x: f64, tol: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("Bessel argument must be positive and finite, got {x}")));
    }
    if !(tol >= FINEST_TOLERANCE && tol <= 1e-10) {
        return Err(domain(format!(
            "Bessel tolerance must lie in [{FINEST_TOLERANCE:e}, 1e-10], got {tol:e}"
        )));
    }
    Ok(())
}

/// Exponentially scaled `I₀, I₁, K₀, K₁` at `x > 0`.
pub fn bessel_scaled(x: f64, tol: f64) -> Result<ScaledBessel> {
    check_args(x, tol)?;
    let (i0, i1) = if x <= I_ASYMPTOTIC_FROM {
        let (a, b) = i_series(x, tol);
        let e = (-x).exp();
        (a * e, b * e)
    } else {
        i_asymptotic_scaled(x, tol)
    };
    let (k0, k1) = if x <= K_CONTINUED_FRACTION_FROM {
        let (a, b) = k_series(x, i0 * x.exp(), i1 * x.exp(), tol);
        let e = x.exp();
        (a * e, b * e)
    } else {
        k_continued_fraction_scaled(x, tol)
    };
    Ok(ScaledBessel { x, i0, i1, k0, k1 })
}

/// `I₀, I₁, K₀, K₁` at `x > 0` with relative error at most `tol`.
pub fn bessel_quad(x: f64, tol: f64) -> Result<BesselQuad> {
    let s = bessel_scaled(x, tol)?;
    let grow = x.exp();
    let decay = (-x).exp();
    let mut status = BesselStatus::Normal;
    let (i0, i1) = if grow.is_finite() {
        (s.i0 * grow, s.i1 * grow)
    } else {
        status = BesselStatus::IOverflow;
        (f64::INFINITY, f64::INFINITY)
    };
    let (mut k0, mut k1) = (s.k0 * decay, s.k1 * decay);
    if k0 < f64::MIN_POSITIVE || k1 < f64::MIN_POSITIVE {
        status = BesselStatus::KUnderflow;
        k0 = 0.0;
        k1 = 0.0;
    }
    Ok(BesselQuad { x, i0, i1, k0, k1, status })
}

pub fn i0(x: f64) -> f64 {
    bessel_quad(x, DEFAULT_TOLERANCE).map(|b| b.i0).unwrap_or(f64::NAN)
}

pub fn i1(x: f64) -> f64 {
    bessel_quad(x, DEFAULT_TOLERANCE).map(|b| b.i1).unwrap_or(f64::NAN)
}

pub fn k0(x: f64) -> f64 {
    bessel_quad(x, DEFAULT_TOLERANCE).map(|b| b.k0).unwrap_or(f64::NAN)
}

pub fn k1(x: f64) -> f64 {
    bessel_quad(x, DEFAULT_TOLERANCE).map(|b| b.k1).unwrap_or(f64::NAN)
}

/// Power series `I₀ = Σ q^k/(k!)²`, `I₁ = (x/2) Σ q^k/(k!(k+1)!)`, `q = x²/4`.
fn i_series(x: f64, tol: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let (mut t0, mut t1) = (1.0, 1.0);
    let (mut s0, mut s1) = (1.0, 1.0);
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        s0 += t0;
        s1 += t1;
        if t0 < 0.01 * tol * s0 && t1 < 0.01 * tol * s1 {
            break;
        }
    }
    (s0, 0.5 * x * s1)
}

/// Hankel expansion `e^{-x} I_ν(x) ~ (2πx)^{-1/2} Σ (-1)^k a_k(ν) x^{-k}`.
fn i_asymptotic_scaled(x: f64, tol: f64) -> (f64, f64) {
    let pref = 1.0 / (2.0 * std::f64::consts::PI * x).sqrt();
    let series = |mu: f64| {
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut last = f64::INFINITY;
        for k in 1..MAX_TERMS {
            let odd = (2 * k - 1) as f64;
            term *= -(mu - odd * odd) / (k as f64 * 8.0 * x);
            if term.abs() >= last {
                break;
            }
            sum += term;
            last = term.abs();
            if last < 0.01 * tol * sum.abs() {
                break;
            }
        }
        sum
    };
    (pref * series(0.0), pref * series(4.0))
}

/// Logarithmic series for `K₀, K₁`, given unscaled `I₀, I₁`.
fn k_series(x: f64, i0: f64, i1: f64, tol: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let log_half = (0.5 * x).ln();

    // K₀ = −(ln(x/2) + γ) I₀ + Σ_{k≥1} q^k/(k!)² H_k
    let mut t = 1.0;
    let mut harmonic = 0.0;
    let mut s0 = 0.0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        t *= q / (kf * kf);
        harmonic += 1.0 / kf;
        let term = t * harmonic;
        s0 += term;
        if term < 0.01 * tol * s0.abs().max(1e-300) {
            break;
        }
    }
    let k0 = -(log_half + EULER_GAMMA) * i0 + s0;

    // K₁ = 1/x + ln(x/2) I₁ − (x/4) Σ_{k≥0} q^k/(k!(k+1)!) (ψ(k+1) + ψ(k+2))
    let mut t = 1.0;
    let mut h_k = 0.0;
    let mut h_k1 = 1.0;
    let mut s1 = t * (-2.0 * EULER_GAMMA + h_k + h_k1);
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        t *= q / (kf * (kf + 1.0));
        h_k += 1.0 / kf;
        h_k1 += 1.0 / (kf + 1.0);
        let term = t * (-2.0 * EULER_GAMMA + h_k + h_k1);
        s1 += term;
        if term.abs() < 0.01 * tol * s1.abs().max(1e-300) {
            break;
        }
    }
    let k1 = 1.0 / x + log_half * i1 - 0.25 * x * s1;
    (k0, k1)
}

/// Steed's algorithm for the second continued fraction at order zero.
fn k_continued_fraction_scaled(x: f64, tol: f64) -> (f64, f64) {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let (mut q1, mut q2) = (0.0, 1.0);
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..10 * MAX_TERMS {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 0.01 * tol {
            break;
        }
    }
    h *= a1;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(z: f64) -> f64 {
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    acc
}

/// Gamma function for positive arguments (reflection below 1/2).
pub fn gamma(z: f64) -> f64 {
    if z < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * z).sin() * gamma(1.0 - z))
    } else {
        let z = z - 1.0;
        let t = z + LANCZOS_G + 0.5;
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
    }
}

/// `ln Γ(z)` for `z > 0`.
pub fn ln_gamma(z: f64) -> f64 {
    if z < 0.5 {
        (std::f64::consts::PI / (std::f64::consts::PI * z).sin()).ln() - ln_gamma(1.0 - z)
    } else {
        let z = z - 1.0;
        let t = z + LANCZOS_G + 0.5;
        0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
    }
}

/// Euler beta function `B(p, q) = Γ(p)Γ(q)/Γ(p+q)`.
pub fn euler_beta(p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0 && q > 0.0) || !p.is_finite() || !q.is_finite() {
        return Err(domain(format!("beta arguments must be positive, got ({p}, {q})")));
    }
    // Ordered arguments make B(p,q) and B(q,p) bitwise identical.
    let (a, b) = if p <= q { (p, q) } else { (q, p) };
    if a + b < 100.0 {
        Ok(gamma(a) * (gamma(b) / gamma(a + b)))
    } else {
        Ok((ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp())
    }
}
