//! Sharp point-evaluation constant `Φ(b, c)` for mean-zero functions on
//! `(b, b+1)` and the embedding constant `S_α`.
//!
//! For `v ∈ H¹(b, b+1)` with `∫ v r dr = 0`,
//! `|v(c)|² ≤ Φ(b, c) ∫ |v′|² r dr`, where
//!
//! ```text
//! 4(2b+1)² Φ(b,c) = 4(b+1)⁴ log(b+1) − 4b⁴ log b
//!                   − (2b+1)(3 + 6b + 6b² − 4c² + 4(2b²+2b+1) log c).
//! ```
//!
//! The bracket loses about `4 log₁₀ b` digits to cancellation, so for large `b`
//! it is evaluated as a polynomial part plus two `log1p` remainders.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::extended::Extended;
use crate::optimize::sup_strip;

pub const DEFAULT_GRID: usize = 200;

/// Above this `b` the rearranged form is used.
const LARGE_B: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiParams {
    pub b: f64,
    pub c: f64,
}

/// `S_α = sup_{x,b} (b+x)^{1−α} Φ(b, b+x)`, rounded up by `1 + opt_tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevConstant {
    pub alpha: f64,
    pub s_alpha: f64,
    pub sup_value: f64,
    pub argmax_x: f64,
    pub argmax_b: Extended,
    pub opt_tol: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(domain(format!("alpha must lie in [0, 1), got {alpha}")));
    }
    Ok(())
}

/// `log(1+z) − (z − z²/2 + z³/3 − z⁴/4)` for `0 ≤ z ≤ 1/2`.
fn log1p_tail(z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let mut pow = z.powi(5);
    let mut sum = 0.0;
    let first = pow / 5.0;
    for n in 5..200 {
        let term = pow / n as f64;
        sum += if n % 2 == 1 { term } else { -term };
        if term < 1e-17 * first {
            break;
        }
        pow *= z;
    }
    sum
}

/// `4(2b+1)² Φ(b, b+x)`.
fn numerator(b: f64, x: f64) -> f64 {
    let c = b + x;
    let w = 2.0 * b * b + 2.0 * b + 1.0;
    if b == 0.0 {
        // b⁴ log b → 0
        return -(3.0 - 4.0 * c * c + 4.0 * c.ln());
    }
    if b < LARGE_B {
        return 4.0 * (b + 1.0).powi(4) * (b + 1.0).ln()
            - 4.0 * b.powi(4) * b.ln()
            - (2.0 * b + 1.0) * (3.0 + 6.0 * b + 6.0 * b * b - 4.0 * c * c + 4.0 * w * c.ln());
    }
    let (x2, x3, x4) = (x * x, x * x * x, x * x * x * x);
    let (ib, ib2, ib3, ib4) = (1.0 / b, 1.0 / (b * b), 1.0 / b.powi(3), 1.0 / b.powi(4));
    let poly = b * (16.0 * x2 - 16.0 * x + 16.0 / 3.0) - 16.0 * x3 / 3.0 + 16.0 * x2 - 16.0 * x
        + 16.0 / 3.0
        + (4.0 * x4 - 8.0 * x3 + 8.0 * x2 - 4.0 * x) * ib
        + (6.0 * x4 - 16.0 * x3 / 3.0 + 2.0 * x2 - 8.0 / 3.0) * ib2
        + (4.0 * x4 - 4.0 * x3 / 3.0 - 8.0 / 3.0) * ib3
        + (x4 - 1.0) * ib4;
    poly + 4.0 * (b + 1.0).powi(4) * log1p_tail(ib) - 4.0 * (2.0 * b + 1.0) * w * log1p_tail(x * ib)
}

/// `Φ(b, c)` for `0 ≤ b` and `b ≤ c ≤ b+1` (`b = 0` as the limit).
pub fn phi(p: &PhiParams) -> Result<f64> {
    let PhiParams { b, c } = *p;
    if !(b >= 0.0) || !b.is_finite() {
        return Err(domain(format!("b must be a nonnegative real, got {b}")));
    }
    if !(c >= b && c <= b + 1.0) || (b == 0.0 && c == 0.0) {
        return Err(domain(format!("c = {c} outside the admissible range for b = {b}")));
    }
    let x = (c - b).clamp(0.0, 1.0);
    Ok(numerator(b, x) / (4.0 * (2.0 * b + 1.0).powi(2)))
}

/// `φ_α(x, b) = (b+x)^{1−α} Φ(b, b+x)` extended to `b = 0` and `b = ∞`.
pub fn phi_profile(alpha: f64, x: f64, b: Extended) -> Result<f64> {
    check_alpha(alpha)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(domain(format!("x must lie in [0, 1], got {x}")));
    }
    match b {
        Extended::Infinity => Ok(if alpha == 0.0 { 1.0 / 3.0 - x + x * x } else { 0.0 }),
        Extended::Finite(b) if b == 0.0 => {
            if x == 0.0 {
                Ok(0.0)
            } else {
                Ok(x.powf(1.0 - alpha) * (-x.ln() + x * x - 0.75))
            }
        }
        Extended::Finite(b) if b > 0.0 => {
            let r = b + x;
            Ok(r.powf(1.0 - alpha) * numerator(b, x) / (4.0 * (2.0 * b + 1.0).powi(2)))
        }
        Extended::Finite(b) => Err(domain(format!("b must be nonnegative, got {b}"))),
    }
}

/// The extremal function: `v` with `(r v′)′ = 2r/(2b+1)` off `c`,
/// `v′(b) = v′(b+1) = 0`, normalised so that `v(c) = Φ(b, c)`.
pub fn minimizer(b: f64, c: f64) -> Result<impl Fn(f64) -> f64> {
    phi(&PhiParams { b, c })?;
    if b == 0.0 {
        return Err(domain("the minimiser is written for b > 0"));
    }
    let s = 2.0 * b + 1.0;
    let d = (4.0 * (b + 1.0).powi(4) * (b + 1.0).ln()
        - 4.0 * b.powi(4) * b.ln()
        - s * (3.0 + 6.0 * b + 6.0 * b * b - 2.0 * c * c + 4.0 * (b + 1.0).powi(2) * c.ln()))
        / (4.0 * s * s);
    Ok(move |r: f64| {
        if r <= c {
            d - b * b / s * r.ln() + r * r / (2.0 * s)
        } else {
            d + c.ln() - (b + 1.0).powi(2) / s * r.ln() + r * r / (2.0 * s)
        }
    })
}

/// `S_α` at the default grid resolution.
pub fn compute_s_alpha(alpha: f64, opt_tol: f64) -> Result<SobolevConstant> {
    compute_s_alpha_with_grid(alpha, opt_tol, DEFAULT_GRID)
}

pub fn compute_s_alpha_with_grid(alpha: f64, opt_tol: f64, grid: usize) -> Result<SobolevConstant> {
    check_alpha(alpha)?;
    if !(opt_tol > 0.0) {
        return Err(domain("opt_tol must be positive"));
    }
    let f = |x: f64, b: Extended| phi_profile(alpha, x, b).unwrap_or(f64::NAN);
    let sup = sup_strip(&f, grid, opt_tol, crate::green::log_depth(alpha))?;
    Ok(SobolevConstant {
        alpha,
        s_alpha: sup.value * (1.0 + opt_tol),
        sup_value: sup.value,
        argmax_x: sup.x,
        argmax_b: sup.b,
        opt_tol,
    })
}
