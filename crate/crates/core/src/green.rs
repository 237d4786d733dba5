//! Resolvent kernel of the interval operator `H_b` on `(b, b+1)`.
//!
//! `H_b` is `−d²/dr² − 1/(4r²)` with the natural conditions
//! `u′ − u/(2r) = 0` at both endpoints. Its resolvent `(H_b + k²)⁻¹` has the
//! Sturm–Liouville kernel
//!
//! ```text
//! G_b(r, s, k) = g_b(r) g_{b+1}(s) / W_b(k),    r ≤ s,
//! g_c(r)       = √r (I₁(ck) K₀(kr) + K₁(ck) I₀(kr)),
//! W_b(k)       = I₁((b+1)k) K₁(bk) − I₁(bk) K₁((b+1)k),
//! ```
//!
//! evaluated here with exponentially scaled Bessel functions so that large
//! `b·k` neither overflows nor cancels.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::extended::Extended;
use crate::optimize::sup_strip;
use crate::specfun::{bessel_scaled, ScaledBessel, DEFAULT_TOLERANCE};

/// Grid resolution of the supremum scan.
pub const DEFAULT_GRID: usize = 200;
/// Relative tolerance of the refinement; reported constants are inflated by it.
pub const DEFAULT_OPT_TOL: f64 = 1e-6;

/// Interval `(b, b+1)` and spectral parameter `k` (energy `−k²`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenParams {
    pub b: f64,
    pub k: f64,
}

/// Validated upper estimate of `C_α(k) = sup_{x,b} (b+x)^{−α} G_b(b+x, b+x, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalBound {
    pub alpha: f64,
    pub k: f64,
    /// Refined supremum times `1 + opt_tol`.
    pub c_alpha_k: f64,
    /// Refined supremum as found.
    pub sup_value: f64,
    pub argmax_x: f64,
    pub argmax_b: Extended,
    pub opt_tol: f64,
    /// `I₀(k)/(k I₁(k))` for `α = 0`, the value conjectured to be sharp. Recorded only.
    pub conjectured_sharp: Option<f64>,
}

fn scaled(x: f64) -> Result<ScaledBessel> {
    bessel_scaled(x, DEFAULT_TOLERANCE)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(domain(format!("alpha must lie in [0, 1), got {alpha}")));
    }
    Ok(())
}

/// `W_b(k) e^{−k}`; positive for every `b, k > 0`.
fn scaled_wronskian(sb: &ScaledBessel, sb1: &ScaledBessel, k: f64) -> f64 {
    sb1.i1 * sb.k1 - sb.i1 * sb1.k1 * (-2.0 * k).exp()
}

/// `G_b(r, s, k)` for `b ≤ r, s ≤ b+1`. Symmetric in `(r, s)` bit for bit.
pub fn green_kernel(p: &GreenParams, r: f64, s: f64) -> Result<f64> {
    let GreenParams { b, k } = *p;
    if !(b > 0.0 && k > 0.0) {
        return Err(domain(format!("green kernel needs b > 0 and k > 0, got b={b}, k={k}")));
    }
    let upper = b + 1.0;
    for v in [r, s] {
        if !(v >= b && v <= upper) {
            return Err(domain(format!("point {v} outside [{b}, {upper}]")));
        }
    }
    let (lo, hi) = if r <= s { (r, s) } else { (s, r) };
    let sb = scaled(b * k)?;
    let sb1 = scaled(upper * k)?;
    let slo = scaled(lo * k)?;
    let shi = scaled(hi * k)?;
    let wron = scaled_wronskian(&sb, &sb1, k);
    if !(wron > 0.0) {
        return Err(Error::Consistency(format!("Wronskian W_b(k) = {wron} at b={b}, k={k}")));
    }
    let left = sb.i1 * slo.k0 * (-2.0 * (lo - b) * k).exp() + sb.k1 * slo.i0;
    let right = sb1.i1 * shi.k0 + sb1.k1 * shi.i0 * (-2.0 * (upper - hi) * k).exp();
    Ok((lo * hi).sqrt() * ((lo - hi) * k).exp() * (left / wron) * right)
}

/// `g₀(x, 0) = x I₀(kx)(I₁(k)K₀(kx) + K₁(k)I₀(kx)) / I₁(k)`, the `b → 0` limit.
fn profile_at_zero(k: f64, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let sk = scaled(k)?;
    let sx = scaled(k * x)?;
    Ok(x * sx.i0 * (sk.i1 * sx.k0 + sk.k1 * sx.i0 * (2.0 * k * (x - 1.0)).exp()) / sk.i1)
}

/// `g₀(x, ∞) = cosh(kx) cosh(k(1−x)) / (k sinh k)`, written without overflow.
fn profile_at_infinity(k: f64, x: f64) -> f64 {
    (1.0 + (-2.0 * k * x).exp()) * (1.0 + (-2.0 * k * (1.0 - x)).exp())
        / (2.0 * k * (1.0 - (-2.0 * k).exp()))
}

/// `g_α(x, b) = (b+x)^{−α} G_b(b+x, b+x, k)` with its closed-form limits at
/// `b = 0` and `b = ∞`.
pub fn diagonal_profile(alpha: f64, b: Extended, k: f64, x: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(k > 0.0) {
        return Err(domain(format!("k must be positive, got {k}")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(domain(format!("x must lie in [0, 1], got {x}")));
    }
    match b {
        Extended::Infinity => Ok(if alpha == 0.0 { profile_at_infinity(k, x) } else { 0.0 }),
        Extended::Finite(b) if b == 0.0 => {
            if x == 0.0 {
                Ok(0.0)
            } else {
                Ok(x.powf(-alpha) * profile_at_zero(k, x)?)
            }
        }
        Extended::Finite(b) if b > 0.0 => {
            let r = b + x;
            Ok(r.powf(-alpha) * green_kernel(&GreenParams { b, k }, r, r)?)
        }
        Extended::Finite(b) => Err(domain(format!("b must be nonnegative, got {b}"))),
    }
}

/// `C_α(k)` at the default grid resolution.
pub fn compute_c_alpha(alpha: f64, k: f64, opt_tol: f64) -> Result<DiagonalBound> {
    compute_c_alpha_with_grid(alpha, k, opt_tol, DEFAULT_GRID)
}

/// `C_α(k)`: grid scan over `[0,1] × [0,∞]` including both boundary profiles,
/// local refinement, and upward rounding by `1 + opt_tol`.
pub fn compute_c_alpha_with_grid(
    alpha: f64,
    k: f64,
    opt_tol: f64,
    grid: usize,
) -> Result<DiagonalBound> {
    check_alpha(alpha)?;
    if !(k > 0.0) || !k.is_finite() {
        return Err(domain(format!("k must be positive, got {k}")));
    }
    if !(opt_tol > 0.0) {
        return Err(domain("opt_tol must be positive"));
    }
    let f = |x: f64, b: Extended| diagonal_profile(alpha, b, k, x).unwrap_or(f64::NAN);
    let sup = sup_strip(&f, grid, opt_tol, log_depth(alpha))?;
    let conjectured_sharp = if alpha == 0.0 {
        let sk = scaled(k)?;
        Some(sk.i0 / (k * sk.i1))
    } else {
        None
    };
    Ok(DiagonalBound {
        alpha,
        k,
        c_alpha_k: sup.value * (1.0 + opt_tol),
        sup_value: sup.value,
        argmax_x: sup.x,
        argmax_b: sup.b,
        opt_tol,
        conjectured_sharp,
    })
}

/// Depth of the logarithmic edge search: the weighted profiles peak near
/// `(b + x) ≈ e^{−1/(1−α)}`.
pub(crate) fn log_depth(alpha: f64) -> f64 {
    (20.0 + 40.0 / (1.0 - alpha)).min(600.0)
}
