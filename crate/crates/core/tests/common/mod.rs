//! Reference implementations used only by tests. None of them call into the
//! library's numerical code.
#![allow(dead_code)]

use std::f64::consts::PI;

use hardylt_core::potential::{Potential, Segment};
use rand::Rng;

/// Neumaier-compensated sum.
pub struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    pub fn new() -> Self {
        Compensated { sum: 0.0, c: 0.0 }
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// `I_n(x)` for `n ∈ {0, 1}` from 60 terms of the power series, summed with
/// compensation.
pub fn series_i(n: u32, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = if n == 0 { 1.0 } else { 0.5 * x };
    let mut s = Compensated::new();
    for m in 0..60u32 {
        s.add(term);
        term *= q / (((m + 1) * (m + 1 + n)) as f64);
    }
    s.value()
}

/// `e^{−x} I_n(x) = (1/π) ∫₀^π e^{x(cos θ − 1)} cos(nθ) dθ`; trapezoid rule on a
/// periodic integrand converges geometrically.
pub fn integral_i_scaled(n: u32, x: f64) -> f64 {
    let m = 4000;
    let h = PI / m as f64;
    let mut s = Compensated::new();
    for j in 0..=m {
        let t = j as f64 * h;
        let w = if j == 0 || j == m { 0.5 } else { 1.0 };
        s.add(w * (x * (t.cos() - 1.0)).exp() * (n as f64 * t).cos());
    }
    s.value() * h / PI
}

/// `e^{x} K_n(x) = ∫₀^∞ e^{−x(cosh t − 1)} cosh(nt) dt` by the trapezoid rule.
pub fn integral_k_scaled(n: u32, x: f64) -> f64 {
    let h = 2e-3;
    let mut s = Compensated::new();
    s.add(0.5);
    let mut j = 1;
    loop {
        let t = j as f64 * h;
        let f = (-x * (t.cosh() - 1.0)).exp() * (n as f64 * t).cosh();
        s.add(f);
        if f < 1e-18 * s.value() {
            break;
        }
        j += 1;
    }
    s.value() * h
}

/// Composite Simpson rule with `m` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    let mut s = Compensated::new();
    s.add(f(a));
    s.add(f(b));
    for j in 1..m {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        s.add(w * f(a + j as f64 * h));
    }
    s.value() * h / 3.0
}

/// `B(p, q)` through `t = sin²θ`, which removes the endpoint singularities
/// for `p, q ≥ 1/2`.
pub fn beta_by_quadrature(p: f64, q: f64) -> f64 {
    2.0 * simpson(
        |th: f64| th.sin().powf(2.0 * p - 1.0) * th.cos().powf(2.0 * q - 1.0),
        0.0,
        PI / 2.0,
        20_000,
    )
}

/// Thomas algorithm for a symmetric tridiagonal system.
pub fn solve_tridiagonal(diag: &[f64], off: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = if n > 1 { off[0] / diag[0] } else { 0.0 };
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - off[i - 1] * c[i - 1];
        if i + 1 < n {
            c[i] = off[i] / m;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / m;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}

/// P1 stiffness and mass matrices with weight `r` on the given nodes, both
/// ends free.
pub fn weighted_p1(nodes: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = nodes.len();
    let (mut kd, mut ko, mut md, mut mo) = (vec![0.0; n], vec![0.0; n - 1], vec![0.0; n], vec![0.0; n - 1]);
    for e in 0..n - 1 {
        let (x0, x1) = (nodes[e], nodes[e + 1]);
        let h = x1 - x0;
        let k = 0.5 * (x0 + x1) / h;
        kd[e] += k;
        kd[e + 1] += k;
        ko[e] -= k;
        md[e] += h * (3.0 * x0 + x1) / 12.0;
        md[e + 1] += h * (x0 + 3.0 * x1) / 12.0;
        mo[e] += h * (x0 + x1) / 12.0;
    }
    (kd, ko, md, mo)
}

/// Eigenvalues of a dense symmetric matrix, ascending.
pub fn symmetric_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| a[i][j]);
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Shooting oracle for `−u″ − u/(4r²) − V u = −κ² u` with `V = c·χ_(lo,hi)`:
/// start from `√r I₀(κr)` at `lo`, integrate by RK4 to `hi` and return the
/// Wronskian against `√r K₀(κr)` there. Zeros in `κ` are bound states.
/// Bessel values at the ends come from the integral representations above.
pub fn well_mismatch(c: f64, lo: f64, hi: f64, kappa: f64) -> f64 {
    let i0 = integral_i_scaled(0, kappa * lo);
    let i1 = integral_i_scaled(1, kappa * lo);
    let mut u = lo.sqrt() * i0;
    let mut du = i0 / (2.0 * lo.sqrt()) + lo.sqrt() * kappa * i1;
    let steps = 4000;
    let h = (hi - lo) / steps as f64;
    let f = |r: f64, u: f64| (kappa * kappa - c - 0.25 / (r * r)) * u;
    for j in 0..steps {
        let r = lo + j as f64 * h;
        let (k1u, k1v) = (du, f(r, u));
        let (k2u, k2v) = (du + 0.5 * h * k1v, f(r + 0.5 * h, u + 0.5 * h * k1u));
        let (k3u, k3v) = (du + 0.5 * h * k2v, f(r + 0.5 * h, u + 0.5 * h * k2u));
        let (k4u, k4v) = (du + h * k3v, f(r + h, u + h * k3u));
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        du += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    let k0 = integral_k_scaled(0, kappa * hi);
    let k1 = integral_k_scaled(1, kappa * hi);
    let w = hi.sqrt() * k0;
    let dw = k0 / (2.0 * hi.sqrt()) - hi.sqrt() * kappa * k1;
    // the common factors e^{±κr} do not move zeros
    (du * w - u * dw) / (u.abs() + du.abs())
}

/// All bound states `−κ²` of the square well found by scanning `κ` and bisecting.
pub fn well_eigenvalues(c: f64, lo: f64, hi: f64) -> Vec<f64> {
    let top = c.sqrt();
    let n = 400;
    let mut out = Vec::new();
    let ks: Vec<f64> = (1..n).map(|j| top * j as f64 / n as f64).collect();
    let fs: Vec<f64> = ks.iter().map(|&k| well_mismatch(c, lo, hi, k)).collect();
    for j in 0..ks.len() - 1 {
        if fs[j].signum() != fs[j + 1].signum() {
            let (mut a, mut b, fa) = (ks[j], ks[j + 1], fs[j]);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if well_mismatch(c, lo, hi, m).signum() == fa.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            let k = 0.5 * (a + b);
            out.push(-k * k);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Random compact potential: square wells, a comb of boxes or a power profile.
pub fn random_potential(rng: &mut impl Rng) -> Potential {
    match rng.gen_range(0..3) {
        0 => {
            let lo = rng.gen_range(0.1..3.0);
            let w = rng.gen_range(0.1..3.0);
            Potential::boxed(lo, lo + w, rng.gen_range(0.2..20.0)).unwrap()
        }
        1 => {
            let mut segs = Vec::new();
            let mut at = rng.gen_range(0.1..2.0);
            for _ in 0..rng.gen_range(2..6) {
                let w = rng.gen_range(0.05..1.0);
                segs.push(Segment { lo: at, hi: at + w, value: rng.gen_range(0.5..15.0) });
                at += w + rng.gen_range(0.05..1.5);
            }
            Potential::piecewise(segs).unwrap()
        }
        _ => {
            let lo = rng.gen_range(0.2..2.0);
            let hi = lo + rng.gen_range(0.5..4.0);
            let c = rng.gen_range(0.5..10.0);
            let p = rng.gen_range(0.5..3.0);
            let expr = hardylt_core::expr::Expr::parse(&format!("{c} * pow(r - {lo}, {p}) * pow({hi} - r, {p}) / pow({}, {})", (hi - lo) / 2.0, 2.0 * p)).unwrap();
            Potential::expression(expr, (lo, hi)).unwrap()
        }
    }
}

/// Bound states of `−d²/dr² − c·χ_(lo,hi)` on the half-line with `u(0) = 0`
/// (no Hardy term), from the closed-form matching condition.
pub fn plain_well_eigenvalues(c: f64, lo: f64, hi: f64) -> Vec<f64> {
    let mismatch = |kappa: f64| {
        let k = (c - kappa * kappa).sqrt();
        // u = sinh(κr)/cosh(κ lo) left of the well
        let (u0, du0) = ((kappa * lo).tanh(), kappa);
        let w = hi - lo;
        let u = u0 * (k * w).cos() + du0 / k * (k * w).sin();
        let du = -u0 * k * (k * w).sin() + du0 * (k * w).cos();
        (du + kappa * u) / (u.abs() + du.abs())
    };
    let n = 4000;
    let top = c.sqrt();
    let ks: Vec<f64> = (1..n).map(|j| top * j as f64 / n as f64).collect();
    let mut out = Vec::new();
    for w in ks.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let fa = mismatch(a);
        if fa.signum() == mismatch(b).signum() {
            continue;
        }
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if mismatch(m).signum() == fa.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        let kappa = 0.5 * (a + b);
        out.push(-kappa * kappa);
    }
    out.sort_by(f64::total_cmp);
    out
}
