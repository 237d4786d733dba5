//! Acceptance gate: one `[PASS]`/`[FAIL]` line per criterion, nonzero exit on
//! any failure.

mod common;

use std::time::{Duration, Instant};

use hardylt_core::deltabound::{beta_of_r, minimize_beta};
use hardylt_core::green::compute_c_alpha;
use hardylt_core::partition::Certifier;
use hardylt_core::poincare::{compute_s_alpha, phi_profile};
use hardylt_core::potential::{Potential, Segment};
use hardylt_core::sigma::{evaluate_params, map_sigma2, transform_potential, whole_line_spectrum};
use hardylt_core::specfun::{bessel_scaled, DEFAULT_TOLERANCE};
use hardylt_core::spectral::*;
use hardylt_core::Extended;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn run(id: u32, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let out = f();
    let took = t.elapsed();
    let in_time = limit.map_or(true, |l| took <= l);
    let pass = out.pass && in_time;
    let limit_note = match limit {
        Some(l) if !in_time => format!(", over the {:.0?} limit", l),
        _ => String::new(),
    };
    println!(
        "[{}] {id:>2}. {name}: {} ({:.2?}{limit_note})",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        took
    );
    pass
}

fn halfline(v: &Potential, n: usize, gamma: f64) -> SpectrumResult {
    let p = assemble_halfline(v, &Discretization::halfline(n)).expect("assemble");
    negative_spectrum(&p, gamma, RefinePolicy::default()).expect("spectrum")
}

fn wronskian() -> Outcome {
    let worst = (0..500)
        .map(|i| {
            let x = 1e-6 * (50.0f64 / 1e-6).powf(i as f64 / 499.0);
            let b = bessel_scaled(x, DEFAULT_TOLERANCE).unwrap();
            (x * (b.i1 * b.k0 + b.i0 * b.k1) - 1.0).abs()
        })
        .fold(0.0, f64::max);
    check(worst <= 1e-11, format!("max residual {worst:.2e}"))
}

fn green_constant() -> Outcome {
    let c = compute_c_alpha(0.0, 3.555, 1e-6).unwrap();
    let ok = (c.sup_value - 0.333316).abs() <= 5e-6
        && c.argmax_x == 1.0
        && c.argmax_b == Extended::Finite(0.0)
        && c.c_alpha_k <= 1.0 / 3.0;
    check(ok, format!("sup {:.8} at ({}, {:?}), C0(3.555) = {:.8}", c.sup_value, c.argmax_x, c.argmax_b, c.c_alpha_k))
}

fn sobolev_constant() -> Outcome {
    let s = compute_s_alpha(0.0, 1e-6).unwrap();
    let corner = phi_profile(0.0, 1.0, Extended::Finite(0.0)).unwrap();
    let ok = (s.s_alpha - 1.0 / 3.0).abs() <= 1e-5
        && s.argmax_b == Extended::Infinity
        && (s.argmax_x == 0.0 || s.argmax_x == 1.0)
        && corner == 0.25;
    check(ok, format!("S0 = {:.8} at (x, b) = ({}, {:?}); phi0(1, 0) = {corner}", s.s_alpha, s.argmax_x, s.argmax_b))
}

fn lower_constant() -> Outcome {
    let d = minimize_beta(1e-10).unwrap();
    let betas: Vec<f64> = [5.0, 10.0, 50.0].iter().map(|&r| beta_of_r(r).unwrap().beta).collect();
    let ok = (d.r - 1.075).abs() <= 2e-3
        && (1.0 / d.beta - 0.533).abs() <= 1e-3
        && betas.iter().all(|&b| b < 2.0)
        && betas.windows(2).all(|w| w[1] > w[0]);
    check(ok, format!("R* = {:.5}, 1/beta = {:.5}, beta(5, 10, 50) = {betas:.5?}", d.r, 1.0 / d.beta))
}

fn upper_constant() -> Outcome {
    let c = Certifier::default();
    let v = Potential::boxed(1.0, 2.0, 1.0).unwrap();
    let cert = c.certify(&v, 0.5, 0.0, None, 1e-10).unwrap();
    let ok = (cert.constant_used - 1.185).abs() <= 1e-3 && (cert.constant_used - 3.555 / 3.0).abs() <= 1e-3;
    check(ok, format!("constant_used = {:.7} at k = {}", cert.constant_used, cert.k))
}

fn main_theorem(certifier: &Certifier) -> Outcome {
    let params = [(0.5, 0.0), (0.75, 0.0), (1.0, 0.0), (0.375, 0.25), (0.25, 0.5)];
    // warm the constant caches before going parallel
    for &(g, a) in &params {
        certifier.constant(g, a).unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let pots: Vec<Potential> = (0..30).map(|_| common::random_potential(&mut rng)).collect();
    let results: Vec<(usize, f64)> = pots
        .par_iter()
        .map(|v| {
            let p = assemble_halfline(v, &Discretization::halfline(4000)).unwrap();
            let mut bad = 0;
            let mut worst: f64 = 0.0;
            for &(g, a) in &params {
                let s = negative_spectrum(&p, g, RefinePolicy::default()).unwrap();
                let cert = certifier.certify(v, g, a, None, 1e-10).unwrap();
                if s.riesz_mean > cert.total + 3.0 * s.riesz_error {
                    bad += 1;
                }
                if cert.total > 0.0 {
                    worst = worst.max(s.riesz_mean / cert.total);
                }
            }
            (bad, worst)
        })
        .collect();
    let violations: usize = results.iter().map(|r| r.0).sum();
    let worst = results.iter().map(|r| r.1).fold(0.0, f64::max);
    check(violations == 0, format!("{violations} violations in 150 cases, largest riesz/total = {worst:.4}"))
}

/// Random nonnegative step potential on `(b, b+1)` rescaled to `∫V r^α dr = mass`.
fn interval_potential(rng: &mut ChaCha8Rng, b: f64, alpha: f64, mass: f64) -> Potential {
    let mut cuts: Vec<f64> = (0..rng.gen_range(2..7)).map(|_| rng.gen_range(0.0..1.0)).collect();
    cuts.push(0.0);
    cuts.push(1.0);
    cuts.sort_by(f64::total_cmp);
    let segs: Vec<Segment> = cuts
        .windows(2)
        .filter(|w| w[1] - w[0] > 1e-3)
        .map(|w| Segment { lo: b + w[0], hi: b + w[1], value: if rng.gen_bool(0.7) { rng.gen_range(0.0..1.0) } else { 0.0 } })
        .collect();
    let mut v = Potential::piecewise(segs.clone()).unwrap();
    if v.support().is_none() {
        v = Potential::boxed(b + 0.25, b + 0.75, 1.0).unwrap();
    }
    let m = v.total_weighted_integral(1.0, alpha, 1e-13).unwrap();
    v.change_variables(hardylt_core::potential::Change { scale: mass / m, factor: 1.0, exponent: 1.0 }).unwrap()
}

fn interval_spectrum(v: &Potential, b: f64) -> SpectrumResult {
    let p = assemble_interval(v, b, &Discretization::interval(b, 2000)).unwrap();
    negative_spectrum(&p, 0.5, RefinePolicy::default()).unwrap()
}

fn one_bound_state(certifier: &Certifier) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut bad = Vec::new();
    for i in 0..50 {
        let alpha = [0.0, 0.25, 0.5][i % 3];
        let s_alpha = certifier.s_alpha(alpha).unwrap().s_alpha;
        let b = if rng.gen_bool(0.3) { rng.gen_range(0.01..0.5) } else { rng.gen_range(0.5..20.0) };
        let mass = rng.gen_range(0.05..1.0) / s_alpha;
        let v = interval_potential(&mut rng, b, alpha, mass);
        let s = interval_spectrum(&v, b);
        if s.count_all() != 1 {
            bad.push((b, alpha, s.count_all()));
        }
    }
    check(bad.is_empty(), format!("{} of 50 without exactly one state {bad:?}", bad.len()))
}

fn depth(certifier: &Certifier) -> Outcome {
    let k = 3.555;
    let c = certifier.c_alpha(0.0, k).unwrap().c_alpha_k;
    let mut rng = ChaCha8Rng::seed_from_u64(78);
    let mut bad = 0;
    let mut closest: f64 = f64::INFINITY;
    for _ in 0..50 {
        let b = if rng.gen_bool(0.3) { rng.gen_range(0.01..0.5) } else { rng.gen_range(0.5..20.0) };
        let mass = rng.gen_range(0.05..1.0) / c;
        let v = interval_potential(&mut rng, b, 0.0, mass);
        let s = interval_spectrum(&v, b);
        let lowest = s.lowest().unwrap_or(0.0);
        let err = s.errors.first().copied().unwrap_or(0.0);
        if lowest < -k * k - err {
            bad += 1;
        }
        closest = closest.min(lowest + k * k);
    }
    check(bad == 0, format!("{bad} of 50 below -k^2, smallest margin {closest:.4}"))
}

fn delta_realisation() -> Outcome {
    let n = 128.0;
    let v = Potential::boxed(1.075, 1.075 + 1.0 / n, 1.876 * n).unwrap();
    let s = halfline(&v, 16000, 0.5);
    let lowest = s.lowest().unwrap_or(0.0);
    let ratio = s.riesz_mean / 1.876;
    let ok = (lowest + 1.0).abs() <= 0.05 && ratio > 0.50 && ratio <= 0.533;
    check(ok, format!("lowest {lowest:.6}, riesz^(1/2) / int V = {ratio:.6}"))
}

fn sigma_equivalence() -> Outcome {
    let boxes = [Potential::boxed(1.0, 2.0, 4.0).unwrap(), Potential::boxed(0.5, 3.0, 2.0).unwrap()];
    let mut worst: f64 = 0.0;
    let mut mismatch = false;
    for v in &boxes {
        for sigma in [-1.0, 0.5, 1.0, 3.0] {
            let direct = assemble_sigma(v, sigma, &Discretization::sigma(sigma, 4000)).unwrap();
            let direct = negative_spectrum(&direct, 0.5, RefinePolicy::default()).unwrap();
            let scale = evaluate_params(sigma, 0.5, 0.0).unwrap().energy_scale;
            let reduced = halfline(&transform_potential(v, sigma).unwrap(), 4000, 0.5);
            mismatch |= direct.eigenvalues.len() != reduced.eigenvalues.len();
            for (a, b) in direct.eigenvalues.iter().zip(&reduced.eigenvalues) {
                worst = worst.max((a - scale * b).abs() / (scale * b).abs());
            }
        }
        let direct = assemble_sigma(v, 2.0, &Discretization::sigma(2.0, 4000)).unwrap();
        let direct = negative_spectrum(&direct, 0.5, RefinePolicy::default()).unwrap();
        let line = whole_line_spectrum(&map_sigma2(v).unwrap(), 4000, 0.5, 1e-9).unwrap();
        mismatch |= direct.eigenvalues.len() != line.eigenvalues.len();
        for (a, b) in direct.eigenvalues.iter().zip(&line.eigenvalues) {
            worst = worst.max((a - b).abs() / b.abs());
        }
    }
    check(!mismatch && worst <= 1e-3, format!("largest relative deviation {worst:.2e}"))
}

fn critical_failure() -> Outcome {
    let ratios: Vec<f64> = [4.0, 16.0, 64.0]
        .iter()
        .map(|&n| {
            let v = Potential::boxed(1.0, 1.0 + 1.0 / n, n).unwrap();
            let s = halfline(&v, 4000, 0.25);
            let rhs = v.total_weighted_integral(0.75, 0.0, 1e-13).unwrap();
            s.riesz_mean / rhs
        })
        .collect();
    check(ratios.windows(2).all(|w| w[1] > w[0]), format!("ratios {ratios:.5?}"))
}

fn main() {
    let certifier = Certifier::default();
    let secs = Duration::from_secs;
    let results = [
        run(1, "Wronskian identity", Some(secs(1)), wronskian),
        run(2, "Green diagonal constant", Some(secs(30)), green_constant),
        run(3, "Poincare-Sobolev constant", Some(secs(30)), sobolev_constant),
        run(4, "Lower-bound constant", Some(secs(5)), lower_constant),
        run(5, "Upper-bound constant", Some(secs(1)), upper_constant),
        run(6, "Main-theorem property suite", Some(secs(600)), || main_theorem(&certifier)),
        run(7, "One-bound-state criterion", None, || one_bound_state(&certifier)),
        run(8, "Depth criterion", None, || depth(&certifier)),
        run(9, "Delta realization", Some(secs(120)), delta_realisation),
        run(10, "Sigma equivalence", None, sigma_equivalence),
        run(11, "Critical-exponent failure", None, critical_failure),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
