use hardylt_core::expr::Expr;
use hardylt_core::partition::Certifier;
use hardylt_core::potential::{Potential, Segment};
use hardylt_core::sigma::*;
use hardylt_core::spectral::*;
use hardylt_core::Error;

#[test]
fn parameter_examples() {
    let p = map_params(0.0, 0.7, 0.3).unwrap();
    assert_eq!((p.mapped_alpha, p.prefactor, p.energy_scale), (0.3, 1.0, 1.0));
    match map_params(1.0, 1.0, 0.0) {
        Err(Error::Hypothesis { condition }) => assert!(condition.contains("mapped alpha")),
        other => panic!("{other:?}"),
    }
    let p = map_params(1.0, 1.0, -0.5).unwrap();
    assert_eq!(p.mapped_alpha, 0.0);
    let p = map_params(3.0, 2.0, -1.5).unwrap();
    assert!(p.valid && p.mapped_alpha == 0.0 && p.energy_scale == 0.25);
    assert!(map_params(2.0, 1.0, 0.0).is_err());
    let bad = evaluate_params(3.0, 2.0, 0.0).unwrap();
    assert!(!bad.valid && bad.violated.iter().any(|v| v.contains("alpha <= -sigma/2")));
}

#[test]
fn transformed_box() {
    let v = Potential::boxed(1.0, 4.0, 1.0).unwrap();
    let w = transform_potential(&v, 1.0).unwrap();
    for r in [0.5, 0.99, 1.01, 1.5, 1.99, 2.01, 3.0] {
        let want = if r > 1.0 && r < 2.0 { 4.0 } else { 0.0 };
        assert_eq!(w.eval(r), want, "r={r}");
    }
    assert_eq!(w.support(), Some((1.0, 2.0)));
    assert_eq!(transform_potential(&v, 0.0).unwrap(), v);
}

#[test]
fn group_law_on_expressions() {
    let e = Expr::parse("3 * exp(-(r - 2)^2) * r").unwrap();
    let v = Potential::expression(e, (0.5, 4.0)).unwrap();
    for (s1, s2) in [(1.0, 0.5), (-1.0, 3.0), (0.5, -2.0), (3.0, 3.0)] {
        let (q1, q2) = ((2.0 - s1) / 2.0, (2.0 - s2) / 2.0);
        let s3 = 2.0 - 2.0 * q1 * q2;
        let twice = transform_potential(&transform_potential(&v, s1).unwrap(), s2).unwrap();
        let once = transform_potential(&v, s3).unwrap();
        for j in 1..60 {
            let r = 0.05 * j as f64;
            let (a, b) = (twice.eval(r), once.eval(r));
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "({s1},{s2}) r={r}: {a} vs {b}");
        }
    }
}

fn sigma_eigs(v: &Potential, sigma: f64, n: usize) -> SpectrumResult {
    let p = assemble_sigma(v, sigma, &Discretization::sigma(sigma, n)).unwrap();
    negative_spectrum(&p, 0.5, RefinePolicy::default()).unwrap()
}

#[test]
fn unitary_equivalence() {
    let v = Potential::piecewise(vec![
        Segment { lo: 0.6, hi: 1.4, value: 6.0 },
        Segment { lo: 2.0, hi: 2.5, value: 9.0 },
    ])
    .unwrap();
    for sigma in [-1.0, 0.5, 1.0, 3.0] {
        let direct = sigma_eigs(&v, sigma, 3000);
        let params = evaluate_params(sigma, 0.5, 0.0).unwrap();
        let reduced = transform_potential(&v, sigma).unwrap();
        let p = assemble_halfline(&reduced, &Discretization::halfline(3000)).unwrap();
        let half = negative_spectrum(&p, 0.5, RefinePolicy::default()).unwrap();
        assert_eq!(direct.eigenvalues.len(), half.eigenvalues.len(), "sigma={sigma}");
        for (a, b) in direct.eigenvalues.iter().zip(&half.eigenvalues) {
            let b = params.energy_scale * b;
            assert!((a - b).abs() < 1e-3 * b.abs(), "sigma={sigma}: {a} vs {b}");
        }
    }
}

#[test]
fn sigma_two_matches_whole_line() {
    let v = Potential::boxed(1.0, 3.0, 2.5).unwrap();
    let direct = sigma_eigs(&v, 2.0, 3000);
    let w = map_sigma2(&v).unwrap();
    let line = whole_line_spectrum(&w, 3000, 0.5, 1e-9).unwrap();
    assert_eq!(direct.eigenvalues.len(), line.eigenvalues.len());
    for (a, b) in direct.eigenvalues.iter().zip(&line.eigenvalues) {
        assert!((a - b).abs() < 1e-3 * b.abs(), "{a} vs {b}");
    }
}

#[test]
fn log_map_support_and_weights() {
    let e = std::f64::consts::E;
    let w = map_sigma2(&Potential::boxed(1.0, e, 1.0).unwrap()).unwrap();
    assert_eq!(w.support.0, 0.0);
    assert!((w.support.1 - 1.0).abs() < 1e-15);
    let v = Potential::boxed(0.5, 3.0, 2.0).unwrap();
    let w = map_sigma2(&v).unwrap();
    for (p, alpha) in [(1.0, 0.0), (1.5, 0.5), (2.0, 0.25)] {
        let line = w.weighted_integral(p, alpha, 1e-12).unwrap();
        // ∫ 2^p |log r|^α dr/r in closed form
        let half = 2f64.powf(p) * (2f64.ln().powf(alpha + 1.0) + 3f64.ln().powf(alpha + 1.0)) / (alpha + 1.0);
        assert!((line - half).abs() < 1e-8 * half, "{line} vs {half}");
    }
    assert!(map_sigma2(&Potential::boxed(0.0, 1.0, 1.0).unwrap()).is_err());
}

#[test]
fn generalised_hardy_positivity() {
    for sigma in [-1.0, 0.0, 0.5, 1.0, 1.5, 3.0] {
        let v = Potential::boxed(1.0, 2.0, -1.0).unwrap();
        let p = assemble_sigma(&v, sigma, &Discretization::sigma(sigma, 1000)).unwrap();
        assert!(p.negative_eigenvalues().is_empty(), "sigma={sigma}");
        let p = assemble_sigma(&Potential::Zero, sigma, &Discretization::sigma(sigma, 1000)).unwrap();
        assert!(p.negative_eigenvalues().is_empty(), "sigma={sigma}");
    }
}

#[test]
fn sigma_bounds_hold() {
    let c = Certifier::default();
    let combos = [
        (1.0, 1.0, -0.5),
        (0.5, 0.5, 0.0),
        (-1.0, 0.5, 0.5),
        (3.0, 2.0, -1.5),
        (1.0, 0.75, -0.25),
    ];
    let pots = [Potential::boxed(1.0, 2.0, 5.0).unwrap(), Potential::boxed(0.5, 3.0, 1.5).unwrap()];
    for (sigma, gamma, alpha) in combos {
        let params = map_params(sigma, gamma, alpha).unwrap();
        for v in &pots {
            let p = assemble_sigma(v, sigma, &Discretization::sigma(sigma, 2000)).unwrap();
            let s = negative_spectrum(&p, gamma, RefinePolicy::default()).unwrap();
            let bound = sigma_bound(v, &params, &c, 1e-10).unwrap();
            assert!(s.riesz_mean <= bound.total + 3.0 * s.riesz_error, "({sigma},{gamma},{alpha}): {} > {}", s.riesz_mean, bound.total);
        }
    }
}
