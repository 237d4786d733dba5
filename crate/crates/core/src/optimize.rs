//! Golden-section search and a grid-then-refine supremum over the unit square.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extended::Extended;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of `f` on `[a, b]`.
///
/// The endpoints are evaluated too, so maxima sitting on the boundary are found
/// exactly; an endpoint wins ties up to rounding. Returns `(x_max, f_max)`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let (lo, hi) = (a, b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx >= best.1 - 4.0 * f64::EPSILON * best.1.abs() {
            best = (x, fx.max(best.1));
        }
    }
    best
}

/// Golden-section search for the minimum of `f` on `[a, b]`.
pub fn golden_min(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (x, v) = golden_max(|t| -f(t), a, b, tol);
    (x, -v)
}

/// Location and value of a supremum over `[0,1]²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareSup {
    pub u: f64,
    pub v: f64,
    pub value: f64,
}

/// Supremum of `f` over `[0,1]²`: a `grid × grid` scan (evaluated in parallel,
/// argmax ties broken by lowest row-major index) followed by alternating
/// golden-section refinement in the cells adjacent to the grid maximiser.
pub fn sup_unit_square(
    f: &(impl Fn(f64, f64) -> f64 + Sync),
    grid: usize,
    opt_tol: f64,
) -> Result<SquareSup> {
    let grid = grid.max(3);
    let step = 1.0 / (grid - 1) as f64;
    let values: Vec<f64> = (0..grid * grid)
        .into_par_iter()
        .map(|idx| f((idx / grid) as f64 * step, (idx % grid) as f64 * step))
        .collect();

    let dump = || -> Vec<(f64, f64, f64)> {
        let stride = (grid / 20).max(1);
        (0..grid)
            .step_by(stride)
            .flat_map(|i| (0..grid).step_by(stride).map(move |j| (i, j)))
            .map(|(i, j)| (i as f64 * step, j as f64 * step, values[i * grid + j]))
            .collect()
    };

    if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Convergence {
            message: format!(
                "non-finite objective at grid point ({}, {})",
                (bad / grid) as f64 * step,
                (bad % grid) as f64 * step
            ),
            dump: dump(),
        });
    }

    let mut best_idx = 0;
    for (idx, &val) in values.iter().enumerate() {
        if val > values[best_idx] {
            best_idx = idx;
        }
    }
    let (bi, bj) = (best_idx / grid, best_idx % grid);
    let mut u = bi as f64 * step;
    let mut v = bj as f64 * step;
    let mut value = values[best_idx];
    let u_box = ((u - step).max(0.0), (u + step).min(1.0));
    let v_box = ((v - step).max(0.0), (v + step).min(1.0));
    let line_tol = (opt_tol * step).max(1e-12);

    const SWEEPS: usize = 40;
    for _ in 0..SWEEPS {
        let before = value;
        let (nu, fu) = golden_max(|s| f(s, v), u_box.0, u_box.1, line_tol);
        if fu > value {
            u = nu;
            value = fu;
        }
        let (nv, fv) = golden_max(|s| f(u, s), v_box.0, v_box.1, line_tol);
        if fv > value {
            v = nv;
            value = fv;
        }
        if value - before <= 0.01 * opt_tol * value.abs().max(f64::MIN_POSITIVE) {
            return Ok(SquareSup { u, v, value });
        }
    }
    Err(Error::Convergence {
        message: format!("coordinate refinement still moving after {SWEEPS} sweeps near ({u}, {v})"),
        dump: dump(),
    })
}

/// Supremum of a profile `f(x, b)` over `[0,1] × [0,∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripSup {
    pub x: f64,
    pub b: Extended,
    pub value: f64,
}

/// Grid coordinates for the strip: `x = u²` and `b = w/(1−w)` with `w = v³`,
/// so both axes are resolved near the corner `(0, 0)` and `v = 1` is `b = ∞`.
pub fn strip_point(u: f64, v: f64) -> (f64, Extended) {
    (u * u, Extended::from_unit(v * v * v))
}

/// Supremum of `f` over `[0,1] × [0,∞]`.
///
/// Runs [`sup_unit_square`] in the compactified coordinates of [`strip_point`],
/// then golden searches along the edges `b = 0` and `x = 0` in logarithmic
/// scale down to `exp(−log_depth)`, where profiles with a weight `r^{1−α}`
/// may peak at scales far below the grid spacing.
pub fn sup_strip(
    f: &(impl Fn(f64, Extended) -> f64 + Sync),
    grid: usize,
    opt_tol: f64,
    log_depth: f64,
) -> Result<StripSup> {
    let sq = sup_unit_square(
        &|u, v| {
            let (x, b) = strip_point(u, v);
            f(x, b)
        },
        grid,
        opt_tol,
    )?;
    let (x, b) = strip_point(sq.u, sq.v);
    let mut best = StripSup { x, b, value: sq.value };
    let tol = 1e-10 * log_depth;
    let (t, val) = golden_max(|t| f(t.exp(), Extended::Finite(0.0)), -log_depth, 0.0, tol);
    if val > best.value {
        best = StripSup { x: t.exp(), b: Extended::Finite(0.0), value: val };
    }
    let (t, val) = golden_max(|t| f(0.0, Extended::Finite(t.exp())), -log_depth, 0.0, tol);
    if val > best.value {
        best = StripSup { x: 0.0, b: Extended::Finite(t.exp()), value: val };
    }
    Ok(best)
}
