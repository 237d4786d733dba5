//! Finite element eigensolvers for `−d²/dr² − 1/(4r²) − V` and relatives.
//!
//! Every operator is discretised in its ground-state variable: with
//! `u = r^{(1−σ)/2} w` the Hardy-critical form `h_σ[u]` becomes `∫ r |w′|² dr`
//! and `‖u‖² = ∫ r^{1−σ} |w|² dr`, so the singular term never appears. On P1
//! elements this gives a generalised symmetric tridiagonal pencil
//! `(K − P) x = λ M x`, solved by Sturm counts (LDLᵀ inertia) and bisection.
//!
//! Natural boundary conditions are free endpoint values; Dirichlet conditions
//! drop the endpoint node.

use serde::{Deserialize, Serialize};

use crate::error::{domain, input, Error, Result};
use crate::potential::Potential;
use crate::quadrature::{GAUSS3_NODES, GAUSS3_WEIGHTS};

/// Far-field element growth ratio.
pub const GROWTH: f64 = 1.02;
/// Hard cap for the automatically chosen truncation radius.
pub const R_MAX_CAP: f64 = 1e7;
pub const MIN_ELEMENTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    /// Uniform everywhere.
    Uniform,
    /// Uniform over the support, geometrically growing beyond it.
    Geometric,
}

/// Which operator is discretised, and with which boundary behaviour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Boundary {
    /// Half-line `H₀ − V`: form domain condition at 0, Dirichlet truncation at `r_max`.
    DirichletOrigin,
    /// `H_b − V` on `[b, b+1]` with natural conditions at both ends.
    NaturalInterval { b: f64 },
    /// `H₀ − V` restricted to `[lo, hi]` with natural conditions.
    NaturalSegment { lo: f64, hi: f64 },
    /// `H_σ − V` on the half-line.
    Sigma { sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    pub kind: GridKind,
    /// Elements across the support (or the interval).
    pub n: usize,
    /// Truncation; `None` selects it from a coarse pre-solve.
    pub r_max: Option<f64>,
    pub boundary: Boundary,
}

impl Discretization {
    pub fn halfline(n: usize) -> Self {
        Discretization { kind: GridKind::Geometric, n, r_max: None, boundary: Boundary::DirichletOrigin }
    }

    pub fn interval(b: f64, n: usize) -> Self {
        Discretization {
            kind: GridKind::Uniform,
            n,
            r_max: None,
            boundary: Boundary::NaturalInterval { b },
        }
    }

    pub fn segment(lo: f64, hi: f64, n: usize) -> Self {
        Discretization {
            kind: GridKind::Uniform,
            n,
            r_max: None,
            boundary: Boundary::NaturalSegment { lo, hi },
        }
    }

    pub fn sigma(sigma: f64, n: usize) -> Self {
        Discretization { kind: GridKind::Geometric, n, r_max: None, boundary: Boundary::Sigma { sigma } }
    }

    fn validate(&self) -> Result<()> {
        if self.n < MIN_ELEMENTS {
            return Err(input(format!("grid needs at least {MIN_ELEMENTS} elements, got {}", self.n)));
        }
        if let Some(r) = self.r_max {
            if !(r > 0.0 && r.is_finite()) {
                return Err(input(format!("invalid truncation radius {r}")));
            }
        }
        Ok(())
    }
}

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    fn zeros(n: usize) -> Self {
        Tridiagonal { diag: vec![0.0; n], off: vec![0.0; n.saturating_sub(1)] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * x[i + 1];
                }
                s
            })
            .collect()
    }
}

/// `A x = λ M x` with `A = K − P` and mass `M`, on the unknowns `nodes`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    pub a: Tridiagonal,
    pub m: Tridiagonal,
    /// Node positions of the unknowns.
    pub nodes: Vec<f64>,
}

/// Nodes plus endpoint behaviour.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<f64>,
    pub free_lo: bool,
    pub free_hi: bool,
}

impl Mesh {
    /// Every element bisected.
    pub fn refined(&self) -> Mesh {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len());
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(*self.nodes.last().unwrap());
        Mesh { nodes, ..*self }
    }
}

/// Assembles the P1 pencil for `∫ p |w′|² − ∫ V q |w|²` against `∫ q |w|²`,
/// with three-point Gauss rules per element.
pub fn assemble_pencil(
    mesh: &Mesh,
    p: impl Fn(f64) -> f64,
    q: impl Fn(f64) -> f64,
    v: impl Fn(f64) -> f64,
) -> Result<Pencil> {
    let x = &mesh.nodes;
    let n = x.len();
    if n < 2 {
        return Err(input("mesh needs at least two nodes"));
    }
    let mut a = Tridiagonal::zeros(n);
    let mut m = Tridiagonal::zeros(n);
    for e in 0..n - 1 {
        let (lo, hi) = (x[e], x[e + 1]);
        let h = hi - lo;
        if !(h > 0.0) {
            return Err(input(format!("mesh nodes not increasing at {lo}")));
        }
        let (mid, half) = (0.5 * (lo + hi), 0.5 * h);
        let mut kp = 0.0;
        let mut mass = [0.0; 3];
        let mut pot = [0.0; 3];
        for (t, w) in GAUSS3_NODES.iter().zip(GAUSS3_WEIGHTS.iter()) {
            let r = mid + half * t;
            let phi1 = 0.5 * (1.0 + t);
            let phi0 = 1.0 - phi1;
            let wq = w * half * q(r);
            let vr = v(r);
            if !vr.is_finite() {
                return Err(input(format!("potential is not finite at r = {r}")));
            }
            kp += w * half * p(r);
            let prods = [phi0 * phi0, phi0 * phi1, phi1 * phi1];
            for k in 0..3 {
                mass[k] += wq * prods[k];
                pot[k] += wq * vr * prods[k];
            }
        }
        let stiff = kp / (h * h);
        a.diag[e] += stiff - pot[0];
        a.diag[e + 1] += stiff - pot[2];
        a.off[e] += -stiff - pot[1];
        m.diag[e] += mass[0];
        m.diag[e + 1] += mass[2];
        m.off[e] += mass[1];
    }
    let first = usize::from(!mesh.free_lo);
    let last = if mesh.free_hi { n } else { n - 1 };
    if last <= first {
        return Err(input("no unknowns left after boundary conditions"));
    }
    let cut = |t: &Tridiagonal| Tridiagonal {
        diag: t.diag[first..last].to_vec(),
        off: t.off[first..last - 1].to_vec(),
    };
    Ok(Pencil { a: cut(&a), m: cut(&m), nodes: x[first..last].to_vec() })
}

/// Number of eigenvalues of the pencil strictly below `lambda`.
pub fn count_below(pencil: &Pencil, lambda: f64) -> usize {
    let (a, m) = (&pencil.a, &pencil.m);
    let n = a.len();
    let mut count = 0;
    let mut d = a.diag[0] - lambda * m.diag[0];
    for i in 0..n {
        if i > 0 {
            let b = a.off[i - 1] - lambda * m.off[i - 1];
            let prev = if d == 0.0 { f64::EPSILON * (b.abs() + f64::MIN_POSITIVE) } else { d };
            d = a.diag[i] - lambda * m.diag[i] - b * b / prev;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// A lower bound for the spectrum: `A ≥ −(sup V₊) M` since the stiffness part is
/// nonnegative, widened until the Sturm count vanishes.
fn spectrum_floor(pencil: &Pencil, vmax: f64) -> f64 {
    let mut lo = -vmax.max(0.0) - 1.0;
    while count_below(pencil, lo) > 0 {
        lo = 2.0 * lo - 1.0;
    }
    lo
}

/// Shallowest eigenvalue magnitude treated as nonzero.
const TINY: f64 = 1e-300;

/// The `j`-th eigenvalue (0-based) in `[floor, 0)`, by bisection in `log|λ|`.
fn bisect_eigenvalue(pencil: &Pencil, j: usize, floor: f64) -> f64 {
    // t = −ln(−λ); λ increases with t
    let mut t_lo = -(-floor).ln();
    let mut t_hi = -TINY.ln();
    for _ in 0..200 {
        let t = 0.5 * (t_lo + t_hi);
        let lambda = -(-t).exp();
        if count_below(pencil, lambda) > j {
            t_hi = t;
        } else {
            t_lo = t;
        }
        if t_hi - t_lo < 1e-15 {
            break;
        }
    }
    -(-0.5 * (t_lo + t_hi)).exp()
}

/// All eigenvalues below `threshold ≤ 0`, ascending.
pub fn eigenvalues_below(pencil: &Pencil, threshold: f64, vmax: f64) -> Vec<f64> {
    let count = count_below(pencil, threshold.min(-TINY));
    let floor = spectrum_floor(pencil, vmax);
    (0..count).map(|j| bisect_eigenvalue(pencil, j, floor)).collect()
}

/// The `m` lowest eigenvalues (any sign), ascending, by plain bisection.
pub fn lowest_eigenvalues(pencil: &Pencil, m: usize, vmax: f64) -> Vec<f64> {
    let floor = spectrum_floor(pencil, vmax);
    let mut ceil = 1.0_f64;
    while count_below(pencil, ceil) < m.min(pencil.a.len()) {
        ceil *= 2.0;
    }
    (0..m.min(pencil.a.len()))
        .map(|j| {
            let (mut lo, mut hi) = (floor, ceil);
            for _ in 0..300 {
                let mid = 0.5 * (lo + hi);
                if count_below(pencil, mid) > j {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo <= 1e-15 * (lo.abs() + hi.abs()) + 1e-300 {
                    break;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Solves `(A − σM) x = y` by LDLᵀ without pivoting.
fn shifted_solve(pencil: &Pencil, sigma: f64, y: &[f64]) -> Vec<f64> {
    let (a, m) = (&pencil.a, &pencil.m);
    let n = a.len();
    let mut d = vec![0.0; n];
    let mut l = vec![0.0; n];
    let guard = |v: f64| if v == 0.0 { 1e-300 } else { v };
    d[0] = guard(a.diag[0] - sigma * m.diag[0]);
    for i in 1..n {
        let b = a.off[i - 1] - sigma * m.off[i - 1];
        l[i] = b / d[i - 1];
        d[i] = guard(a.diag[i] - sigma * m.diag[i] - l[i] * b);
    }
    let mut z = y.to_vec();
    for i in 1..n {
        z[i] -= l[i] * z[i - 1];
    }
    for i in 0..n {
        z[i] /= d[i];
    }
    for i in (0..n - 1).rev() {
        z[i] -= l[i + 1] * z[i + 1];
    }
    z
}

/// Eigenvector for an eigenvalue `lambda` by inverse iteration, normalised to
/// `xᵀ M x = 1` with a positive largest entry.
pub fn eigenvector(pencil: &Pencil, lambda: f64) -> Vec<f64> {
    let n = pencil.a.len();
    let shift = lambda - 1e-10 * lambda.abs().max(1e-12);
    let mut x = vec![1.0; n];
    for _ in 0..8 {
        let y = pencil.m.mul(&x);
        x = shifted_solve(pencil, shift, &y);
        let norm = x.iter().zip(pencil.m.mul(&x)).map(|(a, b)| a * b).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
    }
    let big = x.iter().copied().fold(0.0_f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
    if big < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    x
}

/// An assembled problem together with what is needed to rebuild it on other grids.
#[derive(Debug, Clone)]
pub struct EigenProblem {
    pub potential: Potential,
    pub disc: Discretization,
    pub mesh: Mesh,
    pub pencil: Pencil,
    vmax: f64,
}

impl EigenProblem {
    fn mass_exponent(&self) -> f64 {
        match self.disc.boundary {
            Boundary::Sigma { sigma } => 1.0 - sigma,
            _ => 1.0,
        }
    }

    fn assemble_on(&self, mesh: Mesh) -> Result<EigenProblem> {
        let pencil = assemble_weighted(&mesh, self.mass_exponent(), &self.potential)?;
        Ok(EigenProblem { mesh, pencil, ..self.clone() })
    }

    /// Negative eigenvalues of this grid alone.
    pub fn negative_eigenvalues(&self) -> Vec<f64> {
        eigenvalues_below(&self.pencil, 0.0, self.vmax)
    }

    pub fn lowest(&self, m: usize) -> Vec<f64> {
        lowest_eigenvalues(&self.pencil, m, self.vmax)
    }

    /// Mesh with the truncated end pushed out by a factor of two in the
    /// variable that generated it.
    fn extended_mesh(&self) -> Option<Mesh> {
        let nodes = &self.mesh.nodes;
        let n = nodes.len();
        match self.disc.boundary {
            Boundary::NaturalInterval { .. } | Boundary::NaturalSegment { .. } => None,
            Boundary::Sigma { sigma } if sigma == 2.0 => {
                let (lo, hi) = (nodes[0].ln(), nodes[n - 1].ln());
                let span = hi - lo;
                let mut xs: Vec<f64> = nodes.iter().map(|r| r.ln()).collect();
                let step_lo = xs[1] - xs[0];
                let step_hi = xs[n - 1] - xs[n - 2];
                let mut front = grow(lo, lo - 0.5 * span, -step_lo);
                front.reverse();
                let back = grow(hi, hi + 0.5 * span, step_hi);
                front.pop();
                let mut all = front;
                all.append(&mut xs);
                all.extend(back.into_iter().skip(1));
                Some(Mesh { nodes: all.into_iter().map(f64::exp).collect(), ..self.mesh.clone() })
            }
            Boundary::Sigma { sigma } if sigma > 2.0 => {
                let q = (2.0 - sigma) / 2.0;
                let s0 = nodes[0].powf(q);
                let step = s0 - nodes[1].powf(q);
                let mut ext: Vec<f64> =
                    grow(s0, 2.0 * s0, step).into_iter().skip(1).map(|s| s.powf(1.0 / q)).collect();
                ext.reverse();
                ext.extend_from_slice(nodes);
                Some(Mesh { nodes: ext, ..self.mesh.clone() })
            }
            _ => {
                let (r0, r1) = (nodes[n - 2], nodes[n - 1]);
                let mut out = nodes.clone();
                out.extend(grow(r1, 2.0 * r1, r1 - r0).into_iter().skip(1));
                Some(Mesh { nodes: out, ..self.mesh.clone() })
            }
        }
    }
}

/// Points from `start` towards `end` with first step `step` growing by
/// [`GROWTH`]; the last point is `end`.
fn grow(start: f64, end: f64, mut step: f64) -> Vec<f64> {
    let mut pts = vec![start];
    let dir = (end - start).signum();
    let mut x = start;
    loop {
        step *= GROWTH;
        let next = x + step;
        if (end - next) * dir <= 0.5 * step.abs() {
            pts.push(end);
            return pts;
        }
        pts.push(next);
        x = next;
    }
}

fn assemble_weighted(mesh: &Mesh, q_exponent: f64, v: &Potential) -> Result<Pencil> {
    if q_exponent == 1.0 {
        assemble_pencil(mesh, |r| r, |r| r, |r| v.eval(r))
    } else {
        assemble_pencil(mesh, |r| r, |r| r.powf(q_exponent), |r| v.eval(r))
    }
}

/// Uniform elements on `[lo, hi]` (about `n` of them) with the given interior
/// breakpoints inserted.
fn uniform_nodes(lo: f64, hi: f64, n: usize, breaks: &[f64]) -> Vec<f64> {
    let mut nodes: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let h = (hi - lo) / n as f64;
    for &b in breaks {
        if b > lo && b < hi {
            let i = ((b - lo) / h).round() as usize;
            if (nodes[i] - b).abs() < 0.25 * h && i > 0 && i < n {
                nodes[i] = b;
            } else {
                nodes.push(b);
            }
        }
    }
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    nodes
}

/// Half-line node set: uniform core `[0, 1.25·hi]` then growth to `r_max`.
fn halfline_nodes(kind: GridKind, n: usize, support_hi: f64, r_max: f64, breaks: &[f64]) -> Vec<f64> {
    match kind {
        GridKind::Uniform => uniform_nodes(0.0, r_max, n, breaks),
        GridKind::Geometric => {
            let core = (1.25 * support_hi).min(r_max);
            let mut nodes = uniform_nodes(0.0, core, n, breaks);
            if r_max > core {
                let step = core / n as f64;
                let mut tail = grow(core, r_max, step);
                tail.remove(0);
                let inner: Vec<f64> =
                    breaks.iter().copied().filter(|&b| b > core && b < r_max).collect();
                tail.extend(inner);
                tail.sort_by(f64::total_cmp);
                tail.dedup();
                nodes.extend(tail);
            }
            nodes
        }
    }
}

fn check_potential(v: &Potential) -> Result<()> {
    if let Some((lo, hi)) = v.support() {
        if !(lo >= 0.0 && hi.is_finite()) {
            return Err(input(format!("potential support ({lo}, {hi}) is not a bounded subset of [0, ∞)")));
        }
    }
    Ok(())
}

/// Truncation radius for the half-line: `3·hi + 10/√|λ_shallow|` from a coarse
/// solve on a long grid, capped.
fn auto_r_max(v: &Potential, support_hi: f64, q_exponent: f64) -> Result<f64> {
    let base = 3.0 * support_hi + 10.0;
    if v.support().is_none() || !v.has_positive_part() {
        return Ok(base);
    }
    let n = 400;
    let nodes = halfline_nodes(GridKind::Geometric, n, support_hi, R_MAX_CAP, &v.breakpoints());
    let mesh = Mesh { nodes, free_lo: true, free_hi: false };
    let pencil = assemble_weighted(&mesh, q_exponent, v)?;
    let evs = eigenvalues_below(&pencil, 0.0, v.max_value());
    Ok(match evs.last() {
        Some(&shallow) => (3.0 * support_hi + 10.0 / (-shallow).sqrt()).clamp(base, R_MAX_CAP),
        None => base,
    })
}

fn vmax_of(v: &Potential) -> f64 {
    v.max_value().max(0.0)
}

/// `H₀ − V` on the half-line, in `w = u/√r`.
pub fn assemble_halfline(v: &Potential, d: &Discretization) -> Result<EigenProblem> {
    d.validate()?;
    if d.boundary != Boundary::DirichletOrigin {
        return Err(input("assemble_halfline needs the dirichlet-origin boundary tag"));
    }
    check_potential(v)?;
    let hi = v.support().map(|s| s.1).unwrap_or(1.0).max(1e-3);
    let r_max = match d.r_max {
        Some(r) => r,
        None => auto_r_max(v, hi, 1.0)?,
    };
    let nodes = halfline_nodes(d.kind, d.n, hi, r_max, &v.breakpoints());
    let mesh = Mesh { nodes, free_lo: true, free_hi: false };
    let pencil = assemble_weighted(&mesh, 1.0, v)?;
    Ok(EigenProblem {
        potential: v.clone(),
        disc: Discretization { r_max: Some(r_max), ..*d },
        mesh,
        pencil,
        vmax: vmax_of(v),
    })
}

/// `H_b − V` on `[b, b+1]` with natural conditions at both ends.
pub fn assemble_interval(v: &Potential, b: f64, d: &Discretization) -> Result<EigenProblem> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(domain(format!("interval start b must be positive, got {b}")));
    }
    assemble_segment(v, b, b + 1.0, &Discretization { boundary: Boundary::NaturalInterval { b }, ..*d })
}

/// `H₀ − V` restricted to `[lo, hi]` with natural conditions at both ends.
pub fn assemble_segment(v: &Potential, lo: f64, hi: f64, d: &Discretization) -> Result<EigenProblem> {
    d.validate()?;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(domain(format!("segment [{lo}, {hi}] must satisfy 0 < lo < hi")));
    }
    check_potential(v)?;
    let nodes = uniform_nodes(lo, hi, d.n, &v.breakpoints());
    let mesh = Mesh { nodes, free_lo: true, free_hi: true };
    let pencil = assemble_weighted(&mesh, 1.0, v)?;
    let boundary = match d.boundary {
        b @ Boundary::NaturalInterval { .. } => b,
        _ => Boundary::NaturalSegment { lo, hi },
    };
    Ok(EigenProblem {
        potential: v.clone(),
        disc: Discretization { r_max: Some(hi), boundary, ..*d },
        mesh,
        pencil,
        vmax: vmax_of(v),
    })
}

/// `H_σ − V` in `w = r^{(σ−1)/2} u`: stiffness weight `r`, mass weight `r^{1−σ}`.
///
/// The mesh is the half-line mesh of the reduced variable `s = r^{(2−σ)/2}`
/// mapped back to `r` (`σ ≠ 2`), or a mesh in `x = log r` (`σ = 2`).
pub fn assemble_sigma(v: &Potential, sigma: f64, d: &Discretization) -> Result<EigenProblem> {
    d.validate()?;
    if !sigma.is_finite() {
        return Err(domain("sigma must be finite"));
    }
    check_potential(v)?;
    let d = Discretization { boundary: Boundary::Sigma { sigma }, ..*d };
    let qexp = 1.0 - sigma;
    let (mesh, r_max) = if sigma == 2.0 {
        sigma2_mesh(v, &d)?
    } else {
        let q = (2.0 - sigma) / 2.0;
        let reduced = crate::sigma::transform_potential(v, sigma)?;
        let s_hi = reduced.support().map(|s| s.1).unwrap_or(1.0).max(1e-3);
        let s_max = match d.r_max {
            Some(r) => r.powf(q),
            None => auto_r_max(&reduced, s_hi, 1.0)?,
        };
        let s_nodes = halfline_nodes(d.kind, d.n, s_hi, s_max, &reduced.breakpoints());
        if q > 0.0 {
            let nodes: Vec<f64> = s_nodes.iter().map(|s| s.powf(1.0 / q)).collect();
            let r_max = *nodes.last().unwrap();
            (Mesh { nodes, free_lo: true, free_hi: false }, r_max)
        } else {
            let mut nodes: Vec<f64> = s_nodes.iter().skip(1).map(|s| s.powf(1.0 / q)).collect();
            nodes.reverse();
            let r_max = *nodes.last().unwrap();
            (Mesh { nodes, free_lo: false, free_hi: true }, r_max)
        }
    };
    if mesh.nodes.windows(2).any(|w| !(w[1] > w[0])) || mesh.nodes.iter().any(|x| !x.is_finite()) {
        return Err(input(format!("sigma = {sigma} produced a degenerate mesh; adjust the grid or r_max")));
    }
    let pencil = assemble_weighted(&mesh, qexp, v)?;
    Ok(EigenProblem {
        potential: v.clone(),
        disc: Discretization { r_max: Some(r_max), ..d },
        mesh,
        pencil,
        vmax: vmax_of(v),
    })
}

/// Mesh for `σ = 2` built in `x = log r`: uniform over the log-support, growing
/// outwards to `±L` with Dirichlet ends.
fn sigma2_mesh(v: &Potential, d: &Discretization) -> Result<(Mesh, f64)> {
    let (lo, hi) = v.support().unwrap_or((1.0, std::f64::consts::E));
    if !(lo > 0.0) {
        return Err(domain("σ = 2 needs a support bounded away from r = 0"));
    }
    let (xl, xh) = (lo.ln(), hi.ln());
    let width = (xh - xl).max(1e-3);
    let breaks: Vec<f64> = v.breakpoints().into_iter().filter(|&r| r > 0.0).map(f64::ln).collect();
    let whole = crate::sigma::WholeLinePotential::from_halfline(v)?;
    let reach = match d.r_max {
        Some(r) => r.ln() - xh,
        None => crate::sigma::whole_line_reach(&whole)?,
    }
    .max(width);
    let step = width / d.n as f64;
    let core = uniform_nodes(xl, xh, d.n, &breaks);
    let mut front = grow(xl, xl - reach, -step);
    front.reverse();
    front.pop();
    let back = grow(xh, xh + reach, step);
    let mut xs = front;
    xs.extend(core);
    xs.extend(back.into_iter().skip(1));
    let nodes: Vec<f64> = xs.into_iter().map(f64::exp).collect();
    let r_max = *nodes.last().unwrap();
    Ok((Mesh { nodes, free_lo: false, free_hi: false }, r_max))
}

/// How [`negative_spectrum`] estimates discretisation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinePolicy {
    /// Compare against a grid with every element bisected.
    pub doubling: bool,
    /// Compare against a grid with the truncated end pushed out.
    pub extend_domain: bool,
}

impl Default for RefinePolicy {
    fn default() -> Self {
        RefinePolicy { doubling: true, extend_domain: true }
    }
}

/// An eigenvalue too shallow to certify on this grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Unresolved {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub gamma: f64,
    /// Resolved negative eigenvalues, ascending (refined grid).
    pub eigenvalues: Vec<f64>,
    /// Error estimate per resolved eigenvalue.
    pub errors: Vec<f64>,
    /// `Σ |λ|^γ` over the resolved eigenvalues.
    pub riesz_mean: f64,
    /// Bound on how far `riesz_mean` may move within the error estimates,
    /// including the unresolved states.
    pub riesz_error: f64,
    pub unresolved: Vec<Unresolved>,
    pub discretization: Discretization,
    /// Unknowns of the reported (refined) grid.
    pub unknowns: usize,
}

impl SpectrumResult {
    pub fn lowest(&self) -> Option<f64> {
        let a = self.eigenvalues.first().copied();
        let b = self.unresolved.first().map(|u| u.value);
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        }
    }

    /// Resolved plus unresolved negative eigenvalues.
    pub fn count_all(&self) -> usize {
        self.eigenvalues.len() + self.unresolved.len()
    }
}

/// `Σ |λ|^γ`; `γ = 0` counts.
pub fn riesz_sum(eigenvalues: &[f64], gamma: f64) -> f64 {
    eigenvalues.iter().map(|l| if gamma == 0.0 { 1.0 } else { (-l).powf(gamma) }).fold(0.0, |a, b| a + b)
}

/// Negative spectrum with Richardson-type error estimates and the Riesz mean.
pub fn negative_spectrum(problem: &EigenProblem, gamma: f64, policy: RefinePolicy) -> Result<SpectrumResult> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(domain(format!("gamma must be nonnegative, got {gamma}")));
    }
    let base = problem.negative_eigenvalues();
    let (reported, fine) = if policy.doubling {
        let fine = problem.assemble_on(problem.mesh.refined())?;
        (fine.negative_eigenvalues(), Some(fine))
    } else {
        (base.clone(), None)
    };
    let extended = match (policy.extend_domain, problem.extended_mesh()) {
        (true, Some(mesh)) => Some(problem.assemble_on(mesh)?.negative_eigenvalues()),
        _ => None,
    };

    let scale = reported.first().map(|l| l.abs()).unwrap_or(0.0);
    let mut eigenvalues = Vec::new();
    let mut errors = Vec::new();
    let mut unresolved = Vec::new();
    let mut bad = Vec::new();
    for (j, &lam) in reported.iter().enumerate() {
        let mut err = 0.0;
        if fine.is_some() {
            err += match base.get(j) {
                Some(&b) => (lam - b).abs() / 3.0,
                None => lam.abs(),
            };
        }
        if let Some(ext) = &extended {
            err += match ext.get(j) {
                Some(&e) => (e - lam).abs(),
                None => lam.abs(),
            };
        }
        if err > 0.5 * lam.abs() && lam.abs() > 1e-6 * scale && j == 0 {
            bad.push((j as f64, base.get(j).copied().unwrap_or(f64::NAN), lam));
        }
        if lam.abs() < 3.0 * err {
            unresolved.push(Unresolved { value: lam, error: err });
        } else {
            eigenvalues.push(lam);
            errors.push(err);
        }
    }
    if !bad.is_empty() {
        let mut dump: Vec<(f64, f64, f64)> =
            base.iter().enumerate().map(|(j, &b)| (j as f64, b, reported.get(j).copied().unwrap_or(f64::NAN))).collect();
        dump.extend(bad);
        return Err(Error::Convergence {
            message: "lowest eigenvalue not stable under grid refinement".into(),
            dump,
        });
    }

    let riesz_mean = riesz_sum(&eigenvalues, gamma);
    let power = |x: f64| if gamma == 0.0 { 1.0 } else { x.powf(gamma) };
    let mut riesz_error: f64 = eigenvalues
        .iter()
        .zip(&errors)
        .map(|(l, e)| if gamma == 0.0 { 0.0 } else { power(l.abs() + e) - power(l.abs()) })
        .fold(0.0, |a, b| a + b);
    riesz_error += unresolved.iter().map(|u| power(u.value.abs() + u.error)).sum::<f64>();

    let unknowns = fine.as_ref().map(|f| f.pencil.a.len()).unwrap_or(problem.pencil.a.len());
    Ok(SpectrumResult {
        gamma,
        eigenvalues,
        errors,
        riesz_mean,
        riesz_error,
        unresolved,
        discretization: problem.disc,
        unknowns,
    })
}
