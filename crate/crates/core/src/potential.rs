//! Potentials `V` on the half-line with known compact support.

use serde::{Deserialize, Serialize};

use crate::error::{domain, input, Result};
use crate::expr::{BinOp, Expr};
use crate::quadrature::integrate_pieces;

/// A constant piece `V = value` on `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub value: f64,
}

/// Samples `(r_i, V_i)` with strictly increasing `r_i`, linearly interpolated and
/// zero outside `[r_0, r_n]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    r: Vec<f64>,
    v: Vec<f64>,
}

impl Table {
    pub fn new(r: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if r.len() != v.len() {
            return Err(input("table columns differ in length"));
        }
        if r.len() < 2 {
            return Err(input("a table needs at least two rows"));
        }
        if r[0] < 0.0 {
            return Err(input(format!("table starts at negative r = {}", r[0])));
        }
        for (i, w) in r.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(input(format!(
                    "table r must be strictly increasing (rows {} and {}: {} then {})",
                    i + 1,
                    i + 2,
                    w[0],
                    w[1]
                )));
            }
        }
        if let Some(bad) = r.iter().chain(v.iter()).find(|x| !x.is_finite()) {
            return Err(input(format!("non-finite table entry {bad}")));
        }
        Ok(Table { r, v })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.r
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.r.len();
        if !(x >= self.r[0] && x <= self.r[n - 1]) {
            return 0.0;
        }
        let i = self.r.partition_point(|&t| t <= x).clamp(1, n - 1);
        let (r0, r1) = (self.r[i - 1], self.r[i]);
        let t = (x - r0) / (r1 - r0);
        self.v[i - 1] + t * (self.v[i] - self.v[i - 1])
    }
}

/// `V(r) = scale · V_inner(factor · r^exponent)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Change {
    pub scale: f64,
    pub factor: f64,
    pub exponent: f64,
}

impl Change {
    fn apply(&self, r: f64) -> f64 {
        if self.exponent == 1.0 {
            self.factor * r
        } else {
            self.factor * r.powf(self.exponent)
        }
    }

    /// Preimage of an inner-variable point.
    pub fn invert(&self, s: f64) -> f64 {
        if self.exponent == 1.0 {
            s / self.factor
        } else {
            (s / self.factor).powf(1.0 / self.exponent)
        }
    }

    /// `self` applied after `inner`, i.e. the change for `V ↦ self(inner(V))`.
    fn compose(&self, inner: &Change) -> Change {
        Change {
            scale: self.scale * inner.scale,
            factor: inner.factor * self.factor.powf(inner.exponent),
            exponent: self.exponent * inner.exponent,
        }
    }

    fn map_interval(&self, lo: f64, hi: f64) -> Result<(f64, f64)> {
        if self.exponent < 0.0 && lo <= 0.0 {
            return Err(domain("support touching r = 0 maps to an unbounded set"));
        }
        let (a, b) = (self.invert(lo), self.invert(hi));
        Ok(if a <= b { (a, b) } else { (b, a) })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Potential {
    Zero,
    Piecewise(Vec<Segment>),
    Table(Table),
    Expression { expr: ExprText, support: (f64, f64) },
    Transformed { inner: Box<Potential>, change: Change },
    PositivePart(Box<Potential>),
    /// `(V − 1/(4r²))₊`.
    HardyExcess(Box<Potential>),
}

/// An expression stored together with its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprText(pub Expr);

impl Serialize for ExprText {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for ExprText {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Expr::parse(&s).map(ExprText).map_err(serde::de::Error::custom)
    }
}

/// Threshold below which an expression counts as vanished when detecting support.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

impl Potential {
    /// Piecewise-constant potential. Segments are sorted; overlaps are rejected.
    pub fn piecewise(mut segments: Vec<Segment>) -> Result<Self> {
        for s in &segments {
            if !(s.lo >= 0.0 && s.hi > s.lo && s.hi.is_finite() && s.value.is_finite()) {
                return Err(input(format!("invalid segment ({}, {}, {})", s.lo, s.hi, s.value)));
            }
        }
        segments.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for w in segments.windows(2) {
            if w[1].lo < w[0].hi {
                return Err(input(format!(
                    "segments ({}, {}) and ({}, {}) overlap",
                    w[0].lo, w[0].hi, w[1].lo, w[1].hi
                )));
            }
        }
        segments.retain(|s| s.value != 0.0);
        if segments.is_empty() {
            return Ok(Potential::Zero);
        }
        Ok(Potential::Piecewise(segments))
    }

    /// `value` on `(lo, hi)`.
    pub fn boxed(lo: f64, hi: f64, value: f64) -> Result<Self> {
        Potential::piecewise(vec![Segment { lo, hi, value }])
    }

    pub fn table(r: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        Ok(Potential::Table(Table::new(r, v)?))
    }

    /// Expression potential, zero outside `support`. The expression must be
    /// finite on a probe grid of the support.
    pub fn expression(expr: Expr, support: (f64, f64)) -> Result<Self> {
        let (lo, hi) = support;
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
            return Err(input(format!("invalid support ({lo}, {hi})")));
        }
        const PROBES: usize = 1000;
        for i in 0..=PROBES {
            let r = lo + (hi - lo) * i as f64 / PROBES as f64;
            let r = if r == 0.0 { 1e-300_f64.max(hi * 1e-12) } else { r };
            let v = expr.eval(r);
            if !v.is_finite() {
                return Err(input(format!("expression is not finite at r = {r} (value {v})")));
            }
        }
        Ok(Potential::Expression { expr: ExprText(expr), support })
    }

    /// Expression potential whose support is the region where `|V| > 1e−12`,
    /// found by a scan of `[1e−6, 1e4]` and refined by bisection.
    pub fn expression_auto(expr: Expr) -> Result<Self> {
        let support = detect_support(&|r| expr.eval(r))
            .ok_or_else(|| input("expression vanishes (below 1e-12) on [1e-6, 1e4]"))?;
        Potential::expression(expr, support)
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Piecewise(segs) => {
                let i = segs.partition_point(|s| s.lo <= r);
                if i > 0 && r < segs[i - 1].hi {
                    segs[i - 1].value
                } else {
                    0.0
                }
            }
            Potential::Table(t) => t.eval(r),
            Potential::Expression { expr, support } => {
                if r >= support.0 && r <= support.1 {
                    expr.0.eval(r)
                } else {
                    0.0
                }
            }
            Potential::Transformed { inner, change } => change.scale * inner.eval(change.apply(r)),
            Potential::PositivePart(inner) => inner.eval(r).max(0.0),
            Potential::HardyExcess(inner) => {
                let v = inner.eval(r);
                if v > 0.0 {
                    (v - 0.25 / (r * r)).max(0.0)
                } else {
                    0.0
                }
            }
        }
    }

    /// Closed support hull `[lo, hi]`, or `None` for the zero potential.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            Potential::Zero => None,
            Potential::Piecewise(segs) => Some((segs[0].lo, segs[segs.len() - 1].hi)),
            Potential::Table(t) => Some((t.r[0], t.r[t.r.len() - 1])),
            Potential::Expression { support, .. } => Some(*support),
            Potential::Transformed { inner, change } => {
                let (lo, hi) = inner.support()?;
                change.map_interval(lo, hi).ok()
            }
            Potential::PositivePart(inner) | Potential::HardyExcess(inner) => inner.support(),
        }
    }

    /// Points where `V` may fail to be smooth, sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = match self {
            Potential::Zero => vec![],
            Potential::Piecewise(segs) => segs.iter().flat_map(|s| [s.lo, s.hi]).collect(),
            Potential::Table(t) => t.r.clone(),
            Potential::Expression { support, .. } => vec![support.0, support.1],
            Potential::Transformed { inner, change } => {
                inner.breakpoints().into_iter().filter(|&s| s > 0.0).map(|s| change.invert(s)).collect()
            }
            Potential::PositivePart(inner) | Potential::HardyExcess(inner) => inner.breakpoints(),
        };
        pts.retain(|x| x.is_finite() && *x >= 0.0);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Whether `V ≥ 0` is known from the representation.
    pub fn known_nonnegative(&self) -> Option<bool> {
        match self {
            Potential::Zero | Potential::PositivePart(_) | Potential::HardyExcess(_) => Some(true),
            Potential::Piecewise(segs) => Some(segs.iter().all(|s| s.value >= 0.0)),
            Potential::Table(t) => Some(t.v.iter().all(|&v| v >= 0.0)),
            Potential::Expression { .. } => None,
            Potential::Transformed { inner, change } => {
                inner.known_nonnegative().map(|nn| nn && change.scale > 0.0)
            }
        }
    }

    /// Whether `V` has a positive part (exact for piecewise and table data,
    /// sampled otherwise).
    pub fn has_positive_part(&self) -> bool {
        self.max_value() > 0.0
    }

    /// `sup V` over the support: exact for piecewise and table data, sampled on
    /// 4000 points plus breakpoints otherwise.
    pub fn max_value(&self) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Piecewise(segs) => segs.iter().map(|s| s.value).fold(0.0, f64::max),
            Potential::Table(t) => t.v.iter().copied().fold(0.0, f64::max),
            Potential::PositivePart(inner) => inner.max_value().max(0.0),
            Potential::Transformed { inner, change } if change.scale > 0.0 => {
                change.scale * inner.max_value()
            }
            _ => {
                let Some((lo, hi)) = self.support() else { return 0.0 };
                let samples = (0..=4000).map(|i| lo + (hi - lo) * i as f64 / 4000.0);
                samples
                    .chain(self.breakpoints())
                    .map(|r| self.eval(r))
                    .filter(|v| v.is_finite())
                    .fold(0.0, f64::max)
            }
        }
    }

    /// `(V − 1/(4r²))₊`, the weight of the bound for `−d²/dr² − V` without
    /// the Hardy term.
    pub fn hardy_excess(&self) -> Potential {
        match self {
            Potential::Zero => Potential::Zero,
            other => Potential::HardyExcess(Box::new(other.clone())),
        }
    }

    pub fn positive_part(&self) -> Potential {
        match self.known_nonnegative() {
            Some(true) => self.clone(),
            _ => match self {
                Potential::Piecewise(segs) => Potential::piecewise(
                    segs.iter().map(|s| Segment { value: s.value.max(0.0), ..*s }).collect(),
                )
                .unwrap_or(Potential::Zero),
                _ => Potential::PositivePart(Box::new(self.clone())),
            },
        }
    }

    /// `∫_lo^hi V₊(r)^p r^α dr` (restricted to the support). Exact for piecewise
    /// data, adaptive Simpson with breakpoints otherwise.
    pub fn weighted_integral(&self, lo: f64, hi: f64, p: f64, alpha: f64, tol: f64) -> Result<f64> {
        if !(p > 0.0) {
            return Err(domain(format!("power p must be positive, got {p}")));
        }
        let Some((slo, shi)) = self.support() else { return Ok(0.0) };
        let (a, b) = (lo.max(slo), hi.min(shi));
        if !(b > a) {
            return Ok(0.0);
        }
        let power = |r: f64| if alpha == 0.0 { 1.0 } else { r.powf(alpha) };
        match self {
            Potential::Piecewise(segs) => {
                let mut total = 0.0;
                for s in segs {
                    let (x, y) = (s.lo.max(a), s.hi.min(b));
                    if y > x && s.value > 0.0 {
                        total += s.value.powf(p) * power_integral(x, y, alpha);
                    }
                }
                Ok(total)
            }
            _ => {
                let f = |r: f64| {
                    let v = self.eval(r).max(0.0);
                    if v == 0.0 {
                        0.0
                    } else {
                        v.powf(p) * power(r)
                    }
                };
                integrate_pieces(&f, a, b, &self.breakpoints(), tol)
            }
        }
    }

    /// `∫ V₊^p r^α dr` over the whole support.
    pub fn total_weighted_integral(&self, p: f64, alpha: f64, tol: f64) -> Result<f64> {
        match self.support() {
            None => Ok(0.0),
            Some((lo, hi)) => self.weighted_integral(lo, hi, p, alpha, tol),
        }
    }

    /// `V ↦ scale · V(factor · r^exponent)`. Exact for piecewise and expression
    /// potentials; nested changes are folded into one.
    pub fn change_variables(&self, change: Change) -> Result<Potential> {
        if !(change.factor > 0.0 && change.exponent != 0.0 && change.scale.is_finite()) {
            return Err(domain("change of variables needs factor > 0 and exponent ≠ 0"));
        }
        Ok(match self {
            Potential::Zero => Potential::Zero,
            Potential::Piecewise(segs) => {
                let mut out = Vec::with_capacity(segs.len());
                for s in segs {
                    let (lo, hi) = change.map_interval(s.lo, s.hi)?;
                    out.push(Segment { lo, hi, value: change.scale * s.value });
                }
                Potential::piecewise(out)?
            }
            Potential::Expression { expr, support } => {
                let arg = if change.exponent == 1.0 {
                    Expr::bin(BinOp::Mul, Expr::Num(change.factor), Expr::Var)
                } else {
                    Expr::bin(
                        BinOp::Mul,
                        Expr::Num(change.factor),
                        Expr::bin(BinOp::Pow, Expr::Var, Expr::Num(change.exponent)),
                    )
                };
                let body = Expr::bin(BinOp::Mul, Expr::Num(change.scale), expr.0.substitute(&arg));
                let support = change.map_interval(support.0, support.1)?;
                Potential::Expression { expr: ExprText(body), support }
            }
            Potential::Transformed { inner, change: first } => {
                let combined = change.compose(first);
                inner.support().map(|(lo, hi)| combined.map_interval(lo, hi)).transpose()?;
                Potential::Transformed { inner: inner.clone(), change: combined }
            }
            Potential::PositivePart(inner) if change.scale >= 0.0 => {
                Potential::PositivePart(Box::new(inner.change_variables(change)?))
            }
            other => {
                other.support().map(|(lo, hi)| change.map_interval(lo, hi)).transpose()?;
                Potential::Transformed { inner: Box::new(other.clone()), change }
            }
        })
    }

    /// `l² V(l r)`: the potential seen by an interval rescaled by length `l`.
    pub fn dilate(&self, l: f64) -> Result<Potential> {
        self.change_variables(Change { scale: l * l, factor: l, exponent: 1.0 })
    }

    /// Rescaling of `[lo, hi]` to `[b, b+1]`, `b = lo/(hi−lo)`: returns
    /// `(b, l² V(l r))` with `l = hi − lo`.
    pub fn to_unit_interval(&self, lo: f64, hi: f64) -> Result<(f64, Potential)> {
        let l = hi - lo;
        if !(l > 0.0) {
            return Err(domain("empty interval"));
        }
        Ok((lo / l, self.dilate(l)?))
    }
}

/// `∫_x^y r^α dr`.
pub fn power_integral(x: f64, y: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        y - x
    } else if alpha == -1.0 {
        (y / x).ln()
    } else {
        (y.powf(1.0 + alpha) - x.powf(1.0 + alpha)) / (1.0 + alpha)
    }
}

fn detect_support(f: &dyn Fn(f64) -> f64) -> Option<(f64, f64)> {
    const N: usize = 20_000;
    let (a, b) = (1e-6_f64.ln(), 1e4_f64.ln());
    let mut grid: Vec<f64> = (0..=N).map(|i| (a + (b - a) * i as f64 / N as f64).exp()).collect();
    grid[0] = 1e-6;
    grid[N] = 1e4;
    let above = |r: f64| f(r).abs() > SUPPORT_THRESHOLD;
    let first = grid.iter().position(|&r| above(r))?;
    let last = grid.iter().rposition(|&r| above(r))?;
    let refine = |mut inside: f64, mut outside: f64| {
        for _ in 0..80 {
            let mid = 0.5 * (inside + outside);
            if above(mid) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    };
    let lo = if first == 0 { grid[0] } else { refine(grid[first], grid[first - 1]) };
    let hi = if last == N { grid[N] } else { refine(grid[last], grid[last + 1]) };
    Some((lo, hi))
}
