//! Real functions on `ℝ₊` measured against the scale-invariant measure
//! `ds/s`: evaluation, multiplicative convolution, `L²(ds/s)` and sup norms,
//! and the tail functional `R_γ(m) = ∫₀^∞ (1 - m(t)/t)² t^{1-γ} dt`.
//!
//! Everything is computed in the logarithmic variable `x = ln s`, where
//! `ds/s` becomes Lebesgue measure and the convolution becomes an ordinary
//! additive one.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::{gauss_legendre, QuadratureSpec};

/// `coeff · s^exponent` on `[lo, hi)`; `lo` may be `0` and `hi` may be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSegment {
    pub coeff: f64,
    pub exponent: f64,
    pub lo: f64,
    pub hi: f64,
}

impl PowerSegment {
    pub fn new(coeff: f64, exponent: f64, lo: f64, hi: f64) -> Self {
        Self { coeff, exponent, lo, hi }
    }

    fn contains(&self, s: f64) -> bool {
        s >= self.lo && s < self.hi
    }
}

/// Geometric node layout for grid-backed functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridLayout {
    pub lo: f64,
    pub hi: f64,
    pub nodes: usize,
}

impl Default for GridLayout {
    fn default() -> Self {
        Self { lo: 1e-8, hi: 1e8, nodes: 4096 }
    }
}

impl GridLayout {
    pub fn new(lo: f64, hi: f64, nodes: usize) -> Result<Self> {
        let layout = Self { lo, hi, nodes };
        layout.validate()?;
        Ok(layout)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.hi > self.lo && self.hi.is_finite()) {
            return Err(invalid(format!("grid layout needs 0 < lo < hi < inf, got [{}, {}]", self.lo, self.hi)));
        }
        if self.nodes < 2 {
            return Err(invalid("grid layout needs at least two nodes"));
        }
        Ok(())
    }

    /// Nodes in the logarithmic variable.
    pub fn log_nodes(&self) -> Vec<f64> {
        let (a, b) = (self.lo.ln(), self.hi.ln());
        let n = self.nodes - 1;
        (0..=n).map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 }).collect()
    }
}

/// Samples `m_i` at strictly increasing nodes `s_i`. Between two positive
/// samples the function is a power law (linear in `(ln s, ln m)`), otherwise
/// linear in `(ln s, m)`; it is zero outside `[s_0, s_N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogGrid {
    log_nodes: Vec<f64>,
    values: Vec<f64>,
}

impl LogGrid {
    /// Builds a grid from nodes given in `ln s`.
    pub fn from_log_nodes(log_nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if log_nodes.len() != values.len() {
            return Err(invalid("LogGrid nodes and values differ in length"));
        }
        if log_nodes.len() < 2 {
            return Err(invalid("LogGrid needs at least two nodes"));
        }
        if log_nodes.windows(2).any(|w| !(w[1] > w[0])) || log_nodes.iter().any(|x| !x.is_finite()) {
            return Err(invalid("LogGrid nodes must be finite and strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("LogGrid values must be finite"));
        }
        Ok(Self { log_nodes, values })
    }

    pub fn new(nodes: &[f64], values: Vec<f64>) -> Result<Self> {
        if nodes.iter().any(|&s| !(s > 0.0)) {
            return Err(invalid("LogGrid nodes must be positive"));
        }
        Self::from_log_nodes(nodes.iter().map(|s| s.ln()).collect(), values)
    }

    pub fn sample<F: Fn(f64) -> f64>(layout: &GridLayout, f: F) -> Result<Self> {
        layout.validate()?;
        let xs = layout.log_nodes();
        let values = xs.iter().map(|&x| f(x.exp())).collect();
        Self::from_log_nodes(xs, values)
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        self.log_nodes.iter().map(|x| x.exp())
    }

    pub fn log_nodes(&self) -> &[f64] {
        &self.log_nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub(crate) fn scale_values(&mut self, factor: f64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }

    fn shape(&self, j: usize) -> Shape {
        let (x0, x1) = (self.log_nodes[j], self.log_nodes[j + 1]);
        let (v0, v1) = (self.values[j], self.values[j + 1]);
        if v0 > 0.0 && v1 > 0.0 {
            let (l0, l1) = (v0.ln(), v1.ln());
            let rate = (l1 - l0) / (x1 - x0);
            Shape::Exp { sign: 1.0, ln0: l0, rate, x0 }
        } else {
            Shape::Lin { x0, v0, slope: (v1 - v0) / (x1 - x0) }
        }
    }

    fn eval_log(&self, x: f64) -> f64 {
        let n = self.log_nodes.len();
        if x < self.log_nodes[0] || x > self.log_nodes[n - 1] {
            return 0.0;
        }
        let j = match self.log_nodes.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(j) => return self.values[j],
            Err(j) => j - 1,
        };
        self.shape(j).at(x)
    }
}

/// A function on `ℝ₊` in one of two representations.
#[derive(Debug, Clone, PartialEq)]
pub enum ScaleFn {
    PiecewisePower(Vec<PowerSegment>),
    LogGrid(LogGrid),
}

impl ScaleFn {
    /// Piecewise power function; segments must have disjoint supports.
    pub fn piecewise(mut segments: Vec<PowerSegment>) -> Result<Self> {
        for s in &segments {
            if !(s.lo >= 0.0 && s.hi > s.lo) || s.lo.is_infinite() {
                return Err(invalid(format!("segment support [{}, {}) is not a valid interval", s.lo, s.hi)));
            }
            if !s.coeff.is_finite() || !s.exponent.is_finite() {
                return Err(invalid("segment coefficient and exponent must be finite"));
            }
            if s.lo == 0.0 && s.exponent < 0.0 && s.coeff != 0.0 {
                return Err(invalid("segment reaching 0 must have a nonnegative exponent (finite values)"));
            }
        }
        segments.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        if segments.windows(2).any(|w| w[1].lo < w[0].hi) {
            return Err(invalid("segment supports overlap"));
        }
        Ok(Self::PiecewisePower(segments))
    }

    pub fn zero() -> Self {
        Self::PiecewisePower(Vec::new())
    }

    /// `min(t, 1/t)`
    pub fn min_t_inv() -> Self {
        Self::PiecewisePower(vec![
            PowerSegment::new(1.0, 1.0, 0.0, 1.0),
            PowerSegment::new(1.0, -1.0, 1.0, f64::INFINITY),
        ])
    }

    /// `min(t, l)`
    pub fn min_t_level(l: f64) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(invalid("level must be positive and finite"));
        }
        Ok(Self::PiecewisePower(vec![
            PowerSegment::new(1.0, 1.0, 0.0, l),
            PowerSegment::new(l, 0.0, l, f64::INFINITY),
        ]))
    }

    /// The splitting pair `m₁(s) = 2s·1{s≤1}`, `m₂(s) = s⁻¹·1{s≥1}` with
    /// `‖m₁‖‖m₂‖ = 1` and `m₁ * m₂ = min(t, 1/t)`.
    pub fn simple_pair() -> (Self, Self) {
        (
            Self::PiecewisePower(vec![PowerSegment::new(2.0, 1.0, 0.0, 1.0)]),
            Self::PiecewisePower(vec![PowerSegment::new(1.0, -1.0, 1.0, f64::INFINITY)]),
        )
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(invalid(format!("ScaleFn evaluated at non-positive point {s}")));
        }
        Ok(self.eval_unchecked(s))
    }

    pub(crate) fn eval_unchecked(&self, s: f64) -> f64 {
        match self {
            Self::PiecewisePower(segs) => segs
                .iter()
                .find(|seg| seg.contains(s))
                .map_or(0.0, |seg| seg.coeff * s.powf(seg.exponent)),
            Self::LogGrid(g) => g.eval_log(s.ln()),
        }
    }

    /// Samples onto a grid.
    pub fn to_grid(&self, layout: &GridLayout) -> Result<LogGrid> {
        LogGrid::sample(layout, |s| self.eval_unchecked(s))
    }

    /// `s ↦ m(s / c)`
    pub fn dilate(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(invalid("dilation factor must be positive"));
        }
        Ok(match self {
            Self::PiecewisePower(segs) => Self::PiecewisePower(
                segs.iter()
                    .map(|s| PowerSegment::new(s.coeff * c.powf(-s.exponent), s.exponent, s.lo * c, s.hi * c))
                    .collect(),
            ),
            Self::LogGrid(g) => {
                let shift = c.ln();
                Self::LogGrid(LogGrid::from_log_nodes(
                    g.log_nodes.iter().map(|x| x + shift).collect(),
                    g.values.clone(),
                )?)
            }
        })
    }

    /// `s ↦ m(1/s)`
    pub fn invert(&self) -> Result<Self> {
        Ok(match self {
            Self::PiecewisePower(segs) => {
                // [lo, hi) maps to (1/hi, 1/lo]; the closedness of endpoints is immaterial here
                let flipped = segs
                    .iter()
                    .map(|s| {
                        let lo = if s.hi.is_infinite() { 0.0 } else { 1.0 / s.hi };
                        let hi = if s.lo == 0.0 { f64::INFINITY } else { 1.0 / s.lo };
                        PowerSegment::new(s.coeff, -s.exponent, lo, hi)
                    })
                    .collect();
                Self::piecewise(flipped)?
            }
            Self::LogGrid(g) => Self::LogGrid(LogGrid::from_log_nodes(
                g.log_nodes.iter().rev().map(|x| -x).collect(),
                g.values.iter().rev().copied().collect(),
            )?),
        })
    }

    fn pieces(&self) -> Vec<Piece> {
        match self {
            Self::PiecewisePower(segs) => segs
                .iter()
                .filter(|s| s.coeff != 0.0)
                .map(|s| Piece {
                    lo: if s.lo == 0.0 { f64::NEG_INFINITY } else { s.lo.ln() },
                    hi: s.hi.ln(),
                    shape: Shape::Exp { sign: s.coeff.signum(), ln0: s.coeff.abs().ln(), rate: s.exponent, x0: 0.0 },
                })
                .collect(),
            Self::LogGrid(g) => (0..g.len() - 1)
                .filter(|&j| g.values[j] != 0.0 || g.values[j + 1] != 0.0)
                .map(|j| Piece { lo: g.log_nodes[j], hi: g.log_nodes[j + 1], shape: g.shape(j) })
                .collect(),
        }
    }
}

/// Restriction of a function to an interval of the log variable.
#[derive(Debug, Clone, Copy)]
enum Shape {
    /// `sign · exp(ln0 + rate·(x - x0))`
    Exp { sign: f64, ln0: f64, rate: f64, x0: f64 },
    /// `v0 + slope·(x - x0)`
    Lin { x0: f64, v0: f64, slope: f64 },
}

impl Shape {
    fn at(&self, x: f64) -> f64 {
        match *self {
            Shape::Exp { sign, ln0, rate, x0 } => sign * (ln0 + rate * (x - x0)).exp(),
            Shape::Lin { x0, v0, slope } => v0 + slope * (x - x0),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    shape: Shape,
}

/// `∫_u^v e^{φ(y)} dy` for affine `φ` with slope `k`; `log_at` evaluates `φ`
/// at a finite endpoint. Infinite limits are allowed when convergent.
fn exp_integral<L: Fn(f64) -> f64>(log_at: L, k: f64, u: f64, v: f64) -> Option<f64> {
    match (u.is_finite(), v.is_finite()) {
        (true, true) => {
            let w = v - u;
            let kw = k * w;
            let factor = if kw.abs() < 1e-12 { 1.0 + 0.5 * kw } else { kw.exp_m1() / kw };
            Some(log_at(u).exp() * w * factor)
        }
        (true, false) if k < 0.0 => Some(-log_at(u).exp() / k),
        (false, true) if k > 0.0 => Some(log_at(v).exp() / k),
        _ => None,
    }
}

const GL_POINTS: usize = 4;

fn gl_rule() -> &'static (Vec<f64>, Vec<f64>) {
    use std::sync::OnceLock;
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_POINTS))
}

fn gl_integrate<F: Fn(f64) -> f64>(f: F, u: f64, v: f64) -> f64 {
    let (xs, ws) = gl_rule();
    let (c, h) = (0.5 * (u + v), 0.5 * (v - u));
    h * xs.iter().zip(ws).map(|(x, w)| w * f(c + h * x)).sum::<f64>()
}

// ---------------------------------------------------------------------------
// Convolution

/// Multiplicative convolution `(m₁ * m₂)(t) = ∫₀^∞ m₁(t/s) m₂(s) ds/s`.
///
/// Two piecewise-power operands are convolved in closed form when the result
/// is again a single power on every interval; otherwise the result is
/// sampled on `layout` by integrating the operands' interpolants exactly
/// piece by piece.
pub fn mconvolve(m1: &ScaleFn, m2: &ScaleFn, layout: &GridLayout) -> Result<ScaleFn> {
    if let (ScaleFn::PiecewisePower(a), ScaleFn::PiecewisePower(b)) = (m1, m2) {
        if let Some(segs) = convolve_power_closed(a, b)? {
            return Ok(ScaleFn::PiecewisePower(segs));
        }
    }
    layout.validate()?;
    let p1 = m1.pieces();
    let p2 = m2.pieces();
    let xs = layout.log_nodes();
    let mut values = Vec::with_capacity(xs.len());
    for &tau in &xs {
        values.push(convolve_at(&p1, &p2, tau).ok_or_else(|| Error::Convergence {
            what: format!("convolution integral at node t = {:e}", tau.exp()),
            partial: f64::INFINITY,
            err_estimate: f64::INFINITY,
        })?);
    }
    Ok(ScaleFn::LogGrid(LogGrid::from_log_nodes(xs, values)?))
}

/// `∫ m₁(e^{τ-y}) m₂(e^y) dy`; `None` when divergent.
fn convolve_at(p1: &[Piece], p2: &[Piece], tau: f64) -> Option<f64> {
    // m₁'s pieces in the y variable are [τ - hi, τ - lo], in reverse order.
    let mut i = p1.len();
    let mut j = 0;
    let mut total = 0.0;
    while i > 0 && j < p2.len() {
        let a = &p1[i - 1];
        let (a_lo, a_hi) = (tau - a.hi, tau - a.lo);
        let b = &p2[j];
        let u = a_lo.max(b.lo);
        let v = a_hi.min(b.hi);
        if v > u {
            total += match (a.shape, b.shape) {
                (
                    Shape::Exp { sign: s1, ln0: l1, rate: r1, x0: a1 },
                    Shape::Exp { sign: s2, ln0: l2, rate: r2, x0: a2 },
                ) => {
                    let log_at = |y: f64| l1 + r1 * (tau - y - a1) + l2 + r2 * (y - a2);
                    s1 * s2 * exp_integral(log_at, r2 - r1, u, v)?
                }
                (sa, sb) => {
                    if !(u.is_finite() && v.is_finite()) {
                        return None;
                    }
                    gl_integrate(|y| sa.at(tau - y) * sb.at(y), u, v)
                }
            };
        }
        if a_hi <= b.hi {
            i -= 1;
        } else {
            j += 1;
        }
    }
    total.is_finite().then_some(total)
}

/// Closed-form convolution of two piecewise-power functions. Returns `None`
/// when the result needs logarithmic terms or a sum of powers on one interval.
fn convolve_power_closed(a: &[PowerSegment], b: &[PowerSegment]) -> Result<Option<Vec<PowerSegment>>> {
    let mut breaks = vec![0.0, f64::INFINITY];
    for s1 in a.iter().filter(|s| s.coeff != 0.0) {
        for s2 in b.iter().filter(|s| s.coeff != 0.0) {
            if s2.exponent == s1.exponent {
                return Ok(None);
            }
            for t in [s2.lo * s1.hi, s2.hi * s1.hi, s2.lo * s1.lo, s2.hi * s1.lo] {
                if t > 0.0 && t.is_finite() {
                    breaks.push(t);
                }
            }
        }
    }
    breaks.sort_by(|x, y| x.total_cmp(y));
    breaks.dedup();

    let mut out: Vec<PowerSegment> = Vec::new();
    for w in breaks.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let probe = match (t0 == 0.0, t1.is_infinite()) {
            (true, true) => 1.0,
            (true, false) => 0.5 * t1,
            (false, true) => 2.0 * t0,
            (false, false) => (t0 * t1).sqrt(),
        };
        // terms c·t^e accumulated on this interval
        let mut terms: Vec<(f64, f64)> = Vec::new();
        for s1 in a.iter().filter(|s| s.coeff != 0.0) {
            for s2 in b.iter().filter(|s| s.coeff != 0.0) {
                let bexp = s2.exponent - s1.exponent;
                let c = s1.coeff * s2.coeff / bexp;
                // s ranges over [max(l2, t/h1), min(h2, t/l1))
                let lo_from_t = if s1.hi.is_infinite() { 0.0 } else { probe / s1.hi };
                let hi_from_t = if s1.lo == 0.0 { f64::INFINITY } else { probe / s1.lo };
                let lo_is_t = lo_from_t > s2.lo;
                let hi_is_t = hi_from_t < s2.hi;
                let lo = if lo_is_t { lo_from_t } else { s2.lo };
                let hi = if hi_is_t { hi_from_t } else { s2.hi };
                if !(hi > lo) {
                    continue;
                }
                // upper limit term: +c·t^{a1}·hi^b
                if hi_is_t {
                    terms.push((c * s1.lo.powf(-bexp), s2.exponent));
                } else if hi.is_infinite() {
                    if bexp >= 0.0 {
                        return Err(Error::Divergence("convolution integral diverges at s → ∞".into()));
                    }
                } else {
                    terms.push((c * hi.powf(bexp), s1.exponent));
                }
                // lower limit term: −c·t^{a1}·lo^b
                if lo_is_t {
                    let lo_coeff = s1.hi.powf(-bexp);
                    terms.push((-c * lo_coeff, s2.exponent));
                } else if lo == 0.0 {
                    if bexp <= 0.0 {
                        return Err(Error::Divergence("convolution integral diverges at s → 0".into()));
                    }
                } else {
                    terms.push((-c * lo.powf(bexp), s1.exponent));
                }
            }
        }
        let combined = combine_terms(terms);
        match combined.as_slice() {
            [] => {}
            [(c, e)] => push_merged(&mut out, PowerSegment::new(*c, *e, t0, t1)),
            _ => return Ok(None),
        }
    }
    Ok(Some(out))
}

fn combine_terms(mut terms: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    terms.sort_by(|x, y| x.1.total_cmp(&y.1));
    let mut out: Vec<(f64, f64, f64)> = Vec::new(); // (sum, exponent, scale)
    for (c, e) in terms {
        match out.last_mut() {
            Some(last) if last.1 == e => {
                last.0 += c;
                last.2 = last.2.max(c.abs());
            }
            _ => out.push((c, e, c.abs())),
        }
    }
    out.into_iter()
        .filter(|(c, _, scale)| c.abs() > 1e-14 * scale)
        .map(|(c, e, _)| (c, e))
        .collect()
}

fn push_merged(out: &mut Vec<PowerSegment>, seg: PowerSegment) {
    if let Some(last) = out.last_mut() {
        if last.hi == seg.lo && last.exponent == seg.exponent && (last.coeff - seg.coeff).abs() <= 1e-15 * seg.coeff.abs()
        {
            last.hi = seg.hi;
            return;
        }
    }
    out.push(seg);
}

// ---------------------------------------------------------------------------
// Norms

/// `(∫₀^∞ m(s)² ds/s)^{1/2}`
pub fn l2_scalenorm(m: &ScaleFn) -> Result<f64> {
    let mut total = 0.0;
    for p in m.pieces() {
        total += match p.shape {
            Shape::Exp { ln0, rate, x0, .. } => exp_integral(|x| 2.0 * (ln0 + rate * (x - x0)), 2.0 * rate, p.lo, p.hi)
                .ok_or_else(|| Error::Divergence("L²(ds/s) norm diverges".into()))?,
            Shape::Lin { .. } => gl_integrate(|x| p.shape.at(x).powi(2), p.lo, p.hi),
        };
    }
    Ok(total.sqrt())
}

/// `∫₀^∞ m(s) s^k ds/s`, exact for the representation.
pub fn weighted_integral(m: &ScaleFn, k: f64) -> Result<f64> {
    let mut total = 0.0;
    for p in m.pieces() {
        total += match p.shape {
            Shape::Exp { sign, ln0, rate, x0 } => {
                sign * exp_integral(|x| ln0 + rate * (x - x0) + k * x, rate + k, p.lo, p.hi)
                    .ok_or_else(|| Error::Divergence(format!("∫ m(s) s^{k} ds/s diverges")))?
            }
            Shape::Lin { .. } => gl_integrate(|x| p.shape.at(x) * (k * x).exp(), p.lo, p.hi),
        };
    }
    Ok(total)
}

/// Supremum of `|m|` over `ℝ₊`.
pub fn sup_scalenorm(m: &ScaleFn) -> f64 {
    match m {
        ScaleFn::PiecewisePower(segs) => segs
            .iter()
            .filter(|s| s.coeff != 0.0)
            .map(|s| {
                let c = s.coeff.abs();
                if s.exponent > 0.0 {
                    c * s.hi.powf(s.exponent)
                } else if s.exponent < 0.0 {
                    if s.lo == 0.0 {
                        f64::INFINITY
                    } else {
                        c * s.lo.powf(s.exponent)
                    }
                } else {
                    c
                }
            })
            .fold(0.0, f64::max),
        ScaleFn::LogGrid(g) => g.values.iter().fold(0.0, |acc, v| acc.max(v.abs())),
    }
}

// ---------------------------------------------------------------------------
// Tail functional

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailValue {
    pub value: f64,
    /// Estimated contribution from outside the integration window.
    pub truncation_bound: f64,
}

/// `R_γ(m) = ∫₀^∞ (1 - m(t)/t)² t^{1-γ} dt`.
///
/// Piecewise-power functions are integrated in closed form. Grid functions
/// are integrated exactly above the last node (where they vanish) and
/// piecewise on the window `[t_min, t_N]`, where `t_min` is the first node
/// or `ε^{1/(γ-2)}`, whichever is larger: below that point a relative defect
/// of rounding size in `m(t)/t` already contributes `O(ε)`. The part below
/// `t_min` is extrapolated from the local power law of the integrand over
/// the last decade and reported as `truncation_bound`.
pub fn tail_functional(m: &ScaleFn, gamma: f64, spec: &QuadratureSpec) -> Result<TailValue> {
    if !(gamma > 2.0 + 1e-9) || !gamma.is_finite() {
        return Err(invalid(format!("tail functional needs γ > 2, got {gamma}")));
    }
    spec.validate()?;
    match m {
        ScaleFn::PiecewisePower(segs) => tail_power_closed(segs, gamma),
        ScaleFn::LogGrid(g) => tail_grid(g, gamma, spec),
    }
}

fn power_integral(c: f64, e: f64, lo: f64, hi: f64) -> Option<f64> {
    // ∫_lo^hi c t^e dt
    if c == 0.0 {
        return Some(0.0);
    }
    if e == -1.0 {
        return (lo > 0.0 && hi.is_finite()).then(|| c * (hi / lo).ln());
    }
    let p = e + 1.0;
    let upper = if hi.is_infinite() {
        if p < 0.0 {
            0.0
        } else {
            return None;
        }
    } else {
        hi.powf(p)
    };
    let lower = if lo == 0.0 {
        if p > 0.0 {
            0.0
        } else {
            return None;
        }
    } else {
        lo.powf(p)
    };
    Some(c * (upper - lower) / p)
}

fn tail_power_closed(segs: &[PowerSegment], gamma: f64) -> Result<TailValue> {
    // Cover (0, inf) by segments and gaps (where m = 0).
    let mut cover: Vec<(f64, f64, f64, f64)> = Vec::new(); // (lo, hi, c, a)
    let mut cursor = 0.0;
    for s in segs {
        if s.lo > cursor {
            cover.push((cursor, s.lo, 0.0, 0.0));
        }
        cover.push((s.lo, s.hi, s.coeff, s.exponent));
        cursor = s.hi;
    }
    if cursor.is_finite() {
        cover.push((cursor, f64::INFINITY, 0.0, 0.0));
    }
    let mut value = 0.0;
    for (lo, hi, c, a) in cover {
        // (1 - c t^{a-1})² t^{1-γ} = t^{1-γ} - 2c t^{a-γ} + c² t^{2a-1-γ}
        let terms = combine_terms(vec![(1.0, 1.0 - gamma), (-2.0 * c, a - gamma), (c * c, 2.0 * a - 1.0 - gamma)]);
        for (k, e) in terms {
            value += power_integral(k, e, lo, hi).ok_or_else(|| {
                Error::Divergence(format!(
                    "tail integrand does not decay on [{lo:e}, {hi:e}); m(t)/t must tend to 1 as t → 0"
                ))
            })?;
        }
    }
    Ok(TailValue { value, truncation_bound: 0.0 })
}

const ROUNDING_DEFECT: f64 = 1e-12;

fn tail_grid(g: &LogGrid, gamma: f64, spec: &QuadratureSpec) -> Result<TailValue> {
    let n = g.len();
    let x_last = g.log_nodes[n - 1];
    let x_floor = f64::EPSILON.ln() / (gamma - 2.0);
    let x_min = g.log_nodes[0].max(x_floor);
    if x_min >= x_last {
        return Err(invalid("grid does not reach into the tail window"));
    }

    // integrand in the log variable: (1 - m/t)² t^{2-γ}
    let defect = |shape: &Shape, x: f64| -> f64 {
        match *shape {
            // m/t = exp(ln0 + (rate-1)x); for m ≈ t use expm1 to keep the small difference
            Shape::Exp { sign, ln0, rate, x0 } if sign > 0.0 => -(ln0 - x0 + (rate - 1.0) * (x - x0)).exp_m1(),
            _ => 1.0 - shape.at(x) * (-x).exp(),
        }
    };
    let integrand = |shape: &Shape, x: f64| -> f64 {
        let d = defect(shape, x);
        d * d * ((2.0 - gamma) * x).exp()
    };

    let mut parts = Vec::with_capacity(n);
    for j in 0..n - 1 {
        let (x0, x1) = (g.log_nodes[j], g.log_nodes[j + 1]);
        if x1 <= x_min {
            continue;
        }
        let u = x0.max(x_min);
        let shape = g.shape(j);
        parts.push(gl_integrate(|x| integrand(&shape, x), u, x1));
    }
    let window = crate::numerics::pairwise_sum(&parts);
    // beyond the last node m = 0
    let upper = ((2.0 - gamma) * x_last).exp() / (gamma - 2.0);
    let value = window + upper;

    // integrand as a function of t at the window edge and one decade above
    let defect_at = |x: f64| 1.0 - g.eval_log(x) / x.exp();
    let at_t = |x: f64| -> f64 {
        let d = defect_at(x);
        d * d * ((1.0 - gamma) * x).exp()
    };
    let t_min = x_min.exp();
    let i0 = at_t(x_min);
    let i1 = at_t((x_min + std::f64::consts::LN_10).min(x_last));
    // I(t) ~ t^{k-1} near the edge; the missing piece is I(t_min)·t_min/k
    let k = 1.0 + (i1 / i0).log10();
    let truncation_bound = if i0 == 0.0 {
        0.0
    } else if k > 0.0 {
        i0 * t_min / k
    } else if defect_at(x_min).abs() <= ROUNDING_DEFECT || i0 * t_min <= spec.rel_tol * value.abs() {
        // a defect at rounding level carries no information about the limit t → 0
        i0 * t_min
    } else {
        return Err(Error::Divergence(format!(
            "tail integrand grows toward t = 0 (local exponent {:.3} at t = {t_min:e}); m(t)/t does not tend to 1",
            k - 1.0
        )));
    };
    Ok(TailValue { value, truncation_bound })
}
