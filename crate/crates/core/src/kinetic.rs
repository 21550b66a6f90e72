//! Bounds for `T(P) + V` with a radial kinetic symbol `T`: the phase-space
//! function `G_T`, the Hilbert–Schmidt density `G_{g,m}`, and the bound
//! `λ⁻²∫G_T((λ+1)²V₋)` optimized over `λ`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::constants::{c_simple, semiclassical_factor, sphere_area};
use crate::error::{invalid, Error, Result};
use crate::numerics::{integrate_with_breaks, minimize_scalar, pairwise_sum, QuadratureSpec, SearchSpec};
use crate::scalefn::ScaleFn;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SymbolKind {
    /// `T(r) = r^{2α}`
    Power { alpha: f64 },
    /// Table `T(rᵢ) = tᵢ`, interpolated linearly in `(ln r, ln T)` between
    /// positive values and linearly in `r` otherwise; extended by
    /// `t_N (r/r_N)^{tail_exp}` above and `t_0 (r/r_0)^{lead_exp}` below.
    Tabulated { r: Vec<f64>, t: Vec<f64>, tail_exp: f64, lead_exp: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSymbol {
    pub kind: SymbolKind,
    pub d: u32,
}

impl RadialSymbol {
    pub fn power(alpha: f64, d: u32) -> Result<Self> {
        Self::new(SymbolKind::Power { alpha }, d)
    }

    pub fn tabulated(r: Vec<f64>, t: Vec<f64>, tail_exp: f64, lead_exp: f64, d: u32) -> Result<Self> {
        Self::new(SymbolKind::Tabulated { r, t, tail_exp, lead_exp }, d)
    }

    pub fn new(kind: SymbolKind, d: u32) -> Result<Self> {
        if d < 1 {
            return Err(invalid("dimension must be >= 1"));
        }
        match &kind {
            SymbolKind::Power { alpha } => {
                if !alpha.is_finite() || *alpha == 0.0 {
                    return Err(invalid(format!("power symbol needs a finite nonzero order, got {alpha}")));
                }
            }
            SymbolKind::Tabulated { r, t, tail_exp, lead_exp } => {
                if r.len() != t.len() || r.len() < 2 {
                    return Err(invalid("tabulated symbol needs matching r and t with at least two entries"));
                }
                if r.iter().any(|x| !(x.is_finite() && *x > 0.0)) || r.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(invalid("tabulated radii must be positive and strictly increasing"));
                }
                if t.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                    return Err(invalid("tabulated symbol values must be finite and nonnegative"));
                }
                if !tail_exp.is_finite() || !lead_exp.is_finite() {
                    return Err(invalid("tail and leading exponents must be finite"));
                }
            }
        }
        Ok(Self { kind, d })
    }

    pub fn eval(&self, r: f64) -> f64 {
        match &self.kind {
            SymbolKind::Power { alpha } => r.powf(2.0 * alpha),
            SymbolKind::Tabulated { r: rs, t, tail_exp, lead_exp } => {
                let n = rs.len();
                if r <= rs[0] {
                    return t[0] * (r / rs[0]).powf(*lead_exp);
                }
                if r >= rs[n - 1] {
                    return t[n - 1] * (r / rs[n - 1]).powf(*tail_exp);
                }
                let j = rs.partition_point(|&x| x <= r) - 1;
                let (r0, r1, t0, t1) = (rs[j], rs[j + 1], t[j], t[j + 1]);
                if t0 > 0.0 && t1 > 0.0 {
                    let w = (r / r0).ln() / (r1 / r0).ln();
                    (t0.ln() + w * (t1 / t0).ln()).exp()
                } else {
                    t0 + (t1 - t0) * (r - r0) / (r1 - r0)
                }
            }
        }
    }

    /// `ln T(e^x)`, exact on the power-law parts.
    pub fn ln_eval(&self, x: f64) -> f64 {
        match &self.kind {
            SymbolKind::Power { alpha } => 2.0 * alpha * x,
            SymbolKind::Tabulated { r, t, tail_exp, lead_exp } => {
                let n = r.len();
                if x <= r[0].ln() {
                    t[0].ln() + lead_exp * (x - r[0].ln())
                } else if x >= r[n - 1].ln() {
                    t[n - 1].ln() + tail_exp * (x - r[n - 1].ln())
                } else {
                    self.eval(x.exp()).ln()
                }
            }
        }
    }

    /// The symbol `T^{-1/2}`.
    pub fn inverse_sqrt(&self) -> Result<Self> {
        let kind = match &self.kind {
            SymbolKind::Power { alpha } => SymbolKind::Power { alpha: -alpha / 2.0 },
            SymbolKind::Tabulated { r, t, tail_exp, lead_exp } => {
                if t.iter().any(|&x| x <= 0.0) {
                    return Err(invalid("T^{-1/2} needs a strictly positive table"));
                }
                SymbolKind::Tabulated {
                    r: r.clone(),
                    t: t.iter().map(|x| x.powf(-0.5)).collect(),
                    tail_exp: -tail_exp / 2.0,
                    lead_exp: -lead_exp / 2.0,
                }
            }
        };
        Self::new(kind, self.d)
    }

    fn table_breaks(&self) -> Vec<f64> {
        match &self.kind {
            SymbolKind::Power { .. } => Vec::new(),
            SymbolKind::Tabulated { r, .. } => r.iter().map(|x| x.ln()).collect(),
        }
    }

    /// Radii where `T(r) = u`.
    fn crossings(&self, u: f64) -> Vec<f64> {
        match &self.kind {
            SymbolKind::Power { alpha } => vec![u.powf(0.5 / alpha)],
            SymbolKind::Tabulated { r, t, tail_exp, lead_exp } => {
                let n = r.len();
                let mut out = Vec::new();
                if *lead_exp != 0.0 && t[0] > 0.0 {
                    let x = r[0] * (u / t[0]).powf(1.0 / lead_exp);
                    if x < r[0] {
                        out.push(x);
                    }
                }
                for j in 0..n - 1 {
                    let (t0, t1) = (t[j], t[j + 1]);
                    if (t0 - u) * (t1 - u) < 0.0 {
                        let x = if t0 > 0.0 && t1 > 0.0 {
                            r[j] * (r[j + 1] / r[j]).powf((u / t0).ln() / (t1 / t0).ln())
                        } else {
                            r[j] + (u - t0) * (r[j + 1] - r[j]) / (t1 - t0)
                        };
                        out.push(x);
                    }
                }
                if *tail_exp > 0.0 && t[n - 1] > 0.0 {
                    let x = r[n - 1] * (u / t[n - 1]).powf(1.0 / tail_exp);
                    if x > r[n - 1] {
                        out.push(x);
                    }
                }
                out
            }
        }
    }
}

/// `w·e^{ln_scale}` without forming `0·∞`.
fn scaled(w: f64, ln_scale: f64) -> f64 {
    if w == 0.0 {
        0.0
    } else {
        (w.ln() + ln_scale).exp()
    }
}

fn phase_space_prefactor(d: u32) -> Result<f64> {
    Ok(sphere_area(d)? / (2.0 * std::f64::consts::PI).powi(d as i32))
}

/// `G_T(u) = ∫_{T(η) < u} (√(u/T) - √(T/u))² dη/(2π)^d`.
///
/// Returns `+∞` when the integral diverges: an unbounded region `{T < u}`,
/// or `1/T` not integrable near a zero of `T`.
pub fn g_t(symbol: &RadialSymbol, u: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(u >= 0.0) || !u.is_finite() {
        return Err(invalid(format!("u must be finite and >= 0, got {u}")));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let d = symbol.d as f64;
    // upper end of the region {T < u}, or +∞ when it is unbounded
    let r_max = match &symbol.kind {
        SymbolKind::Power { alpha } => {
            if *alpha < 0.0 || 2.0 * alpha >= d {
                return Ok(f64::INFINITY);
            }
            u.powf(0.5 / alpha)
        }
        SymbolKind::Tabulated { r, t, tail_exp, lead_exp } => {
            let n = r.len();
            if t.iter().any(|&x| x == 0.0) || *tail_exp < 0.0 || *lead_exp >= d {
                return Ok(f64::INFINITY);
            }
            if *tail_exp == 0.0 {
                if u > t[n - 1] {
                    return Ok(f64::INFINITY);
                }
                r[n - 1]
            } else if u > t[n - 1] {
                r[n - 1] * (u / t[n - 1]).powf(1.0 / tail_exp)
            } else {
                r[n - 1]
            }
        }
    };
    let ln_u = u.ln();
    let integrand = |x: f64| {
        let ln_t = symbol.ln_eval(x);
        if ln_t >= ln_u {
            return 0.0;
        }
        // (u - T)²/(uT) r^d = u (1 - T/u)² r^d / T
        let ratio = (ln_t - ln_u).exp();
        scaled((1.0 - ratio).powi(2), ln_u - ln_t + d * x)
    };
    let mut breaks = symbol.table_breaks();
    breaks.extend(symbol.crossings(u).into_iter().filter(|&x| x > 0.0).map(|x| x.ln()));
    let q = integrate_with_breaks(integrand, f64::NEG_INFINITY, r_max.ln(), &breaks, spec)?;
    Ok(phase_space_prefactor(symbol.d)? * q.value)
}

/// `G_{g,m}(u) = ∫ |u g(η) - m(u g(η))|² dη/(2π)^d` for radial `g`.
pub fn hs_density(g: &RadialSymbol, m: &ScaleFn, u: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(u >= 0.0) || !u.is_finite() {
        return Err(invalid(format!("u must be finite and >= 0, got {u}")));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let d = g.d as f64;
    let ln_u = u.ln();
    let h = |x: f64| {
        let ln_a = ln_u + g.ln_eval(x);
        let a = ln_a.exp();
        if a == 0.0 || ln_a.is_nan() {
            return 0.0;
        }
        let ratio = if a.is_finite() { m.eval_unchecked(a) / a } else { 0.0 };
        scaled((1.0 - ratio).powi(2), 2.0 * ln_a + d * x)
    };
    // the integrand must decay at both ends of the log-radial line
    const FAR: f64 = 60.0;
    for (x_far, x_near) in [(FAR, FAR - std::f64::consts::LN_10), (-FAR, -FAR + std::f64::consts::LN_10)] {
        let (far, near) = (h(x_far), h(x_near));
        if far > 0.0 && far >= near {
            return Err(Error::Divergence(format!(
                "Hilbert–Schmidt density does not decay as |ln r| → ∞ (integrand {far:e} at ln r = {x_far})"
            )));
        }
    }
    let mut breaks = g.table_breaks();
    if let (SymbolKind::Power { alpha }, ScaleFn::PiecewisePower(segs)) = (&g.kind, m) {
        for s in segs {
            for b in [s.lo, s.hi] {
                if b > 0.0 && b.is_finite() {
                    breaks.push((b / u).ln() / (2.0 * alpha));
                }
            }
        }
    }
    let q = integrate_with_breaks(h, f64::NEG_INFINITY, f64::INFINITY, &breaks, spec)?;
    Ok(phase_space_prefactor(g.d)? * q.value)
}

/// Values of `V₋` with spatial weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialProfile {
    pub d: u32,
    pub samples: Vec<Sample>,
    #[serde(default)]
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub u: f64,
    pub w: f64,
}

impl PotentialProfile {
    pub fn new(d: u32, samples: Vec<Sample>, label: impl Into<String>) -> Result<Self> {
        if d < 1 {
            return Err(Error::Schema { row: None, msg: "dimension must be >= 1".into() });
        }
        for (i, s) in samples.iter().enumerate() {
            if !s.u.is_finite() || !s.w.is_finite() {
                return Err(Error::Schema { row: Some(i), msg: "u and w must be finite numbers".into() });
            }
            if s.u < 0.0 || s.w < 0.0 {
                return Err(Error::Schema { row: Some(i), msg: format!("negative value (u = {}, w = {})", s.u, s.w) });
            }
        }
        Ok(Self { d, samples, label: label.into() })
    }

    /// `Σ wᵢ uᵢ^{γ/2}`
    pub fn moment(&self, gamma: f64) -> f64 {
        let terms: Vec<f64> = self.samples.iter().map(|s| s.w * s.u.powf(gamma / 2.0)).collect();
        pairwise_sum(&terms)
    }
}

/// Profile from a radial potential: `V₋(rᵢ) = vᵢ` with trapezoidal weights
/// `|S^{d-1}| rᵢ^{d-1} Δrᵢ`.
pub fn profile_from_radial(d: u32, r: &[f64], v: &[f64], label: impl Into<String>) -> Result<PotentialProfile> {
    if r.len() != v.len() {
        return Err(Error::Schema { row: None, msg: "radial r and v differ in length".into() });
    }
    if r.len() < 2 {
        return Err(Error::Schema { row: None, msg: "radial grid needs at least two points".into() });
    }
    for (i, (&ri, &vi)) in r.iter().zip(v).enumerate() {
        if !ri.is_finite() || !vi.is_finite() {
            return Err(Error::Schema { row: Some(i), msg: "r and v must be finite numbers".into() });
        }
        if ri < 0.0 || vi < 0.0 {
            return Err(Error::Schema { row: Some(i), msg: format!("negative value (r = {ri}, v = {vi})") });
        }
        if i > 0 && !(ri > r[i - 1]) {
            return Err(Error::Schema { row: Some(i), msg: "radii must be strictly increasing".into() });
        }
    }
    let area = sphere_area(d).map_err(|e| Error::Schema { row: None, msg: e.to_string() })?;
    let n = r.len();
    let samples = (0..n)
        .map(|i| {
            let left = if i > 0 { r[i] - r[i - 1] } else { 0.0 };
            let right = if i + 1 < n { r[i + 1] - r[i] } else { 0.0 };
            Sample { u: v[i], w: area * r[i].powi(d as i32 - 1) * 0.5 * (left + right) }
        })
        .collect();
    PotentialProfile::new(d, samples, label)
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema { row: None, msg: msg.into() }
}

fn number_array(v: &Value, key: &str) -> Result<Vec<f64>> {
    let arr = v.get(key).and_then(Value::as_array).ok_or_else(|| schema(format!("missing array \"{key}\"")))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| x.as_f64().ok_or_else(|| Error::Schema { row: Some(i), msg: format!("\"{key}\" entry is not a number") }))
        .collect()
}

/// Parses `{"d", "samples": [{"u", "w"}]}` or `{"d", "radial": {"r", "v"}}`.
pub fn load_profile(source: &str) -> Result<PotentialProfile> {
    let v: Value = serde_json::from_str(source).map_err(|e| schema(format!("invalid JSON: {e}")))?;
    let d = v.get("d").and_then(Value::as_u64).ok_or_else(|| schema("missing positive integer \"d\""))? as u32;
    let label = v.get("label").and_then(Value::as_str).unwrap_or("").to_string();
    if let Some(samples) = v.get("samples") {
        let arr = samples.as_array().ok_or_else(|| schema("\"samples\" must be an array"))?;
        let mut out = Vec::with_capacity(arr.len());
        for (i, s) in arr.iter().enumerate() {
            let get = |k: &str| {
                s.get(k)
                    .and_then(Value::as_f64)
                    .ok_or_else(|| Error::Schema { row: Some(i), msg: format!("missing number \"{k}\"") })
            };
            out.push(Sample { u: get("u")?, w: get("w")? });
        }
        PotentialProfile::new(d, out, label)
    } else if let Some(radial) = v.get("radial") {
        profile_from_radial(d, &number_array(radial, "r")?, &number_array(radial, "v")?, label)
    } else {
        Err(schema("profile needs \"samples\" or \"radial\""))
    }
}

/// Parses `{"kind": "power", "alpha"}` or
/// `{"kind": "tabulated", "r", "t", "tail_exp", "lead_exp"}`.
pub fn load_symbol(source: &str, d: u32) -> Result<RadialSymbol> {
    let kind: SymbolKind = serde_json::from_str(source).map_err(|e| schema(format!("invalid symbol: {e}")))?;
    RadialSymbol::new(kind, d).map_err(|e| match e {
        Error::InvalidInput(msg) => schema(msg),
        other => other,
    })
}

/// `λ⁻² Σᵢ wᵢ G_T((λ+1)² uᵢ)`
pub fn bound_at_lambda(symbol: &RadialSymbol, profile: &PotentialProfile, lambda: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid(format!("λ must be positive, got {lambda}")));
    }
    if symbol.d != profile.d {
        return Err(invalid(format!("symbol is in dimension {}, profile in {}", symbol.d, profile.d)));
    }
    let scale = (lambda + 1.0) * (lambda + 1.0);
    let terms: Vec<Result<f64>> =
        profile.samples.par_iter().map(|s| Ok(s.w * g_t(symbol, scale * s.u, spec)?)).collect();
    let terms: Vec<f64> = terms.into_iter().collect::<Result<_>>()?;
    if terms.iter().any(|t| t.is_infinite()) {
        return Ok(f64::INFINITY);
    }
    Ok(pairwise_sum(&terms) / (lambda * lambda))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundOutcome {
    /// `NaN` when the bound is infinite for every `λ`.
    pub lambda_star: f64,
    pub bound: f64,
    /// For power symbols, `c_simple(γ)·|B₁^d|/(2π)^d·Σ wᵢ uᵢ^{γ/2}`.
    pub closed_form: Option<f64>,
}

impl BoundOutcome {
    pub fn is_unbounded(&self) -> bool {
        self.bound.is_infinite()
    }
}

const LAMBDA_BRACKET: (f64, f64) = (1e-4, 1e4);

/// Minimizes [`bound_at_lambda`] over `ln λ`.
pub fn bound_opt(symbol: &RadialSymbol, profile: &PotentialProfile, search: &SearchSpec) -> Result<BoundOutcome> {
    bound_opt_with(symbol, profile, search, &QuadratureSpec::default())
}

pub fn bound_opt_with(
    symbol: &RadialSymbol,
    profile: &PotentialProfile,
    search: &SearchSpec,
    spec: &QuadratureSpec,
) -> Result<BoundOutcome> {
    if profile.samples.is_empty() {
        return Err(invalid("profile has no samples"));
    }
    let closed_form = match symbol.kind {
        SymbolKind::Power { alpha } if alpha > 0.0 && 2.0 * alpha < symbol.d as f64 => {
            let gamma = symbol.d as f64 / alpha;
            Some(c_simple(gamma)? * semiclassical_factor(symbol.d)? * profile.moment(gamma))
        }
        _ => None,
    };
    if bound_at_lambda(symbol, profile, 1.0, spec)?.is_infinite() {
        return Ok(BoundOutcome { lambda_star: f64::NAN, bound: f64::INFINITY, closed_form });
    }
    let f = |z: f64| bound_at_lambda(symbol, profile, z.exp(), spec).unwrap_or(f64::INFINITY);
    let found = minimize_scalar(f, (LAMBDA_BRACKET.0.ln(), LAMBDA_BRACKET.1.ln()), search)?;
    Ok(BoundOutcome { lambda_star: found.argmin.exp(), bound: found.min, closed_form })
}
