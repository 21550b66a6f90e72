//! The Gamma trial family.
//!
//! In the variable `x = ln s`, `ξ` is the Gamma(p, rate α) density and `ψ`
//! the Gamma(q, rate β) density. The pair is `m₁(s) = s·P(X > ln s)`,
//! `m₂(s) = s·ψ(s)`. Writing `U = X + Y` for independent `X ~ Gamma(p, α)`,
//! `Y ~ Gamma(q, β)`, the tail functional of `m₁ * m₂` equals
//! `I_γ = E[exp(-(γ-2)·max(U₁, U₂))] / (γ-2)` for two independent copies of `U`.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::constants;
use crate::error::{invalid, Error, Result};
use crate::numerics::special::{binomial, factorial, gamma_cdf_sf, gamma_pdf};
use crate::numerics::{gauss_legendre, integrate_1d, integrate_with_breaks, QuadratureSpec};
use crate::scalefn::{weighted_integral, GridLayout, LogGrid, ScaleFn};

/// Largest shape parameter supported by the closed forms.
pub const P_MAX: u32 = 8;
pub const Q_MAX: u32 = 8;

const fn tp(p: u32, q: u32, alpha: f64, beta: f64) -> TrialParams {
    TrialParams { p, q, alpha, beta }
}

/// Published trial parameters for `γ = d = 3..=9`.
pub const PUBLISHED_PARAMS: [(u32, TrialParams); 7] = [
    (3, tp(2, 3, 2.93254, 2.49795)),
    (4, tp(2, 3, 3.69214, 2.78716)),
    (5, tp(3, 2, 5.46494, 2.39433)),
    (6, tp(3, 2, 6.41334, 2.51583)),
    (7, tp(3, 2, 7.35963, 2.61721)),
    (8, tp(3, 2, 8.30512, 2.70368)),
    (9, tp(3, 2, 9.25042, 2.77865)),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialParams {
    pub p: u32,
    pub q: u32,
    pub alpha: f64,
    pub beta: f64,
}

impl TrialParams {
    pub fn new(p: u32, q: u32, alpha: f64, beta: f64) -> Result<Self> {
        let t = Self { p, q, alpha, beta };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 1 || self.q < 1 {
            return Err(invalid(format!("shapes must be >= 1, got p={} q={}", self.p, self.q)));
        }
        if self.p > P_MAX {
            return Err(Error::UnsupportedOrder { order: self.p, max: P_MAX });
        }
        if self.q > Q_MAX {
            return Err(Error::UnsupportedOrder { order: self.q, max: Q_MAX });
        }
        if !(self.alpha > 1.0 && self.alpha.is_finite()) {
            return Err(invalid(format!("alpha must be > 1, got {}", self.alpha)));
        }
        if !(self.beta > 1.0 && self.beta.is_finite()) {
            return Err(invalid(format!("beta must be > 1, got {}", self.beta)));
        }
        Ok(())
    }

    /// Exchanges the roles of `(p, α)` and `(q, β)`.
    pub fn swapped(&self) -> Self {
        Self { p: self.q, q: self.p, alpha: self.beta, beta: self.alpha }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveBreakdown {
    pub norm1: f64,
    pub norm2: f64,
    pub mu: f64,
    /// Tail functional of `m₁ * m₂`, i.e. `I_γ`.
    pub tail: f64,
    pub objective: f64,
    pub c_gamma: f64,
}

// ---------------------------------------------------------------------------
// Norms

/// `K(α₁, α₂) = (α₁ + α₂) / (α₁ α₂ (α₁ + α₂ - 2))`
pub fn k_closed(alpha1: f64, alpha2: f64) -> Result<f64> {
    if !(alpha1 > 0.0 && alpha2 > 0.0) || !(alpha1 + alpha2 > 2.0) {
        return Err(invalid(format!("K({alpha1}, {alpha2}) diverges: need α₁, α₂ > 0 and α₁ + α₂ > 2")));
    }
    let s = alpha1 + alpha2;
    Ok(s / (alpha1 * alpha2 * (s - 2.0)))
}

/// `(∂₁∂₂)^n K` at `α₁ = α₂ = α`.
///
/// `K = 1/(ab) + 2·f(a)g(b)h(a+b)` with `f = 1/a`, `g = 1/b`, `h = 1/(x-2)`;
/// all Leibniz terms carry the same sign, so the sum has no cancellation.
fn k_mixed_derivative(n: u32, alpha: f64) -> f64 {
    let nf = factorial(n);
    let first = nf * nf * alpha.powi(-2 * n as i32 - 2);
    let mut second = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            let k = i + j;
            second += binomial(n, i)
                * binomial(n, j)
                * factorial(n - i)
                * factorial(n - j)
                * factorial(k)
                * alpha.powi(-((n - i) as i32) - 1)
                * alpha.powi(-((n - j) as i32) - 1)
                * (2.0 * alpha - 2.0).powi(-(k as i32) - 1);
        }
    }
    first + 2.0 * second
}

/// `‖m₁‖² = ½·α^{2p}/Γ(p)²·(∂₁∂₂)^{p-1}K |_{α₁=α₂=α}`
pub fn m1_norm_sq(p: u32, alpha: f64) -> Result<f64> {
    if p < 1 {
        return Err(invalid("p must be >= 1"));
    }
    if p > P_MAX {
        return Err(Error::UnsupportedOrder { order: p, max: P_MAX });
    }
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(invalid(format!("alpha must be > 1, got {alpha}")));
    }
    let g = factorial(p - 1);
    Ok(0.5 * alpha.powi(2 * p as i32) / (g * g) * k_mixed_derivative(p - 1, alpha))
}

/// `‖m₂‖² = β^{2q}/(2^{2q-1}(β-1)^{2q-1})·Γ(2q-1)/Γ(q)²`
pub fn m2_norm_sq(q: u32, beta: f64) -> Result<f64> {
    if q < 1 {
        return Err(invalid("q must be >= 1"));
    }
    if q > Q_MAX {
        return Err(Error::UnsupportedOrder { order: q, max: Q_MAX });
    }
    if !(beta > 1.0 && beta.is_finite()) {
        return Err(invalid(format!("beta must be > 1, got {beta}")));
    }
    let e = 2 * q as i32 - 1;
    let g = factorial(q - 1);
    Ok(beta.powi(2 * q as i32) / (2f64.powi(e) * (beta - 1.0).powi(e)) * factorial(2 * q - 2) / (g * g))
}

// ---------------------------------------------------------------------------
// Trial functions on a grid

const MASS_TOL: f64 = 1e-10;
/// Width of the step that resolves the jump of `m₂` at `s = 1` when `q = 1`.
const JUMP_WIDTH: f64 = 1e-9;

/// Probability mass of Gamma(shape, rate) inside `[ln lo, ln hi]`.
fn captured_mass(shape: u32, rate: f64, lo: f64, hi: f64) -> f64 {
    let below = if lo <= 1.0 { 0.0 } else { gamma_cdf_sf(shape, rate * lo.ln()).0 };
    let above = gamma_cdf_sf(shape, rate * hi.ln()).1;
    1.0 - below - above
}

/// Node spacing above `s = 1`: steps grow by `1 + REFINE_RATIO` from
/// `1e-4·h` up to `FINE_FRACTION·h`, stay there for `FINE_SPAN` log-units,
/// then grow to the layout spacing `h`.
const FINE_FRACTION: f64 = 0.25;
const FINE_SPAN: f64 = 3.0;
const REFINE_RATIO: f64 = 0.02;

/// Inserts `s = 1` and a graded run of nodes above it. Near `x = 0⁺` the
/// trial functions behave like powers of `x`, which log-grid interpolation
/// only resolves on a finer run.
fn refine_above_one(xs: Vec<f64>) -> Vec<f64> {
    let h = xs[1] - xs[0];
    let last = *xs.last().unwrap();
    if !(xs[0] < 0.0 && last > h) {
        return xs;
    }
    let fine = h * FINE_FRACTION;
    let mut out: Vec<f64> = xs.iter().copied().filter(|&x| x < 0.0).collect();
    out.push(0.0);
    let mut x = 0.0;
    let mut step = 1e-4 * h;
    loop {
        let cap = if x < FINE_SPAN { fine } else { h };
        step = (step * (1.0 + REFINE_RATIO)).min(cap);
        x += step;
        if x >= last || (x >= FINE_SPAN && step >= h) {
            break;
        }
        out.push(x);
    }
    let end = *out.last().unwrap();
    out.extend(xs.iter().copied().filter(|&v| v >= end + 0.5 * h));
    out
}

/// Grid realizations of `m₁` and `m₂`.
///
/// Nodes are refined at `s = 1`, where both functions change form. The
/// samples of `m₂` are scaled so that the interpolant carries exactly unit
/// `ψ`-mass, which keeps `(m₁ * m₂)(t) = t` below `t = 1` on the grid.
pub fn make_trial(params: &TrialParams, layout: &GridLayout) -> Result<(ScaleFn, ScaleFn)> {
    params.validate()?;
    layout.validate()?;
    let TrialParams { p, q, alpha, beta } = *params;

    let spec = QuadratureSpec::default();
    for (shape, rate, name) in [(p, alpha, "ξ"), (q, beta, "ψ")] {
        let total = integrate_1d(|x| gamma_pdf(shape, rate, x), 0.0, f64::INFINITY, &spec)?.value;
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Resolution(format!("{name} integrates to {total}, not 1")));
        }
        let captured = captured_mass(shape, rate, layout.lo, layout.hi);
        if captured < 1.0 - MASS_TOL {
            return Err(Error::Resolution(format!(
                "grid [{:e}, {:e}] holds only {captured} of the {name} mass",
                layout.lo, layout.hi
            )));
        }
    }

    let xs = refine_above_one(layout.log_nodes());
    let m1_values = xs
        .iter()
        .map(|&x| if x <= 0.0 { x.exp() } else { x.exp() * gamma_cdf_sf(p, alpha * x).1 })
        .collect();
    let m1 = ScaleFn::LogGrid(LogGrid::from_log_nodes(xs.clone(), m1_values)?);

    let mut xs2 = xs;
    if q == 1 {
        if let Ok(at) = xs2.binary_search_by(|v| v.total_cmp(&0.0)) {
            if xs2.get(at + 1).is_none_or(|&next| next > JUMP_WIDTH) {
                xs2.insert(at + 1, JUMP_WIDTH);
            }
        }
    }
    let m2_values = xs2
        .iter()
        .map(|&x| if x <= 0.0 { 0.0 } else { x.exp() * gamma_pdf(q, beta, x) })
        .collect();
    let mut grid2 = LogGrid::from_log_nodes(xs2, m2_values)?;
    let mass = weighted_integral(&ScaleFn::LogGrid(grid2.clone()), -1.0)?;
    if !((mass - 1.0).abs() < 1e-3) {
        return Err(Error::Resolution(format!("grid interpolant of m₂ carries ψ-mass {mass}")));
    }
    grid2.scale_values(1.0 / mass);
    Ok((m1, ScaleFn::LogGrid(grid2)))
}

// ---------------------------------------------------------------------------
// The law of U = X + Y

/// Poisson terms `T_j = e^{-y} y^j / j!` for `j < nmax` and the regularized
/// lower incomplete gammas `P(n, y)` for `n = 1..=nmax`, without cancellation.
fn poisson_table(y: f64, nmax: usize, terms: &mut Vec<f64>, lower: &mut Vec<f64>) {
    terms.clear();
    lower.clear();
    let mut t = (-y).exp();
    for j in 0..nmax {
        if j > 0 {
            t *= y / j as f64;
        }
        terms.push(t);
    }
    // upper tail Σ_{j ≥ nmax} T_j, only needed (and only cheap) when y < nmax
    let mut beyond = 0.0;
    if y < nmax as f64 {
        let mut j = nmax;
        let mut t = if nmax == 0 { (-y).exp() } else { terms[nmax - 1] * y / nmax as f64 };
        while t > 1e-18 * beyond || beyond == 0.0 && t > 0.0 {
            beyond += t;
            j += 1;
            t *= y / j as f64;
            if j > nmax + 2000 {
                break;
            }
        }
    }
    let mut prefix = 0.0;
    let mut prefixes = Vec::with_capacity(nmax);
    for &t in terms.iter() {
        prefix += t;
        prefixes.push(prefix);
    }
    lower.resize(nmax, 0.0);
    let mut suffix = beyond;
    for n in (1..=nmax).rev() {
        // suffix = Σ_{j ≥ n} T_j
        lower[n - 1] = if y < n as f64 { suffix } else { 1.0 - prefixes[n - 1] };
        suffix += terms[n - 1];
    }
}

/// Density and distribution function of `U = Gamma(p, α) + Gamma(q, β)`.
enum GammaSum {
    /// `Σ w_k Gamma(n + k, rate)`: the slower component is a negative
    /// binomial mixture of Gamma laws at the faster rate.
    Mixture { n: usize, rate: f64, weights: Vec<f64> },
    /// `Σ A_i Gamma(i, α) + Σ B_j Gamma(j, β)`.
    Partial { alpha: f64, a: Vec<f64>, beta: f64, b: Vec<f64> },
}

/// Largest `1 - slow/fast` rate ratio handled by the mixture.
const MIXTURE_RHO: f64 = 0.5;

impl GammaSum {
    fn new(p: u32, alpha: f64, q: u32, beta: f64) -> Self {
        let (fast, slow) = if alpha >= beta { ((p, alpha), (q, beta)) } else { ((q, beta), (p, alpha)) };
        let rho = 1.0 - slow.1 / fast.1;
        if rho <= MIXTURE_RHO {
            let m = slow.0;
            let lead = (1.0 - rho).powi(m as i32);
            let mut weights = Vec::new();
            let mut total = 0.0;
            let mut k = 0u32;
            loop {
                let w = lead * binomial(k + m - 1, m - 1) * rho.powi(k as i32);
                weights.push(w);
                total += w;
                k += 1;
                // past the mode the weights decrease geometrically
                let past_mode = k as f64 > (m as f64 - 1.0) * rho / (1.0 - rho) + 1.0;
                if rho == 0.0 || (past_mode && w < 1e-17 * total) {
                    break;
                }
            }
            return Self::Mixture { n: (p + q) as usize, rate: fast.1, weights };
        }
        // partial fractions of (α/(α+s))^p (β/(β+s))^q
        let a = (1..=p)
            .map(|i| {
                let m = p - i;
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                sign * binomial(q + m - 1, m) * alpha.powi(m as i32) * beta.powi(q as i32)
                    / (beta - alpha).powi((q + m) as i32)
            })
            .collect();
        let b = (1..=q)
            .map(|j| {
                let m = q - j;
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                sign * binomial(p + m - 1, m) * beta.powi(m as i32) * alpha.powi(p as i32)
                    / (alpha - beta).powi((p + m) as i32)
            })
            .collect();
        Self::Partial { alpha, a, beta, b }
    }

    fn pdf_cdf(&self, u: f64, terms: &mut Vec<f64>, lower: &mut Vec<f64>) -> (f64, f64) {
        match self {
            Self::Mixture { n, rate, weights } => {
                poisson_table(rate * u, n + weights.len(), terms, lower);
                let mut f = 0.0;
                let mut cdf = 0.0;
                for (k, w) in weights.iter().enumerate() {
                    f += w * terms[n + k - 1];
                    cdf += w * lower[n + k - 1];
                }
                (rate * f, cdf)
            }
            Self::Partial { alpha, a, beta, b } => {
                let mut f = 0.0;
                let mut cdf = 0.0;
                for (rate, coeffs) in [(*alpha, a), (*beta, b)] {
                    poisson_table(rate * u, coeffs.len(), terms, lower);
                    for (i, c) in coeffs.iter().enumerate() {
                        f += c * rate * terms[i];
                        cdf += c * lower[i];
                    }
                }
                (f, cdf.clamp(0.0, 1.0))
            }
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 2.0) || !gamma.is_finite() {
        return Err(invalid(format!("γ must be > 2, got {gamma}")));
    }
    Ok(())
}

/// `I_γ = (1/(γ-2))·2∫₀^∞ e^{-(γ-2)u} f_U(u) F_U(u) du`
pub fn i_gamma_reduced(params: &TrialParams, gamma: f64, spec: &QuadratureSpec) -> Result<f64> {
    params.validate()?;
    check_gamma(gamma)?;
    let c = gamma - 2.0;
    let law = GammaSum::new(params.p, params.alpha, params.q, params.beta);
    let scratch = RefCell::new((Vec::new(), Vec::new()));
    let integrand = |u: f64| {
        let mut guard = scratch.borrow_mut();
        let (terms, lower) = &mut *guard;
        let (f, cdf) = law.pdf_cdf(u, terms, lower);
        (-c * u).exp() * f * cdf
    };
    let mean = params.p as f64 / params.alpha + params.q as f64 / params.beta;
    let q = integrate_with_breaks(integrand, 0.0, f64::INFINITY, &[mean], spec)?;
    Ok(2.0 * q.value / c)
}

/// `∫₀^∞ f`, for `f` smooth on `[0, kink]` and `[kink, ∞)` and decaying on
/// the length scale `scale`: Gauss–Legendre panels below the kink and a
/// rational map of the remaining half line. The rule is fixed, so the result
/// is a smooth function of any parameters `f` depends on.
fn fixed_half_line<F: Fn(f64) -> f64>(f: F, kink: f64, scale: f64) -> f64 {
    use std::sync::OnceLock;
    static RULES: OnceLock<((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>))> = OnceLock::new();
    let ((px, pw), (tx, tw)) = RULES.get_or_init(|| (gauss_legendre(14), gauss_legendre(28)));
    let mut total = 0.0;
    let mut lo = 0.0;
    if kink > 0.0 {
        let mut edges: Vec<f64> = [1.0, 3.0, 8.0, 20.0].iter().map(|m| m * scale).filter(|&e| e < kink).collect();
        edges.push(kink);
        for hi in edges {
            let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            total += h * px.iter().zip(pw).map(|(x, w)| w * f(c + h * x)).sum::<f64>();
            lo = hi;
        }
    }
    // y = lo + scale·t/(1-t), t ∈ [0, 1)
    total
        + tx.iter()
            .zip(tw)
            .map(|(x, w)| {
                let t = 0.5 * (x + 1.0);
                let y = lo + scale * t / (1.0 - t);
                0.5 * w * f(y) * scale / ((1.0 - t) * (1.0 - t))
            })
            .sum::<f64>()
}

/// `I_γ` by iterated quadrature of the four-fold integral in the log
/// variables. The outer integral is adaptive with the error control of
/// `spec`; the three inner ones use fixed rules split at the kinks of the max.
pub fn i_gamma_brute(params: &TrialParams, gamma: f64, spec: &QuadratureSpec) -> Result<f64> {
    params.validate()?;
    check_gamma(gamma)?;
    let TrialParams { p, q, alpha, beta } = *params;
    let c = gamma - 2.0;
    let (la, lb) = (1.0 / alpha, 1.0 / beta);

    // ∫ ψ(y₂) e^{-c max(S, x₂ + y₂)} dy₂
    let level4 = |s: f64, x2: f64| {
        fixed_half_line(|y2| gamma_pdf(q, beta, y2) * (-c * s.max(x2 + y2)).exp(), s - x2, lb)
    };
    let level3 = |s: f64| fixed_half_line(|x2| gamma_pdf(p, alpha, x2) * level4(s, x2), s, la);
    let level2 = |x1: f64| fixed_half_line(|y1| gamma_pdf(q, beta, y1) * level3(x1 + y1), 0.0, lb);
    let outer = integrate_1d(|x1| gamma_pdf(p, alpha, x1) * level2(x1), 0.0, f64::INFINITY, spec)?;
    Ok(outer.value / c)
}

/// `(‖m₁‖‖m₂‖)^{γ-2}·I_γ` with its components and the assembled `C_γ`.
pub fn trial_objective(params: &TrialParams, gamma: f64, spec: &QuadratureSpec) -> Result<ObjectiveBreakdown> {
    params.validate()?;
    check_gamma(gamma)?;
    let n1 = m1_norm_sq(params.p, params.alpha)?;
    let n2 = m2_norm_sq(params.q, params.beta)?;
    let tail = i_gamma_reduced(params, gamma, spec)?;
    let objective = (0.5 * (gamma - 2.0) * (n1 * n2).ln()).exp() * tail;
    Ok(ObjectiveBreakdown {
        norm1: n1.sqrt(),
        norm2: n2.sqrt(),
        mu: (n1 * n2).sqrt(),
        tail,
        objective,
        c_gamma: constants::c_gamma(gamma, objective)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn k_examples() {
        assert_eq!(k_closed(2.0, 2.0).unwrap(), 0.5);
        assert!((k_closed(3.0, 3.0).unwrap() - 1.0 / 6.0).abs() < 1e-16);
        assert!(k_closed(1.01, 1.01).unwrap() > 0.0);
        assert!(matches!(k_closed(1.0, 1.0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn m1_norm_examples() {
        assert!((m1_norm_sq(1, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((m1_norm_sq(1, 3.0).unwrap() - 0.75).abs() < 1e-15);
        assert!(matches!(m1_norm_sq(9, 2.0), Err(Error::UnsupportedOrder { order: 9, max: 8 })));
        for a in [1.1, 2.0, 7.3] {
            let expected = a * a * k_closed(a, a).unwrap() / 2.0;
            assert!((m1_norm_sq(1, a).unwrap() - expected).abs() < 1e-14 * expected);
        }
    }

    #[test]
    fn m2_norm_examples() {
        assert!((m2_norm_sq(1, 2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((m2_norm_sq(1, 3.0).unwrap() - 2.25).abs() < 1e-15);
        assert!((m2_norm_sq(2, 2.0).unwrap() - 4.0).abs() < 1e-15);
        assert!(matches!(m2_norm_sq(1, 1.0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn poisson_table_matches_incomplete_gamma() {
        let (mut t, mut l) = (Vec::new(), Vec::new());
        for y in [1e-6, 0.3, 2.0, 7.5, 30.0] {
            poisson_table(y, 12, &mut t, &mut l);
            for n in 1..=12u32 {
                let (p, _) = gamma_cdf_sf(n, y);
                assert!((l[n as usize - 1] - p).abs() <= 1e-14 * p.max(1e-300) + 1e-16, "{y} {n}");
            }
        }
    }

    #[test]
    fn gamma_sum_branches_agree_near_threshold() {
        // ρ on either side of the switch: densities must be continuous in β
        let (mut t, mut l) = (Vec::new(), Vec::new());
        let a = GammaSum::new(2, 4.0, 3, 2.0 + 1e-9);
        let b = GammaSum::new(2, 4.0, 3, 2.0 - 1e-9);
        assert!(matches!(a, GammaSum::Mixture { .. }));
        assert!(matches!(b, GammaSum::Partial { .. }));
        for u in [0.05, 0.4, 1.5, 4.0] {
            let (fa, ca) = a.pdf_cdf(u, &mut t, &mut l);
            let (fb, cb) = b.pdf_cdf(u, &mut t, &mut l);
            assert!((fa - fb).abs() < 1e-8 * fa, "{u}: {fa} {fb}");
            assert!((ca - cb).abs() < 1e-8 * ca, "{u}: {ca} {cb}");
        }
    }

    #[test]
    fn equal_rates_are_a_single_gamma() {
        let (mut t, mut l) = (Vec::new(), Vec::new());
        let law = GammaSum::new(2, 3.0, 1, 3.0);
        for u in [0.1, 1.0, 3.0] {
            let (f, cdf) = law.pdf_cdf(u, &mut t, &mut l);
            assert!((f - gamma_pdf(3, 3.0, u)).abs() < 1e-15);
            assert!((cdf - gamma_cdf_sf(3, 3.0 * u).0).abs() < 1e-15);
        }
    }

    #[test]
    fn reduced_matches_brute_force() {
        let cases = [
            (TrialParams::new(1, 1, 2.0, 2.0).unwrap(), 3.0),
            (TrialParams::new(1, 1, 3.0, 3.0).unwrap(), 4.0),
        ];
        for (params, gamma) in cases {
            let r = i_gamma_reduced(&params, gamma, &spec()).unwrap();
            let b = i_gamma_brute(&params, gamma, &spec()).unwrap();
            assert!((r / b - 1.0).abs() < 1e-6, "{params:?}: {r} vs {b}");
        }
    }

    #[test]
    fn reduced_is_symmetric_under_swap() {
        let t = TrialParams::new(2, 3, 2.93254, 2.49795).unwrap();
        let a = i_gamma_reduced(&t, 3.0, &spec()).unwrap();
        let b = i_gamma_reduced(&t.swapped(), 3.0, &spec()).unwrap();
        assert!((a / b - 1.0).abs() < 1e-11);
    }

    #[test]
    fn table_row_d3() {
        let t = TrialParams::new(2, 3, 2.93254, 2.49795).unwrap();
        let b = trial_objective(&t, 3.0, &spec()).unwrap();
        assert!((b.c_gamma / 7.55151 - 1.0).abs() < 1e-3, "{}", b.c_gamma);
        assert!((b.objective - b.mu.powf(1.0) * b.tail).abs() < 1e-12 * b.objective);
    }

    #[test]
    fn make_trial_simple_cases() {
        let layout = GridLayout::default();
        let (m1, _) = make_trial(&TrialParams::new(1, 1, 2.0, 2.0).unwrap(), &layout).unwrap();
        for s in [1e-3, 0.5, 1.0, 2.0, 40.0] {
            let expected = f64::min(s, 1.0 / s);
            assert!((m1.eval(s).unwrap() / expected - 1.0).abs() < 1e-12, "{s}");
        }
        let (_, m2) = make_trial(&TrialParams::new(1, 1, 2.0, 2.0).unwrap(), &layout).unwrap();
        for s in [1.5, 3.0, 100.0] {
            assert!((m2.eval(s).unwrap() / (2.0 / s) - 1.0).abs() < 1e-6, "{s}");
        }
        assert_eq!(m2.eval(0.5).unwrap(), 0.0);
    }

    #[test]
    fn make_trial_rejects_narrow_grid() {
        let layout = GridLayout::new(1e-2, 1e2, 512).unwrap();
        let r = make_trial(&TrialParams::new(3, 2, 1.5, 1.5).unwrap(), &layout);
        assert!(matches!(r, Err(Error::Resolution(_))));
    }
}
