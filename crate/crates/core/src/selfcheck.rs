//! Invariant suites run by `clr-lab check`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::constants::{
    self, c_gamma, c_lower, c_simple, cwikel_general, cwikel_simple, frank_ratio, frank_rumin, lt_classical, m_lower,
    m_simple, semiclassical_factor, PUBLISHED_C, PUBLISHED_C_LOWER,
};
use crate::error::{invalid, Result};
use crate::kinetic::{bound_opt_with, g_t, hs_density, PotentialProfile, RadialSymbol, Sample};
use crate::numerics::{integrate_1d, minimize_scalar, minimize_simplex, QuadratureSpec, SearchSpec};
use crate::optimize::{mgamma_upper_with, optimize_trial_with, preferred_cells, ParamBox};
use crate::report::{Cell, Table};
use crate::scalefn::{l2_scalenorm, mconvolve, tail_functional, GridLayout, ScaleFn};
use crate::trial::{
    i_gamma_brute, i_gamma_reduced, m1_norm_sq, make_trial, trial_objective, TrialParams, PUBLISHED_PARAMS,
};

pub const SUITES: [&str; 8] = ["numerics", "scalefn", "trial", "optimize", "sandwich", "constants", "table", "kinetic"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub search: SearchSpec,
    pub quadrature: QuadratureSpec,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self { search: SearchSpec::default(), quadrature: QuadratureSpec::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

struct Suite {
    name: &'static str,
    out: Vec<CheckResult>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self { name, out: Vec::new() }
    }

    fn record(&mut self, name: impl Into<String>, passed: bool, detail: String) {
        self.out.push(CheckResult { suite: self.name.into(), name: name.into(), passed, detail });
    }

    fn rel(&mut self, name: impl Into<String>, value: Result<f64>, expected: f64, tol: f64) {
        match value {
            Ok(v) => {
                let err = if expected == 0.0 { v.abs() } else { ((v - expected) / expected).abs() };
                self.record(name, err <= tol, format!("{v:.12e} vs {expected:.12e}, rel err {err:.2e} (tol {tol:.0e})"));
            }
            Err(e) => self.record(name, false, format!("error: {e}")),
        }
    }

    fn abs(&mut self, name: impl Into<String>, value: Result<f64>, expected: f64, tol: f64) {
        match value {
            Ok(v) => {
                let err = (v - expected).abs();
                self.record(name, err <= tol, format!("{v:.12e} vs {expected:.12e}, abs err {err:.2e} (tol {tol:.0e})"));
            }
            Err(e) => self.record(name, false, format!("error: {e}")),
        }
    }

    fn holds(&mut self, name: impl Into<String>, value: Result<bool>, detail: impl Into<String>) {
        match value {
            Ok(ok) => self.record(name, ok, detail.into()),
            Err(e) => self.record(name, false, format!("error: {e}")),
        }
    }
}

/// Runs the named suites (all when `only` is empty), in the order of
/// [`SUITES`].
pub fn run_checks(only: &[String], cfg: &CheckConfig) -> Result<Vec<CheckResult>> {
    for name in only {
        if !SUITES.contains(&name.as_str()) {
            return Err(invalid(format!("unknown check suite {name:?}; available: {}", SUITES.join(", "))));
        }
    }
    cfg.quadrature.validate()?;
    cfg.search.validate()?;
    let mut out = Vec::new();
    for name in SUITES {
        if !only.is_empty() && !only.iter().any(|o| o == name) {
            continue;
        }
        let mut s = Suite::new(name);
        match name {
            "numerics" => numerics(&mut s, cfg),
            "scalefn" => scalefn(&mut s, cfg),
            "trial" => trial(&mut s, cfg),
            "optimize" => optimize(&mut s, cfg),
            "sandwich" => sandwich(&mut s, cfg),
            "constants" => constants_suite(&mut s),
            "table" => table(&mut s, cfg),
            "kinetic" => kinetic(&mut s, cfg),
            _ => unreachable!(),
        }
        out.extend(s.out);
    }
    Ok(out)
}

pub fn summary_table(results: &[CheckResult]) -> Table {
    let mut t = Table::new(["suite", "check", "status", "detail"]);
    for r in results {
        t.push(vec![
            r.suite.as_str().into(),
            r.name.as_str().into(),
            Cell::Text(if r.passed { "pass" } else { "FAIL" }.into()),
            r.detail.as_str().into(),
        ]);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    t.notes.push(format!("{} checks, {} failed", results.len(), failed));
    t
}

fn numerics(s: &mut Suite, cfg: &CheckConfig) {
    let q = &cfg.quadrature;
    let tol = 1e-10;
    s.rel("∫₀¹ x dx", integrate_1d(|x| x, 0.0, 1.0, q).map(|r| r.value), 0.5, tol);
    s.rel("∫₁^∞ t⁻³ dt", integrate_1d(|t| t.powi(-3), 1.0, f64::INFINITY, q).map(|r| r.value), 0.5, tol);
    s.rel("∫₀^∞ x e⁻ˣ dx", integrate_1d(|x| x * (-x).exp(), 0.0, f64::INFINITY, q).map(|r| r.value), 1.0, tol);
    s.rel("∫₀^∞ e^{-x²} dx", integrate_1d(|x| (-x * x).exp(), 0.0, f64::INFINITY, q).map(|r| r.value), 0.5 * std::f64::consts::PI.sqrt(), tol);

    let search = &cfg.search;
    let cubic = minimize_scalar(|l| (1.0 + l).powi(3) / (l * l), (0.1, 50.0), search);
    s.rel("argmin (1+λ)³/λ²", cubic.as_ref().map(|m| m.argmin).map_err(Clone::clone), 2.0, 1e-6);
    s.rel("min (1+λ)³/λ²", cubic.map(|m| m.min), 6.75, 1e-12);
    let sixth = minimize_scalar(|l| (1.0 + l).powi(6) / (l * l), (0.1, 50.0), search);
    s.rel("argmin (1+λ)⁶/λ²", sixth.as_ref().map(|m| m.argmin).map_err(Clone::clone), 0.5, 1e-6);
    s.rel("min (1+λ)⁶/λ²", sixth.map(|m| m.min), 45.5625, 1e-12);

    let rosen = SearchSpec { bounds: vec![(-2.0, 2.0), (-2.0, 2.0)], ..search.clone() };
    let r = minimize_simplex(|x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2), &rosen);
    s.abs("Rosenbrock minimum", r.map(|m| m.min), 0.0, 1e-10);
}

fn scalefn(s: &mut Suite, cfg: &CheckConfig) {
    let q = &cfg.quadrature;
    let m = ScaleFn::min_t_inv();
    for g in [2.5, 3.0, 4.0, 6.0, 9.0] {
        s.rel(format!("R_γ(min(t,1/t)) at γ = {g}"), tail_functional(&m, g, q).map(|t| t.value), m_simple(g).unwrap(), 1e-8);
    }
    // odd node count puts the kink of min(t, 1/t) on a node
    let layout = GridLayout::new(1e-8, 1e8, 4097).unwrap();
    let grid = m.to_grid(&layout).map(ScaleFn::LogGrid);
    for g in [3.0, 6.0] {
        let v = grid.as_ref().map_err(Clone::clone).and_then(|gm| tail_functional(gm, g, q)).map(|t| t.value);
        s.rel(format!("R_γ of sampled min(t,1/t) at γ = {g}"), v, m_simple(g).unwrap(), 1e-8);
    }

    let (m1, m2) = ScaleFn::simple_pair();
    let golden = || -> Result<f64> {
        let conv = mconvolve(&m1, &m2, &layout)?;
        let mut worst: f64 = 0.0;
        for x in layout.log_nodes() {
            let t = x.exp();
            worst = worst.max((conv.eval(t)? - m.eval(t)?).abs());
        }
        Ok(worst)
    };
    s.abs("simple pair convolves to min(t,1/t) (sup node error)", golden(), 0.0, 1e-6);
    let norms = l2_scalenorm(&m1).and_then(|a| Ok(a * l2_scalenorm(&m2)?));
    s.rel("‖m₁‖‖m₂‖ of the simple pair", norms, 1.0, 1e-8);
    let dil = m.dilate(3.7).and_then(|d| l2_scalenorm(&d));
    s.rel("dilation preserves ‖·‖", dil, l2_scalenorm(&m).unwrap(), 1e-12);
    let inv = m1.invert().and_then(|d| l2_scalenorm(&d));
    s.rel("inversion preserves ‖·‖", inv, l2_scalenorm(&m1).unwrap(), 1e-12);
    let lvl = ScaleFn::min_t_level(1.0).and_then(|f| tail_functional(&f, 4.0, q)).map(|t| t.value);
    s.rel("R_γ(min(t,1)) at γ = 4 equals the lower bound", lvl, m_lower(4.0).unwrap(), 1e-10);
}

fn trial(s: &mut Suite, cfg: &CheckConfig) {
    let q = &cfg.quadrature;
    for (p, qq, a, b, g) in [(2, 3, 2.0, 3.0, 3.0), (1, 1, 5.0, 2.0, 6.0)] {
        let params = TrialParams::new(p, qq, a, b).unwrap();
        let brute_spec = q.clone().with_rel_tol(q.rel_tol.max(1e-8));
        let brute = i_gamma_brute(&params, g, &brute_spec);
        match brute {
            Ok(bv) => s.rel(format!("reduced vs brute I_γ, (p,q,α,β,γ) = ({p},{qq},{a},{b},{g})"), i_gamma_reduced(&params, g, q), bv, 1e-4),
            Err(e) => s.record(format!("reduced vs brute I_γ, (p,q,α,β,γ) = ({p},{qq},{a},{b},{g})"), false, format!("brute: {e}")),
        }
    }
    let params = TrialParams::new(2, 1, 2.0, 2.0).unwrap();
    let grids = make_trial(&params, &GridLayout::default());
    let n1 = grids.and_then(|(g1, _)| l2_scalenorm(&g1)).map(|n| n * n);
    s.rel("‖m₁‖² closed form vs grid, (p,α) = (2,2)", n1, m1_norm_sq(2, 2.0).unwrap(), 1e-6);
    let params = TrialParams::new(2, 3, 2.93254, 2.49795).unwrap();
    match i_gamma_reduced(&params, 3.0, q) {
        Ok(v) => s.rel("I_γ is symmetric under (p,α) ↔ (q,β)", i_gamma_reduced(&params.swapped(), 3.0, q), v, 1e-10),
        Err(e) => s.record("I_γ is symmetric under (p,α) ↔ (q,β)", false, format!("error: {e}")),
    }
    let floor = m_lower(3.0).unwrap();
    s.holds("objective above the lower bound", trial_objective(&params, 3.0, q).map(|b| b.objective >= floor - 1e-9), "");
}

fn optimize(s: &mut Suite, cfg: &CheckConfig) {
    let q = &cfg.quadrature;
    for (d, params) in [PUBLISHED_PARAMS[0], PUBLISHED_PARAMS[6]] {
        let g = d as f64;
        let stationary = || -> Result<(bool, f64)> {
            let base = trial_objective(&params, g, q)?.objective;
            let mut worst: f64 = 0.0;
            for (da, db) in [(1.01, 1.0), (0.99, 1.0), (1.0, 1.01), (1.0, 0.99)] {
                let p = TrialParams { alpha: params.alpha * da, beta: params.beta * db, ..params };
                let v = trial_objective(&p, g, q)?.objective;
                worst = worst.max((base - v) / base);
            }
            Ok((worst <= 1e-3, worst))
        };
        match stationary() {
            Ok((ok, w)) => s.record(format!("published point is stationary-or-better at γ = {d}"), ok, format!("largest relative decrease {w:.2e} (tol 1e-3)")),
            Err(e) => s.record(format!("published point is stationary-or-better at γ = {d}"), false, format!("error: {e}")),
        }
    }
    let search = SearchSpec { restarts: cfg.search.restarts.min(4), ..cfg.search.clone() };
    let run = || optimize_trial_with(3.0, &[(2, 3)], &ParamBox::default(), &search, q);
    match (run(), run()) {
        (Ok(a), Ok(b)) => s.record(
            "optimizer is reproducible for a fixed seed",
            a.params == b.params,
            format!("α = {:.15e}, β = {:.15e}", a.params.alpha, a.params.beta),
        ),
        (Err(e), _) | (_, Err(e)) => s.record("optimizer is reproducible for a fixed seed", false, format!("error: {e}")),
    }
}

fn sandwich(s: &mut Suite, cfg: &CheckConfig) {
    for g in [2.1, 2.5, 3.0, 4.0, 6.0, 9.0, 12.0, 20.0] {
        let lo = m_lower(g).unwrap();
        let hi = m_simple(g).unwrap();
        let v = mgamma_upper_with(g, &preferred_cells(g), &cfg.search, &cfg.quadrature);
        let name = format!("M_γ sandwich at γ = {g}");
        match v {
            Ok(m) => s.record(name, lo <= m && m <= hi, format!("{lo:.9e} <= {m:.9e} <= {hi:.9e}")),
            Err(e) => s.record(name, false, format!("error: {e}")),
        }
    }
}

fn constants_suite(s: &mut Suite) {
    s.abs("c_simple(3)", c_simple(3.0), 10.8, 1e-9);
    s.rel("c_gamma(3, 8/15)", c_gamma(3.0, 8.0 / 15.0), 10.8, 1e-12);
    for g in [2.5, 3.0, 7.0] {
        s.rel(format!("c_simple = c_gamma at the simple choice, γ = {g}"), c_gamma(g, m_simple(g).unwrap()), c_simple(g).unwrap(), 1e-12);
    }
    for g in [2.5, 3.0, 5.0, 10.0] {
        let ratio = c_gamma(g, m_simple(g).unwrap()).and_then(|a| Ok(a / c_lower(g)?));
        s.rel(format!("simple/lower ratio 4(γ-1)/(γ+2), γ = {g}"), ratio, 4.0 * (g - 1.0) / (g + 2.0), 1e-12);
    }
    for theta in [0.0, 0.5, 1.0] {
        for n in 1..=3u32 {
            for d in 4..=6u32 {
                let rhs = lt_classical(theta, n).and_then(|a| Ok(a * lt_classical(theta + n as f64 / 2.0, d - n)?));
                s.rel(format!("L^cl multiplicativity (θ,n,d) = ({theta},{n},{d})"), rhs, lt_classical(theta, d).unwrap(), 1e-12);
            }
        }
    }
    s.rel("L^cl(0,3) = semiclassical factor", lt_classical(0.0, 3), semiclassical_factor(3).unwrap(), 1e-12);
    for p in [2.5, 3.0, 4.0, 6.0] {
        let general = cwikel_general(p, 1.0, 8.0 / ((p - 2.0) * p * (p + 2.0)));
        s.rel(format!("Cwikel simple vs general, p = {p}"), general, cwikel_simple(p).unwrap(), 1e-12);
        s.rel(format!("Frank ratio (p+2)/4, p = {p}"), frank_ratio(p), (p + 2.0) / 4.0, 1e-12);
    }
    for (d, v) in PUBLISHED_C_LOWER {
        let exact = lower_rational(d as u128);
        s.rel(format!("C^lower at d = {d} vs exact rational"), c_lower(d as f64), exact, 1e-12);
        s.abs(format!("C^lower at d = {d} vs published table"), c_lower(d as f64), v, 1e-4);
    }
    let limit = 0.5 * std::f64::consts::E.powi(2);
    s.rel("C^lower(1000) near e²/2", c_lower(1000.0), limit, 1e-2);
    for (d, a) in [(3u32, 1.0), (4, 1.0), (5, 1.0), (3, 0.5), (5, 2.0), (7, 1.5)] {
        let dominated = c_simple(d as f64 / a).and_then(|c| Ok(c < frank_rumin(d, a)?));
        s.holds(format!("c_simple below the Rumin-type constant, (d,α) = ({d},{a})"), dominated, "");
    }
    let table: BTreeMap<u32, f64> = PUBLISHED_C.into_iter().collect();
    s.abs("C^op at d = 12 from the published C_n", constants::c_op_table(12, &table).map(|t| t[&12]), 5.62080, 1e-3);
}

/// `d^d/(2(d-1)(d-2)^{d-1})` in integer arithmetic.
fn lower_rational(d: u128) -> f64 {
    let num = d.pow(d as u32);
    let den = 2 * (d - 1) * (d - 2).pow(d as u32 - 1);
    (num / den) as f64 + (num % den) as f64 / den as f64
}

fn table(s: &mut Suite, cfg: &CheckConfig) {
    for ((d, params), (_, published)) in PUBLISHED_PARAMS.into_iter().zip(PUBLISHED_C) {
        let c = trial_objective(&params, d as f64, &cfg.quadrature).map(|b| b.c_gamma);
        s.rel(format!("C_{{0,{d}}} at the published parameters"), c, published, 1e-3);
    }
}

fn kinetic(s: &mut Suite, cfg: &CheckConfig) {
    let q = &cfg.quadrature;
    for (d, a) in [(3u32, 1.0), (3, 0.5), (5, 2.0)] {
        let g = d as f64 / a;
        let t = RadialSymbol::power(a, d).unwrap();
        let unit = g * constants::ball_volume(d).unwrap() / (2.0 * std::f64::consts::PI).powi(d as i32) * m_simple(g).unwrap();
        for u in [1.0, 2.0] {
            s.rel(format!("G_T closed form, (d,α,u) = ({d},{a},{u})"), g_t(&t, u, q), u.powf(g / 2.0) * unit, 1e-6);
        }
        let profile = PotentialProfile::new(d, vec![Sample { u: 1.0, w: 1.0 }, Sample { u: 0.3, w: 2.5 }], "").unwrap();
        match bound_opt_with(&t, &profile, &cfg.search, q) {
            Ok(o) => {
                s.rel(format!("optimized bound vs closed form, (d,α) = ({d},{a})"), Ok(o.bound), o.closed_form.unwrap_or(f64::NAN), 1e-6);
                s.rel(format!("λ* = 2/(γ-2), (d,α) = ({d},{a})"), Ok(o.lambda_star), 2.0 / (g - 2.0), 1e-6);
            }
            Err(e) => s.record(format!("optimized bound, (d,α) = ({d},{a})"), false, format!("error: {e}")),
        }
    }
    let symbols = [
        RadialSymbol::power(1.0, 3).unwrap(),
        RadialSymbol::tabulated(vec![0.5, 1.0, 2.0, 4.0], vec![0.3, 1.2, 3.5, 17.0], 2.0, 2.0, 3).unwrap(),
    ];
    for (k, t) in symbols.iter().enumerate() {
        let m = ScaleFn::min_t_inv();
        for u in [0.7, 5.0] {
            let lhs = g_t(t, u, q);
            let rhs = t.inverse_sqrt().and_then(|g| hs_density(&g, &m, u.sqrt(), q));
            match rhs {
                Ok(r) => s.rel(format!("G_T = G_{{T^(-1/2), min(t,1/t)}}(√u), symbol {k}, u = {u}"), lhs, r, 1e-8),
                Err(e) => s.record(format!("G_T identity, symbol {k}, u = {u}"), false, format!("error: {e}")),
            }
        }
    }
    let flat = RadialSymbol::tabulated(vec![0.5, 1.0, 2.0], vec![0.25, 1.0, 2.0], 0.0, 2.0, 3).unwrap();
    s.holds("G_T = +∞ above a finite limit of T", g_t(&flat, 3.0, q).map(f64::is_infinite), "tail exponent 0, u above the limit");
}
