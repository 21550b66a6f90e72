//! Closed-form constants: `C_γ` from `M_γ`, the simple-choice and lower
//! bounds, classical Lieb–Thirring constants, Cwikel constants and the
//! assembled per-dimension report.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numerics::special::ln_gamma;
use crate::numerics::{QuadratureSpec, SearchSpec};
use crate::optimize;

/// Default largest dimension whose `C_n` enters the operator-valued minimum.
pub const N_CAP: u32 = 9;

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 2.0) || !gamma.is_finite() {
        return Err(invalid(format!("γ must be > 2, got {gamma}")));
    }
    Ok(())
}

/// `|B₁^d| = π^{d/2}/Γ(d/2 + 1)`
pub fn ball_volume(d: u32) -> Result<f64> {
    if d < 1 {
        return Err(invalid("dimension must be >= 1"));
    }
    let h = d as f64 / 2.0;
    Ok((h * PI.ln() - ln_gamma(h + 1.0)).exp())
}

/// `|S^{d-1}| = d·|B₁^d|`
pub fn sphere_area(d: u32) -> Result<f64> {
    Ok(d as f64 * ball_volume(d)?)
}

/// `|B₁^d|/(2π)^d`
pub fn semiclassical_factor(d: u32) -> Result<f64> {
    Ok(ball_volume(d)? / (2.0 * PI).powi(d as i32))
}

/// `L^cl_{θ,d} = (4π)^{-d/2}·Γ(θ+1)/Γ(θ+1+d/2)`
pub fn lt_classical(theta: f64, d: u32) -> Result<f64> {
    if !(theta >= 0.0) {
        return Err(invalid(format!("θ must be >= 0, got {theta}")));
    }
    if d < 1 {
        return Err(invalid("dimension must be >= 1"));
    }
    let h = d as f64 / 2.0;
    Ok((-h * (4.0 * PI).ln() + ln_gamma(theta + 1.0) - ln_gamma(theta + 1.0 + h)).exp())
}

/// `C_γ = γ^{γ+1}/(4(γ-2)^{γ-2})·M`
pub fn c_gamma(gamma: f64, m_value: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(m_value > 0.0) {
        return Err(invalid(format!("M value must be positive, got {m_value}")));
    }
    let g = gamma;
    Ok(((g + 1.0) * g.ln() - 4f64.ln() - (g - 2.0) * (g - 2.0).ln() + m_value.ln()).exp())
}

/// `2γ^γ/((γ-2)^{γ-1}(γ+2))`
pub fn c_simple(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let g = gamma;
    Ok((2f64.ln() + g * g.ln() - (g - 1.0) * (g - 2.0).ln() - (g + 2.0).ln()).exp())
}

/// `γ^γ/(2(γ-1)(γ-2)^{γ-1})`
pub fn c_lower(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let g = gamma;
    Ok((g * g.ln() - 2f64.ln() - (g - 1.0).ln() - (g - 1.0) * (g - 2.0).ln()).exp())
}

/// `2/(γ(γ-1)(γ-2))`, the lower end of the `M_γ` sandwich.
pub fn m_lower(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(2.0 / (gamma * (gamma - 1.0) * (gamma - 2.0)))
}

/// `8/(γ(γ-2)(γ+2))`, the value of the simple choice and upper end of the sandwich.
pub fn m_simple(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(8.0 / (gamma * (gamma - 2.0) * (gamma + 2.0)))
}

/// `C^op(d) = min_{3 ≤ n ≤ min(d, N_CAP)} C_n` for `d = 3..=d_max`.
pub fn c_op_table(d_max: u32, per_gamma_c: &BTreeMap<u32, f64>) -> Result<BTreeMap<u32, f64>> {
    c_op_table_capped(d_max, per_gamma_c, N_CAP)
}

pub fn c_op_table_capped(d_max: u32, per_gamma_c: &BTreeMap<u32, f64>, n_cap: u32) -> Result<BTreeMap<u32, f64>> {
    if d_max < 3 {
        return Err(invalid(format!("operator-valued table needs d_max >= 3, got {d_max}")));
    }
    if n_cap < 3 {
        return Err(invalid("n_cap must be >= 3"));
    }
    let mut out = BTreeMap::new();
    let mut best = f64::INFINITY;
    for d in 3..=d_max {
        if d <= n_cap {
            let c = *per_gamma_c.get(&d).ok_or_else(|| invalid(format!("missing C_n for n = {d}")))?;
            // strict comparison keeps the smallest n on ties
            if c < best {
                best = c;
            }
        }
        out.insert(d, best);
    }
    Ok(out)
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 2.0) || !p.is_finite() {
        return Err(invalid(format!("p must be > 2, got {p}")));
    }
    Ok(())
}

/// Weak-trace constant `(p/(p-2))^p·((p-2)/2)²·μ^{p-2}·p·R_p(m)`.
pub fn cwikel_general(p: f64, mu: f64, tail_p: f64) -> Result<f64> {
    check_p(p)?;
    if !(mu > 0.0) {
        return Err(invalid(format!("μ must be positive, got {mu}")));
    }
    if !(tail_p >= 0.0) {
        return Err(invalid(format!("tail must be nonnegative, got {tail_p}")));
    }
    Ok((p / (p - 2.0)).powf(p) * ((p - 2.0) / 2.0).powi(2) * mu.powf(p - 2.0) * p * tail_p)
}

/// `2(p-2)/(p+2)·(p/(p-2))^p`
pub fn cwikel_simple(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(2.0 * (p - 2.0) / (p + 2.0) * (p / (p - 2.0)).powf(p))
}

/// Frank's constant `p/2·(p/(p-2))^{p-1}`.
pub fn frank_cwikel(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(p / 2.0 * (p / (p - 2.0)).powf(p - 1.0))
}

/// `frank_cwikel(p)/cwikel_simple(p)`, which equals `(p+2)/4`.
pub fn frank_ratio(p: f64) -> Result<f64> {
    Ok(frank_cwikel(p)? / cwikel_simple(p)?)
}

/// Frank's constant obtained with Rumin's method,
/// `(d(d+2α)/(d-2α)²)^{(d-2α)/(2α)}·d/(d-2α)`.
pub fn frank_rumin(d: u32, alpha_order: f64) -> Result<f64> {
    let d = d as f64;
    if !(alpha_order > 0.0 && 2.0 * alpha_order < d) {
        return Err(invalid(format!("need 0 < α < d/2, got d={d}, α={alpha_order}")));
    }
    let e = d - 2.0 * alpha_order;
    Ok((d * (d + 2.0 * alpha_order) / (e * e)).powf(e / (2.0 * alpha_order)) * d / e)
}

/// Published comparison values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceData {
    /// Lieb's constants for the scalar case, by dimension.
    pub lieb_scalar: BTreeMap<u32, f64>,
    /// Frank–Lieb–Seiringer, operator-valued case.
    pub fls_opvalued: f64,
    /// Daubechies, relativistic case `d = 3`.
    pub daubechies_relativistic: f64,
}

impl Default for ReferenceData {
    fn default() -> Self {
        Self {
            lieb_scalar: [(3, 6.86924), (4, 6.03398), (5, 5.96677), (6, 6.07489), (7, 6.24464), (8, 6.43921), (9, 6.64378)]
                .into_iter()
                .collect(),
            fls_opvalued: 10.332,
            daubechies_relativistic: 6.08,
        }
    }
}

/// Best published upper bounds `C_{0,d}` from the Gamma trial family, `d = 3..=9`.
pub const PUBLISHED_C: [(u32, f64); 7] =
    [(3, 7.55151), (4, 6.32791), (5, 5.95405), (6, 5.77058), (7, 5.67647), (8, 5.63198), (9, 5.62080)];

/// Published lower bounds `C^lower_{0,d}`, `d = 3..=9`.
pub const PUBLISHED_C_LOWER: [(u32, f64); 7] =
    [(3, 6.75), (4, 5.33333), (5, 4.82253), (6, 4.55625), (7, 4.39229), (8, 4.28088), (9, 4.20028)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    pub d: u32,
    pub alpha_order: f64,
    pub gamma: f64,
    pub m_upper: f64,
    pub c_gamma: f64,
    pub c_lower: f64,
    pub c_simple: f64,
    pub c_op: f64,
    pub semiclassical_factor: f64,
    pub coefficient: f64,
    pub reference_lieb: Option<f64>,
    pub reference_flseiringer: Option<f64>,
    pub reference_daubechies: Option<f64>,
}

/// Options for [`build_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    pub search: SearchSpec,
    pub quadrature: QuadratureSpec,
    pub n_cap: u32,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { search: SearchSpec::default(), quadrature: QuadratureSpec::default(), n_cap: N_CAP }
    }
}

/// One report row per dimension. `M_γ` comes from the optimizer on the
/// trial cell that is best for that range of `γ`, capped by the simple
/// choice. For `α = 1` the operator-valued constant is the minimum of `C_n`
/// over `3 ≤ n ≤ min(d, n_cap)` and `n = d`.
pub fn build_report(dims: &[u32], alpha_order: f64, search: &SearchSpec) -> Result<Vec<ConstantReport>> {
    build_report_with(dims, alpha_order, &ReportOptions { search: search.clone(), ..ReportOptions::default() })
}

pub fn build_report_with(dims: &[u32], alpha_order: f64, opts: &ReportOptions) -> Result<Vec<ConstantReport>> {
    if !(alpha_order > 0.0) || !alpha_order.is_finite() {
        return Err(invalid(format!("kinetic order must be positive, got {alpha_order}")));
    }
    if dims.is_empty() {
        return Err(invalid("no dimensions requested"));
    }
    for &d in dims {
        let gamma = d as f64 / alpha_order;
        if !(gamma > 2.0) {
            return Err(invalid(format!("d = {d}, α = {alpha_order} gives γ = {gamma}, need γ > 2")));
        }
    }
    let integer_laplacian = alpha_order == 1.0;

    // every γ whose C_γ is needed: the requested ones, plus 3..=n_cap for the
    // operator-valued minimum
    let mut gammas: BTreeMap<u64, f64> = BTreeMap::new();
    for &d in dims {
        let g = d as f64 / alpha_order;
        gammas.insert(g.to_bits(), g);
        if integer_laplacian {
            for n in 3..=d.min(opts.n_cap) {
                gammas.insert((n as f64).to_bits(), n as f64);
            }
        }
    }
    let list: Vec<f64> = gammas.values().copied().collect();
    use rayon::prelude::*;
    let solved: Vec<Result<(f64, f64)>> = list
        .par_iter()
        .map(|&g| {
            let m = optimize::mgamma_upper_with(g, &optimize::preferred_cells(g), &opts.search, &opts.quadrature)?;
            Ok((m, c_gamma(g, m)?))
        })
        .collect();
    let mut table: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
    for (g, r) in list.iter().zip(solved) {
        table.insert(g.to_bits(), r?);
    }

    let refs = ReferenceData::default();
    let mut out = Vec::with_capacity(dims.len());
    for &d in dims {
        let gamma = d as f64 / alpha_order;
        let (m_upper, cg) = table[&gamma.to_bits()];
        let c_op = if integer_laplacian {
            (3..=d.min(opts.n_cap)).map(|n| table[&(n as f64).to_bits()].1).fold(cg, f64::min)
        } else {
            cg
        };
        let sf = semiclassical_factor(d)?;
        out.push(ConstantReport {
            d,
            alpha_order,
            gamma,
            m_upper,
            c_gamma: cg,
            c_lower: c_lower(gamma)?,
            c_simple: c_simple(gamma)?,
            c_op,
            semiclassical_factor: sf,
            coefficient: c_op * sf,
            reference_lieb: if integer_laplacian { refs.lieb_scalar.get(&d).copied() } else { None },
            reference_flseiringer: if integer_laplacian { Some(refs.fls_opvalued) } else { None },
            reference_daubechies: if d == 3 && alpha_order == 0.5 { Some(refs.daubechies_relativistic) } else { None },
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balls() {
        assert!((ball_volume(1).unwrap() - 2.0).abs() < 1e-15);
        assert!((ball_volume(2).unwrap() - PI).abs() < 1e-14);
        assert!((ball_volume(3).unwrap() - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!(ball_volume(0).is_err());
    }

    #[test]
    fn classical_lt() {
        let l = lt_classical(0.0, 3).unwrap();
        assert!((l - 1.0 / (6.0 * PI * PI)).abs() < 1e-15);
        assert!((l - semiclassical_factor(3).unwrap()).abs() < 1e-15);
        let lhs = lt_classical(0.0, 5).unwrap();
        let rhs = lt_classical(0.0, 2).unwrap() * lt_classical(1.0, 3).unwrap();
        assert!((lhs / rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_constants() {
        assert!((c_gamma(3.0, 8.0 / 15.0).unwrap() - 10.8).abs() < 1e-12);
        assert!((c_gamma(4.0, 1.0 / 6.0).unwrap() - 32.0 / 3.0).abs() < 1e-12);
        assert!((c_simple(3.0).unwrap() - 10.8).abs() < 1e-12);
        assert!((c_simple(4.0).unwrap() - 32.0 / 3.0).abs() < 1e-12);
        assert!((c_lower(3.0).unwrap() - 6.75).abs() < 1e-12);
        assert!((c_lower(5.0).unwrap() - 4.82253).abs() < 1e-5);
        let limit = std::f64::consts::E.powi(2) / 2.0;
        assert!((c_lower(1000.0).unwrap() / limit - 1.0).abs() < 0.01);
        assert!(c_gamma(2.0, 1.0).is_err());
        assert!(c_lower(1.5).is_err());
    }

    #[test]
    fn op_table_picks_smallest_n_on_ties() {
        let per: BTreeMap<u32, f64> = [(3, 7.0), (4, 6.0), (5, 6.0)].into_iter().collect();
        let t = c_op_table_capped(6, &per, 5).unwrap();
        assert_eq!(t[&3], 7.0);
        assert_eq!(t[&6], 6.0);
        assert!(c_op_table(2, &per).is_err());
    }

    #[test]
    fn cwikel_values() {
        assert!((cwikel_simple(4.0).unwrap() - 32.0 / 3.0).abs() < 1e-12);
        assert!((cwikel_simple(3.0).unwrap() - 10.8).abs() < 1e-12);
        assert!((cwikel_general(4.0, 1.0, 1.0 / 6.0).unwrap() - 32.0 / 3.0).abs() < 1e-12);
        assert!((cwikel_general(3.0, 1.0, 8.0 / 15.0).unwrap() - 10.8).abs() < 1e-12);
        let a = cwikel_general(5.0, 1.0, 0.1).unwrap();
        let b = cwikel_general(5.0, 2.0, 0.1).unwrap();
        assert!((b / a - 8.0).abs() < 1e-12);
        assert!((frank_cwikel(4.0).unwrap() - 16.0).abs() < 1e-12);
        assert!((frank_cwikel(3.0).unwrap() - 13.5).abs() < 1e-12);
        assert!((frank_ratio(4.0).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn rumin_values() {
        assert!((frank_rumin(3, 1.0).unwrap() - 3.0 * 15f64.sqrt()).abs() < 1e-12);
        assert!((frank_rumin(4, 1.0).unwrap() - 12.0).abs() < 1e-12);
        assert!(frank_rumin(4, 2.0).is_err());
    }
}
