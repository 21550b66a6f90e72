use std::path::Path;

use clr_lab::constants::{
    self, c_gamma, c_lower, c_simple, cwikel_general, cwikel_simple, frank_cwikel, frank_ratio, m_lower, m_simple,
    ReportOptions, PUBLISHED_C,
};
use clr_lab::kinetic::{bound_at_lambda, bound_opt_with, load_profile, load_symbol, SymbolKind};
use clr_lab::optimize::{default_cells, mgamma_upper_with, optimize_trial_with, preferred_cells, ParamBox};
use clr_lab::report::{record, report_table, Cell, Format, Table};
use clr_lab::selfcheck::{run_checks, summary_table, CheckConfig, CheckResult};
use serde::Serialize;

use crate::config::CliConfig;
use crate::Failure;

type Output = Result<(String, u8), Failure>;

fn provenance(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
    pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

fn render(t: &Table, cfg: &CliConfig) -> String {
    t.render(cfg.format, cfg.digits, cfg.provenance)
}

/// `3..9`, `3..=9`, `5` or `3,5,7`.
pub fn parse_dims(s: &str) -> Result<Vec<u32>, Failure> {
    let bad = || Failure::input(format!("invalid dimension range {s:?}"));
    let num = |t: &str| t.trim().parse::<u32>().map_err(|_| bad());
    let dims: Vec<u32> = if let Some((a, b)) = s.split_once("..") {
        let (lo, hi) = (num(a)?, num(b.trim_start_matches('='))?);
        if lo > hi {
            return Err(bad());
        }
        (lo..=hi).collect()
    } else {
        s.split(',').map(num).collect::<Result<_, _>>()?
    };
    if dims.is_empty() || dims.contains(&0) {
        return Err(bad());
    }
    Ok(dims)
}

pub fn table(dims: &str, alpha: f64, n_cap: Option<u32>, cfg: &CliConfig) -> Output {
    let dims = parse_dims(dims)?;
    let opts = ReportOptions {
        search: cfg.search.clone(),
        quadrature: cfg.quadrature,
        n_cap: n_cap.unwrap_or(cfg.n_cap),
    };
    if opts.n_cap < 3 {
        return Err(Failure::input("--n-cap must be >= 3"));
    }
    let reports = constants::build_report_with(&dims, alpha, &opts)?;
    let mut t = report_table(&reports, cfg.format);
    for r in &reports {
        if let Some(daub) = r.reference_daubechies {
            let verdict = if r.c_gamma < daub { "below" } else { "not below" };
            t.notes.push(format!("d = {}: C_γ = {:.6} is {verdict} the relativistic reference {daub}", r.d, r.c_gamma));
        }
    }
    Ok((render(&t, cfg), 0))
}

fn published_c(gamma: f64) -> Option<f64> {
    PUBLISHED_C.iter().find(|(d, _)| *d as f64 == gamma).map(|&(_, c)| c)
}

pub fn optimize(gamma: f64, cells: &[(u32, u32)], cfg: &CliConfig) -> Output {
    let cells = if cells.is_empty() { default_cells() } else { cells.to_vec() };
    let o = optimize_trial_with(gamma, &cells, &ParamBox::default(), &cfg.search, &cfg.quadrature)?;
    let b = o.breakdown;
    let published = published_c(gamma);
    let mut t = record(vec![
        ("gamma", gamma.into()),
        ("p", o.params.p.into()),
        ("q", o.params.q.into()),
        ("alpha", o.params.alpha.into()),
        ("beta", o.params.beta.into()),
        ("norm1", b.norm1.into()),
        ("norm2", b.norm2.into()),
        ("mu", b.mu.into()),
        ("tail", b.tail.into()),
        ("objective", b.objective.into()),
        ("c_gamma", o.c_gamma.into()),
        ("published_c", published.into()),
        ("converged", o.converged.into()),
        ("evaluations", o.evaluations.into()),
    ]);
    t.provenance = provenance(&[
        ("p, q, alpha, beta", "best Gamma trial pair over the searched cells"),
        ("norm1", "closed form of ‖m₁‖ from mixed derivatives of K"),
        ("norm2", "closed form of ‖m₂‖"),
        ("mu", "norm1·norm2"),
        ("tail", "R_γ(m₁*m₂) from the law of a sum of two Gamma variables"),
        ("objective", "mu^{γ-2}·tail"),
        ("c_gamma", "γ^{γ+1}/(4(γ-2)^{γ-2})·objective"),
        ("published_c", "published constant for d = γ, when available"),
    ]);
    if !o.converged {
        t.notes.push("no restart met the convergence tolerances".into());
    }
    Ok((render(&t, cfg), if o.converged { 0 } else { 3 }))
}

pub fn mgamma(gamma: f64, cfg: &CliConfig) -> Output {
    let lower = m_lower(gamma)?;
    let simple = m_simple(gamma)?;
    let cells = preferred_cells(gamma);
    let upper = mgamma_upper_with(gamma, &cells, &cfg.search, &cfg.quadrature)?;
    let cell = format!("({},{})", cells[0].0, cells[0].1);
    let mut t = record(vec![
        ("gamma", gamma.into()),
        ("m_lower", lower.into()),
        ("m_upper", upper.into()),
        ("m_simple", simple.into()),
        ("cell", cell.into()),
    ]);
    t.provenance = provenance(&[
        ("m_lower", "2/(γ(γ-1)(γ-2))"),
        ("m_upper", "optimized Gamma trial pair on the cell, capped by m_simple"),
        ("m_simple", "8/(γ(γ-2)(γ+2)), the pair 2s·1{s≤1}, s⁻¹·1{s≥1}"),
    ]);
    Ok((render(&t, cfg), 0))
}

pub fn constant(gamma: f64, m: Option<f64>, cfg: &CliConfig) -> Output {
    let m = match m {
        Some(m) => m,
        None => mgamma_upper_with(gamma, &preferred_cells(gamma), &cfg.search, &cfg.quadrature)?,
    };
    let mut t = record(vec![
        ("gamma", gamma.into()),
        ("m", m.into()),
        ("c_gamma", c_gamma(gamma, m)?.into()),
        ("c_lower", c_lower(gamma)?.into()),
        ("c_simple", c_simple(gamma)?.into()),
    ]);
    t.provenance = provenance(&[
        ("m", "given, or the best upper bound on M_γ"),
        ("c_gamma", "γ^{γ+1}/(4(γ-2)^{γ-2})·m"),
        ("c_lower", "γ^γ/(2(γ-1)(γ-2)^{γ-1})"),
        ("c_simple", "2γ^γ/((γ-2)^{γ-1}(γ+2))"),
    ]);
    Ok((render(&t, cfg), 0))
}

pub fn cwikel(p: f64, mu: f64, tail: Option<f64>, cfg: &CliConfig) -> Output {
    let tail = match tail {
        Some(t) => t,
        None => m_simple(p)?,
    };
    let ratio = frank_ratio(p)?;
    let mut t = record(vec![
        ("p", p.into()),
        ("mu", mu.into()),
        ("tail", tail.into()),
        ("cwikel_general", cwikel_general(p, mu, tail)?.into()),
        ("cwikel_simple", cwikel_simple(p)?.into()),
        ("frank_cwikel", frank_cwikel(p)?.into()),
        ("frank_ratio", ratio.into()),
    ]);
    t.notes.push(format!(
        "frank_cwikel/cwikel_simple = (p+2)/4 = {ratio:.6} from the printed formulas; the accompanying remark claims a factor (p+2)/2 = {:.6}",
        (p + 2.0) / 2.0
    ));
    t.provenance = provenance(&[
        ("cwikel_general", "(p/(p-2))^p·((p-2)/2)²·μ^{p-2}·p·tail"),
        ("cwikel_simple", "2(p-2)/(p+2)·(p/(p-2))^p"),
        ("frank_cwikel", "(p/2)·(p/(p-2))^{p-1}"),
        ("frank_ratio", "frank_cwikel/cwikel_simple"),
    ]);
    Ok((render(&t, cfg), 0))
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

pub fn bound(symbol: &Path, profile: &Path, lambda: Option<f64>, cfg: &CliConfig) -> Output {
    let profile = load_profile(&read(profile)?)?;
    let symbol = load_symbol(&read(symbol)?, profile.d)?;
    let kind = match symbol.kind {
        SymbolKind::Power { .. } => "power",
        SymbolKind::Tabulated { .. } => "tabulated",
    };
    let (lambda_star, value, closed) = match lambda {
        Some(l) => (l, bound_at_lambda(&symbol, &profile, l, &cfg.quadrature)?, None),
        None => {
            if profile.samples.is_empty() {
                return Err(Failure::input("profile has no samples"));
            }
            let o = bound_opt_with(&symbol, &profile, &cfg.search, &cfg.quadrature)?;
            (o.lambda_star, o.bound, o.closed_form)
        }
    };
    let status = if value.is_infinite() { "unbounded (weak-coupling regime)" } else { "finite" };
    let delta = closed.map(|c| ((value - c) / c).abs());
    let mut t = record(vec![
        ("d", profile.d.into()),
        ("symbol", kind.into()),
        ("samples", profile.samples.len().into()),
        ("lambda", if lambda_star.is_nan() { Cell::Missing } else { lambda_star.into() }),
        ("bound", value.into()),
        ("closed_form", closed.into()),
        ("closed_form_rel_delta", delta.into()),
        ("status", status.into()),
    ]);
    t.provenance = provenance(&[
        ("bound", "λ⁻²·Σ wᵢ G_T((λ+1)²uᵢ), minimized over λ ∈ [1e-4, 1e4]"),
        ("closed_form", "c_simple(d/α)·|B₁^d|/(2π)^d·Σ wᵢ uᵢ^{d/(2α)} for power symbols"),
    ]);
    Ok((render(&t, cfg), 0))
}

#[derive(Serialize)]
struct CheckSummary<'a> {
    total: usize,
    failed: usize,
    results: &'a [CheckResult],
}

pub fn check(only: &[String], cfg: &CliConfig) -> Output {
    let check_cfg = CheckConfig { search: cfg.search.clone(), quadrature: cfg.quadrature };
    let results = run_checks(only, &check_cfg)?;
    let failed = results.iter().filter(|r| !r.passed).count();
    let out = match cfg.format {
        Format::Json => {
            let s = CheckSummary { total: results.len(), failed, results: &results };
            serde_json::to_string_pretty(&s).expect("summary serializes") + "\n"
        }
        _ => render(&summary_table(&results), cfg),
    };
    Ok((out, if failed == 0 { 0 } else { 1 }))
}

#[cfg(test)]
mod tests {
    use super::parse_dims;

    #[test]
    fn dims() {
        assert_eq!(parse_dims("3..9").unwrap(), (3..=9).collect::<Vec<_>>());
        assert_eq!(parse_dims("3..=4").unwrap(), vec![3, 4]);
        assert_eq!(parse_dims("3,5").unwrap(), vec![3, 5]);
        assert_eq!(parse_dims("7").unwrap(), vec![7]);
        assert!(parse_dims("9..3").is_err());
        assert!(parse_dims("x").is_err());
        assert!(parse_dims("0").is_err());
    }
}
