//! Search over the Gamma trial family for the smallest objective, giving
//! upper bounds on `M_γ`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants;
use crate::error::{invalid, Error, Result};
use crate::numerics::{minimize_simplex, QuadratureSpec, SearchSpec};
use crate::trial::{trial_objective, ObjectiveBreakdown, TrialParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub gamma: f64,
    pub params: TrialParams,
    pub breakdown: ObjectiveBreakdown,
    pub c_gamma: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// Ranges for `α` and `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamBox {
    pub alpha: (f64, f64),
    pub beta: (f64, f64),
}

impl Default for ParamBox {
    fn default() -> Self {
        Self { alpha: (1.0 + 1e-6, 60.0), beta: (1.0 + 1e-6, 60.0) }
    }
}

impl ParamBox {
    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(lo > 1.0 && hi > lo && hi.is_finite()) {
                return Err(invalid(format!("{name} range must satisfy 1 < lo < hi < inf, got ({lo}, {hi})")));
            }
        }
        Ok(())
    }

    /// The box in the search coordinates `(ln(α-1), ln(β-1))`.
    fn log_bounds(&self) -> Vec<(f64, f64)> {
        vec![((self.alpha.0 - 1.0).ln(), (self.alpha.1 - 1.0).ln()), ((self.beta.0 - 1.0).ln(), (self.beta.1 - 1.0).ln())]
    }
}

/// All `(p, q)` with `1 <= p, q <= 4`.
pub fn default_cells() -> Vec<(u32, u32)> {
    (1..=4).flat_map(|p| (1..=4).map(move |q| (p, q))).collect()
}

/// The cell that carries the published optimum: `(2, 3)` below `γ = 5`,
/// `(3, 2)` from there on.
pub fn preferred_cells(gamma: f64) -> Vec<(u32, u32)> {
    if gamma < 5.0 {
        vec![(2, 3)]
    } else {
        vec![(3, 2)]
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 2.0) || !gamma.is_finite() {
        return Err(invalid(format!("γ must be > 2, got {gamma}")));
    }
    Ok(())
}

pub fn optimize_trial(gamma: f64, cells: &[(u32, u32)], bounds: &ParamBox, spec: &SearchSpec) -> Result<Optimum> {
    optimize_trial_with(gamma, cells, bounds, spec, &QuadratureSpec::default())
}

/// Minimizes the trial objective over `(α, β)` in every cell and returns the
/// best cell. Equal objectives (within `f_tol`) go to the smallest `p`, then
/// the smallest `q`.
pub fn optimize_trial_with(
    gamma: f64,
    cells: &[(u32, u32)],
    bounds: &ParamBox,
    spec: &SearchSpec,
    quad: &QuadratureSpec,
) -> Result<Optimum> {
    check_gamma(gamma)?;
    bounds.validate()?;
    quad.validate()?;
    if cells.is_empty() {
        return Err(invalid("no (p, q) cells to search"));
    }
    let mut cells = cells.to_vec();
    cells.sort_unstable();
    cells.dedup();
    for &(p, q) in &cells {
        TrialParams::new(p, q, 2.0, 2.0)?;
    }
    let search = SearchSpec { bounds: bounds.log_bounds(), ..spec.clone() };
    search.validate()?;

    let results: Vec<Result<Optimum>> = cells.par_iter().map(|&(p, q)| optimize_cell(gamma, p, q, &search, quad)).collect();

    let mut best: Option<Optimum> = None;
    let mut evaluations = 0;
    let mut last_err = None;
    for r in results {
        match r {
            Ok(o) => {
                evaluations += o.evaluations;
                let better = match &best {
                    None => true,
                    Some(b) => o.breakdown.objective < b.breakdown.objective - spec.f_tol,
                };
                if better {
                    best = Some(o);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    match best {
        Some(mut b) => {
            b.evaluations = evaluations;
            Ok(b)
        }
        None => Err(last_err.unwrap_or_else(|| Error::Convergence {
            what: "trial optimization".into(),
            partial: f64::INFINITY,
            err_estimate: f64::INFINITY,
        })),
    }
}

fn params_at(p: u32, q: u32, z: &[f64]) -> TrialParams {
    TrialParams { p, q, alpha: 1.0 + z[0].exp(), beta: 1.0 + z[1].exp() }
}

fn optimize_cell(gamma: f64, p: u32, q: u32, search: &SearchSpec, quad: &QuadratureSpec) -> Result<Optimum> {
    let f = |z: &[f64]| match trial_objective(&params_at(p, q, z), gamma, quad) {
        Ok(b) => b.objective,
        Err(_) => f64::INFINITY,
    };
    let found = minimize_simplex(f, search)?;
    let params = params_at(p, q, &found.argmin);
    let breakdown = trial_objective(&params, gamma, quad)?;
    Ok(Optimum {
        gamma,
        params,
        breakdown,
        c_gamma: breakdown.c_gamma,
        converged: found.converged,
        evaluations: found.evaluations,
    })
}

/// Best available upper bound on `M_γ`: the optimized trial objective on the
/// cell of [`preferred_cells`], never worse than the simple choice
/// `8/(γ(γ-2)(γ+2))`.
pub fn mgamma_upper(gamma: f64, spec: &SearchSpec) -> Result<f64> {
    mgamma_upper_with(gamma, &preferred_cells(gamma), spec, &QuadratureSpec::default())
}

pub fn mgamma_upper_with(gamma: f64, cells: &[(u32, u32)], spec: &SearchSpec, quad: &QuadratureSpec) -> Result<f64> {
    let simple = constants::m_simple(gamma)?;
    let found = optimize_trial_with(gamma, cells, &ParamBox::default(), spec, quad)
        .map(|o| o.breakdown.objective)
        .unwrap_or(f64::INFINITY);
    Ok(found.min(simple))
}
