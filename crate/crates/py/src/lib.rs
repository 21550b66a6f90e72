//! Python module `clr_lab`.
//!
//! Structured results (optimizer outcomes, reports, check results) come back
//! as plain dicts and lists.

use clr_lab::kinetic::{bound_opt_with, g_t as core_g_t, load_profile, load_symbol, RadialSymbol};
use clr_lab::numerics::{QuadratureSpec, SearchSpec};
use clr_lab::optimize::{default_cells, mgamma_upper_with, optimize_trial_with, preferred_cells, ParamBox};
use clr_lab::report::{report_table, Format};
use clr_lab::scalefn::{tail_functional, ScaleFn};
use clr_lab::selfcheck::CheckConfig;
use clr_lab::{constants, selfcheck, trial, Error};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

fn err(e: Error) -> PyErr {
    match e {
        Error::InvalidInput(_) | Error::Schema { .. } | Error::UnsupportedOrder { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for x in items {
                list.append(to_py(py, x)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, x) in map {
                dict.set_item(k, to_py(py, x)?)?;
            }
            dict.into_any()
        }
    })
}

fn serialize<'py, T: Serialize>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(x).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &v)
}

fn quad(rel_tol: Option<f64>) -> QuadratureSpec {
    let q = QuadratureSpec::default();
    rel_tol.map_or(q, |t| q.with_rel_tol(t))
}

fn search(seed: u64, restarts: usize) -> SearchSpec {
    SearchSpec { seed, restarts, ..SearchSpec::default() }
}

/// Gamma trial pair with shapes `p`, `q` and rates `alpha`, `beta`.
#[pyclass(name = "TrialParams", module = "clr_lab", frozen)]
struct PyTrialParams(trial::TrialParams);

#[pymethods]
impl PyTrialParams {
    #[new]
    fn new(p: u32, q: u32, alpha: f64, beta: f64) -> PyResult<Self> {
        trial::TrialParams::new(p, q, alpha, beta).map(Self).map_err(err)
    }

    #[getter]
    fn p(&self) -> u32 {
        self.0.p
    }

    #[getter]
    fn q(&self) -> u32 {
        self.0.q
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta
    }

    fn swapped(&self) -> Self {
        Self(self.0.swapped())
    }

    /// Norms, `mu`, tail and objective at `gamma`.
    #[pyo3(signature = (gamma, rel_tol=None))]
    fn objective<'py>(&self, py: Python<'py>, gamma: f64, rel_tol: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
        let b = trial::trial_objective(&self.0, gamma, &quad(rel_tol)).map_err(err)?;
        serialize(py, &b)
    }

    fn __repr__(&self) -> String {
        format!("TrialParams(p={}, q={}, alpha={}, beta={})", self.0.p, self.0.q, self.0.alpha, self.0.beta)
    }
}

/// Published trial parameters keyed by dimension.
#[pyfunction]
fn published_params() -> Vec<(u32, PyTrialParams)> {
    trial::PUBLISHED_PARAMS.iter().map(|&(d, t)| (d, PyTrialParams(t))).collect()
}

#[pyfunction]
fn c_gamma(gamma: f64, m: f64) -> PyResult<f64> {
    constants::c_gamma(gamma, m).map_err(err)
}

#[pyfunction]
fn c_simple(gamma: f64) -> PyResult<f64> {
    constants::c_simple(gamma).map_err(err)
}

#[pyfunction]
fn c_lower(gamma: f64) -> PyResult<f64> {
    constants::c_lower(gamma).map_err(err)
}

#[pyfunction]
fn m_lower(gamma: f64) -> PyResult<f64> {
    constants::m_lower(gamma).map_err(err)
}

#[pyfunction]
fn m_simple(gamma: f64) -> PyResult<f64> {
    constants::m_simple(gamma).map_err(err)
}

#[pyfunction]
fn lt_classical(theta: f64, d: u32) -> PyResult<f64> {
    constants::lt_classical(theta, d).map_err(err)
}

#[pyfunction]
fn semiclassical_factor(d: u32) -> PyResult<f64> {
    constants::semiclassical_factor(d).map_err(err)
}

#[pyfunction]
fn cwikel_general(p: f64, mu: f64, tail: f64) -> PyResult<f64> {
    constants::cwikel_general(p, mu, tail).map_err(err)
}

#[pyfunction]
fn cwikel_simple(p: f64) -> PyResult<f64> {
    constants::cwikel_simple(p).map_err(err)
}

#[pyfunction]
fn frank_ratio(p: f64) -> PyResult<f64> {
    constants::frank_ratio(p).map_err(err)
}

/// Tail functional of `min(t, 1/t)`.
#[pyfunction]
#[pyo3(signature = (gamma, rel_tol=None))]
fn tail_min(gamma: f64, rel_tol: Option<f64>) -> PyResult<f64> {
    tail_functional(&ScaleFn::min_t_inv(), gamma, &quad(rel_tol)).map(|t| t.value).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (params, gamma, rel_tol=None))]
fn i_gamma_reduced(params: &PyTrialParams, gamma: f64, rel_tol: Option<f64>) -> PyResult<f64> {
    trial::i_gamma_reduced(&params.0, gamma, &quad(rel_tol)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (params, gamma, rel_tol=None))]
fn i_gamma_brute(py: Python<'_>, params: &PyTrialParams, gamma: f64, rel_tol: Option<f64>) -> PyResult<f64> {
    let t = params.0;
    py.detach(|| trial::i_gamma_brute(&t, gamma, &quad(rel_tol))).map_err(err)
}

/// Best trial pair over `cells` (default: all cells).
#[pyfunction]
#[pyo3(signature = (gamma, cells=None, seed=42, restarts=16))]
fn optimize_trial<'py>(
    py: Python<'py>,
    gamma: f64,
    cells: Option<Vec<(u32, u32)>>,
    seed: u64,
    restarts: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let cells = cells.unwrap_or_else(default_cells);
    let spec = search(seed, restarts);
    let o = py
        .detach(|| optimize_trial_with(gamma, &cells, &ParamBox::default(), &spec, &QuadratureSpec::default()))
        .map_err(err)?;
    serialize(py, &o)
}

#[pyfunction]
#[pyo3(signature = (gamma, seed=42, restarts=16))]
fn mgamma_upper(py: Python<'_>, gamma: f64, seed: u64, restarts: usize) -> PyResult<f64> {
    let spec = search(seed, restarts);
    py.detach(|| mgamma_upper_with(gamma, &preferred_cells(gamma), &spec, &QuadratureSpec::default())).map_err(err)
}

/// One report row per dimension, as dicts.
#[pyfunction]
#[pyo3(signature = (dims, alpha=1.0, seed=42))]
fn build_report<'py>(py: Python<'py>, dims: Vec<u32>, alpha: f64, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let spec = search(seed, SearchSpec::default().restarts);
    let rows = py.detach(|| constants::build_report(&dims, alpha, &spec)).map_err(err)?;
    serialize(py, &rows)
}

/// The report rendered as `md`, `csv` or `json`.
#[pyfunction]
#[pyo3(signature = (dims, alpha=1.0, format="md", digits=6))]
fn render_report(py: Python<'_>, dims: Vec<u32>, alpha: f64, format: &str, digits: usize) -> PyResult<String> {
    let format: Format = format.parse().map_err(err)?;
    let rows = py.detach(|| constants::build_report(&dims, alpha, &SearchSpec::default())).map_err(err)?;
    Ok(report_table(&rows, format).render(format, digits, false))
}

/// `G_T(u)` for the power symbol `r^{2 alpha}` in dimension `d`.
#[pyfunction]
fn g_t_power(alpha: f64, d: u32, u: f64) -> PyResult<f64> {
    let s = RadialSymbol::power(alpha, d).map_err(err)?;
    core_g_t(&s, u, &QuadratureSpec::default()).map_err(err)
}

/// Optimized bound from JSON documents describing the symbol and the profile.
#[pyfunction]
fn bound_opt<'py>(py: Python<'py>, symbol_json: &str, profile_json: &str) -> PyResult<Bound<'py, PyAny>> {
    let profile = load_profile(profile_json).map_err(err)?;
    let symbol = load_symbol(symbol_json, profile.d).map_err(err)?;
    let o = py
        .detach(|| bound_opt_with(&symbol, &profile, &SearchSpec::default(), &QuadratureSpec::default()))
        .map_err(err)?;
    let dict = PyDict::new(py);
    dict.set_item("lambda_star", o.lambda_star)?;
    dict.set_item("bound", o.bound)?;
    dict.set_item("closed_form", o.closed_form)?;
    dict.set_item("unbounded", o.is_unbounded())?;
    Ok(dict.into_any())
}

/// Runs the invariant suites; `only` restricts to the named ones.
#[pyfunction]
#[pyo3(signature = (only=None))]
fn run_checks<'py>(py: Python<'py>, only: Option<Vec<String>>) -> PyResult<Bound<'py, PyAny>> {
    let only = only.unwrap_or_default();
    let results = py.detach(|| selfcheck::run_checks(&only, &CheckConfig::default())).map_err(err)?;
    serialize(py, &results)
}

#[pymodule]
#[pyo3(name = "clr_lab")]
fn clr_lab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTrialParams>()?;
    m.add("SUITES", selfcheck::SUITES.to_vec())?;
    m.add_function(wrap_pyfunction!(published_params, m)?)?;
    m.add_function(wrap_pyfunction!(c_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(c_simple, m)?)?;
    m.add_function(wrap_pyfunction!(c_lower, m)?)?;
    m.add_function(wrap_pyfunction!(m_lower, m)?)?;
    m.add_function(wrap_pyfunction!(m_simple, m)?)?;
    m.add_function(wrap_pyfunction!(lt_classical, m)?)?;
    m.add_function(wrap_pyfunction!(semiclassical_factor, m)?)?;
    m.add_function(wrap_pyfunction!(cwikel_general, m)?)?;
    m.add_function(wrap_pyfunction!(cwikel_simple, m)?)?;
    m.add_function(wrap_pyfunction!(frank_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(tail_min, m)?)?;
    m.add_function(wrap_pyfunction!(i_gamma_reduced, m)?)?;
    m.add_function(wrap_pyfunction!(i_gamma_brute, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_trial, m)?)?;
    m.add_function(wrap_pyfunction!(mgamma_upper, m)?)?;
    m.add_function(wrap_pyfunction!(build_report, m)?)?;
    m.add_function(wrap_pyfunction!(render_report, m)?)?;
    m.add_function(wrap_pyfunction!(g_t_power, m)?)?;
    m.add_function(wrap_pyfunction!(bound_opt, m)?)?;
    m.add_function(wrap_pyfunction!(run_checks, m)?)?;
    Ok(())
}
