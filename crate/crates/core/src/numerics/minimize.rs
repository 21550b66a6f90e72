//! Derivative-free minimization: Brent's method on an interval and a
//! restarted Nelder–Mead simplex inside a box.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSpec {
    pub restarts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    pub x_tol: f64,
    pub f_tol: f64,
    /// `(lo, hi)` per coordinate.
    #[serde(rename = "box")]
    pub bounds: Vec<(f64, f64)>,
}

impl Default for SearchSpec {
    fn default() -> Self {
        Self { restarts: 16, seed: 42, max_iterations: 2000, x_tol: 1e-10, f_tol: 1e-13, bounds: Vec::new() }
    }
}

impl SearchSpec {
    pub fn with_bounds(mut self, bounds: Vec<(f64, f64)>) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(invalid("restarts must be >= 1"));
        }
        if self.max_iterations < 1 {
            return Err(invalid("max_iterations must be >= 1"));
        }
        for (i, &(lo, hi)) in self.bounds.iter().enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(invalid(format!("box coordinate {i}: need finite lo < hi, got ({lo}, {hi})")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarMin {
    pub argmin: f64,
    pub min: f64,
    pub evaluations: usize,
}

/// Brent's parabolic/golden-section search on `(lo, hi)`.
///
/// Fails with a bracket error when the minimizer sits on an endpoint, i.e.
/// the interval does not contain an interior minimum.
pub fn minimize_scalar<F>(f: F, bracket: (f64, f64), spec: &SearchSpec) -> Result<ScalarMin>
where
    F: Fn(f64) -> f64,
{
    let (lo, hi) = bracket;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(invalid(format!("bracket must satisfy lo < hi, got ({lo}, {hi})")));
    }
    const GOLDEN: f64 = 0.381_966_011_250_105_1;
    let sqrt_eps = f64::EPSILON.sqrt();
    let rel = spec.x_tol.max(sqrt_eps);

    let (mut a, mut b) = (lo, hi);
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    let mut evaluations = 1;
    let mut converged = false;

    for _ in 0..spec.max_iterations {
        let m = 0.5 * (a + b);
        let tol1 = rel * x.abs() + 1e-300_f64.max(spec.x_tol * 1e-3);
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            converged = true;
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(m - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= m { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        evaluations += 1;
        if fu.is_nan() {
            return Err(invalid(format!("objective is NaN at {u:e}")));
        }
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    if !converged {
        return Err(Error::Convergence { what: "Brent minimization".into(), partial: fx, err_estimate: b - a });
    }
    let edge = 4.0 * (rel * x.abs() + spec.x_tol * 1e-3) + 1e-12 * (hi - lo);
    if x - lo <= edge || hi - x <= edge {
        return Err(Error::Bracket(format!("minimum of ({lo}, {hi}) lies at the boundary point {x:e}")));
    }
    Ok(ScalarMin { argmin: x, min: fx, evaluations })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub restart: usize,
    pub iteration: usize,
    pub best: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexMin {
    pub argmin: Vec<f64>,
    pub min: f64,
    /// Best value after each simplex iteration, per restart.
    pub trace: Vec<TraceEntry>,
    /// Whether the restart that produced `argmin` met the stopping criteria.
    pub converged: bool,
    pub evaluations: usize,
}

const PENALTY: f64 = 1e6;

/// Objective with the box constraint: points outside are projected and
/// charged `PENALTY · distance²`.
fn penalized<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], bounds: &[(f64, f64)], scratch: &mut Vec<f64>) -> f64 {
    scratch.clear();
    let mut dist2 = 0.0;
    for (&xi, &(lo, hi)) in x.iter().zip(bounds) {
        let c = xi.clamp(lo, hi);
        dist2 += (xi - c) * (xi - c);
        scratch.push(c);
    }
    let v = f(scratch);
    let v = if v.is_nan() { f64::INFINITY } else { v };
    v + PENALTY * dist2
}

/// Start points: a Halton sequence with a seeded Cranley–Patterson shift.
pub fn start_points(bounds: &[(f64, f64)], count: usize, seed: u64) -> Vec<Vec<f64>> {
    const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = bounds.iter().map(|_| rng.gen::<f64>()).collect();
    (1..=count)
        .map(|k| {
            bounds
                .iter()
                .enumerate()
                .map(|(j, &(lo, hi))| {
                    let u = (radical_inverse(k as u64, PRIMES[j % PRIMES.len()]) + shift[j]).fract();
                    lo + u * (hi - lo)
                })
                .collect()
        })
        .collect()
}

fn radical_inverse(mut k: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while k > 0 {
        r += (k % b) as f64 * f;
        k /= b;
        f *= inv;
    }
    r
}

struct Run {
    best_x: Vec<f64>,
    best_f: f64,
    converged: bool,
    evaluations: usize,
}

fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &F,
    start: &[f64],
    spec: &SearchSpec,
    restart: usize,
    trace: &mut Vec<TraceEntry>,
) -> Run {
    let n = start.len();
    let bounds = &spec.bounds;
    let mut scratch = Vec::with_capacity(n);
    let mut eval = |x: &[f64]| penalized(f, x, bounds, &mut scratch);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for j in 0..n {
        let (lo, hi) = bounds[j];
        let step = 0.05 * (hi - lo);
        let mut p = start.to_vec();
        // step inward so the initial simplex stays inside the box
        p[j] = if p[j] + step <= hi { p[j] + step } else { p[j] - step };
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| eval(p)).collect();
    let mut evaluations = n + 1;
    let mut converged = false;

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    for iteration in 0..spec.max_iterations {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        trace.push(TraceEntry { restart, iteration, best: values[0] });

        let f_spread = values[n] - values[0];
        let x_spread = simplex[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if (f_spread.is_finite() && f_spread <= spec.f_tol) || x_spread <= spec.x_tol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> =
            (0..n).map(|j| simplex[..n].iter().map(|p| p[j]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|j| centroid[j] + t * (simplex[n][j] - centroid[j])).collect() };

        let xr = along(-alpha);
        let fr = eval(&xr);
        evaluations += 1;
        if fr < values[0] {
            let xe = along(-gamma);
            let fe = eval(&xe);
            evaluations += 1;
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let xc = along(-rho);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(rho);
            let fc = eval(&xc);
            (xc, fc)
        };
        evaluations += 1;
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        for i in 1..=n {
            let p: Vec<f64> = (0..n).map(|j| simplex[0][j] + sigma * (simplex[i][j] - simplex[0][j])).collect();
            values[i] = eval(&p);
            simplex[i] = p;
        }
        evaluations += n;
    }
    let best = (0..=n).min_by(|&i, &j| values[i].total_cmp(&values[j])).unwrap_or(0);
    let best_x: Vec<f64> = simplex[best].iter().zip(bounds).map(|(x, &(lo, hi))| x.clamp(lo, hi)).collect();
    Run { best_f: values[best], best_x, converged, evaluations }
}

/// Restarted Nelder–Mead over the box in `spec.bounds`. Each restart runs
/// twice: from its start point, then again from the point it reached.
/// Deterministic for a fixed spec.
pub fn minimize_simplex<F>(f: F, spec: &SearchSpec) -> Result<SimplexMin>
where
    F: Fn(&[f64]) -> f64,
{
    spec.validate()?;
    if spec.bounds.is_empty() {
        return Err(invalid("minimize_simplex needs a non-empty box"));
    }
    let mut trace = Vec::new();
    let mut best: Option<Run> = None;
    let mut evaluations = 0;
    for (restart, start) in start_points(&spec.bounds, spec.restarts, spec.seed).into_iter().enumerate() {
        let first = nelder_mead(&f, &start, spec, restart, &mut trace);
        let second = nelder_mead(&f, &first.best_x, spec, restart, &mut trace);
        evaluations += first.evaluations + second.evaluations;
        let run = if second.best_f <= first.best_f { second } else { first };
        if !run.best_f.is_finite() {
            continue;
        }
        if best.as_ref().map_or(true, |b| run.best_f < b.best_f) {
            best = Some(run);
        }
    }
    match best {
        Some(run) => {
            // Report the objective itself, without the box penalty.
            let min = f(&run.best_x);
            Ok(SimplexMin { argmin: run.best_x, min, trace, converged: run.converged, evaluations })
        }
        None => Err(Error::Convergence {
            what: "Nelder-Mead (all restarts diverged)".into(),
            partial: f64::INFINITY,
            err_estimate: f64::INFINITY,
        }),
    }
}
