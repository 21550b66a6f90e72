//! Quadrature, minimization and special-function primitives. Nothing in
//! here knows about the spectral problem.

mod minimize;
mod quadrature;
pub mod special;

pub use minimize::{minimize_scalar, minimize_simplex, start_points, ScalarMin, SearchSpec, SimplexMin, TraceEntry};
pub use quadrature::{
    gauss_legendre, integrate_1d, integrate_scale, integrate_scale_with_breaks, integrate_with_breaks, QuadMethod,
    Quadrature, QuadratureSpec,
};

/// Pairwise (cascade) summation; the result does not depend on how the
/// terms were produced, only on their order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (l, r) = xs.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}
