//! Numerical toolkit for the constants in Cwikel–Lieb–Rozenblum type
//! bounds on the number of bound states of Schrödinger-type operators.
//!
//! The central object is the variational quantity
//!
//! ```text
//! M_γ = inf (‖m₁‖ ‖m₂‖)^{γ-2} ∫₀^∞ (1 - m(t)/t)² t^{1-γ} dt,   m = m₁ * m₂,
//! ```
//!
//! where norms are taken in `L²(ℝ₊, ds/s)` and `*` is the multiplicative
//! convolution. Upper bounds on `M_γ` come from a Gamma-distribution trial
//! family ([`trial`]) searched by [`optimize`]; [`constants`] turns them into
//! bound-state constants and [`kinetic`] evaluates the phase-space bound for
//! general kinetic energies.

pub mod constants;
pub mod error;
pub mod kinetic;
pub mod numerics;
pub mod optimize;
pub mod report;
pub mod scalefn;
pub mod selfcheck;
pub mod trial;

pub use error::{Error, Result};
