//! # hbspace
//!
//! Numerics for de Branges-Rovnyak spaces `H(b)` when `b` is a non-extreme
//! point of the unit ball of `H^∞`.
//!
//! Functions are represented by truncated Taylor series. For a non-extreme
//! `b` the companion outer function `a` (with `a(0) > 0` and
//! `|a|² + |b|² = 1` on the circle) exists, and every `f ∈ H(b)` has a
//! unique `f⁺ ∈ H²` with `T_b̄ f = T_ā f⁺`; the space norm is then
//! `‖f‖²_{H(b)} = ‖f‖²_{H²} + ‖f⁺‖²_{H²}`.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`series`] | truncated series arithmetic, boundary grids, transforms |
//! | [`toeplitz`] | `T_h`, `T_h̄` and the triangular solve for `f⁺` |
//! | [`spaces`] | outer functions, pairs `(b, a, φ)`, kernels, `H(b)` norms |
//! | [`blaschke`] | finite Blaschke products with real zeros |
//! | [`approx`] | certified polynomial approximants `T_h̄ p` |
//! | [`experiments`] | dilation blow-up, divergence and Toeplitz-approximation runs |
//! | [`io`] | coefficient, pair, report and CSV file formats |

pub mod approx;
pub mod blaschke;
pub mod error;
pub mod experiments;
mod fft;
pub mod io;
pub mod series;
pub mod spaces;
pub mod toeplitz;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use series::{BoundaryGrid, TruncatedSeries};

/// `τ = (√5 − 1)/2`, the parameter of the example symbol `b₀(z) = τz/(1 − τ²z)`.
pub const TAU: f64 = 0.618_033_988_749_894_9;
