//! Toeplitz operators with analytic and co-analytic symbols, in coefficient
//! space.
//!
//! For `h ∈ H^∞`, `T_h` is multiplication by `h` and `T_h̄` is its adjoint,
//! whose coefficient rule is `(T_h̄ f)^(k) = Σ_{j≥0} conj(ĥ(j)) f̂(k + j)`.
//! `T_h̄` never raises the degree of a polynomial, so the co-analytic
//! routines return a series of the same degree as their input; indices past
//! the input degree are treated as zero.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::{cauchy_product, TruncatedSeries, DIVISION_TOLERANCE};

/// `T_h f = h·f`, truncated to degree `n`.
pub fn apply_analytic(h: &TruncatedSeries, f: &TruncatedSeries, n: usize) -> TruncatedSeries {
    cauchy_product(h, f, n)
}

/// `T_h̄ f`; the result has the degree of `f`.
pub fn apply_coanalytic(h: &TruncatedSeries, f: &TruncatedSeries) -> TruncatedSeries {
    let fc = f.coeffs();
    let hc = h.coeffs();
    let d = f.degree();
    let out = (0..=d)
        .map(|k| {
            let span = (d - k).min(h.degree());
            hc[..=span]
                .iter()
                .zip(&fc[k..=k + span])
                .map(|(hj, fj)| hj.conj() * fj)
                .sum()
        })
        .collect();
    TruncatedSeries::from_vec(out)
}

/// Solves `T_ā x = g` by back-substitution from the top index down.
///
/// The system is upper triangular with constant diagonal `conj(â(0))`, which
/// must be real and positive (the normalization `a(0) > 0` of a pair).
pub fn solve_coanalytic_triangular(
    a: &TruncatedSeries,
    g: &TruncatedSeries,
) -> Result<TruncatedSeries> {
    let a0 = a.coeff(0);
    let tolerance = DIVISION_TOLERANCE * a.max_abs_coeff();
    if a0.im.abs() > tolerance.max(DIVISION_TOLERANCE) {
        return Err(Error::NonRealLeadingCoefficient { imag: a0.im });
    }
    if a0.re <= tolerance {
        return Err(Error::SingularDiagonal {
            value: a0.re,
            tolerance,
        });
    }
    let ac: Vec<Complex64> = a.coeffs().iter().map(|c| c.conj()).collect();
    let gc = g.coeffs();
    let d = g.degree();
    let inv_diag = 1.0 / a0.re;
    let mut x = vec![Complex64::new(0.0, 0.0); d + 1];
    for k in (0..=d).rev() {
        let span = (d - k).min(a.degree());
        let s: Complex64 = ac[1..=span]
            .iter()
            .zip(&x[k + 1..=k + span])
            .map(|(aj, xj)| aj * xj)
            .sum();
        x[k] = (gc[k] - s) * inv_diag;
    }
    Ok(TruncatedSeries::from_vec(x))
}
