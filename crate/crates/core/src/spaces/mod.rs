//! Pairs `(b, a, φ)`, Cauchy kernels, dilation, `f⁺` and the `H(b)` norm.
//!
//! For a polynomial `f` of degree `d ≤ N`, the co-analytic equations
//! `T_ā f⁺ = T_b̄ f` close on coefficients `0..=d`, so the truncated pair
//! determines `f⁺` exactly; two independent routes are computed (the
//! triangular solve and `T_φ̄ f`) and their discrepancy is recorded.

mod outer;
mod quadrature;
mod symbol;

pub use outer::{outer_from_modulus_squared, BoundaryZero, OuterFactor, FLOOR_RELATIVE, MAX_FLOOR_FRACTION};
pub use symbol::{Atom, Factor, Symbol};

pub(crate) use outer::clipped_log_series;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{cauchy_product, series_reciprocal, to_grid, BoundaryGrid, TruncatedSeries};
use crate::toeplitz::{apply_coanalytic, solve_coanalytic_triangular};

/// Tolerance on the grid identity `|a|² + |b|² = 1` and on `aφ = b`.
pub const PAIR_TOLERANCE: f64 = 1e-8;
/// Allowed overshoot of `sup |b|` above 1.
pub const UNIT_BALL_SLACK: f64 = 1e-10;
/// Default relative tolerance on the `f⁺` residual.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// `b`, its outer companion `a` (`a(0) > 0`, `|a|² + |b|² = 1` on the circle)
/// and `φ = b/a`, all truncated at degree `N`.
#[derive(Clone, Debug)]
pub struct Pair {
    b: TruncatedSeries,
    a: TruncatedSeries,
    phi: TruncatedSeries,
    grid_size: usize,
    identity_defect: f64,
    product_defect: f64,
    outer: OuterFactor,
}

impl Pair {
    /// The pair of a symbol whose truncated series represents it on the grid.
    pub fn from_series(b: &TruncatedSeries, degree: usize, grid_size: usize) -> Result<Pair> {
        let b = b.resized(degree);
        let grid = to_grid(&b, grid_size)?;
        let modulus_sq: Vec<f64> = grid.samples().iter().map(|c| c.norm_sqr()).collect();
        let series = b.clone();
        let boundary = move |theta: f64| series.eval(Complex64::from_polar(1.0, theta)).norm_sqr();
        Pair::assemble(b, &modulus_sq, &boundary, degree, grid_size)
    }

    /// The pair of a closed-form symbol: Taylor coefficients are exact to
    /// degree `N` and `|b|` on the circle comes from the closed form.
    pub fn from_symbol(symbol: &Symbol, degree: usize, grid_size: usize) -> Result<Pair> {
        let b = symbol.taylor(degree)?;
        // validates the grid size before sampling
        BoundaryGrid::new(vec![Complex64::new(0.0, 0.0); grid_size])?;
        let modulus_sq: Vec<f64> = (0..grid_size)
            .map(|m| symbol.boundary_modulus_sq(crate::series::angle(m, grid_size)))
            .collect();
        let boundary = |theta: f64| symbol.boundary_modulus_sq(theta);
        Pair::assemble(b, &modulus_sq, &boundary, degree, grid_size)
    }

    fn assemble(
        b: TruncatedSeries,
        modulus_sq: &[f64],
        boundary: &(dyn Fn(f64) -> f64 + Sync),
        degree: usize,
        grid_size: usize,
    ) -> Result<Pair> {
        let sup_sq = modulus_sq.iter().cloned().fold(0.0, f64::max);
        if sup_sq > (1.0 + UNIT_BALL_SLACK).powi(2) {
            return Err(Error::NotInUnitBall { sup: sup_sq.sqrt() });
        }
        // rounding can push 1 − |b|² slightly below zero where |b| = 1
        let w: Vec<f64> = modulus_sq.iter().map(|x| (1.0 - x).max(0.0)).collect();
        let defect_fn = |theta: f64| (1.0 - boundary(theta)).max(0.0);
        let outer = outer::outer_from_samples(&w, Some(&defect_fn), degree)?;
        Pair::finish(b, outer, modulus_sq, grid_size)
    }

    fn finish(
        b: TruncatedSeries,
        outer: OuterFactor,
        modulus_sq: &[f64],
        grid_size: usize,
    ) -> Result<Pair> {
        let degree = b.degree();
        let a = outer.series().clone();
        let phi = cauchy_product(&b, &series_reciprocal(&a, degree)?, degree);
        let a_grid = to_grid(&a, grid_size)?;
        let identity_defect = a_grid
            .samples()
            .iter()
            .zip(modulus_sq)
            .map(|(av, bm)| (av.norm_sqr() + bm - 1.0).abs())
            .fold(0.0, f64::max);
        let product_defect = cauchy_product(&a, &phi, degree).max_abs_diff(&b);
        let defect = identity_defect.max(product_defect);
        if defect > PAIR_TOLERANCE {
            return Err(Error::PairIdentity { defect });
        }
        Ok(Pair {
            b,
            a,
            phi,
            grid_size,
            identity_defect,
            product_defect,
            outer,
        })
    }

    /// Rebuilds a pair from stored series. The outer structure of `a` is
    /// recovered from `|a|` on the grid; the stored identity defect is kept
    /// because `|b|` on the circle is not recoverable from a truncation.
    pub fn from_parts(
        b: TruncatedSeries,
        a: TruncatedSeries,
        phi: TruncatedSeries,
        grid_size: usize,
        identity_defect: f64,
    ) -> Result<Pair> {
        let degree = a.degree();
        if b.degree() != degree || phi.degree() != degree {
            return Err(Error::InvalidArgument(
                "b, a and phi must have the same degree".into(),
            ));
        }
        let a_grid = to_grid(&a, grid_size)?;
        let w: Vec<f64> = a_grid.samples().iter().map(|c| c.norm_sqr()).collect();
        let series = a.clone();
        let modulus = move |theta: f64| series.eval(Complex64::from_polar(1.0, theta)).norm_sqr();
        let outer = outer::outer_from_samples(&w, Some(&modulus), degree)?;
        let mismatch = outer.series().max_abs_diff(&a);
        if mismatch > PAIR_TOLERANCE.sqrt() {
            return Err(Error::InvalidArgument(format!(
                "stored a is not outer with a(0) > 0 (mismatch {mismatch:e})"
            )));
        }
        let product_defect = cauchy_product(&a, &phi, degree).max_abs_diff(&b);
        if product_defect.max(identity_defect) > PAIR_TOLERANCE {
            return Err(Error::PairIdentity {
                defect: product_defect.max(identity_defect),
            });
        }
        Ok(Pair {
            b,
            a,
            phi,
            grid_size,
            identity_defect,
            product_defect,
            outer,
        })
    }

    pub fn b(&self) -> &TruncatedSeries {
        &self.b
    }

    pub fn a(&self) -> &TruncatedSeries {
        &self.a
    }

    pub fn phi(&self) -> &TruncatedSeries {
        &self.phi
    }

    pub fn degree(&self) -> usize {
        self.b.degree()
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    /// `max_m ||a|² + |b|² − 1|` on the grid.
    pub fn identity_defect(&self) -> f64 {
        self.identity_defect
    }

    /// `max_k |(aφ)^(k) − b̂(k)|`.
    pub fn product_defect(&self) -> f64 {
        self.product_defect
    }

    /// Boundary structure of `a`.
    pub fn outer(&self) -> &OuterFactor {
        &self.outer
    }
}

/// The pair of `b` given as a truncated series on an `M`-point grid.
pub fn pair_from_b(b: &TruncatedSeries, degree: usize, grid_size: usize) -> Result<Pair> {
    Pair::from_series(b, degree, grid_size)
}

/// `f` together with `f⁺` and `‖f‖²_{H(b)} = ‖f‖²_{H²} + ‖f⁺‖²_{H²}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HbElement {
    pub f: TruncatedSeries,
    pub fplus: TruncatedSeries,
    /// `‖T_ā f⁺ − T_b̄ f‖_{H²}`.
    pub residual: f64,
    pub hb_norm_sq: f64,
    /// `max_k |f⁺(k) − (T_φ̄ f)(k)|`.
    pub path_discrepancy: f64,
}

impl HbElement {
    pub fn hb_norm(&self) -> f64 {
        self.hb_norm_sq.sqrt()
    }
}

/// `k_w(z) = 1/(1 − w̄z)` to degree `n`.
pub fn cauchy_kernel(w: Complex64, n: usize) -> Result<TruncatedSeries> {
    if w.norm() >= 1.0 {
        return Err(Error::OutsideDisk { modulus: w.norm() });
    }
    let wc = w.conj();
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut p = Complex64::new(1.0, 0.0);
    for _ in 0..=n {
        coeffs.push(p);
        p *= wc;
    }
    Ok(TruncatedSeries::from_vec(coeffs))
}

/// `f_r(z) = f(rz)`.
pub fn dilate(f: &TruncatedSeries, r: f64) -> TruncatedSeries {
    let mut rk = 1.0;
    let coeffs = f
        .coeffs()
        .iter()
        .map(|c| {
            let v = c * rk;
            rk *= r;
            v
        })
        .collect();
    TruncatedSeries::from_vec(coeffs)
}

pub fn make_hb_element(f: &TruncatedSeries, pair: &Pair) -> Result<HbElement> {
    make_hb_element_with_tolerance(f, pair, RESIDUAL_TOLERANCE)
}

/// As [`make_hb_element`], failing with `ResidualTooLarge` when the residual
/// exceeds `tolerance · max(1, ‖T_b̄ f‖)`.
pub fn make_hb_element_with_tolerance(
    f: &TruncatedSeries,
    pair: &Pair,
    tolerance: f64,
) -> Result<HbElement> {
    if f.degree() > pair.degree() {
        return Err(Error::DegreeExceedsPair {
            degree: f.degree(),
            pair_degree: pair.degree(),
        });
    }
    let g = apply_coanalytic(&pair.b, f);
    let fplus = solve_coanalytic_triangular(&pair.a, &g)?;
    let residual = (&apply_coanalytic(&pair.a, &fplus) - &g).norm_h2();
    let bound = tolerance * g.norm_h2().max(1.0);
    if !(residual <= bound) {
        return Err(Error::ResidualTooLarge {
            residual,
            tolerance: bound,
        });
    }
    let path_discrepancy = fplus.max_abs_diff(&apply_coanalytic(&pair.phi, f));
    Ok(HbElement {
        hb_norm_sq: f.norm_h2_sq() + fplus.norm_h2_sq(),
        f: f.clone(),
        fplus,
        residual,
        path_discrepancy,
    })
}

/// `Σ_k |f̂(k)|² + Σ_k |Σ_j f̂(j+k) conj(φ̂(j))|²`, truncated at the stored degrees.
pub fn hb_norm_coefficient_formula(f: &TruncatedSeries, phi: &TruncatedSeries) -> f64 {
    f.norm_h2_sq() + apply_coanalytic(phi, f).norm_h2_sq()
}
