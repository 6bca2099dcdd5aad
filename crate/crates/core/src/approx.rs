//! Certified polynomial approximants `q = T_h̄ p` of elements of `H(b)`.
//!
//! Given `f ∈ H(b)` and `ε > 0` the construction picks polynomials
//! `g₁ ≈ f`, `g₂ ≈ f⁺` in `H²`, an outer `h` with `|h| = min{1, n|a|}` and
//! `2(1 − Re h(0)) (‖g₁‖²_∞ + ‖g₂‖²_∞) ≤ ε²`, and a Taylor partial sum `p`
//! with `‖h/a‖_∞ ‖f − p‖_{H²} ≤ ε`. Then `T_h̄ p` is a polynomial and
//! `‖f − T_h̄ p‖_{H(b)} ≤ 6ε`; the bound is checked by measuring the error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{series_exp, to_grid, TruncatedSeries};
use crate::spaces::{clipped_log_series, make_hb_element, HbElement, Pair};
use crate::toeplitz::apply_coanalytic;

/// Allowed overshoot of `sup |h|` above 1.
pub const CONTRACTION_SLACK: f64 = 1e-8;
/// Multiplier applied to sup norms measured on a grid.
pub const SUP_SAFETY: f64 = 1.0 + 1e-3;
/// Default largest outer index tried by the doubling search.
pub const DEFAULT_MAX_OUTER: u64 = 1 << 26;

/// `σ_n(f)`: coefficient `k ≤ n` is `(1 − k/(n+1)) f̂(k)`.
pub fn cesaro_mean(f: &TruncatedSeries, n: usize) -> TruncatedSeries {
    let coeffs = (0..=n)
        .map(|k| f.coeff(k) * (1.0 - k as f64 / (n + 1) as f64))
        .collect();
    TruncatedSeries::from_vec(coeffs)
}

/// `V_m(f) = 2σ_{2m+1}(f) − σ_m(f)`: equal to `f̂(k)` for `k ≤ m`, with
/// linearly decaying weights up to degree `2m + 1`.
pub fn vallee_poussin_mean(f: &TruncatedSeries, m: usize) -> TruncatedSeries {
    let wide = cesaro_mean(f, 2 * m + 1);
    let narrow = cesaro_mean(f, m).resized(2 * m + 1);
    &(&wide * 2.0) - &narrow
}

/// `2(1 − Re ĥ(0)) · (sup_grid |g|)²`, the bound on `‖T_h̄ g − g‖²_{H²}` for a
/// contraction `h`.
pub fn toeplitz_tail_bound(h: &TruncatedSeries, g: &TruncatedSeries, grid_size: usize) -> Result<f64> {
    let sup_h = to_grid(h, grid_size)?.sup_abs();
    if sup_h > 1.0 + CONTRACTION_SLACK {
        return Err(Error::NotContraction { sup: sup_h });
    }
    let sup_g = to_grid(g, grid_size)?.sup_abs();
    Ok(2.0 * (1.0 - h.coeff(0).re) * sup_g * sup_g)
}

/// `log Re h(0)` for `|h| = min{1, n|a|}`.
fn log_h0(pair: &Pair, n_outer: u64) -> f64 {
    clipped_log_series(pair.outer(), (n_outer as f64).ln(), 0).coeff(0).re
}

/// The outer `h` with `h(0) > 0` and `|h| = min{1, n|a|}` on the circle, to
/// the pair degree.
///
/// A truncated Taylor series of `h` overshoots 1 near the kinks of `|h|`, so
/// boundedness is checked on the Fejér mean, which a function bounded by 1
/// cannot violate.
pub fn choose_h(pair: &Pair, n_outer: u64) -> Result<TruncatedSeries> {
    if n_outer == 0 {
        return Err(Error::InvalidArgument("outer index must be at least 1".into()));
    }
    let n = pair.degree();
    let log = clipped_log_series(pair.outer(), (n_outer as f64).ln(), n);
    let h = series_exp(&log, n);
    let sup = to_grid(&cesaro_mean(&h, n), pair.grid_size())?.sup_abs();
    if sup > 1.0 + CONTRACTION_SLACK {
        return Err(Error::NotContraction { sup });
    }
    Ok(h)
}

/// `sup |h/a| = sup min{1/|a|, n}`: exactly `n` when `a` has a boundary zero,
/// otherwise the grid maximum (without safety factor).
pub fn h_over_a_sup(pair: &Pair, n_outer: u64) -> f64 {
    let n = n_outer as f64;
    if !pair.outer().zeros().is_empty() {
        return n;
    }
    pair.outer()
        .log_modulus_grid()
        .iter()
        .map(|l| (-l).exp().min(n))
        .fold(0.0, f64::max)
}

/// The three quantities bounded in the error budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetTerms {
    /// `‖f − T_h̄ f‖_{H²}`.
    pub f_tail: f64,
    /// `‖f⁺ − T_h̄ f⁺‖_{H²}`.
    pub fplus_tail: f64,
    /// `‖h/a‖_∞ ‖f − p‖_{H²}`.
    pub polynomial: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxReport {
    pub epsilon: f64,
    pub n_outer: u64,
    pub h: TruncatedSeries,
    pub p: TruncatedSeries,
    pub q: TruncatedSeries,
    /// `‖f − q‖_{H(b)}`, measured.
    pub achieved_error: f64,
    pub budget_terms: BudgetTerms,
    pub g1_degree: usize,
    pub g2_degree: usize,
    /// Grid sup norms of `g₁`, `g₂` including the safety factor.
    pub g1_sup: f64,
    pub g2_sup: f64,
    /// `‖h/a‖_∞` including the safety factor.
    pub h_over_a: f64,
}

impl ApproxReport {
    pub fn certified_bound(&self) -> f64 {
        6.0 * self.epsilon
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproxConfig {
    /// Largest outer index tried; the search doubles from 1.
    pub max_outer: u64,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        ApproxConfig {
            max_outer: DEFAULT_MAX_OUTER,
        }
    }
}

pub fn approximate(f_elt: &HbElement, pair: &Pair, epsilon: f64) -> Result<ApproxReport> {
    approximate_with(f_elt, pair, epsilon, &ApproxConfig::default())
}

/// Lowest-degree mean `V_m(g)` within `eps` of `g` in `H²`, or `g` itself.
fn bounded_approximant(g: &TruncatedSeries, eps: f64) -> TruncatedSeries {
    let d = g.degree();
    let eps_sq = eps * eps;
    for m in 0..=d / 2 {
        let width = 2 * m + 1;
        let dist_sq: f64 = (0..=d)
            .map(|k| {
                let w = if k <= m {
                    1.0
                } else if k <= width {
                    2.0 * (1.0 - k as f64 / (width + 1) as f64)
                } else {
                    0.0
                };
                (1.0 - w).powi(2) * g.coeff(k).norm_sqr()
            })
            .sum();
        if dist_sq <= eps_sq {
            return vallee_poussin_mean(g, m);
        }
    }
    g.clone()
}

/// Shortest Taylor partial sum within `eps` of `f` in `H²`.
fn taylor_truncation(f: &TruncatedSeries, eps: f64) -> TruncatedSeries {
    let eps_sq = eps * eps;
    let mut tail = 0.0;
    let mut k = f.degree();
    while k > 0 {
        let next = tail + f.coeff(k).norm_sqr();
        if next > eps_sq {
            break;
        }
        tail = next;
        k -= 1;
    }
    f.partial_sum(k)
}

pub fn approximate_with(
    f_elt: &HbElement,
    pair: &Pair,
    epsilon: f64,
    config: &ApproxConfig,
) -> Result<ApproxReport> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} must be positive")));
    }
    let f = &f_elt.f;
    let m = pair.grid_size();

    // (1) bounded approximants of f and f⁺
    let g1 = bounded_approximant(f, epsilon);
    let g2 = bounded_approximant(&f_elt.fplus, epsilon);
    let g1_sup = to_grid(&g1, m)?.sup_abs() * SUP_SAFETY;
    let g2_sup = to_grid(&g2, m)?.sup_abs() * SUP_SAFETY;

    // (2) smallest power-of-two outer index meeting the h(0) budget
    let threshold = epsilon * epsilon / (g1_sup * g1_sup + g2_sup * g2_sup);
    let mut n_outer = 1u64;
    loop {
        let defect = 2.0 * (1.0 - log_h0(pair, n_outer).exp());
        if defect <= threshold {
            break;
        }
        if n_outer >= config.max_outer {
            return Err(Error::BudgetExceeded {
                epsilon,
                max_outer: config.max_outer,
            });
        }
        n_outer = (n_outer * 2).min(config.max_outer);
    }
    let h = choose_h(pair, n_outer)?;

    // (3) Taylor partial sum with ‖h/a‖ ‖f − p‖ ≤ ε
    let h_over_a = h_over_a_sup(pair, n_outer) * SUP_SAFETY;
    let p = taylor_truncation(f, epsilon / h_over_a);

    // (4) q = T_h̄ p and a direct measurement of the error
    let q = apply_coanalytic(&h, &p);
    let diff = f - &q.resized(f.degree());
    let achieved_error = make_hb_element(&diff, pair)?.hb_norm();
    let budget_terms = BudgetTerms {
        f_tail: (f - &apply_coanalytic(&h, f)).norm_h2(),
        fplus_tail: (&f_elt.fplus - &apply_coanalytic(&h, &f_elt.fplus)).norm_h2(),
        polynomial: h_over_a * (f - &p.resized(f.degree())).norm_h2(),
    };
    let report = ApproxReport {
        epsilon,
        n_outer,
        h,
        p,
        q,
        achieved_error,
        budget_terms,
        g1_degree: g1.degree(),
        g2_degree: g2.degree(),
        g1_sup,
        g2_sup,
        h_over_a,
    };
    if !(achieved_error <= report.certified_bound()) {
        return Err(Error::CertificateViolated {
            achieved: achieved_error,
            bound: report.certified_bound(),
        });
    }
    Ok(report)
}

/// `Re h(0)` for `|h| = min{1, n|a|}`, without forming the series.
pub fn h_at_zero(pair: &Pair, n_outer: u64) -> f64 {
    log_h0(pair, n_outer).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{cauchy_kernel, Symbol};
    use crate::TAU;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn b0_pair(n: usize) -> Pair {
        Pair::from_symbol(&Symbol::b0(), n, crate::series::min_grid_size(n)).unwrap()
    }

    #[test]
    fn cesaro_examples() {
        let f = TruncatedSeries::from_real(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(cesaro_mean(&f, 0).coeffs(), &[c(1.0)]);
        let s = cesaro_mean(&f, 2);
        for (x, e) in s.coeffs().iter().zip([1.0, 2.0 / 3.0, 1.0 / 3.0]) {
            assert!((x - c(e)).norm() < 1e-15);
        }
    }

    #[test]
    fn dilation_as_average_of_cesaro_means() {
        // f_r = Σ_n (n+1)(1−r)² rⁿ σ_n(f)
        let f = TruncatedSeries::from_real(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        let r: f64 = 0.5;
        let mut acc = TruncatedSeries::zero(3);
        for n in 0..=200 {
            let w = (n + 1) as f64 * (1.0 - r).powi(2) * r.powi(n as i32);
            acc = &acc + &(&cesaro_mean(&f, n).resized(3) * w);
        }
        assert!(acc.max_abs_diff(&crate::spaces::dilate(&f, r)) < 1e-10);
    }

    #[test]
    fn vallee_poussin_keeps_low_coefficients() {
        let f = TruncatedSeries::from_real(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let v = vallee_poussin_mean(&f, 2);
        assert_eq!(v.degree(), 5);
        for k in 0..=2 {
            assert!((v.coeff(k) - f.coeff(k)).norm() < 1e-14);
        }
        assert!((v.coeff(4) - c(5.0 * 2.0 * (1.0 - 4.0 / 6.0))).norm() < 1e-14);
    }

    #[test]
    fn tail_bound_examples() {
        let g = TruncatedSeries::from_real(&[0.3, -0.2, 0.7]).unwrap();
        assert_eq!(toeplitz_tail_bound(&TruncatedSeries::from_real(&[1.0]).unwrap(), &g, 16).unwrap(), 0.0);
        let h = TruncatedSeries::from_real(&[0.5]).unwrap();
        let one = TruncatedSeries::from_real(&[1.0]).unwrap();
        assert!((toeplitz_tail_bound(&h, &one, 16).unwrap() - 1.0).abs() < 1e-15);
        let actual = (&apply_coanalytic(&h, &one) - &one).norm_h2_sq();
        assert!((actual - 0.25).abs() < 1e-15);
        let big = TruncatedSeries::from_real(&[0.8, 0.8]).unwrap();
        assert!(matches!(toeplitz_tail_bound(&big, &g, 16), Err(Error::NotContraction { .. })));
    }

    #[test]
    fn choose_h_examples() {
        let trivial = Pair::from_series(&TruncatedSeries::zero(16), 16, 128).unwrap();
        for n in [1, 7, 1000] {
            let h = choose_h(&trivial, n).unwrap();
            assert!((h.coeff(0) - c(1.0)).norm() < 1e-14);
            assert!(h.coeffs()[1..].iter().all(|x| x.norm() < 1e-14));
        }
        let pair = b0_pair(256);
        let h = choose_h(&pair, 1).unwrap();
        assert!(h.max_abs_diff(pair.a()) < 1e-8);
        assert!((h.coeff(0).re - TAU).abs() < 1e-8);

        let mut prev = 0.0;
        for j in 0..=8 {
            let h0 = choose_h(&pair, 1 << j).unwrap().coeff(0).re;
            assert!(h0 >= prev);
            prev = h0;
        }
        // 1 − h(0) ≈ 1/(πn) first drops below 1e-3 past n = 318
        assert!(prev < 1.0 - 1e-3);
        assert!(choose_h(&pair, 1 << 9).unwrap().coeff(0).re > 1.0 - 1e-3);
    }

    #[test]
    fn h0_defect_scales_like_inverse_n() {
        // |a₀(e^{iθ})| ≈ |θ| near 0 gives 1 − h(0) ≈ 1/(πn)
        let pair = b0_pair(128);
        for n in [1u64 << 12, 1 << 16, 1 << 20] {
            let d = 1.0 - h_at_zero(&pair, n);
            let expected = 1.0 / (std::f64::consts::PI * n as f64);
            assert!((d / expected - 1.0).abs() < 1e-2, "n = {n}");
        }
    }

    #[test]
    fn constant_with_large_epsilon() {
        let pair = b0_pair(64);
        let f = TruncatedSeries::from_real(&[0.7]).unwrap();
        let e = make_hb_element(&f, &pair).unwrap();
        let r = approximate(&e, &pair, 2.0 * e.hb_norm()).unwrap();
        assert!(r.achieved_error <= 6.0 * r.epsilon);
        assert!(r.q.degree() <= r.p.degree());
    }

    #[test]
    fn kernel_at_moderate_epsilon() {
        let pair = b0_pair(400);
        let f = cauchy_kernel(c(0.9), 400).unwrap();
        let e = make_hb_element(&f, &pair).unwrap();
        let r = approximate(&e, &pair, 0.1).unwrap();
        assert!(r.achieved_error <= 0.6, "{}", r.achieved_error);
    }

    #[test]
    fn budget_exceeded_when_cap_is_small() {
        let pair = b0_pair(64);
        let f = cauchy_kernel(c(0.5), 64).unwrap();
        let e = make_hb_element(&f, &pair).unwrap();
        let config = ApproxConfig { max_outer: 4 };
        assert!(matches!(
            approximate_with(&e, &pair, 1e-3, &config),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
