//! Truncated Taylor series and uniform boundary grids.
//!
//! A [`TruncatedSeries`] holds the Taylor coefficients `c_0..c_N` of an
//! analytic function on the disk; a [`BoundaryGrid`] holds its values at the
//! `M` points `e^{2πi m/M}`. The two are connected by zero-padded discrete
//! Fourier transforms ([`to_grid`], [`from_grid`]).

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;

/// Relative tolerance below which a constant term counts as zero for division.
pub const DIVISION_TOLERANCE: f64 = 1e-12;

/// Grid oversampling factor: a grid paired with a degree-`N` series needs at
/// least `OVERSAMPLING * (N + 1)` points.
pub const OVERSAMPLING: usize = 4;

/// Smallest admissible grid size for a series of the given degree.
pub fn min_grid_size(degree: usize) -> usize {
    (OVERSAMPLING * (degree + 1)).next_power_of_two()
}

/// Taylor coefficients `c_0..c_N` of an analytic function on the unit disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    coeffs: Vec<Complex64>,
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptySeries);
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("series coefficients"));
        }
        Ok(TruncatedSeries { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Internal constructor for coefficient vectors already known to be valid.
    pub(crate) fn from_vec(coeffs: Vec<Complex64>) -> Self {
        debug_assert!(!coeffs.is_empty());
        TruncatedSeries { coeffs }
    }

    pub fn zero(degree: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![Complex64::new(0.0, 0.0); degree + 1],
        }
    }

    pub fn constant(value: Complex64, degree: usize) -> Self {
        let mut s = Self::zero(degree);
        s.coeffs[0] = value;
        s
    }

    /// The monomial `z^k`.
    pub fn monomial(k: usize) -> Self {
        let mut s = Self::zero(k);
        s.coeffs[k] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient `k`, zero beyond the stored degree.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// Truncates or zero-pads to exactly `degree + 1` coefficients.
    pub fn resized(&self, degree: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(degree + 1, Complex64::new(0.0, 0.0));
        TruncatedSeries { coeffs: c }
    }

    /// Taylor partial sum `s_n`: coefficients above `n` are dropped.
    pub fn partial_sum(&self, n: usize) -> Self {
        self.resized(n.min(self.degree()))
    }

    /// Horner evaluation of `Σ c_k z^k`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative at `z`.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn norm_h2_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm_h2(&self) -> f64 {
        self.norm_h2_sq().sqrt()
    }

    /// H² inner product `⟨self, other⟩ = Σ c_k conj(d_k)`.
    pub fn inner(&self, other: &TruncatedSeries) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference, treating missing coefficients as zero.
    pub fn max_abs_diff(&self, other: &TruncatedSeries) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// `Σ c_k z^k` restricted to the highest index with a nonzero coefficient.
    pub fn effective_degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| *c != Complex64::new(0.0, 0.0))
            .unwrap_or(0)
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        TruncatedSeries {
            coeffs: (0..n).map(|k| op(self.coeff(k), other.coeff(k))).collect(),
        }
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> TruncatedSeries {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: Self) -> TruncatedSeries {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<f64> for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: f64) -> TruncatedSeries {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

/// Samples of a function at the `M` points `e^{2πi m/M}`, `M` a power of two.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryGrid {
    samples: Vec<Complex64>,
}

impl BoundaryGrid {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        let m = samples.len();
        if m == 0 || !m.is_power_of_two() {
            return Err(Error::GridNotPowerOfTwo(m));
        }
        if samples.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("grid samples"));
        }
        Ok(BoundaryGrid { samples })
    }

    pub fn from_real(samples: Vec<f64>) -> Result<Self> {
        Self::new(samples.into_iter().map(|s| Complex64::new(s, 0.0)).collect())
    }

    /// Samples `f(θ_m)` with `θ_m = 2πm/M`.
    pub fn from_fn(m: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new((0..m).map(|j| f(angle(j, m))).collect())
    }

    pub fn size(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn angle(&self, m: usize) -> f64 {
        angle(m, self.samples.len())
    }

    pub fn sup_abs(&self) -> f64 {
        self.samples.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Parseval mean `(1/M) Σ |g_m|²`.
    pub fn mean_sq(&self) -> f64 {
        self.samples.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }
}

pub(crate) fn angle(m: usize, size: usize) -> f64 {
    2.0 * std::f64::consts::PI * m as f64 / size as f64
}

fn check_grid(m: usize, degree: usize) -> Result<()> {
    if m == 0 || !m.is_power_of_two() {
        return Err(Error::GridNotPowerOfTwo(m));
    }
    let required = OVERSAMPLING * (degree + 1);
    if m < required {
        return Err(Error::GridTooSmall {
            grid: m,
            degree,
            required,
        });
    }
    Ok(())
}

/// Coefficient `k` of the product is `Σ_{j≤k} f̂(j) ĝ(k−j)`, for `k = 0..=n`.
pub fn cauchy_product(f: &TruncatedSeries, g: &TruncatedSeries, n: usize) -> TruncatedSeries {
    let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
    let fd = f.degree().min(n);
    for (i, &fi) in f.coeffs[..=fd].iter().enumerate() {
        if fi == Complex64::new(0.0, 0.0) {
            continue;
        }
        let gd = g.degree().min(n - i);
        for (o, &gj) in out[i..=i + gd].iter_mut().zip(&g.coeffs[..=gd]) {
            *o += fi * gj;
        }
    }
    TruncatedSeries::from_vec(out)
}

/// Multiplicative inverse of `f` modulo `z^{n+1}`.
pub fn series_reciprocal(f: &TruncatedSeries, n: usize) -> Result<TruncatedSeries> {
    let f0 = f.coeffs[0];
    let tolerance = DIVISION_TOLERANCE * f.max_abs_coeff();
    if f0.norm() <= tolerance {
        return Err(Error::ZeroConstantTerm {
            value: f0.norm(),
            tolerance,
        });
    }
    let inv0 = f0.inv();
    let mut g = vec![Complex64::new(0.0, 0.0); n + 1];
    g[0] = inv0;
    for k in 1..=n {
        let upper = k.min(f.degree());
        let s: Complex64 = (1..=upper).map(|j| f.coeffs[j] * g[k - j]).sum();
        g[k] = -s * inv0;
    }
    Ok(TruncatedSeries::from_vec(g))
}

/// `exp(f)` modulo `z^{n+1}` by the recurrence `k ĝ(k) = Σ_{j=1}^{k} j f̂(j) ĝ(k−j)`.
pub fn series_exp(f: &TruncatedSeries, n: usize) -> TruncatedSeries {
    let mut g = vec![Complex64::new(0.0, 0.0); n + 1];
    g[0] = f.coeffs[0].exp();
    let weighted: Vec<Complex64> = (0..=n.min(f.degree()))
        .map(|j| f.coeffs[j] * j as f64)
        .collect();
    for k in 1..=n {
        let upper = k.min(weighted.len() - 1);
        let s: Complex64 = (1..=upper).map(|j| weighted[j] * g[k - j]).sum();
        g[k] = s / k as f64;
    }
    TruncatedSeries::from_vec(g)
}

/// Boundary values `f(e^{2πi m/M})` by a zero-padded inverse transform.
pub fn to_grid(f: &TruncatedSeries, m: usize) -> Result<BoundaryGrid> {
    check_grid(m, f.degree())?;
    let mut data = f.coeffs.clone();
    data.resize(m, Complex64::new(0.0, 0.0));
    fft::inverse(&mut data);
    Ok(BoundaryGrid { samples: data })
}

/// Nonnegative-frequency Fourier coefficients `0..=n` of the grid samples.
pub fn from_grid(g: &BoundaryGrid, n: usize) -> Result<TruncatedSeries> {
    check_grid(g.size(), n)?;
    let spectrum = grid_spectrum(g);
    Ok(TruncatedSeries::from_vec(spectrum[..=n].to_vec()))
}

/// Full discrete spectrum `(1/M) Σ_m g_m e^{-2πi mk/M}`, `k = 0..M`.
pub(crate) fn grid_spectrum(g: &BoundaryGrid) -> Vec<Complex64> {
    let mut data = g.samples.clone();
    fft::forward(&mut data);
    let scale = 1.0 / g.size() as f64;
    data.iter_mut().for_each(|c| *c *= scale);
    data
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TAU;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    // b₀(z) = τz/(1−τ²z) = Σ_{k≥1} τ^{2k−1} z^k
    fn b0_coeffs(n: usize) -> TruncatedSeries {
        let v: Vec<f64> = (0..=n)
            .map(|k| if k == 0 { 0.0 } else { TAU.powi(2 * k as i32 - 1) })
            .collect();
        TruncatedSeries::from_real(&v).unwrap()
    }

    // a₀(z) = τ(1−z)/(1−τ²z): â(0) = τ, â(k) = −τ^{2k}
    fn a0_coeffs(n: usize) -> TruncatedSeries {
        let v: Vec<f64> = (0..=n)
            .map(|k| if k == 0 { TAU } else { -TAU.powi(2 * k as i32) })
            .collect();
        TruncatedSeries::from_real(&v).unwrap()
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert_eq!(TruncatedSeries::new(vec![]), Err(Error::EmptySeries));
        assert!(TruncatedSeries::from_real(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn eval_examples() {
        let f = TruncatedSeries::from_real(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(f.eval(c(0.0)), c(1.0));
        let id = TruncatedSeries::from_real(&[0.0, 1.0]).unwrap();
        assert_eq!(id.eval(c(0.5)), c(0.5));
        let b0 = b0_coeffs(40);
        let exact = TAU * 0.5 / (1.0 - TAU * TAU * 0.5);
        assert!((b0.eval(c(0.5)) - c(exact)).norm() < 1e-10);
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let f = TruncatedSeries::from_real(&[1.0, -2.0, 0.5, 3.0]).unwrap();
        let z = Complex64::new(0.3, -0.4);
        let (_, d) = f.eval_with_derivative(z);
        let exact = c(-2.0) + z * 1.0 + z * z * 9.0;
        assert!((d - exact).norm() < 1e-14);
    }

    #[test]
    fn cauchy_product_examples() {
        let one_plus_z = TruncatedSeries::from_real(&[1.0, 1.0]).unwrap();
        let sq = cauchy_product(&one_plus_z, &one_plus_z, 2);
        assert_eq!(sq, TruncatedSeries::from_real(&[1.0, 2.0, 1.0]).unwrap());

        let g = TruncatedSeries::from_real(&[0.3, -1.0, 2.5]).unwrap();
        let one = TruncatedSeries::from_real(&[1.0]).unwrap();
        assert_eq!(cauchy_product(&one, &g, 2), g);

        // b₀/a₀ = z/(1−z); 1/a₀ comes from an independent geometric expansion:
        // 1/a₀ = (1−τ²z)/(τ(1−z)) = (1/τ)(1 + (1−τ²)(z + z² + …)).
        let inv_a0: Vec<f64> = (0..=40)
            .map(|k| if k == 0 { 1.0 / TAU } else { (1.0 - TAU * TAU) / TAU })
            .collect();
        let inv_a0 = TruncatedSeries::from_real(&inv_a0).unwrap();
        let phi0 = cauchy_product(&b0_coeffs(40), &inv_a0, 40);
        for k in 0..=40 {
            let expected = if k == 0 { 0.0 } else { 1.0 };
            assert!((phi0.coeff(k) - c(expected)).norm() < 1e-10, "k = {k}");
        }
    }

    #[test]
    fn reciprocal_examples() {
        let two = TruncatedSeries::from_real(&[2.0]).unwrap();
        assert_eq!(series_reciprocal(&two, 0).unwrap(), TruncatedSeries::from_real(&[0.5]).unwrap());
        let one_minus_z = TruncatedSeries::from_real(&[1.0, -1.0]).unwrap();
        assert_eq!(
            series_reciprocal(&one_minus_z, 3).unwrap(),
            TruncatedSeries::from_real(&[1.0, 1.0, 1.0, 1.0]).unwrap()
        );
        let a0 = a0_coeffs(20);
        let inv = series_reciprocal(&a0, 20).unwrap();
        assert!((inv.coeff(0) - c(1.0 / TAU)).norm() < 1e-14);
        let prod = cauchy_product(&a0, &inv, 20);
        for k in 0..=20 {
            let expected = if k == 0 { 1.0 } else { 0.0 };
            assert!((prod.coeff(k) - c(expected)).norm() < 1e-13);
        }
    }

    #[test]
    fn reciprocal_rejects_vanishing_constant_term() {
        let f = TruncatedSeries::from_real(&[1e-14, 1.0]).unwrap();
        assert!(matches!(series_reciprocal(&f, 4), Err(Error::ZeroConstantTerm { .. })));
    }

    #[test]
    fn exp_examples() {
        let zero = TruncatedSeries::from_real(&[0.0]).unwrap();
        assert_eq!(series_exp(&zero, 2), TruncatedSeries::from_real(&[1.0, 0.0, 0.0]).unwrap());
        let z = TruncatedSeries::from_real(&[0.0, 1.0]).unwrap();
        let e = series_exp(&z, 3);
        let expected = [1.0, 1.0, 0.5, 1.0 / 6.0];
        for (k, v) in expected.iter().enumerate() {
            assert!((e.coeff(k) - c(*v)).norm() < 1e-15);
        }
        // log a₀ = ln τ + ln(1−z) − ln(1−τ²z) = ln τ + Σ_k (τ^{2k} − 1)/k z^k
        let log_a0: Vec<f64> = (0..=20)
            .map(|k| {
                if k == 0 {
                    TAU.ln()
                } else {
                    (TAU.powi(2 * k) - 1.0) / k as f64
                }
            })
            .collect();
        let a0 = series_exp(&TruncatedSeries::from_real(&log_a0).unwrap(), 20);
        assert!(a0.max_abs_diff(&a0_coeffs(20)) < 1e-9);
    }

    #[test]
    fn to_grid_examples() {
        let one = TruncatedSeries::from_real(&[1.0]).unwrap();
        let g = to_grid(&one, 8).unwrap();
        assert!(g.samples().iter().all(|s| (s - c(1.0)).norm() < 1e-15));

        let z = TruncatedSeries::from_real(&[0.0, 1.0]).unwrap();
        let g = to_grid(&z, 8).unwrap();
        for (m, s) in g.samples().iter().enumerate() {
            let expected = Complex64::from_polar(1.0, 2.0 * PI * m as f64 / 8.0);
            assert!((s - expected).norm() < 1e-15);
        }

        let g = to_grid(&b0_coeffs(64), 512).unwrap();
        assert!((g.samples()[0] - c(1.0)).norm() < 1e-6);
    }

    #[test]
    fn grid_size_is_checked() {
        let f = TruncatedSeries::from_real(&[1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(to_grid(&f, 8), Err(Error::GridTooSmall { .. })));
        assert!(matches!(to_grid(&f, 24), Err(Error::GridNotPowerOfTwo(24))));
        let g = BoundaryGrid::from_real(vec![0.0; 8]).unwrap();
        assert!(matches!(from_grid(&g, 2), Err(Error::GridTooSmall { .. })));
    }

    #[test]
    fn from_grid_examples() {
        let f = TruncatedSeries::from_real(&[1.0, 2.0, 3.0]).unwrap();
        let back = from_grid(&to_grid(&f, 16).unwrap(), 2).unwrap();
        assert!(back.max_abs_diff(&f) < 1e-12);

        let zeros = BoundaryGrid::from_real(vec![0.0; 64]).unwrap();
        assert_eq!(from_grid(&zeros, 7).unwrap(), TruncatedSeries::zero(7));

        // Samples of 1/(1−0.5z); the aliasing error is Σ_{k>M−N} 0.5^k.
        let g = BoundaryGrid::from_fn(64, |t| {
            (c(1.0) - Complex64::from_polar(0.5, t)).inv()
        })
        .unwrap();
        let s = from_grid(&g, 10).unwrap();
        for k in 0..=10 {
            assert!((s.coeff(k) - c(0.5f64.powi(k as i32))).norm() < 1e-3);
        }
    }

    #[test]
    fn arithmetic_operators() {
        let f = TruncatedSeries::from_real(&[1.0, 2.0]).unwrap();
        let g = TruncatedSeries::from_real(&[0.5, 0.0, 4.0]).unwrap();
        assert_eq!(&f + &g, TruncatedSeries::from_real(&[1.5, 2.0, 4.0]).unwrap());
        assert_eq!(&f - &g, TruncatedSeries::from_real(&[0.5, 2.0, -4.0]).unwrap());
        assert_eq!(&f * 2.0, TruncatedSeries::from_real(&[2.0, 4.0]).unwrap());
        assert_eq!(f.partial_sum(0), TruncatedSeries::from_real(&[1.0]).unwrap());
        assert_eq!(g.effective_degree(), 2);
    }
}
