//! Numerical experiments on dilations, partial sums and Toeplitz smoothing.
//!
//! The blow-up data use `b = b₀B²`, where `B` has zeros `w_n = 1 − 4^{−n}`,
//! together with `f = Σ_n 2^{−n} k_{w_n}`. Since `φ = B²φ₀` vanishes at every
//! `w_n`, `f⁺ = 0`, while `(f_r)⁺(0) = Σ_n 2^{−n} B(rw_n)² rw_n/(1 − rw_n)`.
//! Quantities close to `r = 1` are evaluated from closed forms in the gaps
//! `1 − w_n` and `1 − r`, and the series pipeline cross-checks them where
//! truncation is harmless.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::choose_h;
use crate::blaschke::{blaschke_eval_real, BlaschkeSpec};
use crate::error::{Error, Result};
use crate::series::TruncatedSeries;
use crate::spaces::{cauchy_kernel, dilate, make_hb_element, HbElement, Pair, Symbol};
use crate::toeplitz::apply_coanalytic;

/// Sampled curve `y(x)` with strictly increasing `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub label: String,
}

impl Curve {
    pub fn new(x: Vec<f64>, y: Vec<f64>, label: impl Into<String>) -> Result<Curve> {
        if x.len() != y.len() {
            return Err(Error::InvalidArgument(format!(
                "curve has {} abscissae and {} values",
                x.len(),
                y.len()
            )));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("curve values"));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "curve abscissae must be strictly increasing".into(),
            ));
        }
        Ok(Curve {
            x,
            y,
            label: label.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn max_y(&self) -> f64 {
        self.y.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Least-squares slope of `y` against `x`.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidArgument(
            "slope needs at least two paired points".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("abscissae are all equal".into()));
    }
    Ok(sxy / sxx)
}

/// Slope of `log y` against `log 1/(1 − r)` for a blow-up curve over `r`.
pub fn blowup_exponent(curve: &Curve) -> Result<f64> {
    let lx: Vec<f64> = curve.x.iter().map(|r| -(1.0 - r).ln()).collect();
    let ly: Vec<f64> = curve.y.iter().map(|y| y.ln()).collect();
    least_squares_slope(&lx, &ly)
}

/// `1 − xy` for `x = 1 − dx`, `y = 1 − dy`, without cancellation.
fn one_minus_product(dx: f64, dy: f64) -> f64 {
    dx + dy - dx * dy
}

/// The symbol `b₀B²`, zeros `w_n = 1 − 4^{−n}` for `n ≤ count`, and the
/// weights `2^{−n}` of `f = Σ 2^{−n} k_{w_n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlowupData {
    spec: BlaschkeSpec,
    weights: Vec<f64>,
}

impl BlowupData {
    pub fn new(count: usize) -> Result<BlowupData> {
        if count == 0 {
            return Err(Error::InvalidArgument("need at least one zero".into()));
        }
        Ok(BlowupData {
            spec: BlaschkeSpec::geometric(4.0, count, 1)?,
            weights: (1..=count).map(|n| 0.5f64.powi(n as i32)).collect(),
        })
    }

    pub fn blaschke(&self) -> &BlaschkeSpec {
        &self.spec
    }

    pub fn symbol(&self) -> Symbol {
        Symbol::b0_times_blaschke_sq(&self.spec)
    }

    pub fn pair(&self, degree: usize, grid_size: usize) -> Result<Pair> {
        Pair::from_symbol(&self.symbol(), degree, grid_size)
    }

    /// `φ(x) = B(x)² x/(1 − x)` for real `x = 1 − gap`.
    pub fn phi(&self, gap: f64) -> f64 {
        let x = 1.0 - gap;
        blaschke_eval_real(&self.spec, x, gap).powi(2) * x / gap
    }

    /// `Σ 2^{−n} k_{w_n}` truncated at `degree`.
    pub fn kernel_sum(&self, degree: usize) -> TruncatedSeries {
        self.combination().series(degree)
    }

    pub fn combination(&self) -> KernelCombination {
        KernelCombination {
            coeffs: self.weights.clone(),
            gaps: self.spec.gaps().to_vec(),
        }
    }

    /// `(f_r)⁺(0)` for `r = 1 − r_gap`, summing all zeros.
    pub fn dilated_fplus_at_zero(&self, r_gap: f64) -> f64 {
        self.spec
            .gaps()
            .iter()
            .zip(&self.weights)
            .map(|(&d, &c)| c * self.phi(one_minus_product(r_gap, d)))
            .sum()
    }
}

/// A real combination `Σ c_n k_{w_n}` of Cauchy kernels at real points
/// `w_n = 1 − gaps[n]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelCombination {
    pub coeffs: Vec<f64>,
    pub gaps: Vec<f64>,
}

impl KernelCombination {
    pub fn series(&self, degree: usize) -> TruncatedSeries {
        let mut acc = TruncatedSeries::zero(degree);
        for (&c, &d) in self.coeffs.iter().zip(&self.gaps) {
            let k = cauchy_kernel(Complex64::new(1.0 - d, 0.0), degree)
                .expect("kernel points lie inside the disk");
            acc = &acc + &(&k * c);
        }
        acc
    }

    /// `‖Σ c_n k_{w_n}‖²_{H²} = Σ c_n c_m /(1 − w_n w_m)`.
    pub fn h2_norm_sq(&self) -> f64 {
        quadratic_form(&gram(&self.gaps), &self.coeffs)
    }

    /// The same combination with every point scaled by `r = 1 − r_gap`.
    pub fn dilated(&self, r_gap: f64) -> KernelCombination {
        KernelCombination {
            coeffs: self.coeffs.clone(),
            gaps: self.gaps.iter().map(|&d| one_minus_product(r_gap, d)).collect(),
        }
    }

    /// `‖·‖²_{H(b)}`, using `(k_w)⁺ = φ(w) k_w` for real `φ` at real `w`.
    pub fn hb_norm_sq(&self, phi: &dyn Fn(f64) -> f64) -> f64 {
        let g = gram(&self.gaps);
        let plus: Vec<f64> = self
            .coeffs
            .iter()
            .zip(&self.gaps)
            .map(|(&c, &d)| c * phi(d))
            .collect();
        quadratic_form(&g, &self.coeffs) + quadratic_form(&g, &plus)
    }
}

fn gram(gaps: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(gaps.len(), gaps.len(), |i, j| {
        1.0 / one_minus_product(gaps[i], gaps[j])
    })
}

fn quadratic_form(m: &DMatrix<f64>, c: &[f64]) -> f64 {
    let v = DVector::from_column_slice(c);
    v.dot(&(m * &v))
}

/// `y(r) = Σ_{n ≤ n_terms} 2^{−n} B(rw_n)² rw_n/(1 − rw_n)` with `B` built
/// from all `n_terms` zeros; every term is nonnegative.
pub fn blowup_exact_curve(n_terms: usize, r_values: &[f64]) -> Result<Curve> {
    if r_values.iter().any(|&r| !(0.0..1.0).contains(&r)) {
        return Err(Error::InvalidArgument("dilation radii must lie in [0, 1)".into()));
    }
    let data = BlowupData::new(n_terms)?;
    let y = r_values
        .iter()
        .map(|&r| data.dilated_fplus_at_zero(1.0 - r))
        .collect();
    Curve::new(r_values.to_vec(), y, format!("blowup_exact_n{n_terms}"))
}

/// `r = 1 − 4^{−k}` for each `k`.
pub fn radii_from_exponents(exponents: impl IntoIterator<Item = u32>) -> Vec<f64> {
    exponents
        .into_iter()
        .map(|k| 1.0 - 0.25f64.powi(k as i32))
        .collect()
}

/// `Re (f_r)⁺(0)` through the series pipeline.
pub fn blowup_series_curve(pair: &Pair, f: &TruncatedSeries, r_values: &[f64]) -> Result<Curve> {
    if r_values.iter().any(|&r| !(0.0..=1.0).contains(&r)) {
        return Err(Error::InvalidArgument("dilation radii must lie in [0, 1]".into()));
    }
    let y = r_values
        .par_iter()
        .map(|&r| Ok(make_hb_element(&dilate(f, r), pair)?.fplus.coeff(0).re))
        .collect::<Result<Vec<f64>>>()?;
    Curve::new(r_values.to_vec(), y, "blowup_series")
}

/// `‖s_n f‖_{H(b)}`, `‖σ_n f‖_{H(b)}` and `Re Σ_{j ≤ n} f̂(j) conj(φ̂(j))` for
/// `n = 1..=n_max`.
///
/// With `P_n(k) = Σ_{j ≤ n−k} f̂(k+j) conj(φ̂(j))` the coefficients of
/// `T_φ̄ s_n f`, one step adds `f̂(n) conj(φ̂(n−k))` to every `P(k)`; the
/// Cesàro means need the companion sums weighted by `k + j`.
pub fn divergence_curves(pair: &Pair, f: &TruncatedSeries, n_max: usize) -> Result<(Curve, Curve, Curve)> {
    if n_max > pair.degree() || n_max == 0 {
        return Err(Error::InvalidArgument(format!(
            "n_max {n_max} must lie in 1..={}",
            pair.degree()
        )));
    }
    let phi: Vec<Complex64> = (0..=n_max).map(|j| pair.phi().coeff(j).conj()).collect();
    let fc: Vec<Complex64> = (0..=n_max).map(|k| f.coeff(k)).collect();
    let mut p = vec![Complex64::new(0.0, 0.0); n_max + 1];
    let mut p1 = vec![Complex64::new(0.0, 0.0); n_max + 1];
    let mut h2 = 0.0;
    let mut coeff_sum = Complex64::new(0.0, 0.0);
    let (mut xs, mut partial, mut cesaro, mut sums) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for n in 0..=n_max {
        let fnn = fc[n];
        for k in 0..=n {
            let t = fnn * phi[n - k];
            p[k] += t;
            p1[k] += t * n as f64;
        }
        h2 += fnn.norm_sqr();
        coeff_sum += fnn * phi[n];
        if n == 0 {
            continue;
        }
        let s_plus: f64 = p[..=n].iter().map(|c| c.norm_sqr()).sum();
        let scale = 1.0 / (n + 1) as f64;
        let sigma_h2: f64 = (0..=n)
            .map(|k| (fc[k] * (1.0 - k as f64 * scale)).norm_sqr())
            .sum();
        let sigma_plus: f64 = (0..=n).map(|k| (p[k] - p1[k] * scale).norm_sqr()).sum();
        xs.push(n as f64);
        partial.push((h2 + s_plus).sqrt());
        cesaro.push((sigma_h2 + sigma_plus).sqrt());
        sums.push(coeff_sum.re);
    }
    Ok((
        Curve::new(xs.clone(), partial, "partial_sum_norm")?,
        Curve::new(xs.clone(), cesaro, "cesaro_norm")?,
        Curve::new(xs, sums, "coefficient_partial_sum")?,
    ))
}

/// Outcome of the dilation-monotonicity check on random polynomials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SarasonReport {
    pub trials: usize,
    pub degree: usize,
    pub seed: u64,
    pub r_values: Vec<f64>,
    /// Largest `‖f_r‖_{H(b)} / ‖f‖_{H(b)}` over all trials and radii.
    pub max_ratio: f64,
    pub worst_trial: usize,
    pub worst_r: f64,
    /// Number of `(f, r)` with ratio above `1 + 1e−8`.
    pub violations: usize,
}

/// The radii `0.10, 0.11, …, 0.99`.
pub fn default_sarason_radii() -> Vec<f64> {
    (10..=99).map(|k| k as f64 / 100.0).collect()
}

/// Polynomial with coefficients uniform in `[−1, 1] + i[−1, 1]`.
pub fn random_polynomial(rng: &mut ChaCha8Rng, degree: usize) -> TruncatedSeries {
    let coeffs = (0..=degree)
        .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
        .collect();
    TruncatedSeries::new(coeffs).expect("finite random coefficients")
}

/// `‖f_r‖_{H(b)} / ‖f‖_{H(b)}` through the series pipeline.
pub fn dilation_ratio(pair: &Pair, f: &TruncatedSeries, r: f64) -> Result<f64> {
    let base = make_hb_element(f, pair)?.hb_norm();
    Ok(make_hb_element(&dilate(f, r), pair)?.hb_norm() / base)
}

pub fn sarason_monotonicity_check(
    pair: &Pair,
    trials: usize,
    degree: usize,
    r_values: &[f64],
    seed: u64,
) -> Result<SarasonReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let polys: Vec<TruncatedSeries> = (0..trials).map(|_| random_polynomial(&mut rng, degree)).collect();
    let rows = polys
        .par_iter()
        .map(|f| {
            let base = make_hb_element(f, pair)?.hb_norm();
            r_values
                .iter()
                .map(|&r| Ok(make_hb_element(&dilate(f, r), pair)?.hb_norm() / base))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let mut report = SarasonReport {
        trials,
        degree,
        seed,
        r_values: r_values.to_vec(),
        max_ratio: f64::NEG_INFINITY,
        worst_trial: 0,
        worst_r: f64::NAN,
        violations: 0,
    };
    for (t, row) in rows.iter().enumerate() {
        for (&r, &ratio) in r_values.iter().zip(row) {
            if ratio > report.max_ratio {
                report.max_ratio = ratio;
                report.worst_trial = t;
                report.worst_r = r;
            }
            if ratio > 1.0 + 1e-8 {
                report.violations += 1;
            }
        }
    }
    Ok(report)
}

/// Largest dilation ratio over combinations of the kernels `k_{w_n}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContrastReport {
    pub zeros: usize,
    /// `(r, max_c ‖f_r‖_{H(b)}/‖f‖_{H(b)})` for each radius.
    pub ratios: Vec<(f64, f64)>,
    pub max_ratio: f64,
    pub r_at_max: f64,
    /// Maximizing coefficients at `r_at_max`, scaled to unit sup norm.
    pub witness: Vec<f64>,
}

/// The radii `0.10, …, 0.99`, then `0.999`, `0.9999` and `1 − 4^{−k}`, `k ≤ 10`,
/// sorted.
pub fn contrast_radii() -> Vec<f64> {
    let mut r = default_sarason_radii();
    r.extend([0.999, 0.9999]);
    r.extend(radii_from_exponents(1..=10));
    r.sort_by(|a, b| a.total_cmp(b));
    r.dedup();
    r
}

/// For `b = b₀B²` and each `r`, maximizes the dilation ratio over real
/// combinations `f = Σ c_n k_{w_n}` by the generalized eigenproblem
/// `A_r c = λ G c`, with `G` the `H(b)` Gram matrix of the kernels and `A_r`
/// that of the dilated kernels. All entries are closed forms.
pub fn sarason_contrast(data: &BlowupData, r_values: &[f64]) -> Result<ContrastReport> {
    let base = data.combination();
    let phi = |gap: f64| data.phi(gap);
    let g = hb_gram(&base.gaps, &phi);
    let chol = g
        .clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidArgument("kernel Gram matrix is not positive definite".into()))?;
    let l_inv = chol
        .l()
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument("kernel Gram factor is singular".into()))?;
    let mut report = ContrastReport {
        zeros: base.gaps.len(),
        ratios: Vec::new(),
        max_ratio: f64::NEG_INFINITY,
        r_at_max: f64::NAN,
        witness: Vec::new(),
    };
    for &r in r_values {
        let dilated = base.dilated(1.0 - r);
        let a = hb_gram(&dilated.gaps, &phi);
        let c = &l_inv * a * l_inv.transpose();
        let sym = (&c + c.transpose()) * 0.5;
        let eig = sym.symmetric_eigen();
        let (idx, &lambda) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(y.1))
            .expect("nonempty spectrum");
        let ratio = lambda.max(0.0).sqrt();
        report.ratios.push((r, ratio));
        if ratio > report.max_ratio {
            let v = eig.eigenvectors.column(idx).into_owned();
            let coeffs = l_inv.transpose() * v;
            let scale = coeffs.iter().fold(0.0f64, |m, x| if x.abs() > m.abs() { *x } else { m });
            report.max_ratio = ratio;
            report.r_at_max = r;
            report.witness = coeffs.iter().map(|x| x / scale).collect();
        }
    }
    Ok(report)
}

/// `G_{nm} = (1 + φ(w_n)φ(w_m)) / (1 − w_n w_m)`.
fn hb_gram(gaps: &[f64], phi: &dyn Fn(f64) -> f64) -> DMatrix<f64> {
    let p: Vec<f64> = gaps.iter().map(|&d| phi(d)).collect();
    DMatrix::from_fn(gaps.len(), gaps.len(), |i, j| {
        (1.0 + p[i] * p[j]) / one_minus_product(gaps[i], gaps[j])
    })
}

/// `‖T_h̄ₙ f − f‖_{H(b)}` for `h_n` with `|h_n| = min{1, n|a|}`.
pub fn toeplitz_approx_curve(pair: &Pair, f_elt: &HbElement, n_values: &[u64]) -> Result<Curve> {
    let y = n_values
        .par_iter()
        .map(|&n| {
            let h = choose_h(pair, n)?;
            let g = apply_coanalytic(&h, &f_elt.f);
            // T_h̄ f must lie in H(b); the residual check enforces it
            make_hb_element(&g, pair)?;
            Ok(make_hb_element(&(&g - &f_elt.f), pair)?.hb_norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    let x = n_values.iter().map(|&n| n as f64).collect();
    Curve::new(x, y, "toeplitz_approx")
}
