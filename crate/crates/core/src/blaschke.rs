//! Finite Blaschke products with zeros on `(0, 1)`.
//!
//! Zeros are stored through their gaps `δ_k = 1 − w_k`, so families such as
//! `w_n = 1 − 4^{−n}` stay strictly increasing in double precision long after
//! `w_n` itself rounds to 1. Each factor is normalized as
//! `(w − z)/(1 − wz)`, positive at the origin.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TruncatedSeries;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeSpec {
    gaps: Vec<f64>,
    power: u32,
}

/// Bounds `α ≤ (1 − w_{k+1})/(1 − w_k) ≤ β` over consecutive zeros.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioBounds {
    pub alpha: f64,
    pub beta: f64,
}

impl RatioBounds {
    /// The analytic lower bound for `|B(r w_n)|` needs `0 < α` and `β < 1/2`.
    pub fn is_admissible(&self) -> bool {
        self.alpha > 0.0 && self.beta < 0.5
    }
}

impl BlaschkeSpec {
    pub fn from_zeros(zeros: &[f64], power: u32) -> Result<Self> {
        Self::from_gaps(zeros.iter().map(|w| 1.0 - w).collect(), power)
    }

    /// Zeros given by their distances `1 − w_k` to the point 1.
    pub fn from_gaps(gaps: Vec<f64>, power: u32) -> Result<Self> {
        if power == 0 {
            return Err(Error::InvalidArgument("Blaschke power must be at least 1".into()));
        }
        for (i, &g) in gaps.iter().enumerate() {
            if !(g > 0.0 && g < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "zero {} = {} is not in (0, 1)",
                    i + 1,
                    1.0 - g
                )));
            }
            if i > 0 && g >= gaps[i - 1] {
                return Err(Error::InvalidArgument(
                    "zeros must be strictly increasing".into(),
                ));
            }
        }
        Ok(BlaschkeSpec { gaps, power })
    }

    /// Zeros `w_n = 1 − base^{−n}` for `n = 1..=count`.
    pub fn geometric(base: f64, count: usize, power: u32) -> Result<Self> {
        if !(base > 1.0) {
            return Err(Error::InvalidArgument(format!("geometric base {base} must exceed 1")));
        }
        Self::from_gaps((1..=count).map(|n| base.powi(-(n as i32))).collect(), power)
    }

    pub fn with_power(&self, power: u32) -> Result<Self> {
        Self::from_gaps(self.gaps.clone(), power)
    }

    /// The first `count` zeros with the same power.
    pub fn truncated(&self, count: usize) -> Self {
        BlaschkeSpec {
            gaps: self.gaps[..count.min(self.gaps.len())].to_vec(),
            power: self.power,
        }
    }

    pub fn zeros(&self) -> Vec<f64> {
        self.gaps.iter().map(|g| 1.0 - g).collect()
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn ratio_bounds(&self) -> Option<RatioBounds> {
        if self.gaps.len() < 2 {
            return None;
        }
        let ratios = self.gaps.windows(2).map(|w| w[1] / w[0]);
        let (alpha, beta) = ratios.fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
        Some(RatioBounds { alpha, beta })
    }

    /// `B(z)^power` with one factor `(w − z)/(1 − wz)` per zero.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        blaschke_eval(self, z)
    }
}

pub fn blaschke_eval(spec: &BlaschkeSpec, z: Complex64) -> Complex64 {
    let one_minus_z = Complex64::new(1.0, 0.0) - z;
    let base: Complex64 = spec
        .gaps
        .iter()
        .map(|&d| (one_minus_z - d) / (one_minus_z + z * d))
        .product();
    base.powu(spec.power)
}

/// `B(x)^power` for real `x < 1` given `1 − x` directly, avoiding the
/// cancellation in `1 − x` when `x` is within a few ulps of 1.
pub(crate) fn blaschke_eval_real(spec: &BlaschkeSpec, x: f64, one_minus_x: f64) -> f64 {
    let base: f64 = spec
        .gaps
        .iter()
        .map(|&d| (one_minus_x - d) / (one_minus_x + x * d))
        .product();
    base.powi(spec.power as i32)
}

/// Pseudo-hyperbolic distance `|z − w|/|1 − w̄z|`.
pub fn pseudo_hyperbolic(z: Complex64, w: Complex64) -> Result<f64> {
    for p in [z, w] {
        if p.norm() >= 1.0 {
            return Err(Error::OutsideDisk { modulus: p.norm() });
        }
    }
    Ok(((z - w) / (Complex64::new(1.0, 0.0) - w.conj() * z)).norm())
}

/// Taylor coefficients of `B^power` through degree `n`.
///
/// Multiplying by one factor `(w − z)/(1 − wz)` is the first-order recurrence
/// `g_k = w g_{k−1} + w f_k − f_{k−1}`, so the whole product costs `O(n)` per
/// factor.
pub fn blaschke_series(spec: &BlaschkeSpec, n: usize) -> TruncatedSeries {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[0] = Complex64::new(1.0, 0.0);
    for _ in 0..spec.power {
        for &d in &spec.gaps {
            let w = 1.0 - d;
            let mut prev_in = Complex64::new(0.0, 0.0);
            let mut prev_out = Complex64::new(0.0, 0.0);
            for c in coeffs.iter_mut() {
                let f = *c;
                let g = prev_out * w + f * w - prev_in;
                prev_in = f;
                prev_out = g;
                *c = g;
            }
        }
    }
    TruncatedSeries::from_vec(coeffs)
}

/// For each `n` with a successor zero, the minimum of `|B(r w_n)|` over
/// `samples` equally spaced `r ∈ [w_n, w_{n+1}]`.
pub fn blaschke_floor(spec: &BlaschkeSpec, samples: usize) -> Vec<(usize, f64)> {
    let samples = samples.max(2);
    let gaps = &spec.gaps;
    (0..gaps.len().saturating_sub(1))
        .map(|i| {
            let (dn, dnext) = (gaps[i], gaps[i + 1]);
            let min = (0..samples)
                .map(|s| {
                    // r = 1 − δ_r runs from w_n to w_{n+1}
                    let t = s as f64 / (samples - 1) as f64;
                    let dr = dn + t * (dnext - dn);
                    let x = (1.0 - dr) * (1.0 - dn);
                    let one_minus_x = dr + dn - dr * dn;
                    blaschke_eval_real(spec, x, one_minus_x).abs()
                })
                .fold(f64::INFINITY, f64::min);
            (i + 1, min)
        })
        .collect()
}

/// `min_j Π_{k≠j} ρ(w_k, w_j)`: the uniform-separation constant of the zero set.
pub fn uniform_separation(spec: &BlaschkeSpec) -> f64 {
    let gaps = &spec.gaps;
    (0..gaps.len())
        .map(|j| {
            gaps.iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &dk)| real_rho(dk, gaps[j]))
                .product::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

/// `ρ(w_k, w_j)` for real zeros given by their gaps.
fn real_rho(dk: f64, dj: f64) -> f64 {
    // |w_k − w_j| = |δ_j − δ_k|, 1 − w_k w_j = δ_k + δ_j − δ_k δ_j
    (dj - dk).abs() / (dk + dj - dk * dj)
}

/// The constants entering the lower bound for `|B(r w_n)|`: the separation
/// constant `C′`, the bound `(1 − 2β)/2` and the bound `w₁α/3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloorConstants {
    pub separation: f64,
    pub middle: f64,
    pub shoulder: f64,
}

impl FloorConstants {
    /// The product `C′² · (1 − 2β)/2 · w₁α/3` bounding `|B(r w_n)|` from below.
    pub fn product(&self) -> f64 {
        self.separation * self.separation * self.middle * self.shoulder
    }
}

pub fn floor_constants(spec: &BlaschkeSpec) -> Option<FloorConstants> {
    let bounds = spec.ratio_bounds()?;
    Some(FloorConstants {
        separation: uniform_separation(spec),
        middle: (1.0 - 2.0 * bounds.beta) / 2.0,
        shoulder: (1.0 - spec.gaps[0]) * bounds.alpha / 3.0,
    })
}
