//! Discrete Fourier transforms on complex samples, backed by `rustfft`.
//!
//! `forward` computes `X[k] = Σ_m x[m] e^{-2πi mk/n}`, `inverse` the same sum
//! with the opposite sign and no normalization.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

pub(crate) fn forward(data: &mut [Complex64]) {
    transform(data, FftDirection::Forward);
}

pub(crate) fn inverse(data: &mut [Complex64]) {
    transform(data, FftDirection::Inverse);
}

fn transform(data: &mut [Complex64], direction: FftDirection) {
    if data.len() <= 1 {
        return;
    }
    FftPlanner::new().plan_fft(data.len(), direction).process(data);
}
