//! Outer functions from boundary moduli.
//!
//! An outer function `g` with `g(0) > 0` is `exp(L)`, where `L̂(0) = û(0)`,
//! `L̂(k) = 2û(k)` for `k ≥ 1` and `u = log|g|` on the circle. The log-modulus
//! of interest here vanishes to integer order at isolated boundary points,
//! which makes `u` logarithmically singular and ruins the accuracy of plain
//! grid quadrature. Such zeros are detected, their singular part
//! `p·log|e^{iθ} − ζ|` (whose log series is `p·log(1 − ζ̄z)`) is split off
//! exactly, and only the smooth remainder is transformed on the grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::quadrature::gauss_legendre;
use crate::error::{Error, Result};
use crate::fft;
use crate::series::{angle, series_exp, BoundaryGrid, TruncatedSeries, OVERSAMPLING};

/// Samples below `FLOOR_RELATIVE · max` count as zero.
pub const FLOOR_RELATIVE: f64 = 1e-14;
/// Largest admissible fraction of samples below the floor.
pub const MAX_FLOOR_FRACTION: f64 = 0.1;

/// Grid minima below this fraction of the maximum are refined as zero candidates.
const DIP_RELATIVE: f64 = 1e-3;
/// A refined minimum below this fraction of the maximum is a boundary zero.
const ZERO_RELATIVE: f64 = 1e-12;
/// Estimated orders further than this from an integer are not deflated.
const ORDER_TOLERANCE: f64 = 0.25;
/// Graded panels toward a boundary zero stop at this distance.
const GRADING_LIMIT: f64 = 1e-15;

/// A zero of the boundary modulus at `e^{iθ}`, where `|g| ~ |θ − θ₀|^order`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryZero {
    pub theta: f64,
    pub order: u32,
}

/// An outer function `g` with `log|g(e^{iθ})| = Σ p_j log|e^{iθ} − ζ_j| + Re S(e^{iθ})`
/// for a smooth log series `S`.
#[derive(Clone, Debug, PartialEq)]
pub struct OuterFactor {
    zeros: Vec<BoundaryZero>,
    smooth_log: Vec<Complex64>,
    grid_size: usize,
    series: TruncatedSeries,
}

/// `|e^{it} − 1|`.
fn chord(t: f64) -> f64 {
    (2.0 * (0.5 * t).sin()).abs()
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

impl OuterFactor {
    pub fn zeros(&self) -> &[BoundaryZero] {
        &self.zeros
    }

    /// Taylor coefficients `0..=N` of `g`.
    pub fn series(&self) -> &TruncatedSeries {
        &self.series
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    /// `log|g(e^{iθ})|`; `-∞` exactly at a boundary zero.
    pub fn log_modulus(&self, theta: f64) -> f64 {
        let z = Complex64::from_polar(1.0, theta);
        let smooth = self
            .smooth_log
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
            .re;
        self.zeros
            .iter()
            .map(|zr| zr.order as f64 * chord(theta - zr.theta).ln())
            .sum::<f64>()
            + smooth
    }

    /// `log|g|` at the `grid_size` uniform points.
    pub fn log_modulus_grid(&self) -> Vec<f64> {
        let m = self.grid_size;
        let mut data = vec![Complex64::new(0.0, 0.0); m];
        for (d, c) in data.iter_mut().zip(&self.smooth_log) {
            *d = *c;
        }
        fft::inverse(&mut data);
        data.iter()
            .enumerate()
            .map(|(i, s)| {
                let theta = angle(i, m);
                self.zeros
                    .iter()
                    .map(|zr| zr.order as f64 * chord(theta - zr.theta).ln())
                    .sum::<f64>()
                    + s.re
            })
            .collect()
    }
}

/// The outer function with `|g|² = w` on the grid and `g(0) > 0`, to degree `n`.
///
/// Isolated grid samples below the floor whose neighbours decay like an even
/// power are treated as boundary zeros located at the grid point.
pub fn outer_from_modulus_squared(w: &BoundaryGrid, n: usize) -> Result<TruncatedSeries> {
    let mut samples = Vec::with_capacity(w.size());
    for s in w.samples() {
        if s.im != 0.0 {
            return Err(Error::InvalidArgument(
                "modulus samples must be real".into(),
            ));
        }
        if s.re < 0.0 {
            return Err(Error::NegativeModulus(s.re));
        }
        samples.push(s.re);
    }
    Ok(outer_from_samples(&samples, None, n)?.series)
}

/// Outer factor from samples `w_m = |g(e^{iθ_m})|²`, optionally with the
/// modulus as a function of `θ` so boundary zeros between grid points can be
/// located.
pub(crate) fn outer_from_samples(
    w: &[f64],
    modulus: Option<&(dyn Fn(f64) -> f64 + Sync)>,
    n: usize,
) -> Result<OuterFactor> {
    let m = w.len();
    if m == 0 || !m.is_power_of_two() {
        return Err(Error::GridNotPowerOfTwo(m));
    }
    let required = OVERSAMPLING * (n + 1);
    if m < required {
        return Err(Error::GridTooSmall {
            grid: m,
            degree: n,
            required,
        });
    }
    if w.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("modulus samples"));
    }
    if let Some(&neg) = w.iter().find(|&&x| x < 0.0) {
        return Err(Error::NegativeModulus(neg));
    }
    let max = w.iter().cloned().fold(0.0, f64::max);
    let floor = FLOOR_RELATIVE * max;
    let below = w.iter().filter(|&&x| x <= floor).count();
    let fraction = below as f64 / m as f64;
    if max == 0.0 || fraction >= MAX_FLOOR_FRACTION {
        return Err(Error::NotLogIntegrable {
            fraction: if max == 0.0 { 1.0 } else { fraction },
        });
    }

    let zeros = match modulus {
        None => grid_zeros(w, floor),
        Some(f) => refined_zeros(w, f, max),
    };

    let spacing = 2.0 * PI / m as f64;
    let mut u: Vec<f64> = w
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let theta = angle(i, m);
            0.5 * x.max(floor).ln()
                - zeros
                    .iter()
                    .map(|zr| zr.order as f64 * chord(theta - zr.theta).ln())
                    .sum::<f64>()
        })
        .collect();
    // Samples sitting on a zero carry no information; interpolate them from
    // two neighbours on each side (fourth order).
    for zr in &zeros {
        let nearest = ((zr.theta / spacing).round() as usize) % m;
        if circular_distance(angle(nearest, m), zr.theta) < 0.01 * spacing {
            let at = |k: isize| u[(nearest as isize + k).rem_euclid(m as isize) as usize];
            u[nearest] = (4.0 * (at(-1) + at(1)) - (at(-2) + at(2))) / 6.0;
        }
    }

    let mut data: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft::forward(&mut data);
    let scale = 1.0 / m as f64;
    let mut smooth_log: Vec<Complex64> = (0..m / 2)
        .map(|k| {
            if k == 0 {
                Complex64::new(data[0].re * scale, 0.0)
            } else {
                data[k] * (2.0 * scale)
            }
        })
        .collect();
    let peak = smooth_log.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let keep = smooth_log
        .iter()
        .rposition(|c| c.norm() > 1e-17 * peak)
        .map_or(1, |k| k + 1);
    smooth_log.truncate(keep);

    let log_series = log_series_with_zeros(&smooth_log, &zeros, n);
    Ok(OuterFactor {
        zeros,
        smooth_log,
        grid_size: m,
        series: series_exp(&log_series, n),
    })
}

/// `S + Σ p_j log(1 − ζ̄_j z)` to degree `n`.
fn log_series_with_zeros(smooth: &[Complex64], zeros: &[BoundaryZero], n: usize) -> TruncatedSeries {
    let mut l: Vec<Complex64> = (0..=n)
        .map(|k| smooth.get(k).copied().unwrap_or_default())
        .collect();
    for zr in zeros {
        for (k, c) in l.iter_mut().enumerate().skip(1) {
            // log(1 − ζ̄z) = −Σ ζ̄^k z^k / k
            let zeta_bar_k = Complex64::from_polar(1.0, -(k as f64) * zr.theta);
            *c -= zeta_bar_k * (zr.order as f64 / k as f64);
        }
    }
    TruncatedSeries::from_vec(l)
}

fn order_estimate(near: f64, far: f64, ratio: f64) -> f64 {
    (far / near).ln() / (2.0 * ratio.ln())
}

fn rounded_order(p: f64) -> Option<u32> {
    let r = p.round();
    (r >= 1.0 && (p - r).abs() <= ORDER_TOLERANCE).then_some(r as u32)
}

/// Isolated samples below the floor, with the order read off the neighbours.
fn grid_zeros(w: &[f64], floor: f64) -> Vec<BoundaryZero> {
    let m = w.len();
    if m < 5 {
        return Vec::new();
    }
    let at = |i: usize, k: isize| w[(i as isize + k).rem_euclid(m as isize) as usize];
    (0..m)
        .filter(|&i| {
            w[i] <= floor && [-2, -1, 1, 2].iter().all(|&k| at(i, k) > floor)
        })
        .filter_map(|i| {
            let p = 0.5
                * (order_estimate(at(i, -1), at(i, -2), 2.0)
                    + order_estimate(at(i, 1), at(i, 2), 2.0));
            rounded_order(p).map(|order| BoundaryZero {
                theta: angle(i, m),
                order,
            })
        })
        .collect()
}

/// Grid minima refined by golden-section search on the modulus function.
fn refined_zeros(w: &[f64], f: &(dyn Fn(f64) -> f64 + Sync), max: f64) -> Vec<BoundaryZero> {
    let m = w.len();
    let spacing = 2.0 * PI / m as f64;
    let at = |i: usize, k: isize| w[(i as isize + k).rem_euclid(m as isize) as usize];
    let mut zeros: Vec<BoundaryZero> = Vec::new();
    for i in 0..m {
        if !(w[i] <= at(i, -1) && w[i] < at(i, 1) && w[i] < DIP_RELATIVE * max) {
            continue;
        }
        let grid_theta = angle(i, m);
        let (t, ft) = golden_min(f, grid_theta - spacing, grid_theta + spacing);
        let (theta, value) = if (t - grid_theta).abs() < 1e-7 * spacing.max(1.0) || w[i] <= ft {
            (grid_theta, w[i].min(ft))
        } else {
            (t.rem_euclid(2.0 * PI), ft)
        };
        if value > ZERO_RELATIVE * max {
            continue;
        }
        let s = 4.0 * spacing;
        let p = 0.5
            * (order_estimate(f(theta - s), f(theta - 4.0 * s), 4.0)
                + order_estimate(f(theta + s), f(theta + 4.0 * s), 4.0));
        if let Some(order) = rounded_order(p) {
            if zeros
                .iter()
                .all(|z| circular_distance(z.theta, theta) > 0.5 * spacing)
            {
                zeros.push(BoundaryZero { theta, order });
            }
        }
    }
    zeros
}

fn golden_min(f: &(dyn Fn(f64) -> f64 + Sync), mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 4.0 * f64::EPSILON * b.abs().max(1.0) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// An interval of the set where the clipped log-modulus is negative.
enum Piece {
    Regular(f64, f64),
    /// Graded toward `singular`, where the log-modulus is `-∞`.
    Graded { singular: f64, other: f64 },
}

/// Log-series coefficients `0..=n` of the outer function `h` with
/// `log|h| = min(0, shift + log|g|)`, by adaptive Gauss-Legendre quadrature.
///
/// The negative set is resolved cell by cell on the factor's grid, splitting
/// at boundary zeros and at the kinks where `shift + log|g|` crosses 0; cells
/// touching a zero are graded geometrically down to distance `1e-15`.
pub(crate) fn clipped_log_series(factor: &OuterFactor, shift: f64, n: usize) -> TruncatedSeries {
    let m = factor.grid_size;
    let grid_values: Vec<f64> = factor.log_modulus_grid().iter().map(|v| v + shift).collect();
    let g = |theta: f64| shift + factor.log_modulus(theta);
    let zero_points: Vec<f64> = factor
        .zeros
        .iter()
        .flat_map(|z| [z.theta, z.theta + 2.0 * PI])
        .collect();

    let pieces: Vec<Piece> = (0..m)
        .into_par_iter()
        .flat_map_iter(|i| {
            let lo = angle(i, m);
            let hi = angle(i + 1, m);
            let mut cuts: Vec<f64> = zero_points
                .iter()
                .copied()
                .filter(|&z| z >= lo && z <= hi)
                .collect();
            cuts.sort_by(|a, b| a.total_cmp(b));
            let mut points = vec![lo];
            points.extend(cuts.iter().copied().filter(|&z| z > lo && z < hi));
            points.push(hi);
            let is_zero = |x: f64| cuts.contains(&x);
            let value_at = |x: f64| {
                if x == lo {
                    grid_values[i]
                } else if x == hi {
                    grid_values[(i + 1) % m]
                } else {
                    g(x)
                }
            };
            let mut out = Vec::new();
            for seg in points.windows(2) {
                let (x, y) = (seg[0], seg[1]);
                match (is_zero(x), is_zero(y)) {
                    (false, false) => regular_piece(&g, x, y, value_at(x), value_at(y), &mut out),
                    (true, false) => singular_piece(&g, x, y, value_at(y), &mut out),
                    (false, true) => singular_piece(&g, y, x, value_at(x), &mut out),
                    (true, true) => {
                        let mid = 0.5 * (x + y);
                        let gm = g(mid);
                        singular_piece(&g, x, mid, gm, &mut out);
                        singular_piece(&g, y, mid, gm, &mut out);
                    }
                }
            }
            out
        })
        .collect();

    let (x8, w8) = gauss_legendre(8);
    let (x16, w16) = gauss_legendre(16);
    let nodes: Vec<(f64, f64)> = pieces
        .par_iter()
        .flat_map_iter(|piece| {
            let mut out = Vec::new();
            match *piece {
                Piece::Regular(x, y) => push_panel(&g, x, y, &x8, &w8, &mut out),
                Piece::Graded { singular, other } => {
                    let d = other - singular;
                    let levels = ((d.abs() / GRADING_LIMIT).log2().ceil().max(0.0)) as i32;
                    for j in 0..levels {
                        let a = singular + d * 0.5f64.powi(j + 1);
                        let b = singular + d * 0.5f64.powi(j);
                        push_panel(&g, a.min(b), a.max(b), &x16, &w16, &mut out);
                    }
                }
            }
            out
        })
        .collect();

    let moments = fourier_moments(&nodes, n);
    let coeffs = moments
        .iter()
        .enumerate()
        .map(|(k, c)| if k == 0 { Complex64::new(c.re / (2.0 * PI), 0.0) } else { c / PI })
        .collect();
    TruncatedSeries::from_vec(coeffs)
}

fn regular_piece(
    g: &(dyn Fn(f64) -> f64 + Sync),
    x: f64,
    y: f64,
    gx: f64,
    gy: f64,
    out: &mut Vec<Piece>,
) {
    match (gx <= 0.0, gy <= 0.0) {
        (true, true) => out.push(Piece::Regular(x, y)),
        (false, false) => {}
        (true, false) => out.push(Piece::Regular(x, crossing(g, x, y))),
        (false, true) => out.push(Piece::Regular(crossing(g, y, x), y)),
    }
}

/// Negative part of the segment from the zero `s` to `t`.
fn singular_piece(g: &(dyn Fn(f64) -> f64 + Sync), s: f64, t: f64, gt: f64, out: &mut Vec<Piece>) {
    let other = if gt <= 0.0 { t } else { crossing(g, s, t) };
    if other != s {
        out.push(Piece::Graded { singular: s, other });
    }
}

/// Point between `neg` (where `g ≤ 0` or `g = -∞`) and `pos` (where `g > 0`)
/// at which `g` changes sign, by bisection.
fn crossing(g: &(dyn Fn(f64) -> f64 + Sync), mut neg: f64, mut pos: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (neg + pos);
        if mid == neg || mid == pos {
            break;
        }
        if g(mid) <= 0.0 {
            neg = mid;
        } else {
            pos = mid;
        }
    }
    neg
}

fn push_panel(
    g: &(dyn Fn(f64) -> f64 + Sync),
    a: f64,
    b: f64,
    nodes: &[f64],
    weights: &[f64],
    out: &mut Vec<(f64, f64)>,
) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    for (x, w) in nodes.iter().zip(weights) {
        let theta = mid + half * x;
        let value = g(theta).min(0.0);
        if value.is_finite() {
            out.push((theta, w * half * value));
        }
    }
}

/// `Σ_j v_j e^{-ikθ_j}` for `k = 0..=n`, summed in a fixed chunk order.
fn fourier_moments(nodes: &[(f64, f64)], n: usize) -> Vec<Complex64> {
    const CHUNK: usize = 2048;
    let partials: Vec<Vec<Complex64>> = nodes
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![Complex64::new(0.0, 0.0); n + 1];
            for &(theta, v) in chunk {
                let step = Complex64::from_polar(1.0, -theta);
                let mut e = Complex64::new(v, 0.0);
                for (k, a) in acc.iter_mut().enumerate() {
                    // re-anchor periodically so the recurrence error stays bounded
                    if k % 64 == 0 && k > 0 {
                        e = Complex64::from_polar(v, -(k as f64) * theta);
                    }
                    *a += e;
                    e *= step;
                }
            }
            acc
        })
        .collect();
    let mut total = vec![Complex64::new(0.0, 0.0); n + 1];
    for p in partials {
        for (t, x) in total.iter_mut().zip(p) {
            *t += x;
        }
    }
    total
}
