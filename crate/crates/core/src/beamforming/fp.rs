//! Weighted sum-rate maximization by fractional programming.
//!
//! Each iteration applies the Lagrangian dual transform and the quadratic
//! transform; the precoder update is closed-form up to the power
//! multiplier, which is found by bisection.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{rates_for_precoder, RateReport, UserSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FpOptions {
    pub max_iter: usize,
    /// Relative objective change that ends the iteration.
    pub tol: f64,
}

impl Default for FpOptions {
    fn default() -> Self {
        Self { max_iter: 500, tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FpOutcome {
    /// `N × K` precoder with `‖V‖² ≤ P`.
    pub precoder: DMatrix<Complex64>,
    /// Weighted sum-rate of every iterate, starting with the initial point.
    pub history: Vec<f64>,
    pub report: RateReport,
    pub converged: bool,
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

// Every iterate has the form V = H Z with Z a K × K coefficient matrix, so
// the iteration runs on the Gram matrix G = H^H H alone:
// H^H V = G Z and ‖V‖² = tr(Z^H G Z).

fn power_of(g: &DMatrix<Complex64>, z: &DMatrix<Complex64>) -> f64 {
    (z.adjoint() * g * z).trace().re
}

fn scale_to(z: DMatrix<Complex64>, g: &DMatrix<Complex64>, p_max: f64) -> DMatrix<Complex64> {
    let p = power_of(g, &z);
    if p > 0.0 {
        z * c((p_max / p).sqrt())
    } else {
        z
    }
}

/// Regularized zero-forcing start scaled to full power.
fn rzf_start(g: &DMatrix<Complex64>, noise: &[f64], p_max: f64) -> DMatrix<Complex64> {
    let k = g.nrows();
    let alpha: f64 = noise.iter().sum::<f64>() / p_max;
    let m = g + DMatrix::<Complex64>::identity(k, k) * c(alpha);
    let z = m.lu().try_inverse().unwrap_or_else(|| DMatrix::identity(k, k));
    scale_to(z, g, p_max)
}

/// Zero-forcing with weighted water-filling over the interference-free
/// streams. A unit-norm ZF column reaches its user with power gain
/// `1 / (G^{-1})_jj`.
fn zf_start(g: &DMatrix<Complex64>, weights: &[f64], noise: &[f64], p_max: f64) -> Option<DMatrix<Complex64>> {
    let k = g.nrows();
    let inv = g.clone().cholesky()?.inverse();
    let snr: Vec<f64> = (0..k).map(|j| 1.0 / (inv[(j, j)].re * noise[j])).collect();
    if snr.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return None;
    }
    let alloc = |mu: f64| -> Vec<f64> { (0..k).map(|j| (weights[j] * mu - 1.0 / snr[j]).max(0.0)).collect() };
    let total = |mu: f64| alloc(mu).iter().sum::<f64>();
    let (mut lo, mut hi) = (0.0, 1.0);
    while total(hi) < p_max {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) < p_max {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = alloc(hi);
    let z = DMatrix::from_fn(k, k, |i, j| inv[(i, j)] * c((p[j] / inv[(j, j)].re).sqrt()));
    Some(scale_to(z, g, p_max))
}

/// SINR of every user from the cross gains `A = H^H V`.
fn sinr_from_gains(a: &DMatrix<Complex64>, noise: &[f64]) -> Vec<f64> {
    let k = a.nrows();
    (0..k)
        .map(|i| {
            let signal = a[(i, i)].norm_sqr();
            let total: f64 = (0..k).map(|j| a[(i, j)].norm_sqr()).sum();
            signal / (total - signal + noise[i])
        })
        .collect()
}

fn weighted_rate(sinr: &[f64], weights: &[f64]) -> f64 {
    sinr.iter().zip(weights).map(|(s, w)| w * (1.0 + s).log2()).sum()
}

fn bisect_multiplier(power: impl Fn(f64) -> f64, hi: f64, p_max: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, hi.max(f64::MIN_POSITIVE));
    while power(hi) > p_max {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if power(mid) <= p_max {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    hi
}

fn multiplier_bound(g: &DMatrix<Complex64>, a: &[Complex64], p_max: f64) -> f64 {
    let bound: f64 = a.iter().enumerate().map(|(i, ai)| ai.norm_sqr() * g[(i, i)].re).sum();
    (bound / p_max).sqrt()
}

/// `Z(λ) = (D G + λ I)^{-1} diag(a)` with the multiplier chosen for the
/// power budget. With `M = D^{1/2} G D^{1/2} = U Λ U^H` and
/// `B = U^H D^{-1/2} diag(a)`, `‖V(λ)‖² = Σ_i Λ_i ‖B_i‖² / (Λ_i + λ)²`.
fn update_eigen(g: &DMatrix<Complex64>, y2: &[f64], a: &[Complex64], p_max: f64) -> DMatrix<Complex64> {
    let k = g.nrows();
    let sq: Vec<f64> = y2.iter().map(|v| v.sqrt()).collect();
    let m = DMatrix::from_fn(k, k, |i, j| g[(i, j)] * (sq[i] * sq[j]));
    let eig = m.symmetric_eigen();
    let lam: Vec<f64> = eig.eigenvalues.iter().map(|v| v.max(0.0)).collect();
    let u = eig.eigenvectors;
    let b = DMatrix::from_fn(k, k, |i, j| u[(j, i)].conj() * (a[j] / sq[j]));
    let row2: Vec<f64> = (0..k).map(|i| b.row(i).norm_squared()).collect();
    let power = |l: f64| -> f64 {
        (0..k)
            .map(|i| {
                let d = lam[i] + l;
                if d > 0.0 {
                    lam[i] * row2[i] / (d * d)
                } else if row2[i] > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            })
            .sum()
    };
    let lambda = if power(0.0) <= p_max {
        0.0
    } else {
        bisect_multiplier(power, multiplier_bound(g, a, p_max), p_max)
    };
    let scaled = DMatrix::from_fn(k, k, |i, j| b[(i, j)] / c(lam[i] + lambda));
    let w = &u * scaled;
    DMatrix::from_fn(k, k, |i, j| w[(i, j)] * sq[i])
}

/// Users whose auxiliary variable has collapsed get an exactly zero column;
/// letting it decay instead drags the iteration through subnormal values.
const INACTIVE_RATIO: f64 = 1e-20;

fn update(g: &DMatrix<Complex64>, y2: &[f64], a: &[Complex64], p_max: f64) -> DMatrix<Complex64> {
    let k = g.nrows();
    let peak = y2.iter().cloned().fold(0.0, f64::max);
    let active: Vec<usize> = (0..k)
        .filter(|&i| y2[i] > INACTIVE_RATIO * peak && a[i].norm_sqr() > 0.0)
        .collect();
    let mut z = DMatrix::zeros(k, k);
    if active.is_empty() {
        return z;
    }
    let g_s = g.select_rows(&active).select_columns(&active);
    let y2_s: Vec<f64> = active.iter().map(|&i| y2[i]).collect();
    let a_s: Vec<Complex64> = active.iter().map(|&i| a[i]).collect();
    let z_s = update_eigen(&g_s, &y2_s, &a_s, p_max);
    for (si, &i) in active.iter().enumerate() {
        for (sj, &j) in active.iter().enumerate() {
            z[(i, j)] = z_s[(si, sj)];
        }
    }
    // Round-off can leave the power a hair above the budget.
    if power_of(g, &z) > p_max {
        scale_to(z, g, p_max)
    } else {
        z
    }
}

/// FP on explicit channel columns `h` (`N × K`) with `‖V‖² ≤ p_max`.
pub fn fp_solve(
    h: &DMatrix<Complex64>,
    weights: &[f64],
    noise: &[f64],
    p_max: f64,
    opts: &FpOptions,
) -> Result<FpOutcome> {
    let k = h.ncols();
    if k == 0 || k > h.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "FP needs 1 <= K <= N, got K={k}, N={}",
            h.nrows()
        )));
    }
    if weights.len() != k || noise.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "{k} users but {} weights and {} noise powers",
            weights.len(),
            noise.len()
        )));
    }
    if !(p_max.is_finite() && p_max > 0.0) {
        return Err(Error::InvalidParameter(format!("power budget must be positive, got {p_max}")));
    }
    let g = h.ad_mul(h);
    // Start from the better of regularized and water-filled zero-forcing; at
    // high SNR the iteration creeps and would otherwise stop below the ZF rate.
    let rated = |z: DMatrix<Complex64>| {
        let gains = &g * &z;
        let sinr = sinr_from_gains(&gains, noise);
        let rate = weighted_rate(&sinr, weights);
        (z, gains, sinr, rate)
    };
    let mut start = rated(rzf_start(&g, noise, p_max));
    if let Some(zf) = zf_start(&g, weights, noise, p_max).map(rated) {
        if zf.3 > start.3 {
            start = zf;
        }
    }
    let (mut z, mut gains, mut sinr, mut rate) = start;
    let mut history = vec![rate];
    let mut best = (z.clone(), rate);
    let mut converged = false;
    for _ in 0..opts.max_iter {
        let mut y2 = vec![0.0; k];
        let mut a = vec![Complex64::new(0.0, 0.0); k];
        for i in 0..k {
            let den: f64 = (0..k).map(|j| gains[(i, j)].norm_sqr()).sum::<f64>() + noise[i];
            let gain = (weights[i] * (1.0 + sinr[i])).sqrt();
            let y = gains[(i, i)] * (gain / den);
            y2[i] = y.norm_sqr();
            a[i] = y * gain;
        }
        z = update(&g, &y2, &a, p_max);
        gains = &g * &z;
        sinr = sinr_from_gains(&gains, noise);
        let prev = rate;
        rate = weighted_rate(&sinr, weights);
        history.push(rate);
        if rate >= best.1 {
            best = (z.clone(), rate);
        }
        if (rate - prev).abs() <= opts.tol * prev.abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }
    let precoder = h * best.0;
    let report = rates_for_precoder(h, weights, noise, &precoder)?;
    Ok(FpOutcome {
        precoder,
        history,
        report,
        converged,
    })
}

/// Fully digital precoder for `users` under total power `p_max`.
pub fn fully_digital_fp(users: &UserSet, p_max: f64, opts: &FpOptions) -> Result<FpOutcome> {
    fp_solve(&users.channel_matrix(), &users.weights(), &users.noise(), p_max, opts)
}
