//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// `(C(x), S(x))` by tanh-sinh quadrature, split at the zeros `√n` of the
/// integrands so every piece is a smooth half-oscillation.
pub fn fresnel_quadrature(x: f64) -> (f64, f64) {
    let ax = x.abs();
    let mut knots = vec![0.0];
    let mut n = 1.0f64;
    while n.sqrt() < ax {
        knots.push(n.sqrt());
        n += 1.0;
    }
    knots.push(ax);
    let (mut c, mut s) = (0.0, 0.0);
    for w in knots.windows(2) {
        c += quadrature::integrate(|t| (PI * t * t / 2.0).cos(), w[0], w[1], 1e-15).integral;
        s += quadrature::integrate(|t| (PI * t * t / 2.0).sin(), w[0], w[1], 1e-15).integral;
    }
    (c.copysign(x), s.copysign(x))
}

/// Lattice positions in units of `d0`, written out from the array
/// definitions without going through the library.
pub fn lattice_ula(q: usize) -> Vec<f64> {
    let c = (q as f64 - 1.0) / 2.0;
    (0..q).map(|i| i as f64 - c).collect()
}

pub fn lattice_lsa(q: usize, u: usize) -> Vec<f64> {
    lattice_ula(q).into_iter().map(|p| p * u as f64).collect()
}

pub fn lattice_eca(m: usize, n: usize, l: usize) -> Vec<f64> {
    let mut pts: Vec<usize> = (0..l * m - 1).map(|i| i * n).collect();
    pts.extend((0..l * n - 1).map(|i| i * m));
    pts.sort_unstable();
    pts.dedup();
    let c = *pts.last().unwrap() as f64 / 2.0;
    pts.into_iter().map(|p| p as f64 - c).collect()
}

fn fresnel_distance(y: f64, r: f64, s: f64) -> f64 {
    r - y * s + y * y * (1.0 - s * s) / (2.0 * r)
}

/// `|b(focus)^H b(obs)|` with Fresnel phases, summed term by term.
pub fn fresnel_pattern(lattice: &[f64], wavelength: f64, focus: (f64, f64), obs: (f64, f64)) -> f64 {
    let d0 = wavelength / 2.0;
    let k = 2.0 * PI / wavelength;
    let sum: Complex64 = lattice
        .iter()
        .map(|&p| {
            let y = p * d0;
            let phase = k * (fresnel_distance(y, focus.0, focus.1) - fresnel_distance(y, obs.0, obs.1));
            Complex64::from_polar(1.0, phase)
        })
        .sum();
    sum.norm() / lattice.len() as f64
}

/// Per-user SINR estimated from simulated received samples
/// `y = H^H V s + n` with unit-variance symbols.
pub fn monte_carlo_sinr(h: &DMatrix<Complex64>, v: &DMatrix<Complex64>, noise: &[f64], samples: usize, seed: u64) -> Vec<f64> {
    let k = h.ncols();
    let gains = h.ad_mul(v);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cn = |var: f64| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * (var / 2.0).sqrt()
    };
    let mut signal = vec![0.0; k];
    let mut rest = vec![0.0; k];
    for _ in 0..samples {
        let s: Vec<Complex64> = (0..k).map(|_| cn(1.0)).collect();
        for i in 0..k {
            let wanted = gains[(i, i)] * s[i];
            let mut y = cn(noise[i]);
            for j in 0..k {
                y += gains[(i, j)] * s[j];
            }
            signal[i] += wanted.norm_sqr();
            rest[i] += (y - wanted).norm_sqr();
        }
    }
    signal.iter().zip(&rest).map(|(a, b)| a / b).collect()
}

/// Sum of `log2(1 + SINR)` for a precoder, computed from scratch.
pub fn sum_rate(h: &DMatrix<Complex64>, v: &DMatrix<Complex64>, noise: &[f64]) -> f64 {
    let k = h.ncols();
    (0..k)
        .map(|i| {
            let hi = h.column(i);
            let mut sig = 0.0;
            let mut other = noise[i];
            for j in 0..k {
                let g = hi.dotc(&v.column(j)).norm_sqr();
                if i == j {
                    sig = g;
                } else {
                    other += g;
                }
            }
            (1.0 + sig / other).log2()
        })
        .sum()
}

/// Water-filling of `p` over parallel channels with gains `g`.
pub fn water_fill(g: &[f64], p: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..g.len()).collect();
    order.sort_by(|a, b| g[*b].partial_cmp(&g[*a]).unwrap());
    let mut out = vec![0.0; g.len()];
    for used in (1..=g.len()).rev() {
        let idx = &order[..used];
        let mu = (p + idx.iter().map(|&i| 1.0 / g[i]).sum::<f64>()) / used as f64;
        if idx.iter().all(|&i| mu - 1.0 / g[i] >= 0.0) {
            for &i in idx {
                out[i] = mu - 1.0 / g[i];
            }
            break;
        }
    }
    out
}

/// Zero-forcing with water-filled stream powers.
pub fn zf_baseline(h: &DMatrix<Complex64>, noise: &[f64], p: f64) -> DMatrix<Complex64> {
    let k = h.ncols();
    let dirs = h * h.ad_mul(h).try_inverse().unwrap();
    let norms: Vec<f64> = (0..k).map(|j| dirs.column(j).norm()).collect();
    // A unit-norm column j reaches its user with amplitude 1/‖dir_j‖.
    let gains: Vec<f64> = (0..k).map(|j| 1.0 / (norms[j] * norms[j] * noise[j])).collect();
    let powers = water_fill(&gains, p);
    DMatrix::from_fn(h.nrows(), k, |i, j| dirs[(i, j)] / norms[j] * powers[j].sqrt())
}

/// Matched filter with the best equal split or single-user allocation.
pub fn mrt_baseline(h: &DMatrix<Complex64>, noise: &[f64], p: f64) -> DMatrix<Complex64> {
    let k = h.ncols();
    let dirs = DMatrix::from_fn(h.nrows(), k, |i, j| h[(i, j)] / h.column(j).norm());
    let mut best: Option<(f64, DMatrix<Complex64>)> = None;
    let mut candidates: Vec<Vec<f64>> = vec![vec![p / k as f64; k]];
    for j in 0..k {
        let mut v = vec![0.0; k];
        v[j] = p;
        candidates.push(v);
    }
    for powers in candidates {
        let v = DMatrix::from_fn(h.nrows(), k, |i, j| dirs[(i, j)] * powers[j].sqrt());
        let r = sum_rate(h, &v, noise);
        if best.as_ref().is_none_or(|(b, _)| r > *b) {
            best = Some((r, v));
        }
    }
    best.unwrap().1
}
