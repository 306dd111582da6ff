//! Hybrid factorization `F_opt ≈ F_A F_D` by alternating optimization.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{phase_of, BeamformerPair};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AoOptions {
    pub max_iter: usize,
    /// Relative gap change that ends the iteration.
    pub tol: f64,
    /// Ridge on `F_A^H F_A`, relative to the antenna count.
    pub ridge: f64,
}

impl Default for AoOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            tol: 1e-6,
            ridge: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AoOutcome {
    pub pair: BeamformerPair,
    /// `‖F_opt − F_A F_D‖²_F` at the start and after every iteration.
    pub gap_history: Vec<f64>,
    pub converged: bool,
    /// Whether the final digital stage was scaled down to meet the budget.
    pub rescaled: bool,
}

fn least_squares(fa: &DMatrix<Complex64>, f_opt: &DMatrix<Complex64>, ridge: f64) -> Result<DMatrix<Complex64>> {
    let k = fa.ncols();
    let gram = fa.ad_mul(fa) + DMatrix::<Complex64>::identity(k, k) * Complex64::new(ridge * fa.nrows() as f64, 0.0);
    gram.lu().solve(&fa.ad_mul(f_opt)).ok_or(Error::SingularLeastSquares)
}

fn gap(f_opt: &DMatrix<Complex64>, fa: &DMatrix<Complex64>, fd: &DMatrix<Complex64>) -> f64 {
    (f_opt - fa * fd).norm_squared()
}

/// One pass of exact per-entry phase updates; never increases the gap.
fn coordinate_sweep(f_opt: &DMatrix<Complex64>, fa: &mut DMatrix<Complex64>, fd: &DMatrix<Complex64>) {
    let mut resid = f_opt - &*fa * fd;
    let row_norm2: Vec<f64> = (0..fd.nrows()).map(|k| fd.row(k).norm_squared()).collect();
    for q in 0..fa.nrows() {
        for k in 0..fa.ncols() {
            if row_norm2[k] == 0.0 {
                continue;
            }
            let d = fd.row(k);
            let old = fa[(q, k)];
            // r = resid_q + old·d_k; best unit scalar is the phase of r·d_k^H.
            let corr: Complex64 = (0..d.len()).map(|j| resid[(q, j)] * d[j].conj()).sum::<Complex64>() + old * row_norm2[k];
            if corr.norm() == 0.0 {
                continue;
            }
            let new = corr / corr.norm();
            for j in 0..d.len() {
                resid[(q, j)] += (old - new) * d[j];
            }
            fa[(q, k)] = new;
        }
    }
}

/// Phase-then-least-squares starting point of the alternation.
pub fn one_shot_factorization(f_opt: &DMatrix<Complex64>, ridge: f64) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    let fa = phase_of(f_opt);
    let fd = least_squares(&fa, f_opt, ridge)?;
    Ok((fa, fd))
}

/// Alternates the analog phase update and the digital least-squares update.
///
/// The analog step takes the phase projection of `F_opt F_D^H` when it does
/// not increase the gap, followed by one coordinate sweep, so the gap is
/// non-increasing across iterations.
pub fn lsa_hybrid_ao(f_opt: &DMatrix<Complex64>, p_max: f64, opts: &AoOptions) -> Result<AoOutcome> {
    if f_opt.ncols() == 0 || f_opt.ncols() > f_opt.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "F_opt must be Q x K with 1 <= K <= Q, got {}x{}",
            f_opt.nrows(),
            f_opt.ncols()
        )));
    }
    let (mut fa, mut fd) = one_shot_factorization(f_opt, opts.ridge)?;
    let mut current = gap(f_opt, &fa, &fd);
    let mut gap_history = vec![current];
    let mut converged = false;
    for _ in 0..opts.max_iter {
        let candidate = phase_of(&(f_opt * fd.adjoint()));
        if gap(f_opt, &candidate, &fd) <= current {
            fa = candidate;
        }
        coordinate_sweep(f_opt, &mut fa, &fd);
        fd = least_squares(&fa, f_opt, opts.ridge)?;
        let next = gap(f_opt, &fa, &fd);
        gap_history.push(next);
        let change = (current - next).abs();
        current = next;
        if change <= opts.tol * gap_history[gap_history.len() - 2].max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }
    let power = (&fa * &fd).norm_squared();
    let rescaled = power > p_max;
    if rescaled {
        fd *= Complex64::new((p_max / power).sqrt(), 0.0);
    }
    Ok(AoOutcome {
        pair: BeamformerPair {
            analog: fa,
            digital: fd,
            p_max,
        },
        gap_history,
        converged,
        rescaled,
    })
}

#[cfg(test)]
mod tests {
    use super::super::test_support::random_matrix;
    use super::super::{power_check, FpOptions};
    use super::*;

    #[test]
    fn diagonal_digital_stage_is_recovered() {
        let fa = phase_of(&random_matrix(12, 3, 1));
        let d = [Complex64::new(0.4, 0.1), Complex64::new(-0.2, 0.3), Complex64::new(0.1, -0.5)];
        let fd = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&d));
        let f_opt = &fa * &fd;
        let out = lsa_hybrid_ao(&f_opt, 1e6, &AoOptions::default()).unwrap();
        let last = *out.gap_history.last().unwrap();
        assert!(last < 1e-20 * f_opt.norm_squared().max(1.0), "gap {last}");
    }

    #[test]
    fn iterations_shrink_the_gap() {
        let fa = phase_of(&random_matrix(12, 3, 1));
        let f_opt = &fa * random_matrix(3, 3, 2);
        let out = lsa_hybrid_ao(&f_opt, 1e6, &AoOptions::default()).unwrap();
        assert!(*out.gap_history.last().unwrap() < 0.5 * out.gap_history[0]);
    }

    #[test]
    fn gap_non_increasing_and_not_worse_than_start() {
        for seed in 0..10 {
            let f_opt = random_matrix(20, 4, 100 + seed);
            let out = lsa_hybrid_ao(&f_opt, 0.5, &AoOptions::default()).unwrap();
            for w in out.gap_history.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-9));
            }
            let (fa0, fd0) = one_shot_factorization(&f_opt, 1e-12).unwrap();
            assert!(*out.gap_history.last().unwrap() <= gap(&f_opt, &fa0, &fd0) * (1.0 + 1e-12));
            assert!(out.pair.modulus_error() < 1e-12);
            assert!(power_check(&out.pair).is_ok());
        }
    }

    #[test]
    fn constant_modulus_single_column() {
        let phases = phase_of(&random_matrix(9, 1, 5));
        let f_opt = &phases * Complex64::new(0.3, 0.0);
        let out = lsa_hybrid_ao(&f_opt, 1.0, &AoOptions::default()).unwrap();
        assert!(out.gap_history[0] < 1e-20);
        assert!(!out.rescaled);
        let _ = FpOptions::default();
    }

    #[test]
    fn rescales_when_over_budget() {
        let f_opt = random_matrix(10, 2, 7) * Complex64::new(10.0, 0.0);
        let out = lsa_hybrid_ao(&f_opt, 1.0, &AoOptions::default()).unwrap();
        assert!(out.rescaled);
        assert!((out.pair.power() - 1.0).abs() < 1e-9);
    }
}
