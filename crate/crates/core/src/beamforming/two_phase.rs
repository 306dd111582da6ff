//! Two-phase hybrid design: MRT analog stage, FP digital stage.

use nalgebra::{Cholesky, DMatrix};
use num_complex::Complex64;

use super::fp::{fp_solve, FpOptions, FpOutcome};
use super::{phase_of, BeamformerPair, UserSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhaseOutcome {
    pub pair: BeamformerPair,
    /// FP run on the reduced `K × K` problem.
    pub fp: FpOutcome,
}

/// Unit-modulus analog stage whose column `k` matches the phases of `h_k`.
pub fn mrt_analog(users: &UserSet) -> DMatrix<Complex64> {
    phase_of(&users.channel_matrix())
}

/// MRT analog beams followed by FP on the effective channels.
///
/// The power of `F_A F_D` is `‖L^H F_D‖²` with `L L^H = F_A^H F_A`, so FP
/// runs on the whitened channels `L^{-1} F_A^H h_k` with a plain norm
/// budget and the result is mapped back through `L^{-H}`.
pub fn eca_hybrid_two_phase(users: &UserSet, p_max: f64, opts: &FpOptions) -> Result<TwoPhaseOutcome> {
    let fa = mrt_analog(users);
    let k = fa.ncols();
    let h_eff = fa.ad_mul(&users.channel_matrix());
    let gram = fa.ad_mul(&fa);
    let mut ridge = 1e-12 * fa.nrows() as f64;
    let chol = loop {
        let m = &gram + DMatrix::<Complex64>::identity(k, k) * Complex64::new(ridge, 0.0);
        if let Some(c) = Cholesky::new(m) {
            break c;
        }
        ridge *= 10.0;
        if ridge > fa.nrows() as f64 {
            return Err(Error::SingularLeastSquares);
        }
    };
    let l = chol.l();
    let h_white = l.solve_lower_triangular(&h_eff).ok_or(Error::SingularLeastSquares)?;
    let fp = fp_solve(&h_white, &users.weights(), &users.noise(), p_max, opts)?;
    let fd = l
        .adjoint()
        .solve_upper_triangular(&fp.precoder)
        .ok_or(Error::SingularLeastSquares)?;
    Ok(TwoPhaseOutcome {
        pair: BeamformerPair {
            analog: fa,
            digital: fd,
            p_max,
        },
        fp,
    })
}
