//! Sum-rate evaluation and precoder designs.

mod ao;
mod fp;
mod two_phase;

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelVector;
use crate::error::{Error, Result};

pub use ao::{lsa_hybrid_ao, one_shot_factorization, AoOptions, AoOutcome};
pub use fp::{fp_solve, fully_digital_fp, FpOptions, FpOutcome};
pub use two_phase::{eca_hybrid_two_phase, mrt_analog, TwoPhaseOutcome};

/// Relative slack allowed on the transmit-power constraint.
pub const POWER_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct User {
    pub channel: ChannelVector,
    pub weight: f64,
    pub noise_power: f64,
}

/// Users served together; all channels share the same antenna count.
#[derive(Debug, Clone, PartialEq)]
pub struct UserSet {
    users: Vec<User>,
}

impl UserSet {
    pub fn new(users: Vec<User>) -> Result<Self> {
        let Some(first) = users.first() else {
            return Err(Error::InvalidParameter("a user set needs at least one user".into()));
        };
        let q = first.channel.entries.len();
        for (k, u) in users.iter().enumerate() {
            if u.channel.entries.len() != q {
                return Err(Error::DimensionMismatch(format!(
                    "user {k} has {} antennas, expected {q}",
                    u.channel.entries.len()
                )));
            }
            if !(u.weight.is_finite() && u.weight >= 0.0) {
                return Err(Error::InvalidParameter(format!("user {k} weight {} is invalid", u.weight)));
            }
            if !(u.noise_power.is_finite() && u.noise_power > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "user {k} noise power {} must be positive",
                    u.noise_power
                )));
            }
        }
        Ok(Self { users })
    }

    pub fn users(&self) -> &[User] {
        &self.users
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn antenna_count(&self) -> usize {
        self.users[0].channel.entries.len()
    }

    /// `Q × K` matrix whose columns are the user channels.
    pub fn channel_matrix(&self) -> DMatrix<Complex64> {
        let cols: Vec<_> = self.users.iter().map(|u| u.channel.entries.clone()).collect();
        DMatrix::from_columns(&cols)
    }

    pub fn weights(&self) -> Vec<f64> {
        self.users.iter().map(|u| u.weight).collect()
    }

    pub fn noise(&self) -> Vec<f64> {
        self.users.iter().map(|u| u.noise_power).collect()
    }

    /// Same users with every channel multiplied by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Self {
        let users = self
            .users
            .iter()
            .map(|u| {
                let mut u = u.clone();
                u.channel.entries *= factor;
                u.channel.gain *= factor;
                u
            })
            .collect();
        Self { users }
    }
}

/// Analog (phase-shifter) and digital stages of a hybrid precoder.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerPair {
    pub analog: DMatrix<Complex64>,
    pub digital: DMatrix<Complex64>,
    pub p_max: f64,
}

impl BeamformerPair {
    pub fn precoder(&self) -> DMatrix<Complex64> {
        &self.analog * &self.digital
    }

    pub fn power(&self) -> f64 {
        self.precoder().norm_squared()
    }

    /// Largest deviation of an analog entry from unit modulus.
    pub fn modulus_error(&self) -> f64 {
        self.analog
            .iter()
            .map(|z| (z.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub sinr: Vec<f64>,
    pub rate: Vec<f64>,
    pub weighted_sum_rate: f64,
}

/// SINR and `log2(1 + SINR)` per user for a full `Q × K` precoder.
pub fn rates_for_precoder(
    channels: &DMatrix<Complex64>,
    weights: &[f64],
    noise: &[f64],
    precoder: &DMatrix<Complex64>,
) -> Result<RateReport> {
    let k = channels.ncols();
    if precoder.nrows() != channels.nrows() || precoder.ncols() != k || weights.len() != k || noise.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "channels {}x{}, precoder {}x{}, {} weights, {} noise powers",
            channels.nrows(),
            k,
            precoder.nrows(),
            precoder.ncols(),
            weights.len(),
            noise.len()
        )));
    }
    let a = channels.ad_mul(precoder);
    let mut sinr = Vec::with_capacity(k);
    for i in 0..k {
        let signal = a[(i, i)].norm_sqr();
        let interference: f64 = (0..k).filter(|&j| j != i).map(|j| a[(i, j)].norm_sqr()).sum();
        sinr.push(signal / (interference + noise[i]));
    }
    let rate: Vec<f64> = sinr.iter().map(|s| (1.0 + s).log2()).collect();
    let weighted_sum_rate = rate.iter().zip(weights).map(|(r, w)| r * w).sum();
    Ok(RateReport {
        sinr,
        rate,
        weighted_sum_rate,
    })
}

pub fn sinr_and_rate(users: &UserSet, pair: &BeamformerPair) -> Result<RateReport> {
    if pair.analog.ncols() != pair.digital.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "analog has {} columns but digital has {} rows",
            pair.analog.ncols(),
            pair.digital.nrows()
        )));
    }
    rates_for_precoder(&users.channel_matrix(), &users.weights(), &users.noise(), &pair.precoder())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PowerCheck {
    Ok { power: f64 },
    /// `excess` is `power / p_max − 1`.
    Violation { power: f64, excess: f64 },
}

impl PowerCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, PowerCheck::Ok { .. })
    }
}

pub fn power_check(pair: &BeamformerPair) -> PowerCheck {
    let power = pair.power();
    if power <= pair.p_max * (1.0 + POWER_SLACK) {
        PowerCheck::Ok { power }
    } else {
        PowerCheck::Violation {
            power,
            excess: power / pair.p_max - 1.0,
        }
    }
}

/// Writes `row,col,re,im` for every entry.
pub fn write_matrix_csv<W: Write>(writer: W, m: &DMatrix<Complex64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["row", "col", "re", "im"])?;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            w.write_record([i.to_string(), j.to_string(), z.re.to_string(), z.im.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Unit-modulus matrix with the phases of `m`; zero entries map to 1.
pub(crate) fn phase_of(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    m.map(|z| {
        let r = z.norm();
        if r > 0.0 {
            z / r
        } else {
            Complex64::new(1.0, 0.0)
        }
    })
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use crate::channel::{channel, PolarLocation};
    use crate::geometry::{build_array, ArrayKind};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn users_at(kind: ArrayKind, points: &[(f64, f64)], noise: f64) -> UserSet {
        let g = build_array(kind, 0.01).unwrap();
        let beta0 = 10f64.powf(-6.2);
        let users = points
            .iter()
            .map(|&(r, s)| User {
                channel: channel(&g, PolarLocation::from_sine(r, s).unwrap(), beta0),
                weight: 1.0,
                noise_power: noise,
            })
            .collect();
        UserSet::new(users).unwrap()
    }

    pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(rows, cols, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }
}
