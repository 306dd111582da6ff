use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{ScenarioConfig, UserDistribution};
use crate::beamforming::{User, UserSet};
use crate::channel::{channel, PolarLocation};
use crate::error::Result;
use crate::geometry::ArrayGeometry;

/// Generator for trial `trial`: the seed selects the key, the trial
/// index selects an independent stream.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// User positions of one trial; shared by every array of that trial.
pub fn generate_locations(config: &ScenarioConfig, trial: u64) -> Result<Vec<PolarLocation>> {
    let mut rng = trial_rng(config.seed, trial);
    let (r_lo, r_hi) = config.distribution.range_m();
    (0..config.users)
        .map(|_| {
            let r = rng.random_range(r_lo..=r_hi);
            match &config.distribution {
                UserDistribution::Region { angle_deg: (a, b), .. } => {
                    PolarLocation::from_degrees(r, rng.random_range(*a..=*b))
                }
                UserDistribution::SameAngle { angle_deg, .. } => PolarLocation::from_degrees(r, *angle_deg),
                UserDistribution::GratingAngles { sin_theta, .. } => {
                    PolarLocation::from_sine(r, sin_theta[rng.random_range(0..sin_theta.len())])
                }
            }
        })
        .collect()
}

pub fn users_for(config: &ScenarioConfig, geometry: &ArrayGeometry, locations: &[PolarLocation]) -> Result<UserSet> {
    let beta0 = config.beta0();
    let noise = config.noise_watts();
    let weights = config.weight_vector();
    UserSet::new(
        locations
            .iter()
            .zip(weights)
            .map(|(&loc, weight)| User {
                channel: channel(geometry, loc, beta0),
                weight,
                noise_power: noise,
            })
            .collect(),
    )
}

/// Users of trial `trial` as seen by `geometry`.
pub fn generate_users(config: &ScenarioConfig, geometry: &ArrayGeometry, trial: u64) -> Result<UserSet> {
    users_for(config, geometry, &generate_locations(config, trial)?)
}
