//! Unit conversions and physical constants.
//!
//! Every dB/dBm conversion in the crate goes through this module.

/// Propagation speed used for frequency to wavelength conversion (m/s).
///
/// The rounded value keeps 30 GHz at exactly 1 cm, which is what the
/// reference Rayleigh distances (800 m, 50 m) are quoted against.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Half-power magnitude threshold used by the range-domain beam-depth
/// closed forms.
pub const PHI_3DB: f64 = 1.6;

pub fn wavelength_from_frequency(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    linear_to_db(watts) + 30.0
}

/// Free-space reference gain at 1 m, `(λ / 4π)^2`.
pub fn free_space_reference_gain(wavelength: f64) -> f64 {
    (wavelength / (4.0 * std::f64::consts::PI)).powi(2)
}
