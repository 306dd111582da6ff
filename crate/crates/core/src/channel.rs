//! Near-field (uniform spherical wave) steering vectors and LoS channels.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;

/// A point relative to the array center: range in meters, angle in radians
/// measured from the array broadside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarLocation {
    pub range: f64,
    pub angle: f64,
}

impl PolarLocation {
    pub fn new(range: f64, angle: f64) -> Result<Self> {
        if !(range.is_finite() && range > 0.0) {
            return Err(Error::InvalidLocation(format!("range must be positive, got {range}")));
        }
        if !(angle.is_finite() && angle.abs() <= FRAC_PI_2 + 1e-12) {
            return Err(Error::InvalidLocation(format!(
                "angle must lie in [-pi/2, pi/2], got {angle}"
            )));
        }
        Ok(Self { range, angle })
    }

    pub fn from_degrees(range: f64, degrees: f64) -> Result<Self> {
        Self::new(range, degrees.to_radians())
    }

    /// Location from the sine of the angle; `sin_theta` is clamped to [-1, 1].
    pub fn from_sine(range: f64, sin_theta: f64) -> Result<Self> {
        Self::new(range, sin_theta.clamp(-1.0, 1.0).asin())
    }

    pub fn sin(&self) -> f64 {
        self.angle.sin()
    }

    pub fn cos2(&self) -> f64 {
        let s = self.angle.sin();
        1.0 - s * s
    }
}

/// Which distance expression feeds the steering phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseModel {
    /// Exact Euclidean distance.
    #[default]
    Exact,
    /// Second-order (Fresnel) expansion of the distance.
    Fresnel,
}

/// Distance from an antenna at `y` (meters, on the y-axis) to `user`.
pub fn exact_distance(y: f64, user: PolarLocation) -> f64 {
    let r = user.range;
    (r * r - 2.0 * y * r * user.sin() + y * y).sqrt()
}

/// Fresnel approximation `r - y sinθ + y² cos²θ / (2r)`.
pub fn fresnel_distance(y: f64, user: PolarLocation) -> f64 {
    let r = user.range;
    r - y * user.sin() + y * y * user.cos2() / (2.0 * r)
}

pub fn distance(y: f64, user: PolarLocation, model: PhaseModel) -> f64 {
    match model {
        PhaseModel::Exact => exact_distance(y, user),
        PhaseModel::Fresnel => fresnel_distance(y, user),
    }
}

/// Unit-norm near-field steering vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    pub entries: DVector<Complex64>,
    pub model: PhaseModel,
}

impl SteeringVector {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `b(self)^H b(other)`.
    pub fn inner(&self, other: &SteeringVector) -> Complex64 {
        self.entries.dotc(&other.entries)
    }
}

/// Entries `exp(-j 2π d_q / λ) / √Q` for the given distances.
pub fn steering_from_distances(distances: &[f64], wavelength: f64) -> DVector<Complex64> {
    let norm = 1.0 / (distances.len() as f64).sqrt();
    let k = 2.0 * PI / wavelength;
    DVector::from_iterator(
        distances.len(),
        distances
            .iter()
            .map(|d| Complex64::from_polar(norm, -k * d.rem_euclid(wavelength))),
    )
}

pub fn steering_vector(
    geometry: &ArrayGeometry,
    user: PolarLocation,
    model: PhaseModel,
) -> SteeringVector {
    let distances: Vec<f64> = geometry
        .positions()
        .iter()
        .map(|&y| distance(y, user, model))
        .collect();
    SteeringVector {
        entries: steering_from_distances(&distances, geometry.wavelength()),
        model,
    }
}

/// LoS channel `h = √Q β b(r, θ)` with `β = √β0 / r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector {
    pub entries: DVector<Complex64>,
    pub gain: Complex64,
    pub location: PolarLocation,
}

impl ChannelVector {
    pub fn norm(&self) -> f64 {
        self.entries.norm()
    }
}

/// Builds the LoS channel with exact distances; `beta0` is the linear
/// reference gain at 1 m.
pub fn channel(geometry: &ArrayGeometry, user: PolarLocation, beta0: f64) -> ChannelVector {
    channel_with_model(geometry, user, beta0, PhaseModel::Exact)
}

pub fn channel_with_model(
    geometry: &ArrayGeometry,
    user: PolarLocation,
    beta0: f64,
    model: PhaseModel,
) -> ChannelVector {
    let b = steering_vector(geometry, user, model);
    let gain = Complex64::new(beta0.sqrt() / user.range, 0.0);
    let scale = gain * (geometry.antenna_count() as f64).sqrt();
    ChannelVector {
        entries: b.entries * scale,
        gain,
        location: user,
    }
}

/// Propagation region of a user relative to an array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Reactive,
    FresnelNearfield,
    Farfield,
}

pub fn classify_region(geometry: &ArrayGeometry, user: PolarLocation) -> Region {
    let m = geometry.metrics();
    if user.range < m.upd {
        Region::Reactive
    } else if user.range <= m.rayleigh {
        Region::FresnelNearfield
    } else {
        Region::Farfield
    }
}

/// Writes `index,re,im` rows.
pub fn write_vector_csv<W: Write>(writer: W, entries: &DVector<Complex64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["index", "re", "im"])?;
    for (i, z) in entries.iter().enumerate() {
        w.write_record([i.to_string(), z.re.to_string(), z.im.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
