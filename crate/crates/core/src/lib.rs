//! Near-field beam-pattern analysis and hybrid beamforming for sparse arrays.
//!
//! The crate covers three array families on a line (half-wavelength ULA,
//! linear sparse array, extended coprime array) and provides:
//!
//! - array construction and scalar metrics ([`geometry`]),
//! - exact and Fresnel-approximated near-field steering vectors and LoS
//!   channels ([`channel`]),
//! - brute-force and closed-form beam patterns, including the Fresnel
//!   integral kernels they are built from ([`beampattern`]),
//! - lobe predictors and a numerical lobe-measurement oracle ([`lobes`]),
//! - sum-rate evaluation, fractional-programming precoding and the two
//!   hybrid designs ([`beamforming`]),
//! - seeded Monte-Carlo scenario runners and CSV/JSON exporters ([`sim`]).

pub mod beamforming;
pub mod beampattern;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod lobes;
pub mod sim;
pub mod units;

pub use num_complex::Complex64;

pub use beamforming::{BeamformerPair, User, UserSet};
pub use beampattern::{AngleRingCoords, BeamPatternGrid, FresnelPair, GridSpec, PatternMode};
pub use channel::{ChannelVector, PhaseModel, PolarLocation, Region, SteeringVector};
pub use error::{Error, Result};
pub use geometry::{ArrayGeometry, ArrayKind, ArrayMetrics};
pub use lobes::{LobeKind, LobePrediction, LobeReport};
