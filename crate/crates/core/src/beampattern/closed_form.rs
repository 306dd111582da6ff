//! Fresnel-approximation closed forms for LSA and ECA beam patterns.
//!
//! Every uniform (sub)array with `Qs` elements at spacing `Us·d0` reduces to
//! one complex term `T(Qs, Us)`; the ECA pattern is the signed sum of the
//! terms of its two subarrays and of their shared elements.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::special::{dirichlet_sinc, f_kernel, g_kernel};
use crate::channel::PolarLocation;
use crate::geometry::{ArrayGeometry, ArrayKind};

/// Band below which the quadratic phase across the aperture is ignored.
pub const PHI_ZERO_TOL: f64 = 1e-6;
/// Band for matching `Δ` to a grating angle or to zero.
pub const DELTA_TOL: f64 = 1e-9;

/// Spatial angle difference and ring difference between focus and
/// observation point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleRingCoords {
    pub delta: f64,
    pub phi: f64,
}

pub fn delta_phi(focus: PolarLocation, obs: PolarLocation) -> AngleRingCoords {
    AngleRingCoords {
        delta: obs.sin() - focus.sin(),
        phi: focus.cos2() / focus.range - obs.cos2() / obs.range,
    }
}

/// Which closed-form branch a point falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternCase {
    /// `Φ = 0`: Dirichlet form.
    UserRing,
    /// `θ = θ0`: F form.
    SameAngle,
    /// `Δ` on a grating angle of at least one (sub)array.
    Grating,
    /// Generic point: G form.
    General,
}

fn phi_is_zero(phi: f64, aperture: f64, wavelength: f64) -> bool {
    phi.abs() * aperture * aperture / (4.0 * wavelength) < PHI_ZERO_TOL
}

fn grating_offset(delta: f64, spacing: usize) -> f64 {
    let us = spacing as f64;
    let u = (us * delta / 2.0).round();
    delta - 2.0 * u / us
}

/// `Σ_q exp(jπ(q Us Δ + q² Us² d0 Φ / 2))` over `count` centered elements.
///
/// The sum is 2-periodic in `Us·Δ`, so `Δ` is first folded onto the nearest
/// grating angle before the integral approximation is applied.
fn subarray_term(count: usize, spacing: usize, d0: f64, c: AngleRingCoords, ring: bool) -> Complex64 {
    if ring {
        return Complex64::new(dirichlet_sinc(count as u64, spacing as f64 * c.delta), 0.0);
    }
    let delta = grating_offset(c.delta, spacing);
    let scale = (d0 * c.phi.abs()).sqrt();
    let beta2 = (count * spacing) as f64 / 2.0 * scale;
    // Φ < 0 is the conjugate of the mirrored Φ > 0 problem.
    let beta1 = if c.phi > 0.0 { delta / scale } else { -delta / scale };
    let chirp = Complex64::from_polar(1.0, -PI * delta * delta / (2.0 * d0 * c.phi.abs()));
    let t = chirp * g_kernel(beta1, beta2) * count as f64;
    if c.phi > 0.0 {
        t
    } else {
        t.conj()
    }
}

fn classify(c: AngleRingCoords, aperture: f64, wavelength: f64, spacings: &[usize]) -> PatternCase {
    if phi_is_zero(c.phi, aperture, wavelength) {
        PatternCase::UserRing
    } else if c.delta.abs() < DELTA_TOL {
        PatternCase::SameAngle
    } else if spacings
        .iter()
        .any(|&s| s > 1 && grating_offset(c.delta, s).abs() < DELTA_TOL)
    {
        PatternCase::Grating
    } else {
        PatternCase::General
    }
}

fn lsa_aperture(q: usize, u: usize, d0: f64) -> f64 {
    (q.saturating_sub(1) * u) as f64 * d0
}

fn eca_aperture(m: usize, n: usize, l: usize, d0: f64) -> f64 {
    let a1 = (l * m - 2) * n;
    let a2 = (l * n - 2) * m;
    a1.max(a2) as f64 * d0
}

/// Branch selected by [`lsa_closed_form`].
pub fn lsa_case(q: usize, u: usize, wavelength: f64, focus: PolarLocation, obs: PolarLocation) -> PatternCase {
    let d0 = wavelength / 2.0;
    classify(delta_phi(focus, obs), lsa_aperture(q, u, d0), wavelength, &[u])
}

/// Closed-form LSA (and, with `u = 1`, ULA) beam pattern.
pub fn lsa_closed_form(q: usize, u: usize, wavelength: f64, focus: PolarLocation, obs: PolarLocation) -> f64 {
    let d0 = wavelength / 2.0;
    let c = delta_phi(focus, obs);
    let ring = lsa_case(q, u, wavelength, focus, obs) == PatternCase::UserRing;
    subarray_term(q, u, d0, c, ring).norm() / q as f64
}

/// Branch selected by [`eca_closed_form`].
pub fn eca_case(
    m: usize,
    n: usize,
    l: usize,
    wavelength: f64,
    focus: PolarLocation,
    obs: PolarLocation,
) -> PatternCase {
    let d0 = wavelength / 2.0;
    classify(delta_phi(focus, obs), eca_aperture(m, n, l, d0), wavelength, &[n, m, m * n])
}

/// The three complex terms of the ECA pattern: subarray 1, subarray 2 and
/// the elements they share, each unnormalized.
pub fn eca_terms(
    m: usize,
    n: usize,
    l: usize,
    wavelength: f64,
    focus: PolarLocation,
    obs: PolarLocation,
) -> [Complex64; 3] {
    let d0 = wavelength / 2.0;
    let c = delta_phi(focus, obs);
    let ring = eca_case(m, n, l, wavelength, focus, obs) == PatternCase::UserRing;
    [
        subarray_term(l * m - 1, n, d0, c, ring),
        subarray_term(l * n - 1, m, d0, c, ring),
        subarray_term(l - 1, m * n, d0, c, ring),
    ]
}

/// Closed-form ECA beam pattern.
pub fn eca_closed_form(
    m: usize,
    n: usize,
    l: usize,
    wavelength: f64,
    focus: PolarLocation,
    obs: PolarLocation,
) -> f64 {
    let q = l * (m + n - 1) - 1;
    let [t1, t2, t3] = eca_terms(m, n, l, wavelength, focus, obs);
    (t1 + t2 - t3).norm() / q as f64
}

/// `ρ1 = (LMN − M)/(LMN − N)` and `ρ2 = (LM − M)/(LM − 1)`.
pub fn eca_rho(m: usize, n: usize, l: usize) -> (f64, f64) {
    let (m, n, l) = (m as f64, n as f64, l as f64);
    ((l * m * n - m) / (l * m * n - n), (l * m - m) / (l * m - 1.0))
}

/// `γ2 = (LM − 1) N / 2 · √(d0 |Φ|)`.
pub fn eca_gamma2(m: usize, n: usize, l: usize, wavelength: f64, phi: f64) -> f64 {
    ((l * m - 1) * n) as f64 / 2.0 * (wavelength / 2.0 * phi.abs()).sqrt()
}

/// On-axis ECA pattern from the three F terms.
pub fn eca_on_axis_full(m: usize, n: usize, l: usize, gamma2: f64) -> f64 {
    let q = (l * (m + n - 1) - 1) as f64;
    let (rho1, rho2) = eca_rho(m, n, l);
    let z = f_kernel(gamma2) * (l * m - 1) as f64 + f_kernel(rho1 * gamma2) * (l * n - 1) as f64
        - f_kernel(rho2 * gamma2) * (l - 1) as f64;
    z.norm() / q
}

/// Single-term approximation `|F(γ2)|` of [`eca_on_axis_full`].
pub fn eca_on_axis_simplified(gamma2: f64) -> f64 {
    f_kernel(gamma2).norm()
}

/// Closed-form pattern for any supported geometry.
pub fn closed_form(geometry: &ArrayGeometry, focus: PolarLocation, obs: PolarLocation) -> f64 {
    let lam = geometry.wavelength();
    match geometry.kind() {
        ArrayKind::Ula { q } => lsa_closed_form(q, 1, lam, focus, obs),
        ArrayKind::Lsa { q, u } => lsa_closed_form(q, u, lam, focus, obs),
        ArrayKind::Eca { m, n, l } => eca_closed_form(m, n, l, lam, focus, obs),
    }
}

/// Branch for any supported geometry.
pub fn closed_form_case(geometry: &ArrayGeometry, focus: PolarLocation, obs: PolarLocation) -> PatternCase {
    let lam = geometry.wavelength();
    match geometry.kind() {
        ArrayKind::Ula { q } => lsa_case(q, 1, lam, focus, obs),
        ArrayKind::Lsa { q, u } => lsa_case(q, u, lam, focus, obs),
        ArrayKind::Eca { m, n, l } => eca_case(m, n, l, lam, focus, obs),
    }
}

/// Sine-space null-to-null main-lobe width predicted for `geometry`.
pub fn main_lobe_width(kind: ArrayKind) -> f64 {
    match kind {
        ArrayKind::Ula { q } => 4.0 / q as f64,
        ArrayKind::Lsa { q, u } => 4.0 / (q * u) as f64,
        ArrayKind::Eca { m, n, l } => 4.0 / ((l * m - 1) * n) as f64,
    }
}
