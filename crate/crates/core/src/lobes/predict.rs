use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channel::PolarLocation;
use crate::error::{Error, Result};
use crate::geometry::{build_array, ArrayGeometry, ArrayKind};
use crate::units::PHI_3DB;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum LobeKind {
    Main,
    LsaGrating(i64),
    EcaType1(i64),
    EcaType2(i64),
    EcaType3(i64),
}

impl fmt::Display for LobeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LobeKind::Main => write!(f, "main"),
            LobeKind::LsaGrating(u) => write!(f, "lsa_grating({u})"),
            LobeKind::EcaType1(n) => write!(f, "eca_type1({n})"),
            LobeKind::EcaType2(m) => write!(f, "eca_type2({m})"),
            LobeKind::EcaType3(l) => write!(f, "eca_type3({l})"),
        }
    }
}

/// Closed-form description of one lobe.
///
/// `width` is the null-to-null width in sine space; `depth` is in meters and
/// may be infinite. `in_region` tells whether the lobe's crossing of the
/// user ring lies between the uniform-power distance and the Rayleigh
/// distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LobePrediction {
    pub kind: LobeKind,
    pub sin_theta: f64,
    pub width: f64,
    pub depth: f64,
    pub height: f64,
    pub in_region: bool,
}

/// Range at which the user ring through `focus` crosses `sin_theta`.
pub fn ring_range(focus: PolarLocation, sin_theta: f64) -> f64 {
    focus.range * (1.0 - sin_theta * sin_theta) / focus.cos2()
}

/// `2 r0² r_lobe / (r_main² − r0²)`, or infinity once `r0 ≥ r_main`.
fn depth_formula(r0: f64, r_main: f64, r_lobe: f64) -> f64 {
    if r0 >= r_main {
        f64::INFINITY
    } else {
        2.0 * r0 * r0 * r_lobe / (r_main * r_main - r0 * r0)
    }
}

/// Focusing limit `aperture_cells² d0 cos²θ / (4 φ²)`.
fn focus_limit(aperture_cells: f64, d0: f64, cos2: f64) -> f64 {
    aperture_cells * aperture_cells * d0 * cos2 / (4.0 * PHI_3DB * PHI_3DB)
}

/// Ratio of a grating-lobe depth to the main-lobe depth.
pub fn depth_ratio(theta0: f64, delta: f64) -> f64 {
    let s0 = theta0.sin();
    1.0 - delta * (delta + 2.0 * s0) / (1.0 - s0 * s0)
}

struct Region {
    lo: f64,
    hi: f64,
}

impl Region {
    fn of(geometry: &ArrayGeometry) -> Self {
        let m = geometry.metrics();
        Self { lo: m.upd, hi: m.rayleigh }
    }

    fn contains(&self, r: f64) -> bool {
        (self.lo..=self.hi).contains(&r)
    }
}

/// LSA lobes; `u = 1` gives the ULA main lobe only.
pub fn lsa_lobes(q: usize, u: usize, wavelength: f64, focus: PolarLocation) -> Result<Vec<LobePrediction>> {
    let kind = if u == 1 { ArrayKind::Ula { q } } else { ArrayKind::Lsa { q, u } };
    let geometry = build_array(kind, wavelength)?;
    let region = Region::of(&geometry);
    let d0 = wavelength / 2.0;
    let s0 = focus.sin();
    let width = 4.0 / (q * u) as f64;
    let aperture_cells = (q * u) as f64;
    let r_main = focus_limit(aperture_cells, d0, focus.cos2());
    let mut lobes = vec![LobePrediction {
        kind: LobeKind::Main,
        sin_theta: s0,
        width,
        depth: depth_formula(focus.range, r_main, r_main),
        height: 1.0,
        in_region: region.contains(focus.range),
    }];
    let ui = u as i64;
    for k in (-(ui - 1)..=ui - 1).filter(|&k| k != 0) {
        let s = s0 + 2.0 * k as f64 / u as f64;
        if s.abs() > 1.0 {
            continue;
        }
        let r_lobe = focus_limit(aperture_cells, d0, 1.0 - s * s);
        lobes.push(LobePrediction {
            kind: LobeKind::LsaGrating(k),
            sin_theta: s,
            width,
            depth: depth_formula(focus.range, r_main, r_lobe),
            height: 1.0,
            in_region: s.abs() < 1.0 && region.contains(ring_range(focus, s)),
        });
    }
    Ok(lobes)
}

/// Whether the Type-I and Type-II lobes are resolvable from each other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OverlapStatus {
    Ok { delta_min: f64, width: f64 },
    Violated { delta_min: f64, width: f64 },
}

impl OverlapStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, OverlapStatus::Ok { .. })
    }
}

/// Smallest sine-space gap between a subarray-1 and a subarray-2 grating
/// angle, `min |2n/N − 2m/M|`.
pub fn min_grating_separation(m: usize, n: usize) -> f64 {
    let (mi, ni) = (m as i64, n as i64);
    let mut best = f64::INFINITY;
    for a in (-(ni - 1)..=ni - 1).filter(|&a| a != 0) {
        for b in (-(mi - 1)..=mi - 1).filter(|&b| b != 0) {
            let gap = (2.0 * a as f64 / n as f64 - 2.0 * b as f64 / m as f64).abs();
            best = best.min(gap);
        }
    }
    best
}

pub fn overlap_constraint(m: usize, n: usize, l: usize) -> OverlapStatus {
    let delta_min = min_grating_separation(m, n);
    let width = 4.0 / ((l * m - 1) * n) as f64;
    if delta_min > width {
        OverlapStatus::Ok { delta_min, width }
    } else {
        OverlapStatus::Violated { delta_min, width }
    }
}

/// ECA lobe set plus the overlap check for its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcaLobes {
    pub lobes: Vec<LobePrediction>,
    pub overlap: OverlapStatus,
}

/// Number of Type-I, Type-II and Type-III lobes before the `|sin| ≤ 1`
/// filter.
pub fn eca_nominal_counts(m: usize, n: usize) -> (usize, usize, usize) {
    (2 * (n - 1), 2 * (m - 1), 2 * (m * n - m - n + 1))
}

pub fn eca_lobes(m: usize, n: usize, l: usize, wavelength: f64, focus: PolarLocation) -> Result<EcaLobes> {
    let geometry = build_array(ArrayKind::Eca { m, n, l }, wavelength)?;
    let region = Region::of(&geometry);
    let d0 = wavelength / 2.0;
    let s0 = focus.sin();
    let q = geometry.antenna_count() as f64;
    let sub1_cells = ((l * m - 1) * n) as f64;
    let width = 4.0 / sub1_cells;
    let r_main = focus_limit(sub1_cells, d0, focus.cos2());
    let lobe = |kind, s: f64, width, height| LobePrediction {
        kind,
        sin_theta: s,
        width,
        depth: depth_formula(focus.range, r_main, focus_limit(sub1_cells, d0, 1.0 - s * s)),
        height,
        in_region: s.abs() < 1.0 && region.contains(ring_range(focus, s)),
    };
    let mut lobes = vec![lobe(LobeKind::Main, s0, width, 1.0)];
    let (mi, ni) = (m as i64, n as i64);
    let denom = (m + n - 1) as f64;
    for k in (-(ni - 1)..=ni - 1).filter(|&k| k != 0) {
        lobes.push(lobe(LobeKind::EcaType1(k), s0 + 2.0 * k as f64 / n as f64, width, (m - 1) as f64 / denom));
    }
    for k in (-(mi - 1)..=mi - 1).filter(|&k| k != 0) {
        lobes.push(lobe(LobeKind::EcaType2(k), s0 + 2.0 * k as f64 / m as f64, width, (n - 1) as f64 / denom));
    }
    let mn = mi * ni;
    let width3 = 4.0 / ((l - 1) * m * n) as f64;
    for k in (-(mn - 1)..=mn - 1).filter(|&k| k != 0 && k % mi != 0 && k % ni != 0) {
        lobes.push(lobe(LobeKind::EcaType3(k), s0 + 2.0 * k as f64 / mn as f64, width3, (l - 1) as f64 / q));
    }
    lobes.retain(|p| p.sin_theta.abs() <= 1.0);
    Ok(EcaLobes {
        lobes,
        overlap: overlap_constraint(m, n, l),
    })
}

/// Lobe predictions for any geometry, ignoring the ECA overlap flag.
pub fn predict_lobes(geometry: &ArrayGeometry, focus: PolarLocation) -> Result<Vec<LobePrediction>> {
    let lam = geometry.wavelength();
    match geometry.kind() {
        ArrayKind::Ula { q } => lsa_lobes(q, 1, lam, focus),
        ArrayKind::Lsa { q, u } => lsa_lobes(q, u, lam, focus),
        ArrayKind::Eca { m, n, l } => eca_lobes(m, n, l, lam, focus).map(|e| e.lobes),
    }
}

pub(crate) fn require_positive(value: f64, what: &'static str) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} must be positive, got {value}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn focus(r: f64, deg: f64) -> PolarLocation {
        PolarLocation::from_degrees(r, deg).unwrap()
    }

    #[test]
    fn lsa_u3_broadside() {
        let lobes = lsa_lobes(131, 3, 0.01, focus(20.0, 0.0)).unwrap();
        let angles: Vec<f64> = lobes.iter().skip(1).map(|p| p.sin_theta).collect();
        assert_eq!(angles.len(), 2);
        assert!((angles[0] + 2.0 / 3.0).abs() < 1e-15 && (angles[1] - 2.0 / 3.0).abs() < 1e-15);
        assert!(lobes.iter().all(|p| p.height == 1.0 && p.width == 4.0 / 393.0));
    }

    #[test]
    fn lsa_main_depth_value() {
        let lobes = lsa_lobes(129, 5, 0.01, focus(20.0, 0.0)).unwrap();
        let r_lsa = 129.0f64.powi(2) * 25.0 * 0.005 / 10.24;
        assert!((r_lsa - 203.1).abs() < 0.1);
        let expected = 2.0 * 400.0 * r_lsa / (r_lsa * r_lsa - 400.0);
        assert!((lobes[0].depth - expected).abs() < 1e-12);
        assert!((lobes[0].depth - 3.98).abs() < 0.01);
        // Grating depths shrink as the lobes move away from broadside.
        let mut by_offset: Vec<(f64, f64)> = lobes[1..].iter().map(|p| (p.sin_theta.abs(), p.depth)).collect();
        by_offset.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        assert!(by_offset.iter().all(|&(_, d)| d < lobes[0].depth));
        assert!(by_offset.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12));
    }

    #[test]
    fn infinite_depth_beyond_limit() {
        let lobes = lsa_lobes(11, 2, 0.01, focus(50.0, 0.0)).unwrap();
        assert!(lobes[0].depth.is_infinite());
    }

    #[test]
    fn depth_ratio_examples() {
        assert!((depth_ratio(0.0, 2.0 / 3.0) - 5.0 / 9.0).abs() < 1e-15);
        assert!((depth_ratio(0.3, 1e-12) - 1.0).abs() < 1e-11);
        let theta0 = 0.5f64;
        assert!(depth_ratio(theta0, -theta0.sin()) > 1.0);
        // Same value as the ratio of the two depth formulas.
        let lobes = lsa_lobes(129, 5, 0.01, focus(20.0, 10.0)).unwrap();
        for g in &lobes[1..] {
            let ratio = g.depth / lobes[0].depth;
            let delta = g.sin_theta - lobes[0].sin_theta;
            assert!((ratio - depth_ratio(10f64.to_radians(), delta)).abs() < 1e-12);
        }
    }

    #[test]
    fn eca_heights_and_counts() {
        let e = eca_lobes(7, 5, 12, 0.01, focus(20.0, 0.0)).unwrap();
        let h = |pred: fn(&LobeKind) -> bool| e.lobes.iter().find(|p| pred(&p.kind)).unwrap().height;
        assert!((h(|k| matches!(k, LobeKind::EcaType1(_))) - 6.0 / 11.0).abs() < 1e-15);
        assert!((h(|k| matches!(k, LobeKind::EcaType2(_))) - 4.0 / 11.0).abs() < 1e-15);
        assert!((h(|k| matches!(k, LobeKind::EcaType3(_))) - 11.0 / 131.0).abs() < 1e-15);
        assert_eq!(eca_nominal_counts(7, 5), (8, 12, 48));
        let t3 = e.lobes.iter().filter(|p| matches!(p.kind, LobeKind::EcaType3(_))).count();
        // Broadside keeps every Type-III lobe since |2ℓ/35| < 2 only for |ℓ| < 35;
        // those with |2ℓ/35| > 1 drop out.
        assert!(t3 < 48 && t3 > 0);
        assert!(e.overlap.is_ok());
    }

    #[test]
    fn overlap_examples() {
        assert!(overlap_constraint(7, 5, 12).is_ok());
        assert!(!overlap_constraint(7, 5, 2).is_ok());
        for m in 2..=20usize {
            for n in 1..m {
                if crate::geometry::gcd(m, n) == 1 && n >= 2 {
                    assert!(min_grating_separation(m, n) * (m * n) as f64 / 2.0 >= 1.0 - 1e-12);
                }
            }
        }
    }

    #[test]
    fn lobe_kind_display_and_serde() {
        assert_eq!(LobeKind::EcaType1(-2).to_string(), "eca_type1(-2)");
        let json = serde_json::to_string(&LobeKind::LsaGrating(1)).unwrap();
        assert_eq!(json, r#"{"kind":"lsa_grating","index":1}"#);
        assert!(require_positive(-1.0, "x").is_err());
    }
}
