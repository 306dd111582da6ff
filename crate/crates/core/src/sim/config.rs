use serde::{Deserialize, Serialize};

use crate::beamforming::{AoOptions, FpOptions};
use crate::error::{Error, Result};
use crate::geometry::ArrayKind;
use crate::units::{db_to_linear, dbm_to_watts};

/// Where users are dropped in each trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum UserDistribution {
    /// Uniform angle and range over a rectangle in (θ, r).
    Region { angle_deg: (f64, f64), range_m: (f64, f64) },
    /// Fixed angle, uniform range.
    SameAngle { angle_deg: f64, range_m: (f64, f64) },
    /// Sine drawn equiprobably from a fixed set, uniform range.
    GratingAngles { sin_theta: Vec<f64>, range_m: (f64, f64) },
}

impl UserDistribution {
    pub fn range_m(&self) -> (f64, f64) {
        match self {
            UserDistribution::Region { range_m, .. }
            | UserDistribution::SameAngle { range_m, .. }
            | UserDistribution::GratingAngles { range_m, .. } => *range_m,
        }
    }
}

/// Designer used for the hybrid curve of an array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HybridDesigner {
    /// Alternating factorization of the fully digital precoder.
    Ao,
    /// MRT analog beams with FP digital precoding.
    TwoPhase,
}

impl HybridDesigner {
    pub fn for_array(kind: ArrayKind) -> Self {
        match kind {
            ArrayKind::Lsa { .. } => HybridDesigner::Ao,
            ArrayKind::Ula { .. } | ArrayKind::Eca { .. } => HybridDesigner::TwoPhase,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            HybridDesigner::Ao => "hybrid_ao",
            HybridDesigner::TwoPhase => "hybrid_two_phase",
        }
    }
}

pub const DIGITAL_DESIGNER: &str = "digital_fp";

/// One x-axis value of a curve and the arrays evaluated there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub x: f64,
    pub arrays: Vec<ArrayKind>,
    /// Overrides the transmit power so that `P / σ²` equals this value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XAxis {
    Sparsity,
    SnrDb,
}

impl XAxis {
    pub fn name(&self) -> &'static str {
        match self {
            XAxis::Sparsity => "eta",
            XAxis::SnrDb => "snr_db",
        }
    }
}

fn default_wavelength() -> f64 {
    0.01
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: u8,
    pub users: usize,
    pub p_max_dbm: f64,
    pub noise_dbm: f64,
    pub beta0_db: f64,
    #[serde(default = "default_wavelength")]
    pub wavelength: f64,
    pub distribution: UserDistribution,
    /// Per-user weights; all ones when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub trials: usize,
    pub seed: u64,
    pub x_axis: XAxis,
    pub points: Vec<SweepPoint>,
    #[serde(default = "default_true")]
    pub include_digital: bool,
    #[serde(default)]
    pub fp: FpOptions,
    #[serde(default)]
    pub ao: AoOptions,
}

/// ECA used at sparsity `eta` in the sparsity sweeps, chosen so that the
/// antenna count stays close to 131.
pub fn eca_for_sparsity(eta: u32) -> Option<ArrayKind> {
    let (m, n, l) = match eta {
        2 => (4, 3, 22),
        3 => (6, 5, 14),
        4 => (8, 7, 10),
        5 => (10, 9, 8),
        6 => (12, 11, 6),
        _ => return None,
    };
    Some(ArrayKind::Eca { m, n, l })
}

fn sparsity_points(q: usize) -> Vec<SweepPoint> {
    (2..=6u32)
        .map(|eta| SweepPoint {
            x: eta as f64,
            arrays: vec![
                ArrayKind::Ula { q },
                ArrayKind::Lsa { q, u: eta as usize },
                eca_for_sparsity(eta).expect("preset exists for 2..=6"),
            ],
            snr_db: None,
        })
        .collect()
}

impl ScenarioConfig {
    /// Defaults for scenario 1 (dense region), 2 (same angle) or 3
    /// (grating directions).
    pub fn preset(scenario: u8) -> Result<Self> {
        let base = |distribution, x_axis, points| Self {
            scenario,
            users: 10,
            p_max_dbm: 30.0,
            noise_dbm: -70.0,
            beta0_db: -62.0,
            wavelength: default_wavelength(),
            distribution,
            weights: None,
            trials: 100,
            seed: 1,
            x_axis,
            points,
            include_digital: true,
            fp: FpOptions::default(),
            ao: AoOptions::default(),
        };
        match scenario {
            1 => Ok(base(
                UserDistribution::Region {
                    angle_deg: (-4.0, 4.0),
                    range_m: (20.0, 30.0),
                },
                XAxis::Sparsity,
                sparsity_points(131),
            )),
            2 => Ok(base(
                UserDistribution::SameAngle {
                    angle_deg: 0.0,
                    range_m: (15.0, 30.0),
                },
                XAxis::Sparsity,
                sparsity_points(131),
            )),
            3 => Ok(base(
                UserDistribution::GratingAngles {
                    sin_theta: vec![-2.0 / 3.0, 2.0 / 3.0],
                    range_m: (20.0, 30.0),
                },
                XAxis::SnrDb,
                [90.0, 100.0, 110.0]
                    .into_iter()
                    .map(|snr| SweepPoint {
                        x: snr,
                        arrays: vec![ArrayKind::Lsa { q: 125, u: 3 }, ArrayKind::Eca { m: 5, n: 3, l: 18 }],
                        snr_db: Some(snr),
                    })
                    .collect(),
            )),
            other => Err(Error::Config(format!("unknown scenario {other}, expected 1, 2 or 3"))),
        }
    }

    pub fn noise_watts(&self) -> f64 {
        dbm_to_watts(self.noise_dbm)
    }

    pub fn beta0(&self) -> f64 {
        db_to_linear(self.beta0_db)
    }

    /// Transmit power in watts at `point`.
    pub fn p_max_watts(&self, point: &SweepPoint) -> f64 {
        match point.snr_db {
            Some(snr) => dbm_to_watts(self.noise_dbm + snr),
            None => dbm_to_watts(self.p_max_dbm),
        }
    }

    pub fn weight_vector(&self) -> Vec<f64> {
        self.weights.clone().unwrap_or_else(|| vec![1.0; self.users])
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.users == 0 {
            return fail("at least one user is required".into());
        }
        if let Some(w) = &self.weights {
            if w.len() != self.users || w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return fail(format!("need {} non-negative weights, got {w:?}", self.users));
            }
        }
        if !(self.wavelength.is_finite() && self.wavelength > 0.0) {
            return fail(format!("wavelength {} must be positive", self.wavelength));
        }
        for (name, v) in [("p_max_dbm", self.p_max_dbm), ("noise_dbm", self.noise_dbm), ("beta0_db", self.beta0_db)] {
            if !v.is_finite() {
                return fail(format!("{name} must be finite"));
            }
        }
        let (r_lo, r_hi) = self.distribution.range_m();
        if !(r_lo > 0.0 && r_hi > r_lo) {
            return fail(format!("range interval [{r_lo}, {r_hi}] must be positive and non-degenerate"));
        }
        match &self.distribution {
            UserDistribution::Region { angle_deg: (a, b), .. } => {
                if !(b > a && *a > -90.0 && *b < 90.0) {
                    return fail(format!("angle interval [{a}, {b}] must be non-degenerate inside (-90, 90)"));
                }
            }
            UserDistribution::SameAngle { angle_deg, .. } => {
                if !angle_deg.is_finite() || angle_deg.abs() >= 90.0 {
                    return fail(format!("angle {angle_deg} must lie inside (-90, 90)"));
                }
            }
            UserDistribution::GratingAngles { sin_theta, .. } => {
                if sin_theta.is_empty() || sin_theta.iter().any(|s| !s.is_finite() || s.abs() >= 1.0) {
                    return fail(format!("grating sines {sin_theta:?} must be non-empty and inside (-1, 1)"));
                }
            }
        }
        if self.points.is_empty() {
            return fail("sweep has no points".into());
        }
        for p in &self.points {
            if p.arrays.is_empty() {
                return fail(format!("sweep point x={} lists no arrays", p.x));
            }
            for a in &p.arrays {
                crate::geometry::build_array(*a, self.wavelength).map_err(|e| Error::Config(e.to_string()))?;
                if a.antenna_count() < self.users {
                    return fail(format!("{} has fewer antennas than the {} users", a.label(), self.users));
                }
                if let UserDistribution::GratingAngles { sin_theta, .. } = &self.distribution {
                    if !shares_grating_angles(*a, sin_theta) {
                        return fail(format!("{} does not have grating lobes at all of {sin_theta:?}", a.label()));
                    }
                }
            }
        }
        Ok(())
    }
}

fn is_multiple(delta: f64, step: f64) -> bool {
    let k = (delta / step).round();
    k != 0.0 && (delta - k * step).abs() < 1e-9
}

/// Whether every pair of sines in `sines` is separated by a grating-lobe
/// offset of `kind` (LSA: `2/U`; ECA: `2/N` or `2/M`).
pub fn shares_grating_angles(kind: ArrayKind, sines: &[f64]) -> bool {
    let steps: Vec<f64> = match kind {
        ArrayKind::Ula { .. } => return sines.len() <= 1,
        ArrayKind::Lsa { u, .. } => vec![2.0 / u as f64],
        ArrayKind::Eca { m, n, .. } => vec![2.0 / n as f64, 2.0 / m as f64],
    };
    sines.iter().enumerate().all(|(i, a)| {
        sines[i + 1..]
            .iter()
            .all(|b| steps.iter().any(|&st| is_multiple(a - b, st)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for id in 1..=3 {
            let c = ScenarioConfig::preset(id).unwrap();
            c.validate().unwrap();
        }
        assert!(ScenarioConfig::preset(4).is_err());
    }

    #[test]
    fn eca_presets_near_131() {
        let counts: Vec<usize> = (2..=6).map(|e| eca_for_sparsity(e).unwrap().antenna_count()).collect();
        assert_eq!(counts, vec![131, 139, 139, 143, 131]);
        assert_eq!(eca_for_sparsity(7), None);
    }

    #[test]
    fn snr_sets_power() {
        let c = ScenarioConfig::preset(3).unwrap();
        let p = c.p_max_watts(&c.points[1]);
        assert!((p / c.noise_watts() - 1e10).abs() < 1e-3);
        let c1 = ScenarioConfig::preset(1).unwrap();
        assert!((c1.p_max_watts(&c1.points[0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grating_angle_check() {
        let s = [-2.0 / 3.0, 2.0 / 3.0];
        assert!(shares_grating_angles(ArrayKind::Lsa { q: 125, u: 3 }, &s));
        assert!(shares_grating_angles(ArrayKind::Eca { m: 5, n: 3, l: 18 }, &s));
        assert!(!shares_grating_angles(ArrayKind::Lsa { q: 125, u: 4 }, &s));
        let mut c = ScenarioConfig::preset(3).unwrap();
        c.points[0].arrays.push(ArrayKind::Ula { q: 125 });
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = ScenarioConfig::preset(1).unwrap();
        c.trials = 0;
        assert!(c.validate().is_err());
        let mut c = ScenarioConfig::preset(2).unwrap();
        c.distribution = UserDistribution::SameAngle {
            angle_deg: 0.0,
            range_m: (30.0, 30.0),
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = ScenarioConfig::preset(3).unwrap();
        let text = serde_json::to_string_pretty(&c).unwrap();
        let back: ScenarioConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(c, back);
    }
}
