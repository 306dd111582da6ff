use std::collections::hash_map::{Entry, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{HybridDesigner, ScenarioConfig, DIGITAL_DESIGNER};
use super::users::{generate_locations, users_for};
use crate::beamforming::{eca_hybrid_two_phase, fully_digital_fp, lsa_hybrid_ao, sinr_and_rate, UserSet};
use crate::error::Result;
use crate::geometry::{build_array, ArrayKind};

/// Outcome of one designer on one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub x: f64,
    pub array: String,
    pub designer: String,
    pub trial: u64,
    pub rate: f64,
    pub converged: bool,
}

/// Aggregate of one (x, array, designer) triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub x: f64,
    pub array: String,
    pub antenna_count: usize,
    pub designer: String,
    pub mean_rate: f64,
    pub std_rate: f64,
    pub trials: usize,
    pub nonconverged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveResult {
    pub x_axis: String,
    pub rows: Vec<CurveRow>,
    pub records: Vec<TrialRecord>,
}

impl CurveResult {
    pub fn row(&self, x: f64, array: ArrayKind, designer: &str) -> Option<&CurveRow> {
        let label = array.label();
        self.rows
            .iter()
            .find(|r| r.x == x && r.array == label && r.designer == designer)
    }

    pub fn nonconverged(&self) -> usize {
        self.rows.iter().map(|r| r.nonconverged).sum()
    }
}

struct Slot {
    x: f64,
    array: ArrayKind,
    designer: &'static str,
}

fn slots(config: &ScenarioConfig) -> Vec<Slot> {
    let mut out = Vec::new();
    for p in &config.points {
        for &array in &p.arrays {
            if config.include_digital {
                out.push(Slot {
                    x: p.x,
                    array,
                    designer: DIGITAL_DESIGNER,
                });
            }
            out.push(Slot {
                x: p.x,
                array,
                designer: HybridDesigner::for_array(array).name(),
            });
        }
    }
    out
}

/// `(rate, converged)` of the digital design and of the hybrid design.
type Evaluation = ((f64, bool), (f64, bool));

fn evaluate(config: &ScenarioConfig, array: ArrayKind, users: &UserSet, p_max: f64) -> Result<Evaluation> {
    let digital = fully_digital_fp(users, p_max, &config.fp)?;
    let d = (digital.report.weighted_sum_rate, digital.converged);
    let h = match HybridDesigner::for_array(array) {
        HybridDesigner::Ao => {
            // The AO iteration cap is a stopping rule, not a failure; only the
            // FP target can leave this design unconverged.
            let ao = lsa_hybrid_ao(&digital.precoder, p_max, &config.ao)?;
            (sinr_and_rate(users, &ao.pair)?.weighted_sum_rate, digital.converged)
        }
        HybridDesigner::TwoPhase => {
            let tp = eca_hybrid_two_phase(users, p_max, &config.fp)?;
            (sinr_and_rate(users, &tp.pair)?.weighted_sum_rate, tp.fp.converged)
        }
    };
    Ok((d, h))
}

fn run_trial(config: &ScenarioConfig, trial: u64) -> Result<Vec<(f64, bool)>> {
    let locations = generate_locations(config, trial)?;
    // Sparsity sweeps repeat the ULA at every point; solve each
    // (array, power) pair once per trial.
    let mut cache: HashMap<(ArrayKind, u64), Evaluation> = HashMap::new();
    let mut out = Vec::new();
    for p in &config.points {
        let p_max = config.p_max_watts(p);
        for &array in &p.arrays {
            let (d, h) = match cache.entry((array, p_max.to_bits())) {
                Entry::Occupied(e) => *e.get(),
                Entry::Vacant(e) => {
                    let geometry = build_array(array, config.wavelength)?;
                    let users = users_for(config, &geometry, &locations)?;
                    *e.insert(evaluate(config, array, &users, p_max)?)
                }
            };
            if config.include_digital {
                out.push(d);
            }
            out.push(h);
        }
    }
    Ok(out)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Monte-Carlo sum-rate curves. Every array at a sweep point sees the same
/// user drop in a given trial. Trials run in parallel and are aggregated in
/// trial order, so the result does not depend on the thread count.
pub fn run_curve(config: &ScenarioConfig) -> Result<CurveResult> {
    config.validate()?;
    let per_trial: Vec<Vec<(f64, bool)>> = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(config, t))
        .collect::<Result<_>>()?;
    let slots = slots(config);
    let mut rows = Vec::with_capacity(slots.len());
    let mut records = Vec::with_capacity(slots.len() * config.trials);
    for (i, slot) in slots.iter().enumerate() {
        let label = slot.array.label();
        let rates: Vec<f64> = per_trial.iter().map(|t| t[i].0).collect();
        let nonconverged = per_trial.iter().filter(|t| !t[i].1).count();
        for (trial, t) in per_trial.iter().enumerate() {
            records.push(TrialRecord {
                x: slot.x,
                array: label.clone(),
                designer: slot.designer.to_string(),
                trial: trial as u64,
                rate: t[i].0,
                converged: t[i].1,
            });
        }
        let (mean_rate, std_rate) = mean_std(&rates);
        rows.push(CurveRow {
            x: slot.x,
            array: label,
            antenna_count: slot.array.antenna_count(),
            designer: slot.designer.to_string(),
            mean_rate,
            std_rate,
            trials: rates.len(),
            nonconverged,
        });
    }
    Ok(CurveResult {
        x_axis: config.x_axis.name().to_string(),
        rows,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::config::SweepPoint;

    fn small(scenario: u8) -> ScenarioConfig {
        let mut c = ScenarioConfig::preset(scenario).unwrap();
        c.trials = 3;
        c.users = 3;
        c
    }

    #[test]
    fn single_user_hybrid_equals_digital() {
        let mut c = small(1);
        c.users = 1;
        c.points = vec![SweepPoint {
            x: 3.0,
            arrays: vec![
                ArrayKind::Ula { q: 31 },
                ArrayKind::Lsa { q: 31, u: 3 },
                ArrayKind::Eca { m: 5, n: 3, l: 4 },
            ],
            snr_db: None,
        }];
        let res = run_curve(&c).unwrap();
        for a in &c.points[0].arrays {
            let d = res.row(3.0, *a, DIGITAL_DESIGNER).unwrap().mean_rate;
            let h = res.row(3.0, *a, HybridDesigner::for_array(*a).name()).unwrap().mean_rate;
            assert!((h / d - 1.0).abs() < 1e-6, "{}: {h} vs {d}", a.label());
        }
    }

    #[test]
    fn rows_and_records_match_layout() {
        let mut c = small(3);
        c.points.truncate(1);
        let res = run_curve(&c).unwrap();
        assert_eq!(res.rows.len(), 4);
        assert_eq!(res.records.len(), 12);
        for r in &res.rows {
            assert!(r.mean_rate >= 0.0 && r.std_rate >= 0.0);
            assert_eq!(r.trials, 3);
        }
        assert_eq!(res.x_axis, "snr_db");
    }

    #[test]
    fn repeatable() {
        let mut c = small(2);
        c.points.truncate(1);
        assert_eq!(run_curve(&c).unwrap(), run_curve(&c).unwrap());
    }

    #[test]
    fn mean_std_values() {
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 2f64.sqrt()).abs() < 1e-15);
    }
}
