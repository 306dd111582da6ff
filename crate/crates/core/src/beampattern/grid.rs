use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exact::{FocusedPattern, PatternEvaluator};
use super::PatternMode;
use crate::channel::PolarLocation;
use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, ArrayKind};

/// Sample axes: sines of the angle and ranges in meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub sin_theta: Vec<f64>,
    pub range: Vec<f64>,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

impl GridSpec {
    /// Uniform axes including both end points.
    pub fn linear(sin_lo: f64, sin_hi: f64, n_sin: usize, r_lo: f64, r_hi: f64, n_r: usize) -> Self {
        Self {
            sin_theta: linspace(sin_lo, sin_hi, n_sin),
            range: linspace(r_lo, r_hi, n_r),
        }
    }

    pub fn single(point: PolarLocation) -> Self {
        Self {
            sin_theta: vec![point.sin()],
            range: vec![point.range],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sin_theta.is_empty() {
            return Err(Error::EmptyGrid("sin_theta"));
        }
        if self.range.is_empty() {
            return Err(Error::EmptyGrid("range"));
        }
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
        if !increasing(&self.sin_theta) || !increasing(&self.range) {
            return Err(Error::InvalidParameter("grid axes must be strictly increasing".into()));
        }
        if self.sin_theta.iter().any(|s| !(-1.0..=1.0).contains(s)) {
            return Err(Error::InvalidParameter("sin_theta samples must lie in [-1, 1]".into()));
        }
        if self.range.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidParameter("range samples must be positive".into()));
        }
        Ok(())
    }
}

/// Sampled pattern, stored row-major with one row per range sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamPatternGrid {
    pub sin_theta: Vec<f64>,
    pub range: Vec<f64>,
    pub values: Vec<f64>,
    pub focus: PolarLocation,
    pub array: ArrayKind,
    pub wavelength: f64,
    pub mode: PatternMode,
}

impl BeamPatternGrid {
    pub fn value(&self, range_idx: usize, sin_idx: usize) -> f64 {
        self.values[range_idx * self.sin_theta.len() + sin_idx]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// First column holds ranges, header row holds sines.
    pub fn write_wide_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["r_m".to_string()];
        header.extend(self.sin_theta.iter().map(|s| s.to_string()));
        w.write_record(&header)?;
        for (i, r) in self.range.iter().enumerate() {
            let row = &self.values[i * self.sin_theta.len()..(i + 1) * self.sin_theta.len()];
            let mut rec = vec![r.to_string()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// One `sin_theta,r_m,magnitude` row per cell.
    pub fn write_long_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["sin_theta", "r_m", "magnitude"])?;
        for (i, r) in self.range.iter().enumerate() {
            for (j, s) in self.sin_theta.iter().enumerate() {
                w.write_record([s.to_string(), r.to_string(), self.value(i, j).to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Fills `spec` with any evaluator, in parallel over range rows.
pub fn fill_grid<E: PatternEvaluator + ?Sized>(evaluator: &E, spec: &GridSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let rows: Vec<Vec<f64>> = spec
        .range
        .par_iter()
        .map(|&r| {
            spec.sin_theta
                .iter()
                .map(|&s| {
                    // Validation above keeps every sample a legal location.
                    let obs = PolarLocation::from_sine(r, s).expect("validated grid sample");
                    evaluator.magnitude(obs)
                })
                .collect()
        })
        .collect();
    Ok(rows.concat())
}

pub fn beam_pattern_grid(
    geometry: &ArrayGeometry,
    focus: PolarLocation,
    spec: &GridSpec,
    mode: PatternMode,
) -> Result<BeamPatternGrid> {
    let evaluator = FocusedPattern::new(geometry, focus, mode);
    let values = fill_grid(&evaluator, spec)?;
    Ok(BeamPatternGrid {
        sin_theta: spec.sin_theta.clone(),
        range: spec.range.clone(),
        values,
        focus,
        array: geometry.kind(),
        wavelength: geometry.wavelength(),
        mode,
    })
}
