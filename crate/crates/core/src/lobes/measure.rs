use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::predict::{require_positive, ring_range, LobePrediction};
use crate::beampattern::{main_lobe_width, PatternEvaluator};
use crate::channel::PolarLocation;
use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;

/// Sampling and threshold settings for [`measure_lobes`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureConfig {
    /// Sine-space step along the user ring; `None` picks an eighth of the
    /// predicted main-lobe width.
    pub ring_cell: Option<f64>,
    /// Log-spaced samples along each lobe ray.
    pub ray_samples: usize,
    pub peak_threshold: f64,
    pub null_threshold: f64,
    /// Range window for the rays; `None` uses the uniform-power distance
    /// and the Rayleigh distance.
    pub range_window: Option<(f64, f64)>,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        Self {
            ring_cell: None,
            ray_samples: 600,
            peak_threshold: 0.05,
            null_threshold: 0.05,
            range_window: None,
        }
    }
}

/// Grid actually used by a measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub ring_cell: f64,
    pub ring_samples: usize,
    pub ray_samples: usize,
    pub r_min: f64,
    pub r_max: f64,
}

/// One peak found on the user ring.
///
/// `width` is NaN when a bounding null is missing; `depth` is infinite
/// when the half-magnitude level is not crossed inside the range window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasuredLobe {
    pub sin_theta: f64,
    pub ring_range: f64,
    pub ring_height: f64,
    pub width: f64,
    pub height: f64,
    pub peak_range: f64,
    pub depth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LobeReport {
    pub focus: PolarLocation,
    pub lobes: Vec<MeasuredLobe>,
    pub resolution: Resolution,
}

const GOLDEN_ITERS: usize = 60;
const BISECT_ITERS: usize = 60;

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERS {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Root of `f` in `[a, b]` where `f(a)` and `f(b)` differ in sign.
fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..BISECT_ITERS {
        let mid = 0.5 * (a + b);
        if (f(mid) > 0.0) == (fa > 0.0) {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

fn is_local_min(v: &[f64], j: usize) -> bool {
    j > 0 && j + 1 < v.len() && v[j] <= v[j - 1] && v[j] <= v[j + 1]
}

struct Ring<'a, E: ?Sized> {
    evaluator: &'a E,
    focus: PolarLocation,
}

impl<E: PatternEvaluator + ?Sized> Ring<'_, E> {
    fn at(&self, s: f64) -> f64 {
        let r = ring_range(self.focus, s);
        match PolarLocation::from_sine(r, s) {
            Ok(p) => self.evaluator.magnitude(p),
            Err(_) => 0.0,
        }
    }
}

fn null_near<E: PatternEvaluator + ?Sized>(
    ring: &Ring<'_, E>,
    s: &[f64],
    v: &[f64],
    from: usize,
    step: isize,
    threshold: f64,
) -> Option<f64> {
    let mut j = from as isize + step;
    while j > 0 && (j as usize) + 1 < v.len() {
        let ju = j as usize;
        if is_local_min(v, ju) {
            // A sampled minimum can sit half a cell from the true null, so
            // the threshold applies to the refined value.
            let (x, neg) = golden_max(|t| -ring.at(t), s[ju - 1], s[ju + 1]);
            if -neg < threshold {
                return Some(x);
            }
        }
        j += step;
    }
    None
}

struct RayResult {
    height: f64,
    peak_range: f64,
    depth: f64,
}

fn measure_ray<E: PatternEvaluator + ?Sized>(evaluator: &E, sin_theta: f64, r_min: f64, r_max: f64, n: usize) -> RayResult {
    let eval = |log_r: f64| -> f64 {
        PolarLocation::from_sine(log_r.exp(), sin_theta)
            .map(|p| evaluator.magnitude(p))
            .unwrap_or(0.0)
    };
    let (lo, hi) = (r_min.ln(), r_max.ln());
    let x: Vec<f64> = (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect();
    let v: Vec<f64> = x.iter().map(|&t| eval(t)).collect();
    let k = (0..n).fold(0, |best, i| if v[i] > v[best] { i } else { best });
    let (mut peak_x, mut height) = (x[k], v[k]);
    if k > 0 && k + 1 < n {
        let (px, pv) = golden_max(eval, x[k - 1], x[k + 1]);
        if pv > height {
            peak_x = px;
            height = pv;
        }
    }
    let half = 0.5 * height;
    let level = |t: f64| eval(t) - half;
    let far = (k + 1..n)
        .find(|&i| v[i] < half)
        .map(|i| bisect(level, x[i - 1].max(peak_x), x[i]));
    let near = (0..k)
        .rev()
        .find(|&i| v[i] < half)
        .map(|i| bisect(level, x[i], x[i + 1].min(peak_x)));
    let depth = match (near, far) {
        (Some(a), Some(b)) => b.exp() - a.exp(),
        _ => f64::INFINITY,
    };
    RayResult {
        height,
        peak_range: peak_x.exp(),
        depth,
    }
}

/// Numerical lobe measurement on the user ring through `focus`.
///
/// Peaks are local maxima above the peak threshold; widths run between the
/// nearest local minima below the null threshold; heights and 3-dB depths
/// come from a scan along the ray at each peak angle.
pub fn measure_lobes<E: PatternEvaluator + ?Sized>(
    evaluator: &E,
    focus: PolarLocation,
    geometry: &ArrayGeometry,
    config: &MeasureConfig,
) -> Result<LobeReport> {
    let width = main_lobe_width(geometry.kind());
    let cell = config.ring_cell.unwrap_or(width / 8.0);
    require_positive(cell, "ring cell")?;
    if width < 4.0 * cell {
        return Err(Error::ResolutionTooCoarse { width, cell });
    }
    if config.ray_samples < 3 {
        return Err(Error::InvalidParameter("ray_samples must be at least 3".into()));
    }
    let metrics = geometry.metrics();
    let (r_min, r_max) = config.range_window.unwrap_or((metrics.upd, metrics.rayleigh));
    require_positive(r_min, "r_min")?;
    if r_max <= r_min {
        return Err(Error::InvalidParameter(format!("empty range window [{r_min}, {r_max}]")));
    }
    // The ring keeps r >= r_min only while 1 - s² >= r_min cos²θ0 / r0.
    let floor = r_min * focus.cos2() / focus.range;
    if floor >= 1.0 {
        return Err(Error::NoPeakFound);
    }
    let s_max = (1.0 - floor).sqrt();
    let count = (2.0 * s_max / cell).floor() as usize + 1;
    let s: Vec<f64> = (0..count).map(|i| -s_max + i as f64 * cell).collect();
    let ring = Ring { evaluator, focus };
    let v: Vec<f64> = s.par_iter().map(|&x| ring.at(x)).collect();

    let peaks: Vec<usize> = (1..count.saturating_sub(1))
        .filter(|&i| v[i] >= v[i - 1] && v[i] > v[i + 1] && v[i] > config.peak_threshold)
        .collect();
    if peaks.is_empty() {
        return Err(Error::NoPeakFound);
    }
    let lobes: Vec<MeasuredLobe> = peaks
        .par_iter()
        .map(|&i| {
            let (sp, hp) = golden_max(|t| ring.at(t), s[i - 1], s[i + 1]);
            let (sp, hp) = if hp >= v[i] { (sp, hp) } else { (s[i], v[i]) };
            let left = null_near(&ring, &s, &v, i, -1, config.null_threshold);
            let right = null_near(&ring, &s, &v, i, 1, config.null_threshold);
            let width = match (left, right) {
                (Some(a), Some(b)) => b - a,
                _ => f64::NAN,
            };
            let ray = measure_ray(evaluator, sp, r_min, r_max, config.ray_samples);
            MeasuredLobe {
                sin_theta: sp,
                ring_range: ring_range(focus, sp),
                ring_height: hp,
                width,
                height: ray.height,
                peak_range: ray.peak_range,
                depth: ray.depth,
            }
        })
        .collect();
    Ok(LobeReport {
        focus,
        lobes,
        resolution: Resolution {
            ring_cell: cell,
            ring_samples: count,
            ray_samples: config.ray_samples,
            r_min,
            r_max,
        },
    })
}

/// For each prediction, the index of the closest measured peak within
/// `tol` in sine space.
pub fn match_lobes(predicted: &[LobePrediction], report: &LobeReport, tol: f64) -> Vec<Option<usize>> {
    predicted
        .iter()
        .map(|p| {
            report
                .lobes
                .iter()
                .enumerate()
                .map(|(i, m)| (i, (m.sin_theta - p.sin_theta).abs()))
                .filter(|&(_, d)| d <= tol)
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(i, _)| i)
        })
        .collect()
}

/// Measured peaks with ring height at least `min_height` that no
/// prediction explains within `tol`.
pub fn unexplained_peaks(
    predicted: &[LobePrediction],
    report: &LobeReport,
    tol: f64,
    min_height: f64,
) -> Vec<usize> {
    report
        .lobes
        .iter()
        .enumerate()
        .filter(|(_, m)| m.ring_height >= min_height)
        .filter(|(_, m)| predicted.iter().all(|p| (p.sin_theta - m.sin_theta).abs() > tol))
        .map(|(i, _)| i)
        .collect()
}

/// Rows `kind,sin_theta,width,depth_m,height,source`; measured peaks take
/// the kind of the prediction they match, or `peak`.
pub fn write_lobes_csv<W: Write>(writer: W, predicted: &[LobePrediction], report: Option<&LobeReport>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["kind", "sin_theta", "width", "depth_m", "height", "source"])?;
    for p in predicted {
        w.write_record([
            p.kind.to_string(),
            p.sin_theta.to_string(),
            p.width.to_string(),
            p.depth.to_string(),
            p.height.to_string(),
            "predicted".to_string(),
        ])?;
    }
    if let Some(report) = report {
        let tol = report.resolution.ring_cell;
        for m in &report.lobes {
            let kind = predicted
                .iter()
                .filter(|p| (p.sin_theta - m.sin_theta).abs() <= tol)
                .min_by(|a, b| {
                    (a.sin_theta - m.sin_theta)
                        .abs()
                        .total_cmp(&(b.sin_theta - m.sin_theta).abs())
                })
                .map(|p| p.kind.to_string())
                .unwrap_or_else(|| "peak".to_string());
            w.write_record([
                kind,
                m.sin_theta.to_string(),
                m.width.to_string(),
                m.depth.to_string(),
                m.height.to_string(),
                "measured".to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
