use std::f64::consts::PI;

use num_complex::Complex64;

use super::closed_form::closed_form;
use super::PatternMode;
use crate::channel::{distance, steering_vector, PhaseModel, PolarLocation};
use crate::geometry::ArrayGeometry;

/// `|b^H(focus) b(obs)|` under the chosen phase model.
pub fn beam_pattern_exact(
    geometry: &ArrayGeometry,
    focus: PolarLocation,
    obs: PolarLocation,
    model: PhaseModel,
) -> f64 {
    let a = steering_vector(geometry, focus, model);
    let b = steering_vector(geometry, obs, model);
    a.inner(&b).norm()
}

/// ECA inner product split into subarray 1 and the exclusive part of
/// subarray 2; their sum equals the full inner product.
pub fn eca_decomposition(
    geometry: &ArrayGeometry,
    focus: PolarLocation,
    obs: PolarLocation,
    model: PhaseModel,
) -> Option<(Complex64, Complex64)> {
    let layout = geometry.eca_layout()?;
    let a = steering_vector(geometry, focus, model).entries;
    let b = steering_vector(geometry, obs, model).entries;
    let part = |idx: &mut dyn Iterator<Item = usize>| -> Complex64 {
        idx.map(|i| a[i].conj() * b[i]).sum()
    };
    let first = part(&mut layout.subarray1.iter().copied());
    let second = part(&mut layout.subarray2_exclusive());
    Some((first, second))
}

/// Anything that maps an observation point to a pattern magnitude.
pub trait PatternEvaluator: Sync {
    fn magnitude(&self, obs: PolarLocation) -> f64;
}

impl<F> PatternEvaluator for F
where
    F: Fn(PolarLocation) -> f64 + Sync,
{
    fn magnitude(&self, obs: PolarLocation) -> f64 {
        self(obs)
    }
}

/// Pattern of a fixed focus with the focus phases cached.
#[derive(Debug, Clone)]
pub struct FocusedPattern {
    geometry: ArrayGeometry,
    focus: PolarLocation,
    mode: PatternMode,
    focus_phase: Vec<f64>,
}

impl FocusedPattern {
    pub fn new(geometry: &ArrayGeometry, focus: PolarLocation, mode: PatternMode) -> Self {
        let lam = geometry.wavelength();
        let focus_phase = match mode.phase_model() {
            Some(model) => geometry
                .positions()
                .iter()
                .map(|&y| distance(y, focus, model).rem_euclid(lam))
                .collect(),
            None => Vec::new(),
        };
        Self {
            geometry: geometry.clone(),
            focus,
            mode,
            focus_phase,
        }
    }

    pub fn focus(&self) -> PolarLocation {
        self.focus
    }

    pub fn mode(&self) -> PatternMode {
        self.mode
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geometry
    }
}

impl PatternEvaluator for FocusedPattern {
    fn magnitude(&self, obs: PolarLocation) -> f64 {
        let Some(model) = self.mode.phase_model() else {
            return closed_form(&self.geometry, self.focus, obs);
        };
        let lam = self.geometry.wavelength();
        let k = 2.0 * PI / lam;
        let sum: Complex64 = self
            .geometry
            .positions()
            .iter()
            .zip(&self.focus_phase)
            .map(|(&y, &df)| Complex64::from_polar(1.0, k * (df - distance(y, obs, model).rem_euclid(lam))))
            .sum();
        sum.norm() / self.focus_phase.len() as f64
    }
}
