//! Beam-pattern evaluation: exact inner products, closed forms and grids.

mod closed_form;
mod exact;
mod grid;
pub mod special;

use serde::{Deserialize, Serialize};

use crate::channel::PhaseModel;

pub use closed_form::{
    closed_form, closed_form_case, delta_phi, eca_case, eca_closed_form, eca_gamma2, eca_on_axis_full,
    eca_on_axis_simplified, eca_rho, eca_terms, lsa_case, lsa_closed_form, main_lobe_width, AngleRingCoords,
    PatternCase, DELTA_TOL, PHI_ZERO_TOL,
};
pub use exact::{beam_pattern_exact, eca_decomposition, FocusedPattern, PatternEvaluator};
pub use grid::{beam_pattern_grid, fill_grid, BeamPatternGrid, GridSpec};
pub use special::{dirichlet_sinc, f_kernel, fresnel, g_kernel, FresnelPair};

/// How a grid or evaluator computes the pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternMode {
    /// Inner product of exact spherical-wave steering vectors.
    #[default]
    Exact,
    /// Inner product with second-order distance expansion.
    Fresnel,
    /// Closed-form approximation.
    ClosedForm,
}

impl PatternMode {
    pub fn phase_model(self) -> Option<PhaseModel> {
        match self {
            PatternMode::Exact => Some(PhaseModel::Exact),
            PatternMode::Fresnel => Some(PhaseModel::Fresnel),
            PatternMode::ClosedForm => None,
        }
    }
}

impl std::str::FromStr for PatternMode {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s {
            "exact" => Ok(PatternMode::Exact),
            "fresnel" => Ok(PatternMode::Fresnel),
            "closed_form" | "closed-form" => Ok(PatternMode::ClosedForm),
            other => Err(crate::error::Error::Config(format!("unknown pattern mode '{other}'"))),
        }
    }
}
