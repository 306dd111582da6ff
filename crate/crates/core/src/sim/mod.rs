//! Scenario definitions, Monte-Carlo curve runners and artifact export.

mod config;
mod curve;
mod export;
mod users;

pub use config::{
    eca_for_sparsity, shares_grating_angles, HybridDesigner, ScenarioConfig, SweepPoint, UserDistribution, XAxis,
    DIGITAL_DESIGNER,
};
pub use curve::{run_curve, CurveResult, CurveRow, TrialRecord};
pub use export::{
    read_curve_csv, read_sidecar, read_trials_csv, sidecar_path, write_curve_csv, write_sidecar, write_trials_csv,
    Sidecar, CURVE_HEADER, LIBRARY_VERSION, SCHEMA_VERSION, TRIAL_HEADER,
};
pub use users::{generate_locations, generate_users, trial_rng, users_for};
