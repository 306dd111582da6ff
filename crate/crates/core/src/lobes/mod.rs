//! Lobe predictors and the numerical lobe-measurement oracle.

mod measure;
mod predict;

pub use measure::{
    match_lobes, measure_lobes, unexplained_peaks, write_lobes_csv, LobeReport, MeasureConfig, MeasuredLobe,
    Resolution,
};
pub use predict::{
    depth_ratio, eca_lobes, eca_nominal_counts, lsa_lobes, min_grating_separation, overlap_constraint,
    predict_lobes, ring_range, EcaLobes, LobeKind, LobePrediction, OverlapStatus,
};
