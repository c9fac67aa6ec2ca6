//! Scoring estimates against ground truth.

mod report;
mod segments;
mod stats;
mod truth;

pub use report::{
    bland_altman_svg, build_report, EstimateSeries, EvaluationInput, EvaluationReport,
    MethodAgreement, ReportRow,
};
pub use segments::{sample_segments, Segment, MINUTE_S};
pub use stats::{bland_altman, mape, BlandAltmanStats, MeasurementPair};
pub use truth::{GroundTruthSeries, TruthRecord};
