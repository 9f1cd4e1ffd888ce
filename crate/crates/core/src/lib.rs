//! Quality-monotonic bitrate ladder construction for adaptive streaming via
//! multi-objective Pareto-front optimization over measured rate, quality,
//! and decoding time, with Bjontegaard-Delta evaluation against benchmark
//! ladder strategies.

pub mod cli;
pub mod error;
pub mod interp;
pub mod ladder;
pub mod metrics;
pub mod model;
pub mod objective;
pub mod pareto;
pub mod synth;

pub use error::{Error, Result};
pub use ladder::{
    build_ladder, default_fixed_pairs, enforce_quality_monotonicity, ladder_default,
    ladder_dynres, ladder_fixed, ladder_time_capped, Ladder, LadderStrategy, Rung,
};
pub use metrics::{
    bd_quality, bd_rate, bdde, compare, delta_decode_time, pearson, ComparisonReport, RqCurve,
};
pub use model::{
    parse_measurements, validate_space, write_measurements, MeasurementPoint, ParameterSpace,
    ParseOptions, QualityMetricKey, TargetBitrateSet,
};
pub use objective::{compute_j, compute_m, JqtParams, MParams};
pub use pareto::{dominates_jqt, dominates_jrqt, front_jqt, front_jrqt, ParetoFront};
pub use synth::{generate_corpus, generate_space, SynthProfile};
