//! Tracking-by-detection engine for fixed-cardinality schools.
//!
//! The crate covers the full desk-scale workflow: MOTChallenge-style file
//! I/O ([`mot`]), box geometry ([`geometry`]), a constant-velocity Kalman
//! filter ([`kalman`]), gated linear assignment ([`assign`]), SORT- and
//! ByteTrack-style online trackers with fixed-cardinality extensions
//! ([`tracker`]), offline merge-and-interpolate track repair ([`connector`]),
//! HOTA evaluation ([`metrics`]), black-box hyperparameter search
//! ([`tuner`]), and a seeded synthetic school generator ([`synth`]).
//!
//! Core math is generic over the scalar type through [`scalar::Real`]
//! (`f32` or `f64`); every domain type defaults to [`Scalar`] (`f64`), which
//! is what the pipeline, the generator, and the tuner use throughout.

pub mod assign;
pub mod connector;
pub mod error;
pub mod geometry;
pub mod kalman;
pub mod metrics;
pub mod mot;
pub mod scalar;
pub mod synth;
pub mod tracker;
pub mod tuner;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};

pub use assign::{solve_lap, AssignmentResult};
pub use connector::{connect, track_distance, ConnectorConfig};
pub use geometry::{center_distance, iou, iou_distance};
pub use kalman::{kf_init, kf_predict, kf_update, KalmanParams, KalmanState};
pub use metrics::{evaluate, report_table, AlphaMetrics, MetricsReport};
pub use mot::{
    parse_mot, parse_mot_str, read_mot_file, write_mot, write_mot_file, BBox, Detection, MotKind,
    Sequence, SequenceData, SequenceInfo, Track, TrackPoint,
};
pub use synth::{corrupt, generate_school, CorruptionConfig, SchoolConfig};
pub use tracker::{admit_new_track, run_sequence, Tracker, TrackerConfig, Variant};
pub use tuner::{coordinate_ascent, random_search, ParamSpec, ParamValue, PipelineParams, SearchSpace, TrialRecord};
