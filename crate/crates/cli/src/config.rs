//! TOML config file model and flag resolution.

use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use shoaltrack_core::{ConnectorConfig, CorruptionConfig, SchoolConfig, TrackerConfig};
use shoaltrack_core::tuner::{ParamSpec, SearchSpace};

use crate::{ConnectArgs, SynthArgs, TrackArgs, TuneArgs};

/// Tuning section of the config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TuneConfig {
    pub method: String,
    pub max_rounds: usize,
    pub n_trials: usize,
    pub seed: u64,
    pub params: Vec<ParamSpec>,
}

impl Default for TuneConfig {
    fn default() -> Self {
        Self { method: "coordinate".to_string(), max_rounds: 3, n_trials: 50, seed: 1, params: Vec::new() }
    }
}

/// Everything the config file can carry. Missing sections fall back to the
/// built-in defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppConfig {
    pub tracker: TrackerConfig<f64>,
    pub connector: ConnectorConfig<f64>,
    pub synth: SchoolConfig,
    pub corruption: CorruptionConfig,
    pub tune: TuneConfig,
}

impl AppConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config file {}", path.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing config file {}", path.display()))
            }
        }
    }

    pub fn search_space(&self) -> SearchSpace {
        if self.tune.params.is_empty() {
            SearchSpace::default_space()
        } else {
            SearchSpace { params: self.tune.params.clone() }
        }
    }
}

fn apply<T: Copy>(target: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *target = v;
    }
}

/// School and corruption configs after flag overrides. A global `--seed N`
/// seeds the school with `N` and the corruption with `N + 1`.
pub fn resolve_synth(cfg: &AppConfig, args: &SynthArgs, seed: Option<u64>) -> (SchoolConfig, CorruptionConfig) {
    let mut school = cfg.synth.clone();
    apply(&mut school.n_fish, args.fish);
    apply(&mut school.duration, args.duration);
    apply(&mut school.fps, args.fps);
    apply(&mut school.arena_width, args.width);
    apply(&mut school.arena_height, args.height);
    apply(&mut school.box_width, args.box_width);
    apply(&mut school.box_height, args.box_height);
    apply(&mut school.speed, args.speed);
    apply(&mut school.cohesion, args.cohesion);
    apply(&mut school.alignment, args.alignment);
    apply(&mut school.separation, args.separation);

    let mut corruption = cfg.corruption.clone();
    apply(&mut corruption.dropout_prob, args.dropout);
    apply(&mut corruption.position_jitter_std, args.jitter);
    apply(&mut corruption.clutter_rate, args.clutter);
    apply(&mut corruption.merge_iou_thresh, args.merge_iou);
    apply(&mut corruption.true_conf_mean, args.conf_mean);
    apply(&mut corruption.true_conf_std, args.conf_std);
    apply(&mut corruption.clutter_conf_mean, args.clutter_conf_mean);
    apply(&mut corruption.clutter_conf_std, args.clutter_conf_std);

    if let Some(seed) = seed {
        school.seed = seed;
        corruption.seed = seed.wrapping_add(1);
    }
    (school, corruption)
}

pub fn resolve_tracker(cfg: &AppConfig, args: &TrackArgs) -> anyhow::Result<TrackerConfig<f64>> {
    let mut tracker = cfg.tracker.clone();
    if let Some(variant) = &args.variant {
        tracker.variant = variant.parse()?;
    }
    apply(&mut tracker.high_thresh, args.high);
    apply(&mut tracker.low_thresh, args.low);
    apply(&mut tracker.new_track_thresh, args.new);
    apply(&mut tracker.match_thresh, args.match_thresh);
    apply(&mut tracker.second_match_thresh, args.second_match);
    apply(&mut tracker.max_lost, args.max_lost);
    if args.cap.is_some() {
        tracker.cardinality_cap = args.cap;
    }
    apply(&mut tracker.skip_creation, args.skip_creation);
    apply(&mut tracker.rematch_lost, args.rematch_lost);
    apply(&mut tracker.min_hits_to_confirm, args.min_hits);
    Ok(tracker)
}

pub fn resolve_connector(cfg: &AppConfig, args: &ConnectArgs) -> ConnectorConfig<f64> {
    let mut connector = cfg.connector;
    apply(&mut connector.max_frame_gap, args.max_frame_gap);
    if let Some(cap) = args.distance_cap {
        connector.distance_cap = if cap > 0.0 { Some(cap) } else { None };
    }
    connector
}

/// Tuning settings after flag overrides; the global `--seed` wins over the
/// file's `tune.seed`.
pub fn resolve_tune(cfg: &AppConfig, args: &TuneArgs, seed: Option<u64>) -> TuneConfig {
    let mut tune = cfg.tune.clone();
    if let Some(m) = &args.method {
        tune.method = m.clone();
    }
    if let Some(r) = args.rounds {
        tune.max_rounds = r;
    }
    if let Some(t) = args.trials {
        tune.n_trials = t;
    }
    if let Some(s) = seed {
        tune.seed = s;
    }
    tune
}
