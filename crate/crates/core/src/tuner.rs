//! Black-box hyperparameter search over the tracking pipeline.
//!
//! Two strategies maximize HOTA on a development split: a coordinate sweep
//! that varies one parameter at a time over its grid and adopts the best
//! value before moving on, and a seeded uniform random search over the
//! parameter bounds. Both log every evaluation as a [`TrialRecord`] and are
//! reproducible from their inputs.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::connector::ConnectorConfig;
use crate::error::{Error, Result};
use crate::metrics::MetricsReport;
use crate::tracker::TrackerConfig;

/// The searchable configuration: tracker plus connector knobs, every field
/// addressable by its name.
#[derive(Debug, Clone, PartialEq, Default, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct PipelineParams {
    pub tracker: TrackerConfig<f64>,
    pub connector: ConnectorConfig<f64>,
}

impl PipelineParams {
    pub fn validate(&self) -> Result<()> {
        self.tracker.validate()?;
        self.connector.validate()
    }

    /// Sets a parameter by name. Integer values are accepted for real
    /// parameters; `cardinality_cap = 0` and `distance_cap <= 0` clear the
    /// respective option.
    pub fn set(&mut self, name: &str, value: &ParamValue) -> Result<()> {
        let bad = |msg: &str| Error::Param { name: name.to_string(), msg: msg.to_string() };
        match name {
            "variant" => {
                let ParamValue::Text(s) = value else { return Err(bad("expected text")) };
                self.tracker.variant = s.parse()?;
            }
            "high_thresh" => self.tracker.high_thresh = value.as_real().ok_or_else(|| bad("expected real"))?,
            "low_thresh" => self.tracker.low_thresh = value.as_real().ok_or_else(|| bad("expected real"))?,
            "new_track_thresh" => {
                self.tracker.new_track_thresh = value.as_real().ok_or_else(|| bad("expected real"))?
            }
            "match_thresh" => self.tracker.match_thresh = value.as_real().ok_or_else(|| bad("expected real"))?,
            "second_match_thresh" => {
                self.tracker.second_match_thresh = value.as_real().ok_or_else(|| bad("expected real"))?
            }
            "max_lost" => self.tracker.max_lost = value.as_int().ok_or_else(|| bad("expected integer"))? as u32,
            "cardinality_cap" => {
                let v = value.as_int().ok_or_else(|| bad("expected integer"))?;
                self.tracker.cardinality_cap = if v <= 0 { None } else { Some(v as u32) };
            }
            "rematch_lost" => self.tracker.rematch_lost = value.as_bool().ok_or_else(|| bad("expected bool"))?,
            "skip_creation" => self.tracker.skip_creation = value.as_bool().ok_or_else(|| bad("expected bool"))?,
            "min_hits_to_confirm" => {
                self.tracker.min_hits_to_confirm =
                    value.as_int().ok_or_else(|| bad("expected integer"))? as u32
            }
            "kalman_position_weight" => {
                self.tracker.kalman.position_weight = value.as_real().ok_or_else(|| bad("expected real"))?
            }
            "kalman_velocity_weight" => {
                self.tracker.kalman.velocity_weight = value.as_real().ok_or_else(|| bad("expected real"))?
            }
            "max_frame_gap" => {
                self.connector.max_frame_gap = value.as_int().ok_or_else(|| bad("expected integer"))? as u32
            }
            "distance_cap" => {
                let v = value.as_real().ok_or_else(|| bad("expected real"))?;
                self.connector.distance_cap = if v <= 0.0 { None } else { Some(v) };
            }
            _ => return Err(bad("no such parameter")),
        }
        Ok(())
    }

    /// Reads a parameter by name, for logging.
    pub fn get(&self, name: &str) -> Option<ParamValue> {
        Some(match name {
            "variant" => ParamValue::Text(self.tracker.variant.to_string()),
            "high_thresh" => ParamValue::Real(self.tracker.high_thresh),
            "low_thresh" => ParamValue::Real(self.tracker.low_thresh),
            "new_track_thresh" => ParamValue::Real(self.tracker.new_track_thresh),
            "match_thresh" => ParamValue::Real(self.tracker.match_thresh),
            "second_match_thresh" => ParamValue::Real(self.tracker.second_match_thresh),
            "max_lost" => ParamValue::Int(self.tracker.max_lost as i64),
            "cardinality_cap" => ParamValue::Int(self.tracker.cardinality_cap.map_or(0, |v| v as i64)),
            "rematch_lost" => ParamValue::Bool(self.tracker.rematch_lost),
            "skip_creation" => ParamValue::Bool(self.tracker.skip_creation),
            "min_hits_to_confirm" => ParamValue::Int(self.tracker.min_hits_to_confirm as i64),
            "kalman_position_weight" => ParamValue::Real(self.tracker.kalman.position_weight),
            "kalman_velocity_weight" => ParamValue::Real(self.tracker.kalman.velocity_weight),
            "max_frame_gap" => ParamValue::Int(self.connector.max_frame_gap as i64),
            "distance_cap" => ParamValue::Real(self.connector.distance_cap.unwrap_or(0.0)),
            _ => return None,
        })
    }
}

/// A parameter value in the search space.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Int(i64),
    Real(f64),
    Text(String),
}

impl ParamValue {
    pub fn as_real(&self) -> Option<f64> {
        match self {
            ParamValue::Real(v) => Some(*v),
            ParamValue::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            ParamValue::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            ParamValue::Bool(v) => Some(*v),
            _ => None,
        }
    }
}

impl std::fmt::Display for ParamValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamValue::Bool(v) => write!(f, "{v}"),
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Real(v) => write!(f, "{v:.6}"),
            ParamValue::Text(v) => write!(f, "{v}"),
        }
    }
}

/// Bounds or choices of one parameter.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ParamKind {
    Real { lo: f64, hi: f64 },
    Int { lo: i64, hi: i64 },
    Bool,
    Categorical { choices: Vec<String> },
}

/// One searchable parameter: bounds for random search plus a grid for
/// coordinate sweeps.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ParamSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: ParamKind,
    #[serde(default)]
    pub grid: Vec<ParamValue>,
}

/// Ordered collection of searchable parameters.
#[derive(Debug, Clone, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct SearchSpace {
    pub params: Vec<ParamSpec>,
}

impl SearchSpace {
    pub fn validate(&self) -> Result<()> {
        if self.params.is_empty() {
            return Err(Error::Config("search space has no parameters".to_string()));
        }
        for p in &self.params {
            match &p.kind {
                ParamKind::Real { lo, hi } => {
                    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                        return Err(Error::Config(format!("{}: real bounds must satisfy lo < hi", p.name)));
                    }
                    for g in &p.grid {
                        let v = g.as_real().ok_or_else(|| Error::Config(format!("{}: grid value must be real", p.name)))?;
                        if v < *lo || v > *hi {
                            return Err(Error::Config(format!("{}: grid value {v} outside bounds", p.name)));
                        }
                    }
                }
                ParamKind::Int { lo, hi } => {
                    if lo >= hi {
                        return Err(Error::Config(format!("{}: integer bounds must satisfy lo < hi", p.name)));
                    }
                    for g in &p.grid {
                        let v = g.as_int().ok_or_else(|| Error::Config(format!("{}: grid value must be integer", p.name)))?;
                        if v < *lo || v > *hi {
                            return Err(Error::Config(format!("{}: grid value {v} outside bounds", p.name)));
                        }
                    }
                }
                ParamKind::Bool => {}
                ParamKind::Categorical { choices } => {
                    if choices.is_empty() {
                        return Err(Error::Config(format!("{}: no choices", p.name)));
                    }
                }
            }
        }
        Ok(())
    }

    /// Grid used by the coordinate sweep; booleans and categoricals fall
    /// back to their full value set when no explicit grid is given.
    fn sweep_grid(&self, spec: &ParamSpec) -> Vec<ParamValue> {
        if !spec.grid.is_empty() {
            return spec.grid.clone();
        }
        match &spec.kind {
            ParamKind::Bool => vec![ParamValue::Bool(false), ParamValue::Bool(true)],
            ParamKind::Categorical { choices } => choices.iter().map(|c| ParamValue::Text(c.clone())).collect(),
            _ => Vec::new(),
        }
    }

    /// The search space over the thresholds the trackers expose plus the
    /// connector gap, the knobs that move HOTA the most.
    pub fn default_space() -> Self {
        let real = |name: &str, lo: f64, hi: f64, grid: &[f64]| ParamSpec {
            name: name.to_string(),
            kind: ParamKind::Real { lo, hi },
            grid: grid.iter().map(|&v| ParamValue::Real(v)).collect(),
        };
        let int = |name: &str, lo: i64, hi: i64, grid: &[i64]| ParamSpec {
            name: name.to_string(),
            kind: ParamKind::Int { lo, hi },
            grid: grid.iter().map(|&v| ParamValue::Int(v)).collect(),
        };
        Self {
            params: vec![
                real("high_thresh", 0.2, 0.9, &[0.3, 0.4, 0.5, 0.6, 0.7]),
                real("low_thresh", 0.02, 0.3, &[0.05, 0.1, 0.2]),
                real("new_track_thresh", 0.3, 0.9, &[0.4, 0.5, 0.6, 0.7]),
                real("match_thresh", 0.4, 1.0, &[0.6, 0.7, 0.8, 0.9]),
                int("max_lost", 1, 120, &[10, 30, 60]),
                int("max_frame_gap", 1, 450, &[30, 150, 300]),
            ],
        }
    }
}

/// One objective evaluation.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TrialRecord {
    pub index: usize,
    pub params: PipelineParams,
    /// Metrics of the evaluation; `None` when the objective failed.
    pub report: Option<MetricsReport<f64>>,
    /// Best HOTA seen up to and including this trial.
    pub incumbent_hota: f64,
    pub wall_time_s: f64,
}

impl TrialRecord {
    pub fn hota(&self) -> Option<f64> {
        self.report.as_ref().map(|r| r.hota)
    }
}

fn run_trial<F>(objective: &mut F, params: &PipelineParams, index: usize, incumbent: f64) -> TrialRecord
where
    F: FnMut(&PipelineParams) -> Result<MetricsReport<f64>>,
{
    let start = Instant::now();
    let report = objective(params).ok();
    let wall = start.elapsed().as_secs_f64();
    let incumbent_hota = report.as_ref().map_or(incumbent, |r| r.hota.max(incumbent));
    TrialRecord { index, params: params.clone(), report, incumbent_hota, wall_time_s: wall }
}

/// Coordinate sweep: rounds over the parameters in declared order, each
/// sweeping one parameter's grid while the others stay fixed and adopting
/// the best value (ties keep the incumbent). Stops after `max_rounds` or a
/// full round without change. The start config must evaluate successfully;
/// later failures are logged and skipped.
pub fn coordinate_ascent<F>(
    mut objective: F,
    space: &SearchSpace,
    start: &PipelineParams,
    max_rounds: usize,
) -> Result<(PipelineParams, Vec<TrialRecord>)>
where
    F: FnMut(&PipelineParams) -> Result<MetricsReport<f64>>,
{
    space.validate()?;
    start.validate()?;
    let mut log: Vec<TrialRecord> = Vec::new();

    let mut incumbent = start.clone();
    let first = run_trial(&mut objective, &incumbent, 0, f64::NEG_INFINITY);
    let mut best_hota = first.hota().ok_or_else(|| Error::Config("objective failed on the start config".to_string()))?;
    log.push(first);

    for _ in 0..max_rounds {
        let mut changed = false;
        for spec in &space.params {
            let current = incumbent.get(&spec.name).ok_or_else(|| Error::Param {
                name: spec.name.clone(),
                msg: "unknown parameter in search space".to_string(),
            })?;
            for value in space.sweep_grid(spec) {
                if value == current {
                    continue;
                }
                let mut candidate = incumbent.clone();
                candidate.set(&spec.name, &value)?;
                let trial = run_trial(&mut objective, &candidate, log.len(), best_hota);
                let hota = trial.hota();
                log.push(trial);
                if let Some(hota) = hota {
                    if hota > best_hota {
                        best_hota = hota;
                        incumbent = candidate;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok((incumbent, log))
}

/// Uniform random search over the parameter bounds, reproducible from the
/// seed. Returns the best-scoring configuration.
pub fn random_search<F>(
    mut objective: F,
    space: &SearchSpace,
    base: &PipelineParams,
    n_trials: usize,
    seed: u64,
) -> Result<(PipelineParams, Vec<TrialRecord>)>
where
    F: FnMut(&PipelineParams) -> Result<MetricsReport<f64>>,
{
    space.validate()?;
    base.validate()?;
    if n_trials < 1 {
        return Err(Error::Config("n_trials must be >= 1".to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log: Vec<TrialRecord> = Vec::new();
    let mut best: Option<(f64, PipelineParams)> = None;

    for index in 0..n_trials {
        let mut candidate = base.clone();
        for spec in &space.params {
            let value = match &spec.kind {
                ParamKind::Real { lo, hi } => ParamValue::Real(rng.random_range(*lo..=*hi)),
                ParamKind::Int { lo, hi } => ParamValue::Int(rng.random_range(*lo..=*hi)),
                ParamKind::Bool => ParamValue::Bool(rng.random_range(0..2) == 1),
                ParamKind::Categorical { choices } => {
                    ParamValue::Text(choices[rng.random_range(0..choices.len())].clone())
                }
            };
            candidate.set(&spec.name, &value)?;
        }
        let incumbent = best.as_ref().map_or(f64::NEG_INFINITY, |(h, _)| *h);
        let trial = run_trial(&mut objective, &candidate, index, incumbent);
        if let Some(hota) = trial.hota() {
            if best.as_ref().is_none_or(|(h, _)| hota > *h) {
                best = Some((hota, candidate));
            }
        }
        log.push(trial);
    }

    let (_, params) = best.ok_or_else(|| Error::Config("every trial failed".to_string()))?;
    Ok((params, log))
}

/// Renders the trial log as CSV: trial index, the searched parameters in
/// space order, the metric columns, and the running incumbent HOTA. Failed
/// trials leave the metric cells empty.
pub fn trial_log_csv(space: &SearchSpace, log: &[TrialRecord]) -> String {
    let mut out = String::from("trial");
    for p in &space.params {
        out.push(',');
        out.push_str(&p.name);
    }
    out.push_str(",hota,deta,assa,loca,ids,fn,fp,incumbent_hota\n");
    for t in log {
        out.push_str(&t.index.to_string());
        for p in &space.params {
            out.push(',');
            if let Some(v) = t.params.get(&p.name) {
                out.push_str(&v.to_string());
            }
        }
        match &t.report {
            Some(r) => out.push_str(&format!(
                ",{:.6},{:.6},{:.6},{:.6},{},{},{}",
                r.hota, r.deta, r.assa, r.loca, r.id_switches, r.false_negatives, r.false_positives
            )),
            None => out.push_str(",,,,,,,"),
        }
        out.push_str(&format!(",{:.6}\n", t.incumbent_hota));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report_with_hota(h: f64) -> MetricsReport<f64> {
        MetricsReport {
            hota: h,
            deta: h,
            assa: h,
            loca: 1.0,
            id_switches: 0,
            false_negatives: 0,
            false_positives: 0,
            per_alpha: Vec::new(),
        }
    }

    fn one_param_space(grid: &[f64]) -> SearchSpace {
        SearchSpace {
            params: vec![ParamSpec {
                name: "match_thresh".to_string(),
                kind: ParamKind::Real { lo: 0.4, hi: 1.0 },
                grid: grid.iter().map(|&v| ParamValue::Real(v)).collect(),
            }],
        }
    }

    #[test]
    fn one_parameter_peak_is_found_in_one_round() {
        let space = one_param_space(&[0.5, 0.6, 0.7, 0.8, 0.9]);
        let objective = |p: &PipelineParams| {
            let x = p.tracker.match_thresh;
            Ok(report_with_hota(1.0 - (x - 0.7).abs()))
        };
        let (best, log) = coordinate_ascent(objective, &space, &PipelineParams::default(), 5).unwrap();
        assert_eq!(best.tracker.match_thresh, 0.7);
        assert!(log.len() <= 1 + 2 * 5);
    }

    #[test]
    fn separable_objective_reaches_both_argmaxes() {
        let space = SearchSpace {
            params: vec![
                ParamSpec {
                    name: "high_thresh".to_string(),
                    kind: ParamKind::Real { lo: 0.2, hi: 0.9 },
                    grid: [0.3, 0.5, 0.7].iter().map(|&v| ParamValue::Real(v)).collect(),
                },
                ParamSpec {
                    name: "max_lost".to_string(),
                    kind: ParamKind::Int { lo: 1, hi: 100 },
                    grid: [5, 30, 60].iter().map(|&v| ParamValue::Int(v)).collect(),
                },
            ],
        };
        // f(a) + g(b), maximized at a = 0.3 and b = 60.
        let objective = |p: &PipelineParams| {
            let f = 0.5 - (p.tracker.high_thresh - 0.3).abs();
            let g = p.tracker.max_lost as f64 / 200.0;
            Ok(report_with_hota(f + g))
        };
        // Exhaustive grid oracle over the 9 combinations.
        let mut best_exhaustive = (f64::NEG_INFINITY, PipelineParams::default());
        for &a in &[0.3, 0.5, 0.7] {
            for &b in &[5i64, 30, 60] {
                let mut p = PipelineParams::default();
                p.set("high_thresh", &ParamValue::Real(a)).unwrap();
                p.set("max_lost", &ParamValue::Int(b)).unwrap();
                let h = objective(&p).unwrap().hota;
                if h > best_exhaustive.0 {
                    best_exhaustive = (h, p);
                }
            }
        }
        let (best, log) =
            coordinate_ascent(objective, &space, &PipelineParams::default(), 4).unwrap();
        assert_eq!(best.tracker.high_thresh, best_exhaustive.1.tracker.high_thresh);
        assert_eq!(best.tracker.max_lost, best_exhaustive.1.tracker.max_lost);
        // Monotone incumbent column.
        for pair in log.windows(2) {
            assert!(pair[1].incumbent_hota >= pair[0].incumbent_hota);
        }
    }

    #[test]
    fn already_optimal_start_stops_after_one_round() {
        let space = one_param_space(&[0.6, 0.8]);
        let objective = |p: &PipelineParams| {
            // 0.8 (the default) is the peak.
            Ok(report_with_hota(1.0 - (p.tracker.match_thresh - 0.8).abs()))
        };
        let (best, log) = coordinate_ascent(objective, &space, &PipelineParams::default(), 10).unwrap();
        assert_eq!(best.tracker.match_thresh, 0.8);
        // Start trial plus one sweep evaluating only the non-incumbent value.
        assert_eq!(log.len(), 2);
    }

    #[test]
    fn ties_keep_the_incumbent() {
        let space = one_param_space(&[0.5, 0.9]);
        let objective = |_: &PipelineParams| Ok(report_with_hota(0.7));
        let (best, _) = coordinate_ascent(objective, &space, &PipelineParams::default(), 3).unwrap();
        assert_eq!(best.tracker.match_thresh, 0.8, "flat objective leaves the start value");
    }

    #[test]
    fn failed_values_are_recorded_and_skipped() {
        let space = one_param_space(&[0.5, 0.7]);
        let objective = |p: &PipelineParams| {
            if p.tracker.match_thresh == 0.7 {
                Err(Error::Config("boom".to_string()))
            } else {
                Ok(report_with_hota(p.tracker.match_thresh))
            }
        };
        let (best, log) = coordinate_ascent(objective, &space, &PipelineParams::default(), 2).unwrap();
        assert_eq!(best.tracker.match_thresh, 0.8);
        assert!(log.iter().any(|t| t.report.is_none()));
    }

    #[test]
    fn random_search_single_trial_returns_it() {
        let space = one_param_space(&[]);
        let objective = |p: &PipelineParams| Ok(report_with_hota(p.tracker.match_thresh));
        let (best, log) = random_search(objective, &space, &PipelineParams::default(), 1, 9).unwrap();
        assert_eq!(log.len(), 1);
        assert_eq!(Some(best.tracker.match_thresh), log[0].params.get("match_thresh").unwrap().as_real());
    }

    #[test]
    fn random_search_is_reproducible() {
        let space = SearchSpace::default_space();
        let objective = |p: &PipelineParams| Ok(report_with_hota(p.tracker.high_thresh));
        let (a_best, a_log) = random_search(objective, &space, &PipelineParams::default(), 20, 123).unwrap();
        let (b_best, b_log) = random_search(objective, &space, &PipelineParams::default(), 20, 123).unwrap();
        assert_eq!(a_best, b_best);
        assert_eq!(a_log.len(), b_log.len());
        for (x, y) in a_log.iter().zip(&b_log) {
            assert_eq!(x.params, y.params);
            assert_eq!(x.hota(), y.hota());
        }
    }

    #[test]
    fn random_search_finds_discrete_maximum() {
        let space = SearchSpace {
            params: vec![ParamSpec {
                name: "max_lost".to_string(),
                kind: ParamKind::Int { lo: 1, hi: 12 },
                grid: Vec::new(),
            }],
        };
        let objective = |p: &PipelineParams| Ok(report_with_hota(p.tracker.max_lost as f64));
        let (best, _) = random_search(objective, &space, &PipelineParams::default(), 200, 7).unwrap();
        assert_eq!(best.tracker.max_lost, 12, "200 uniform draws cover a 12-point space");
    }

    #[test]
    fn best_config_reproduces_recorded_hota() {
        let space = SearchSpace::default_space();
        let objective = |p: &PipelineParams| {
            Ok(report_with_hota(p.tracker.high_thresh * 0.3 + p.connector.max_frame_gap as f64 / 1000.0))
        };
        let (best, log) = coordinate_ascent(objective, &space, &PipelineParams::default(), 3).unwrap();
        let recorded = log.iter().filter_map(|t| t.hota()).fold(f64::NEG_INFINITY, f64::max);
        let replayed = objective(&best).unwrap().hota;
        assert_eq!(replayed, recorded);
    }

    #[test]
    fn csv_has_param_and_incumbent_columns() {
        let space = one_param_space(&[0.5, 0.7]);
        let objective = |p: &PipelineParams| Ok(report_with_hota(p.tracker.match_thresh));
        let (_, log) = coordinate_ascent(objective, &space, &PipelineParams::default(), 1).unwrap();
        let csv = trial_log_csv(&space, &log);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "trial,match_thresh,hota,deta,assa,loca,ids,fn,fp,incumbent_hota"
        );
        assert_eq!(lines.count(), log.len());
    }

    #[test]
    fn search_space_validation_rejects_bad_bounds_and_grids() {
        let bad_bounds = SearchSpace {
            params: vec![ParamSpec {
                name: "high_thresh".to_string(),
                kind: ParamKind::Real { lo: 0.9, hi: 0.2 },
                grid: Vec::new(),
            }],
        };
        assert!(bad_bounds.validate().is_err());

        let out_of_bounds_grid = SearchSpace {
            params: vec![ParamSpec {
                name: "high_thresh".to_string(),
                kind: ParamKind::Real { lo: 0.2, hi: 0.9 },
                grid: vec![ParamValue::Real(0.95)],
            }],
        };
        assert!(out_of_bounds_grid.validate().is_err());

        let empty = SearchSpace { params: Vec::new() };
        assert!(empty.validate().is_err());

        let no_choices = SearchSpace {
            params: vec![ParamSpec {
                name: "variant".to_string(),
                kind: ParamKind::Categorical { choices: Vec::new() },
                grid: Vec::new(),
            }],
        };
        assert!(no_choices.validate().is_err());
    }

    #[test]
    fn unknown_parameter_rejected() {
        let mut p = PipelineParams::default();
        assert!(p.set("warp_factor", &ParamValue::Real(9.0)).is_err());
        assert!(p.get("warp_factor").is_none());
    }

    #[test]
    fn set_get_round_trip_all_names() {
        let mut p = PipelineParams::default();
        let names = [
            "variant",
            "high_thresh",
            "low_thresh",
            "new_track_thresh",
            "match_thresh",
            "second_match_thresh",
            "max_lost",
            "cardinality_cap",
            "rematch_lost",
            "skip_creation",
            "min_hits_to_confirm",
            "kalman_position_weight",
            "kalman_velocity_weight",
            "max_frame_gap",
            "distance_cap",
        ];
        for name in names {
            let v = p.get(name).unwrap_or_else(|| panic!("missing {name}"));
            p.set(name, &v).unwrap_or_else(|e| panic!("set {name}: {e}"));
            assert_eq!(p.get(name).unwrap(), v, "{name} round trip");
        }
    }
}
