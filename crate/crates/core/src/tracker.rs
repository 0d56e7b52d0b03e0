//! Online tracking-by-detection.
//!
//! Two association variants share one lifecycle: `sort` runs a single
//! IoU-gated assignment over confident detections, `bytetrack` adds a second
//! stage that matches low-confidence detections to the tracks left over from
//! the first. Emitted track points carry the matched detection's box; the
//! Kalman state only drives prediction for association.
//!
//! Two fixed-cardinality extensions can be switched on: `skip_creation`
//! refuses to spawn tracks beyond `cardinality_cap`, and `rematch_lost`
//! re-assigns otherwise-unmatched tracks to this frame's detections even
//! when the detection is already taken, so two tracks may share one box for
//! a frame instead of one of them aging toward deletion.

use ndarray::Array2;

use crate::assign::solve_lap;
use crate::error::{Error, Result};
use crate::geometry::{iou, iou_distance};
use crate::kalman::{kf_init, kf_predict, kf_update, state_bbox, KalmanParams, KalmanState};
use crate::mot::{Detection, Sequence, Track, TrackPoint};
use crate::scalar::{real, Real, Scalar};

/// Association scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Sort,
    ByteTrack,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sort" => Ok(Variant::Sort),
            "bytetrack" => Ok(Variant::ByteTrack),
            other => Err(Error::Config(format!("unknown tracker variant {other:?}"))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::Sort => write!(f, "sort"),
            Variant::ByteTrack => write!(f, "bytetrack"),
        }
    }
}

/// Every tunable hyperparameter of the association pipeline.
///
/// Gates are IoU distances (`1 - IoU`), thresholds are detector confidences.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerConfig<T: Real = Scalar> {
    pub variant: Variant,
    /// Confidence at or above which a detection joins the first stage.
    pub high_thresh: T,
    /// Confidence below which a detection is discarded entirely.
    pub low_thresh: T,
    /// Minimum confidence for an unmatched detection to spawn a track.
    pub new_track_thresh: T,
    /// IoU-distance gate of the first association stage.
    pub match_thresh: T,
    /// IoU-distance gate of the second (low-confidence) stage.
    pub second_match_thresh: T,
    /// Frames a track may stay lost before removal.
    pub max_lost: u32,
    /// Upper bound on concurrently live tracks, used by `skip_creation`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cardinality_cap: Option<u32>,
    /// Re-assign unmatched tracks to already-used detections.
    pub rematch_lost: bool,
    /// Refuse to create tracks once `cardinality_cap` is reached.
    pub skip_creation: bool,
    /// Matched frames required before a track is confirmed and emits.
    pub min_hits_to_confirm: u32,
    pub kalman: KalmanParams<T>,
}

impl<T: Real> Default for TrackerConfig<T> {
    fn default() -> Self {
        Self {
            variant: Variant::ByteTrack,
            high_thresh: real(0.5),
            low_thresh: real(0.1),
            new_track_thresh: real(0.6),
            match_thresh: real(0.8),
            second_match_thresh: real(0.5),
            max_lost: 30,
            cardinality_cap: None,
            rematch_lost: false,
            skip_creation: false,
            min_hits_to_confirm: 1,
            kalman: KalmanParams::default(),
        }
    }
}

impl<T: Real> TrackerConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(T::zero() <= self.low_thresh && self.low_thresh < self.high_thresh && self.high_thresh <= T::one()) {
            return Err(Error::Config(format!(
                "thresholds must satisfy 0 <= low < high <= 1, got low {} high {}",
                self.low_thresh, self.high_thresh
            )));
        }
        if !(self.match_thresh > T::zero() && self.match_thresh <= T::one()) {
            return Err(Error::Config(format!("match_thresh must be in (0, 1], got {}", self.match_thresh)));
        }
        if !(self.second_match_thresh > T::zero() && self.second_match_thresh <= T::one()) {
            return Err(Error::Config(format!(
                "second_match_thresh must be in (0, 1], got {}",
                self.second_match_thresh
            )));
        }
        if !(self.new_track_thresh >= T::zero() && self.new_track_thresh <= T::one()) {
            return Err(Error::Config(format!("new_track_thresh must be in [0, 1], got {}", self.new_track_thresh)));
        }
        if self.cardinality_cap == Some(0) {
            return Err(Error::Config("cardinality_cap must be >= 1 when present".to_string()));
        }
        if self.min_hits_to_confirm < 1 {
            return Err(Error::Config("min_hits_to_confirm must be >= 1".to_string()));
        }
        if !(self.kalman.position_weight > T::zero() && self.kalman.velocity_weight > T::zero()) {
            return Err(Error::Config("kalman noise weights must be positive".to_string()));
        }
        Ok(())
    }
}

/// Lifecycle of a live track.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackStatus {
    /// Created but not yet confirmed; does not emit.
    Tentative,
    /// Matched recently; emits on matched frames.
    Active,
    /// Unmatched for at least one frame, retained for re-acquisition.
    Lost,
}

/// A track under construction inside the tracker.
#[derive(Debug, Clone)]
pub struct LiveTrack<T: Real = Scalar> {
    pub id: u32,
    pub state: KalmanState<T>,
    pub status: TrackStatus,
    pub frames_since_update: u32,
    pub hit_count: u32,
    /// Emitted output points, in frame order.
    pub points: Vec<TrackPoint<T>>,
    /// Frames on which this track shared a detection through a rematch.
    pub rematch_frames: Vec<u32>,
}

/// Decides whether a candidate detection may spawn a new track given the
/// number of currently live tracks.
pub fn admit_new_track<T: Real>(live_tracks: usize, config: &TrackerConfig<T>) -> bool {
    match (config.skip_creation, config.cardinality_cap) {
        (true, Some(cap)) => live_tracks < cap as usize,
        _ => true,
    }
}

/// Online tracker state; feed frames in strictly increasing order.
#[derive(Debug, Clone)]
pub struct Tracker<T: Real = Scalar> {
    config: TrackerConfig<T>,
    live: Vec<LiveTrack<T>>,
    retired: Vec<LiveTrack<T>>,
    next_id: u32,
    last_frame: Option<u32>,
}

impl<T: Real> Tracker<T> {
    pub fn new(config: TrackerConfig<T>) -> Result<Self> {
        config.validate()?;
        Ok(Self { config, live: Vec::new(), retired: Vec::new(), next_id: 1, last_frame: None })
    }

    pub fn config(&self) -> &TrackerConfig<T> {
        &self.config
    }

    /// Number of live (tentative, active, or lost) tracks.
    pub fn live_count(&self) -> usize {
        self.live.len()
    }

    pub fn live_tracks(&self) -> &[LiveTrack<T>] {
        &self.live
    }

    /// Processes one frame and returns the `(id, point)` pairs emitted.
    pub fn step(&mut self, frame: u32, detections: &[Detection<T>]) -> Result<Vec<(u32, TrackPoint<T>)>> {
        if let Some(last) = self.last_frame {
            if frame <= last {
                return Err(Error::OutOfOrderFrame { frame, last });
            }
        } else if frame < 1 {
            return Err(Error::OutOfOrderFrame { frame, last: 0 });
        }
        for d in detections {
            if d.frame != frame {
                return Err(Error::InvalidDetection {
                    frame,
                    msg: format!("detection carries frame {}", d.frame),
                });
            }
            if !d.bbox.is_valid() {
                return Err(Error::InvalidDetection { frame, msg: "box is degenerate or non-finite".to_string() });
            }
            if d.confidence < T::zero() || d.confidence > T::one() {
                return Err(Error::InvalidDetection { frame, msg: "confidence outside [0,1]".to_string() });
            }
        }
        self.last_frame = Some(frame);

        let cfg = self.config.clone();

        // Detections below low_thresh are dropped before any stage.
        let kept: Vec<&Detection<T>> = detections.iter().filter(|d| d.confidence >= cfg.low_thresh).collect();
        let high: Vec<usize> = (0..kept.len()).filter(|&i| kept[i].confidence >= cfg.high_thresh).collect();
        let low: Vec<usize> = (0..kept.len()).filter(|&i| kept[i].confidence < cfg.high_thresh).collect();

        for track in self.live.iter_mut() {
            track.state = kf_predict(&track.state, &cfg.kalman);
        }
        let predicted: Vec<_> = self.live.iter().map(|t| state_bbox(&t.state)).collect();

        let mut det_used = vec![false; kept.len()];
        let mut track_matched = vec![false; self.live.len()];
        let mut assignments: Vec<(usize, usize)> = Vec::new(); // (track index, kept det index)

        // First association: confident detections against every live track.
        let pool: Vec<usize> = (0..self.live.len()).collect();
        let cost = Array2::from_shape_fn((pool.len(), high.len()), |(ti, dj)| {
            iou_distance(&predicted[pool[ti]], &kept[high[dj]].bbox)
        });
        for (ti, dj) in solve_lap(&cost, cfg.match_thresh).matches {
            assignments.push((pool[ti], high[dj]));
            track_matched[pool[ti]] = true;
            det_used[high[dj]] = true;
        }

        // Second association: low-confidence detections against the leftovers.
        if cfg.variant == Variant::ByteTrack {
            let rest: Vec<usize> = (0..self.live.len()).filter(|&i| !track_matched[i]).collect();
            let cost = Array2::from_shape_fn((rest.len(), low.len()), |(ti, dj)| {
                iou_distance(&predicted[rest[ti]], &kept[low[dj]].bbox)
            });
            for (ti, dj) in solve_lap(&cost, cfg.second_match_thresh).matches {
                assignments.push((rest[ti], low[dj]));
                track_matched[rest[ti]] = true;
                det_used[low[dj]] = true;
            }
        }

        let mut emitted: Vec<(u32, TrackPoint<T>)> = Vec::new();
        for &(ti, dj) in &assignments {
            let det = kept[dj];
            let track = &mut self.live[ti];
            track.state = kf_update(&track.state, &det.bbox, &cfg.kalman)?;
            track.frames_since_update = 0;
            track.hit_count += 1;
            if track.hit_count >= cfg.min_hits_to_confirm {
                track.status = TrackStatus::Active;
            }
            if track.status == TrackStatus::Active {
                let point = TrackPoint { frame, bbox: det.bbox, confidence: det.confidence, interpolated: false };
                track.points.push(point);
                emitted.push((track.id, point));
            }
        }

        // Rematch: unmatched tracks may take an already-used detection, so a
        // box can serve two tracks this frame. One-to-one only among the
        // rematched tracks themselves, by IoU of the predicted box.
        if cfg.rematch_lost {
            let orphans: Vec<usize> = (0..self.live.len()).filter(|&i| !track_matched[i]).collect();
            if !orphans.is_empty() && !kept.is_empty() {
                let cost = Array2::from_shape_fn((orphans.len(), kept.len()), |(ti, dj)| {
                    let overlap = iou(&state_bbox(&self.live[orphans[ti]].state), &kept[dj].bbox);
                    if overlap > T::zero() {
                        T::one() - overlap
                    } else {
                        T::infinity()
                    }
                });
                for (ti, dj) in solve_lap(&cost, T::one()).matches {
                    let det = kept[dj];
                    let track = &mut self.live[orphans[ti]];
                    track.state = kf_update(&track.state, &det.bbox, &cfg.kalman)?;
                    track.frames_since_update = 0;
                    track.hit_count += 1;
                    track.rematch_frames.push(frame);
                    track_matched[orphans[ti]] = true;
                    if track.hit_count >= cfg.min_hits_to_confirm {
                        track.status = TrackStatus::Active;
                    }
                    if track.status == TrackStatus::Active {
                        let point =
                            TrackPoint { frame, bbox: det.bbox, confidence: det.confidence, interpolated: false };
                        track.points.push(point);
                        emitted.push((track.id, point));
                    }
                }
            }
        }

        // Age the tracks that stayed unmatched. Tentative tracks die at the
        // first miss; lost tracks survive up to max_lost missed frames.
        let mut index = 0;
        let max_lost = cfg.max_lost;
        let mut removed: Vec<LiveTrack<T>> = Vec::new();
        self.live.retain_mut(|track| {
            let matched = track_matched[index];
            index += 1;
            if matched {
                return true;
            }
            track.frames_since_update += 1;
            if track.status == TrackStatus::Tentative {
                if !track.points.is_empty() {
                    removed.push(track.clone());
                }
                return false;
            }
            track.status = TrackStatus::Lost;
            if track.frames_since_update > max_lost {
                removed.push(track.clone());
                return false;
            }
            true
        });
        self.retired.extend(removed);

        // Spawn tracks from leftover confident detections, capped when the
        // fixed-cardinality extension is on.
        for &dj in &high {
            if det_used[dj] {
                continue;
            }
            let det = kept[dj];
            if det.confidence < cfg.new_track_thresh {
                continue;
            }
            if !admit_new_track(self.live.len(), &cfg) {
                continue;
            }
            let status = if 1 >= cfg.min_hits_to_confirm { TrackStatus::Active } else { TrackStatus::Tentative };
            let mut track = LiveTrack {
                id: self.next_id,
                state: kf_init(&det.bbox, &cfg.kalman),
                status,
                frames_since_update: 0,
                hit_count: 1,
                points: Vec::new(),
                rematch_frames: Vec::new(),
            };
            self.next_id += 1;
            if status == TrackStatus::Active {
                let point = TrackPoint { frame, bbox: det.bbox, confidence: det.confidence, interpolated: false };
                track.points.push(point);
                emitted.push((track.id, point));
            }
            self.live.push(track);
        }

        emitted.sort_by_key(|(id, _)| *id);
        Ok(emitted)
    }

    /// Consumes the tracker and returns every emitted track as a sequence.
    pub fn into_sequence(self, info: crate::mot::SequenceInfo) -> Sequence<T> {
        let mut tracks: Vec<Track<T>> = self
            .retired
            .into_iter()
            .chain(self.live)
            .filter(|t| !t.points.is_empty())
            .map(|t| Track { id: t.id, points: t.points })
            .collect();
        tracks.sort_by_key(|t| t.id);
        Sequence::from_tracks(info, tracks)
    }
}

/// Runs a whole detection sequence through the tracker.
///
/// Every frame in `1..=frame_count` is stepped, including empty ones, so
/// lost-track aging advances on frames without detections. Output track ids
/// are assigned in creation order starting at 1.
pub fn run_sequence<T: Real>(detections: &Sequence<T>, config: &TrackerConfig<T>) -> Result<Sequence<T>> {
    let grouped = detections.detections_by_frame()?;
    let mut tracker = Tracker::new(config.clone())?;
    for (idx, frame_dets) in grouped.iter().enumerate() {
        tracker.step(idx as u32 + 1, frame_dets)?;
    }
    let mut info = detections.info.clone();
    info.frame_count = detections.frame_count();
    let out = tracker.into_sequence(info);
    debug_assert!(out.validate().is_ok(), "tracker output violates sequence invariants");
    Ok(out)
}
