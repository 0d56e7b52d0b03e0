//! Seeded fixture generators shared by the test suites.

use rand::Rng;

use shoaltrack_core::mot::{BBox, Sequence, SequenceInfo, Track, TrackPoint};

fn point(frame: u32, cx: f64, cy: f64, w: f64, h: f64) -> TrackPoint<f64> {
    TrackPoint { frame, bbox: BBox::from_center(cx, cy, w, h), confidence: 1.0, interpolated: false }
}

/// A random micro ground-truth/prediction pair for oracle comparisons:
/// up to `max_ids` identities per side, up to `max_frames` frames, and at
/// most three boxes per frame per side. Prediction boxes are mostly jittered
/// copies of ground-truth boxes so matchings stay non-trivial across
/// thresholds. The ground truth is always non-empty.
pub fn random_micro_pair<R: Rng>(rng: &mut R, max_ids: u32, max_frames: u32) -> (Sequence<f64>, Sequence<f64>) {
    let frames = rng.random_range(1..=max_frames);
    let info = SequenceInfo { frame_count: frames, ..SequenceInfo::default() };

    let random_box = |rng: &mut R, frame: u32| {
        point(
            frame,
            rng.random_range(0.0..60.0),
            rng.random_range(0.0..60.0),
            rng.random_range(5.0..25.0),
            rng.random_range(5.0..25.0),
        )
    };

    let gt_tracks = loop {
        let mut tracks = Vec::new();
        for id in 1..=rng.random_range(1..=max_ids) {
            let mut pts: Vec<TrackPoint<f64>> = Vec::new();
            for f in 1..=frames {
                if rng.random::<f64>() < 0.7 {
                    pts.push(random_box(rng, f));
                }
            }
            if !pts.is_empty() {
                tracks.push(Track::new(id, pts).unwrap());
            }
        }
        if !tracks.is_empty() {
            break tracks;
        }
    };
    let gt = Sequence::from_tracks(info.clone(), gt_tracks);

    let mut pred_tracks = Vec::new();
    for id in 1..=rng.random_range(1..=max_ids) {
        let mut pts: Vec<TrackPoint<f64>> = Vec::new();
        for f in 1..=frames {
            if rng.random::<f64>() >= 0.7 {
                continue;
            }
            // Bias toward near-copies of some ground-truth box on this
            // frame so IoU crosses varied thresholds.
            let candidates: Vec<&TrackPoint<f64>> = gt
                .tracks()
                .unwrap()
                .iter()
                .filter_map(|t| t.points.iter().find(|p| p.frame == f))
                .collect();
            if !candidates.is_empty() && rng.random::<f64>() < 0.75 {
                let src = candidates[rng.random_range(0..candidates.len())];
                let (cx, cy) = src.bbox.center();
                pts.push(point(
                    f,
                    cx + rng.random_range(-8.0..8.0),
                    cy + rng.random_range(-8.0..8.0),
                    src.bbox.width,
                    src.bbox.height,
                ));
            } else {
                pts.push(random_box(rng, f));
            }
        }
        if !pts.is_empty() {
            pred_tracks.push(Track::new(id, pts).unwrap());
        }
    }
    let pred = Sequence::from_tracks(info, pred_tracks);
    (gt, pred)
}

/// Splits a track at the given frame: the point on `frame` is removed and
/// every later point moves to a freshly minted identity. Returns false when
/// the site cannot be split (frame missing or no points on both sides).
pub fn inject_gap(tracks: &mut Vec<Track<f64>>, next_id: &mut u32, track_id: u32, frame: u32) -> bool {
    let Some(idx) = tracks.iter().position(|t| t.id == track_id) else { return false };
    let Some(split_at) = tracks[idx].points.iter().position(|p| p.frame == frame) else { return false };
    if split_at == 0 || split_at + 1 >= tracks[idx].points.len() {
        return false;
    }
    let tail: Vec<TrackPoint<f64>> = tracks[idx].points.split_off(split_at + 1);
    tracks[idx].points.pop(); // drop the gap frame itself
    tracks.push(Track::new(*next_id, tail).unwrap());
    *next_id += 1;
    true
}

/// Random piecewise-linear tracks, then random single-frame gaps with
/// identity rebirth, for connector round trips.
pub fn random_fragmented_tracks<R: Rng>(rng: &mut R) -> Sequence<f64> {
    let mut tracks = Vec::new();
    let n_tracks = rng.random_range(1..6u32);
    for id in 1..=n_tracks {
        let start = rng.random_range(1..30u32);
        let len = rng.random_range(3..25u32);
        let (x0, y0) = (rng.random_range(0.0..500.0), rng.random_range(0.0..500.0));
        let (vx, vy) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let pts: Vec<TrackPoint<f64>> = (0..len)
            .map(|k| point(start + k, x0 + vx * k as f64, y0 + vy * k as f64, 16.0, 10.0))
            .collect();
        tracks.push(Track::new(id, pts).unwrap());
    }
    let mut next_id = n_tracks + 1;
    for _ in 0..rng.random_range(0..8) {
        let victim = tracks[rng.random_range(0..tracks.len())].id;
        let (lo, hi) = {
            let t = tracks.iter().find(|t| t.id == victim).unwrap();
            (t.first_frame(), t.last_frame())
        };
        if hi > lo + 1 {
            let frame = rng.random_range((lo + 1)..hi);
            inject_gap(&mut tracks, &mut next_id, victim, frame);
        }
    }
    let info = SequenceInfo {
        frame_count: tracks.iter().map(|t| t.last_frame()).max().unwrap_or(0),
        ..SequenceInfo::default()
    };
    Sequence::from_tracks(info, tracks)
}
