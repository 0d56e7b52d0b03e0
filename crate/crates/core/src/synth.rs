//! Synthetic school generator and detection corruptor.
//!
//! [`generate_school`] simulates schooling trajectories in a bounded arena
//! with the classic boids rules (separation, alignment, cohesion) plus wall
//! avoidance, at constant swimming speed, and emits them as ground-truth
//! tracks with constant-size boxes. [`corrupt`] turns ground truth into a
//! detection stream by merging heavily overlapping boxes into one (the
//! occlusion model), dropping boxes at random, jittering the survivors,
//! adding uniform clutter, and sampling confidences. Both operations are
//! pure functions of their configuration, seed included.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::error::{Error, Result};
use crate::geometry::iou;
use crate::mot::{BBox, Detection, Sequence, SequenceInfo, Track, TrackPoint};

/// School simulation parameters. Weights scale steering forces in pixels per
/// frame squared; `speed` is the constant per-frame displacement.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchoolConfig {
    pub n_fish: u32,
    pub arena_width: f64,
    pub arena_height: f64,
    pub fps: f64,
    /// Sequence length in seconds; frame count is `round(duration * fps)`.
    pub duration: f64,
    pub box_width: f64,
    pub box_height: f64,
    /// Per-frame displacement of every fish, in pixels.
    pub speed: f64,
    pub cohesion: f64,
    pub alignment: f64,
    pub separation: f64,
    /// Radius within which neighbors influence cohesion and alignment.
    pub neighbor_radius: f64,
    /// Radius of the separation rule.
    pub separation_radius: f64,
    /// Distance from a wall at which avoidance sets in.
    pub wall_margin: f64,
    /// Std of the per-frame random heading perturbation, radians.
    pub heading_jitter: f64,
    pub seed: u64,
}

impl Default for SchoolConfig {
    fn default() -> Self {
        Self {
            n_fish: 10,
            arena_width: 2456.0,
            arena_height: 2048.0,
            fps: 15.0,
            duration: 60.0,
            box_width: 80.0,
            box_height: 40.0,
            speed: 6.0,
            cohesion: 0.02,
            alignment: 0.15,
            separation: 1.2,
            neighbor_radius: 320.0,
            separation_radius: 110.0,
            wall_margin: 160.0,
            heading_jitter: 0.05,
            seed: 1,
        }
    }
}

impl SchoolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_fish < 1 {
            return Err(Error::Config("n_fish must be >= 1".to_string()));
        }
        if self.arena_width <= 0.0 || self.arena_height <= 0.0 {
            return Err(Error::Config("arena dimensions must be positive".to_string()));
        }
        if self.box_width <= 0.0 || self.box_height <= 0.0 {
            return Err(Error::Config("box dimensions must be positive".to_string()));
        }
        if self.fps <= 0.0 {
            return Err(Error::Config("fps must be positive".to_string()));
        }
        if self.duration <= 0.0 {
            return Err(Error::Config("duration must be positive".to_string()));
        }
        if self.speed <= 0.0 {
            return Err(Error::Config("speed must be positive".to_string()));
        }
        if (self.duration * self.fps).round() < 1.0 {
            return Err(Error::Config("duration * fps must round to at least one frame".to_string()));
        }
        Ok(())
    }

    pub fn frame_count(&self) -> u32 {
        (self.duration * self.fps).round() as u32
    }
}

/// Detection corruption parameters. The default is the identity corruption:
/// detections equal the ground-truth boxes with confidence 1.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorruptionConfig {
    /// Std of the Gaussian center jitter, pixels.
    pub position_jitter_std: f64,
    /// Per-box per-frame dropout probability.
    pub dropout_prob: f64,
    /// Expected number of false boxes per frame (Poisson).
    pub clutter_rate: f64,
    /// Pairs of true boxes with IoU strictly above this merge into one box;
    /// 1.0 disables merging.
    pub merge_iou_thresh: f64,
    pub true_conf_mean: f64,
    pub true_conf_std: f64,
    pub clutter_conf_mean: f64,
    pub clutter_conf_std: f64,
    pub seed: u64,
}

impl Default for CorruptionConfig {
    fn default() -> Self {
        Self {
            position_jitter_std: 0.0,
            dropout_prob: 0.0,
            clutter_rate: 0.0,
            merge_iou_thresh: 1.0,
            true_conf_mean: 1.0,
            true_conf_std: 0.0,
            clutter_conf_mean: 0.3,
            clutter_conf_std: 0.1,
            seed: 1,
        }
    }
}

impl CorruptionConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("dropout_prob", self.dropout_prob),
            ("merge_iou_thresh", self.merge_iou_thresh),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} must be in [0,1], got {v}")));
            }
        }
        for (name, v) in [
            ("position_jitter_std", self.position_jitter_std),
            ("clutter_rate", self.clutter_rate),
            ("true_conf_std", self.true_conf_std),
            ("clutter_conf_std", self.clutter_conf_std),
        ] {
            if v < 0.0 {
                return Err(Error::Config(format!("{name} must be non-negative, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
struct Fish {
    pos: (f64, f64),
    vel: (f64, f64),
}

fn norm(v: (f64, f64)) -> f64 {
    (v.0 * v.0 + v.1 * v.1).sqrt()
}

/// Simulates the school and returns it as ground-truth tracks, one per fish,
/// each spanning every frame with confidence 1.
pub fn generate_school(config: &SchoolConfig) -> Result<Sequence<f64>> {
    config.validate()?;
    let frames = config.frame_count();
    let n = config.n_fish as usize;
    let (w, h) = (config.arena_width, config.arena_height);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let margin = config.wall_margin.min(w / 2.0).min(h / 2.0);
    let mut fish: Vec<Fish> = (0..n)
        .map(|_| {
            let pos = (rng.random_range(margin..(w - margin)), rng.random_range(margin..(h - margin)));
            let heading = rng.random_range(0.0..std::f64::consts::TAU);
            Fish { pos, vel: (heading.cos() * config.speed, heading.sin() * config.speed) }
        })
        .collect();

    let jitter = Normal::new(0.0, config.heading_jitter).map_err(|e| Error::Numeric(e.to_string()))?;
    let mut points: Vec<Vec<TrackPoint<f64>>> = vec![Vec::with_capacity(frames as usize); n];

    for frame in 1..=frames {
        for (i, f) in fish.iter().enumerate() {
            points[i].push(TrackPoint {
                frame,
                bbox: BBox::from_center(f.pos.0, f.pos.1, config.box_width, config.box_height),
                confidence: 1.0,
                interpolated: false,
            });
        }
        if frame == frames {
            break;
        }

        let snapshot = fish.clone();
        for (i, f) in fish.iter_mut().enumerate() {
            let me = snapshot[i];
            let mut force = (0.0, 0.0);

            // Cohesion and alignment over the perception neighborhood.
            let mut centroid = (0.0, 0.0);
            let mut mean_vel = (0.0, 0.0);
            let mut neighbors = 0.0;
            for (j, other) in snapshot.iter().enumerate() {
                if j == i {
                    continue;
                }
                let d = norm((other.pos.0 - me.pos.0, other.pos.1 - me.pos.1));
                if d < config.neighbor_radius {
                    centroid.0 += other.pos.0;
                    centroid.1 += other.pos.1;
                    mean_vel.0 += other.vel.0;
                    mean_vel.1 += other.vel.1;
                    neighbors += 1.0;
                }
                // Separation pushes away, fading linearly with distance.
                if d < config.separation_radius && d > 1e-9 {
                    let falloff = 1.0 - d / config.separation_radius;
                    force.0 += config.separation * (me.pos.0 - other.pos.0) / d * falloff;
                    force.1 += config.separation * (me.pos.1 - other.pos.1) / d * falloff;
                }
            }
            if neighbors > 0.0 {
                force.0 += config.cohesion * (centroid.0 / neighbors - me.pos.0) / 100.0;
                force.1 += config.cohesion * (centroid.1 / neighbors - me.pos.1) / 100.0;
                force.0 += config.alignment * (mean_vel.0 / neighbors - me.vel.0);
                force.1 += config.alignment * (mean_vel.1 / neighbors - me.vel.1);
            }

            // Wall avoidance grows quadratically inside the margin.
            let wall_push = config.speed * 0.8;
            if me.pos.0 < margin {
                let t = 1.0 - me.pos.0 / margin;
                force.0 += wall_push * t * t;
            }
            if me.pos.0 > w - margin {
                let t = 1.0 - (w - me.pos.0) / margin;
                force.0 -= wall_push * t * t;
            }
            if me.pos.1 < margin {
                let t = 1.0 - me.pos.1 / margin;
                force.1 += wall_push * t * t;
            }
            if me.pos.1 > h - margin {
                let t = 1.0 - (h - me.pos.1) / margin;
                force.1 -= wall_push * t * t;
            }

            let mut vel = (me.vel.0 + force.0, me.vel.1 + force.1);
            let speed = norm(vel);
            if speed > 1e-12 {
                vel = (vel.0 / speed * config.speed, vel.1 / speed * config.speed);
            } else {
                vel = me.vel;
            }
            // Seeded heading perturbation keeps trajectories lively.
            let theta: f64 = jitter.sample(&mut rng);
            let (s, c) = theta.sin_cos();
            vel = (vel.0 * c - vel.1 * s, vel.0 * s + vel.1 * c);

            let mut pos = (me.pos.0 + vel.0, me.pos.1 + vel.1);
            if pos.0 < 0.0 {
                pos.0 = 0.0;
                vel.0 = vel.0.abs();
            }
            if pos.0 > w {
                pos.0 = w;
                vel.0 = -vel.0.abs();
            }
            if pos.1 < 0.0 {
                pos.1 = 0.0;
                vel.1 = vel.1.abs();
            }
            if pos.1 > h {
                pos.1 = h;
                vel.1 = -vel.1.abs();
            }
            *f = Fish { pos, vel };
        }
    }

    let tracks: Vec<Track<f64>> = points
        .into_iter()
        .enumerate()
        .map(|(i, pts)| Track::new(i as u32 + 1, pts))
        .collect::<Result<Vec<_>>>()?;
    let info = SequenceInfo {
        name: "school".to_string(),
        fps: config.fps,
        frame_count: frames,
        image_width: w.round() as u32,
        image_height: h.round() as u32,
    };
    Ok(Sequence::from_tracks(info, tracks))
}

/// Corrupts ground-truth tracks into a detection stream.
///
/// Per frame: merge box pairs whose IoU exceeds the merge threshold into
/// their bounding union (highest-IoU pair first, each box used once), drop
/// each survivor independently, jitter the remaining centers, append
/// Poisson-distributed clutter boxes, and sample confidences, clamped to
/// `[0, 1]`.
pub fn corrupt(gt: &Sequence<f64>, config: &CorruptionConfig) -> Result<Sequence<f64>> {
    config.validate()?;
    let tracks = gt.tracks()?;
    let frames = gt.frame_count();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let jitter = Normal::new(0.0, config.position_jitter_std).map_err(|e| Error::Numeric(e.to_string()))?;
    let true_conf = Normal::new(config.true_conf_mean, config.true_conf_std)
        .map_err(|e| Error::Numeric(e.to_string()))?;
    let clutter_conf = Normal::new(config.clutter_conf_mean, config.clutter_conf_std)
        .map_err(|e| Error::Numeric(e.to_string()))?;
    let clutter_count = if config.clutter_rate > 0.0 {
        Some(Poisson::new(config.clutter_rate).map_err(|e| Error::Numeric(e.to_string()))?)
    } else {
        None
    };

    // Clutter boxes copy the constant annotation size of the ground truth.
    let clutter_size = tracks
        .first()
        .map(|t| (t.first_point().bbox.width, t.first_point().bbox.height))
        .unwrap_or((1.0, 1.0));
    let (aw, ah) = (gt.info.image_width as f64, gt.info.image_height as f64);

    let mut by_frame: Vec<Vec<BBox<f64>>> = vec![Vec::new(); frames as usize];
    for t in tracks {
        for p in &t.points {
            by_frame[(p.frame - 1) as usize].push(p.bbox);
        }
    }

    let mut detections: Vec<Detection<f64>> = Vec::new();
    for (fi, boxes) in by_frame.iter().enumerate() {
        let frame = fi as u32 + 1;

        // Occlusion model: greedily merge the strongest-overlap pairs.
        let mut merged: Vec<BBox<f64>> = Vec::new();
        let mut consumed = vec![false; boxes.len()];
        if config.merge_iou_thresh < 1.0 {
            loop {
                let mut best: Option<(f64, usize, usize)> = None;
                for i in 0..boxes.len() {
                    for j in (i + 1)..boxes.len() {
                        if consumed[i] || consumed[j] {
                            continue;
                        }
                        let v = iou(&boxes[i], &boxes[j]);
                        if v > config.merge_iou_thresh && best.is_none_or(|(b, _, _)| v > b) {
                            best = Some((v, i, j));
                        }
                    }
                }
                let Some((_, i, j)) = best else { break };
                consumed[i] = true;
                consumed[j] = true;
                let left = boxes[i].left.min(boxes[j].left);
                let top = boxes[i].top.min(boxes[j].top);
                let right = boxes[i].right().max(boxes[j].right());
                let bottom = boxes[i].bottom().max(boxes[j].bottom());
                merged.push(BBox::new(left, top, right - left, bottom - top));
            }
        }
        let mut survivors: Vec<BBox<f64>> =
            boxes.iter().enumerate().filter(|(i, _)| !consumed[*i]).map(|(_, b)| *b).collect();
        survivors.extend(merged);

        for bbox in survivors {
            if rng.random::<f64>() < config.dropout_prob {
                continue;
            }
            let (cx, cy) = bbox.center();
            let dx: f64 = jitter.sample(&mut rng);
            let dy: f64 = jitter.sample(&mut rng);
            let conf: f64 = true_conf.sample(&mut rng);
            detections.push(Detection {
                frame,
                bbox: BBox::from_center(cx + dx, cy + dy, bbox.width, bbox.height),
                confidence: conf.clamp(0.0, 1.0),
            });
        }

        if let Some(poisson) = &clutter_count {
            let count = poisson.sample(&mut rng) as u64;
            for _ in 0..count {
                let cx = rng.random_range(0.0..aw.max(1.0));
                let cy = rng.random_range(0.0..ah.max(1.0));
                let conf: f64 = clutter_conf.sample(&mut rng);
                detections.push(Detection {
                    frame,
                    bbox: BBox::from_center(cx, cy, clutter_size.0, clutter_size.1),
                    confidence: conf.clamp(0.0, 1.0),
                });
            }
        }
    }

    let mut info = gt.info.clone();
    info.name = format!("{}-detections", gt.info.name);
    info.frame_count = frames;
    Ok(Sequence::from_detections(info, detections))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SchoolConfig {
        SchoolConfig { n_fish: 6, duration: 8.0, seed: 42, ..SchoolConfig::default() }
    }

    #[test]
    fn school_has_full_length_tracks_inside_arena() {
        let cfg = small_config();
        let seq = generate_school(&cfg).unwrap();
        let tracks = seq.tracks().unwrap();
        assert_eq!(tracks.len(), 6);
        let frames = cfg.frame_count();
        assert_eq!(frames, 120);
        for t in tracks {
            assert_eq!(t.points.len(), frames as usize);
            for p in &t.points {
                let (cx, cy) = p.bbox.center();
                assert!((0.0..=cfg.arena_width).contains(&cx));
                assert!((0.0..=cfg.arena_height).contains(&cy));
                assert_eq!(p.bbox.width, cfg.box_width);
                assert_eq!(p.bbox.height, cfg.box_height);
            }
        }
    }

    #[test]
    fn single_fish_swims_smoothly() {
        let cfg = SchoolConfig { n_fish: 1, duration: 4.0, heading_jitter: 0.0, ..SchoolConfig::default() };
        let seq = generate_school(&cfg).unwrap();
        let track = &seq.tracks().unwrap()[0];
        for pair in track.points.windows(2) {
            let (ax, ay) = pair[0].bbox.center();
            let (bx, by) = pair[1].bbox.center();
            let step = ((bx - ax).powi(2) + (by - ay).powi(2)).sqrt();
            assert!(step <= cfg.speed + 1e-9);
        }
    }

    #[test]
    fn same_seed_reproduces_school() {
        let cfg = small_config();
        assert_eq!(generate_school(&cfg).unwrap(), generate_school(&cfg).unwrap());
        let other = SchoolConfig { seed: 43, ..cfg };
        assert_ne!(generate_school(&other).unwrap(), generate_school(&cfg).unwrap());
    }

    #[test]
    fn displacement_never_exceeds_speed() {
        let seq = generate_school(&small_config()).unwrap();
        for t in seq.tracks().unwrap() {
            for pair in t.points.windows(2) {
                let (ax, ay) = pair[0].bbox.center();
                let (bx, by) = pair[1].bbox.center();
                let step = ((bx - ax).powi(2) + (by - ay).powi(2)).sqrt();
                assert!(step <= small_config().speed + 1e-9);
            }
        }
    }

    #[test]
    fn default_config_schools_with_occasional_close_passes() {
        // The default weights must pull fish together well below the
        // ~350 px nearest-neighbor distance of uniform placement, while
        // still producing some box-overlap events for the occlusion model
        // to act on.
        let gt = generate_school(&SchoolConfig::default()).unwrap();
        let tracks = gt.tracks().unwrap();
        let frames = gt.frame_count() as usize;
        let mut nn_sum = 0.0;
        let mut overlap_frames = 0usize;
        for f in 0..frames {
            let mut any_overlap = false;
            for (i, a) in tracks.iter().enumerate() {
                let (ax, ay) = a.points[f].bbox.center();
                let mut nn = f64::MAX;
                for (j, b) in tracks.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    let (bx, by) = b.points[f].bbox.center();
                    nn = nn.min(((ax - bx).powi(2) + (ay - by).powi(2)).sqrt());
                    if j > i && iou(&a.points[f].bbox, &b.points[f].bbox) > 0.0 {
                        any_overlap = true;
                    }
                }
                nn_sum += nn;
            }
            if any_overlap {
                overlap_frames += 1;
            }
        }
        let mean_nn = nn_sum / (frames as f64 * tracks.len() as f64);
        assert!(mean_nn < 280.0, "school too loose: mean NN {mean_nn:.0} px");
        assert!(mean_nn > 60.0, "school collapsed: mean NN {mean_nn:.0} px");
        assert!(overlap_frames >= 10, "only {overlap_frames} frames with close passes");
    }

    #[test]
    fn identity_corruption_reproduces_ground_truth() {
        let gt = generate_school(&small_config()).unwrap();
        let dets = corrupt(&gt, &CorruptionConfig::default()).unwrap();
        let dets = dets.detections().unwrap();
        let total_gt: usize = gt.tracks().unwrap().iter().map(|t| t.points.len()).sum();
        assert_eq!(dets.len(), total_gt);
        for d in dets {
            assert_eq!(d.confidence, 1.0);
        }
        let mut gt_boxes: Vec<(u32, [u64; 4])> = gt
            .tracks()
            .unwrap()
            .iter()
            .flat_map(|t| t.points.iter().map(|p| {
                (p.frame, [p.bbox.left.to_bits(), p.bbox.top.to_bits(), p.bbox.width.to_bits(), p.bbox.height.to_bits()])
            }))
            .collect();
        let mut det_boxes: Vec<(u32, [u64; 4])> = dets
            .iter()
            .map(|d| (d.frame, [d.bbox.left.to_bits(), d.bbox.top.to_bits(), d.bbox.width.to_bits(), d.bbox.height.to_bits()]))
            .collect();
        gt_boxes.sort_unstable();
        det_boxes.sort_unstable();
        assert_eq!(gt_boxes, det_boxes, "identity corruption is bit-exact on geometry");
    }

    #[test]
    fn full_dropout_empties_the_stream() {
        let gt = generate_school(&small_config()).unwrap();
        let cfg = CorruptionConfig { dropout_prob: 1.0, ..CorruptionConfig::default() };
        let dets = corrupt(&gt, &cfg).unwrap();
        assert!(dets.is_empty());
    }

    #[test]
    fn dropout_fraction_concentrates() {
        let school = SchoolConfig { n_fish: 10, duration: 1000.0 / 15.0, seed: 7, ..SchoolConfig::default() };
        let gt = generate_school(&school).unwrap();
        let total: usize = gt.tracks().unwrap().iter().map(|t| t.points.len()).sum();
        let cfg = CorruptionConfig { dropout_prob: 0.2, seed: 11, ..CorruptionConfig::default() };
        let kept = corrupt(&gt, &cfg).unwrap().detections().unwrap().len();
        let dropped = 1.0 - kept as f64 / total as f64;
        assert!((dropped - 0.2).abs() < 0.02, "empirical dropout {dropped}");
    }

    #[test]
    fn corruption_is_deterministic_per_seed() {
        let gt = generate_school(&small_config()).unwrap();
        let cfg = CorruptionConfig {
            dropout_prob: 0.1,
            position_jitter_std: 2.0,
            clutter_rate: 0.7,
            true_conf_mean: 0.9,
            true_conf_std: 0.05,
            seed: 3,
            ..CorruptionConfig::default()
        };
        assert_eq!(corrupt(&gt, &cfg).unwrap(), corrupt(&gt, &cfg).unwrap());
    }

    #[test]
    fn corruption_preserves_frame_indices() {
        let gt = generate_school(&small_config()).unwrap();
        let cfg = CorruptionConfig { position_jitter_std: 3.0, dropout_prob: 0.3, seed: 5, ..CorruptionConfig::default() };
        let dets = corrupt(&gt, &cfg).unwrap();
        let frames = gt.frame_count();
        for d in dets.detections().unwrap() {
            assert!(d.frame >= 1 && d.frame <= frames);
        }
    }

    #[test]
    fn merge_model_fuses_overlapping_pairs() {
        // Two fish glued together and one far away: each frame must yield
        // two detections, one of them the union box.
        let mk = |id: u32, cx: f64| {
            Track::new(
                id,
                (1..=5)
                    .map(|f| TrackPoint {
                        frame: f,
                        bbox: BBox::from_center(cx + f as f64, 100.0, 40.0, 20.0),
                        confidence: 1.0,
                        interpolated: false,
                    })
                    .collect(),
            )
            .unwrap()
        };
        let gt = Sequence::from_tracks(
            SequenceInfo { frame_count: 5, ..SequenceInfo::default() },
            vec![mk(1, 100.0), mk(2, 104.0), mk(3, 800.0)],
        );
        let cfg = CorruptionConfig { merge_iou_thresh: 0.5, ..CorruptionConfig::default() };
        let dets = corrupt(&gt, &cfg).unwrap();
        let by_frame = dets.detections_by_frame().unwrap();
        for (fi, frame_dets) in by_frame.iter().enumerate() {
            assert_eq!(frame_dets.len(), 2, "frame {}", fi + 1);
            let widths: Vec<f64> = frame_dets.iter().map(|d| d.bbox.width).collect();
            assert!(widths.contains(&44.0), "union box present: {widths:?}");
            assert!(widths.contains(&40.0), "lone box untouched: {widths:?}");
        }
    }
}
