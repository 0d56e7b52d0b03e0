//! Offline track repair: iterative merging of fragmented tracks followed by
//! linear interpolation of the remaining gaps.
//!
//! A pair of tracks is connectable when one ends strictly before the other
//! starts, the frame gap does not exceed `max_frame_gap`, and (when set) the
//! endpoint distance stays under `distance_cap`; every other pair sits at
//! infinite distance. Each iteration recomputes the full matrix, normalizes
//! it by its largest finite entry, and merges the minimum pair, until no
//! finite entry remains. Normalization is strictly monotone, so it never
//! changes which pair is merged; it is kept for fidelity of the reported
//! matrix. Afterwards every internal frame gap of every track is filled by
//! linearly interpolated points flagged `interpolated`.

use crate::error::Result;
use crate::geometry::center_distance;
use crate::mot::{Sequence, Track, TrackPoint};
use crate::scalar::{real, Real, Scalar};

/// Connector knobs.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConnectorConfig<T: Real = Scalar> {
    /// Largest frame gap two fragments may span and still be merged.
    pub max_frame_gap: u32,
    /// Optional cap on the endpoint center distance, in pixels.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_cap: Option<T>,
}

impl<T: Real> Default for ConnectorConfig<T> {
    fn default() -> Self {
        Self { max_frame_gap: 150, distance_cap: None }
    }
}

impl<T: Real> ConnectorConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.max_frame_gap < 1 {
            return Err(crate::error::Error::Config("max_frame_gap must be >= 1".to_string()));
        }
        if let Some(cap) = self.distance_cap {
            if !cap.is_finite() || cap <= T::zero() {
                return Err(crate::error::Error::Config("distance_cap must be positive".to_string()));
            }
        }
        Ok(())
    }
}

/// Spatio-temporal distance from the end of `a` to the start of `b`.
///
/// Finite only when `a` ends before `b` starts within the configured gap:
/// the Euclidean distance between `a`'s last and `b`'s first box centers.
pub fn track_distance<T: Real>(a: &Track<T>, b: &Track<T>, config: &ConnectorConfig<T>) -> T {
    if a.last_frame() >= b.first_frame() {
        return T::infinity();
    }
    let gap = b.first_frame() - a.last_frame();
    if gap > config.max_frame_gap {
        return T::infinity();
    }
    let d = center_distance(&a.last_point().bbox, &b.first_point().bbox);
    if let Some(cap) = config.distance_cap {
        if d > cap {
            return T::infinity();
        }
    }
    d
}

/// Divides every finite entry by the largest finite entry. The map is
/// strictly monotone, so argmin positions are preserved.
fn normalize<T: Real>(matrix: &mut [Vec<T>]) {
    let mut max = T::zero();
    for row in matrix.iter() {
        for &v in row {
            if v.is_finite() && v > max {
                max = v;
            }
        }
    }
    if max > T::zero() {
        for row in matrix.iter_mut() {
            for v in row.iter_mut() {
                if v.is_finite() {
                    *v /= max;
                }
            }
        }
    }
}

/// Merges fragmented tracks and interpolates the gaps.
///
/// Merging appends the later fragment's points to the earlier one, which
/// keeps its id; the absorbed id is retired. Ties on distance resolve to the
/// smallest `(earlier id, later id)` pair. Interpolation fills every
/// internal gap of every output track with linearly interpolated center,
/// size, and confidence, leaving observed points untouched.
pub fn connect<T: Real>(seq: &Sequence<T>, config: &ConnectorConfig<T>) -> Result<Sequence<T>> {
    config.validate()?;
    let mut tracks: Vec<Track<T>> = seq.tracks()?.to_vec();

    loop {
        let n = tracks.len();
        if n < 2 {
            break;
        }
        let mut matrix: Vec<Vec<T>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { T::infinity() } else { track_distance(&tracks[i], &tracks[j], config) }).collect())
            .collect();
        normalize(&mut matrix);

        let mut best: Option<(T, u32, u32, usize, usize)> = None;
        for i in 0..n {
            for j in 0..n {
                let d = matrix[i][j];
                if !d.is_finite() {
                    continue;
                }
                let key = (d, tracks[i].id, tracks[j].id);
                let better = match &best {
                    None => true,
                    Some((bd, bi, bj, _, _)) => {
                        d < *bd || (d == *bd && (key.1, key.2) < (*bi, *bj))
                    }
                };
                if better {
                    best = Some((d, key.1, key.2, i, j));
                }
            }
        }
        let Some((_, _, _, i, j)) = best else { break };
        let absorbed = tracks.remove(j);
        let target = if j < i { i - 1 } else { i };
        tracks[target].points.extend(absorbed.points);
    }

    for track in tracks.iter_mut() {
        interpolate_gaps(track);
    }
    Ok(Sequence::from_tracks(seq.info.clone(), tracks))
}

/// Fills internal frame gaps with linear interpolation of box center, size,
/// and confidence, marking synthesized points.
fn interpolate_gaps<T: Real>(track: &mut Track<T>) {
    let mut filled: Vec<TrackPoint<T>> = Vec::with_capacity(track.points.len());
    for k in 0..track.points.len() {
        let p = track.points[k];
        if let Some(&prev) = filled.last() {
            let span = p.frame - prev.frame;
            if span > 1 {
                let (pcx, pcy) = prev.bbox.center();
                let (ncx, ncy) = p.bbox.center();
                for f in (prev.frame + 1)..p.frame {
                    let t = real::<T>((f - prev.frame) as f64 / span as f64);
                    let lerp = |a: T, b: T| a + (b - a) * t;
                    filled.push(TrackPoint {
                        frame: f,
                        bbox: crate::mot::BBox::from_center(
                            lerp(pcx, ncx),
                            lerp(pcy, ncy),
                            lerp(prev.bbox.width, p.bbox.width),
                            lerp(prev.bbox.height, p.bbox.height),
                        ),
                        confidence: lerp(prev.confidence, p.confidence),
                        interpolated: true,
                    });
                }
            }
        }
        filled.push(p);
    }
    track.points = filled;
}
