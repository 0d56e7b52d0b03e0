//! Sequence model and MOTChallenge-style text I/O.
//!
//! Rows are `frame,id,left,top,width,height,conf,x,y,z` with 1-based frames.
//! Detection files carry `id = -1`; track files carry the track id. The
//! trailing `x,y` columns are `-1` placeholders; on track rows this writer
//! uses the `z` column to persist the interpolation flag (`1` interpolated,
//! `-1` real) so that a written sequence re-parses to an equal value. Files
//! written by this module are UTF-8 with `\n` line endings and rows sorted
//! by `(frame, id)`; coordinates and confidences render with 6 decimals.
//!
//! Each file may have a `<stem>.seqinfo` sidecar of `key=value` lines
//! (`name`, `fps`, `frames`, `width`, `height`) describing the sequence.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::scalar::{cmp_finite, real, Real, Scalar};

/// Axis-aligned box in pixel coordinates, stored as left/top corner plus size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox<T: Real = Scalar> {
    pub left: T,
    pub top: T,
    pub width: T,
    pub height: T,
}

impl<T: Real> BBox<T> {
    pub fn new(left: T, top: T, width: T, height: T) -> Self {
        Self { left, top, width, height }
    }

    /// Builds a box from its center point and size.
    pub fn from_center(cx: T, cy: T, width: T, height: T) -> Self {
        let half = real::<T>(0.5);
        Self { left: cx - width * half, top: cy - height * half, width, height }
    }

    pub fn center(&self) -> (T, T) {
        let half = real::<T>(0.5);
        (self.left + self.width * half, self.top + self.height * half)
    }

    pub fn right(&self) -> T {
        self.left + self.width
    }

    pub fn bottom(&self) -> T {
        self.top + self.height
    }

    pub fn area(&self) -> T {
        self.width * self.height
    }

    /// True when all fields are finite and the size is strictly positive.
    pub fn is_valid(&self) -> bool {
        self.left.is_finite()
            && self.top.is_finite()
            && self.width.is_finite()
            && self.height.is_finite()
            && self.width > T::zero()
            && self.height > T::zero()
    }
}

/// One detector output: a box with a confidence on a 1-based frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection<T: Real = Scalar> {
    pub frame: u32,
    pub bbox: BBox<T>,
    pub confidence: T,
}

/// One box of a track. `interpolated` marks points synthesized by gap
/// filling rather than observed; the confidence column is preserved so a
/// parse/write round trip is lossless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackPoint<T: Real = Scalar> {
    pub frame: u32,
    pub bbox: BBox<T>,
    pub confidence: T,
    pub interpolated: bool,
}

/// An identity with its time-ordered boxes. Invariant: `points` is non-empty
/// and strictly increasing in frame; `id >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Track<T: Real = Scalar> {
    pub id: u32,
    pub points: Vec<TrackPoint<T>>,
}

impl<T: Real> Track<T> {
    /// Validating constructor: sorts points by frame and rejects empty
    /// tracks, zero ids, and duplicate frames.
    pub fn new(id: u32, mut points: Vec<TrackPoint<T>>) -> Result<Self> {
        if id < 1 {
            return Err(Error::Config(format!("track id must be >= 1, got {id}")));
        }
        if points.is_empty() {
            return Err(Error::Config(format!("track {id} has no points")));
        }
        points.sort_by_key(|p| p.frame);
        for pair in points.windows(2) {
            if pair[0].frame == pair[1].frame {
                return Err(Error::Config(format!(
                    "track {id} has two points on frame {}",
                    pair[0].frame
                )));
            }
        }
        Ok(Self { id, points })
    }

    pub fn first_frame(&self) -> u32 {
        self.points.first().map(|p| p.frame).unwrap_or(0)
    }

    pub fn last_frame(&self) -> u32 {
        self.points.last().map(|p| p.frame).unwrap_or(0)
    }

    pub fn first_point(&self) -> &TrackPoint<T> {
        self.points.first().expect("track is non-empty")
    }

    pub fn last_point(&self) -> &TrackPoint<T> {
        self.points.last().expect("track is non-empty")
    }
}

/// Sequence metadata, normally read from the `.seqinfo` sidecar.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SequenceInfo {
    pub name: String,
    pub fps: f64,
    pub frame_count: u32,
    pub image_width: u32,
    pub image_height: u32,
}

impl Default for SequenceInfo {
    fn default() -> Self {
        Self {
            name: "seq".to_string(),
            fps: 15.0,
            frame_count: 0,
            image_width: 2456,
            image_height: 2048,
        }
    }
}

/// Which payload a MOT file holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotKind {
    Detections,
    Tracks,
}

/// Payload of a sequence: per-frame detections or per-identity tracks.
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceData<T: Real = Scalar> {
    Detections(Vec<Detection<T>>),
    Tracks(Vec<Track<T>>),
}

/// A named sequence with metadata and its payload.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequence<T: Real = Scalar> {
    pub info: SequenceInfo,
    pub data: SequenceData<T>,
}

impl<T: Real> Sequence<T> {
    pub fn from_tracks(info: SequenceInfo, tracks: Vec<Track<T>>) -> Self {
        let mut seq = Self { info, data: SequenceData::Tracks(tracks) };
        seq.canonicalize();
        seq
    }

    pub fn from_detections(info: SequenceInfo, detections: Vec<Detection<T>>) -> Self {
        let mut seq = Self { info, data: SequenceData::Detections(detections) };
        seq.canonicalize();
        seq
    }

    pub fn kind(&self) -> MotKind {
        match self.data {
            SequenceData::Detections(_) => MotKind::Detections,
            SequenceData::Tracks(_) => MotKind::Tracks,
        }
    }

    pub fn detections(&self) -> Result<&[Detection<T>]> {
        match &self.data {
            SequenceData::Detections(d) => Ok(d),
            SequenceData::Tracks(_) => Err(Error::WrongKind { expected: "detections", actual: "tracks" }),
        }
    }

    pub fn tracks(&self) -> Result<&[Track<T>]> {
        match &self.data {
            SequenceData::Tracks(t) => Ok(t),
            SequenceData::Detections(_) => Err(Error::WrongKind { expected: "tracks", actual: "detections" }),
        }
    }

    pub fn is_empty(&self) -> bool {
        match &self.data {
            SequenceData::Detections(d) => d.is_empty(),
            SequenceData::Tracks(t) => t.is_empty(),
        }
    }

    /// Largest frame index present in the payload, 0 when empty.
    pub fn max_frame(&self) -> u32 {
        match &self.data {
            SequenceData::Detections(d) => d.iter().map(|d| d.frame).max().unwrap_or(0),
            SequenceData::Tracks(t) => t.iter().map(|t| t.last_frame()).max().unwrap_or(0),
        }
    }

    /// Frame range covered by the sequence: the sidecar value when present,
    /// otherwise the largest frame index seen.
    pub fn frame_count(&self) -> u32 {
        self.info.frame_count.max(self.max_frame())
    }

    /// Sorts the payload into the canonical order used for comparison and
    /// writing: tracks by id (points by frame), detections by
    /// `(frame, left, top, width, height, confidence)`.
    pub fn canonicalize(&mut self) {
        match &mut self.data {
            SequenceData::Detections(d) => {
                d.sort_by(|a, b| {
                    a.frame
                        .cmp(&b.frame)
                        .then_with(|| cmp_finite(a.bbox.left, b.bbox.left))
                        .then_with(|| cmp_finite(a.bbox.top, b.bbox.top))
                        .then_with(|| cmp_finite(a.bbox.width, b.bbox.width))
                        .then_with(|| cmp_finite(a.bbox.height, b.bbox.height))
                        .then_with(|| cmp_finite(a.confidence, b.confidence))
                });
            }
            SequenceData::Tracks(t) => {
                for track in t.iter_mut() {
                    track.points.sort_by_key(|p| p.frame);
                }
                t.sort_by_key(|t| t.id);
            }
        }
    }

    /// Checks the payload against sequence invariants.
    pub fn validate(&self) -> Result<()> {
        let frames = self.frame_count();
        match &self.data {
            SequenceData::Detections(dets) => {
                for d in dets {
                    if d.frame < 1 || d.frame > frames {
                        return Err(Error::Config(format!("detection frame {} outside 1..={frames}", d.frame)));
                    }
                    if !d.bbox.is_valid() {
                        return Err(Error::Config(format!("invalid box at frame {}", d.frame)));
                    }
                    if d.confidence < T::zero() || d.confidence > T::one() {
                        return Err(Error::Config(format!("confidence outside [0,1] at frame {}", d.frame)));
                    }
                }
            }
            SequenceData::Tracks(tracks) => {
                for t in tracks {
                    if t.id < 1 {
                        return Err(Error::Config("track id must be >= 1".to_string()));
                    }
                    if t.points.is_empty() {
                        return Err(Error::Config(format!("track {} has no points", t.id)));
                    }
                    for pair in t.points.windows(2) {
                        if pair[0].frame >= pair[1].frame {
                            return Err(Error::Config(format!("track {} frames not strictly increasing", t.id)));
                        }
                    }
                    for p in &t.points {
                        if p.frame < 1 || p.frame > frames {
                            return Err(Error::Config(format!("track {} frame {} outside 1..={frames}", t.id, p.frame)));
                        }
                        if !p.bbox.is_valid() {
                            return Err(Error::Config(format!("invalid box in track {} frame {}", t.id, p.frame)));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Groups detections by frame: `result[f - 1]` holds the detections of
    /// frame `f` in canonical order, for `f` in `1..=frame_count()`.
    pub fn detections_by_frame(&self) -> Result<Vec<Vec<Detection<T>>>> {
        let dets = self.detections()?;
        let frames = self.frame_count() as usize;
        let mut grouped: Vec<Vec<Detection<T>>> = vec![Vec::new(); frames];
        for d in dets {
            grouped[(d.frame - 1) as usize].push(*d);
        }
        Ok(grouped)
    }
}

fn parse_field<F: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<F> {
    tok.trim().parse::<F>().map_err(|_| Error::Parse {
        line,
        msg: format!("malformed {what} field {tok:?}"),
    })
}

fn parse_real<T: Real>(tok: &str, line: usize, what: &str) -> Result<T> {
    let v: f64 = parse_field(tok, line, what)?;
    if !v.is_finite() {
        return Err(Error::Validation { line, msg: format!("{what} is not finite") });
    }
    T::from_f64(v).ok_or_else(|| Error::Parse { line, msg: format!("{what} not representable") })
}

/// Parses a MOT text stream into a [`Sequence`] with inferred metadata.
///
/// Rows may arrive in any order; the result is canonical, so shuffled input
/// yields an identical value. Malformed numerics report a parse error with
/// the 1-based line number; non-positive sizes, zero frames, bad ids, and
/// duplicate `(id, frame)` pairs report validation errors.
pub fn parse_mot<T: Real, R: BufRead>(reader: R, kind: MotKind) -> Result<Sequence<T>> {
    let mut detections: Vec<Detection<T>> = Vec::new();
    let mut track_points: BTreeMap<u32, Vec<TrackPoint<T>>> = BTreeMap::new();
    let mut seen: BTreeMap<(u32, u32), usize> = BTreeMap::new();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let fields: Vec<&str> = text.split(',').collect();
        if fields.len() < 7 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected at least 7 comma-separated fields, got {}", fields.len()),
            });
        }
        let frame: i64 = parse_field(fields[0], line_no, "frame")?;
        if frame < 1 {
            return Err(Error::Validation { line: line_no, msg: format!("frame index {frame} must be >= 1") });
        }
        let frame = frame as u32;
        let id: i64 = parse_field(fields[1], line_no, "id")?;
        let left = parse_real::<T>(fields[2], line_no, "left")?;
        let top = parse_real::<T>(fields[3], line_no, "top")?;
        let width = parse_real::<T>(fields[4], line_no, "width")?;
        let height = parse_real::<T>(fields[5], line_no, "height")?;
        let confidence = parse_real::<T>(fields[6], line_no, "confidence")?;
        if width <= T::zero() || height <= T::zero() {
            return Err(Error::Validation { line: line_no, msg: "box width and height must be positive".to_string() });
        }
        let bbox = BBox::new(left, top, width, height);

        match kind {
            MotKind::Detections => {
                if confidence < T::zero() || confidence > T::one() {
                    return Err(Error::Validation { line: line_no, msg: "confidence outside [0,1]".to_string() });
                }
                detections.push(Detection { frame, bbox, confidence });
            }
            MotKind::Tracks => {
                if id < 1 {
                    return Err(Error::Validation { line: line_no, msg: format!("track id {id} must be >= 1") });
                }
                let id = id as u32;
                if let Some(first) = seen.insert((id, frame), line_no) {
                    return Err(Error::Validation {
                        line: line_no,
                        msg: format!("duplicate point for track {id} frame {frame} (first at line {first})"),
                    });
                }
                // Interpolation flag travels in the z placeholder column.
                let interpolated = fields
                    .get(9)
                    .and_then(|tok| tok.trim().parse::<f64>().ok())
                    .map(|z| z == 1.0)
                    .unwrap_or(false);
                track_points
                    .entry(id)
                    .or_default()
                    .push(TrackPoint { frame, bbox, confidence, interpolated });
            }
        }
    }

    let data = match kind {
        MotKind::Detections => SequenceData::Detections(detections),
        MotKind::Tracks => SequenceData::Tracks(
            track_points
                .into_iter()
                .map(|(id, points)| Track::new(id, points))
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    let mut seq = Sequence { info: SequenceInfo::default(), data };
    seq.canonicalize();
    seq.info.frame_count = seq.max_frame();
    Ok(seq)
}

/// [`parse_mot`] over an in-memory string.
pub fn parse_mot_str<T: Real>(text: &str, kind: MotKind) -> Result<Sequence<T>> {
    parse_mot(text.as_bytes(), kind)
}

fn write_row<T: Real>(out: &mut String, frame: u32, id: i64, bbox: &BBox<T>, conf: T, z: i32) {
    let _ = writeln!(
        out,
        "{},{},{:.6},{:.6},{:.6},{:.6},{:.6},-1,-1,{}",
        frame, id, bbox.left, bbox.top, bbox.width, bbox.height, conf, z
    );
}

/// Renders a sequence as MOT text, rows sorted by `(frame, id)`.
pub fn write_mot<T: Real>(seq: &Sequence<T>) -> String {
    let mut out = String::new();
    match &seq.data {
        SequenceData::Detections(dets) => {
            let mut sorted: Vec<&Detection<T>> = dets.iter().collect();
            sorted.sort_by(|a, b| {
                a.frame
                    .cmp(&b.frame)
                    .then_with(|| cmp_finite(a.bbox.left, b.bbox.left))
                    .then_with(|| cmp_finite(a.bbox.top, b.bbox.top))
                    .then_with(|| cmp_finite(a.bbox.width, b.bbox.width))
                    .then_with(|| cmp_finite(a.bbox.height, b.bbox.height))
                    .then_with(|| cmp_finite(a.confidence, b.confidence))
            });
            for d in sorted {
                write_row(&mut out, d.frame, -1, &d.bbox, d.confidence, -1);
            }
        }
        SequenceData::Tracks(tracks) => {
            let mut rows: Vec<(u32, u32, &TrackPoint<T>)> = Vec::new();
            for t in tracks {
                for p in &t.points {
                    rows.push((p.frame, t.id, p));
                }
            }
            rows.sort_by_key(|(frame, id, _)| (*frame, *id));
            for (frame, id, p) in rows {
                let z = if p.interpolated { 1 } else { -1 };
                write_row(&mut out, frame, id as i64, &p.bbox, p.confidence, z);
            }
        }
    }
    out
}

/// Renders the `key=value` sidecar describing a sequence.
pub fn write_seqinfo(info: &SequenceInfo) -> String {
    format!(
        "name={}\nfps={}\nframes={}\nwidth={}\nheight={}\n",
        info.name, info.fps, info.frame_count, info.image_width, info.image_height
    )
}

/// Parses a `key=value` sidecar; unknown keys are ignored.
pub fn parse_seqinfo(text: &str) -> Result<SequenceInfo> {
    let mut info = SequenceInfo::default();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse { line: line_no, msg: format!("expected key=value, got {line:?}") });
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "name" => info.name = value.to_string(),
            "fps" => info.fps = parse_field(value, line_no, "fps")?,
            "frames" => info.frame_count = parse_field(value, line_no, "frames")?,
            "width" => info.image_width = parse_field(value, line_no, "width")?,
            "height" => info.image_height = parse_field(value, line_no, "height")?,
            _ => {}
        }
    }
    if info.fps <= 0.0 {
        return Err(Error::Config(format!("fps must be positive, got {}", info.fps)));
    }
    Ok(info)
}

/// Sidecar path for a MOT file: `dir/x.txt` maps to `dir/x.seqinfo`.
pub fn seqinfo_path(mot_path: &Path) -> PathBuf {
    mot_path.with_extension("seqinfo")
}

/// Reads a MOT file plus its sidecar when one exists. Without a sidecar the
/// metadata is inferred (frame count from the data, defaults elsewhere) and
/// the name is taken from the file stem.
pub fn read_mot_file<T: Real>(path: &Path, kind: MotKind) -> Result<Sequence<T>> {
    let file = std::fs::File::open(path)?;
    let mut seq = parse_mot(std::io::BufReader::new(file), kind)?;
    let sidecar = seqinfo_path(path);
    if sidecar.is_file() {
        let info = parse_seqinfo(&std::fs::read_to_string(&sidecar)?)?;
        if info.frame_count < seq.max_frame() {
            return Err(Error::Config(format!(
                "sidecar declares {} frames but data reaches frame {}",
                info.frame_count,
                seq.max_frame()
            )));
        }
        seq.info = info;
    } else if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
        seq.info.name = stem.to_string();
    }
    seq.validate()?;
    Ok(seq)
}

/// Writes a MOT file and its `.seqinfo` sidecar.
pub fn write_mot_file<T: Real>(seq: &Sequence<T>, path: &Path) -> Result<()> {
    std::fs::write(path, write_mot(seq))?;
    std::fs::write(seqinfo_path(path), write_seqinfo(&seq.info))?;
    Ok(())
}
