//! Tracking evaluation: HOTA with DetA/AssA/LocA sub-scores plus the count
//! metrics (ID switches, false negatives, false positives).
//!
//! For each localization threshold `alpha` in `{0.05, 0.10, ..., 0.95}` the
//! evaluator builds, per frame, the bipartite graph of prediction/truth
//! pairs with IoU at or above `alpha` and picks a maximum-cardinality
//! one-to-one matching that prefers pairs with higher global association
//! affinity, then higher IoU. Affinity is the number of frames across the
//! sequence in which the pair is jointly present with IoU at or above
//! `alpha`; the per-frame matching maximizes `affinity + eps * iou` with
//! `eps = 1 / (1 + frame_count)`, small enough that one affinity unit always
//! dominates.
//!
//! With the matching fixed, `DetA = TP / (TP + FN + FP)`; every true
//! positive `c = (pred id, gt id)` scores `A(c) = TPA / (TPA + FNA + FPA)`
//! where `TPA` counts frames with that exact pair matched, `FNA` frames
//! where the gt id appears without it, and `FPA` frames where the pred id
//! appears without it; `AssA` averages `A(c)` over true positives,
//! `LocA` averages IoU over true positives, and
//! `HOTA = sqrt(DetA * AssA)`, all per `alpha`. Reported scores are
//! unweighted means over the 19 thresholds. Counts (IDs, FN, FP) are read
//! at `alpha = 0.5`; an ID switch is a frame where a gt identity's matched
//! prediction differs from its most recently matched prediction.
//!
//! The evaluator is insensitive to identity relabeling: accumulation runs
//! in ground-truth id order, so a consistent permutation of prediction ids
//! reproduces every field bit for bit.

use std::collections::BTreeMap;

use ndarray::Array2;

use crate::assign::solve_lap;
use crate::error::{Error, Result};
use crate::geometry::iou;
use crate::mot::{Sequence, Track};
use crate::scalar::{real, Real, Scalar};

/// Number of localization thresholds in the HOTA average.
pub const ALPHA_COUNT: usize = 19;

/// The 19 thresholds `0.05, 0.10, ..., 0.95`.
pub fn alpha_levels<T: Real>() -> Vec<T> {
    (1..=ALPHA_COUNT).map(|k| real::<T>(k as f64 / 20.0)).collect()
}

/// Scores at a single localization threshold.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct AlphaMetrics<T: Real = Scalar> {
    pub alpha: T,
    pub hota: T,
    pub deta: T,
    pub assa: T,
    pub loca: T,
}

/// Evaluation result for one sequence.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MetricsReport<T: Real = Scalar> {
    pub hota: T,
    pub deta: T,
    pub assa: T,
    pub loca: T,
    pub id_switches: u64,
    pub false_negatives: u64,
    pub false_positives: u64,
    pub per_alpha: Vec<AlphaMetrics<T>>,
}

struct FrameEntry<'a, T: Real> {
    /// (dense id index, box) pairs of one frame, ascending in id index.
    preds: Vec<(usize, &'a crate::mot::BBox<T>)>,
    gts: Vec<(usize, &'a crate::mot::BBox<T>)>,
    /// IoU matrix, rows = preds, cols = gts of this frame.
    sim: Array2<T>,
}

fn dense_ids<T: Real>(tracks: &[Track<T>]) -> BTreeMap<u32, usize> {
    tracks.iter().enumerate().map(|(idx, t)| (t.id, idx)).collect()
}

/// Evaluates a prediction against ground truth over a shared frame range.
pub fn evaluate<T: Real>(gt: &Sequence<T>, pred: &Sequence<T>) -> Result<MetricsReport<T>> {
    let gt_tracks = gt.tracks()?;
    let pred_tracks = pred.tracks()?;
    if gt_tracks.is_empty() {
        return Err(Error::EmptyGroundTruth);
    }
    let frames = gt.frame_count();
    if pred.info.frame_count != 0 && !pred.is_empty() && pred.info.frame_count != frames {
        return Err(Error::FrameRangeMismatch { gt: frames, pred: pred.info.frame_count });
    }
    if pred.max_frame() > frames {
        return Err(Error::FrameRangeMismatch { gt: frames, pred: pred.max_frame() });
    }

    let gt_index = dense_ids(gt_tracks);
    let pred_index = dense_ids(pred_tracks);
    let n_gt = gt_index.len();
    let n_pred = pred_index.len();

    // Per-frame presence and IoU matrices, computed once and shared by all
    // thresholds. Entries are in ascending dense-id order, which makes every
    // accumulation below independent of the original id values.
    let mut frame_entries: Vec<FrameEntry<'_, T>> = (0..frames)
        .map(|_| FrameEntry { preds: Vec::new(), gts: Vec::new(), sim: Array2::zeros((0, 0)) })
        .collect();
    for track in gt_tracks {
        let idx = gt_index[&track.id];
        for p in &track.points {
            frame_entries[(p.frame - 1) as usize].gts.push((idx, &p.bbox));
        }
    }
    for track in pred_tracks {
        let idx = pred_index[&track.id];
        for p in &track.points {
            frame_entries[(p.frame - 1) as usize].preds.push((idx, &p.bbox));
        }
    }
    let mut gt_presence = vec![0u64; n_gt];
    let mut pred_presence = vec![0u64; n_pred];
    for entry in frame_entries.iter_mut() {
        entry.preds.sort_by_key(|(idx, _)| *idx);
        entry.gts.sort_by_key(|(idx, _)| *idx);
        for &(g, _) in &entry.gts {
            gt_presence[g] += 1;
        }
        for &(p, _) in &entry.preds {
            pred_presence[p] += 1;
        }
        entry.sim = Array2::from_shape_fn((entry.preds.len(), entry.gts.len()), |(i, j)| {
            iou(entry.preds[i].1, entry.gts[j].1)
        });
    }

    let eps = T::one() / (T::one() + real::<T>(frames as f64));
    let count = real::<T>(ALPHA_COUNT as f64);

    let mut per_alpha = Vec::with_capacity(ALPHA_COUNT);
    let mut sums = (T::zero(), T::zero(), T::zero(), T::zero());
    let mut counts_at_half = (0u64, 0u64, 0u64); // (IDSW, FN, FP)

    for (k, alpha) in alpha_levels::<T>().into_iter().enumerate() {
        // Pass 1: per-pair affinity = co-occurrence count at this threshold.
        let mut affinity: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for entry in &frame_entries {
            for (i, &(p, _)) in entry.preds.iter().enumerate() {
                for (j, &(g, _)) in entry.gts.iter().enumerate() {
                    if entry.sim[(i, j)] >= alpha {
                        *affinity.entry((p, g)).or_insert(0) += 1;
                    }
                }
            }
        }

        // Pass 2: per-frame optimal matching on affinity + eps * iou.
        let mut matchings: Vec<Vec<(usize, usize)>> = Vec::with_capacity(frames as usize);
        let mut matched_count: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        let mut tp = 0u64;
        let mut fn_ = 0u64;
        let mut fp = 0u64;
        for entry in &frame_entries {
            let cost = Array2::from_shape_fn(entry.sim.dim(), |(i, j)| {
                let s = entry.sim[(i, j)];
                if s >= alpha {
                    let pair = (entry.preds[i].0, entry.gts[j].0);
                    -(real::<T>(affinity[&pair] as f64) + eps * s)
                } else {
                    T::infinity()
                }
            });
            // Admissible costs are at most -1 (affinity counts this frame).
            let result = solve_lap(&cost, -real::<T>(0.5));
            let mut frame_matches: Vec<(usize, usize)> = result
                .matches
                .iter()
                .map(|&(i, j)| (entry.preds[i].0, entry.gts[j].0))
                .collect();
            frame_matches.sort_by_key(|&(_, g)| g);
            tp += frame_matches.len() as u64;
            fn_ += (entry.gts.len() - frame_matches.len()) as u64;
            fp += (entry.preds.len() - frame_matches.len()) as u64;
            for &pair in &frame_matches {
                *matched_count.entry(pair).or_insert(0) += 1;
            }
            matchings.push(frame_matches);
        }

        let deta = real::<T>(tp as f64) / real::<T>((tp + fn_ + fp) as f64);

        // Association and localization accumulate in (frame, gt id) order.
        let mut assa_sum = T::zero();
        let mut loca_sum = T::zero();
        for (entry, frame_matches) in frame_entries.iter().zip(&matchings) {
            for &(p, g) in frame_matches {
                let tpa = matched_count[&(p, g)];
                let denom = gt_presence[g] + pred_presence[p] - tpa;
                assa_sum += real::<T>(tpa as f64) / real::<T>(denom as f64);
                let i = entry.preds.iter().position(|&(idx, _)| idx == p).expect("matched pred present");
                let j = entry.gts.iter().position(|&(idx, _)| idx == g).expect("matched gt present");
                loca_sum += entry.sim[(i, j)];
            }
        }
        let (assa, loca) = if tp > 0 {
            let tp_t = real::<T>(tp as f64);
            (assa_sum / tp_t, loca_sum / tp_t)
        } else {
            (T::zero(), T::zero())
        };
        let hota = (deta * assa).sqrt();

        // Counts are reported at the conventional alpha = 0.5 (index 9).
        if k == 9 {
            let mut idsw = 0u64;
            let mut last_match: Vec<Option<usize>> = vec![None; n_gt];
            for frame_matches in &matchings {
                for &(p, g) in frame_matches {
                    if let Some(prev) = last_match[g] {
                        if prev != p {
                            idsw += 1;
                        }
                    }
                    last_match[g] = Some(p);
                }
            }
            counts_at_half = (idsw, fn_, fp);
        }

        sums.0 += hota;
        sums.1 += deta;
        sums.2 += assa;
        sums.3 += loca;
        per_alpha.push(AlphaMetrics { alpha, hota, deta, assa, loca });
    }

    Ok(MetricsReport {
        hota: sums.0 / count,
        deta: sums.1 / count,
        assa: sums.2 / count,
        loca: sums.3 / count,
        id_switches: counts_at_half.0,
        false_negatives: counts_at_half.1,
        false_positives: counts_at_half.2,
        per_alpha,
    })
}

/// Renders named reports as an aligned text table in the column order
/// HOTA, IDs, LocA, DetA, AssA, FN, FP.
pub fn report_table<T: Real>(rows: &[(String, MetricsReport<T>)]) -> String {
    let name_width = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(4).max(4);
    let mut out = String::new();
    out.push_str(&format!(
        "{:<name_width$}  {:>6}  {:>6}  {:>6}  {:>6}  {:>6}  {:>8}  {:>8}\n",
        "name", "HOTA", "IDs", "LocA", "DetA", "AssA", "FN", "FP"
    ));
    for (name, r) in rows {
        out.push_str(&format!(
            "{:<name_width$}  {:>6.2}  {:>6}  {:>6.2}  {:>6.2}  {:>6.2}  {:>8}  {:>8}\n",
            name, r.hota, r.id_switches, r.loca, r.deta, r.assa, r.false_negatives, r.false_positives
        ));
    }
    out
}

/// Renders named reports as CSV with the same column order as the table.
pub fn report_csv<T: Real>(rows: &[(String, MetricsReport<T>)]) -> String {
    let mut out = String::from("name,hota,ids,loca,deta,assa,fn,fp\n");
    for (name, r) in rows {
        out.push_str(&format!(
            "{},{:.6},{},{:.6},{:.6},{:.6},{},{}\n",
            name, r.hota, r.id_switches, r.loca, r.deta, r.assa, r.false_negatives, r.false_positives
        ));
    }
    out
}

/// Renders the per-threshold breakdown as CSV for plotting.
pub fn per_alpha_csv<T: Real>(report: &MetricsReport<T>) -> String {
    let mut out = String::from("alpha,hota,deta,assa,loca\n");
    for a in &report.per_alpha {
        out.push_str(&format!("{:.2},{:.6},{:.6},{:.6},{:.6}\n", a.alpha, a.hota, a.deta, a.assa, a.loca));
    }
    out
}
