//! Brute-force definitional HOTA evaluator.
//!
//! Per threshold, every frame's matching is found by exhaustive enumeration
//! of one-to-one pairings over eligible pairs, maximizing lexicographically
//! (cardinality, total affinity, total IoU) where a pair's affinity is its
//! co-occurrence count at the threshold. Association scores then come from
//! literal scans over all frames per true positive. Intended for micro
//! sequences (a handful of identities, boxes, and frames).

use std::collections::BTreeMap;

use shoaltrack_core::mot::{BBox, Sequence};
use shoaltrack_core::metrics::{AlphaMetrics, MetricsReport, ALPHA_COUNT};

/// Hand-rolled IoU so the oracle does not share code with the crate's
/// geometry module.
fn iou(a: &BBox<f64>, b: &BBox<f64>) -> f64 {
    let ix = (a.left + a.width).min(b.left + b.width) - a.left.max(b.left);
    let iy = (a.top + a.height).min(b.top + b.height) - a.top.max(b.top);
    if ix <= 0.0 || iy <= 0.0 {
        return 0.0;
    }
    let inter = ix * iy;
    inter / (a.width * a.height + b.width * b.height - inter)
}

type Pair = (u32, u32); // (pred id, gt id)

struct Frame {
    preds: Vec<(u32, BBox<f64>)>,
    gts: Vec<(u32, BBox<f64>)>,
}

fn frames_of(gt: &Sequence<f64>, pred: &Sequence<f64>) -> Vec<Frame> {
    let count = gt.frame_count() as usize;
    let mut frames: Vec<Frame> = (0..count).map(|_| Frame { preds: Vec::new(), gts: Vec::new() }).collect();
    for t in gt.tracks().unwrap() {
        for p in &t.points {
            frames[(p.frame - 1) as usize].gts.push((t.id, p.bbox));
        }
    }
    for t in pred.tracks().unwrap() {
        for p in &t.points {
            frames[(p.frame - 1) as usize].preds.push((t.id, p.bbox));
        }
    }
    frames
}

/// All one-to-one pairings over the eligible pairs of one frame, as index
/// pairs into the frame's pred/gt lists.
fn enumerate_matchings(eligible: &[Vec<bool>]) -> Vec<Vec<(usize, usize)>> {
    let n_pred = eligible.len();
    let n_gt = if n_pred == 0 { 0 } else { eligible[0].len() };
    let mut all = Vec::new();
    fn recurse(
        pred: usize,
        n_pred: usize,
        n_gt: usize,
        eligible: &[Vec<bool>],
        used: &mut Vec<bool>,
        current: &mut Vec<(usize, usize)>,
        all: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if pred == n_pred {
            all.push(current.clone());
            return;
        }
        recurse(pred + 1, n_pred, n_gt, eligible, used, current, all);
        for g in 0..n_gt {
            if eligible[pred][g] && !used[g] {
                used[g] = true;
                current.push((pred, g));
                recurse(pred + 1, n_pred, n_gt, eligible, used, current, all);
                current.pop();
                used[g] = false;
            }
        }
    }
    let mut used = vec![false; n_gt];
    let mut current = Vec::new();
    recurse(0, n_pred, n_gt, eligible, &mut used, &mut current, &mut all);
    all
}

/// Definitional evaluation of `pred` against `gt`. Panics on inputs the
/// definition does not cover (empty ground truth).
pub fn evaluate_brute_force(gt: &Sequence<f64>, pred: &Sequence<f64>) -> MetricsReport<f64> {
    let frames = frames_of(gt, pred);
    assert!(frames.iter().any(|f| !f.gts.is_empty()), "oracle needs a non-empty ground truth");

    let alphas: Vec<f64> = (1..=ALPHA_COUNT).map(|k| k as f64 / 20.0).collect();
    let mut per_alpha = Vec::with_capacity(ALPHA_COUNT);
    let mut idsw_at_half = 0u64;
    let mut fn_at_half = 0u64;
    let mut fp_at_half = 0u64;

    for (k, &alpha) in alphas.iter().enumerate() {
        // Affinity: frames in which the pair co-occurs at IoU >= alpha.
        let mut affinity: BTreeMap<Pair, u64> = BTreeMap::new();
        for frame in &frames {
            for &(pid, pb) in &frame.preds {
                for &(gid, gb) in &frame.gts {
                    if iou(&pb, &gb) >= alpha {
                        *affinity.entry((pid, gid)).or_insert(0) += 1;
                    }
                }
            }
        }

        // Per-frame matching by exhaustive enumeration.
        let mut matchings: Vec<Vec<Pair>> = Vec::with_capacity(frames.len());
        for frame in &frames {
            let eligible: Vec<Vec<bool>> = frame
                .preds
                .iter()
                .map(|&(_, pb)| frame.gts.iter().map(|&(_, gb)| iou(&pb, &gb) >= alpha).collect())
                .collect();
            let mut best: Option<(usize, f64, f64, Vec<Pair>)> = None;
            for matching in enumerate_matchings(&eligible) {
                let card = matching.len();
                let mut aff = 0.0;
                let mut sim = 0.0;
                let pairs: Vec<Pair> = matching
                    .iter()
                    .map(|&(i, j)| {
                        let pair = (frame.preds[i].0, frame.gts[j].0);
                        aff += affinity[&pair] as f64;
                        sim += iou(&frame.preds[i].1, &frame.gts[j].1);
                        pair
                    })
                    .collect();
                let better = match &best {
                    None => true,
                    Some((bc, ba, bs, _)) => {
                        card > *bc
                            || (card == *bc && aff > *ba)
                            || (card == *bc && aff == *ba && sim > *bs)
                    }
                };
                if better {
                    best = Some((card, aff, sim, pairs));
                }
            }
            matchings.push(best.map(|(_, _, _, p)| p).unwrap_or_default());
        }

        // Detection counts straight from the matching.
        let mut tp = 0u64;
        let mut fn_ = 0u64;
        let mut fp = 0u64;
        for (frame, matching) in frames.iter().zip(&matchings) {
            tp += matching.len() as u64;
            fn_ += (frame.gts.len() - matching.len()) as u64;
            fp += (frame.preds.len() - matching.len()) as u64;
        }
        let deta = if tp + fn_ + fp > 0 { tp as f64 / (tp + fn_ + fp) as f64 } else { 0.0 };

        // Association by literal scans: for each matched instance, count
        // TPA / FNA / FPA over the whole sequence.
        let mut assa_sum = 0.0;
        let mut loca_sum = 0.0;
        for (frame, matching) in frames.iter().zip(&matchings) {
            for &(pid, gid) in matching {
                let mut tpa = 0u64;
                let mut fna = 0u64;
                let mut fpa = 0u64;
                for (other, other_matching) in frames.iter().zip(&matchings) {
                    let matched_here = other_matching.contains(&(pid, gid));
                    if matched_here {
                        tpa += 1;
                        continue;
                    }
                    if other.gts.iter().any(|&(g, _)| g == gid) {
                        fna += 1;
                    }
                    if other.preds.iter().any(|&(p, _)| p == pid) {
                        fpa += 1;
                    }
                }
                assa_sum += tpa as f64 / (tpa + fna + fpa) as f64;
                let pb = frame.preds.iter().find(|&&(p, _)| p == pid).unwrap().1;
                let gb = frame.gts.iter().find(|&&(g, _)| g == gid).unwrap().1;
                loca_sum += iou(&pb, &gb);
            }
        }
        let assa = if tp > 0 { assa_sum / tp as f64 } else { 0.0 };
        let loca = if tp > 0 { loca_sum / tp as f64 } else { 0.0 };
        let hota = (deta * assa).sqrt();

        if k == 9 {
            fn_at_half = fn_;
            fp_at_half = fp;
            let gt_ids: Vec<u32> = {
                let mut ids: Vec<u32> = frames.iter().flat_map(|f| f.gts.iter().map(|&(g, _)| g)).collect();
                ids.sort_unstable();
                ids.dedup();
                ids
            };
            for gid in gt_ids {
                let mut last: Option<u32> = None;
                for matching in &matchings {
                    if let Some(&(pid, _)) = matching.iter().find(|&&(_, g)| g == gid) {
                        if let Some(prev) = last {
                            if prev != pid {
                                idsw_at_half += 1;
                            }
                        }
                        last = Some(pid);
                    }
                }
            }
        }

        per_alpha.push(AlphaMetrics { alpha, hota, deta, assa, loca });
    }

    let mean = |f: fn(&AlphaMetrics<f64>) -> f64, xs: &[AlphaMetrics<f64>]| {
        xs.iter().map(f).sum::<f64>() / xs.len() as f64
    };
    MetricsReport {
        hota: mean(|a| a.hota, &per_alpha),
        deta: mean(|a| a.deta, &per_alpha),
        assa: mean(|a| a.assa, &per_alpha),
        loca: mean(|a| a.loca, &per_alpha),
        id_switches: idsw_at_half,
        false_negatives: fn_at_half,
        false_positives: fp_at_half,
        per_alpha,
    }
}
