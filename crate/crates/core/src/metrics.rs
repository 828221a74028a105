//! Average relative depth error (ARDE) over a confidence-ordered recall sweep.
//!
//! Detections are matched greedily to ground truth in descending confidence
//! order. For each of the 40 recall points `r = k/40`, `s(r)` is the mean
//! relative depth error `|d_est - d_gt| / d_gt` over the true positives of
//! the shortest confidence prefix whose recall reaches `r`. The reported
//! value is the mean over recall points of the envelope
//! `e(r) = max_{r' >= r} s(r')`; a recall point with no reachable `r' >= r`
//! contributes 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_IOU_MIN: f64 = 0.7;
pub const RECALL_POINTS: usize = 40;

/// Axis-aligned image box in pixels. Serialized as `[left, top, right, bottom]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct BBox2D {
    pub left: f64,
    pub top: f64,
    pub right: f64,
    pub bottom: f64,
}

impl BBox2D {
    pub const fn new(left: f64, top: f64, right: f64, bottom: f64) -> Self {
        Self {
            left,
            top,
            right,
            bottom,
        }
    }

    pub fn area(&self) -> f64 {
        (self.right - self.left).max(0.0) * (self.bottom - self.top).max(0.0)
    }

    pub fn is_valid(&self) -> bool {
        self.right > self.left && self.bottom > self.top
    }
}

impl From<[f64; 4]> for BBox2D {
    fn from([left, top, right, bottom]: [f64; 4]) -> Self {
        Self::new(left, top, right, bottom)
    }
}

impl From<BBox2D> for [f64; 4] {
    fn from(b: BBox2D) -> Self {
        [b.left, b.top, b.right, b.bottom]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    /// Image identifier; detections only match ground truth of the same frame.
    #[serde(default)]
    pub frame: String,
    pub bbox2d: BBox2D,
    pub confidence: f64,
    pub d_est: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_est: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthRecord {
    #[serde(default)]
    pub frame: String,
    pub bbox2d: BBox2D,
    pub d_gt: f64,
    pub gamma_gt: f64,
}

pub fn iou_2d(a: &BBox2D, b: &BBox2D) -> f64 {
    let inter = BBox2D::new(
        a.left.max(b.left),
        a.top.max(b.top),
        a.right.min(b.right),
        a.bottom.min(b.bottom),
    )
    .area();
    let union = a.area() + b.area() - inter;
    if union > 0.0 {
        (inter / union).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchOutcome {
    /// Index into the detection slice.
    pub detection: usize,
    /// Matched ground truth, if the detection is a true positive.
    pub gt: Option<usize>,
    /// IoU with the best unmatched ground truth at the time of matching.
    pub iou: f64,
}

impl MatchOutcome {
    pub fn is_tp(&self) -> bool {
        self.gt.is_some()
    }
}

fn check_iou_min(iou_min: f64) -> Result<()> {
    if iou_min > 0.0 && iou_min <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("iou_min {iou_min} must lie in (0, 1]")))
    }
}

/// Detection indices by descending confidence, ties kept in input order.
pub fn confidence_order(dets: &[DetectionRecord]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| dets[b].confidence.total_cmp(&dets[a].confidence));
    order
}

/// Greedy one-to-one matching in descending confidence order.
pub fn match_detections(
    dets: &[DetectionRecord],
    gts: &[GroundTruthRecord],
    iou_min: f64,
) -> Result<Vec<MatchOutcome>> {
    check_iou_min(iou_min)?;
    let mut taken = vec![false; gts.len()];
    let mut outcomes = Vec::with_capacity(dets.len());
    for det_index in confidence_order(dets) {
        let det = &dets[det_index];
        let mut best: Option<(usize, f64)> = None;
        for (gt_index, gt) in gts.iter().enumerate() {
            if taken[gt_index] || gt.frame != det.frame {
                continue;
            }
            let iou = iou_2d(&det.bbox2d, &gt.bbox2d);
            if best.is_none_or(|(_, b)| iou > b) {
                best = Some((gt_index, iou));
            }
        }
        let (gt, iou) = match best {
            Some((g, iou)) if iou >= iou_min => {
                taken[g] = true;
                (Some(g), iou)
            }
            Some((_, iou)) => (None, iou),
            None => (None, 0.0),
        };
        outcomes.push(MatchOutcome {
            detection: det_index,
            gt,
            iou,
        });
    }
    Ok(outcomes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArdeCurve {
    /// `s(k/40)` for `k = 1..=40`; `None` where the recall is unreachable.
    pub per_recall: Vec<Option<f64>>,
    /// Non-increasing envelope `max_{r' >= r} s(r')`.
    pub envelope: Vec<f64>,
    pub value: f64,
    pub max_recall: f64,
}

/// One swept item: confidence and, for true positives, the relative depth error.
#[derive(Debug, Clone, Copy)]
struct SweepItem {
    confidence: f64,
    rel_error: Option<f64>,
}

/// Curve from items already sorted by descending confidence.
fn sweep(items: &[SweepItem], gt_count: usize) -> ArdeCurve {
    // cumulative (tp, error sum) at the end of each group of equal confidence
    let mut cutoffs: Vec<(usize, f64)> = Vec::new();
    let (mut tp, mut sum) = (0usize, 0.0f64);
    for (i, item) in items.iter().enumerate() {
        if let Some(err) = item.rel_error {
            tp += 1;
            sum += err;
        }
        let group_ends = items
            .get(i + 1)
            .is_none_or(|next| next.confidence != item.confidence);
        if group_ends {
            cutoffs.push((tp, sum));
        }
    }

    let mut per_recall = vec![None; RECALL_POINTS];
    let mut cursor = 0;
    for (k, slot) in per_recall.iter_mut().enumerate() {
        let needed = (k + 1) * gt_count;
        while cursor < cutoffs.len() && cutoffs[cursor].0 * RECALL_POINTS < needed {
            cursor += 1;
        }
        if let Some(&(tp, sum)) = cutoffs.get(cursor) {
            *slot = Some(sum / tp as f64);
        }
    }

    let mut envelope = vec![0.0; RECALL_POINTS];
    let mut running: Option<f64> = None;
    for k in (0..RECALL_POINTS).rev() {
        if let Some(s) = per_recall[k] {
            running = Some(running.map_or(s, |r: f64| r.max(s)));
        }
        envelope[k] = running.unwrap_or(0.0);
    }
    debug_assert!(envelope.windows(2).all(|w| w[0] >= w[1]));

    let value = envelope.iter().sum::<f64>() / RECALL_POINTS as f64;
    let max_recall = if gt_count == 0 {
        0.0
    } else {
        tp as f64 / gt_count as f64
    };
    ArdeCurve {
        per_recall,
        envelope,
        value,
        max_recall,
    }
}

pub fn relative_depth_error(d_est: f64, d_gt: f64) -> f64 {
    (d_est - d_gt).abs() / d_gt
}

fn sweep_items(
    dets: &[DetectionRecord],
    gts: &[GroundTruthRecord],
    outcomes: &[MatchOutcome],
    keep: impl Fn(&MatchOutcome) -> bool,
) -> Vec<SweepItem> {
    outcomes
        .iter()
        .filter(|o| keep(o))
        .map(|o| SweepItem {
            confidence: dets[o.detection].confidence,
            rel_error: o
                .gt
                .map(|g| relative_depth_error(dets[o.detection].d_est, gts[g].d_gt)),
        })
        .collect()
}

fn check_gts(gts: &[GroundTruthRecord]) -> Result<()> {
    if gts.is_empty() {
        return Err(Error::NoGroundTruth);
    }
    if let Some(bad) = gts.iter().find(|g| !(g.d_gt > 0.0)) {
        return Err(Error::Config(format!("ground-truth depth {} is not positive", bad.d_gt)));
    }
    Ok(())
}

pub fn arde_curve(
    dets: &[DetectionRecord],
    gts: &[GroundTruthRecord],
    iou_min: f64,
) -> Result<ArdeCurve> {
    check_gts(gts)?;
    let outcomes = match_detections(dets, gts, iou_min)?;
    Ok(sweep(&sweep_items(dets, gts, &outcomes, |_| true), gts.len()))
}

pub fn arde(dets: &[DetectionRecord], gts: &[GroundTruthRecord], iou_min: f64) -> Result<f64> {
    arde_curve(dets, gts, iou_min).map(|c| c.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinArde {
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub gt_count: usize,
    pub tp_count: usize,
    /// `None` when the bin holds no ground truth.
    pub arde: Option<f64>,
}

fn bin_of(edges: &[f64], gamma: f64) -> Option<usize> {
    edges
        .windows(2)
        .position(|w| gamma >= w[0] && gamma < w[1])
}

/// ARDE per viewing-angle bin `[edges[i], edges[i+1])`.
///
/// Ground truth is binned by `gamma_gt`. A matched detection follows its
/// ground truth; an unmatched one is binned by `gamma_est` when present and
/// dropped otherwise.
pub fn arde_by_viewing_angle(
    dets: &[DetectionRecord],
    gts: &[GroundTruthRecord],
    iou_min: f64,
    bin_edges: &[f64],
) -> Result<Vec<BinArde>> {
    if bin_edges.len() < 2 || !bin_edges.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Config(
            "bin edges must hold at least two strictly increasing values".into(),
        ));
    }
    check_gts(gts)?;
    let outcomes = match_detections(dets, gts, iou_min)?;
    let gt_bins: Vec<Option<usize>> = gts.iter().map(|g| bin_of(bin_edges, g.gamma_gt)).collect();
    let det_bin = |o: &MatchOutcome| match o.gt {
        Some(g) => gt_bins[g],
        None => dets[o.detection]
            .gamma_est
            .and_then(|gamma| bin_of(bin_edges, gamma)),
    };

    Ok((0..bin_edges.len() - 1)
        .map(|bin| {
            let gt_count = gt_bins.iter().filter(|b| **b == Some(bin)).count();
            let items = sweep_items(dets, gts, &outcomes, |o| det_bin(o) == Some(bin));
            let tp_count = items.iter().filter(|i| i.rel_error.is_some()).count();
            BinArde {
                gamma_min: bin_edges[bin],
                gamma_max: bin_edges[bin + 1],
                gt_count,
                tp_count,
                arde: (gt_count > 0).then(|| sweep(&items, gt_count).value),
            }
        })
        .collect())
}
