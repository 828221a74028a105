//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use keyedge::geometry::{BoxPose3D, Dims, Vec3};
use keyedge::metrics::{BBox2D, DetectionRecord, GroundTruthRecord};
use rand::Rng;

/// Corner depths (a, b, c, d) built from the KITTI rotation about the y axis,
/// with length along the object x axis and a at (+l/2, +w/2).
pub fn corner_depths(pose: &BoxPose3D) -> [f64; 4] {
    let (s, c) = pose.yaw.sin_cos();
    let (hl, hw) = (pose.dims.l / 2.0, pose.dims.w / 2.0);
    [(hl, hw), (hl, -hw), (-hl, -hw), (-hl, hw)].map(|(xo, zo)| pose.center.z - s * xo + c * zo)
}

/// Corner (x, z) positions in the same order.
pub fn corner_xz(pose: &BoxPose3D) -> [(f64, f64); 4] {
    let (s, c) = pose.yaw.sin_cos();
    let (hl, hw) = (pose.dims.l / 2.0, pose.dims.w / 2.0);
    [(hl, hw), (hl, -hw), (-hl, -hw), (-hl, hw)]
        .map(|(xo, zo)| (pose.center.x + c * xo + s * zo, pose.center.z - s * xo + c * zo))
}

/// Reference-b inversion written straight from the forward relations
/// `r_ba - 1 = w cosθ / d_b` and `r_bc - 1 = l sinθ / d_b`.
pub fn invert_from_b(r_ba: f64, r_bc: f64, l: f64, w: f64) -> (f64, f64) {
    let cos_term = (r_ba - 1.0) / w;
    let sin_term = (r_bc - 1.0) / l;
    let d_b = 1.0 / cos_term.hypot(sin_term);
    (sin_term.atan2(cos_term), d_b)
}

pub fn random_pose<R: Rng>(rng: &mut R) -> BoxPose3D {
    random_pose_in(rng, (5.0, 60.0))
}

pub fn random_pose_in<R: Rng>(rng: &mut R, (near, far): (f64, f64)) -> BoxPose3D {
    let z = rng.random_range(near..far);
    let gamma: f64 = rng.random_range(-0.7..0.7);
    let dims = Dims::new(
        rng.random_range(3.2..5.2),
        rng.random_range(1.4..2.0),
        rng.random_range(1.3..1.9),
    );
    BoxPose3D::new(
        Vec3::new(z * gamma.tan(), 1.65 - dims.h / 2.0, z),
        dims,
        rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
    )
    .unwrap()
}

pub fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn iou(a: &BBox2D, b: &BBox2D) -> f64 {
    let iw = (a.right.min(b.right) - a.left.max(b.left)).max(0.0);
    let ih = (a.bottom.min(b.bottom) - a.top.max(b.top)).max(0.0);
    let inter = iw * ih;
    let area = |x: &BBox2D| (x.right - x.left) * (x.bottom - x.top);
    let union = area(a) + area(b) - inter;
    if union > 0.0 {
        inter / union
    } else {
        0.0
    }
}

/// ARDE by explicit enumeration: every distinct confidence value is tried as
/// a cutoff, the TP set at that cutoff is recomputed, and each of the 40
/// recall points takes the error of the highest cutoff reaching it.
pub fn brute_force_arde(dets: &[DetectionRecord], gts: &[GroundTruthRecord], iou_min: f64) -> f64 {
    // one global greedy matching, highest confidence first, stable on ties
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| dets[b].confidence.partial_cmp(&dets[a].confidence).unwrap());
    let mut taken = vec![false; gts.len()];
    let mut matched: Vec<Option<usize>> = vec![None; dets.len()];
    for &i in &order {
        let mut best = None;
        let mut best_iou = -1.0;
        for (g, gt) in gts.iter().enumerate() {
            if !taken[g] && gt.frame == dets[i].frame {
                let v = iou(&dets[i].bbox2d, &gt.bbox2d);
                if v > best_iou {
                    best_iou = v;
                    best = Some(g);
                }
            }
        }
        if let Some(g) = best {
            if best_iou >= iou_min {
                taken[g] = true;
                matched[i] = Some(g);
            }
        }
    }

    let mut cutoffs: Vec<f64> = dets.iter().map(|d| d.confidence).collect();
    cutoffs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    cutoffs.dedup();
    // (recall, mean error) for each cutoff, highest cutoff first
    let points: Vec<(f64, f64)> = cutoffs
        .iter()
        .filter_map(|&c| {
            let errs: Vec<f64> = (0..dets.len())
                .filter(|&i| dets[i].confidence >= c)
                .filter_map(|i| matched[i].map(|g| (dets[i].d_est - gts[g].d_gt).abs() / gts[g].d_gt))
                .collect();
            (!errs.is_empty()).then(|| {
                (
                    errs.len() as f64 / gts.len() as f64,
                    errs.iter().sum::<f64>() / errs.len() as f64,
                )
            })
        })
        .collect();

    let s: Vec<Option<f64>> = (1..=40)
        .map(|k| {
            points
                .iter()
                .find(|(recall, _)| recall * 40.0 >= k as f64 - 1e-9)
                .map(|&(_, e)| e)
        })
        .collect();
    (0..40)
        .map(|k| s[k..].iter().flatten().fold(0.0f64, |m, &v| m.max(v)))
        .sum::<f64>()
        / 40.0
}

/// Random detection set of at most `max_dets` boxes against a few ground truths.
pub fn random_arde_case<R: Rng>(rng: &mut R, max_dets: usize) -> (Vec<DetectionRecord>, Vec<GroundTruthRecord>) {
    let n_gt = rng.random_range(1..=6);
    let gts: Vec<GroundTruthRecord> = (0..n_gt)
        .map(|i| {
            let x = 120.0 * i as f64;
            GroundTruthRecord {
                frame: String::new(),
                bbox2d: BBox2D::new(x, 0.0, x + 100.0, 100.0),
                d_gt: rng.random_range(5.0..60.0),
                gamma_gt: rng.random_range(-0.6..0.6),
            }
        })
        .collect();
    let n_det = rng.random_range(0..=max_dets);
    let dets = (0..n_det)
        .map(|_| {
            let g = &gts[rng.random_range(0..n_gt)];
            let shift = rng.random_range(-30.0..30.0);
            DetectionRecord {
                frame: String::new(),
                bbox2d: BBox2D::new(
                    g.bbox2d.left + shift,
                    0.0,
                    g.bbox2d.right + shift,
                    100.0,
                ),
                // a coarse grid so that confidence ties occur
                confidence: (rng.random_range(0..8) as f64) / 8.0,
                d_est: g.d_gt * rng.random_range(0.7..1.3),
                gamma_est: Some(rng.random_range(-0.6..0.6)),
            }
        })
        .collect();
    (dets, gts)
}
