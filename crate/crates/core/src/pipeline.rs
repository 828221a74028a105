//! Record-level building blocks behind the `synth`, `labelgen`, `solve` and
//! `eval-arde` commands.

use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::kitti::{label_to_ground_truth, parse_calib, parse_label_file, GroundTruthObject};
use crate::data::noise::{perturb_heights_with_rng, NoiseModel};
use crate::data::records::{RatioRecord, TruthRecord};
use crate::data::scene::{generate_scene, SceneConfig};
use crate::error::Result;
use crate::geometry::{keyedge_ratios, project_keyedges, CameraIntrinsics, Keyedge};
use crate::indexing::camera_centric_view;
use crate::metrics::{arde_by_viewing_angle, arde_curve, BinArde, DetectionRecord, GroundTruthRecord};
use crate::recovery::solve_all;
use crate::uncertainty::{
    depth_partials, fuse, propagate_sigma, tuples_with_sigma, FusedEstimate, RatioSigmas,
};

/// Spread assumed for every ratio when a record carries none. Only relative
/// weights matter, so the value itself is arbitrary.
pub const DEFAULT_RATIO_SIGMA: f64 = 1.0;

/// Synthetic scene as ratio records, with heights perturbed by `noise`.
/// Object `i` uses the generator seeded with `seed + i` on a separate stream.
pub fn synthesize(cfg: &SceneConfig, noise: &NoiseModel, intr: &CameraIntrinsics) -> Result<Vec<RatioRecord>> {
    noise.validate()?;
    let poses = generate_scene(cfg)?;
    poses
        .iter()
        .enumerate()
        .map(|(i, pose)| {
            let clean = project_keyedges(pose, intr)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
            rng.set_stream(1);
            let obs = perturb_heights_with_rng(&clean, noise, &mut rng);
            let angles = pose.angles()?;
            Ok(RatioRecord {
                id: i.to_string(),
                class_name: None,
                dims: pose.dims,
                ratios: keyedge_ratios(&obs)?,
                camera_centric: Some(camera_centric_view(&obs)?),
                sigmas: None,
                truth: Some(TruthRecord {
                    pose: *pose,
                    alpha: angles.allocentric,
                    gamma: angles.viewing,
                }),
                hard: false,
            })
        })
        .collect()
}

pub fn ground_truth_record(id: String, gt: &GroundTruthObject) -> RatioRecord {
    RatioRecord {
        id,
        class_name: Some(gt.class_name.clone()),
        dims: gt.pose.dims,
        ratios: gt.ratios,
        camera_centric: Some(gt.camera_centric),
        sigmas: None,
        truth: Some(TruthRecord {
            pose: gt.pose,
            alpha: gt.angles.allocentric,
            gamma: gt.angles.viewing,
        }),
        hard: gt.hard,
    }
}

#[derive(Debug, Clone, Default)]
pub struct LabelFilter {
    pub skip_hard: bool,
    pub classes: Vec<String>,
}

impl LabelFilter {
    fn keeps(&self, gt: &GroundTruthObject) -> bool {
        (!self.skip_hard || !gt.hard)
            && (self.classes.is_empty() || self.classes.contains(&gt.class_name))
    }
}

fn sorted_txt_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|entry| entry.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    files.retain(|p| p.extension().is_some_and(|e| e == "txt"));
    files.sort();
    Ok(files)
}

/// Converts a KITTI `label_2/` + `calib/` pair of directories into ratio
/// records, one per non-`DontCare` object, ids `"<frame>:<line>"`.
pub fn labelgen(label_dir: &Path, calib_dir: &Path, filter: &LabelFilter) -> Result<Vec<RatioRecord>> {
    let mut out = Vec::new();
    for label_path in sorted_txt_files(label_dir)? {
        let stem = label_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let calib = parse_calib(&fs::read_to_string(calib_dir.join(format!("{stem}.txt")))?)?;
        let labels = parse_label_file(&fs::read_to_string(&label_path)?)?;
        for label in labels.iter().filter(|l| !l.is_dont_care()) {
            let gt = label_to_ground_truth(label, &calib)?;
            if filter.keeps(&gt) {
                out.push(ground_truth_record(format!("{stem}:{}", label.line), &gt));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectedTuple {
    pub reference: Keyedge,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fused: Option<FusedEstimate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rejected: Vec<RejectedTuple>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth_depth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth_yaw: Option<f64>,
}

/// Inverts every tuple of the record and fuses the results.
pub fn solve_record_fused(record: &RatioRecord) -> Result<(FusedEstimate, Vec<RejectedTuple>)> {
    let ratios = match &record.camera_centric {
        Some(cc) => cc.to_object_ratios(),
        None => record.ratios,
    };
    let sigmas = record
        .sigmas
        .unwrap_or(RatioSigmas::uniform(DEFAULT_RATIO_SIGMA));
    let with_sigma = tuples_with_sigma(&ratios, &sigmas);
    let (l, w) = (record.dims.l, record.dims.w);
    let solved = solve_all(&with_sigma.map(|t| t.tuple), l, w)?;

    let mut rejected: Vec<RejectedTuple> = solved
        .rejected
        .iter()
        .map(|(reference, err)| RejectedTuple {
            reference: *reference,
            reason: err.to_string(),
        })
        .collect();
    let mut members = Vec::with_capacity(4);
    for estimate in solved.estimates {
        let ws = &with_sigma[estimate.reference.index()];
        let sigma_d = propagate_sigma(depth_partials(&ws.tuple, l, w)?, ws.sigma1, ws.sigma2);
        if sigma_d > 0.0 && sigma_d.is_finite() {
            members.push((estimate, sigma_d));
        } else {
            rejected.push(RejectedTuple {
                reference: estimate.reference,
                reason: format!("propagated depth spread {sigma_d} is not usable"),
            });
        }
    }
    Ok((fuse(&members)?, rejected))
}

pub fn solve_record(record: &RatioRecord) -> SolveRecord {
    let (fused, rejected, error) = match solve_record_fused(record) {
        Ok((fused, rejected)) => (Some(fused), rejected, None),
        Err(err) => (None, Vec::new(), Some(err.to_string())),
    };
    SolveRecord {
        id: record.id.clone(),
        fused,
        rejected,
        error,
        truth_depth: record.truth.as_ref().map(|t| t.pose.center.z),
        truth_yaw: record.truth.as_ref().map(|t| t.pose.yaw),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArdeReport {
    pub iou_min: f64,
    pub detections: usize,
    pub ground_truths: usize,
    pub arde: f64,
    pub max_recall: f64,
    pub envelope: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bins: Vec<BinArde>,
}

/// Global ARDE plus, when `bin_edges` is non-empty, ARDE per viewing-angle bin.
pub fn evaluate_arde(
    dets: &[DetectionRecord],
    gts: &[GroundTruthRecord],
    iou_min: f64,
    bin_edges: &[f64],
) -> Result<ArdeReport> {
    let curve = arde_curve(dets, gts, iou_min)?;
    let bins = if bin_edges.is_empty() {
        Vec::new()
    } else {
        arde_by_viewing_angle(dets, gts, iou_min, bin_edges)?
    };
    Ok(ArdeReport {
        iou_min,
        detections: dets.len(),
        ground_truths: gts.len(),
        arde: curve.value,
        max_recall: curve.max_recall,
        envelope: curve.envelope,
        bins,
    })
}
