//! KITTI object label and calibration files.
//!
//! Label lines carry 15 whitespace-separated fields:
//! `type truncated occluded alpha left top right bottom h w l x y z rotation_y`.
//! `(x, y, z)` is the bottom center of the box in the rectified camera frame
//! and `rotation_y` is the yaw about the (downward) y axis. That yaw is used as
//! the egocentric angle unchanged: with the keyedge layout of
//! [`crate::geometry`], KITTI's own `alpha = rotation_y - atan2(x, z)` is then
//! the allocentric angle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    keyedge_ratios, project_keyedges, AngleTriple, BoxPose3D, CameraIntrinsics, Dims,
    KeyedgeObservation, ObjectRatios, Vec3,
};
use crate::indexing::{camera_centric_view, AllocentricGroup, CameraCentricRatios, RatioTuple};
use crate::metrics::BBox2D;

pub const LABEL_FIELDS: usize = 15;
pub const DONT_CARE: &str = "DontCare";

/// Multiplier taking KITTI `rotation_y` to the egocentric yaw.
pub const KITTI_YAW_SIGN: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KittiLabel {
    /// 1-based line number in the source file.
    pub line: usize,
    pub class_name: String,
    pub truncated: f64,
    pub occluded: i32,
    pub alpha: f64,
    pub bbox2d: BBox2D,
    /// `(h, w, l)` in meters, in file order.
    pub dims_hwl: [f64; 3],
    /// Bottom center of the box.
    pub location: Vec3,
    pub rotation_y: f64,
}

impl KittiLabel {
    pub fn is_dont_care(&self) -> bool {
        self.class_name == DONT_CARE
    }

    /// Heavily truncated or fully occluded objects.
    pub fn is_hard(&self) -> bool {
        self.truncated > 0.5 || self.occluded == 2
    }

    pub fn dims(&self) -> Dims {
        let [h, w, l] = self.dims_hwl;
        Dims::new(l, w, h)
    }

    pub fn pose(&self) -> Result<BoxPose3D> {
        let dims = self.dims();
        let center = Vec3::new(
            self.location.x,
            self.location.y - 0.5 * dims.h,
            self.location.z,
        );
        if !(center.z > 0.0) {
            return Err(Error::BehindCamera {
                line: self.line,
                z: center.z,
            });
        }
        BoxPose3D::new(center, dims, KITTI_YAW_SIGN * self.rotation_y)
    }
}

fn parse_field<T: std::str::FromStr>(token: &str, line: usize, field: usize) -> Result<T> {
    token
        .parse()
        .map_err(|_| Error::parse(line, field, format!("cannot parse {token:?}")))
}

fn parse_label_line(text: &str, line: usize) -> Result<KittiLabel> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.len() < LABEL_FIELDS {
        return Err(Error::parse(
            line,
            tokens.len() + 1,
            format!("expected {LABEL_FIELDS} fields, found {}", tokens.len()),
        ));
    }
    if tokens.len() > LABEL_FIELDS {
        return Err(Error::parse(
            line,
            LABEL_FIELDS + 1,
            format!("expected {LABEL_FIELDS} fields, found {}", tokens.len()),
        ));
    }
    let num = |i: usize| -> Result<f64> {
        let value: f64 = parse_field(tokens[i], line, i + 1)?;
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::parse(line, i + 1, "value is not finite"))
        }
    };
    let label = KittiLabel {
        line,
        class_name: tokens[0].to_owned(),
        truncated: num(1)?,
        occluded: parse_field(tokens[2], line, 3)?,
        alpha: num(3)?,
        bbox2d: BBox2D::new(num(4)?, num(5)?, num(6)?, num(7)?),
        dims_hwl: [num(8)?, num(9)?, num(10)?],
        location: Vec3::new(num(11)?, num(12)?, num(13)?),
        rotation_y: num(14)?,
    };
    if !label.is_dont_care() {
        if let Some(i) = label.dims_hwl.iter().position(|d| !(*d > 0.0)) {
            return Err(Error::parse(line, 9 + i, "dimension must be positive"));
        }
    }
    Ok(label)
}

/// Parses a label file. Blank lines are ignored; `DontCare` rows are kept.
pub fn parse_label_file(text: &str) -> Result<Vec<KittiLabel>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_label_line(l, i + 1))
        .collect()
}

/// Reads intrinsics from the `P2:` row of a calibration file, assuming a
/// rectified camera: `f = P2[0,0]`, `cx = P2[0,2]`, `cy = P2[1,2]`.
pub fn parse_calib(text: &str) -> Result<CameraIntrinsics> {
    let (index, row) = text
        .lines()
        .enumerate()
        .find_map(|(i, l)| l.trim_start().strip_prefix("P2:").map(|rest| (i + 1, rest)))
        .ok_or_else(|| Error::parse(0, 0, "missing P2 row"))?;
    let tokens: Vec<&str> = row.split_whitespace().collect();
    if tokens.len() != 12 {
        return Err(Error::parse(
            index,
            tokens.len().min(12) + 1,
            format!("P2 needs 12 values, found {}", tokens.len()),
        ));
    }
    let mut p = [0.0; 12];
    for (i, token) in tokens.iter().enumerate() {
        p[i] = parse_field(token, index, i + 1)?;
    }
    CameraIntrinsics::new(p[0], p[2], p[6])
}

/// Ground-truth geometry and keyedge-ratio targets for one labelled object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthObject {
    pub line: usize,
    pub class_name: String,
    pub hard: bool,
    pub bbox2d: BBox2D,
    /// `alpha` as written in the label file.
    pub label_alpha: f64,
    pub pose: BoxPose3D,
    pub angles: AngleTriple,
    pub observation: KeyedgeObservation,
    pub ratios: ObjectRatios,
    pub camera_centric: CameraCentricRatios,
    pub tuples: [RatioTuple; 4],
    pub group: AllocentricGroup,
}

pub fn label_to_ground_truth(label: &KittiLabel, intr: &CameraIntrinsics) -> Result<GroundTruthObject> {
    let pose = label.pose()?;
    let observation = project_keyedges(&pose, intr).map_err(|err| match err {
        Error::NonPositiveDepth { depth } => Error::BehindCamera {
            line: label.line,
            z: depth,
        },
        other => other,
    })?;
    let ratios = keyedge_ratios(&observation)?;
    let camera_centric = camera_centric_view(&observation)?;
    Ok(GroundTruthObject {
        line: label.line,
        class_name: label.class_name.clone(),
        hard: label.is_hard(),
        bbox2d: label.bbox2d,
        label_alpha: label.alpha,
        angles: pose.angles()?,
        pose,
        observation,
        ratios,
        tuples: ratios.tuples(),
        group: camera_centric.group,
        camera_centric,
    })
}

/// Converts every non-`DontCare` label into ground-truth keyedge data.
pub fn labels_to_ground_truth(
    labels: &[KittiLabel],
    intr: &CameraIntrinsics,
) -> Result<Vec<GroundTruthObject>> {
    labels
        .iter()
        .filter(|l| !l.is_dont_care())
        .map(|l| label_to_ground_truth(l, intr))
        .collect()
}
