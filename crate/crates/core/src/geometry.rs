//! Camera-frame conventions, keyedge construction and pinhole projection of
//! keyedge heights.
//!
//! Frame: x right, y down, z forward (the KITTI rectified camera frame). The
//! bird's-eye view is the (x, z) plane. An object with egocentric yaw `θ` has
//! its front axis along `(cos θ, -sin θ)` in (x, z), which is exactly KITTI's
//! `rotation_y`. Keyedges `a, b, c, d` are the front-left, front-right,
//! rear-right and rear-left vertical edges, clockwise seen from above. With
//! these choices the corner depths obey
//!
//! ```text
//! d_a = d_b + w cos θ,    d_c = d_b + l sin θ
//! ```

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indexing::RatioTuple;

/// Wraps an angle into `[-π, π)`.
pub fn normalize_angle(angle: f64) -> f64 {
    let wrapped = (angle + PI).rem_euclid(TAU) - PI;
    // rem_euclid may round up to exactly TAU for tiny negative inputs
    if wrapped >= PI {
        wrapped - TAU
    } else {
        wrapped
    }
}

/// Smallest signed difference `a - b` on the circle, in `[-π, π)`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    normalize_angle(a - b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// Physical box size in meters: length along the front axis, width along the
/// right axis, height along the vertical.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dims {
    pub l: f64,
    pub w: f64,
    pub h: f64,
}

impl Dims {
    pub const fn new(l: f64, w: f64, h: f64) -> Self {
        Self { l, w, h }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.l * factor, self.w * factor, self.h * factor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    /// Focal length in pixels.
    pub focal_length: f64,
    /// `(cx, cy)` in pixels.
    pub principal_point: (f64, f64),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_size: Option<(u32, u32)>,
}

impl CameraIntrinsics {
    pub fn new(focal_length: f64, cx: f64, cy: f64) -> Result<Self> {
        if !(focal_length > 0.0) || !focal_length.is_finite() {
            return Err(Error::NonPositiveFocal(focal_length));
        }
        if !cx.is_finite() || !cy.is_finite() {
            return Err(Error::Config(format!(
                "principal point ({cx}, {cy}) is not finite"
            )));
        }
        Ok(Self {
            focal_length,
            principal_point: (cx, cy),
            image_size: None,
        })
    }

    pub fn with_image_size(mut self, width: u32, height: u32) -> Self {
        self.image_size = Some((width, height));
        self
    }

    /// Same camera with the focal length multiplied by `factor`.
    pub fn with_focal_scaled(mut self, factor: f64) -> Self {
        self.focal_length *= factor;
        self
    }
}

/// An upright 3D box in the camera frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxPose3D {
    /// Geometric center of the box (not the bottom center used by KITTI).
    pub center: Vec3,
    pub dims: Dims,
    /// Egocentric yaw θ in radians.
    pub yaw: f64,
}

impl BoxPose3D {
    pub fn new(center: Vec3, dims: Dims, yaw: f64) -> Result<Self> {
        let pose = Self { center, dims, yaw };
        pose.validate()?;
        Ok(pose)
    }

    pub fn validate(&self) -> Result<()> {
        let Dims { l, w, h } = self.dims;
        if !(l > 0.0 && w > 0.0 && h > 0.0) {
            return Err(Error::InvalidDims { l, w });
        }
        if !(self.center.z > 0.0) {
            return Err(Error::NonPositiveDepth {
                depth: self.center.z,
            });
        }
        Ok(())
    }

    /// Same pose with center and dimensions scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            center: Vec3::new(
                self.center.x * factor,
                self.center.y * factor,
                self.center.z * factor,
            ),
            dims: self.dims.scaled(factor),
            yaw: self.yaw,
        }
    }

    pub fn viewing_angle(&self) -> Result<f64> {
        viewing_angle(self.center)
    }

    pub fn angles(&self) -> Result<AngleTriple> {
        Ok(AngleTriple::from_egocentric(self.yaw, self.viewing_angle()?))
    }
}

/// Object-centric keyedge label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Keyedge {
    A,
    B,
    C,
    D,
}

impl Keyedge {
    pub const ALL: [Keyedge; 4] = [Keyedge::A, Keyedge::B, Keyedge::C, Keyedge::D];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn from_index(index: usize) -> Self {
        Self::ALL[index % 4]
    }

    /// Next keyedge clockwise in bird's-eye view.
    pub const fn next(self) -> Self {
        Self::from_index(self.index() + 1)
    }

    pub const fn prev(self) -> Self {
        Self::from_index(self.index() + 3)
    }

    pub const fn opposite(self) -> Self {
        Self::from_index(self.index() + 2)
    }

    pub const fn letter(self) -> char {
        match self {
            Keyedge::A => 'a',
            Keyedge::B => 'b',
            Keyedge::C => 'c',
            Keyedge::D => 'd',
        }
    }
}

impl fmt::Display for Keyedge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Bottom corners of the four keyedges, ordered `a, b, c, d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyedgePositions {
    pub corners: [Vec3; 4],
    pub height: f64,
}

impl KeyedgePositions {
    pub fn corner(&self, edge: Keyedge) -> Vec3 {
        self.corners[edge.index()]
    }

    pub fn depth(&self, edge: Keyedge) -> f64 {
        self.corners[edge.index()].z
    }
}

pub fn keyedge_positions(pose: &BoxPose3D) -> KeyedgePositions {
    let (sin, cos) = pose.yaw.sin_cos();
    let Dims { l, w, h } = pose.dims;
    let bottom = pose.center.y + 0.5 * h;
    // (right, front) offsets of a, b, c, d in the object frame
    let offsets = [
        (-0.5 * w, 0.5 * l),
        (0.5 * w, 0.5 * l),
        (0.5 * w, -0.5 * l),
        (-0.5 * w, -0.5 * l),
    ];
    let corners = offsets.map(|(right, front)| {
        Vec3::new(
            pose.center.x - right * sin + front * cos,
            bottom,
            pose.center.z - right * cos - front * sin,
        )
    });
    KeyedgePositions { corners, height: h }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeObservation {
    /// Depth of the keyedge along the optical axis, meters.
    pub depth: f64,
    /// Euclidean distance from the camera center to the keyedge's bottom corner.
    pub distance: f64,
    /// Projected height of the keyedge in pixels.
    pub height: f64,
    /// Image column of the keyedge in pixels.
    pub column: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyedgeObservation {
    pub edges: [EdgeObservation; 4],
}

impl KeyedgeObservation {
    pub fn edge(&self, edge: Keyedge) -> &EdgeObservation {
        &self.edges[edge.index()]
    }

    pub fn heights(&self) -> [f64; 4] {
        self.edges.map(|e| e.height)
    }
}

pub fn project_keyedges(pose: &BoxPose3D, intr: &CameraIntrinsics) -> Result<KeyedgeObservation> {
    let positions = keyedge_positions(pose);
    let f = intr.focal_length;
    let (cx, _) = intr.principal_point;
    let mut edges = [EdgeObservation {
        depth: 0.0,
        distance: 0.0,
        height: 0.0,
        column: 0.0,
    }; 4];
    for (edge, corner) in edges.iter_mut().zip(positions.corners) {
        if !(corner.z > 0.0) {
            return Err(Error::NonPositiveDepth { depth: corner.z });
        }
        *edge = EdgeObservation {
            depth: corner.z,
            distance: corner.norm(),
            height: f * positions.height / corner.z,
            column: cx + f * corner.x / corner.z,
        };
    }
    Ok(KeyedgeObservation { edges })
}

/// The four adjacent keyedge-ratios in object-centric indexing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectRatios {
    pub r_ab: f64,
    pub r_bc: f64,
    pub r_cd: f64,
    pub r_da: f64,
}

impl ObjectRatios {
    pub fn from_heights(heights: [f64; 4]) -> Result<Self> {
        for edge in Keyedge::ALL {
            let height = heights[edge.index()];
            if !(height > 0.0) {
                return Err(Error::ZeroHeight {
                    keyedge: edge,
                    height,
                });
            }
        }
        let [a, b, c, d] = heights;
        Ok(Self {
            r_ab: a / b,
            r_bc: b / c,
            r_cd: c / d,
            r_da: d / a,
        })
    }

    /// `h_from / h_to` for two neighboring keyedges.
    ///
    /// # Panics
    ///
    /// If `from` and `to` are not adjacent.
    pub fn adjacent(&self, from: Keyedge, to: Keyedge) -> f64 {
        use Keyedge::*;
        match (from, to) {
            (A, B) => self.r_ab,
            (B, C) => self.r_bc,
            (C, D) => self.r_cd,
            (D, A) => self.r_da,
            (B, A) => 1.0 / self.r_ab,
            (C, B) => 1.0 / self.r_bc,
            (D, C) => 1.0 / self.r_cd,
            (A, D) => 1.0 / self.r_da,
            _ => panic!("keyedges {from} and {to} are not adjacent"),
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.r_ab, self.r_bc, self.r_cd, self.r_da]
    }

    /// Regroups the ratios into the four reference tuples
    /// `(r_ad, r_ab), (r_ba, r_bc), (r_cb, r_cd), (r_dc, r_da)`.
    pub fn tuples(&self) -> [RatioTuple; 4] {
        Keyedge::ALL.map(|reference| RatioTuple {
            reference,
            r1: self.adjacent(reference, reference.prev()),
            r2: self.adjacent(reference, reference.next()),
        })
    }
}

pub fn keyedge_ratios(obs: &KeyedgeObservation) -> Result<ObjectRatios> {
    ObjectRatios::from_heights(obs.heights())
}

/// Viewing angle γ of a point: its bearing from the optical axis in the
/// bird's-eye view, positive to the right.
pub fn viewing_angle(point: Vec3) -> Result<f64> {
    if !(point.z > 0.0) {
        return Err(Error::NonPositiveDepth { depth: point.z });
    }
    Ok(normalize_angle(point.x.atan2(point.z)))
}

/// Egocentric, allocentric and viewing angles, tied by `θ = α + γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleTriple {
    pub egocentric: f64,
    pub allocentric: f64,
    pub viewing: f64,
}

impl AngleTriple {
    pub fn from_egocentric(theta: f64, gamma: f64) -> Self {
        Self {
            egocentric: normalize_angle(theta),
            allocentric: normalize_angle(theta - gamma),
            viewing: normalize_angle(gamma),
        }
    }

    pub fn from_allocentric(alpha: f64, gamma: f64) -> Self {
        Self {
            egocentric: normalize_angle(alpha + gamma),
            allocentric: normalize_angle(alpha),
            viewing: normalize_angle(gamma),
        }
    }
}
