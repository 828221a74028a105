//! Camera-centric keyedge indexing and allocentric groups.
//!
//! Camera index 1 is the keyedge whose bottom corner is nearest to the camera
//! center; indices 2, 3, 4 follow clockwise. Because the nearest corner of an
//! upright rectangle is fixed by the quadrant the camera falls in, it is a
//! function of the allocentric angle alone:
//!
//! | group | α range        | camera index 1 |
//! |-------|----------------|----------------|
//! | 0     | `[-π, -π/2)`   | `d`            |
//! | 1     | `[-π/2, 0)`    | `c`            |
//! | 2     | `[0, π/2)`     | `b`            |
//! | 3     | `[π/2, π)`     | `a`            |

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, Keyedge, KeyedgeObservation, ObjectRatios};

/// Relative tolerance under which two keyedge distances count as tied.
pub const DISTANCE_TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct AllocentricGroup(u8);

impl AllocentricGroup {
    pub fn new(id: u8) -> Result<Self> {
        if id < 4 {
            Ok(Self(id))
        } else {
            Err(Error::Config(format!("allocentric group {id} is not in 0..4")))
        }
    }

    pub fn id(self) -> u8 {
        self.0
    }

    /// Keyedge that receives camera index 1 in this group.
    pub fn nearest_keyedge(self) -> Keyedge {
        Keyedge::from_index(3 - self.0 as usize)
    }

    pub fn from_nearest_keyedge(edge: Keyedge) -> Self {
        Self(3 - edge.index() as u8)
    }

    /// Object-centric keyedge carrying camera index `camera_index` (1-based).
    pub fn keyedge_at(self, camera_index: usize) -> Keyedge {
        assert!((1..=4).contains(&camera_index), "camera index {camera_index} out of 1..=4");
        Keyedge::from_index(self.nearest_keyedge().index() + camera_index - 1)
    }

    /// 1-based camera index of an object-centric keyedge.
    pub fn camera_index_of(self, edge: Keyedge) -> usize {
        (edge.index() + 4 - self.nearest_keyedge().index()) % 4 + 1
    }
}

impl TryFrom<u8> for AllocentricGroup {
    type Error = Error;

    fn try_from(id: u8) -> Result<Self> {
        Self::new(id)
    }
}

impl From<AllocentricGroup> for u8 {
    fn from(group: AllocentricGroup) -> u8 {
        group.0
    }
}

pub fn allocentric_group(alpha: f64) -> AllocentricGroup {
    let alpha = normalize_angle(alpha);
    let id = if alpha < -FRAC_PI_2 {
        0
    } else if alpha < 0.0 {
        1
    } else if alpha < FRAC_PI_2 {
        2
    } else {
        3
    };
    AllocentricGroup(id)
}

/// Keyedge-ratios in camera-centric indexing, `r_pq = h_p / h_q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraCentricRatios {
    pub r21: f64,
    pub r41: f64,
    pub r32: f64,
    pub r34: f64,
    pub group: AllocentricGroup,
}

impl CameraCentricRatios {
    pub fn as_array(&self) -> [f64; 4] {
        [self.r21, self.r41, self.r32, self.r34]
    }

    pub fn max_ratio(&self) -> f64 {
        self.as_array().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Object-centric adjacent ratios implied by these camera-centric ones.
    pub fn to_object_ratios(&self) -> ObjectRatios {
        // h_p / h_{p+1} around the camera-centric cycle 1 -> 2 -> 3 -> 4 -> 1
        let forward = [1.0 / self.r21, 1.0 / self.r32, self.r34, self.r41];
        let mut out = [0.0; 4];
        for (slot, ratio) in forward.into_iter().enumerate() {
            let edge = self.group.keyedge_at(slot + 1);
            out[edge.index()] = ratio;
        }
        let [r_ab, r_bc, r_cd, r_da] = out;
        ObjectRatios {
            r_ab,
            r_bc,
            r_cd,
            r_da,
        }
    }
}

/// A pair of keyedge-ratios sharing a reference keyedge: `r1 = h_i / h_prev`
/// and `r2 = h_i / h_next` where `i` is the reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioTuple {
    pub reference: Keyedge,
    pub r1: f64,
    pub r2: f64,
}

impl RatioTuple {
    pub fn new(reference: Keyedge, r1: f64, r2: f64) -> Self {
        Self { reference, r1, r2 }
    }
}

/// Picks the keyedge nearest to the camera.
///
/// A tie between two neighbors resolves to the one that comes first
/// clockwise, which keeps the result consistent with the half-open quarters
/// of [`allocentric_group`].
fn nearest_keyedge(obs: &KeyedgeObservation) -> Result<Keyedge> {
    let distances = obs.edges.map(|e| e.distance);
    for (edge, distance) in Keyedge::ALL.into_iter().zip(distances) {
        if !(distance > 0.0) || !distance.is_finite() {
            return Err(Error::DegenerateObservation(format!(
                "keyedge {edge} has distance {distance}"
            )));
        }
    }
    let min = distances.into_iter().fold(f64::INFINITY, f64::min);
    let tied: Vec<Keyedge> = Keyedge::ALL
        .into_iter()
        .filter(|e| distances[e.index()] - min <= DISTANCE_TIE_TOLERANCE * min)
        .collect();
    match tied.as_slice() {
        [only] => Ok(*only),
        [first, second] if first.next() == *second => Ok(*first),
        [first, second] if second.next() == *first => Ok(*second),
        _ => Err(Error::DegenerateObservation(format!(
            "keyedges {tied:?} are equidistant from the camera"
        ))),
    }
}

pub fn camera_centric_view(obs: &KeyedgeObservation) -> Result<CameraCentricRatios> {
    for edge in Keyedge::ALL {
        let height = obs.edge(edge).height;
        if !(height > 0.0) {
            return Err(Error::ZeroHeight {
                keyedge: edge,
                height,
            });
        }
    }
    let group = AllocentricGroup::from_nearest_keyedge(nearest_keyedge(obs)?);
    let h = |camera_index: usize| obs.edge(group.keyedge_at(camera_index)).height;
    Ok(CameraCentricRatios {
        r21: h(2) / h(1),
        r41: h(4) / h(1),
        r32: h(3) / h(2),
        r34: h(3) / h(4),
        group,
    })
}

pub fn to_object_centric_tuples(cc: &CameraCentricRatios) -> [RatioTuple; 4] {
    cc.to_object_ratios().tuples()
}
