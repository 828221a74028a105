//! Closed-form depth and yaw from a keyedge-ratio tuple and the object's
//! length and width. Nothing here depends on the camera.
//!
//! For a tuple `(r1, r2)` with reference keyedge `i`:
//!
//! ```text
//! θ    = atan2(w·Rθw, l·Rθl)
//! d_i  = 1 / sqrt(Rdw²/w² + Rdl²/l²)
//! d_obj = d_i + Δ_d / 2
//! ```
//!
//! where the placeholders `R*` and the offset `Δ_d` depend on `i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, Keyedge};
use crate::indexing::RatioTuple;

/// A tuple is unobservable when both `|r - 1|` fall below this.
pub const DISTORTION_TOLERANCE: f64 = 1e-10;

/// Which tuple component a placeholder reads, and with which sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedTerm {
    pub component: usize,
    pub sign: f64,
}

impl SignedTerm {
    const fn new(component: usize, sign: f64) -> Self {
        Self { component, sign }
    }

    pub fn eval(&self, distortion: [f64; 2]) -> f64 {
        self.sign * distortion[self.component]
    }

    /// Derivative of the term with respect to `r1` (`wrt = 0`) or `r2` (`wrt = 1`).
    pub fn derivative(&self, wrt: usize) -> f64 {
        if self.component == wrt {
            self.sign
        } else {
            0.0
        }
    }
}

/// Signed linear forms in `(r1 - 1, r2 - 1)` for one reference keyedge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaceholderRow {
    pub reference: Keyedge,
    pub theta_w: SignedTerm,
    pub theta_l: SignedTerm,
    pub depth_w: SignedTerm,
    pub depth_l: SignedTerm,
}

const R1: usize = 0;
const R2: usize = 1;

pub const fn placeholder_row(reference: Keyedge) -> PlaceholderRow {
    let (theta_w, theta_l, depth_w, depth_l) = match reference {
        Keyedge::A => (
            SignedTerm::new(R1, 1.0),
            SignedTerm::new(R2, -1.0),
            SignedTerm::new(R2, 1.0),
            SignedTerm::new(R1, 1.0),
        ),
        Keyedge::B => (
            SignedTerm::new(R2, 1.0),
            SignedTerm::new(R1, 1.0),
            SignedTerm::new(R1, 1.0),
            SignedTerm::new(R2, 1.0),
        ),
        Keyedge::C => (
            SignedTerm::new(R1, -1.0),
            SignedTerm::new(R2, 1.0),
            SignedTerm::new(R2, 1.0),
            SignedTerm::new(R1, 1.0),
        ),
        Keyedge::D => (
            SignedTerm::new(R2, -1.0),
            SignedTerm::new(R1, -1.0),
            SignedTerm::new(R1, 1.0),
            SignedTerm::new(R2, 1.0),
        ),
    };
    PlaceholderRow {
        reference,
        theta_w,
        theta_l,
        depth_w,
        depth_l,
    }
}

/// Signs `(s_l, s_w)` of `Δ_d = s_l·l·sin θ + s_w·w·cos θ`.
pub const fn center_offset_signs(reference: Keyedge) -> (f64, f64) {
    match reference {
        Keyedge::A => (1.0, -1.0),
        Keyedge::B => (1.0, 1.0),
        Keyedge::C => (-1.0, 1.0),
        Keyedge::D => (-1.0, -1.0),
    }
}

pub fn center_offset(reference: Keyedge, theta: f64, l: f64, w: f64) -> f64 {
    let (s_l, s_w) = center_offset_signs(reference);
    let (sin, cos) = theta.sin_cos();
    s_l * l * sin + s_w * w * cos
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TupleSolution {
    pub theta: f64,
    pub d_ref: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseEstimate {
    pub reference: Keyedge,
    pub theta: f64,
    /// Depth of the reference keyedge.
    pub d_ref: f64,
    /// Depth of the object center.
    pub d_obj: f64,
}

pub(crate) fn check_dims(l: f64, w: f64) -> Result<()> {
    if l > 0.0 && w > 0.0 && l.is_finite() && w.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidDims { l, w })
    }
}

pub(crate) fn distortion(t: &RatioTuple) -> Result<[f64; 2]> {
    let delta = [t.r1 - 1.0, t.r2 - 1.0];
    if !delta.iter().all(|d| d.is_finite()) || delta.iter().all(|d| d.abs() < DISTORTION_TOLERANCE) {
        return Err(Error::UnobservableDistortion {
            reference: t.reference,
        });
    }
    Ok(delta)
}

pub fn solve_tuple(t: &RatioTuple, l: f64, w: f64) -> Result<TupleSolution> {
    check_dims(l, w)?;
    let delta = distortion(t)?;
    let row = placeholder_row(t.reference);
    let theta = (w * row.theta_w.eval(delta)).atan2(l * row.theta_l.eval(delta));
    let u = row.depth_w.eval(delta) / w;
    let v = row.depth_l.eval(delta) / l;
    Ok(TupleSolution {
        theta: normalize_angle(theta),
        d_ref: 1.0 / u.hypot(v),
    })
}

pub fn center_depth(theta: f64, d_ref: f64, reference: Keyedge, l: f64, w: f64) -> Result<f64> {
    let d_obj = d_ref + 0.5 * center_offset(reference, theta, l, w);
    if d_obj > 0.0 {
        Ok(d_obj)
    } else {
        Err(Error::NonPositiveResult(d_obj))
    }
}

pub fn estimate_pose(t: &RatioTuple, l: f64, w: f64) -> Result<PoseEstimate> {
    let TupleSolution { theta, d_ref } = solve_tuple(t, l, w)?;
    Ok(PoseEstimate {
        reference: t.reference,
        theta,
        d_ref,
        d_obj: center_depth(theta, d_ref, t.reference, l, w)?,
    })
}

#[derive(Debug)]
pub struct TupleSolutions {
    pub estimates: Vec<PoseEstimate>,
    /// Tuples that could not be inverted, with the reason.
    pub rejected: Vec<(Keyedge, Error)>,
}

pub fn solve_all(tuples: &[RatioTuple; 4], l: f64, w: f64) -> Result<TupleSolutions> {
    check_dims(l, w)?;
    let mut estimates = Vec::with_capacity(4);
    let mut rejected = Vec::new();
    for t in tuples {
        match estimate_pose(t, l, w) {
            Ok(est) => estimates.push(est),
            Err(err) => rejected.push((t.reference, err)),
        }
    }
    if estimates.is_empty() {
        return Err(Error::AllDegenerate);
    }
    Ok(TupleSolutions {
        estimates,
        rejected,
    })
}
