//! First-order propagation of keyedge-ratio uncertainty to object depth,
//! inverse-uncertainty fusion of the per-tuple estimates, and the
//! uncertainty-aware regression loss.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, Keyedge, ObjectRatios};
use crate::indexing::RatioTuple;
use crate::recovery::{
    center_offset_signs, check_dims, distortion, estimate_pose, placeholder_row, PoseEstimate,
};

/// A ratio tuple together with the spread of each of its two ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioWithSigma {
    pub tuple: RatioTuple,
    pub sigma1: f64,
    pub sigma2: f64,
}

/// `∂d_obj/∂r1` and `∂d_obj/∂r2` for one tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthPartials {
    pub d_r1: f64,
    pub d_r2: f64,
}

/// Analytic partial derivatives of the center depth with respect to the two
/// ratios of a tuple, through both the reference depth and the yaw.
pub fn depth_partials(t: &RatioTuple, l: f64, w: f64) -> Result<DepthPartials> {
    check_dims(l, w)?;
    let delta = distortion(t)?;
    let row = placeholder_row(t.reference);

    // d_ref = (u² + v²)^(-1/2)
    let u = row.depth_w.eval(delta) / w;
    let v = row.depth_l.eval(delta) / l;
    let d_ref = 1.0 / u.hypot(v);
    let d_ref3 = d_ref * d_ref * d_ref;

    // θ = atan2(y, x)
    let y = w * row.theta_w.eval(delta);
    let x = l * row.theta_l.eval(delta);
    let rho2 = x * x + y * y;
    let theta = y.atan2(x);
    let (sin, cos) = theta.sin_cos();

    let (s_l, s_w) = center_offset_signs(t.reference);
    let d_offset_d_theta = s_l * l * cos - s_w * w * sin;

    let partial = |wrt: usize| {
        let du = row.depth_w.derivative(wrt) / w;
        let dv = row.depth_l.derivative(wrt) / l;
        let d_dref = -d_ref3 * (u * du + v * dv);
        let dy = w * row.theta_w.derivative(wrt);
        let dx = l * row.theta_l.derivative(wrt);
        let d_theta = (x * dy - y * dx) / rho2;
        d_dref + 0.5 * d_offset_d_theta * d_theta
    };

    Ok(DepthPartials {
        d_r1: partial(0),
        d_r2: partial(1),
    })
}

/// `σ_d = |∂d/∂r1|·σ1 + |∂d/∂r2|·σ2`.
pub fn propagate_sigma(partials: DepthPartials, sigma1: f64, sigma2: f64) -> f64 {
    partials.d_r1.abs() * sigma1 + partials.d_r2.abs() * sigma2
}

/// Per-ratio spreads in object-centric indexing, one per adjacent ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioSigmas {
    pub r_ab: f64,
    pub r_bc: f64,
    pub r_cd: f64,
    pub r_da: f64,
}

impl RatioSigmas {
    pub fn uniform(sigma: f64) -> Self {
        Self {
            r_ab: sigma,
            r_bc: sigma,
            r_cd: sigma,
            r_da: sigma,
        }
    }

    fn of(&self, from: Keyedge) -> f64 {
        [self.r_ab, self.r_bc, self.r_cd, self.r_da][from.index()]
    }
}

/// Attaches spreads to the four reference tuples. A tuple member stored as
/// the reciprocal of a measured ratio `r` gets spread `σ/r²`.
pub fn tuples_with_sigma(ratios: &ObjectRatios, sigmas: &RatioSigmas) -> [RatioWithSigma; 4] {
    ratios.tuples().map(|tuple| {
        let reference = tuple.reference;
        // r1 = h_i/h_prev = 1 / r_{prev,i}
        let prev = reference.prev();
        let measured = ratios.adjacent(prev, reference);
        let sigma1 = sigmas.of(prev) / (measured * measured);
        // r2 = h_i/h_next, stored directly
        let sigma2 = sigmas.of(reference);
        RatioWithSigma {
            tuple,
            sigma1,
            sigma2,
        }
    })
}

/// Pose estimate of one tuple together with its propagated depth spread.
pub fn estimate_with_sigma(rs: &RatioWithSigma, l: f64, w: f64) -> Result<(PoseEstimate, f64)> {
    let estimate = estimate_pose(&rs.tuple, l, w)?;
    let partials = depth_partials(&rs.tuple, l, w)?;
    Ok((estimate, propagate_sigma(partials, rs.sigma1, rs.sigma2)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusedMember {
    pub estimate: PoseEstimate,
    pub sigma_d: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusedEstimate {
    pub d_fusion: f64,
    pub theta_fusion: f64,
    /// How `theta_fusion` was combined; always `"weighted_circular_mean"`.
    pub theta_method: String,
    pub per_tuple: Vec<FusedMember>,
}

pub const THETA_FUSION_METHOD: &str = "weighted_circular_mean";

/// Inverse-uncertainty weighted average of per-tuple estimates. Yaw is fused
/// with a weighted circular mean using the same weights.
pub fn fuse(members: &[(PoseEstimate, f64)]) -> Result<FusedEstimate> {
    if members.is_empty() {
        return Err(Error::EmptyInput);
    }
    for &(_, sigma) in members {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::NonPositiveSigma(sigma));
        }
    }
    let raw: Vec<f64> = members.iter().map(|(_, s)| 1.0 / s).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();

    let (lo, hi) = members
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (e, _)| {
            (lo.min(e.d_obj), hi.max(e.d_obj))
        });
    let d_fusion = members
        .iter()
        .zip(&weights)
        .map(|((e, _), w)| w * e.d_obj)
        .sum::<f64>()
        .clamp(lo, hi);

    let (sin, cos) = members
        .iter()
        .zip(&weights)
        .fold((0.0, 0.0), |(s, c), ((e, _), w)| {
            (s + w * e.theta.sin(), c + w * e.theta.cos())
        });
    let theta_fusion = if sin.hypot(cos) > 1e-12 {
        normalize_angle(sin.atan2(cos))
    } else {
        // opposing yaws cancel; fall back to the most certain member
        let best = weights
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        members[best].0.theta
    };

    Ok(FusedEstimate {
        d_fusion,
        theta_fusion,
        theta_method: THETA_FUSION_METHOD.to_owned(),
        per_tuple: members
            .iter()
            .zip(weights)
            .map(|(&(estimate, sigma_d), weight)| FusedMember {
                estimate,
                sigma_d,
                weight,
            })
            .collect(),
    })
}

/// Laplace-style loss `|r - r*| / σ + ln σ`.
pub fn uncertainty_loss(r: f64, sigma: f64, r_star: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::NonPositiveSigma(sigma));
    }
    Ok((r - r_star).abs() / sigma + sigma.ln())
}
