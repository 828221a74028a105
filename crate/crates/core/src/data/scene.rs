//! Seeded synthetic scenes of upright boxes.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{keyedge_positions, BoxPose3D, Dims, Keyedge, Vec3};

/// Height of the camera above the ground plane, meters (KITTI rig).
pub const CAMERA_HEIGHT: f64 = 1.65;
pub const MAX_RETRIES: usize = 100;
/// A pose is degenerate when some reference tuple has `max |r - 1|` below this.
pub const POSE_DEGENERACY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimsRanges {
    pub l: (f64, f64),
    pub w: (f64, f64),
    pub h: (f64, f64),
}

impl Default for DimsRanges {
    /// Passenger-car sizes.
    fn default() -> Self {
        Self {
            l: (3.2, 5.2),
            w: (1.4, 2.0),
            h: (1.3, 1.9),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneConfig {
    pub count: usize,
    /// Range of object-center depth, meters.
    pub depth_range: (f64, f64),
    /// Range of the viewing angle, radians.
    pub gamma_range: (f64, f64),
    pub dims_ranges: DimsRanges,
    pub seed: u64,
    /// Resample poses whose keyedge-ratios carry no measurable distortion.
    pub reject_degenerate: bool,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            count: 100,
            depth_range: (5.0, 60.0),
            gamma_range: (-40f64.to_radians(), 40f64.to_radians()),
            dims_ranges: DimsRanges::default(),
            seed: 0,
            reject_degenerate: true,
        }
    }
}

fn check_range(name: &str, (lo, hi): (f64, f64)) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} range ({lo}, {hi}) is empty")))
    }
}

impl SceneConfig {
    pub fn validate(&self) -> Result<()> {
        check_range("depth", self.depth_range)?;
        check_range("gamma", self.gamma_range)?;
        check_range("length", self.dims_ranges.l)?;
        check_range("width", self.dims_ranges.w)?;
        check_range("height", self.dims_ranges.h)?;
        if self.depth_range.0 <= 0.0 {
            return Err(Error::Config("depth range must be positive".into()));
        }
        if self.dims_ranges.l.0 <= 0.0 || self.dims_ranges.w.0 <= 0.0 || self.dims_ranges.h.0 <= 0.0 {
            return Err(Error::Config("dimension ranges must be positive".into()));
        }
        if self.gamma_range.0 <= -FRAC_PI_2 || self.gamma_range.1 >= FRAC_PI_2 {
            return Err(Error::Config("viewing angles must lie inside (-90°, 90°)".into()));
        }
        Ok(())
    }
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    rng.random_range(lo..hi)
}

/// Draws one pose; the ranges are assumed validated.
pub fn sample_pose<R: Rng + ?Sized>(
    rng: &mut R,
    depth_range: (f64, f64),
    gamma_range: (f64, f64),
    dims_ranges: &DimsRanges,
) -> BoxPose3D {
    let z = uniform(rng, depth_range);
    let gamma = uniform(rng, gamma_range);
    let yaw = uniform(rng, (-PI, PI));
    let dims = Dims::new(
        uniform(rng, dims_ranges.l),
        uniform(rng, dims_ranges.w),
        uniform(rng, dims_ranges.h),
    );
    BoxPose3D {
        center: Vec3::new(z * gamma.tan(), CAMERA_HEIGHT - 0.5 * dims.h, z),
        dims,
        yaw,
    }
}

/// Whether every keyedge lies in front of the camera.
pub fn in_front(pose: &BoxPose3D) -> bool {
    keyedge_positions(pose).corners.iter().all(|c| c.z > 0.0)
}

/// Whether some reference tuple of the pose is numerically unobservable.
pub fn is_degenerate(pose: &BoxPose3D, tolerance: f64) -> bool {
    let p = keyedge_positions(pose);
    Keyedge::ALL.into_iter().any(|reference| {
        let d = p.depth(reference);
        let r1 = p.depth(reference.prev()) / d;
        let r2 = p.depth(reference.next()) / d;
        (r1 - 1.0).abs().max((r2 - 1.0).abs()) < tolerance
    })
}

/// Deterministic for a given seed; object `i` draws from its own generator
/// seeded with `seed + i`.
pub fn generate_scene(cfg: &SceneConfig) -> Result<Vec<BoxPose3D>> {
    cfg.validate()?;
    (0..cfg.count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
            for _ in 0..=MAX_RETRIES {
                let pose = sample_pose(&mut rng, cfg.depth_range, cfg.gamma_range, &cfg.dims_ranges);
                let rejected = !in_front(&pose)
                    || (cfg.reject_degenerate && is_degenerate(&pose, POSE_DEGENERACY_TOLERANCE));
                if !rejected {
                    return Ok(pose);
                }
            }
            Err(Error::Config(format!(
                "object {i}: no valid pose after {MAX_RETRIES} retries"
            )))
        })
        .collect()
}
