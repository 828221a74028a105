//! Monte Carlo sensitivity of fused depth and yaw to keyedge-height noise,
//! broken down by noise level, depth band and viewing-angle bin.
//!
//! Each trial samples a pose inside its cell, projects the keyedges, perturbs
//! the heights, re-indexes them camera-centrically, inverts all four tuples
//! and fuses them. Trial `t` of cell `c` is seeded with
//! `seed + c * trials_per_cell + t`, so results do not depend on scheduling.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::noise::{perturb_heights, NoiseModel};
use crate::data::scene::{in_front, sample_pose, DimsRanges, MAX_RETRIES};
use crate::error::{Error, Result};
use crate::geometry::{angle_diff, keyedge_ratios, project_keyedges, CameraIntrinsics, ObjectRatios};
use crate::indexing::camera_centric_view;
use crate::recovery::solve_all;
use crate::uncertainty::{depth_partials, fuse, propagate_sigma, tuples_with_sigma, RatioSigmas};

/// Pixel spread used to weight tuples when the noise model is noise-free.
pub const NOMINAL_SIGMA_PX: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityConfig {
    /// Gaussian height-noise levels in pixels; 0 means noise-free.
    pub noise_levels_px: Vec<f64>,
    /// Edges of the depth bands, meters.
    pub depth_edges: Vec<f64>,
    /// Edges of the viewing-angle bins, radians.
    pub gamma_edges: Vec<f64>,
    pub trials_per_cell: usize,
    pub dims_ranges: DimsRanges,
    pub intrinsics: CameraIntrinsics,
    pub seed: u64,
}

impl SensitivityConfig {
    pub fn validate(&self) -> Result<()> {
        let increasing = |edges: &[f64]| edges.len() >= 2 && edges.windows(2).all(|w| w[0] < w[1]);
        if self.noise_levels_px.is_empty()
            || self.noise_levels_px.iter().any(|s| !(*s >= 0.0) || !s.is_finite())
        {
            return Err(Error::Config("noise levels must be non-empty and >= 0".into()));
        }
        if !increasing(&self.depth_edges) || self.depth_edges[0] <= 0.0 {
            return Err(Error::Config("depth edges must be positive and strictly increasing".into()));
        }
        if !increasing(&self.gamma_edges)
            || self.gamma_edges[0] <= -std::f64::consts::FRAC_PI_2
            || self.gamma_edges[self.gamma_edges.len() - 1] >= std::f64::consts::FRAC_PI_2
        {
            return Err(Error::Config(
                "gamma edges must be strictly increasing inside (-90°, 90°)".into(),
            ));
        }
        if self.trials_per_cell == 0 {
            return Err(Error::Config("trials per cell must be positive".into()));
        }
        crate::data::scene::SceneConfig {
            count: 0,
            depth_range: (self.depth_edges[0], self.depth_edges[1]),
            gamma_range: (self.gamma_edges[0], self.gamma_edges[1]),
            dims_ranges: self.dims_ranges,
            seed: self.seed,
            reject_degenerate: false,
        }
        .validate()
    }

    pub fn cell_count(&self) -> usize {
        self.noise_levels_px.len() * (self.depth_edges.len() - 1) * (self.gamma_edges.len() - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub noise_sigma_px: f64,
    pub depth_min: f64,
    pub depth_max: f64,
    pub gamma_min_deg: f64,
    pub gamma_max_deg: f64,
    pub trials: usize,
    pub failures: usize,
    pub mean_rel_depth_err: f64,
    pub median_rel_depth_err: f64,
    pub mean_yaw_err_rad: f64,
    pub median_yaw_err_rad: f64,
}

#[derive(Debug, Clone, Copy)]
struct TrialOutcome {
    rel_depth_err: f64,
    yaw_err: f64,
}

/// First-order spread of `h_i / h_j` under independent height noise.
fn ratio_sigmas(heights: [f64; 4], ratios: &ObjectRatios, sigma_px: f64) -> RatioSigmas {
    let spread = |i: usize, j: usize, r: f64| {
        r * sigma_px * (heights[i].powi(-2) + heights[j].powi(-2)).sqrt()
    };
    RatioSigmas {
        r_ab: spread(0, 1, ratios.r_ab),
        r_bc: spread(1, 2, ratios.r_bc),
        r_cd: spread(2, 3, ratios.r_cd),
        r_da: spread(3, 0, ratios.r_da),
    }
}

fn run_trial(
    cfg: &SensitivityConfig,
    noise_px: f64,
    depth_range: (f64, f64),
    gamma_range: (f64, f64),
    seed: u64,
) -> Option<TrialOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pose = (0..=MAX_RETRIES)
        .map(|_| sample_pose(&mut rng, depth_range, gamma_range, &cfg.dims_ranges))
        .find(in_front)?;
    let noise = if noise_px > 0.0 {
        NoiseModel::GaussianHeight { sigma_px: noise_px }
    } else {
        NoiseModel::None
    };
    let clean = project_keyedges(&pose, &cfg.intrinsics).ok()?;
    let obs = perturb_heights(&clean, &noise, rng.random());

    let ratios = camera_centric_view(&obs).ok()?.to_object_ratios();
    let weight_px = if noise_px > 0.0 { noise_px } else { NOMINAL_SIGMA_PX };
    let sigmas = ratio_sigmas(obs.heights(), &keyedge_ratios(&obs).ok()?, weight_px);
    let with_sigma = tuples_with_sigma(&ratios, &sigmas);
    let (l, w) = (pose.dims.l, pose.dims.w);
    let solved = solve_all(&with_sigma.map(|t| t.tuple), l, w).ok()?;
    let members: Vec<_> = solved
        .estimates
        .into_iter()
        .filter_map(|est| {
            let ws = &with_sigma[est.reference.index()];
            let partials = depth_partials(&ws.tuple, l, w).ok()?;
            let sigma_d = propagate_sigma(partials, ws.sigma1, ws.sigma2);
            (sigma_d > 0.0 && sigma_d.is_finite()).then_some((est, sigma_d))
        })
        .collect();
    let fused = fuse(&members).ok()?;
    let truth = pose.center.z;
    Some(TrialOutcome {
        rel_depth_err: (fused.d_fusion - truth).abs() / truth,
        yaw_err: angle_diff(fused.theta_fusion, pose.yaw).abs(),
    })
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        f64::NAN
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

pub fn run_sensitivity(cfg: &SensitivityConfig) -> Result<Vec<SensitivityRow>> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.cell_count());
    let mut cell = 0u64;
    for &noise_px in &cfg.noise_levels_px {
        for depth in cfg.depth_edges.windows(2) {
            for gamma in cfg.gamma_edges.windows(2) {
                let base = cfg
                    .seed
                    .wrapping_add(cell.wrapping_mul(cfg.trials_per_cell as u64));
                let outcomes: Vec<Option<TrialOutcome>> = (0..cfg.trials_per_cell)
                    .into_par_iter()
                    .map(|t| {
                        run_trial(
                            cfg,
                            noise_px,
                            (depth[0], depth[1]),
                            (gamma[0], gamma[1]),
                            base.wrapping_add(t as u64),
                        )
                    })
                    .collect();
                let ok: Vec<TrialOutcome> = outcomes.iter().flatten().copied().collect();
                let mut depth_errs: Vec<f64> = ok.iter().map(|o| o.rel_depth_err).collect();
                let mut yaw_errs: Vec<f64> = ok.iter().map(|o| o.yaw_err).collect();
                rows.push(SensitivityRow {
                    noise_sigma_px: noise_px,
                    depth_min: depth[0],
                    depth_max: depth[1],
                    gamma_min_deg: gamma[0].to_degrees(),
                    gamma_max_deg: gamma[1].to_degrees(),
                    trials: cfg.trials_per_cell,
                    failures: outcomes.len() - ok.len(),
                    mean_rel_depth_err: mean(&depth_errs),
                    median_rel_depth_err: median(&mut depth_errs),
                    mean_yaw_err_rad: mean(&yaw_errs),
                    median_yaw_err_rad: median(&mut yaw_errs),
                });
                cell += 1;
            }
        }
    }
    Ok(rows)
}

pub fn write_sensitivity_csv(rows: &[SensitivityRow], writer: impl Write) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    for row in rows {
        csv.serialize(row)?;
    }
    csv.flush()?;
    Ok(())
}
