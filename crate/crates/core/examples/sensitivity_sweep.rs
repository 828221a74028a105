// Small Monte Carlo run showing how height noise hurts far objects more.

use keyedge::data::scene::DimsRanges;
use keyedge::geometry::CameraIntrinsics;
use keyedge::sensitivity::{run_sensitivity, SensitivityConfig};

fn main() {
    let cfg = SensitivityConfig {
        noise_levels_px: vec![0.0, 0.5],
        depth_edges: vec![5.0, 20.0, 40.0, 60.0],
        gamma_edges: vec![-30f64.to_radians(), 20f64.to_radians()],
        trials_per_cell: 300,
        dims_ranges: DimsRanges::default(),
        intrinsics: CameraIntrinsics::new(721.5377, 609.5593, 172.854).unwrap(),
        seed: 7,
    };
    println!("sigma_px  depth band   median rel. depth err  median yaw err");
    for row in run_sensitivity(&cfg).unwrap() {
        println!(
            "{:>8.2}  {:>4.0}-{:<4.0}   {:>21.5}  {:>14.5}",
            row.noise_sigma_px, row.depth_min, row.depth_max, row.median_rel_depth_err, row.median_yaw_err_rad
        );
    }
}
