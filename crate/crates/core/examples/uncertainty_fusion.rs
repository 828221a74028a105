// Propagates ratio noise to a depth spread per tuple, then fuses the four
// estimates with inverse-spread weights.

use keyedge::data::noise::{perturb_heights, NoiseModel};
use keyedge::geometry::{keyedge_ratios, project_keyedges, BoxPose3D, CameraIntrinsics, Dims, Vec3};
use keyedge::uncertainty::{estimate_with_sigma, fuse, tuples_with_sigma, uncertainty_loss, RatioSigmas};

fn main() {
    let intr = CameraIntrinsics::new(721.5377, 609.5593, 172.854).unwrap();
    let dims = Dims::new(4.2, 1.8, 1.5);
    let pose = BoxPose3D::new(Vec3::new(3.0, 0.9, 25.0), dims, -0.8).unwrap();

    let clean = project_keyedges(&pose, &intr).unwrap();
    let noisy = perturb_heights(&clean, &NoiseModel::GaussianHeight { sigma_px: 0.5 }, 2024);
    let ratios = keyedge_ratios(&noisy).unwrap();

    let members: Vec<_> = tuples_with_sigma(&ratios, &RatioSigmas::uniform(0.01))
        .iter()
        .filter_map(|t| estimate_with_sigma(t, dims.l, dims.w).ok())
        .collect();
    for (est, sigma_d) in &members {
        println!("reference {}: d_obj {:.3} m, sigma_d {:.3} m", est.reference, est.d_obj, sigma_d);
    }

    let fused = fuse(&members).unwrap();
    println!(
        "fused depth {:.3} m (truth 25.000), yaw {:.4} rad (truth -0.8000) via {}",
        fused.d_fusion, fused.theta_fusion, fused.theta_method
    );

    // the loss used to learn a spread is smallest when sigma equals the residual
    for sigma in [0.05, 0.1, 0.2, 0.4] {
        println!("loss(r=1.2, sigma={sigma}, r*=1.0) = {:.6}", uncertainty_loss(1.2, sigma, 1.0).unwrap());
    }
}
