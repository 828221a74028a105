// Recovers yaw and depth from keyedge-ratios alone, once per reference edge.

use keyedge::geometry::{keyedge_ratios, project_keyedges, BoxPose3D, CameraIntrinsics, Dims, Vec3};
use keyedge::recovery::solve_all;

fn main() {
    let dims = Dims::new(4.0, 2.0, 1.5);
    let pose = BoxPose3D::new(Vec3::new(-3.0, 0.9, 14.0), dims, 0.6).unwrap();
    // any focal length gives the same ratios
    let intr = CameraIntrinsics::new(1000.0, 640.0, 360.0).unwrap();

    let ratios = keyedge_ratios(&project_keyedges(&pose, &intr).unwrap()).unwrap();
    let solved = solve_all(&ratios.tuples(), dims.l, dims.w).unwrap();
    for est in &solved.estimates {
        println!(
            "reference {}: yaw {:.6} rad, edge depth {:.4} m, center depth {:.4} m",
            est.reference, est.theta, est.d_ref, est.d_obj
        );
        assert!((est.d_obj - 14.0).abs() < 1e-9);
        assert!((est.theta - 0.6).abs() < 1e-9);
    }
}
