// Relabels keyedges starting from the one nearest the camera, then maps the
// camera-centric ratios back to object-centric tuples.

use keyedge::geometry::{keyedge_ratios, project_keyedges, BoxPose3D, CameraIntrinsics, Dims, Vec3};
use keyedge::indexing::{allocentric_group, camera_centric_view, to_object_centric_tuples};

fn main() {
    let intr = CameraIntrinsics::new(721.5377, 609.5593, 172.854).unwrap();
    for yaw in [-2.5, -1.0, 0.4, 2.0] {
        let pose = BoxPose3D::new(Vec3::new(1.0, 0.9, 20.0), Dims::new(4.5, 1.8, 1.5), yaw).unwrap();
        let obs = project_keyedges(&pose, &intr).unwrap();
        let cc = camera_centric_view(&obs).unwrap();
        let alpha = pose.angles().unwrap().allocentric;

        println!(
            "yaw {yaw:+.1}: alpha {alpha:+.3}, group {}, nearest edge {}, r21 {:.4} r41 {:.4} r32 {:.4} r34 {:.4}",
            cc.group.id(),
            cc.group.nearest_keyedge(),
            cc.r21,
            cc.r41,
            cc.r32,
            cc.r34
        );
        assert_eq!(cc.group, allocentric_group(alpha));

        let direct = keyedge_ratios(&obs).unwrap().tuples();
        for (a, b) in to_object_centric_tuples(&cc).iter().zip(direct.iter()) {
            assert!((a.r1 - b.r1).abs() < 1e-12 && (a.r2 - b.r2).abs() < 1e-12);
        }
    }
}
