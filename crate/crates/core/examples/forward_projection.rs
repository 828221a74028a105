// Projects the four vertical edges of a box and prints their image heights
// and the keyedge-ratios between neighbours.

use keyedge::geometry::{keyedge_ratios, project_keyedges, BoxPose3D, CameraIntrinsics, Dims, Keyedge, Vec3};

fn main() {
    let intr = CameraIntrinsics::new(721.5377, 609.5593, 172.854).unwrap();
    let pose = BoxPose3D::new(Vec3::new(2.4, 0.9, 18.0), Dims::new(4.2, 1.7, 1.5), 0.6).unwrap();

    let obs = project_keyedges(&pose, &intr).unwrap();
    for edge in Keyedge::ALL {
        let e = obs.edge(edge);
        println!(
            "{edge}: depth {:.3} m, height {:.2} px, column {:.1} px",
            e.depth, e.height, e.column
        );
    }

    let r = keyedge_ratios(&obs).unwrap();
    println!("r_ab {:.6}  r_bc {:.6}  r_cd {:.6}  r_da {:.6}", r.r_ab, r.r_bc, r.r_cd, r.r_da);
    // going once around the box multiplies back to one
    let product: f64 = r.as_array().iter().product();
    assert!((product - 1.0).abs() < 1e-12);
}
