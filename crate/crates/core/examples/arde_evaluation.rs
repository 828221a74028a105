// Average relative depth error for a handful of detections, globally and
// per viewing-angle bin.

use keyedge::metrics::{arde_by_viewing_angle, arde_curve, BBox2D, DetectionRecord, GroundTruthRecord};

fn main() {
    let gt = |x: f64, d_gt: f64, gamma_gt: f64| GroundTruthRecord {
        frame: "000042".into(),
        bbox2d: BBox2D::new(x, 150.0, x + 80.0, 220.0),
        d_gt,
        gamma_gt,
    };
    let det = |x: f64, confidence: f64, d_est: f64| DetectionRecord {
        frame: "000042".into(),
        bbox2d: BBox2D::new(x + 3.0, 152.0, x + 83.0, 221.0),
        confidence,
        d_est,
        gamma_est: None,
    };
    let gts = [gt(100.0, 12.0, -0.4), gt(400.0, 25.0, 0.0), gt(700.0, 41.0, 0.3)];
    let dets = [det(100.0, 0.95, 12.6), det(400.0, 0.81, 23.9), det(700.0, 0.40, 45.5), det(1000.0, 0.3, 9.0)];

    let curve = arde_curve(&dets, &gts, 0.7).unwrap();
    println!("ARDE {:.4} (max recall {:.2})", curve.value, curve.max_recall);
    println!("envelope at recall 0.25 / 0.5 / 1.0: {:.4} / {:.4} / {:.4}", curve.envelope[9], curve.envelope[19], curve.envelope[39]);

    let edges = [-30f64, -10.0, 10.0, 30.0].map(f64::to_radians);
    for bin in arde_by_viewing_angle(&dets, &gts, 0.7, &edges).unwrap() {
        println!(
            "gamma [{:+.0}°, {:+.0}°): {} gt, {} tp, ARDE {:?}",
            bin.gamma_min.to_degrees(),
            bin.gamma_max.to_degrees(),
            bin.gt_count,
            bin.tp_count,
            bin.arde
        );
    }
}
