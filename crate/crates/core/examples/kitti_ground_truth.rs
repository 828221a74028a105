// Turns KITTI label and calibration text into keyedge-ratio targets and
// checks that they invert back to the labelled depth.

use keyedge::data::kitti::{labels_to_ground_truth, parse_calib, parse_label_file};
use keyedge::recovery::solve_all;

const LABELS: &str = "\
Car 0.00 0 -1.46 712.40 143.00 810.73 307.92 1.52 1.62 4.05 2.84 1.68 12.17 -1.23
Van 0.12 1 0.81 100.00 150.00 300.00 260.00 2.20 1.90 5.10 -8.32 1.78 21.05 0.43
DontCare -1 -1 -10 503.89 169.71 590.61 190.13 -1 -1 -1 -1000 -1000 -1000 -10
";

const CALIB: &str = "P2: 7.215377e+02 0.0 6.095593e+02 4.485728e+01 0.0 7.215377e+02 1.728540e+02 2.163791e-01 0.0 0.0 1.0 2.745884e-03\n";

fn main() {
    let labels = parse_label_file(LABELS).unwrap();
    let intr = parse_calib(CALIB).unwrap();
    for gt in labels_to_ground_truth(&labels, &intr).unwrap() {
        let r = gt.ratios;
        println!(
            "line {} {}: group {}, ratios ({:.4}, {:.4}, {:.4}, {:.4}), alpha file {:+.2} derived {:+.4}",
            gt.line,
            gt.class_name,
            gt.group.id(),
            r.r_ab,
            r.r_bc,
            r.r_cd,
            r.r_da,
            gt.label_alpha,
            gt.angles.allocentric
        );
        let solved = solve_all(&gt.tuples, gt.pose.dims.l, gt.pose.dims.w).unwrap();
        for est in solved.estimates {
            assert!((est.d_obj - gt.pose.center.z).abs() < 1e-9);
        }
    }
}
