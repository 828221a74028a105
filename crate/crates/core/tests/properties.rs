mod common;

use std::f64::consts::PI;

use keyedge::data::kitti::parse_label_file;
use keyedge::data::noise::{perturb_heights, NoiseModel};
use keyedge::data::records::{read_jsonl, write_jsonl, RatioRecord, TruthRecord};
use keyedge::geometry::{
    angle_diff, keyedge_positions, keyedge_ratios, project_keyedges, AngleTriple, BoxPose3D,
    CameraIntrinsics, Dims, Keyedge, Vec3,
};
use keyedge::indexing::{allocentric_group, camera_centric_view, to_object_centric_tuples};
use keyedge::recovery::{estimate_pose, solve_all};
use keyedge::uncertainty::{depth_partials, fuse, uncertainty_loss};
use proptest::prelude::*;

use common::{corner_depths, invert_from_b, relative};

fn intr(f: f64) -> CameraIntrinsics {
    CameraIntrinsics::new(f, 609.5593, 172.854).unwrap()
}

prop_compose! {
    fn pose()(
        z in 5.0f64..60.0,
        gamma in -0.7f64..0.7,
        l in 3.2f64..5.2,
        w in 1.4f64..2.0,
        h in 1.3f64..1.9,
        yaw in -PI..PI,
    ) -> BoxPose3D {
        BoxPose3D::new(Vec3::new(z * gamma.tan(), 1.65 - h / 2.0, z), Dims::new(l, w, h), yaw).unwrap()
    }
}

proptest! {
    #[test]
    fn depths_match_rotation_oracle(p in pose()) {
        let positions = keyedge_positions(&p);
        let oracle = corner_depths(&p);
        for e in Keyedge::ALL {
            prop_assert!((positions.depth(e) - oracle[e.index()]).abs() < 1e-12);
        }
        let [da, db, dc, _] = oracle;
        let (s, c) = p.yaw.sin_cos();
        prop_assert!((da - (db + p.dims.w * c)).abs() < 1e-12);
        prop_assert!((dc - (db + p.dims.l * s)).abs() < 1e-12);
    }

    #[test]
    fn every_tuple_round_trips(p in pose()) {
        let obs = project_keyedges(&p, &intr(721.5377)).unwrap();
        let ratios = keyedge_ratios(&obs).unwrap();
        let solved = solve_all(&ratios.tuples(), p.dims.l, p.dims.w).unwrap();
        prop_assert_eq!(solved.estimates.len(), 4);
        let depths = corner_depths(&p);
        for est in solved.estimates {
            prop_assert!(angle_diff(est.theta, p.yaw).abs() < 1e-12);
            prop_assert!(relative(est.d_ref, depths[est.reference.index()]) < 1e-12);
            prop_assert!(relative(est.d_obj, p.center.z) < 1e-12);
        }
    }

    #[test]
    fn depth_times_height_is_constant(p in pose(), f in 300.0f64..2000.0) {
        let obs = project_keyedges(&p, &intr(f)).unwrap();
        for e in Keyedge::ALL {
            let edge = obs.edge(e);
            prop_assert!(relative(edge.depth * edge.height, f * p.dims.h) < 1e-12);
        }
    }

    #[test]
    fn ratios_do_not_depend_on_focal_length(p in pose(), scale in 0.5f64..4.0) {
        let a = keyedge_ratios(&project_keyedges(&p, &intr(721.5377)).unwrap()).unwrap();
        let b = keyedge_ratios(&project_keyedges(&p, &intr(721.5377 * scale)).unwrap()).unwrap();
        for (x, y) in a.as_array().into_iter().zip(b.as_array()) {
            prop_assert!(relative(x, y) < 1e-12);
        }
    }

    #[test]
    fn angle_conversions_are_inverse(theta in -PI..PI, gamma in -1.5f64..1.5) {
        let t = AngleTriple::from_egocentric(theta, gamma);
        let back = AngleTriple::from_allocentric(t.allocentric, gamma);
        prop_assert!(angle_diff(back.egocentric, theta).abs() < 1e-12);
        prop_assert!(angle_diff(t.egocentric, t.allocentric + t.viewing).abs() < 1e-12);
    }

    #[test]
    fn reference_b_matches_direct_inversion(p in pose()) {
        let obs = project_keyedges(&p, &intr(721.5377)).unwrap();
        let ratios = keyedge_ratios(&obs).unwrap();
        let r_ba = ratios.adjacent(Keyedge::B, Keyedge::A);
        let r_bc = ratios.adjacent(Keyedge::B, Keyedge::C);
        let (theta, d_b) = invert_from_b(r_ba, r_bc, p.dims.l, p.dims.w);
        let est = estimate_pose(&ratios.tuples()[Keyedge::B.index()], p.dims.l, p.dims.w).unwrap();
        prop_assert!(angle_diff(est.theta, theta).abs() < 1e-12);
        prop_assert!(relative(est.d_ref, d_b) < 1e-12);
    }

    #[test]
    fn tuples_agree_with_each_other(p in pose()) {
        let obs = project_keyedges(&p, &intr(721.5377)).unwrap();
        let solved = solve_all(&keyedge_ratios(&obs).unwrap().tuples(), p.dims.l, p.dims.w).unwrap();
        let first = solved.estimates[0];
        for est in &solved.estimates[1..] {
            prop_assert!(relative(est.d_obj, first.d_obj) < 1e-12);
            prop_assert!(angle_diff(est.theta, first.theta).abs() < 1e-12);
        }
    }

    #[test]
    fn recovery_scales_with_the_scene(p in pose(), lambda in 0.2f64..5.0) {
        let f = intr(721.5377);
        let base = keyedge_ratios(&project_keyedges(&p, &f).unwrap()).unwrap();
        let scaled_pose = p.scaled(lambda);
        let scaled = keyedge_ratios(&project_keyedges(&scaled_pose, &f).unwrap()).unwrap();
        let (l, w) = (p.dims.l, p.dims.w);
        let a = estimate_pose(&base.tuples()[0], l, w).unwrap();
        let b = estimate_pose(&scaled.tuples()[0], lambda * l, lambda * w).unwrap();
        prop_assert!(relative(b.d_obj, lambda * a.d_obj) < 1e-11);
        prop_assert!(relative(b.d_ref, lambda * a.d_ref) < 1e-11);
        prop_assert!(angle_diff(a.theta, b.theta).abs() < 1e-11);
    }

    #[test]
    fn camera_centric_conversion_matches_direct_tuples(p in pose()) {
        let obs = project_keyedges(&p, &intr(721.5377)).unwrap();
        let Ok(cc) = camera_centric_view(&obs) else {
            // exact distance ties are rejected; they have measure zero here
            return Ok(());
        };
        let direct = keyedge_ratios(&obs).unwrap().tuples();
        let converted = to_object_centric_tuples(&cc);
        for (d, c) in direct.iter().zip(converted.iter()) {
            prop_assert_eq!(d.reference, c.reference);
            prop_assert!(relative(c.r1, d.r1) < 1e-12);
            prop_assert!(relative(c.r2, d.r2) < 1e-12);
        }
    }

    #[test]
    fn group_depends_only_on_alpha(p in pose()) {
        let obs = project_keyedges(&p, &intr(721.5377)).unwrap();
        let Ok(cc) = camera_centric_view(&obs) else { return Ok(()); };
        let alpha = p.angles().unwrap().allocentric;
        // stay clear of the quarter boundaries where a tie decides
        let margin = (alpha / (PI / 2.0)).fract().abs();
        prop_assume!(margin > 1e-6 && margin < 1.0 - 1e-6);
        prop_assert_eq!(cc.group, allocentric_group(alpha));
    }

    #[test]
    fn partials_match_finite_differences(p in pose(), which in 0usize..4) {
        let obs = project_keyedges(&p, &intr(721.5377)).unwrap();
        let t = keyedge_ratios(&obs).unwrap().tuples()[which];
        let (l, w) = (p.dims.l, p.dims.w);
        let analytic = depth_partials(&t, l, w).unwrap();
        let d_obj = |r1: f64, r2: f64| {
            let mut u = t;
            u.r1 = r1;
            u.r2 = r2;
            estimate_pose(&u, l, w).unwrap().d_obj
        };
        let h1 = 1e-6 * t.r1.abs();
        let h2 = 1e-6 * t.r2.abs();
        let fd1 = (d_obj(t.r1 + h1, t.r2) - d_obj(t.r1 - h1, t.r2)) / (2.0 * h1);
        let fd2 = (d_obj(t.r1, t.r2 + h2) - d_obj(t.r1, t.r2 - h2)) / (2.0 * h2);
        let scale = analytic.d_r1.abs().max(analytic.d_r2.abs());
        prop_assert!((analytic.d_r1 - fd1).abs() <= 1e-6 * scale);
        prop_assert!((analytic.d_r2 - fd2).abs() <= 1e-6 * scale);
    }

    #[test]
    fn fusion_hull_and_invariances(
        members in proptest::collection::vec((5.0f64..60.0, -PI..PI, 0.01f64..5.0), 1..6),
        k in 0.01f64..100.0,
    ) {
        let build = |m: &[(f64, f64, f64)], scale: f64| -> Vec<_> {
            m.iter()
                .map(|&(d, theta, s)| (keyedge::recovery::PoseEstimate {
                    reference: Keyedge::A,
                    theta,
                    d_ref: d,
                    d_obj: d,
                }, s * scale))
                .collect()
        };
        let fused = fuse(&build(&members, 1.0)).unwrap();
        let lo = members.iter().map(|m| m.0).fold(f64::INFINITY, f64::min);
        let hi = members.iter().map(|m| m.0).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(fused.d_fusion >= lo && fused.d_fusion <= hi);

        let rescaled = fuse(&build(&members, k)).unwrap();
        prop_assert!(relative(rescaled.d_fusion, fused.d_fusion) < 1e-12);

        let mut reversed = members.clone();
        reversed.reverse();
        let permuted = fuse(&build(&reversed, 1.0)).unwrap();
        prop_assert!(relative(permuted.d_fusion, fused.d_fusion) < 1e-12);
    }

    #[test]
    fn loss_is_minimized_at_the_residual(r in 0.5f64..2.0, r_star in 0.5f64..2.0) {
        let residual = (r - r_star).abs();
        prop_assume!(residual > 1e-3);
        let grid: Vec<f64> = (1..=4000).map(|i| i as f64 * 1e-3).collect();
        let best = grid
            .iter()
            .copied()
            .min_by(|a, b| {
                uncertainty_loss(r, *a, r_star).unwrap().total_cmp(&uncertainty_loss(r, *b, r_star).unwrap())
            })
            .unwrap();
        prop_assert!((best - residual).abs() <= 1e-3);
    }

    #[test]
    fn no_noise_is_identity(p in pose(), seed in any::<u64>()) {
        let obs = project_keyedges(&p, &intr(721.5377)).unwrap();
        prop_assert_eq!(perturb_heights(&obs, &NoiseModel::None, seed), obs);
    }

    #[test]
    fn jsonl_round_trip(p in pose(), id in "[a-z0-9:]{1,12}") {
        let obs = project_keyedges(&p, &intr(721.5377)).unwrap();
        let angles = p.angles().unwrap();
        let record = RatioRecord {
            id,
            class_name: Some("Car".into()),
            dims: p.dims,
            ratios: keyedge_ratios(&obs).unwrap(),
            camera_centric: camera_centric_view(&obs).ok(),
            sigmas: None,
            truth: Some(TruthRecord { pose: p, alpha: angles.allocentric, gamma: angles.viewing }),
            hard: false,
        };
        let mut buf = Vec::new();
        write_jsonl(std::slice::from_ref(&record), &mut buf).unwrap();
        let back: Vec<RatioRecord> = read_jsonl(buf.as_slice()).unwrap();
        prop_assert_eq!(back, vec![record]);
    }

    #[test]
    fn label_parsing_never_panics(
        drop in proptest::option::of(0usize..15),
        replace in proptest::option::of((0usize..15, "[ -~]{0,8}")),
        extra in proptest::option::of("[a-z0-9.-]{1,5}"),
    ) {
        let line = "Car 0.00 0 -1.46 712.40 143.00 810.73 307.92 1.52 1.62 4.05 2.84 1.68 12.17 -1.23";
        let mut tokens: Vec<String> = line.split(' ').map(str::to_owned).collect();
        if let Some((i, t)) = replace {
            tokens[i] = t;
        }
        if let Some(i) = drop {
            tokens.remove(i);
        }
        if let Some(e) = extra {
            tokens.push(e);
        }
        let text = tokens.join(" ");
        match parse_label_file(&text) {
            Ok(_) => {}
            Err(keyedge::Error::Parse { line, .. }) => prop_assert_eq!(line, 1),
            Err(other) => prop_assert!(false, "unexpected error {other:?}"),
        }
    }
}

#[test]
fn group_of_every_quarter_matches_the_nearest_corner() {
    // α swept around the circle at a fixed position; the nearest corner in the
    // (x, z) plane must be the one the group names
    for i in 0..720 {
        let alpha = -PI + (i as f64 + 0.5) * PI / 360.0;
        let gamma: f64 = 0.2;
        let pose = BoxPose3D::new(
            Vec3::new(20.0 * gamma.tan(), 0.8, 20.0),
            Dims::new(4.0, 1.8, 1.5),
            alpha + gamma,
        )
        .unwrap();
        let nearest = common::corner_xz(&pose)
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.0.hypot(a.1.1).total_cmp(&b.1.0.hypot(b.1.1)))
            .map(|(i, _)| Keyedge::from_index(i))
            .unwrap();
        assert_eq!(allocentric_group(alpha).nearest_keyedge(), nearest, "alpha {alpha}");
    }
}
