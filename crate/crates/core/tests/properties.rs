//! Property tests for the algebraic invariants.

use nalgebra::Vector3;
use proptest::prelude::*;
use vo_core::image::{Mask, ScalarGrid};
use vo_core::io::{parse_match_file, write_match_file, MatchPairBlock, MatchRecord};
use vo_core::losses::{min_reprojection, LossMap};
use vo_core::se3::{so3_exp, so3_log, AxisAngle, CameraIntrinsics, Pixel, RigidMotion, Rotation};

fn arb_unit_axis() -> impl Strategy<Value = Vector3<f64>> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_filter_map("non-zero axis", |(x, y, z)| {
        let v = Vector3::new(x, y, z);
        let n = v.norm();
        (n > 0.1).then(|| v / n)
    })
}

fn arb_axis_angle() -> impl Strategy<Value = AxisAngle> {
    (arb_unit_axis(), 0.0..(std::f64::consts::PI - 1e-6))
        .prop_map(|(axis, angle)| AxisAngle::new(axis * angle).unwrap())
}

fn arb_rotation() -> impl Strategy<Value = Rotation> {
    arb_axis_angle().prop_map(|omega| so3_exp(&omega))
}

fn arb_motion() -> impl Strategy<Value = RigidMotion> {
    (arb_rotation(), -10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64)
        .prop_map(|(r, x, y, z)| RigidMotion::new(r, Vector3::new(x, y, z)))
}

fn test_camera() -> CameraIntrinsics {
    CameraIntrinsics::new(480.0, 500.0, 319.5, 239.5, 640, 480).unwrap()
}

proptest! {
    #[test]
    fn exp_log_round_trip(omega in arb_axis_angle()) {
        let back = so3_log(&so3_exp(&omega));
        prop_assert!((back.vector() - omega.vector()).norm() < 1e-9);
    }

    #[test]
    fn log_is_canonical(r in arb_rotation()) {
        let omega = so3_log(&r);
        prop_assert!(omega.angle() <= std::f64::consts::PI + 1e-12);
        // And exp inverts it as a rotation.
        prop_assert!(so3_exp(&omega).geodesic_angle_to(&r) < 1e-9);
    }

    #[test]
    fn composition_is_associative(a in arb_motion(), b in arb_motion(), c in arb_motion()) {
        let left = a.compose(&b).compose(&c);
        let right = a.compose(&b.compose(&c));
        prop_assert!((left.translation - right.translation).norm() < 1e-9);
        prop_assert!(left.rotation.geodesic_angle_to(&right.rotation) < 1e-9);
    }

    #[test]
    fn lift_project_round_trip(
        u in 0.0..639.0f64,
        v in 0.0..479.0f64,
        depth in 0.01..500.0f64,
    ) {
        let k = test_camera();
        let lifted = k.lift(&Pixel::new(u, v), depth).unwrap();
        let projected = k.project(&lifted).unwrap();
        prop_assert!((projected.u - u).abs() < 1e-9);
        prop_assert!((projected.v - v).abs() < 1e-9);
    }

    #[test]
    fn bearing_parallel_to_lifted_point(
        u in 0.0..639.0f64,
        v in 0.0..479.0f64,
        depth in 0.01..500.0f64,
    ) {
        let k = test_camera();
        let lifted = k.lift(&Pixel::new(u, v), depth).unwrap();
        let bearing = k.bearing(&Pixel::new(u, v));
        prop_assert!(bearing.dot(&lifted.normalize()) > 1.0 - 1e-12);
        prop_assert!((bearing.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn min_reprojection_is_pointwise_min(
        a in proptest::collection::vec(0.0..1.0f64, 12),
        b in proptest::collection::vec(0.0..1.0f64, 12),
        mask_a in proptest::collection::vec(any::<bool>(), 12),
        mask_b in proptest::collection::vec(any::<bool>(), 12),
    ) {
        let map_a = LossMap {
            values: ScalarGrid::new(4, 3, a.clone()),
            valid: Mask::new(4, 3, mask_a.clone()),
        };
        let map_b = LossMap {
            values: ScalarGrid::new(4, 3, b.clone()),
            valid: Mask::new(4, 3, mask_b.clone()),
        };
        let merged = min_reprojection(&map_a, &map_b).unwrap();
        for i in 0..12 {
            let (x, y) = (i % 4, i / 4);
            match (mask_a[i], mask_b[i]) {
                (true, true) => {
                    prop_assert!(merged.valid.at(x, y));
                    prop_assert!(merged.values.at(x, y) <= a[i]);
                    prop_assert!(merged.values.at(x, y) <= b[i]);
                }
                (true, false) => prop_assert_eq!(merged.values.at(x, y), a[i]),
                (false, true) => prop_assert_eq!(merged.values.at(x, y), b[i]),
                (false, false) => prop_assert!(!merged.valid.at(x, y)),
            }
        }
    }

    #[test]
    fn match_file_round_trips_exactly(
        rows in proptest::collection::vec(
            (
                -1e6..1e6f64,
                -1e6..1e6f64,
                -1e6..1e6f64,
                -1e6..1e6f64,
                0.0..=1.0f64,
            ),
            0..20,
        )
    ) {
        let blocks = vec![MatchPairBlock {
            frame_a: 4,
            frame_b: 5,
            matches: rows
                .into_iter()
                .map(|(u1, v1, u2, v2, confidence)| MatchRecord { u1, v1, u2, v2, confidence })
                .collect(),
        }];
        let text = write_match_file(&blocks);
        let parsed = parse_match_file(&text).unwrap();
        prop_assert_eq!(&parsed, &blocks);
        prop_assert_eq!(write_match_file(&parsed), text);
    }
}
