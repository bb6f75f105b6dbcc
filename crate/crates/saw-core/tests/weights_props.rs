//! Property tests for the local plaquette weights.

// Reference constants are written with 17 significant digits on purpose.
#![allow(clippy::excessive_precision)]

use proptest::prelude::*;
use saw_core::angle::{COS_3PI_8, THETA_MAX, THETA_MIN};
use saw_core::weights::{local_weights, triangle_crossings, LocalState};
use std::f64::consts::PI;

/// Single-rhombus normalization: a straight crossing plus the two
/// winding-corrected arcs account for all weight entering from the left.
fn rhombus_sum(theta: f64) -> f64 {
    let w = local_weights(theta).unwrap();
    w.v + w.u1 * (3.0 * theta / 8.0).cos() + w.u2 * (3.0 * (theta - PI) / 8.0).cos()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sum_rule_holds_everywhere(theta in 0.05_f64..(PI - 0.05)) {
        prop_assert!((rhombus_sum(theta) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mirror_swaps_the_arc_classes(theta in 0.05_f64..(PI - 0.05)) {
        let w = local_weights(theta).unwrap();
        let m = local_weights(PI - theta).unwrap();
        prop_assert!((m.u1 - w.u2).abs() < 1e-12);
        prop_assert!((m.u2 - w.u1).abs() < 1e-12);
        prop_assert!((m.v - w.v).abs() < 1e-12);
        prop_assert!((m.w1 - w.w2).abs() < 1e-12);
        prop_assert!((m.w2 - w.w1).abs() < 1e-12);
    }

    #[test]
    fn band_weights_stay_nonnegative(theta in THETA_MIN..THETA_MAX) {
        let w = local_weights(theta).unwrap();
        for v in [w.u1, w.u2, w.v, w.w1, w.w2] {
            prop_assert!(v >= -1e-12, "negative weight {v} at theta {theta}");
        }
    }

    #[test]
    fn double_arcs_never_beat_single_arcs_in_band(theta in THETA_MIN..THETA_MAX) {
        let w = local_weights(theta).unwrap();
        prop_assert!(w.u1 * w.u1 - w.w1 >= -1e-12);
        prop_assert!(w.u2 * w.u2 - w.w2 >= -1e-12);
    }
}

#[test]
fn state_weights_cover_the_classes() {
    let w = local_weights(1.1).unwrap();
    let mut seen = std::collections::BTreeMap::new();
    for st in LocalState::ALL {
        let val = w.state_weight(st);
        seen.insert(format!("{st:?}"), val);
    }
    assert_eq!(seen.len(), 9);
    assert_eq!(w.state_weight(LocalState::Empty), 1.0);
}

#[test]
fn crossing_counts_match_the_state_geometry() {
    // The rhombus splits into two triangles along the diagonal between its
    // two wide corners; the W and N sides sit in the left triangle and the
    // S and E sides in the right. Each arc piece counts one visit per
    // triangle it passes through.
    use LocalState::*;
    let expect = [
        (Empty, (0, 0)),
        (ArcWN, (1, 0)),
        (ArcSE, (0, 1)),
        (ArcWS, (1, 1)),
        (ArcNE, (1, 1)),
        (CrossWE, (1, 1)),
        (CrossNS, (1, 1)),
        (DoubleWNSE, (1, 1)),
        (DoubleWSNE, (2, 2)),
    ];
    for (st, want) in expect {
        assert_eq!(triangle_crossings(st), want, "state {st:?}");
    }
}

#[test]
fn out_of_range_tilts_are_rejected() {
    assert!(local_weights(0.0).is_err());
    assert!(local_weights(PI).is_err());
    assert!(local_weights(-0.5).is_err());
    assert!(local_weights(1e-3).is_ok());
}

#[test]
fn reference_constants_agree() {
    assert!((COS_3PI_8 - (3.0 * PI / 8.0).cos()).abs() < 1e-16);
    let w = local_weights(THETA_MIN).unwrap();
    assert!((w.u1 - 0.541_196_100_146_196_98).abs() < 1e-15);
    assert!((w.u2 - 0.292_893_218_813_452_48).abs() < 1e-15);
    assert!((w.v - 0.292_893_218_813_452_48).abs() < 1e-15);
    assert!((w.w1 - 0.292_893_218_813_452_48).abs() < 1e-15);
    assert!(w.w2.abs() < 1e-12);
}
