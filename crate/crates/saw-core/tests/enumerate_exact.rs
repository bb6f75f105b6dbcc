//! Exact identities verified by brute-force enumeration.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use saw_core::angle::COS_3PI_8;
use saw_core::enumerate::{cr_residual, observable, partition_on, two_point};
use saw_core::tiling::{build_rect, AngleSequence, BoundaryClass};
use saw_core::weights::local_weights;
use std::f64::consts::PI;

fn random_sequence(rng: &mut ChaCha8Rng, width: usize) -> AngleSequence {
    let thetas: Vec<f64> = (0..width).map(|_| rng.random_range(0.3..PI - 0.3)).collect();
    AngleSequence::new(thetas).unwrap()
}

#[test]
fn contour_relation_holds_on_random_rectangles() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..8 {
        let width = 1 + i % 3;
        let l = (i % 4) as i64;
        let seq = random_sequence(&mut rng, width);
        let dom = build_rect(&seq, l).unwrap();
        let f = observable(&dom, None).unwrap();
        let res = cr_residual(&dom, &f, false);
        assert!(res <= 1e-10, "instance {i} ({seq:?}, l={l}): residual {res}");
    }
}

#[test]
fn rectangle_identity_holds_on_random_rectangles() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..8 {
        let width = 1 + i % 3;
        let l = (i % 4) as i64;
        let seq = random_sequence(&mut rng, width);
        let dom = build_rect(&seq, l).unwrap();
        let part = partition_on(&dom, 1.0, 1.0).unwrap();
        assert!(
            part.identity_residual() <= 1e-10,
            "instance {i}: residual {}",
            part.identity_residual()
        );
    }
}

#[test]
fn tall_single_column_matches_the_geometric_series() {
    let theta = 1.1;
    let w = local_weights(theta).unwrap();
    let seq = AngleSequence::uniform(theta, 1).unwrap();

    // Converged closed forms at a tall truncation.
    let dom = build_rect(&seq, 40).unwrap();
    let part = partition_on(&dom, 1.0, 1.0).unwrap();
    let a_inf = 2.0 * w.u1 * w.u2 / (1.0 - w.v);
    let b_inf = w.v + (w.u1 * w.u1 + w.u2 * w.u2) / (1.0 - w.v);
    assert!((part.a - a_inf).abs() < 1e-12, "{} vs {a_inf}", part.a);
    assert!((part.b - b_inf).abs() < 1e-12, "{} vs {b_inf}", part.b);
    assert!((COS_3PI_8 * a_inf + b_inf - 1.0).abs() < 1e-12);

    // Exact finite sums at a short truncation, including the escaping walks.
    let l = 3;
    let dom = build_rect(&seq, l).unwrap();
    let part = partition_on(&dom, 1.0, 1.0).unwrap();
    let geo: f64 = (0..l).map(|k| w.v.powi(k as i32)).sum();
    assert!((part.a - 2.0 * w.u1 * w.u2 * geo).abs() < 1e-14);
    assert!((part.b - (w.v + (w.u1 * w.u1 + w.u2 * w.u2) * geo)).abs() < 1e-14);
    let vl = w.v.powi(l as i32);
    assert!((part.d - w.u1 * vl * (3.0 * theta / 8.0).cos()).abs() < 1e-14);
    assert!((part.e - w.u2 * vl * (3.0 * (theta - PI) / 8.0).cos()).abs() < 1e-14);
}

#[test]
fn two_point_sums_are_symmetric_in_the_endpoints() {
    let seq = AngleSequence::new(vec![0.9, 2.0]).unwrap();
    let dom = build_rect(&seq, 1).unwrap();
    let edges: Vec<_> = dom.boundary_edges().collect();
    let mut checked = 0;
    for (i, &a) in edges.iter().enumerate() {
        for &b in edges.iter().skip(i + 1).take(3) {
            let ab = two_point(&dom, a, b).unwrap();
            let ba = two_point(&dom, b, a).unwrap();
            assert!((ab - ba).abs() < 1e-13, "{ab} vs {ba}");
            checked += 1;
        }
    }
    assert!(checked >= 10);
}

#[test]
fn endpoint_windings_are_the_boundary_ones() {
    let seq = AngleSequence::new(vec![1.4, 0.8]).unwrap();
    let dom = build_rect(&seq, 2).unwrap();
    let part = partition_on(&dom, 1.0, 1.0).unwrap();
    assert!(!part.endpoints.is_empty());
    for ep in &part.endpoints {
        match ep.class {
            BoundaryClass::Beta { .. } => assert!(ep.winding.abs() < 1e-12),
            BoundaryClass::Alpha { row } => {
                assert!((ep.winding.abs() - PI).abs() < 1e-12, "row {row}");
            }
            BoundaryClass::Delta { col } => {
                assert!((ep.winding - seq.get(col as usize - 1)).abs() < 1e-12);
            }
            BoundaryClass::Epsilon { col } => {
                assert!((ep.winding - (seq.get(col as usize - 1) - PI)).abs() < 1e-12);
            }
            other => panic!("unexpected endpoint class {other:?}"),
        }
    }
}

#[test]
fn length_fugacity_damps_the_sums() {
    // 0 < x < 1 strictly shrinks every walk's contribution.
    let seq = AngleSequence::new(vec![PI / 3.0, 1.8]).unwrap();
    let dom = build_rect(&seq, 1).unwrap();
    let full = partition_on(&dom, 1.0, 1.0).unwrap();
    let damped = partition_on(&dom, 0.6, 1.0).unwrap();
    assert!(damped.a < full.a);
    assert!(damped.b < full.b);
    assert!(damped.walks == full.walks);
}
