//! Surface-fugacity deformations of the walk sums: the truncated
//! length/contact generating function, the fugacity-deformed normalization
//! identity, the universal bridge bound below `y* = 1 + sqrt(2)`, the
//! bridge-reversal symmetry, and convergence evidence for the critical
//! fugacity of finite-width strips.
//!
//! Two boundary conventions appear. Sums written with a left fugacity weight
//! walks by `y^b` with `b` the number of visits to the triangles against the
//! left boundary (first column, tilt `pi/3` required when `y != 1`); the
//! tilded sums weight by visits to the right-boundary triangles instead and
//! require the last tilt to be `pi/3`. The two are exchanged by rotating the
//! domain half a turn, which reverses the tilt sequence — the basis of
//! [`check_bridge_reversal`].

use crate::angle::{Y_STAR, COS_3PI_8, THETA_MIN};
use crate::enumerate::{expected_winding, reduce_walks};
use crate::error::{Result, SawError};
use crate::sum::Kahan;
use crate::tiling::{build_rect, AngleSequence, BoundaryClass};
use crate::transfer::{strip_partition, strip_partition_right, yc_strip_report, ConvergenceStatus};

/// Tolerance for recognizing a tilt as `pi/3` in the fugacity gates.
const PI3_TOL: f64 = 1e-12;

/// Agreement tolerance between the two converged sides of the
/// bridge-reversal identity (each side is itself converged to about 1e-12).
const REVERSAL_TOL: f64 = 1e-11;

/// Coefficient `(y* - y) / (y (y* - 1))` multiplying the bridge sum in the
/// fugacity-deformed normalization identity. Equals 1 at `y = 1` and
/// vanishes at `y = y*`.
pub fn fugacity_coefficient(y: f64) -> f64 {
    (Y_STAR - y) / (y * (Y_STAR - 1.0))
}

fn require_pi3(theta: f64, which: &'static str, y: f64) -> Result<()> {
    if (theta - THETA_MIN).abs() > PI3_TOL {
        return Err(SawError::FugacityAngle { y, which, theta });
    }
    Ok(())
}

/// Truncated fugacity-deformed walk generating function: the sum over every
/// nonempty self-avoiding walk starting at the origin of `Rect(thetas, l)`
/// (ending anywhere, boundary or interior) of
/// `w(walk) * x^length * y^left_visits`.
///
/// `y != 1` requires the first tilt to be `pi/3` so that the left-triangle
/// visit count is well defined on every state.
pub fn saw_partition_truncated(thetas: &AngleSequence, l: i64, x: f64, y: f64) -> Result<f64> {
    if y != 1.0 {
        require_pi3(thetas.get(0), "first", y)?;
    }
    let dom = build_rect(thetas, l)?;
    let start = dom.origin()?;
    let acc = reduce_walks(
        &dom,
        start,
        Kahan::new,
        |acc: &mut Kahan, p| {
            if p.steps.is_empty() {
                return;
            }
            let mut w = p.weight;
            if x != 1.0 {
                w *= x.powf(p.length);
            }
            if y != 1.0 {
                w *= y.powi(p.left_visits as i32);
            }
            acc.add(w);
        },
        |mut l, r| {
            l.add(r.value());
            l
        },
    )?;
    Ok(acc.value())
}

/// The fugacity-deformed normalization identity on a truncated rectangle,
/// with the fugacity on the right boundary.
#[derive(Debug, Clone)]
pub struct FugacitySumRule {
    pub width: usize,
    pub half_height: i64,
    pub y: f64,
    /// Right-fugacity-weighted sum over walks back to the left boundary.
    pub a: f64,
    /// Right-fugacity-weighted sum over walks to the right boundary.
    pub b: f64,
    /// Right-fugacity-weighted, winding-corrected sum to the top boundary.
    pub d: f64,
    /// Right-fugacity-weighted, winding-corrected sum to the bottom boundary.
    pub e: f64,
    /// `(y* - y) / (y (y* - 1))`, the coefficient of `b` in the identity.
    pub coefficient: f64,
    /// `|cos(3pi/8) a + coefficient * b + d + e - 1|`.
    pub residual: f64,
}

struct RuleAcc {
    a: Kahan,
    b: Kahan,
    d: Kahan,
    e: Kahan,
    winding_defect: f64,
}

/// Evaluates the fugacity-deformed normalization identity on
/// `Rect(thetas, l)` by brute-force enumeration, weighting walks by
/// `y^right_visits`. Requires the last tilt to be `pi/3` and `y > 0`;
/// for `0 < y < y*` all four boundary sums are checked to be positive.
pub fn check_fugacity_sum_rule(thetas: &AngleSequence, l: i64, y: f64) -> Result<FugacitySumRule> {
    if y <= 0.0 {
        return Err(SawError::Invalid(format!(
            "surface fugacity must be positive, got {y}"
        )));
    }
    require_pi3(thetas.get(thetas.len() - 1), "last", y)?;
    let dom = build_rect(thetas, l)?;
    let start = dom.origin()?;
    let acc = reduce_walks(
        &dom,
        start,
        || RuleAcc {
            a: Kahan::new(),
            b: Kahan::new(),
            d: Kahan::new(),
            e: Kahan::new(),
            winding_defect: 0.0,
        },
        |acc: &mut RuleAcc, p| {
            if p.steps.is_empty() {
                return;
            }
            let class = dom.class(p.end);
            let w = p.weight * y.powi(p.right_visits as i32);
            match class {
                BoundaryClass::Alpha { .. } => acc.a.add(w),
                BoundaryClass::Beta { .. } => acc.b.add(w),
                BoundaryClass::Delta { .. } => acc.d.add(w * (3.0 * p.winding / 8.0).cos()),
                BoundaryClass::Epsilon { .. } => acc.e.add(w * (3.0 * p.winding / 8.0).cos()),
                _ => return,
            }
            if let Some(expect) = expected_winding(&dom, class) {
                acc.winding_defect = acc.winding_defect.max((p.winding - expect).abs());
            }
        },
        |mut l, r| {
            l.a.add(r.a.value());
            l.b.add(r.b.value());
            l.d.add(r.d.value());
            l.e.add(r.e.value());
            l.winding_defect = l.winding_defect.max(r.winding_defect);
            l
        },
    )?;
    if acc.winding_defect > 1e-9 {
        return Err(SawError::Invalid(format!(
            "winding is not endpoint-deterministic (defect {})",
            acc.winding_defect
        )));
    }
    let (a, b, d, e) = (acc.a.value(), acc.b.value(), acc.d.value(), acc.e.value());
    if y < Y_STAR {
        for (name, v) in [("a", a), ("b", b), ("d", d), ("e", e)] {
            if v <= 0.0 {
                return Err(SawError::Invalid(format!(
                    "boundary sum {name} = {v} is not positive at y = {y} < y*"
                )));
            }
        }
    }
    let coefficient = fugacity_coefficient(y);
    let residual = (COS_3PI_8 * a + coefficient * b + d + e - 1.0).abs();
    Ok(FugacitySumRule {
        width: thetas.len(),
        half_height: l,
        y,
        a,
        b,
        d,
        e,
        coefficient,
        residual,
    })
}

/// A converged strip bridge sum against its universal fugacity bound.
#[derive(Debug, Clone)]
pub struct BridgeBound {
    pub width: usize,
    pub y: f64,
    /// Converged bridge sum `B_T(y)` with the fugacity on the left boundary.
    pub b: f64,
    /// `sqrt(2) y / (1 + sqrt(2) - y)`, an upper bound for `b` whenever
    /// `y < y*`.
    pub bound: f64,
}

/// Checks the universal bridge bound `B_T(y) <= sqrt(2) y / (1 + sqrt(2) - y)`
/// on the strip described by `thetas` (first tilt `pi/3` when `y != 1`).
/// The bound is vacuous at `y >= y*`, which is rejected.
pub fn check_bridge_bound(thetas: &AngleSequence, y: f64) -> Result<BridgeBound> {
    if y >= Y_STAR {
        return Err(SawError::FugacityBoundVacuous { y });
    }
    if y < 0.0 {
        return Err(SawError::Invalid(format!(
            "surface fugacity must be nonnegative, got {y}"
        )));
    }
    let rep = strip_partition(thetas, y)?;
    if let ConvergenceStatus::Diverged { l_max, rel_delta } = rep.status {
        return Err(SawError::Invalid(format!(
            "strip sums did not converge below y* (rel delta {rel_delta} at height {l_max})"
        )));
    }
    let bound = 2.0_f64.sqrt() * y / (1.0 + 2.0_f64.sqrt() - y);
    if rep.b > bound + 1e-9 {
        return Err(SawError::Invalid(format!(
            "bridge sum {} exceeds the universal bound {bound} at y = {y}",
            rep.b
        )));
    }
    Ok(BridgeBound {
        width: thetas.len(),
        y,
        b: rep.b,
        bound,
    })
}

/// Both sides of the bridge-reversal identity at a converged strip.
#[derive(Debug, Clone)]
pub struct BridgeReversal {
    pub width: usize,
    pub y: f64,
    /// Converged `B(y)` on `thetas` with the fugacity on the left boundary.
    pub b: f64,
    /// Converged tilded bridge sum on the reversed tilts with the fugacity
    /// on the right boundary.
    pub b_reversed: f64,
    pub residual: f64,
}

/// Sum over walks from the right-boundary origin `beta(0)` of
/// `Rect(thetas, l)` that end on the left boundary, weighted by
/// `y^right_visits`. Rotating the rectangle half a turn maps these walks
/// onto the left-fugacity bridges of the reversed tilt sequence, so this
/// equals the `b` component of the partition sums there — exactly, at every
/// truncation.
pub fn reversed_bridge_sum(thetas: &AngleSequence, l: i64, y: f64) -> Result<f64> {
    if y != 1.0 {
        require_pi3(thetas.get(thetas.len() - 1), "last", y)?;
    }
    let dom = build_rect(thetas, l)?;
    let start = dom.beta(0)?;
    let acc = reduce_walks(
        &dom,
        start,
        Kahan::new,
        |acc: &mut Kahan, p| {
            if p.steps.is_empty() {
                return;
            }
            if let BoundaryClass::Alpha { .. } = dom.class(p.end) {
                acc.add(p.weight * y.powi(p.right_visits as i32));
            }
        },
        |mut l, r| {
            l.add(r.value());
            l
        },
    )?;
    Ok(acc.value())
}

/// Checks the bridge-reversal identity on the infinite strip: the converged
/// bridge sum of `thetas` with left fugacity equals the converged tilded
/// bridge sum of the reversed tilts with right fugacity.
pub fn check_bridge_reversal(thetas: &AngleSequence, y: f64) -> Result<BridgeReversal> {
    let left = strip_partition(thetas, y)?;
    let reversed: Vec<f64> = thetas.thetas().iter().rev().copied().collect();
    let reversed = AngleSequence::new(reversed)?;
    let right = strip_partition_right(&reversed, y)?;
    for (side, rep) in [("left", &left), ("right", &right)] {
        if let ConvergenceStatus::Diverged { l_max, rel_delta } = rep.status {
            return Err(SawError::Invalid(format!(
                "{side} strip sums did not converge (rel delta {rel_delta} at height {l_max})"
            )));
        }
    }
    let residual = (left.b - right.b).abs();
    if residual > REVERSAL_TOL {
        return Err(SawError::Invalid(format!(
            "bridge reversal broken: {} vs {} (residual {residual})",
            left.b, right.b
        )));
    }
    Ok(BridgeReversal {
        width: thetas.len(),
        y,
        b: left.b,
        b_reversed: right.b,
        residual,
    })
}

/// One width in [`yc_convergence_report`].
#[derive(Debug, Clone)]
pub struct YcRow {
    pub width: usize,
    /// Critical fugacity of the uniform `pi/3` strip at this width.
    pub y_c: f64,
    /// `y_c - y*`; positive and shrinking with the width.
    pub gap: f64,
}

/// Comparison of a mixed-tilt strip's critical fugacity against the uniform
/// `pi/3` strip of the same width.
#[derive(Debug, Clone)]
pub struct MixedComparison {
    pub thetas: Vec<f64>,
    pub y_c: f64,
    pub uniform_y_c: f64,
}

/// Critical-fugacity convergence evidence.
#[derive(Debug, Clone)]
pub struct YcConvergence {
    pub rows: Vec<YcRow>,
    pub mixed: Option<MixedComparison>,
}

/// Tabulates the critical fugacity `y_c(T)` of the uniform `pi/3` strip for
/// `T = 1..=t_max`, asserting that the values strictly decrease with the
/// width while staying above `y* = 1 + sqrt(2)`. When a mixed tilt sequence
/// is supplied (first tilt `pi/3`), its critical fugacity is additionally
/// checked against the uniform strip of the same width, which dominates.
pub fn yc_convergence_report(
    mixed: Option<&AngleSequence>,
    t_max: usize,
) -> Result<YcConvergence> {
    if t_max == 0 {
        return Err(SawError::Invalid("y_c report needs t_max >= 1".into()));
    }
    let uniform_yc = |width: usize| -> Result<f64> {
        let seq = AngleSequence::uniform(THETA_MIN, width)?;
        Ok(yc_strip_report(&seq)?.y_c)
    };
    let mut rows = Vec::with_capacity(t_max);
    for width in 1..=t_max {
        let y_c = uniform_yc(width)?;
        if y_c <= Y_STAR {
            return Err(SawError::Invalid(format!(
                "y_c({width}) = {y_c} is not above y* = {Y_STAR}"
            )));
        }
        if let Some(prev) = rows.last().map(|r: &YcRow| r.y_c) {
            if y_c >= prev {
                return Err(SawError::Invalid(format!(
                    "y_c({width}) = {y_c} does not decrease from {prev}"
                )));
            }
        }
        rows.push(YcRow {
            width,
            y_c,
            gap: y_c - Y_STAR,
        });
    }
    let mixed = match mixed {
        None => None,
        Some(seq) => {
            let y_c = yc_strip_report(seq)?.y_c;
            let uniform_y_c = match rows.iter().find(|r| r.width == seq.len()) {
                Some(row) => row.y_c,
                None => uniform_yc(seq.len())?,
            };
            if y_c > uniform_y_c + 1e-9 {
                return Err(SawError::Invalid(format!(
                    "mixed-tilt y_c = {y_c} exceeds the uniform pi/3 value {uniform_y_c}"
                )));
            }
            Some(MixedComparison {
                thetas: seq.thetas().to_vec(),
                y_c,
                uniform_y_c,
            })
        }
    };
    Ok(YcConvergence { rows, mixed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::partition_on;
    use crate::weights::local_weights;
    use std::f64::consts::PI;

    #[test]
    fn coefficient_reference_values() {
        assert!((fugacity_coefficient(0.5) - 2.707_106_781_186_547_5).abs() < 1e-15);
        assert!((fugacity_coefficient(1.0) - 1.0).abs() < 1e-15);
        assert!((fugacity_coefficient(2.0) - 0.146_446_609_406_726_24).abs() < 1e-15);
        assert!((fugacity_coefficient(3.0) - (-0.138_071_187_457_698_35)).abs() < 1e-15);
        assert!(fugacity_coefficient(Y_STAR).abs() < 1e-15);
    }

    #[test]
    fn single_rhombus_truncated_sum() {
        // Three walks cross the lone pi/3 rhombus from its left edge: the
        // straight (length 2), the sharp arc (length 1), the wide arc
        // (length 2); each visits the left triangle once.
        let w = local_weights(THETA_MIN).unwrap();
        let seq = AngleSequence::uniform(THETA_MIN, 1).unwrap();
        for (x, y) in [(1.0, 1.0), (0.5, 2.0), (0.3, 0.7), (1.0, 3.0)] {
            let got = saw_partition_truncated(&seq, 0, x, y).unwrap();
            let want = w.v * x * x * y + w.u1 * x * y + w.u2 * x * x * y;
            assert!(
                (got - want).abs() < 1e-14,
                "x={x} y={y}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn truncated_sum_matches_two_point_totals() {
        use crate::enumerate::two_point;
        let seq = AngleSequence::new(vec![THETA_MIN, 2.0]).unwrap();
        let dom = build_rect(&seq, 1).unwrap();
        let origin = dom.origin().unwrap();
        let mut total = Kahan::new();
        for e in 0..dom.edges.len() {
            let id = crate::tiling::MidEdgeId(e);
            if id == origin {
                continue;
            }
            total.add(two_point(&dom, origin, id).unwrap());
        }
        let got = saw_partition_truncated(&seq, 1, 1.0, 1.0).unwrap();
        assert!(
            (got - total.value()).abs() < 1e-12,
            "{got} vs {}",
            total.value()
        );
    }

    #[test]
    fn contact_count_below_length_and_xy_inequality() {
        let seq = AngleSequence::new(vec![THETA_MIN, 1.9]).unwrap();
        let dom = build_rect(&seq, 1).unwrap();
        let start = dom.origin().unwrap();
        let max_excess = reduce_walks(
            &dom,
            start,
            || 0.0_f64,
            |mx: &mut f64, p| {
                if !p.steps.is_empty() {
                    *mx = mx.max(p.left_visits as f64 - p.length);
                }
            },
            f64::max,
        )
        .unwrap();
        assert!(
            max_excess <= 1e-12,
            "a walk had more left contacts than length ({max_excess} over)"
        );
        for y in [1.5, 2.0, 3.0] {
            for x in [0.3, 0.7, 1.0] {
                let lhs = saw_partition_truncated(&seq, 1, x, y).unwrap();
                let rhs = saw_partition_truncated(&seq, 1, x * y, 1.0).unwrap();
                assert!(lhs <= rhs + 1e-12, "x={x} y={y}: {lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn truncated_sum_requires_pi3_first_column() {
        let seq = AngleSequence::new(vec![1.9, THETA_MIN]).unwrap();
        match saw_partition_truncated(&seq, 0, 1.0, 2.0) {
            Err(SawError::FugacityAngle { which: "first", .. }) => {}
            other => panic!("expected the first-column gate, got {other:?}"),
        }
    }

    #[test]
    fn sum_rule_reduces_to_plain_identity_at_y_one() {
        let seq = AngleSequence::new(vec![1.234, THETA_MIN]).unwrap();
        let rule = check_fugacity_sum_rule(&seq, 1, 1.0).unwrap();
        assert!((rule.coefficient - 1.0).abs() < 1e-15);
        assert!(rule.residual < 1e-12, "residual {}", rule.residual);
    }

    #[test]
    fn sum_rule_holds_on_mixed_rectangle() {
        let seq = AngleSequence::new(vec![PI / 2.0, THETA_MIN]).unwrap();
        for y in [0.5, 2.0, 3.0] {
            let rule = check_fugacity_sum_rule(&seq, 1, y).unwrap();
            assert!(
                rule.residual < 1e-9,
                "y={y}: residual {}",
                rule.residual
            );
        }
    }

    #[test]
    fn sum_rule_requires_pi3_last_column() {
        let seq = AngleSequence::new(vec![THETA_MIN, 1.9]).unwrap();
        match check_fugacity_sum_rule(&seq, 0, 2.0) {
            Err(SawError::FugacityAngle { which: "last", .. }) => {}
            other => panic!("expected the last-column gate, got {other:?}"),
        }
    }

    #[test]
    fn bridge_bound_holds_and_rejects_vacuous_fugacity() {
        let one = AngleSequence::uniform(THETA_MIN, 1).unwrap();
        let b1 = check_bridge_bound(&one, 1.0).unwrap();
        assert!((b1.b - 0.828_427_124_746_190_10).abs() < 1e-9);
        assert!((b1.bound - 1.0).abs() < 1e-12);
        for width in 1..=3 {
            let seq = AngleSequence::uniform(THETA_MIN, width).unwrap();
            for y in [1e-6, 0.5, 2.0] {
                let bb = check_bridge_bound(&seq, y).unwrap();
                assert!(bb.b <= bb.bound + 1e-9);
            }
        }
        match check_bridge_bound(&one, Y_STAR + 0.1) {
            Err(SawError::FugacityBoundVacuous { .. }) => {}
            other => panic!("expected the vacuous-bound error, got {other:?}"),
        }
    }

    #[test]
    fn reversal_is_exact_at_finite_truncations() {
        let seq = AngleSequence::new(vec![THETA_MIN, 1.2, 2.0]).unwrap();
        let reversed: Vec<f64> = seq.thetas().iter().rev().copied().collect();
        let reversed = AngleSequence::new(reversed).unwrap();
        for l in 0..=2 {
            for y in [1.0, 2.0] {
                let lhs = partition_on(&build_rect(&seq, l).unwrap(), 1.0, y)
                    .unwrap()
                    .b;
                let rhs = reversed_bridge_sum(&reversed, l, y).unwrap();
                assert!(
                    (lhs - rhs).abs() < 1e-13,
                    "l={l} y={y}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn reversal_holds_for_converged_strips() {
        let seq = AngleSequence::new(vec![THETA_MIN, 1.2, 2.0]).unwrap();
        for y in [1.0, 1.5] {
            let rev = check_bridge_reversal(&seq, y).unwrap();
            eprintln!(
                "width {} y {}: {} vs {} (residual {})",
                rev.width, y, rev.b, rev.b_reversed, rev.residual
            );
            assert!(rev.residual <= REVERSAL_TOL);
        }
    }

    #[test]
    fn yc_rows_decrease_toward_y_star() {
        let mixed = AngleSequence::new(vec![THETA_MIN, 1.9]).unwrap();
        let rep = yc_convergence_report(Some(&mixed), 3).unwrap();
        assert_eq!(rep.rows.len(), 3);
        assert!((rep.rows[0].y_c - (2.0 + 2.0_f64.sqrt())).abs() < 1e-9);
        for pair in rep.rows.windows(2) {
            assert!(pair[1].y_c < pair[0].y_c);
            assert!(pair[1].gap < pair[0].gap);
            assert!(pair[1].gap > 0.0);
        }
        let mixed = rep.mixed.unwrap();
        assert!(mixed.y_c <= mixed.uniform_y_c + 1e-9);
    }
}
