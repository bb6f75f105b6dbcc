//! Local plaquette states and their integrable weights.
//!
//! A rhombus of tilt theta carries nine local configurations: the empty face,
//! four single arcs (one per corner), two straight crossings, and two double
//! arcs joining opposite corners. Each weight is a ratio of sine products in
//! theta, normalized so the empty face has weight one. Sides are labelled in
//! counterclockwise order S, E, N, W with the corner between S and E carrying
//! the tilt angle theta.

use crate::angle::check_tilt;
use crate::error::{Result, SawError};
use std::f64::consts::PI;
use std::fmt;

/// Side of a quadrilateral face, counterclockwise order S, E, N, W.
///
/// On an axis-aligned column rhombus the labels are geometric; on a generic
/// rhombus they name the counterclockwise sides starting from the one whose
/// far endpoint carries the tilt-angle corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    S,
    E,
    N,
    W,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::S, Side::E, Side::N, Side::W];

    pub fn index(self) -> usize {
        match self {
            Side::S => 0,
            Side::E => 1,
            Side::N => 2,
            Side::W => 3,
        }
    }

    pub fn from_index(i: usize) -> Side {
        Side::ALL[i % 4]
    }

    pub fn opposite(self) -> Side {
        Side::from_index(self.index() + 2)
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::S => "S",
            Side::E => "E",
            Side::N => "N",
            Side::W => "W",
        })
    }
}

/// One of the nine local configurations of a rhombic face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LocalState {
    /// No walk through the face.
    Empty,
    /// Arc joining the W and N sides (wraps a theta corner).
    ArcWN,
    /// Arc joining the S and E sides (wraps a theta corner).
    ArcSE,
    /// Arc joining the W and S sides (wraps a pi - theta corner).
    ArcWS,
    /// Arc joining the N and E sides (wraps a pi - theta corner).
    ArcNE,
    /// Straight crossing W to E.
    CrossWE,
    /// Straight crossing N to S.
    CrossNS,
    /// Two arcs around the theta corners: WN together with SE.
    DoubleWNSE,
    /// Two arcs around the pi - theta corners: WS together with NE.
    DoubleWSNE,
}

impl LocalState {
    pub const ALL: [LocalState; 9] = [
        LocalState::Empty,
        LocalState::ArcWN,
        LocalState::ArcSE,
        LocalState::ArcWS,
        LocalState::ArcNE,
        LocalState::CrossWE,
        LocalState::CrossNS,
        LocalState::DoubleWNSE,
        LocalState::DoubleWSNE,
    ];

    /// Unordered side pairs joined by the arcs of this state.
    pub fn arcs(self) -> &'static [(Side, Side)] {
        use LocalState::*;
        use Side::*;
        match self {
            Empty => &[],
            ArcWN => &[(W, N)],
            ArcSE => &[(S, E)],
            ArcWS => &[(W, S)],
            ArcNE => &[(N, E)],
            CrossWE => &[(W, E)],
            CrossNS => &[(N, S)],
            DoubleWNSE => &[(W, N), (S, E)],
            DoubleWSNE => &[(W, S), (N, E)],
        }
    }

    /// True iff some arc of the state touches the given side.
    pub fn uses(self, side: Side) -> bool {
        self.arcs().iter().any(|&(a, b)| a == side || b == side)
    }
}

impl fmt::Display for LocalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LocalState::Empty => "empty",
            LocalState::ArcWN => "arc WN",
            LocalState::ArcSE => "arc SE",
            LocalState::ArcWS => "arc WS",
            LocalState::ArcNE => "arc NE",
            LocalState::CrossWE => "cross WE",
            LocalState::CrossNS => "cross NS",
            LocalState::DoubleWNSE => "double WN+SE",
            LocalState::DoubleWSNE => "double WS+NE",
        })
    }
}

/// The five nontrivial local weights of a rhombus with tilt theta.
#[derive(Debug, Clone, Copy)]
pub struct WeightTable {
    pub theta: f64,
    /// Weight of an arc wrapping a theta corner (states ArcWN, ArcSE).
    pub u1: f64,
    /// Weight of an arc wrapping a pi - theta corner (states ArcWS, ArcNE).
    pub u2: f64,
    /// Weight of a straight crossing (states CrossWE, CrossNS).
    pub v: f64,
    /// Weight of the double arc around both theta corners (DoubleWNSE).
    pub w1: f64,
    /// Weight of the double arc around both pi - theta corners (DoubleWSNE).
    ///
    /// Vanishes analytically at theta = pi/3 but is kept as the computed
    /// floating-point value (about 3e-16), never snapped to zero.
    pub w2: f64,
}

impl WeightTable {
    pub fn state_weight(&self, state: LocalState) -> f64 {
        use LocalState::*;
        match state {
            Empty => 1.0,
            ArcWN | ArcSE => self.u1,
            ArcWS | ArcNE => self.u2,
            CrossWE | CrossNS => self.v,
            DoubleWNSE => self.w1,
            DoubleWSNE => self.w2,
        }
    }
}

/// Evaluate the five local weights at tilt theta in (0, pi).
pub fn local_weights(theta: f64) -> Result<WeightTable> {
    check_tilt(theta)?;
    let a = 3.0 * theta / 8.0;
    let d = (5.0 * PI / 4.0 + a).sin() * (5.0 * PI / 8.0 - a).sin();
    Ok(WeightTable {
        theta,
        u1: (5.0 * PI / 4.0).sin() * (5.0 * PI / 8.0 + a).sin() / d,
        u2: (5.0 * PI / 4.0).sin() * a.sin() / d,
        v: (5.0 * PI / 8.0 + a).sin() * (-a).sin() / d,
        w1: (5.0 * PI / 8.0 + a).sin() * (5.0 * PI / 4.0 - a).sin() / d,
        w2: (15.0 * PI / 8.0 + a).sin() * (-a).sin() / d,
    })
}

/// Corner angle between counterclockwise-adjacent sides i and i + 1.
fn corner(i: usize, theta: f64) -> f64 {
    if i.is_multiple_of(2) {
        theta
    } else {
        PI - theta
    }
}

/// Signed turning of a walk entering at `entry` and leaving at `exit`.
///
/// Adjacent sides: the walk wraps the corner between them, turning by its
/// angle, negative when the corner lies clockwise of the entry side.
/// Opposite sides: zero. Equal sides are not a traversal.
pub fn turning(entry: Side, exit: Side, theta: f64) -> Result<f64> {
    let (i, j) = (entry.index(), exit.index());
    if j == (i + 1) % 4 {
        Ok(-corner(i, theta))
    } else if i == (j + 1) % 4 {
        Ok(corner(j, theta))
    } else if (i + 2) % 4 == j {
        Ok(0.0)
    } else {
        Err(SawError::TraversalNotInState(entry.to_string(), exit.to_string()))
    }
}

/// Length contribution of a single traversal: 3 phi / pi for an arc wrapping
/// a corner of angle phi, and 2 for a straight crossing.
pub fn arc_length(entry: Side, exit: Side, theta: f64) -> Result<f64> {
    let t = turning(entry, exit, theta)?;
    if t == 0.0 {
        Ok(2.0)
    } else {
        Ok(3.0 * t.abs() / PI)
    }
}

/// Total length carried by a state: sum of its arc lengths.
pub fn state_length(state: LocalState, theta: f64) -> f64 {
    state
        .arcs()
        .iter()
        .map(|&(a, b)| arc_length(a, b, theta).expect("state arcs are valid traversals"))
        .sum()
}

/// Turning of the given traversal, after checking it is an arc of the state.
pub fn state_turning(state: LocalState, entry: Side, exit: Side, theta: f64) -> Result<f64> {
    let matches = state
        .arcs()
        .iter()
        .any(|&(a, b)| (a == entry && b == exit) || (a == exit && b == entry));
    if !matches {
        return Err(SawError::TraversalNotInState(entry.to_string(), exit.to_string()));
    }
    turning(entry, exit, theta)
}

/// Number of visits the state pays to the left half-triangle of the face,
/// the one cut off by the short diagonal and carrying the W and N sides.
///
/// Undefined for DoubleWSNE: both of its arcs cross the diagonal, so the
/// face cannot appear doubly visited in a walk that is self-avoiding on the
/// triangular refinement (its weight vanishes at theta = pi/3 accordingly).
pub fn left_triangle_visits(state: LocalState) -> Result<u32> {
    use LocalState::*;
    match state {
        Empty | ArcSE => Ok(0),
        ArcWN | ArcWS | ArcNE | CrossWE | CrossNS | DoubleWNSE => Ok(1),
        DoubleWSNE => Err(SawError::VisitUndefined),
    }
}

/// Number of visits the state pays to the right half-triangle of the face,
/// the one carrying the S and E sides. Undefined for DoubleWSNE.
pub fn right_triangle_visits(state: LocalState) -> Result<u32> {
    use LocalState::*;
    match state {
        Empty | ArcWN => Ok(0),
        ArcSE | ArcWS | ArcNE | CrossWE | CrossNS | DoubleWNSE => Ok(1),
        DoubleWSNE => Err(SawError::VisitUndefined),
    }
}

/// Geometric (left, right) half-triangle crossing counts for every state,
/// including (2, 2) for DoubleWSNE. Used internally where the doubly
/// crossing state must still be accumulated; its weight is negligible at
/// the only tilt where the exponent matters.
pub fn triangle_crossings(state: LocalState) -> (u32, u32) {
    use LocalState::*;
    match state {
        Empty => (0, 0),
        ArcWN => (1, 0),
        ArcSE => (0, 1),
        ArcWS | ArcNE | CrossWE | CrossNS | DoubleWNSE => (1, 1),
        DoubleWSNE => (2, 2),
    }
}

/// Single-traversal state joined by the unordered side pair {a, b}, if any.
pub fn pair_state(a: Side, b: Side) -> Option<LocalState> {
    use LocalState::*;
    use Side::*;
    match (a.min(b), a.max(b)) {
        (S, E) => Some(ArcSE),
        (E, N) => Some(ArcNE),
        (N, W) => Some(ArcWN),
        (S, W) => Some(ArcWS),
        (E, W) => Some(CrossWE),
        (S, N) => Some(CrossNS),
        _ => None,
    }
}

/// Double state formed by two single-arc states on the same face, if legal.
///
/// Legal iff both are corner arcs on complementary corner pairs; straight
/// crossings can never coexist with a second traversal.
pub fn double_state(first: LocalState, second: LocalState) -> Option<LocalState> {
    use LocalState::*;
    match (first, second) {
        (ArcWN, ArcSE) | (ArcSE, ArcWN) => Some(DoubleWNSE),
        (ArcWS, ArcNE) | (ArcNE, ArcWS) => Some(DoubleWSNE),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::COS_PI_8;

    const TOL: f64 = 3e-15; // few-ulp slack for chained sine products

    #[test]
    fn frozen_values_at_pi_3() {
        let w = local_weights(PI / 3.0).unwrap();
        assert!((w.u1 - 0.54119610014619698).abs() < TOL);
        assert!((w.u2 - 0.29289321881345248).abs() < TOL);
        assert!((w.v - 0.29289321881345248).abs() < TOL);
        assert!((w.w1 - 0.29289321881345248).abs() < TOL);
        assert!(w.w2.abs() < 1e-12); // analytically zero, numerically ~3e-16
        assert!((w.u1 * COS_PI_8 - 0.5).abs() < TOL);
    }

    #[test]
    fn frozen_values_at_pi_2() {
        let w = local_weights(PI / 2.0).unwrap();
        assert!((w.u1 - 0.40839093358486716).abs() < TOL);
        assert!((w.u2 - 0.40839093358486716).abs() < TOL);
        assert!((w.v - 0.32087069756863201).abs() < TOL);
        assert!((w.w1 - 0.11267480508084645).abs() < TOL);
        assert!((w.w2 - 0.11267480508084645).abs() < TOL);
    }

    #[test]
    fn mirror_symmetry() {
        for &theta in &[PI / 3.0, 0.47 * PI, PI / 2.0, 0.61 * PI] {
            let w = local_weights(theta).unwrap();
            let m = local_weights(PI - theta).unwrap();
            assert!((w.u1 - m.u2).abs() < TOL);
            assert!((w.u2 - m.u1).abs() < TOL);
            assert!((w.v - m.v).abs() < TOL);
            assert!((w.w1 - m.w2).abs() < TOL);
            assert!((w.w2 - m.w1).abs() < TOL);
        }
    }

    #[test]
    fn single_face_sum_rule() {
        // v + u1 cos(3 theta / 8) + u2 cos(3 (theta - pi) / 8) = 1.
        for &theta in &[PI / 3.0, 0.4 * PI, PI / 2.0, 0.6 * PI, 2.0 * PI / 3.0] {
            let w = local_weights(theta).unwrap();
            let s = w.v
                + w.u1 * (3.0 * theta / 8.0).cos()
                + w.u2 * (3.0 * (theta - PI) / 8.0).cos();
            assert!((s - 1.0).abs() < 1e-14, "theta = {theta}: {s}");
        }
    }

    #[test]
    fn turning_table() {
        use Side::*;
        let th = 0.9;
        let cases = [
            (W, N, th),
            (N, W, -th),
            (E, S, th),
            (S, E, -th),
            (S, W, PI - th),
            (W, S, th - PI),
            (N, E, PI - th),
            (E, N, th - PI),
            (W, E, 0.0),
            (E, W, 0.0),
            (N, S, 0.0),
            (S, N, 0.0),
        ];
        for (a, b, expect) in cases {
            assert!((turning(a, b, th).unwrap() - expect).abs() < 1e-15, "{a}->{b}");
        }
        assert!(turning(W, W, th).is_err());
    }

    #[test]
    fn lengths_are_additive_and_integer_at_pi_3() {
        let th = PI / 3.0;
        assert!((state_length(LocalState::ArcWN, th) - 1.0).abs() < 1e-15);
        assert!((state_length(LocalState::ArcWS, th) - 2.0).abs() < 1e-15);
        assert!((state_length(LocalState::CrossWE, th) - 2.0).abs() < 1e-15);
        assert!((state_length(LocalState::DoubleWNSE, th) - 2.0).abs() < 1e-15);
        assert!((state_length(LocalState::DoubleWSNE, th) - 4.0).abs() < 1e-15);
        let th = 1.1;
        let sum = state_length(LocalState::ArcWN, th) + state_length(LocalState::ArcSE, th);
        assert!((state_length(LocalState::DoubleWNSE, th) - sum).abs() < 1e-15);
    }

    #[test]
    fn traversal_membership() {
        use Side::*;
        assert!(state_turning(LocalState::ArcWN, W, N, 1.0).is_ok());
        assert!(state_turning(LocalState::ArcWN, S, E, 1.0).is_err());
        assert!(state_turning(LocalState::DoubleWNSE, S, E, 1.0).is_ok());
        assert!(state_turning(LocalState::CrossWE, E, W, 1.0).is_ok());
    }

    #[test]
    fn visit_counts() {
        assert_eq!(left_triangle_visits(LocalState::Empty).unwrap(), 0);
        assert_eq!(left_triangle_visits(LocalState::ArcSE).unwrap(), 0);
        assert_eq!(left_triangle_visits(LocalState::ArcNE).unwrap(), 1);
        assert_eq!(left_triangle_visits(LocalState::DoubleWNSE).unwrap(), 1);
        assert!(left_triangle_visits(LocalState::DoubleWSNE).is_err());
        assert_eq!(right_triangle_visits(LocalState::ArcWN).unwrap(), 0);
        assert_eq!(right_triangle_visits(LocalState::ArcSE).unwrap(), 1);
        assert_eq!(triangle_crossings(LocalState::DoubleWSNE), (2, 2));
    }

    #[test]
    fn pair_and_double_lookup() {
        use Side::*;
        assert_eq!(pair_state(N, W), Some(LocalState::ArcWN));
        assert_eq!(pair_state(W, N), Some(LocalState::ArcWN));
        assert_eq!(pair_state(N, N), None);
        assert_eq!(
            double_state(LocalState::ArcWN, LocalState::ArcSE),
            Some(LocalState::DoubleWNSE)
        );
        assert_eq!(double_state(LocalState::CrossWE, LocalState::CrossNS), None);
        assert_eq!(double_state(LocalState::ArcWN, LocalState::ArcNE), None);
    }

    #[test]
    fn tilt_validity() {
        assert!(local_weights(0.0).is_err());
        assert!(local_weights(PI).is_err());
        assert!(local_weights(1e-6).is_ok());
    }
}
