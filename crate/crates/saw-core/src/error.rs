//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by domain construction, enumeration, and series evaluation.
#[derive(Debug, Error)]
pub enum SawError {
    #[error("cannot parse angle token `{token}`: expected `pi/<int>`, `<int>pi/<int>`, or a decimal radian value")]
    AngleParse { token: String },

    #[error("angle {value} rad out of range: tilt angles must lie strictly inside (0, pi)")]
    AngleRange { value: f64 },

    #[error("angle sequence is empty")]
    EmptyAngleSequence,

    #[error("direction triple ({d1}, {d2}, {d3}) is degenerate: need d1 < d2 < d3 with d3 - d1 < pi")]
    BadDirections { d1: f64, d2: f64, d3: f64 },

    #[error("mid-edge {0} is not in the domain")]
    MidEdgeNotInDomain(String),

    #[error("two-point function called with identical endpoints; the empty-walk value is defined only at the origin")]
    CoincidentEndpoints,

    #[error("walk enumeration exceeded the cap of {cap} visited walks; raise SAW_MAX_WALKS to go further")]
    WalkCapExceeded { cap: u64 },

    #[error("strip width {width} exceeds the cap {cap} (link-pattern space grows too fast beyond it)")]
    WidthCap { width: usize, cap: usize },

    #[error("surface fugacity {y} != 1 requires the {which} column angle to be pi/3, got {theta} rad")]
    FugacityAngle { y: f64, which: &'static str, theta: f64 },

    #[error("left-triangle visit count is undefined for the double state with both arcs in the boundary triangle pair")]
    VisitUndefined,

    #[error("traversal ({0}, {1}) does not match any arc of the state")]
    TraversalNotInState(String, String),

    #[error("the three faces at the site do not tile a hexagon: {reason}")]
    NotAHexagonSite { reason: String },

    #[error("endpoint lies strictly inside the slide hexagon; pick endpoints off the rearranged faces")]
    EndpointInsideHexagon,

    #[error("bisection bracket [{lo}, {hi}] does not straddle the threshold: Lambda({lo}) = {flo}, Lambda({hi}) = {fhi}")]
    BracketFailure { lo: f64, hi: f64, flo: f64, fhi: f64 },

    #[error("power iteration did not converge within {iters} iterations (last drift {drift})")]
    PowerIterationDiverged { iters: usize, drift: f64 },

    #[error("triangle level {level} exceeds the brute-force cap {cap}")]
    TriangleLevelCap { level: usize, cap: usize },

    #[error("fugacity bound is vacuous for y = {y} >= 1 + sqrt(2)")]
    FugacityBoundVacuous { y: f64 },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, SawError>;
