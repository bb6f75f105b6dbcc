//! Walk sums on equilateral triangle domains and the bridge-decay
//! diagnostics they support.
//!
//! A level-`L` triangle domain ([`crate::tiling::build_triangle`]) is an
//! upright equilateral triangle of side `2L + 1` cut into unit triangular
//! faces, every face carrying the uniform arc weight `u1(pi/3)`. Walks start
//! at the midpoint of the left (vertical) side and end on the boundary:
//! either back on the left side (`a_delta`), or on one of the two slanted
//! sides (`d_delta`, resolved per column in [`TrianglePartition::ang`]).
//!
//! These sums obey an exact normalization,
//! `cos(3pi/8) * a_delta + cos(pi/8) * d_delta = 1`, which
//! [`TrianglePartition::identity_residual`] measures, and they dominate the
//! bridge sums of the uniform `pi/3` strip: `B_{2L+1} <= cos(pi/8) *
//! d_delta(L)`. [`bridge_decay_report`] tabulates both sides together with
//! the partial sums of `(1/T) B_T^3` that drive the escaping-walk argument.

use crate::enumerate::{expected_winding, reduce_walks};
use crate::error::{Result, SawError};
use crate::sum::Kahan;
use crate::tiling::{build_triangle, AngleSequence, BoundaryClass};
use crate::transfer::{strip_partition, two_point_alpha};
use crate::angle::{COS_3PI_8, COS_PI_8, THETA_MIN};

/// Largest triangle level served by brute-force enumeration. The walk count
/// grows exponentially with the face count `(2L + 1)^2`; beyond this level a
/// single partition would take hours.
pub const TRI_LEVEL_CAP: usize = 3;

/// Strip width used for the truncated two-point sums in the concatenation
/// report. Width 6 keeps the transfer build cheap while covering every
/// destination row the report needs.
const CONCAT_STRIP_WIDTH: usize = 6;

/// Strip half-height for the truncated two-point sums in the concatenation
/// report; must be at least the largest destination row (9).
const CONCAT_STRIP_HEIGHT: i64 = 12;

/// Boundary-restricted walk sums over a level-`L` triangle domain.
#[derive(Debug, Clone)]
pub struct TrianglePartition {
    /// Triangle level; the side length is `2 * level + 1`.
    pub level: usize,
    /// Weighted sum over walks that return to the left side (any row other
    /// than the starting one).
    pub a_delta: f64,
    /// Weighted sum over walks that end on either slanted side:
    /// `2 * sum(ang)` by the top/bottom mirror symmetry.
    pub d_delta: f64,
    /// Per-column sums over walks ending on the top slanted side;
    /// index `K` is column `K + 1`, for `K` in `0..=2 * level`.
    pub ang: Vec<f64>,
    /// Per-column sums for the bottom slanted side (mirror image of `ang`,
    /// kept separate as a geometry cross-check).
    pub bottom: Vec<f64>,
    /// Number of walks enumerated.
    pub walks: u64,
}

impl TrianglePartition {
    /// Residual of the exact normalization
    /// `cos(3pi/8) * a_delta + cos(pi/8) * d_delta = 1`.
    pub fn identity_residual(&self) -> f64 {
        (COS_3PI_8 * self.a_delta + COS_PI_8 * self.d_delta - 1.0).abs()
    }
}

struct TriAcc {
    a: Kahan,
    top: Vec<Kahan>,
    bottom: Vec<Kahan>,
    walks: u64,
    winding_defect: f64,
}

/// Enumerates every walk from the left-side midpoint of the level-`level`
/// triangle domain and buckets the weighted sums by where the walk ends.
pub fn tri_partition(level: usize) -> Result<TrianglePartition> {
    if level > TRI_LEVEL_CAP {
        return Err(SawError::TriangleLevelCap {
            level,
            cap: TRI_LEVEL_CAP,
        });
    }
    let side = 2 * level + 1;
    let dom = build_triangle(level as i64)?;
    let start = dom.origin()?;
    let acc = reduce_walks(
        &dom,
        start,
        || TriAcc {
            a: Kahan::new(),
            top: vec![Kahan::new(); side],
            bottom: vec![Kahan::new(); side],
            walks: 0,
            winding_defect: 0.0,
        },
        |acc: &mut TriAcc, p| {
            if p.steps.is_empty() {
                return;
            }
            acc.walks += 1;
            let class = dom.class(p.end);
            match class {
                BoundaryClass::Alpha { .. } => acc.a.add(p.weight),
                BoundaryClass::Delta { col } => acc.top[(col - 1) as usize].add(p.weight),
                BoundaryClass::Epsilon { col } => acc.bottom[(col - 1) as usize].add(p.weight),
                _ => return,
            }
            if let Some(expect) = expected_winding(&dom, class) {
                acc.winding_defect = acc.winding_defect.max((p.winding - expect).abs());
            }
        },
        |mut l, r| {
            l.a.add(r.a.value());
            for (dst, src) in l.top.iter_mut().zip(&r.top) {
                dst.add(src.value());
            }
            for (dst, src) in l.bottom.iter_mut().zip(&r.bottom) {
                dst.add(src.value());
            }
            l.walks += r.walks;
            l.winding_defect = l.winding_defect.max(r.winding_defect);
            l
        },
    )?;
    if acc.winding_defect > 1e-9 {
        return Err(SawError::Invalid(format!(
            "winding is not endpoint-deterministic on the triangle (defect {})",
            acc.winding_defect
        )));
    }
    let ang: Vec<f64> = acc.top.iter().map(Kahan::value).collect();
    let bottom: Vec<f64> = acc.bottom.iter().map(Kahan::value).collect();
    for (k, (t, b)) in ang.iter().zip(&bottom).enumerate() {
        if (t - b).abs() > 1e-10 {
            return Err(SawError::Invalid(format!(
                "top/bottom mirror symmetry broken at column {} ({} vs {})",
                k + 1,
                t,
                b
            )));
        }
    }
    let mut d = Kahan::new();
    for v in ang.iter().chain(&bottom) {
        d.add(*v);
    }
    Ok(TrianglePartition {
        level,
        a_delta: acc.a.value(),
        d_delta: d.value(),
        ang,
        bottom,
        walks: acc.walks,
    })
}

/// One width in [`bridge_decay_report`].
#[derive(Debug, Clone)]
pub struct BridgeRow {
    /// Strip width `T`.
    pub width: usize,
    /// Converged full-plane return sum `A_T` of the uniform `pi/3` strip.
    pub a: f64,
    /// Converged bridge sum `B_T` of the uniform `pi/3` strip.
    pub b: f64,
    /// `cos(pi/8) * d_delta((T - 1) / 2)` for odd `T` within the triangle
    /// level cap: an upper bound for `b` certified by enumeration.
    pub triangle_cap: Option<f64>,
    /// Partial sum of `(1/T') * B_{T'}^3` over widths `T' <= T`.
    pub cubic_partial: f64,
}

/// Comparison of a concatenated triple of triangle crossings against a
/// truncated two-point sum on the uniform `pi/3` strip. Both sides are
/// restricted by machine limits: the left side drops terms that would need
/// triangle levels above [`TRI_LEVEL_CAP`], and the right side is a strip
/// truncation (finite width and height) of the half-plane sum, hence a lower
/// bound on it. The comparison is reported, never asserted.
#[derive(Debug, Clone)]
pub struct ConcatenationReport {
    /// Triple sum `sum_{K1} Ang_{1,K1} sum_{K2 <= 2 K1} Ang_{K1,K2}
    /// sum_{K3 <= 2 K2} Ang_{K2,K3}` over triangle levels within the cap.
    pub lhs: f64,
    /// Truncated right side: `sum_{k=1}^{9}` of the strip two-point sums
    /// from row 0 to row `k`.
    pub rhs_truncated: f64,
    /// Number of inner terms dropped from `lhs` because their triangle level
    /// exceeds the cap.
    pub dropped_terms: usize,
    /// Strip width used for the truncated two-point sums.
    pub strip_width: usize,
    /// Strip half-height used for the truncated two-point sums.
    pub strip_half_height: i64,
}

/// Decay diagnostics for the bridge sums of the uniform `pi/3` strip.
#[derive(Debug, Clone)]
pub struct BridgeReport {
    pub rows: Vec<BridgeRow>,
    pub concatenation: ConcatenationReport,
}

/// Tabulates `A_T`, `B_T` for `T = 1..=t_max` on the uniform `pi/3` strip,
/// certifies the triangle cap `B_{2L+1} <= cos(pi/8) * d_delta(L)` at every
/// odd width whose level fits the enumeration cap, and accumulates the
/// partial sums of `(1/T) B_T^3`. Also attaches the concatenation report at
/// level 1.
pub fn bridge_decay_report(t_max: usize) -> Result<BridgeReport> {
    if t_max == 0 {
        return Err(SawError::Invalid("bridge report needs t_max >= 1".into()));
    }
    // Levels 0..=3 are all cheap (the level-3 domain enumerates in well
    // under a second), so build the full capped range: the bridge rows use
    // level (T - 1) / 2 and the concatenation chain reaches level 4, of
    // which levels up to the cap are available.
    let mut tris: Vec<TrianglePartition> = Vec::new();
    for level in 0..=TRI_LEVEL_CAP {
        tris.push(tri_partition(level)?);
    }

    let mut rows = Vec::with_capacity(t_max);
    let mut cubic = Kahan::new();
    for width in 1..=t_max {
        let seq = AngleSequence::uniform(THETA_MIN, width)?;
        let rep = strip_partition(&seq, 1.0)?;
        let triangle_cap = if width % 2 == 1 {
            let level = (width - 1) / 2;
            tris.get(level).map(|t| COS_PI_8 * t.d_delta)
        } else {
            None
        };
        if let Some(cap) = triangle_cap {
            if rep.b > cap + 1e-9 {
                return Err(SawError::Invalid(format!(
                    "bridge sum B_{width} = {} exceeds its triangle cap {cap}",
                    rep.b
                )));
            }
        }
        cubic.add(rep.b.powi(3) / width as f64);
        rows.push(BridgeRow {
            width,
            a: rep.a,
            b: rep.b,
            triangle_cap,
            cubic_partial: cubic.value(),
        });
    }

    // Concatenation comparison at level 1: chain three triangle crossings,
    // each starting where the previous one ended.
    let mut lhs = Kahan::new();
    let mut dropped = 0usize;
    for (k1, &a1) in tris[1].ang.iter().enumerate() {
        for k2 in 0..=2 * k1 {
            let Some(t1) = tris.get(k1) else {
                dropped += 2 * k1 + 1;
                continue;
            };
            let a2 = t1.ang[k2];
            match tris.get(k2) {
                Some(t2) => {
                    for k3 in 0..=2 * k2 {
                        lhs.add(a1 * a2 * t2.ang[k3]);
                    }
                }
                None => dropped += 2 * k2 + 1,
            }
        }
    }
    let seq = AngleSequence::uniform(THETA_MIN, CONCAT_STRIP_WIDTH)?;
    let mut rhs = Kahan::new();
    for k in 1..=9 {
        rhs.add(two_point_alpha(&seq, CONCAT_STRIP_HEIGHT, 0, k, 1.0)?);
    }

    Ok(BridgeReport {
        rows,
        concatenation: ConcatenationReport {
            lhs: lhs.value(),
            rhs_truncated: rhs.value(),
            dropped_terms: dropped,
            strip_width: CONCAT_STRIP_WIDTH,
            strip_half_height: CONCAT_STRIP_HEIGHT,
        },
    })
}
