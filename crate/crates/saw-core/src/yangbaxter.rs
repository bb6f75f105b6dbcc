//! Star-triangle consistency of the local weights.
//!
//! A hexagon spanned by three unit directions has exactly two rhombic
//! tilings. Summing joint face states over either tiling, with closed
//! loops discarded, gives a weight for every pairing of the six boundary
//! mid-edges by walk strands; the sine-ratio weights make the two tilings
//! agree pairing by pairing. This module verifies that identity directly,
//! applies it as a rearrangement move inside a domain, and measures its
//! consequence for column domains: two-point sums lose their dependence
//! on column order as the truncation height grows.

use crate::enumerate::two_point;
use crate::error::{Result, SawError};
use crate::sum::Kahan;
use crate::tiling::{
    build_hexagon, site_internal_edges, yb_slide, AngleSequence, Domain, FaceId, MidEdgeId, Point,
};
use crate::transfer::two_point_alpha;
use crate::weights::{local_weights, LocalState, Side};
use std::collections::{BTreeMap, BTreeSet};

/// A pairing of boundary slots by strands, slot pairs sorted.
type Pairing = Vec<(u8, u8)>;

/// Outcome of one star-triangle comparison.
#[derive(Debug, Clone, Copy)]
pub struct YbCheck {
    pub directions: [f64; 3],
    /// Boundary pairings carrying weight in either tiling.
    pub classes: usize,
    /// Largest class weight difference between the tilings.
    pub residual: f64,
}

fn arc_partner(state: LocalState, s: Side) -> Side {
    for &(a, b) in state.arcs() {
        if a == s {
            return b;
        }
        if b == s {
            return a;
        }
    }
    unreachable!("side not used by state")
}

/// Internal edges must be used by both incident faces or neither.
fn consistent(dom: &Domain, st: &[LocalState; 3]) -> bool {
    dom.edges.iter().all(|e| {
        if let [(f1, i1), (f2, i2)] = e.incident[..] {
            st[f1.0].uses(Side::from_index(i1)) == st[f2.0].uses(Side::from_index(i2))
        } else {
            true
        }
    })
}

/// Trace every strand from the boundary inward; None when a closed loop
/// remains (such configurations carry no walk weight).
fn classify(dom: &Domain, st: &[LocalState; 3], bd: &[MidEdgeId]) -> Option<Pairing> {
    let mut visited = [[false; 4]; 3];
    let mut pairs: Pairing = Vec::new();
    for (bi, &be) in bd.iter().enumerate() {
        let (f, i) = dom.edge(be).incident[0];
        if !st[f.0].uses(Side::from_index(i)) || visited[f.0][i] {
            continue;
        }
        let (mut cf, mut ci) = (f, i);
        let end = loop {
            visited[cf.0][ci] = true;
            let pj = arc_partner(st[cf.0], Side::from_index(ci)).index();
            visited[cf.0][pj] = true;
            let eid = dom.faces[cf.0].sides[pj];
            let inc = &dom.edge(eid).incident;
            if inc.len() == 1 {
                break eid;
            }
            let (nf, ni) = if inc[0] == (cf, pj) { inc[1] } else { inc[0] };
            cf = nf;
            ci = ni;
        };
        let bj = bd
            .iter()
            .position(|&x| x == end)
            .expect("strand ended on a non-boundary edge") as u8;
        let bi = bi as u8;
        pairs.push((bi.min(bj), bi.max(bj)));
    }
    for (f, vf) in visited.iter().enumerate() {
        for (i, &seen) in vf.iter().enumerate() {
            if st[f].uses(Side::from_index(i)) && !seen {
                return None;
            }
        }
    }
    pairs.sort_unstable();
    Some(pairs)
}

/// Sum joint states of the three faces by boundary pairing class. Anchors
/// fix the slot order by midpoint, shared between the two tilings.
fn class_weights(dom: &Domain, anchors: &[Point]) -> Result<BTreeMap<Pairing, f64>> {
    let bd: Vec<MidEdgeId> = anchors
        .iter()
        .map(|&p| dom.locate_by_point(p))
        .collect::<Result<_>>()?;
    if dom.faces.len() != 3 {
        return Err(SawError::Invalid(format!(
            "expected a three-face hexagon, found {} faces",
            dom.faces.len()
        )));
    }
    let mut acc: BTreeMap<Pairing, Kahan> = BTreeMap::new();
    for s0 in LocalState::ALL {
        for s1 in LocalState::ALL {
            for s2 in LocalState::ALL {
                let st = [s0, s1, s2];
                if !consistent(dom, &st) {
                    continue;
                }
                let Some(pairing) = classify(dom, &st, &bd) else {
                    continue;
                };
                let w: f64 = (0..3)
                    .map(|f| dom.faces[f].weights.state_weight(st[f]))
                    .product();
                acc.entry(pairing).or_default().add(w);
            }
        }
    }
    Ok(acc.into_iter().map(|(k, v)| (k, v.value())).collect())
}

/// Compare the two tilings of the hexagon spanned by directions
/// d1 < d2 < d3 class by class.
pub fn check_yb(d1: f64, d2: f64, d3: f64) -> Result<YbCheck> {
    let (h, hp) = build_hexagon(d1, d2, d3)?;
    let mut anchors: Vec<Point> = h.boundary_edges().map(|e| h.edge(e).mid).collect();
    anchors.sort_by(|p, q| {
        (p.x, p.y)
            .partial_cmp(&(q.x, q.y))
            .expect("finite coordinates")
    });
    let w1 = class_weights(&h, &anchors)?;
    let w2 = class_weights(&hp, &anchors)?;
    let keys: BTreeSet<&Pairing> = w1.keys().chain(w2.keys()).collect();
    let classes = keys.len();
    let mut residual = 0.0f64;
    for k in keys {
        let a = w1.get(k).copied().unwrap_or(0.0);
        let b = w2.get(k).copied().unwrap_or(0.0);
        residual = residual.max((a - b).abs());
    }
    Ok(YbCheck {
        directions: [d1, d2, d3],
        classes,
        residual,
    })
}

/// Two-point sum before and after one rearrangement move.
#[derive(Debug, Clone, Copy)]
pub struct SlideCheck {
    pub before: f64,
    pub after: f64,
    pub residual: f64,
}

/// Rearrange the three faces at `site` and compare the two-point sum
/// between the same two mid-edges. The endpoints must survive the move:
/// edges interior to the hexagon do not.
pub fn check_slide_invariance(
    dom: &Domain,
    site: [FaceId; 3],
    a: MidEdgeId,
    b: MidEdgeId,
) -> Result<SlideCheck> {
    let internal = site_internal_edges(dom, site);
    if internal.contains(&a) || internal.contains(&b) {
        return Err(SawError::EndpointInsideHexagon);
    }
    let before = two_point(dom, a, b)?;
    let slid = yb_slide(dom, site)?;
    let a2 = slid.locate_by_point(dom.edge(a).mid)?;
    let b2 = slid.locate_by_point(dom.edge(b).mid)?;
    let after = two_point(&slid, a2, b2)?;
    Ok(SlideCheck {
        before,
        after,
        residual: (before - after).abs(),
    })
}

/// Left-boundary two-point sums of a column domain, against the same
/// domain with two adjacent columns swapped, over growing truncations.
#[derive(Debug, Clone)]
pub struct SwapExperiment {
    /// Zero-based index of the left column of the swapped pair.
    pub column: usize,
    pub rows: (i64, i64),
    pub heights: Vec<i64>,
    pub original: Vec<f64>,
    pub swapped: Vec<f64>,
    /// |original - swapped| per height.
    pub gaps: Vec<f64>,
}

/// Evaluate G(alpha_s1, alpha_s2) at each truncation height for the given
/// tilts and for the sequence with columns i, i+1 swapped. Column order
/// next to the far boundary cannot matter in the limit, so the gaps decay.
pub fn column_swap_experiment(
    thetas: &AngleSequence,
    i: usize,
    s1: i64,
    s2: i64,
    heights: &[i64],
) -> Result<SwapExperiment> {
    let swapped_seq = thetas.swapped(i)?;
    let mut original = Vec::with_capacity(heights.len());
    let mut swapped = Vec::with_capacity(heights.len());
    let mut gaps = Vec::with_capacity(heights.len());
    for &l in heights {
        let g = two_point_alpha(thetas, l, s1, s2, 1.0)?;
        let gs = two_point_alpha(&swapped_seq, l, s1, s2, 1.0)?;
        original.push(g);
        swapped.push(gs);
        gaps.push((g - gs).abs());
    }
    Ok(SwapExperiment {
        column: i,
        rows: (s1, s2),
        heights: heights.to_vec(),
        original,
        swapped,
        gaps,
    })
}

/// Closed form for the width-one two-point sum G(alpha_0, alpha_s) with
/// k = |s| - 1 straight crossings between the two hooks.
pub fn hook_weight(theta: f64, k: u32) -> Result<f64> {
    let w = local_weights(theta)?;
    Ok(w.u1 * w.v.powi(k as i32) * w.u2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::{sample_tilts, THETA_MAX, THETA_MIN};
    use std::f64::consts::PI;

    #[test]
    fn star_triangle_identity_holds() {
        let checks = [
            (0.0, PI / 4.0, 3.0 * PI / 5.0),
            (0.1, 1.2, 2.8),
            (-0.5, 0.3, 1.1),
        ];
        for (d1, d2, d3) in checks {
            let r = check_yb(d1, d2, d3).unwrap();
            assert!(r.residual < 1e-11, "residual {} at {:?}", r.residual, r.directions);
            assert!(r.classes > 10, "only {} classes", r.classes);
        }
    }

    #[test]
    fn degenerate_directions_rejected() {
        assert!(check_yb(0.0, 0.0, 1.0).is_err());
        assert!(check_yb(0.0, 1.0, 0.5).is_err());
        assert!(check_yb(0.0, 1.0, 3.2).is_err());
    }

    #[test]
    fn slide_preserves_two_point_sums() {
        let (h, _) = build_hexagon(0.2, 1.0, 2.1).unwrap();
        let site = [FaceId(0), FaceId(1), FaceId(2)];
        let bd: Vec<MidEdgeId> = h.boundary_edges().collect();
        for (n, &a) in bd.iter().enumerate() {
            for &b in &bd[n + 1..] {
                let r = check_slide_invariance(&h, site, a, b).unwrap();
                assert!(r.residual < 1e-11, "residual {}", r.residual);
            }
        }
    }

    #[test]
    fn slide_rejects_interior_endpoints() {
        let (h, _) = build_hexagon(0.2, 1.0, 2.1).unwrap();
        let site = [FaceId(0), FaceId(1), FaceId(2)];
        let inner = site_internal_edges(&h, site);
        let outer = h.boundary_edges().next().unwrap();
        assert!(matches!(
            check_slide_invariance(&h, site, inner[0], outer),
            Err(SawError::EndpointInsideHexagon)
        ));
    }

    #[test]
    fn swap_gaps_shrink() {
        let th = AngleSequence::new(vec![PI / 3.0, PI / 2.0, 2.0 * PI / 3.0]).unwrap();
        let r = column_swap_experiment(&th, 1, 0, 1, &[1, 2, 4, 8]).unwrap();
        eprintln!("swap gaps: {:?}", r.gaps);
        assert!(r.gaps[3] < r.gaps[0]);
        assert!(r.gaps[3] < 1e-3);
        // swapping equal tilts changes nothing at all
        let flat = AngleSequence::uniform(1.1, 3).unwrap();
        let rf = column_swap_experiment(&flat, 0, 0, 1, &[1, 4]).unwrap();
        assert_eq!(rf.gaps, vec![0.0, 0.0]);
    }

    #[test]
    fn hook_weight_minimized_at_lower_band_edge() {
        let base: Vec<f64> = (0..=6).map(|k| hook_weight(THETA_MIN, k).unwrap()).collect();
        for t in sample_tilts(11, 40, THETA_MIN, THETA_MAX) {
            for k in 0..=6u32 {
                assert!(hook_weight(t, k).unwrap() >= base[k as usize] - 1e-12);
            }
        }
    }
}
