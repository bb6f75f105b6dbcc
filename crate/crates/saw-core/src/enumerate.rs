//! Brute-force weighted enumeration of self-avoiding walks.
//!
//! The depth-first engine extends a walk one face traversal at a time. A
//! mid-edge is crossed at most once; a face may be traversed twice only when
//! the two arcs wrap an opposite corner pair, in which case the weight is
//! corrected from the arc product to the double-arc weight at the moment of
//! the second entry. Every prefix of an admissible walk is itself a walk, so
//! the engine reports each node of the search tree exactly once, in
//! lexicographic step order, to a caller-supplied accumulator.

use crate::angle::COS_3PI_8;
use crate::error::{Result, SawError};
use crate::exec::par_map;
use crate::sum::{Kahan, KahanComplex};
use crate::tiling::{
    build_rect, AngleSequence, BoundaryClass, Domain, DomainKind, FaceId, MidEdge, MidEdgeId,
};
use crate::weights::Side;
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};

/// Walks whose tilt matches pi/3 to this tolerance get boundary-fugacity
/// bookkeeping; the exponent is undefined at other tilts.
const PI3_TOL: f64 = 1e-12;

/// Default cap on enumerated walk prefixes, overridable via SAW_MAX_WALKS.
const DEFAULT_CAP: u64 = 1_000_000_000;

/// Depth at which the search tree is split into independent branches.
const SPLIT_DEPTH: usize = 3;

fn walk_cap() -> u64 {
    std::env::var("SAW_MAX_WALKS")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

/// One face traversal: entered through side `entry`, left through `exit`
/// (side indices in the face's counterclockwise order).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub face: FaceId,
    pub entry: usize,
    pub exit: usize,
}

/// A walk delivered during enumeration. Borrowed view; clone what you keep.
#[derive(Debug)]
pub struct Prefix<'a> {
    pub end: MidEdgeId,
    /// Product of local state weights, double-visit corrections included.
    pub weight: f64,
    pub length: f64,
    pub winding: f64,
    /// Crossings of the marked left-boundary half-triangles (b).
    pub left_visits: u32,
    /// Crossings of the marked right-boundary half-triangles.
    pub right_visits: u32,
    pub steps: &'a [Step],
}

/// A materialized walk.
#[derive(Debug, Clone)]
pub struct Walk {
    pub start: MidEdgeId,
    pub end: MidEdgeId,
    pub steps: Vec<Step>,
    pub weight: f64,
    pub length: f64,
    pub winding: f64,
    pub b: u32,
    pub b_r: u32,
}

impl Walk {
    /// Weight with step fugacity x and left-boundary contact fugacity y.
    pub fn weighted(&self, x: f64, y: f64) -> f64 {
        let mut w = self.weight;
        if x != 1.0 {
            w *= x.powf(self.length);
        }
        if y != 1.0 {
            w *= y.powi(self.b as i32);
        }
        w
    }
}

#[derive(Clone)]
struct Cursor {
    used: Vec<bool>,
    /// Per-face: -1 untouched, 0..=3 wrapped corner, 4 straight, 5 double.
    first: Vec<i8>,
    steps: Vec<Step>,
    weight: f64,
    length: f64,
    winding: f64,
    lv: u32,
    rv: u32,
}

struct Engine<'d> {
    dom: &'d Domain,
    left_mark: Vec<bool>,
    right_mark: Vec<bool>,
    /// At first tilt pi/3 every column-1 traversal has length >= 1, so the
    /// contact count is bounded by the length. False elsewhere.
    lv_bounded: bool,
    cap: u64,
    nodes: AtomicU64,
}

impl<'d> Engine<'d> {
    fn new(dom: &'d Domain, cap: u64) -> Self {
        let n = dom.faces.len();
        let (mut left, mut right) = (vec![false; n], vec![false; n]);
        if let DomainKind::Rect { width, .. } | DomainKind::StripTrunc { width, .. } = dom.kind {
            for (i, f) in dom.faces.iter().enumerate() {
                if let Some((k, _)) = f.lattice {
                    left[i] = k == 1;
                    right[i] = k == width as i64;
                }
            }
        }
        Engine {
            dom,
            left_mark: left,
            right_mark: right,
            lv_bounded: (dom.thetas[0] - PI / 3.0).abs() <= PI3_TOL,
            cap,
            nodes: AtomicU64::new(0),
        }
    }

    fn fresh_cursor(&self, start: MidEdgeId) -> Cursor {
        let mut used = vec![false; self.dom.edges.len()];
        used[start.0] = true;
        Cursor {
            used,
            first: vec![-1; self.dom.faces.len()],
            steps: Vec::new(),
            weight: 1.0,
            length: 0.0,
            winding: 0.0,
            lv: 0,
            rv: 0,
        }
    }

    /// Visit the prefix at `end` and all of its extensions, depth-first.
    /// If `frontier` is given, nodes at SPLIT_DEPTH are collected instead of
    /// expanded (and not visited; the subtree pass revisits them as roots).
    fn dfs<F: FnMut(&Prefix)>(
        &self,
        cur: &mut Cursor,
        end: MidEdgeId,
        visit: &mut F,
        mut frontier: Option<&mut Vec<(Cursor, MidEdgeId)>>,
    ) -> Result<()> {
        if let Some(fr) = frontier.as_mut() {
            if cur.steps.len() == SPLIT_DEPTH {
                fr.push((cur.clone(), end));
                return Ok(());
            }
        }
        visit(&Prefix {
            end,
            weight: cur.weight,
            length: cur.length,
            winding: cur.winding,
            left_visits: cur.lv,
            right_visits: cur.rv,
            steps: &cur.steps,
        });
        debug_assert!(!self.lv_bounded || cur.lv as f64 <= cur.length + 1e-9);

        for slot in 0..self.dom.edge(end).incident.len() {
            let (fid, entry) = self.dom.edge(end).incident[slot];
            let face = self.dom.face(fid);
            let state = cur.first[fid.0];
            if state >= 4 {
                continue; // straight or double: the face is exhausted
            }
            for exit in 0..face.n {
                if exit == entry {
                    continue;
                }
                let out_edge = face.sides[exit];
                if cur.used[out_edge.0] {
                    continue;
                }
                let wrap = face.wrap_corner(entry, exit);
                let dw = if state < 0 {
                    face.traversal_weight(entry, exit)
                } else {
                    match face.double_factor(Some(state as usize), wrap) {
                        Some(fac) => face.traversal_weight(entry, exit) * fac,
                        None => continue,
                    }
                };
                if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.cap {
                    return Err(SawError::WalkCapExceeded { cap: self.cap });
                }

                let saved = (cur.weight, cur.length, cur.winding, cur.lv, cur.rv, state);
                cur.weight *= dw;
                cur.length += face.traversal_length(entry, exit);
                cur.winding += face.turning(entry, exit);
                let (cl, cr) = face.traversal_crossings(entry, exit);
                if self.left_mark[fid.0] {
                    cur.lv += cl;
                }
                if self.right_mark[fid.0] {
                    cur.rv += cr;
                }
                cur.first[fid.0] = if state < 0 {
                    wrap.map(|c| c as i8).unwrap_or(4)
                } else {
                    5
                };
                cur.used[out_edge.0] = true;
                cur.steps.push(Step { face: fid, entry, exit });

                let fr = frontier.as_deref_mut();
                self.dfs(cur, out_edge, visit, fr)?;

                cur.steps.pop();
                cur.used[out_edge.0] = false;
                (cur.weight, cur.length, cur.winding, cur.lv, cur.rv, _) = saved;
                cur.first[fid.0] = saved.5;
            }
        }
        Ok(())
    }
}

/// Fold every walk from `start` (the empty walk included) into an
/// accumulator. The search tree is split at a fixed depth and branches run
/// in parallel under the `parallel` feature; results merge in tree order, so
/// the outcome is identical either way.
pub fn reduce_walks<A, I, V, M>(
    dom: &Domain,
    start: MidEdgeId,
    init: I,
    visit: V,
    merge: M,
) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync,
    V: Fn(&mut A, &Prefix) + Sync,
    M: Fn(A, A) -> A,
{
    reduce_walks_capped(dom, start, walk_cap(), init, visit, merge)
}

fn reduce_walks_capped<A, I, V, M>(
    dom: &Domain,
    start: MidEdgeId,
    cap: u64,
    init: I,
    visit: V,
    merge: M,
) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync,
    V: Fn(&mut A, &Prefix) + Sync,
    M: Fn(A, A) -> A,
{
    if start.0 >= dom.edges.len() {
        return Err(SawError::MidEdgeNotInDomain(format!("id {}", start.0)));
    }
    let engine = Engine::new(dom, cap);
    let mut head = init();
    let mut frontier = Vec::new();
    {
        let mut cur = engine.fresh_cursor(start);
        let mut v = |p: &Prefix| visit(&mut head, p);
        engine.dfs(&mut cur, start, &mut v, Some(&mut frontier))?;
    }
    let branches = par_map(frontier, |(snap, end)| {
        let mut acc = init();
        let mut cur = snap;
        let mut v = |p: &Prefix| visit(&mut acc, p);
        engine.dfs(&mut cur, end, &mut v, None).map(|_| acc)
    });
    for branch in branches {
        head = merge(head, branch?);
    }
    Ok(head)
}

/// Every self-avoiding walk from `start` ending in `ends`, in deterministic
/// (lexicographic) order. The empty walk is excluded.
pub fn enumerate_walks(dom: &Domain, start: MidEdgeId, ends: &[MidEdgeId]) -> Result<Vec<Walk>> {
    let mut want = vec![false; dom.edges.len()];
    for e in ends {
        if e.0 >= dom.edges.len() {
            return Err(SawError::MidEdgeNotInDomain(format!("id {}", e.0)));
        }
        want[e.0] = true;
    }
    let walks = reduce_walks(
        dom,
        start,
        Vec::new,
        |acc: &mut Vec<Walk>, p| {
            if !p.steps.is_empty() && want[p.end.0] {
                acc.push(Walk {
                    start,
                    end: p.end,
                    steps: p.steps.to_vec(),
                    weight: p.weight,
                    length: p.length,
                    winding: p.winding,
                    b: p.left_visits,
                    b_r: p.right_visits,
                });
            }
        },
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    )?;
    Ok(walks)
}

/// Sum of weights of all walks between two distinct mid-edges. Symmetric in
/// its arguments by construction: both orders enumerate from the smaller id.
pub fn two_point(dom: &Domain, a: MidEdgeId, b: MidEdgeId) -> Result<f64> {
    two_point_fug(dom, a, b, 1.0)
}

/// Two-point sum with fugacity y on right-boundary half-triangle visits.
/// y != 1 requires a column domain whose last tilt is pi/3.
pub fn two_point_fug(dom: &Domain, a: MidEdgeId, b: MidEdgeId, y: f64) -> Result<f64> {
    if a == b {
        return Err(SawError::CoincidentEndpoints);
    }
    if y != 1.0 {
        check_last_column(dom, y)?;
    }
    let (from, to) = if a.0 <= b.0 { (a, b) } else { (b, a) };
    let sum = reduce_walks(
        dom,
        from,
        Kahan::new,
        |acc: &mut Kahan, p| {
            if p.end == to {
                let mut w = p.weight;
                if y != 1.0 {
                    w *= y.powi(p.right_visits as i32);
                }
                acc.add(w);
            }
        },
        |mut a, b| {
            a.add(b.value());
            a
        },
    )?;
    Ok(sum.value())
}

fn check_first_column(dom: &Domain, y: f64) -> Result<()> {
    match dom.kind {
        DomainKind::Rect { .. } | DomainKind::StripTrunc { .. } => {
            let t0 = dom.thetas[0];
            if (t0 - PI / 3.0).abs() > PI3_TOL {
                return Err(SawError::FugacityAngle { y, which: "first", theta: t0 });
            }
            Ok(())
        }
        _ => Err(SawError::Invalid(
            "boundary fugacity needs a column domain".into(),
        )),
    }
}

fn check_last_column(dom: &Domain, y: f64) -> Result<()> {
    match dom.kind {
        DomainKind::Rect { .. } | DomainKind::StripTrunc { .. } => {
            let tl = *dom.thetas.last().unwrap();
            if (tl - PI / 3.0).abs() > PI3_TOL {
                return Err(SawError::FugacityAngle { y, which: "last", theta: tl });
            }
            Ok(())
        }
        _ => Err(SawError::Invalid(
            "boundary fugacity needs a column domain".into(),
        )),
    }
}

/// Winding forced by the endpoint's boundary class, when deterministic.
pub fn expected_winding(dom: &Domain, class: BoundaryClass) -> Option<f64> {
    let theta = |col: i64| dom.thetas[(col - 1) as usize];
    match (dom.kind, class) {
        (_, BoundaryClass::Alpha { row }) => Some(if row > 0 { PI } else { -PI }),
        (DomainKind::Triangle { .. }, BoundaryClass::Delta { .. }) => Some(PI / 3.0),
        (DomainKind::Triangle { .. }, BoundaryClass::Epsilon { .. }) => Some(-PI / 3.0),
        (_, BoundaryClass::Beta { .. }) => Some(0.0),
        (_, BoundaryClass::Delta { col }) => Some(theta(col)),
        (_, BoundaryClass::Epsilon { col }) => Some(theta(col) - PI),
        _ => None,
    }
}

/// One boundary endpoint of the walk sums.
#[derive(Debug, Clone)]
pub struct EndpointEntry {
    pub edge: MidEdgeId,
    pub address: Option<MidEdge>,
    pub class: BoundaryClass,
    /// Weighted walk sum into this endpoint.
    pub g: f64,
    /// Common winding of those walks (endpoint-deterministic).
    pub winding: f64,
}

/// Boundary-restricted partition sums of a column domain.
#[derive(Debug, Clone)]
pub struct PartitionReport {
    pub width: usize,
    pub half_height: i64,
    pub thetas: Vec<f64>,
    pub x: f64,
    pub y: f64,
    /// Walks returning to the left boundary (away from the origin).
    pub a: f64,
    /// Walks crossing to the right boundary.
    pub b: f64,
    /// Walks to the top, each weighted by cos(3 wind / 8).
    pub d: f64,
    /// Walks to the bottom, each weighted by cos(3 wind / 8).
    pub e: f64,
    pub endpoints: Vec<EndpointEntry>,
    /// Number of nonempty walks enumerated (all endpoints).
    pub walks: u64,
}

impl PartitionReport {
    /// Residual of cos(3 pi / 8) A + B + D + E = 1 (meaningful at x = y = 1).
    pub fn identity_residual(&self) -> f64 {
        (COS_3PI_8 * self.a + self.b + self.d + self.e - 1.0).abs()
    }
}

/// Lattice address of a boundary mid-edge of a column domain.
pub fn lattice_address(dom: &Domain, e: MidEdgeId) -> Option<MidEdge> {
    let (width, half) = match dom.kind {
        DomainKind::Rect { width, half_height }
        | DomainKind::StripTrunc { width, half_height } => (width as i64, half_height),
        _ => return None,
    };
    match dom.class(e) {
        BoundaryClass::Alpha { row } => Some(MidEdge::new(1, row, Side::W)),
        BoundaryClass::Beta { row } => Some(MidEdge::new(width, row, Side::E)),
        BoundaryClass::Delta { col } => Some(MidEdge::new(col, half, Side::N)),
        BoundaryClass::Epsilon { col } => Some(MidEdge::new(col, -half, Side::S)),
        _ => None,
    }
}

#[derive(Clone)]
struct PartAcc {
    a: Kahan,
    b: Kahan,
    d: Kahan,
    e: Kahan,
    g: HashMap<usize, (Kahan, f64)>,
    walks: u64,
    winding_defect: f64,
}

/// Walk sums over a prebuilt column or triangle domain, by brute force.
/// x is a step fugacity; y weights left-boundary half-triangle visits and
/// requires the first tilt to be pi/3.
pub fn partition_on(dom: &Domain, x: f64, y: f64) -> Result<PartitionReport> {
    if y != 1.0 {
        check_first_column(dom, y)?;
    }
    let (width, half) = match dom.kind {
        DomainKind::Rect { width, half_height }
        | DomainKind::StripTrunc { width, half_height } => (width, half_height),
        _ => {
            return Err(SawError::Invalid(
                "partition sums need a column domain".into(),
            ))
        }
    };
    let start = dom.origin()?;
    let acc = reduce_walks(
        dom,
        start,
        || PartAcc {
            a: Kahan::new(),
            b: Kahan::new(),
            d: Kahan::new(),
            e: Kahan::new(),
            g: HashMap::new(),
            walks: 0,
            winding_defect: 0.0,
        },
        |acc: &mut PartAcc, p| {
            if p.steps.is_empty() {
                return;
            }
            acc.walks += 1;
            let class = dom.class(p.end);
            let mut w = p.weight;
            if x != 1.0 {
                w *= x.powf(p.length);
            }
            if y != 1.0 {
                w *= y.powi(p.left_visits as i32);
            }
            match class {
                BoundaryClass::Alpha { .. } => acc.a.add(w),
                BoundaryClass::Beta { .. } => acc.b.add(w),
                BoundaryClass::Delta { .. } => acc.d.add(w * (3.0 * p.winding / 8.0).cos()),
                BoundaryClass::Epsilon { .. } => acc.e.add(w * (3.0 * p.winding / 8.0).cos()),
                _ => return,
            }
            if let Some(expect) = expected_winding(dom, class) {
                acc.winding_defect = acc.winding_defect.max((p.winding - expect).abs());
            }
            let slot = acc.g.entry(p.end.0).or_insert((Kahan::new(), p.winding));
            slot.0.add(w);
        },
        |mut l, r| {
            l.a.add(r.a.value());
            l.b.add(r.b.value());
            l.d.add(r.d.value());
            l.e.add(r.e.value());
            l.walks += r.walks;
            l.winding_defect = l.winding_defect.max(r.winding_defect);
            for (k, (s, wind)) in r.g {
                let slot = l.g.entry(k).or_insert((Kahan::new(), wind));
                slot.0.add(s.value());
            }
            l
        },
    )?;
    if acc.winding_defect > 1e-9 {
        return Err(SawError::Invalid(format!(
            "winding is not endpoint-deterministic (defect {})",
            acc.winding_defect
        )));
    }

    let rank = |c: BoundaryClass| match c {
        BoundaryClass::Alpha { row } => (0, row),
        BoundaryClass::Beta { row } => (1, row),
        BoundaryClass::Delta { col } => (2, col),
        BoundaryClass::Epsilon { col } => (3, col),
        _ => (4, 0),
    };
    let mut endpoints: Vec<EndpointEntry> = acc
        .g
        .into_iter()
        .map(|(id, (sum, wind))| {
            let e = MidEdgeId(id);
            EndpointEntry {
                edge: e,
                address: lattice_address(dom, e),
                class: dom.class(e),
                g: sum.value(),
                winding: wind,
            }
        })
        .collect();
    endpoints.sort_by_key(|en| rank(en.class));

    Ok(PartitionReport {
        width,
        half_height: half,
        thetas: dom.thetas.clone(),
        x,
        y,
        a: acc.a.value(),
        b: acc.b.value(),
        d: acc.d.value(),
        e: acc.e.value(),
        endpoints,
        walks: acc.walks,
    })
}

/// Boundary walk sums on the rectangle of the given tilts and half-height.
pub fn rect_partition(thetas: &AngleSequence, l: i64, x: f64, y: f64) -> Result<PartitionReport> {
    let dom = build_rect(thetas, l)?;
    partition_on(&dom, x, y)
}

/// The holomorphic observable F on every mid-edge: the sum over walks from
/// the origin of weight times e^{-i (5/8) winding}, the empty walk included
/// at the origin itself. With a fugacity, weights carry y^(right-boundary
/// visits) and the last column tilt must be pi/3.
pub fn observable(dom: &Domain, fugacity: Option<f64>) -> Result<Vec<Complex64>> {
    let y = fugacity.unwrap_or(1.0);
    if fugacity.is_some() && y != 1.0 {
        check_last_column(dom, y)?;
    }
    let start = dom.origin()?;
    let acc = reduce_walks(
        dom,
        start,
        || vec![KahanComplex::new(); dom.edges.len()],
        |acc: &mut Vec<KahanComplex>, p| {
            let mut w = p.weight;
            if y != 1.0 {
                w *= y.powi(p.right_visits as i32);
            }
            acc[p.end.0].add(Complex64::from_polar(w, -5.0 * p.winding / 8.0));
        },
        |mut l, r| {
            for (a, b) in l.iter_mut().zip(r) {
                a.add(b.value());
            }
            l
        },
    )?;
    Ok(acc.into_iter().map(|k| k.value()).collect())
}

/// Largest holomorphicity mismatch |(F_E - F_W) - e^{i theta} (F_S - F_N)|
/// over the rhombic faces, optionally skipping the last column (where a
/// boundary fugacity inserts a defect).
pub fn cr_residual(dom: &Domain, f: &[Complex64], skip_last_column: bool) -> f64 {
    let width = match dom.kind {
        DomainKind::Rect { width, .. } | DomainKind::StripTrunc { width, .. } => width as i64,
        _ => i64::MAX,
    };
    let mut worst: f64 = 0.0;
    for face in &dom.faces {
        if face.n != 4 {
            continue;
        }
        if skip_last_column && face.lattice.map(|(k, _)| k == width).unwrap_or(false) {
            continue;
        }
        let fv = |s: Side| f[face.sides[s.index()].0];
        let lhs = fv(Side::E) - fv(Side::W);
        let rhs = Complex64::from_polar(1.0, face.weights.theta) * (fv(Side::S) - fv(Side::N));
        worst = worst.max((lhs - rhs).norm());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::build_rect;
    use crate::weights::local_weights;

    fn seq(v: &[f64]) -> AngleSequence {
        AngleSequence::new(v.to_vec()).unwrap()
    }

    #[test]
    fn single_rhombus_walks() {
        let th = 1.1;
        let dom = build_rect(&seq(&[th]), 0).unwrap();
        let w = local_weights(th).unwrap();
        let o = dom.origin().unwrap();
        let all: Vec<MidEdgeId> = (0..dom.edges.len()).map(MidEdgeId).collect();
        let walks = enumerate_walks(&dom, o, &all).unwrap();
        assert_eq!(walks.len(), 3);
        let g_e = two_point(&dom, o, dom.beta(0).unwrap()).unwrap();
        let g_n = two_point(&dom, o, dom.delta(1).unwrap()).unwrap();
        let g_s = two_point(&dom, o, dom.epsilon(1).unwrap()).unwrap();
        assert!((g_e - w.v).abs() < 1e-15);
        assert!((g_n - w.u1).abs() < 1e-15);
        assert!((g_s - w.u2).abs() < 1e-15);
        assert!(two_point(&dom, o, o).is_err());
    }

    #[test]
    fn hooked_walk_weight() {
        // T=1, L=1: origin to alpha row 1 forces an arc up then an arc out.
        let th = 0.9;
        let dom = build_rect(&seq(&[th]), 1).unwrap();
        let w = local_weights(th).unwrap();
        let o = dom.origin().unwrap();
        let top = dom.alpha(1).unwrap();
        let walks = enumerate_walks(&dom, o, &[top]).unwrap();
        assert_eq!(walks.len(), 1);
        assert!((walks[0].weight - w.u1 * w.u2).abs() < 1e-15);
        assert!((walks[0].winding - PI).abs() < 1e-12);
        let g = two_point(&dom, o, top).unwrap();
        assert!((g - w.u1 * w.u2).abs() < 1e-15);
    }

    #[test]
    fn reversal_symmetry_is_structural() {
        let dom = build_rect(&seq(&[1.2, 0.8]), 1).unwrap();
        let a = dom.alpha(-1).unwrap();
        let b = dom.beta(1).unwrap();
        assert_eq!(
            two_point(&dom, a, b).unwrap().to_bits(),
            two_point(&dom, b, a).unwrap().to_bits()
        );
    }

    #[test]
    fn single_rhombus_partition() {
        let th = PI / 3.0;
        let rep = rect_partition(&seq(&[th]), 0, 1.0, 1.0).unwrap();
        let w = local_weights(th).unwrap();
        assert_eq!(rep.walks, 3);
        assert_eq!(rep.a, 0.0);
        assert!((rep.b - w.v).abs() < 1e-15);
        assert!((rep.d - w.u1 * (3.0 * th / 8.0).cos()).abs() < 1e-15);
        assert!((rep.e - w.u2 * (3.0 * (th - PI) / 8.0).cos()).abs() < 1e-15);
        assert!((rep.b - 0.29289321881345248).abs() < 3e-15);
        assert!((rep.d - 0.5).abs() < 3e-15);
        assert!((rep.e - 0.20710678118654752).abs() < 3e-15);
        assert!(rep.identity_residual() < 1e-12);
    }

    #[test]
    fn observable_basics() {
        let th = 1.3;
        let dom = build_rect(&seq(&[th]), 0).unwrap();
        let w = local_weights(th).unwrap();
        let f = observable(&dom, None).unwrap();
        let o = dom.origin().unwrap();
        assert_eq!(f[o.0], Complex64::new(1.0, 0.0));
        let n = dom.delta(1).unwrap();
        let expect = Complex64::from_polar(w.u1, -5.0 * th / 8.0);
        assert!((f[n.0] - expect).norm() < 1e-15);
        assert!(cr_residual(&dom, &f, false) < 1e-14);
    }

    #[test]
    fn cap_is_enforced() {
        let dom = build_rect(&seq(&[1.0, 1.5, 2.0]), 2).unwrap();
        let res = reduce_walks_capped(
            &dom,
            dom.origin().unwrap(),
            50,
            || 0u64,
            |n, _| *n += 1,
            |a, b| a + b,
        );
        assert!(matches!(res, Err(SawError::WalkCapExceeded { cap: 50 })));
    }

    #[test]
    fn fugacity_needs_pi3() {
        let bad = seq(&[1.0]);
        assert!(matches!(
            rect_partition(&bad, 0, 1.0, 2.0),
            Err(SawError::FugacityAngle { .. })
        ));
        let good = seq(&[PI / 3.0]);
        let rep = rect_partition(&good, 0, 1.0, 2.0).unwrap();
        let w = local_weights(PI / 3.0).unwrap();
        // every single-rhombus walk crosses the left half once
        assert!((rep.b - 2.0 * w.v).abs() < 1e-15);
    }
}
