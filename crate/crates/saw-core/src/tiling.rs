//! Finite plaquette domains with shared mid-edge addressing.
//!
//! A domain is a set of positively oriented faces (unit rhombi, plus unit
//! triangles in triangular domains) glued along edges. Walks live on edge
//! midpoints, so the edge table is the primary index: each face records the
//! mid-edge id of every side, and each edge records its incident faces.
//! Gluing is by coordinates: sides whose midpoints coincide are the same
//! edge. Rectangles and strips also carry the integer (column, row, side)
//! addressing with its canonical identifications.

use crate::angle::check_tilt;
use crate::error::{Result, SawError};
use crate::weights::{local_weights, Side, WeightTable};
use std::collections::HashMap;
use std::f64::consts::PI;

/// Two sides glued by coordinates must agree to this distance; the builders
/// produce shared midpoints through identical arithmetic, so the observed
/// drift is tracked and asserted far below this.
const GLUE_EPS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn mid(self, o: Point) -> Point {
        Point::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Unit vector at angle `d` from the positive x axis.
    pub fn dir(d: f64) -> Point {
        Point::new(d.cos(), d.sin())
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

/// Index of a face in its domain (construction order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceId(pub usize);

/// Index of a mid-edge in its domain (first-appearance order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MidEdgeId(pub usize);

/// Integer lattice address of a mid-edge in a column domain.
///
/// Columns are 1-based; row 0 contains the origin. Opposite sides of
/// neighboring faces are the same edge: (k, r, E) is (k+1, r, W) and
/// (k, r, N) is (k, r+1, S). The canonical representative uses W and S.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MidEdge {
    pub column: i64,
    pub row: i64,
    pub side: Side,
}

impl MidEdge {
    pub fn new(column: i64, row: i64, side: Side) -> Self {
        MidEdge { column, row, side }
    }

    /// Canonical representative under the gluing identifications.
    pub fn canonical(self) -> MidEdge {
        match self.side {
            Side::E => MidEdge::new(self.column + 1, self.row, Side::W),
            Side::N => MidEdge::new(self.column, self.row + 1, Side::S),
            _ => self,
        }
    }
}

impl std::fmt::Display for MidEdge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.column, self.row, self.side)
    }
}

/// Ordered sequence of column tilt angles.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSequence(Vec<f64>);

impl AngleSequence {
    pub fn new(thetas: Vec<f64>) -> Result<Self> {
        if thetas.is_empty() {
            return Err(SawError::EmptyAngleSequence);
        }
        for &t in &thetas {
            check_tilt(t)?;
        }
        Ok(AngleSequence(thetas))
    }

    pub fn uniform(theta: f64, t: usize) -> Result<Self> {
        Self::new(vec![theta; t])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees nonempty
    }

    pub fn get(&self, k: usize) -> f64 {
        self.0[k]
    }

    pub fn thetas(&self) -> &[f64] {
        &self.0
    }

    /// Transpose entries i and i+1 (0-based).
    pub fn swapped(&self, i: usize) -> Result<Self> {
        if i + 1 >= self.0.len() {
            return Err(SawError::Invalid(format!(
                "cannot swap columns {} and {} in a sequence of length {}",
                i,
                i + 1,
                self.0.len()
            )));
        }
        let mut v = self.0.clone();
        v.swap(i, i + 1);
        Ok(AngleSequence(v))
    }

    /// Replace entry i (0-based) with theta.
    pub fn with_entry(&self, i: usize, theta: f64) -> Result<Self> {
        if i >= self.0.len() {
            return Err(SawError::Invalid(format!(
                "index {} out of range for a sequence of length {}",
                i,
                self.0.len()
            )));
        }
        check_tilt(theta)?;
        let mut v = self.0.clone();
        v[i] = theta;
        Ok(AngleSequence(v))
    }
}

/// Boundary classification of a mid-edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryClass {
    Interior,
    /// Left boundary, by row; row 0 is the origin.
    Alpha { row: i64 },
    /// Right boundary, by row.
    Beta { row: i64 },
    /// Top boundary, by column.
    Delta { col: i64 },
    /// Bottom boundary, by column.
    Epsilon { col: i64 },
    /// Boundary without a lattice label (hexagons, slide intermediates).
    Other,
}

#[derive(Debug, Clone)]
pub struct EdgeInfo {
    pub mid: Point,
    pub ends: (Point, Point),
    /// Incident (face, side index) pairs; one for boundary edges, two inside.
    pub incident: Vec<(FaceId, usize)>,
    pub class: BoundaryClass,
}

/// One face of a domain: a unit rhombus (n = 4) or unit triangle (n = 3).
///
/// Vertices are counterclockwise, `verts[i]` starting side i; `corners[i]`
/// is the interior angle between sides i and i+1. For rhombi the corner
/// between sides 0 and 1 is the tilt angle theta, so corners alternate
/// [theta, pi - theta, theta, pi - theta]; triangles are equilateral.
#[derive(Debug, Clone)]
pub struct Face {
    pub n: usize,
    pub verts: [Point; 4],
    pub sides: [MidEdgeId; 4],
    pub corners: [f64; 4],
    pub weights: WeightTable,
    /// Generator data for rhombi: base vertex and the two unit edge vectors
    /// (counterclockwise order). Zero vectors for triangles.
    pub base: Point,
    pub ea: Point,
    pub eb: Point,
    /// (column, row) for lattice-built domains.
    pub lattice: Option<(i64, i64)>,
}

impl Face {
    /// Signed turning of a traversal entering side i and leaving side j.
    pub fn turning(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i != j && i < self.n && j < self.n);
        if j == (i + 1) % self.n {
            -self.corners[i]
        } else if i == (j + 1) % self.n {
            self.corners[j]
        } else {
            0.0 // opposite sides of a rhombus
        }
    }

    /// Corner index wrapped by the traversal, or None for a straight.
    pub fn wrap_corner(&self, i: usize, j: usize) -> Option<usize> {
        if j == (i + 1) % self.n {
            Some(i)
        } else if i == (j + 1) % self.n {
            Some(j)
        } else {
            None
        }
    }

    /// Weight of a single traversal through this face.
    pub fn traversal_weight(&self, i: usize, j: usize) -> f64 {
        if self.n == 3 {
            return self.weights.u1; // every triangle arc wraps a pi/3 corner
        }
        match self.wrap_corner(i, j) {
            Some(c) if c % 2 == 0 => self.weights.u1,
            Some(_) => self.weights.u2,
            None => self.weights.v,
        }
    }

    /// Length of a single traversal: 3 phi / pi for an arc, 2 for a straight.
    pub fn traversal_length(&self, i: usize, j: usize) -> f64 {
        match self.wrap_corner(i, j) {
            Some(c) => 3.0 * self.corners[c] / PI,
            None => 2.0,
        }
    }

    /// Weight correction for a second traversal of a rhombus, as a factor on
    /// the product of the two single-arc weights. Legal only when the two
    /// arcs wrap an opposite corner pair.
    pub fn double_factor(&self, first: Option<usize>, second: Option<usize>) -> Option<f64> {
        let (a, b) = (first?, second?);
        if self.n != 4 || (a + 2) % 4 != b {
            return None;
        }
        if a % 2 == 0 {
            Some(self.weights.w1 / (self.weights.u1 * self.weights.u1))
        } else {
            Some(self.weights.w2 / (self.weights.u2 * self.weights.u2))
        }
    }

    /// (left, right) half-triangle crossings of a single traversal: the left
    /// half carries sides 2 and 3 (N, W), the right half sides 0 and 1.
    pub fn traversal_crossings(&self, i: usize, j: usize) -> (u32, u32) {
        match self.wrap_corner(i, j) {
            Some(0) => (0, 1),
            Some(2) => (1, 0),
            _ => (1, 1),
        }
    }

    pub fn side_mid(&self, i: usize) -> Point {
        self.verts[i].mid(self.verts[(i + 1) % self.n])
    }

    pub fn side_ends(&self, i: usize) -> (Point, Point) {
        (self.verts[i], self.verts[(i + 1) % self.n])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    Rect { width: usize, half_height: i64 },
    StripTrunc { width: usize, half_height: i64 },
    Triangle { level: usize },
    Hexagon,
    Custom,
}

/// Description of one face handed to the domain builder.
#[derive(Debug, Clone)]
pub enum FaceSpec {
    Quad {
        base: Point,
        ea: Point,
        eb: Point,
        /// Exact tilt angle; recomputed from the vectors when absent.
        theta: Option<f64>,
        lattice: Option<(i64, i64)>,
    },
    Tri { verts: [Point; 3] },
}

impl FaceSpec {
    fn quad(base: Point, ea: Point, eb: Point, theta: f64, lattice: Option<(i64, i64)>) -> Self {
        FaceSpec::Quad { base, ea, eb, theta: Some(theta), lattice }
    }
}

/// Quantized-coordinate registry identifying coincident points.
struct PointRegistry {
    map: HashMap<(i64, i64), usize>,
}

impl PointRegistry {
    fn new() -> Self {
        PointRegistry { map: HashMap::new() }
    }

    fn key(p: Point) -> (i64, i64) {
        ((p.x / GLUE_EPS).round() as i64, (p.y / GLUE_EPS).round() as i64)
    }

    fn find(&self, p: Point) -> Option<usize> {
        let (qx, qy) = Self::key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(&i) = self.map.get(&(qx + dx, qy + dy)) {
                    return Some(i);
                }
            }
        }
        None
    }

    fn insert(&mut self, p: Point, idx: usize) {
        self.map.insert(Self::key(p), idx);
    }
}

#[derive(Debug, Clone)]
pub struct Domain {
    pub kind: DomainKind,
    /// Column tilt sequence for lattice-built domains; face tilts otherwise.
    pub thetas: Vec<f64>,
    pub faces: Vec<Face>,
    pub edges: Vec<EdgeInfo>,
    start: Option<MidEdgeId>,
    lattice_edges: HashMap<(i64, i64, u8), MidEdgeId>,
    /// Largest observed midpoint mismatch between glued sides.
    pub max_embedding_drift: f64,
}

impl Domain {
    /// The origin mid-edge (alpha at row 0) for domains that have one.
    pub fn origin(&self) -> Result<MidEdgeId> {
        self.start
            .ok_or_else(|| SawError::Invalid("domain has no origin mid-edge".into()))
    }

    pub fn edge(&self, e: MidEdgeId) -> &EdgeInfo {
        &self.edges[e.0]
    }

    pub fn face(&self, f: FaceId) -> &Face {
        &self.faces[f.0]
    }

    pub fn class(&self, e: MidEdgeId) -> BoundaryClass {
        self.edges[e.0].class
    }

    pub fn is_boundary(&self, e: MidEdgeId) -> bool {
        self.edges[e.0].incident.len() == 1
    }

    /// The face on the other side of edge e, with its side index there.
    pub fn neighbor(&self, e: MidEdgeId, from: FaceId) -> Option<(FaceId, usize)> {
        self.edges[e.0]
            .incident
            .iter()
            .copied()
            .find(|&(f, _)| f != from)
    }

    /// Resolve a lattice mid-edge address (column domains only).
    pub fn locate(&self, me: MidEdge) -> Result<MidEdgeId> {
        let c = me.canonical();
        self.lattice_edges
            .get(&(c.column, c.row, c.side.index() as u8))
            .copied()
            .ok_or_else(|| SawError::MidEdgeNotInDomain(me.to_string()))
    }

    /// Find the mid-edge whose midpoint is at p (within gluing tolerance).
    pub fn locate_by_point(&self, p: Point) -> Result<MidEdgeId> {
        self.edges
            .iter()
            .position(|e| e.mid.dist(p) < GLUE_EPS)
            .map(MidEdgeId)
            .ok_or_else(|| SawError::MidEdgeNotInDomain(format!("({}, {})", p.x, p.y)))
    }

    fn class_edge(&self, want: BoundaryClass) -> Result<MidEdgeId> {
        self.edges
            .iter()
            .position(|e| e.class == want)
            .map(MidEdgeId)
            .ok_or_else(|| SawError::MidEdgeNotInDomain(format!("{want:?}")))
    }

    pub fn alpha(&self, row: i64) -> Result<MidEdgeId> {
        self.class_edge(BoundaryClass::Alpha { row })
    }

    pub fn beta(&self, row: i64) -> Result<MidEdgeId> {
        self.class_edge(BoundaryClass::Beta { row })
    }

    pub fn delta(&self, col: i64) -> Result<MidEdgeId> {
        self.class_edge(BoundaryClass::Delta { col })
    }

    pub fn epsilon(&self, col: i64) -> Result<MidEdgeId> {
        self.class_edge(BoundaryClass::Epsilon { col })
    }

    pub fn boundary_edges(&self) -> impl Iterator<Item = MidEdgeId> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.incident.len() == 1)
            .map(|(i, _)| MidEdgeId(i))
    }

    /// Glue the face specs into a domain. Boundary classes are all `Other`
    /// until a builder refines them.
    pub fn assemble(kind: DomainKind, specs: &[FaceSpec], thetas: Vec<f64>) -> Result<Domain> {
        let mut faces: Vec<Face> = Vec::with_capacity(specs.len());
        let mut edges: Vec<EdgeInfo> = Vec::new();
        let mut reg = PointRegistry::new();
        let mut max_drift: f64 = 0.0;

        for (fi, spec) in specs.iter().enumerate() {
            let mut face = match *spec {
                FaceSpec::Quad { base, ea, eb, theta, lattice } => {
                    if (ea.norm() - 1.0).abs() > 1e-9 || (eb.norm() - 1.0).abs() > 1e-9 {
                        return Err(SawError::Invalid("rhombus edge vectors must be unit".into()));
                    }
                    let cross = ea.x * eb.y - ea.y * eb.x;
                    if cross <= 1e-12 {
                        return Err(SawError::Invalid(
                            "rhombus edge vectors must be counterclockwise and nondegenerate".into(),
                        ));
                    }
                    let dot = (ea.x * eb.x + ea.y * eb.y).clamp(-1.0, 1.0);
                    let derived = PI - dot.acos();
                    let th = match theta {
                        Some(t) => {
                            // loose: acos is ill-conditioned for thin rhombi
                            if (t - derived).abs() > 1e-6 {
                                return Err(SawError::Invalid(format!(
                                    "declared tilt {t} disagrees with edge vectors ({derived})"
                                )));
                            }
                            t
                        }
                        None => derived,
                    };
                    check_tilt(th)?;
                    Face {
                        n: 4,
                        verts: [base, base + ea, base + ea + eb, base + eb],
                        sides: [MidEdgeId(usize::MAX); 4],
                        corners: [th, PI - th, th, PI - th],
                        weights: local_weights(th)?,
                        base,
                        ea,
                        eb,
                        lattice,
                    }
                }
                FaceSpec::Tri { verts } => {
                    for i in 0..3 {
                        let s = verts[i].dist(verts[(i + 1) % 3]);
                        if (s - 1.0).abs() > 1e-9 {
                            return Err(SawError::Invalid("triangle sides must be unit".into()));
                        }
                    }
                    let d1 = verts[1] - verts[0];
                    let d2 = verts[2] - verts[0];
                    if d1.x * d2.y - d1.y * d2.x <= 1e-12 {
                        return Err(SawError::Invalid("triangle must be counterclockwise".into()));
                    }
                    Face {
                        n: 3,
                        verts: [verts[0], verts[1], verts[2], Point::default()],
                        sides: [MidEdgeId(usize::MAX); 4],
                        corners: [PI / 3.0; 4],
                        weights: local_weights(PI / 3.0)?,
                        base: verts[0],
                        ea: Point::default(),
                        eb: Point::default(),
                        lattice: None,
                    }
                }
            };

            for i in 0..face.n {
                let m = face.side_mid(i);
                let (a, b) = face.side_ends(i);
                match reg.find(m) {
                    Some(ei) => {
                        let info = &mut edges[ei];
                        if info.incident.len() >= 2 {
                            return Err(SawError::Invalid(
                                "three faces claim one edge; face specs overlap".into(),
                            ));
                        }
                        max_drift = max_drift.max(info.mid.dist(m));
                        // glued sides must agree endpoint for endpoint
                        let (pa, pb) = info.ends;
                        let fwd = pa.dist(a).max(pb.dist(b));
                        let rev = pa.dist(b).max(pb.dist(a));
                        max_drift = max_drift.max(fwd.min(rev));
                        info.incident.push((FaceId(fi), i));
                        face.sides[i] = MidEdgeId(ei);
                    }
                    None => {
                        let ei = edges.len();
                        reg.insert(m, ei);
                        edges.push(EdgeInfo {
                            mid: m,
                            ends: (a, b),
                            incident: vec![(FaceId(fi), i)],
                            class: BoundaryClass::Other,
                        });
                        face.sides[i] = MidEdgeId(ei);
                    }
                }
            }
            faces.push(face);
        }

        for e in &mut edges {
            if e.incident.len() == 2 {
                e.class = BoundaryClass::Interior;
            }
        }

        Ok(Domain {
            kind,
            thetas,
            faces,
            edges,
            start: None,
            lattice_edges: HashMap::new(),
            max_embedding_drift: max_drift,
        })
    }
}

/// Base vertex of the column-k (1-based), row-r rhombus for tilts `thetas`.
fn column_base(thetas: &[f64], k: usize, r: i64) -> Point {
    let mut x = 0.0;
    let mut s = 0.0;
    for &t in &thetas[..k - 1] {
        x += t.sin();
        s -= t.cos();
    }
    Point::new(x, r as f64 - 0.5 + s)
}

fn build_columns(kind: DomainKind, thetas: &AngleSequence, l: i64) -> Result<Domain> {
    if l < 0 {
        return Err(SawError::Invalid(format!("half-height must be nonnegative, got {l}")));
    }
    let t = thetas.len();
    let mut specs = Vec::with_capacity(t * (2 * l as usize + 1));
    for k in 1..=t {
        let th = thetas.get(k - 1);
        let ea = Point::new(th.sin(), -th.cos());
        let eb = Point::new(0.0, 1.0);
        for r in -l..=l {
            specs.push(FaceSpec::quad(
                column_base(thetas.thetas(), k, r),
                ea,
                eb,
                th,
                Some((k as i64, r)),
            ));
        }
    }
    let mut dom = Domain::assemble(kind, &specs, thetas.thetas().to_vec())?;

    // Boundary classes and the lattice address table.
    for fi in 0..dom.faces.len() {
        let (k, r) = dom.faces[fi].lattice.unwrap();
        let sides = dom.faces[fi].sides;
        if k == 1 {
            dom.edges[sides[Side::W.index()].0].class = BoundaryClass::Alpha { row: r };
        }
        if k == t as i64 {
            dom.edges[sides[Side::E.index()].0].class = BoundaryClass::Beta { row: r };
        }
        if r == l {
            dom.edges[sides[Side::N.index()].0].class = BoundaryClass::Delta { col: k };
        }
        if r == -l {
            dom.edges[sides[Side::S.index()].0].class = BoundaryClass::Epsilon { col: k };
        }
        // canonical addresses: S and E sides belong to neighbors' W/S slots
        let entries = [
            ((k, r, Side::S.index() as u8), sides[Side::S.index()]),
            ((k + 1, r, Side::W.index() as u8), sides[Side::E.index()]),
            ((k, r + 1, Side::S.index() as u8), sides[Side::N.index()]),
            ((k, r, Side::W.index() as u8), sides[Side::W.index()]),
        ];
        for (key, id) in entries {
            if let Some(&old) = dom.lattice_edges.get(&key) {
                debug_assert_eq!(old, id, "lattice address must be unambiguous");
            }
            dom.lattice_edges.insert(key, id);
        }
    }
    dom.start = Some(dom.locate(MidEdge::new(1, 0, Side::W))?);
    Ok(dom)
}

/// Rectangle of T columns and rows -L..L; T(2L+1) rhombi.
pub fn build_rect(thetas: &AngleSequence, l: i64) -> Result<Domain> {
    build_columns(
        DomainKind::Rect { width: thetas.len(), half_height: l },
        thetas,
        l,
    )
}

/// Same geometry as [`build_rect`], marked as a strip truncation.
pub fn strip_trunc(thetas: &AngleSequence, l: i64) -> Result<Domain> {
    build_columns(
        DomainKind::StripTrunc { width: thetas.len(), half_height: l },
        thetas,
        l,
    )
}

/// Equilateral triangle of side 2L+1 unit triangles, vertical side on the
/// left with the origin at its midpoint, pointing right.
pub fn build_triangle(l: i64) -> Result<Domain> {
    if l < 0 {
        return Err(SawError::Invalid(format!("triangle level must be nonnegative, got {l}")));
    }
    let side = 2 * l + 1;
    let h = 0.5 * 3.0_f64.sqrt(); // column width
    let mut specs = Vec::new();
    // (right-pointing?, column, row) per pushed face, for classification.
    let mut tags = Vec::new();
    for k in 1..=side {
        let xk = (k - 1) as f64 * h;
        let drop = 0.5 * (k - 1) as f64; // column baseline offset
        for r in (k - 1 - l)..=l {
            // right-pointing: vertices bl, right, tl
            let bl = Point::new(xk, r as f64 - 0.5 - drop);
            let right = Point::new(xk + h, r as f64 - drop);
            let tl = Point::new(xk, r as f64 + 0.5 - drop);
            specs.push(FaceSpec::Tri { verts: [bl, right, tl] });
            tags.push((true, k, r));
        }
        for r in (k - l)..=l {
            // left-pointing: vertices left, br, tr
            let left = Point::new(xk, r as f64 - 0.5 - drop);
            let br = Point::new(xk + h, r as f64 - 1.0 - drop);
            let tr = Point::new(xk + h, r as f64 - drop);
            specs.push(FaceSpec::Tri { verts: [left, br, tr] });
            tags.push((false, k, r));
        }
    }
    let mut dom = Domain::assemble(
        DomainKind::Triangle { level: l as usize },
        &specs,
        vec![PI / 3.0],
    )?;

    // Right-pointing faces carry all boundary sides:
    // side 0 = diagonal (bl -> right), 1 = top slant (right -> tl), 2 = vertical.
    for (fi, &(right_pointing, k, r)) in tags.iter().enumerate() {
        if !right_pointing {
            continue;
        }
        let sides = dom.faces[fi].sides;
        if k == 1 {
            dom.edges[sides[2].0].class = BoundaryClass::Alpha { row: r };
        }
        if r == l {
            dom.edges[sides[1].0].class = BoundaryClass::Delta { col: k };
        }
        if r == k - 1 - l {
            dom.edges[sides[0].0].class = BoundaryClass::Epsilon { col: k };
        }
    }
    dom.start = Some(dom.alpha(0)?);
    Ok(dom)
}

/// The two tilings of the hexagon spanned by unit vectors in directions
/// d1 < d2 < d3 (all differences under pi): one with the interior vertex at
/// e1 + e3, one with it at e2.
pub fn build_hexagon(d1: f64, d2: f64, d3: f64) -> Result<(Domain, Domain)> {
    if !(d2 - d1 > 1e-12 && d3 - d2 > 1e-12 && d3 - d1 < PI - 1e-12) {
        return Err(SawError::BadDirections { d1, d2, d3 });
    }
    let e1 = Point::dir(d1);
    let e2 = Point::dir(d2);
    let e3 = Point::dir(d3);
    let o = Point::default();
    let th = |a: f64, b: f64| PI - (b - a);
    let first = [
        FaceSpec::quad(o, e1, e3, th(d1, d3), None),
        FaceSpec::quad(e1, e2, e3, th(d2, d3), None),
        FaceSpec::quad(e3, e1, e2, th(d1, d2), None),
    ];
    let second = [
        FaceSpec::quad(o, e1, e2, th(d1, d2), None),
        FaceSpec::quad(o, e2, e3, th(d2, d3), None),
        FaceSpec::quad(e2, e1, e3, th(d1, d3), None),
    ];
    let h = Domain::assemble(DomainKind::Hexagon, &first, vec![th(d1, d3), th(d2, d3), th(d1, d2)])?;
    let hp = Domain::assemble(DomainKind::Hexagon, &second, vec![th(d1, d2), th(d2, d3), th(d1, d3)])?;
    Ok((h, hp))
}

/// Fold an angle difference into (-pi, pi].
fn wrap_circle(mut d: f64) -> f64 {
    while d <= -PI {
        d += 2.0 * PI;
    }
    while d > PI {
        d -= 2.0 * PI;
    }
    d
}

/// Rearrange the three rhombi at `site` into the other tiling of their
/// hexagon. All other faces keep their ids; edges are rebuilt. Boundary
/// classes and the origin carry over by coordinates.
pub fn yb_slide(dom: &Domain, site: [FaceId; 3]) -> Result<Domain> {
    let err = |reason: &str| SawError::NotAHexagonSite { reason: reason.to_string() };
    if site[0] == site[1] || site[0] == site[2] || site[1] == site[2] {
        return Err(err("site faces must be distinct"));
    }
    for &f in &site {
        if f.0 >= dom.faces.len() {
            return Err(err("face id out of range"));
        }
        if dom.faces[f.0].n != 4 {
            return Err(err("site faces must be rhombi"));
        }
    }

    // Collect the three distinct edge directions among the six generators.
    let mut dirs: Vec<(f64, Point)> = Vec::new();
    let mut arms: Vec<(usize, usize)> = Vec::new(); // direction indices per face
    for &f in &site {
        let face = &dom.faces[f.0];
        let mut pair = [0usize; 2];
        for (slot, v) in [face.ea, face.eb].into_iter().enumerate() {
            let d = v.y.atan2(v.x);
            let idx = match dirs.iter().position(|&(x, _)| wrap_circle(x - d).abs() < 1e-9) {
                Some(i) => i,
                None => {
                    dirs.push((d, v));
                    dirs.len() - 1
                }
            };
            pair[slot] = idx;
        }
        arms.push((pair[0], pair[1]));
    }
    if dirs.len() != 3 {
        return Err(err("the six edge vectors must span exactly three directions"));
    }
    // Order the directions inside their common half-turn window (they may
    // straddle the atan2 branch cut).
    let mdiff = |a: f64, b: f64| (b - a).rem_euclid(2.0 * PI);
    let lowest = (0..3)
        .find(|&i| (0..3).all(|j| mdiff(dirs[i].0, dirs[j].0) < PI - 1e-9))
        .ok_or_else(|| err("directions do not fit in a half turn"))?;
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| {
        mdiff(dirs[lowest].0, dirs[a].0).total_cmp(&mdiff(dirs[lowest].0, dirs[b].0))
    });
    let rank = {
        let mut r = [0usize; 3];
        for (new, &old) in order.iter().enumerate() {
            r[old] = new;
        }
        r
    };
    let e: Vec<Point> = order.iter().map(|&i| dirs[i].1).collect();
    let mut by_pair: HashMap<(usize, usize), FaceId> = HashMap::new();
    for (idx, &(a, b)) in arms.iter().enumerate() {
        let key = (rank[a].min(rank[b]), rank[a].max(rank[b]));
        if by_pair.insert(key, site[idx]).is_some() {
            return Err(err("two site faces span the same direction pair"));
        }
    }
    let (r12, r13, r23) = (
        *by_pair.get(&(0, 1)).ok_or_else(|| err("no face spans directions 1 and 2"))?,
        *by_pair.get(&(0, 2)).ok_or_else(|| err("no face spans directions 1 and 3"))?,
        *by_pair.get(&(1, 2)).ok_or_else(|| err("no face spans directions 2 and 3"))?,
    );
    let base = |f: FaceId| dom.faces[f.0].base;
    let near = |p: Point, q: Point| p.dist(q) < 1e-7;

    // First arrangement: r13 at p0, r23 at p0+e1, r12 at p0+e3.
    // Second arrangement: r12 at p0, r23 at p0, r13 at p0+e2.
    let p0a = base(r13);
    let is_first = near(base(r23), p0a + e[0]) && near(base(r12), p0a + e[2]);
    let p0b = base(r12);
    let is_second = near(base(r23), p0b) && near(base(r13), p0b + e[1]);
    let placed: [(FaceId, Point, Point, Point); 3] = if is_first {
        [
            (r12, p0a, e[0], e[1]),
            (r23, p0a, e[1], e[2]),
            (r13, p0a + e[1], e[0], e[2]),
        ]
    } else if is_second {
        [
            (r13, p0b, e[0], e[2]),
            (r23, p0b + e[0], e[1], e[2]),
            (r12, p0b + e[2], e[0], e[1]),
        ]
    } else {
        return Err(err("face placement matches neither tiling of a hexagon"));
    };

    let mut specs: Vec<FaceSpec> = dom
        .faces
        .iter()
        .map(|f| FaceSpec::Quad {
            base: f.base,
            ea: f.ea,
            eb: f.eb,
            theta: Some(f.weights.theta),
            lattice: f.lattice,
        })
        .collect();
    for (f, p, ea, eb) in placed {
        let theta = dom.faces[f.0].weights.theta;
        specs[f.0] = FaceSpec::quad(p, ea, eb, theta, None);
    }

    let mut out = Domain::assemble(DomainKind::Custom, &specs, dom.thetas.clone())?;
    // Carry boundary classes and the origin over by midpoint coordinates.
    for old in &dom.edges {
        if matches!(old.class, BoundaryClass::Interior | BoundaryClass::Other) {
            continue;
        }
        if let Ok(id) = out.locate_by_point(old.mid) {
            out.edges[id.0].class = old.class;
        }
    }
    if let Some(s) = dom.start {
        out.start = out.locate_by_point(dom.edges[s.0].mid).ok();
    }
    Ok(out)
}

/// The three internal mid-edges of the hexagon at `site` in `dom`: edges
/// incident to two of the site faces.
pub fn site_internal_edges(dom: &Domain, site: [FaceId; 3]) -> Vec<MidEdgeId> {
    let mut out = Vec::new();
    for (i, e) in dom.edges.iter().enumerate() {
        let hits = e
            .incident
            .iter()
            .filter(|(f, _)| site.contains(f))
            .count();
        if hits == 2 {
            out.push(MidEdgeId(i));
        }
    }
    out
}
