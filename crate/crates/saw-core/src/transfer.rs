//! Row-by-row transfer matrices over link patterns.
//!
//! A cut across a width-T column domain meets T horizontal mid-edges. The
//! portion of a walk below the cut decomposes into strands, recorded per
//! slot: empty, half of a non-crossing pair, the strand attached to the
//! walk's start, or the strand attached to its already-placed free end.
//! One row of rhombi maps cut states to cut states linearly; boundary walk
//! sums for any truncation follow from products of row operators, and the
//! truncation limit from their convergence. Completions (start meets free
//! end) are harvested as scalars the moment they occur, so completed walks
//! never travel in the state.

use crate::angle::INV_COS_3PI_8;
use crate::error::{Result, SawError};
use crate::sum::Kahan;
use crate::tiling::AngleSequence;
use crate::weights::{local_weights, triangle_crossings, LocalState, Side, WeightTable};
use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

/// Hard cap on strip width; the state count grows like 5^T.
pub const WIDTH_CAP: usize = 8;

/// Truncation ceiling for convergence-driven sweeps.
pub const L_MAX: i64 = 200;

/// Relative increment below which a sweep counts as stalled; convergence
/// requires three consecutive stalled steps.
pub const CONVERGENCE_EPS: f64 = 1e-12;

const PI3_TOL: f64 = 1e-12;

const SLOT_E: u8 = 0;
const SLOT_OPEN: u8 = 1;
const SLOT_CLOSE: u8 = 2;
const SLOT_O: u8 = 3;
const SLOT_F: u8 = 4;

fn slot(word: u32, k: usize) -> u8 {
    ((word >> (3 * k)) & 7) as u8
}

fn with_slot(word: u32, k: usize, v: u8) -> u32 {
    (word & !(7 << (3 * k))) | ((v as u32) << (3 * k))
}

fn word_has(word: u32, t: usize, v: u8) -> bool {
    (0..t).any(|k| slot(word, k) == v)
}

/// Status of one cut slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotStatus {
    Empty,
    /// Left half of a pair (matched to a later Close).
    Open,
    /// Right half of a pair.
    Close,
    /// Strand attached to the walk's start.
    OriginStrand,
    /// Strand attached to the walk's already-placed free end.
    FreeEnd,
}

/// Connectivity state of a cut: a balanced word over slot statuses with at
/// most one origin strand and at most one free end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkPattern {
    word: u32,
    width: u8,
}

impl LinkPattern {
    pub fn new(statuses: &[SlotStatus]) -> Result<Self> {
        let t = statuses.len();
        if t == 0 || t > WIDTH_CAP {
            return Err(SawError::WidthCap { width: t, cap: WIDTH_CAP });
        }
        let (mut word, mut depth, mut o, mut f) = (0u32, 0i32, 0, 0);
        for (k, &s) in statuses.iter().enumerate() {
            let v = match s {
                SlotStatus::Empty => SLOT_E,
                SlotStatus::Open => {
                    depth += 1;
                    SLOT_OPEN
                }
                SlotStatus::Close => {
                    depth -= 1;
                    SLOT_CLOSE
                }
                SlotStatus::OriginStrand => {
                    o += 1;
                    SLOT_O
                }
                SlotStatus::FreeEnd => {
                    f += 1;
                    SLOT_F
                }
            };
            if depth < 0 || o > 1 || f > 1 {
                return Err(SawError::Invalid(format!(
                    "malformed link pattern at slot {k}"
                )));
            }
            word = with_slot(word, k, v);
        }
        if depth != 0 {
            return Err(SawError::Invalid("unbalanced link pattern".into()));
        }
        Ok(LinkPattern { word, width: t as u8 })
    }

    pub fn empty(width: usize) -> Result<Self> {
        Self::new(&vec![SlotStatus::Empty; width])
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn statuses(&self) -> Vec<SlotStatus> {
        (0..self.width())
            .map(|k| match slot(self.word, k) {
                SLOT_OPEN => SlotStatus::Open,
                SLOT_CLOSE => SlotStatus::Close,
                SLOT_O => SlotStatus::OriginStrand,
                SLOT_F => SlotStatus::FreeEnd,
                _ => SlotStatus::Empty,
            })
            .collect()
    }
}

impl std::fmt::Display for LinkPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for k in 0..self.width() {
            f.write_str(match slot(self.word, k) {
                SLOT_OPEN => "(",
                SLOT_CLOSE => ")",
                SLOT_O => "O",
                SLOT_F => "F",
                _ => ".",
            })?;
        }
        Ok(())
    }
}

/// All valid cut states of a given width, in a fixed enumeration order.
struct PatternTable {
    t: usize,
    words: Vec<u32>,
    index: HashMap<u32, usize>,
}

impl PatternTable {
    fn build(t: usize) -> PatternTable {
        fn rec(t: usize, k: usize, depth: usize, o: bool, f: bool, w: u32, out: &mut Vec<u32>) {
            if k == t {
                if depth == 0 {
                    out.push(w);
                }
                return;
            }
            let left = t - k - 1;
            rec(t, k + 1, depth, o, f, w, out);
            if depth < left {
                rec(t, k + 1, depth + 1, o, f, with_slot(w, k, SLOT_OPEN), out);
            }
            if depth > 0 {
                rec(t, k + 1, depth - 1, o, f, with_slot(w, k, SLOT_CLOSE), out);
            }
            if !o {
                rec(t, k + 1, depth, true, f, with_slot(w, k, SLOT_O), out);
            }
            if !f {
                rec(t, k + 1, depth, o, true, with_slot(w, k, SLOT_F), out);
            }
        }
        let mut words = Vec::new();
        rec(t, 0, 0, false, false, 0, &mut words);
        let index = words.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        PatternTable { t, words, index }
    }

    fn len(&self) -> usize {
        self.words.len()
    }
}

/// Boundary events available while a row is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowFlags {
    /// The walk's start sits on this row's left edge (mandatory use).
    pub origin: bool,
    /// The left edge may take the walk's free end.
    pub alpha: bool,
    /// The right edge may take the walk's free end.
    pub beta: bool,
}

/// Which boundary column's half-triangle visits the fugacity exponent
/// counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FugSide {
    Left,
    Right,
}

/// Strand-end location during the left-to-right scan of one row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Loc {
    /// Unconsumed bottom slot.
    Bot(u8),
    /// Emitted top slot.
    Top(u8),
    /// The vertical mid-edge between the current face and the next.
    Vert,
    Origin,
    Term,
}

enum Attach {
    Link,
    Loop,
    Complete,
}

fn detach(links: &mut Vec<(Loc, Loc)>, l: Loc) -> Loc {
    if let Some(i) = links.iter().position(|&(x, y)| x == l || y == l) {
        let (x, y) = links.swap_remove(i);
        if x == l {
            y
        } else {
            x
        }
    } else {
        l
    }
}

/// Join two strand ends. Joining the two ends of one strand is a loop
/// (never a walk); joining the origin strand to the free end completes
/// the walk.
fn attach(links: &mut Vec<(Loc, Loc)>, a: Loc, b: Loc) -> Attach {
    if links
        .iter()
        .any(|&(x, y)| (x == a && y == b) || (x == b && y == a))
    {
        return Attach::Loop;
    }
    let pa = detach(links, a);
    let pb = detach(links, b);
    if (pa == Loc::Origin && pb == Loc::Term) || (pa == Loc::Term && pb == Loc::Origin) {
        Attach::Complete
    } else {
        links.push((pa, pb));
        Attach::Link
    }
}

fn links_from(word: u32, t: usize) -> Vec<(Loc, Loc)> {
    let mut links = Vec::new();
    let mut stack = Vec::new();
    for k in 0..t {
        match slot(word, k) {
            SLOT_OPEN => stack.push(k as u8),
            SLOT_CLOSE => {
                let i = stack.pop().expect("balanced by construction");
                links.push((Loc::Bot(i), Loc::Bot(k as u8)));
            }
            SLOT_O => links.push((Loc::Bot(k as u8), Loc::Origin)),
            SLOT_F => links.push((Loc::Bot(k as u8), Loc::Term)),
            _ => {}
        }
    }
    links
}

/// Rebuild the top cut word from the post-scan links. Leftover bottom or
/// vertical ends, or a crossing pairing, mean the builder is broken.
fn read_off(links: &[(Loc, Loc)], t: usize) -> Result<u32> {
    let mut word = 0u32;
    let mut pairs = Vec::new();
    for &(a, b) in links {
        match (a, b) {
            (Loc::Top(i), Loc::Top(j)) => {
                let (i, j) = if i < j { (i, j) } else { (j, i) };
                word = with_slot(word, i as usize, SLOT_OPEN);
                word = with_slot(word, j as usize, SLOT_CLOSE);
                pairs.push((i, j));
            }
            (Loc::Top(i), Loc::Origin) | (Loc::Origin, Loc::Top(i)) => {
                word = with_slot(word, i as usize, SLOT_O);
            }
            (Loc::Top(i), Loc::Term) | (Loc::Term, Loc::Top(i)) => {
                word = with_slot(word, i as usize, SLOT_F);
            }
            other => {
                return Err(SawError::Invalid(format!(
                    "stray strand end after row scan: {other:?}"
                )))
            }
        }
    }
    // nesting check: the encoding only represents non-crossing pairings
    let mut stack = Vec::new();
    for k in 0..t {
        match slot(word, k) {
            SLOT_OPEN => stack.push(k as u8),
            SLOT_CLOSE => {
                let i = stack.pop().ok_or_else(|| {
                    SawError::Invalid("unbalanced row output".into())
                })?;
                if !pairs.contains(&(i, k as u8)) {
                    return Err(SawError::Invalid("crossing pairing produced".into()));
                }
            }
            _ => {}
        }
    }
    Ok(word)
}

/// Precompiled transitions of one row flavor: per input state, the open
/// continuations (output state, weight, left-contact count) and the
/// completed-walk weights by contact count.
struct RawTable {
    open: Vec<Vec<(u32, f64, u8)>>,
    done: Vec<Vec<(f64, u8)>>,
}

struct BuildCtx<'a> {
    t: usize,
    wts: &'a [WeightTable],
    flags: RowFlags,
    fug: FugSide,
    acc_open: BTreeMap<(u32, u8), f64>,
    acc_done: BTreeMap<u8, f64>,
}

impl BuildCtx<'_> {
    /// Enumerate joint face states for faces k.. consistent with the bottom
    /// word, accumulating open outputs and completions.
    fn scan(
        &mut self,
        k: usize,
        links: &[(Loc, Loc)],
        vert_in: bool,
        w: f64,
        yexp: u8,
        in_word: u32,
    ) -> Result<()> {
        if k == self.t {
            debug_assert!(!vert_in);
            let out = read_off(links, self.t)?;
            *self.acc_open.entry((out, yexp)).or_insert(0.0) += w;
            return Ok(());
        }
        let s_occ = slot(in_word, k) != SLOT_E;
        let term_live = links
            .iter()
            .any(|&(a, b)| a == Loc::Term || b == Loc::Term);
        let last = k + 1 == self.t;
        for st in LocalState::ALL {
            if st.uses(Side::S) != s_occ {
                continue;
            }
            let uses_w = st.uses(Side::W);
            if k == 0 {
                if self.flags.origin {
                    if !uses_w {
                        continue; // the start edge must be used
                    }
                } else if uses_w && (!self.flags.alpha || term_live) {
                    continue;
                }
            } else if uses_w != vert_in {
                continue;
            }
            let uses_e = st.uses(Side::E);
            if last && uses_e && !self.flags.beta {
                continue;
            }

            let mut lk = links.to_vec();
            let mut term_here = term_live;
            let mut completed = false;
            let mut dead = false;
            for &(sa, sb) in st.arcs() {
                let la = self.side_loc(sa, k, &mut term_here, &mut dead);
                let lb = self.side_loc(sb, k, &mut term_here, &mut dead);
                if dead {
                    break;
                }
                match attach(&mut lk, la, lb) {
                    Attach::Loop => {
                        dead = true;
                        break;
                    }
                    Attach::Complete => completed = true,
                    Attach::Link => {}
                }
            }
            if dead {
                continue;
            }
            let w2 = w * self.wts[k].state_weight(st);
            let e2 = yexp
                + match self.fug {
                    FugSide::Left if k == 0 => triangle_crossings(st).0 as u8,
                    FugSide::Right if last => triangle_crossings(st).1 as u8,
                    _ => 0,
                };
            if completed {
                // anything still live would be junk disconnected from the
                // finished walk, so only the clean completion counts
                if lk.is_empty() {
                    *self.acc_done.entry(e2).or_insert(0.0) += w2;
                }
                continue;
            }
            self.scan(k + 1, &lk, uses_e && !last, w2, e2, in_word)?;
        }
        Ok(())
    }

    fn side_loc(&self, side: Side, k: usize, term_here: &mut bool, dead: &mut bool) -> Loc {
        match side {
            Side::S => Loc::Bot(k as u8),
            Side::N => Loc::Top(k as u8),
            Side::W => {
                if k == 0 {
                    if self.flags.origin {
                        Loc::Origin
                    } else {
                        if *term_here {
                            *dead = true;
                        }
                        *term_here = true;
                        Loc::Term
                    }
                } else {
                    Loc::Vert
                }
            }
            Side::E => {
                if k + 1 == self.t {
                    if *term_here {
                        *dead = true;
                    }
                    *term_here = true;
                    Loc::Term
                } else {
                    Loc::Vert
                }
            }
        }
    }
}

fn build_table(
    pats: &PatternTable,
    wts: &[WeightTable],
    flags: RowFlags,
    fug: FugSide,
) -> Result<RawTable> {
    let mut open = Vec::with_capacity(pats.len());
    let mut done = Vec::with_capacity(pats.len());
    for p in 0..pats.len() {
        let word = pats.words[p];
        if flags.origin && word_has(word, pats.t, SLOT_O) {
            // the start can only be placed once
            open.push(Vec::new());
            done.push(Vec::new());
            continue;
        }
        let mut ctx = BuildCtx {
            t: pats.t,
            wts,
            flags,
            fug,
            acc_open: BTreeMap::new(),
            acc_done: BTreeMap::new(),
        };
        let links = links_from(word, pats.t);
        ctx.scan(0, &links, false, 1.0, 0, word)?;
        open.push(
            ctx.acc_open
                .into_iter()
                .map(|((q, e), w)| (pats.index[&q] as u32, w, e))
                .collect(),
        );
        done.push(ctx.acc_done.into_iter().map(|(e, w)| (w, e)).collect());
    }
    Ok(RawTable { open, done })
}

/// A row table with the contact fugacity substituted in.
struct Baked {
    open: Vec<Vec<(u32, f64)>>,
    done: Vec<f64>,
}

fn bake(raw: &RawTable, y: f64) -> Baked {
    let open = raw
        .open
        .iter()
        .map(|row| {
            row.iter()
                .map(|&(q, w, e)| (q, w * y.powi(e as i32)))
                .collect()
        })
        .collect();
    let done = raw
        .done
        .iter()
        .map(|row| {
            let mut k = Kahan::new();
            for &(w, e) in row {
                k.add(w * y.powi(e as i32));
            }
            k.value()
        })
        .collect();
    Baked { open, done }
}

impl Baked {
    /// u -> (M u, completions c . u).
    fn apply(&self, u: &[f64]) -> (Vec<f64>, f64) {
        let mut out = vec![0.0; u.len()];
        let mut c = Kahan::new();
        for (p, &a) in u.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for &(q, w) in &self.open[p] {
                out[q as usize] += a * w;
            }
            if self.done[p] != 0.0 {
                c.add(a * self.done[p]);
            }
        }
        (out, c.value())
    }

    /// Row functional r -> r M.
    fn apply_t(&self, r: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; r.len()];
        for (p, row) in self.open.iter().enumerate() {
            let mut k = Kahan::new();
            for &(q, w) in row {
                let rq = r[q as usize];
                if rq != 0.0 {
                    k.add(rq * w);
                }
            }
            out[p] = k.value();
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut k = Kahan::new();
    for (x, y) in a.iter().zip(b) {
        if *x != 0.0 && *y != 0.0 {
            k.add(x * y);
        }
    }
    k.value()
}

/// One row of the transfer matrix, for inspection and spot checks: the
/// weighted distribution over output patterns plus the completed-walk
/// weight. Errors if the flags replace a start that is already present.
pub fn row_distribution(
    pat: LinkPattern,
    thetas: &AngleSequence,
    flags: RowFlags,
    y: f64,
) -> Result<(Vec<(LinkPattern, f64)>, f64)> {
    let t = thetas.len();
    if t != pat.width() {
        return Err(SawError::Invalid(format!(
            "pattern width {} does not match {} column angles",
            pat.width(),
            t
        )));
    }
    if flags.origin && word_has(pat.word, t, SLOT_O) {
        return Err(SawError::Invalid(
            "start insertion into a state that already carries the start strand".into(),
        ));
    }
    let wts = column_weights(thetas)?;
    let pats = PatternTable::build(t);
    let raw = build_table(&pats, &wts, flags, FugSide::Left)?;
    let baked = bake(&raw, y);
    let p = pats.index[&pat.word];
    let out = baked.open[p]
        .iter()
        .map(|&(q, w)| {
            (
                LinkPattern {
                    word: pats.words[q as usize],
                    width: t as u8,
                },
                w,
            )
        })
        .collect();
    Ok((out, baked.done[p]))
}

fn column_weights(thetas: &AngleSequence) -> Result<Vec<WeightTable>> {
    thetas.thetas().iter().map(|&t| local_weights(t)).collect()
}

fn check_width(t: usize) -> Result<()> {
    if t > WIDTH_CAP {
        return Err(SawError::WidthCap { width: t, cap: WIDTH_CAP });
    }
    Ok(())
}

/// A non-unit fugacity needs the contact column at tilt pi/3, where visit
/// counts are bounded by walk length.
fn check_boundary_fugacity(thetas: &AngleSequence, y: f64, fug: FugSide) -> Result<()> {
    if y < 0.0 {
        return Err(SawError::Invalid(format!("fugacity {y} is negative")));
    }
    let (k, which) = match fug {
        FugSide::Left => (0, "first"),
        FugSide::Right => (thetas.len() - 1, "last"),
    };
    if y != 1.0 && (thetas.get(k) - PI / 3.0).abs() > PI3_TOL {
        return Err(SawError::FugacityAngle {
            y,
            which,
            theta: thetas.get(k),
        });
    }
    Ok(())
}

/// Boundary walk sums of one truncation, produced by the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripValues {
    /// Walks back to the left boundary.
    pub a: f64,
    /// Walks across to the right boundary.
    pub b: f64,
    /// Walks out through the top, winding factor included.
    pub d: f64,
    /// Walks out through the bottom, winding factor included.
    pub e: f64,
}

/// Incremental evaluator over the truncation height. Keeps the forward
/// state chains and the completion functionals; each unit of height costs
/// a fixed number of row products, so values at height L never require a
/// fresh sweep.
struct StripEngine {
    n: usize,
    m_a: Baked,
    m_b: Baked,
    m_f: Baked,
    o_a: Baked,
    o_b: Baked,
    // forward chains: M^L applied to the initial states
    wa: Vec<f64>,
    wb: Vec<f64>,
    w0: Vec<f64>,
    wf: Vec<f64>,
    // completion functionals: c M^L and their running sums over heights
    ra: Vec<f64>,
    rb: Vec<f64>,
    r0: Vec<f64>,
    sa: Vec<f64>,
    sb: Vec<f64>,
    s0: Vec<f64>,
    // top read-off functional d M^L
    qd: Vec<f64>,
    l: i64,
}

impl StripEngine {
    fn new(thetas: &AngleSequence, y: f64, fug: FugSide) -> Result<StripEngine> {
        let t = thetas.len();
        check_width(t)?;
        check_boundary_fugacity(thetas, y, fug)?;
        let wts = column_weights(thetas)?;
        let pats = PatternTable::build(t);
        let n = pats.len();

        let raw_ma = build_table(&pats, &wts, RowFlags { origin: false, alpha: true, beta: false }, fug)?;
        let raw_mb = build_table(&pats, &wts, RowFlags { origin: false, alpha: false, beta: true }, fug)?;
        let raw_mf = build_table(&pats, &wts, RowFlags { origin: false, alpha: false, beta: false }, fug)?;
        let raw_oa = build_table(&pats, &wts, RowFlags { origin: true, alpha: false, beta: false }, fug)?;
        let raw_ob = build_table(&pats, &wts, RowFlags { origin: true, alpha: false, beta: true }, fug)?;
        let m_a = bake(&raw_ma, y);
        let m_b = bake(&raw_mb, y);
        let m_f = bake(&raw_mf, y);
        let o_a = bake(&raw_oa, y);
        let o_b = bake(&raw_ob, y);

        let mut e0 = vec![0.0; n];
        e0[pats.index[&0u32]] = 1.0;
        // bottom-exit entry state: the free end sits on the bottom edge of
        // column k, carrying that endpoint's winding factor
        let mut wf = vec![0.0; n];
        // top read-off: a lone start strand leaving through the top of
        // column k, with that endpoint's winding factor
        let mut qd = vec![0.0; n];
        for k in 0..t {
            let th = thetas.get(k);
            wf[pats.index[&with_slot(0, k, SLOT_F)]] = (3.0 * (th - PI) / 8.0).cos();
            qd[pats.index[&with_slot(0, k, SLOT_O)]] = (3.0 * th / 8.0).cos();
        }

        Ok(StripEngine {
            n,
            wa: e0.clone(),
            wb: e0.clone(),
            w0: e0,
            wf,
            ra: m_a.done.clone(),
            rb: m_b.done.clone(),
            r0: m_f.done.clone(),
            sa: vec![0.0; n],
            sb: vec![0.0; n],
            s0: vec![0.0; n],
            qd,
            m_a,
            m_b,
            m_f,
            o_a,
            o_b,
            l: 0,
        })
    }

    /// Sums for the truncation of the current height.
    fn values(&self) -> StripValues {
        let (za, ca) = self.o_a.apply(&self.wa);
        let (zb, cb) = self.o_b.apply(&self.wb);
        let (z0, _) = self.o_a.apply(&self.w0);
        let (zf, cf) = self.o_a.apply(&self.wf);
        StripValues {
            a: ca + dot(&self.sa, &za),
            b: cb + dot(&self.sb, &zb),
            d: dot(&self.qd, &z0),
            e: cf + dot(&self.s0, &zf),
        }
    }

    /// Grow the truncation by one row at each end.
    fn advance(&mut self) {
        for i in 0..self.n {
            self.sa[i] += self.ra[i];
            self.sb[i] += self.rb[i];
            self.s0[i] += self.r0[i];
        }
        self.ra = self.m_a.apply_t(&self.ra);
        self.rb = self.m_b.apply_t(&self.rb);
        self.r0 = self.m_f.apply_t(&self.r0);
        self.qd = self.m_f.apply_t(&self.qd);
        self.wa = self.m_a.apply(&self.wa).0;
        self.wb = self.m_b.apply(&self.wb).0;
        self.w0 = self.m_f.apply(&self.w0).0;
        self.wf = self.m_f.apply(&self.wf).0;
        self.l += 1;
    }
}

/// Boundary walk sums of the height-l truncation, by transfer matrix.
/// Matches the brute-force column-domain sums at unit step fugacity.
pub fn strip_values(thetas: &AngleSequence, l: i64, y: f64) -> Result<StripValues> {
    strip_values_with(thetas, l, y, FugSide::Left)
}

/// As [`strip_values`] but counting contacts with the right boundary
/// column, which must then carry tilt pi/3 for non-unit y.
pub fn strip_values_right(thetas: &AngleSequence, l: i64, y: f64) -> Result<StripValues> {
    strip_values_with(thetas, l, y, FugSide::Right)
}

fn strip_values_with(thetas: &AngleSequence, l: i64, y: f64, fug: FugSide) -> Result<StripValues> {
    if l < 0 {
        return Err(SawError::Invalid(format!("negative truncation height {l}")));
    }
    let mut eng = StripEngine::new(thetas, y, fug)?;
    for _ in 0..l {
        eng.advance();
    }
    Ok(eng.values())
}

/// How a truncation sweep ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConvergenceStatus {
    /// Increments of both boundary sums stayed below the threshold for
    /// three consecutive heights.
    Converged { l: i64 },
    /// Still moving at the height ceiling; expected exactly when the
    /// contact fugacity sits at or beyond the divergence threshold.
    Diverged { l_max: i64, rel_delta: f64 },
}

/// Converged (or explicitly diverged) strip sums with diagnostics.
#[derive(Debug, Clone)]
pub struct SeriesReport {
    pub width: usize,
    pub thetas: Vec<f64>,
    pub y: f64,
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub e: f64,
    /// Last absolute increments of a and b.
    pub a_delta: f64,
    pub b_delta: f64,
    pub status: ConvergenceStatus,
    /// |cos(3 pi / 8) a + b - 1|, reported at unit fugacity only.
    pub identity_residual: Option<f64>,
    /// Dominant growth rate of the start-strand sector, when it converges.
    pub lambda: Option<f64>,
}

/// Drive the truncation height until the left and right boundary sums
/// stall, or the ceiling is reached (reported, not an error).
pub fn strip_partition(thetas: &AngleSequence, y: f64) -> Result<SeriesReport> {
    strip_partition_with(thetas, y, FugSide::Left)
}

/// As [`strip_partition`] with the fugacity counting right-boundary
/// contacts instead.
pub fn strip_partition_right(thetas: &AngleSequence, y: f64) -> Result<SeriesReport> {
    strip_partition_with(thetas, y, FugSide::Right)
}

fn strip_partition_with(thetas: &AngleSequence, y: f64, fug: FugSide) -> Result<SeriesReport> {
    let mut eng = StripEngine::new(thetas, y, fug)?;
    let mut prev = eng.values();
    let mut streak = 0;
    let mut a_delta;
    let mut b_delta;
    let status = loop {
        eng.advance();
        let cur = eng.values();
        a_delta = (cur.a - prev.a).abs();
        b_delta = (cur.b - prev.b).abs();
        let rel = (a_delta / prev.a.abs().max(1e-300)).max(b_delta / prev.b.abs().max(1e-300));
        if !cur.a.is_finite() || !cur.b.is_finite() {
            prev = cur;
            break ConvergenceStatus::Diverged { l_max: eng.l, rel_delta: f64::INFINITY };
        }
        streak = if rel < CONVERGENCE_EPS { streak + 1 } else { 0 };
        prev = cur;
        if streak >= 3 {
            break ConvergenceStatus::Converged { l: eng.l };
        }
        if eng.l >= L_MAX {
            break ConvergenceStatus::Diverged { l_max: eng.l, rel_delta: rel };
        }
    };
    let converged = matches!(status, ConvergenceStatus::Converged { .. });
    if converged && y == 1.0 {
        if prev.a > INV_COS_3PI_8 + 1e-9 {
            return Err(SawError::Invalid(format!(
                "left boundary sum {} exceeds its bound {}",
                prev.a, INV_COS_3PI_8
            )));
        }
        if !(-1e-12..=1.0 + 1e-9).contains(&prev.b) {
            return Err(SawError::Invalid(format!(
                "right boundary sum {} escapes [0, 1]",
                prev.b
            )));
        }
    }
    let identity_residual = if y == 1.0 {
        Some((crate::angle::COS_3PI_8 * prev.a + prev.b - 1.0).abs())
    } else {
        None
    };
    Ok(SeriesReport {
        width: thetas.len(),
        thetas: thetas.thetas().to_vec(),
        y,
        a: prev.a,
        b: prev.b,
        d: prev.d,
        e: prev.e,
        a_delta,
        b_delta,
        status,
        identity_residual,
        lambda: spectral_radius_with(thetas, y, fug).ok(),
    })
}

/// Two-point sum between left-boundary rows s1 and s2 of the height-l
/// truncation, with contact fugacity on column 1.
pub fn two_point_alpha(thetas: &AngleSequence, l: i64, s1: i64, s2: i64, y: f64) -> Result<f64> {
    if s1 == s2 {
        return Err(SawError::CoincidentEndpoints);
    }
    if s1.abs() > l || s2.abs() > l {
        return Err(SawError::MidEdgeNotInDomain(format!(
            "left boundary rows {s1}, {s2} must lie within height {l}"
        )));
    }
    let t = thetas.len();
    check_width(t)?;
    check_boundary_fugacity(thetas, y, FugSide::Left)?;
    let wts = column_weights(thetas)?;
    let pats = PatternTable::build(t);
    let f = RowFlags { origin: false, alpha: false, beta: false };
    let raw_mf = build_table(&pats, &wts, f, FugSide::Left)?;
    let raw_oa = build_table(&pats, &wts, RowFlags { origin: true, ..f }, FugSide::Left)?;
    let raw_ma = build_table(&pats, &wts, RowFlags { alpha: true, ..f }, FugSide::Left)?;
    let m_f = bake(&raw_mf, y);
    let o_a = bake(&raw_oa, y);
    let m_a = bake(&raw_ma, y);

    let mut u = vec![0.0; pats.len()];
    u[pats.index[&0u32]] = 1.0;
    let mut total = Kahan::new();
    for r in -l..=l {
        let table = if r == s1 {
            &o_a
        } else if r == s2 {
            &m_a
        } else {
            &m_f
        };
        let (nu, c) = table.apply(&u);
        total.add(c);
        u = nu;
    }
    Ok(total.value())
}

/// Transitions of the start-strand sector (one start strand, no free end)
/// under the plain row, used for growth-rate estimates.
struct Sector {
    trans: Vec<Vec<(u32, f64, u8)>>,
}

fn build_sector(thetas: &AngleSequence, fug: FugSide) -> Result<Sector> {
    let t = thetas.len();
    check_width(t)?;
    let wts = column_weights(thetas)?;
    let pats = PatternTable::build(t);
    let raw = build_table(
        &pats,
        &wts,
        RowFlags { origin: false, alpha: false, beta: false },
        fug,
    )?;
    let mut sector_of = vec![usize::MAX; pats.len()];
    let mut members = Vec::new();
    for (p, &w) in pats.words.iter().enumerate() {
        if word_has(w, t, SLOT_O) && !word_has(w, t, SLOT_F) {
            sector_of[p] = members.len();
            members.push(p);
        }
    }
    let mut trans = Vec::with_capacity(members.len());
    for &p in &members {
        let mut row = Vec::new();
        for &(q, w, e) in &raw.open[p] {
            let sq = sector_of[q as usize];
            if sq == usize::MAX {
                return Err(SawError::Invalid(
                    "start strand escaped its sector".into(),
                ));
            }
            row.push((sq as u32, w, e));
        }
        trans.push(row);
    }
    Ok(Sector { trans })
}

/// Dominant growth rate of the y-weighted sector matrix, by shifted power
/// iteration (the shift removes periodicity for nonnegative weights).
fn sector_radius(sector: &Sector, y: f64) -> Result<f64> {
    const SHIFT: f64 = 0.5;
    const TOL: f64 = 1e-12;
    const MAX_ITERS: usize = 100_000;
    let n = sector.trans.len();
    let baked: Vec<Vec<(u32, f64)>> = sector
        .trans
        .iter()
        .map(|row| row.iter().map(|&(q, w, e)| (q, w * y.powi(e as i32))).collect())
        .collect();
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut lam_prev = f64::INFINITY;
    let mut drift = f64::INFINITY;
    for _ in 0..MAX_ITERS {
        let mut mv = vec![0.0; n];
        for (p, row) in baked.iter().enumerate() {
            let a = v[p];
            if a == 0.0 {
                continue;
            }
            for &(q, w) in row {
                mv[q as usize] += a * w;
            }
        }
        for (x, y0) in mv.iter_mut().zip(&v) {
            *x += SHIFT * y0;
        }
        let lam = dot(&v, &mv);
        let norm = dot(&mv, &mv).sqrt();
        if norm < 1e-300 {
            return Ok(0.0);
        }
        for x in mv.iter_mut() {
            *x /= norm;
        }
        drift = (lam - lam_prev).abs();
        lam_prev = lam;
        v = mv;
        if drift < TOL * lam.abs().max(1.0) {
            return Ok(lam - SHIFT);
        }
    }
    Err(SawError::PowerIterationDiverged { iters: MAX_ITERS, drift })
}

/// Dominant per-row growth rate of the start-strand sector at fugacity y
/// (contacts counted on the left boundary).
pub fn spectral_radius(thetas: &AngleSequence, y: f64) -> Result<f64> {
    spectral_radius_with(thetas, y, FugSide::Left)
}

fn spectral_radius_with(thetas: &AngleSequence, y: f64, fug: FugSide) -> Result<f64> {
    let sector = build_sector(thetas, fug)?;
    sector_radius(&sector, y)
}

/// Divergence threshold of the strip's right-boundary series, with the
/// bisection bracket and the growth rates at its ends.
#[derive(Debug, Clone, Copy)]
pub struct YcReport {
    pub y_c: f64,
    pub lo: f64,
    pub hi: f64,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
}

/// Find the fugacity where the sector growth rate crosses 1, bisecting
/// over [1, 6] to 1e-9. Requires the first tilt to be pi/3.
pub fn yc_strip_report(thetas: &AngleSequence) -> Result<YcReport> {
    if (thetas.get(0) - PI / 3.0).abs() > PI3_TOL {
        return Err(SawError::Invalid(format!(
            "divergence threshold needs the first tilt at pi/3, got {}",
            thetas.get(0)
        )));
    }
    let sector = build_sector(thetas, FugSide::Left)?;
    let (mut lo, mut hi) = (1.0, 6.0);
    let lambda_lo = sector_radius(&sector, lo)?;
    let lambda_hi = sector_radius(&sector, hi)?;
    if lambda_lo >= 1.0 || lambda_hi <= 1.0 {
        return Err(SawError::BracketFailure {
            lo,
            hi,
            flo: lambda_lo,
            fhi: lambda_hi,
        });
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if sector_radius(&sector, mid)? < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(YcReport {
        y_c: 0.5 * (lo + hi),
        lo,
        hi,
        lambda_lo,
        lambda_hi,
    })
}

/// The divergence-threshold fugacity of the strip.
pub fn yc_strip(thetas: &AngleSequence) -> Result<f64> {
    Ok(yc_strip_report(thetas)?.y_c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::Y_STAR;
    use crate::enumerate::rect_partition;
    use crate::weights::local_weights;

    fn seq(v: &[f64]) -> AngleSequence {
        AngleSequence::new(v.to_vec()).unwrap()
    }

    fn pat(s: &str) -> LinkPattern {
        let statuses: Vec<SlotStatus> = s
            .chars()
            .map(|c| match c {
                '(' => SlotStatus::Open,
                ')' => SlotStatus::Close,
                'O' => SlotStatus::OriginStrand,
                'F' => SlotStatus::FreeEnd,
                _ => SlotStatus::Empty,
            })
            .collect();
        LinkPattern::new(&statuses).unwrap()
    }

    #[test]
    fn pattern_counts() {
        // balanced words with up to one start strand and one free end:
        // M_T + 2 T M_{T-1} + T (T-1) M_{T-2} over the Motzkin numbers
        assert_eq!(PatternTable::build(1).len(), 3);
        assert_eq!(PatternTable::build(2).len(), 8);
        assert_eq!(PatternTable::build(6).len(), 573);
        assert_eq!(PatternTable::build(8).len(), 5211);
    }

    #[test]
    fn width_one_rows() {
        let th = seq(&[PI / 3.0]);
        let w = local_weights(PI / 3.0).unwrap();
        // nothing in, nothing out: only the empty face
        let (out, c) =
            row_distribution(pat("."), &th, RowFlags { origin: false, alpha: false, beta: false }, 1.0)
                .unwrap();
        assert_eq!(out, vec![(pat("."), 1.0)]);
        assert_eq!(c, 0.0);
        // start and right exit in the same row: the straight crossing
        let (out, c) =
            row_distribution(pat("."), &th, RowFlags { origin: true, alpha: false, beta: true }, 2.0)
                .unwrap();
        assert!((c - w.v * 2.0).abs() < 1e-15);
        assert_eq!(out.len(), 1); // the start strand may also head up
        assert_eq!(out[0].0, pat("O"));
        assert!((out[0].1 - w.u1 * 2.0).abs() < 1e-15);
        // start strand passing straight through
        let (out, c) =
            row_distribution(pat("O"), &th, RowFlags { origin: false, alpha: false, beta: false }, 2.0)
                .unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0, pat("O"));
        assert!((out[0].1 - w.v * 2.0).abs() < 1e-15);
        assert_eq!(c, 0.0);
        // reinserting the start is inconsistent
        assert!(row_distribution(
            pat("O"),
            &th,
            RowFlags { origin: true, alpha: false, beta: false },
            1.0
        )
        .is_err());
    }

    #[test]
    fn matches_brute_force_width_one() {
        let th = seq(&[0.9]);
        for l in 0..=2 {
            let tv = strip_values(&th, l, 1.0).unwrap();
            let bf = rect_partition(&th, l, 1.0, 1.0).unwrap();
            assert!((tv.a - bf.a).abs() < 1e-14, "a at l={l}");
            assert!((tv.b - bf.b).abs() < 1e-14, "b at l={l}");
            assert!((tv.d - bf.d).abs() < 1e-14, "d at l={l}");
            assert!((tv.e - bf.e).abs() < 1e-14, "e at l={l}");
        }
    }

    #[test]
    fn matches_brute_force_width_two_with_fugacity() {
        let th = seq(&[PI / 3.0, 1.1]);
        for &y in &[1.0, 2.0] {
            for l in 0..=2 {
                let tv = strip_values(&th, l, y).unwrap();
                let bf = rect_partition(&th, l, 1.0, y).unwrap();
                assert!((tv.a - bf.a).abs() < 1e-13, "a at l={l} y={y}");
                assert!((tv.b - bf.b).abs() < 1e-13, "b at l={l} y={y}");
                assert!((tv.d - bf.d).abs() < 1e-13, "d at l={l} y={y}");
                assert!((tv.e - bf.e).abs() < 1e-13, "e at l={l} y={y}");
            }
        }
    }

    #[test]
    fn width_one_closed_forms() {
        let rep = strip_partition(&seq(&[PI / 3.0]), 1.0).unwrap();
        let w = local_weights(PI / 3.0).unwrap();
        let b1 = w.v + (w.u1 * w.u1 + w.u2 * w.u2) / (1.0 - w.v);
        let a1 = 2.0 * w.u1 * w.u2 / (1.0 - w.v);
        assert!(matches!(rep.status, ConvergenceStatus::Converged { .. }));
        assert!((rep.b - b1).abs() < 1e-9);
        assert!((rep.a - a1).abs() < 1e-9);
        assert!((rep.b - 0.82842712474619010).abs() < 1e-9);
        assert!((rep.a - 0.44834152916796512).abs() < 1e-9);
        assert!(rep.identity_residual.unwrap() < 1e-9);
    }

    #[test]
    fn divergence_is_reported() {
        let rep = strip_partition(&seq(&[PI / 3.0]), 3.6).unwrap();
        assert!(matches!(rep.status, ConvergenceStatus::Diverged { .. }));
        assert!(rep.lambda.unwrap() > 1.0);
    }

    #[test]
    fn yc_width_one() {
        let yc = yc_strip(&seq(&[PI / 3.0])).unwrap();
        assert!((yc - (2.0 + std::f64::consts::SQRT_2)).abs() < 1e-9);
        assert!(yc > Y_STAR);
    }

    #[test]
    fn two_point_matches_enumeration() {
        use crate::enumerate::two_point;
        use crate::tiling::build_rect;
        let th = seq(&[1.2, 0.8]);
        let dom = build_rect(&th, 1).unwrap();
        let by_enum = two_point(&dom, dom.origin().unwrap(), dom.alpha(1).unwrap()).unwrap();
        let by_transfer = two_point_alpha(&th, 1, 0, 1, 1.0).unwrap();
        assert!((by_enum - by_transfer).abs() < 1e-13);
        let down = two_point(&dom, dom.origin().unwrap(), dom.alpha(-1).unwrap()).unwrap();
        let down_t = two_point_alpha(&th, 1, 0, -1, 1.0).unwrap();
        assert!((down - down_t).abs() < 1e-13);
    }

    #[test]
    fn width_cap_enforced() {
        let th = seq(&[1.3; 9]);
        assert!(matches!(
            strip_values(&th, 1, 1.0),
            Err(SawError::WidthCap { width: 9, cap: 8 })
        ));
    }
}
