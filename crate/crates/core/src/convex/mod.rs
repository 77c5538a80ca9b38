//! Perimeter of the convex hull of several pairwise disjoint convex
//! polygons, without touching more than `O(log m)` vertices per polygon.
//!
//! The upper hull is built from the upper envelope of the polygons: a sweep
//! over the polygons' extreme points yields vertical slices, then a
//! Graham-style scan keeps the slices whose bridges form a convex chain.
//! Boundary pieces between bridges are measured with the prefix arc lengths
//! stored in each chain. The lower hull is the same computation on the
//! mirrored polygons.

mod tangents;

#[cfg(test)]
use tangents::crossing;
pub use tangents::{hulls_disjoint, tangent_diagnostics, Line, TangentDiagnostics};

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::hull::ChainView;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Upper,
    /// The lower boundary, seen through the mirror `y -> -y`.
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Xy {
    pub x: f64,
    pub y: f64,
}

#[inline]
fn orient_xy(a: Xy, b: Xy, c: Xy) -> f64 {
    robust::orient2d(
        robust::Coord { x: a.x, y: a.y },
        robust::Coord { x: b.x, y: b.y },
        robust::Coord { x: c.x, y: c.y },
    )
}

#[inline]
fn dist(a: Xy, b: Xy) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// One boundary (upper or mirrored lower) of a convex chain as an
/// x-monotone sequence, indexed left to right.
#[derive(Debug, Clone, Copy)]
pub struct MonoChain<'a> {
    view: ChainView<'a>,
    side: Side,
    start: usize,
    count: usize,
}

impl<'a> MonoChain<'a> {
    pub fn new(view: ChainView<'a>, side: Side) -> Self {
        let v = view.vertices;
        let k = v.len();
        assert!(k > 0, "empty chain");
        let mut left = 0;
        let mut right = 0;
        for i in 1..k {
            let better_left = match side {
                Side::Upper => v[i].x < v[left].x || (v[i].x == v[left].x && v[i].y > v[left].y),
                Side::Lower => v[i].x < v[left].x || (v[i].x == v[left].x && v[i].y < v[left].y),
            };
            if better_left {
                left = i;
            }
            let better_right = match side {
                Side::Upper => v[i].x > v[right].x || (v[i].x == v[right].x && v[i].y > v[right].y),
                Side::Lower => v[i].x > v[right].x || (v[i].x == v[right].x && v[i].y < v[right].y),
            };
            if better_right {
                right = i;
            }
        }
        let count = match side {
            Side::Upper => (left + k - right) % k + 1,
            Side::Lower => (right + k - left) % k + 1,
        };
        Self {
            view,
            side,
            start: left,
            count,
        }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    #[inline]
    fn ccw_index(&self, t: usize) -> usize {
        let k = self.view.vertices.len();
        match self.side {
            Side::Upper => (self.start + k - t % k) % k,
            Side::Lower => (self.start + t) % k,
        }
    }

    #[inline]
    pub fn point(&self, t: usize) -> Xy {
        let p = &self.view.vertices[self.ccw_index(t)];
        match self.side {
            Side::Upper => Xy { x: p.x, y: p.y },
            Side::Lower => Xy { x: p.x, y: -p.y },
        }
    }

    /// Boundary length from the leftmost vertex to vertex `t`.
    #[inline]
    pub fn arc(&self, t: usize) -> f64 {
        let i = self.ccw_index(t);
        match self.side {
            Side::Upper => self.view.ccw_arc(i, self.start),
            Side::Lower => self.view.ccw_arc(self.start, i),
        }
    }

    fn first(&self) -> Xy {
        self.point(0)
    }

    fn last(&self) -> Xy {
        self.point(self.count - 1)
    }

    /// First index whose x is `>= x` (or `> x` when `strict`).
    fn lower_bound(&self, x: f64, strict: bool) -> usize {
        let (mut lo, mut hi) = (0, self.count);
        while lo < hi {
            let mid = (lo + hi) / 2;
            let px = self.point(mid).x;
            let before = if strict { px <= x } else { px < x };
            if before {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Point of the boundary at abscissa `x`, with its arc position.
    fn at_x(&self, x: f64) -> (Xy, f64) {
        let t = self.lower_bound(x, false);
        if t < self.count && self.point(t).x == x {
            return (self.point(t), self.arc(t));
        }
        debug_assert!(t > 0 && t < self.count, "abscissa outside chain");
        let t = t.clamp(1, self.count - 1);
        let a = self.point(t - 1);
        let b = self.point(t);
        let f = (x - a.x) / (b.x - a.x);
        let p = Xy {
            x,
            y: a.y + f * (b.y - a.y),
        };
        (p, self.arc(t - 1) + dist(a, p))
    }
}

/// A vertical slice `Q[I]` of one chain: the part of the chain's boundary
/// over the x-interval `[x_lo, x_hi]`. `index_range` is the half-open range
/// of boundary vertices whose x lies in the interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slice {
    pub chain: usize,
    pub x_lo: f64,
    pub x_hi: f64,
    pub index_range: (usize, usize),
}

/// Random access to the points of a slice: an optional interpolated point
/// at `x_lo`, the chain vertices inside, an optional interpolated point at
/// `x_hi`.
struct SliceAcc<'a> {
    mono: MonoChain<'a>,
    lo_clip: Option<(Xy, f64)>,
    first_t: usize,
    n_inner: usize,
    hi_clip: Option<(Xy, f64)>,
}

impl<'a> SliceAcc<'a> {
    fn new(mono: MonoChain<'a>, s: &Slice) -> Self {
        let (first_t, end_t) = s.index_range;
        let n_inner = end_t - first_t;
        let has_lo_vertex = n_inner > 0 && mono.point(first_t).x == s.x_lo;
        let has_hi_vertex = n_inner > 0 && mono.point(end_t - 1).x == s.x_hi;
        let lo_clip = (!has_lo_vertex).then(|| mono.at_x(s.x_lo));
        let hi_clip = if has_hi_vertex || (s.x_lo == s.x_hi && lo_clip.is_some()) {
            None
        } else {
            Some(mono.at_x(s.x_hi))
        };
        Self {
            mono,
            lo_clip,
            first_t,
            n_inner,
            hi_clip,
        }
    }

    fn len(&self) -> usize {
        self.lo_clip.is_some() as usize + self.n_inner + self.hi_clip.is_some() as usize
    }

    fn get(&self, i: usize) -> (Xy, f64) {
        let off = self.lo_clip.is_some() as usize;
        if i < off {
            return self.lo_clip.unwrap();
        }
        let j = i - off;
        if j < self.n_inner {
            let t = self.first_t + j;
            return (self.mono.point(t), self.mono.arc(t));
        }
        self.hi_clip.expect("slice index out of range")
    }

    fn pt(&self, i: usize) -> Xy {
        self.get(i).0
    }
}

/// Upper common tangent between two slices, as the shortest segment on the
/// tangent line joining them. Indices are positions within each slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bridge {
    pub left_index: usize,
    pub right_index: usize,
    pub left: Xy,
    pub right: Xy,
    left_arc: f64,
    right_arc: f64,
}

impl Bridge {
    pub fn length(&self) -> f64 {
        dist(self.left, self.right)
    }
}

/// Index ranges of `a` and `b` that take part in the tangent search. Where
/// the two slices meet at one abscissa, the lower of the two points there is
/// hidden by the higher one and cannot carry the tangent.
fn active_ranges(a: &SliceAcc, b: &SliceAcc) -> ((usize, usize), (usize, usize)) {
    let (na, nb) = (a.len(), b.len());
    let (mut a_end, mut b_start) = (na, 0);
    let (pa, pb) = (a.pt(na - 1), b.pt(0));
    if pa.x == pb.x {
        if pa.y < pb.y && na > 1 {
            a_end -= 1;
        } else if pb.y <= pa.y && nb > 1 {
            b_start += 1;
        } else if na > 1 {
            a_end -= 1;
        }
    }
    ((0, a_end), (b_start, nb))
}

fn bridge_acc(a: &SliceAcc, b: &SliceAcc) -> Bridge {
    let ((a0, a1), (b0, b1)) = active_ranges(a, b);
    // Tangent point on `b` seen from `p`: the first index after which the
    // chain no longer rises strictly above the ray.
    let tangent_from = |p: Xy| -> usize {
        let (mut lo, mut hi) = (b0, b1 - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if orient_xy(p, b.pt(mid), b.pt(mid + 1)) > 0.0 {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let (mut lo, mut hi) = (a0, a1 - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        let q = b.pt(tangent_from(a.pt(mid)));
        if orient_xy(a.pt(mid), q, a.pt(mid + 1)) >= 0.0 {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    let j = tangent_from(a.pt(lo));
    make_bridge(a, b, lo, j)
}

fn make_bridge(a: &SliceAcc, b: &SliceAcc, i: usize, j: usize) -> Bridge {
    let (left, left_arc) = a.get(i);
    let (right, right_arc) = b.get(j);
    Bridge {
        left_index: i,
        right_index: j,
        left,
        right,
        left_arc,
        right_arc,
    }
}

/// Same tangent found with one linear monotone-chain pass over both slices.
fn bridge_acc_linear(a: &SliceAcc, b: &SliceAcc) -> Bridge {
    let ((a0, a1), (b0, b1)) = active_ranges(a, b);
    let pts: Vec<(bool, usize, Xy)> = (a0..a1)
        .map(|i| (false, i, a.pt(i)))
        .chain((b0..b1).map(|j| (true, j, b.pt(j))))
        .collect();
    let mut hull: Vec<(bool, usize, Xy)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2
            && orient_xy(hull[hull.len() - 2].2, hull[hull.len() - 1].2, p.2) >= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    let k = hull.iter().position(|h| h.0).expect("b is nonempty");
    let (mut i, mut j) = (hull[k - 1].1, hull[k].1);
    let (pi, pj) = (a.pt(i), b.pt(j));
    while i + 1 < a1 && orient_xy(pi, pj, a.pt(i + 1)) == 0.0 {
        i += 1;
    }
    while j > b0 && orient_xy(pi, pj, b.pt(j - 1)) == 0.0 {
        j -= 1;
    }
    make_bridge(a, b, i, j)
}

fn check_order(a: &Slice, b: &Slice) -> Result<()> {
    if a.x_lo > a.x_hi || b.x_lo > b.x_hi || a.x_hi > b.x_lo {
        return Err(Error::InvalidSliceOrder);
    }
    Ok(())
}

/// Upper bridge from slice `a` to slice `b` (nested binary search).
pub fn bridge(chains: &[ChainView], side: Side, a: &Slice, b: &Slice) -> Result<Bridge> {
    check_order(a, b)?;
    let sa = SliceAcc::new(MonoChain::new(chains[a.chain], side), a);
    let sb = SliceAcc::new(MonoChain::new(chains[b.chain], side), b);
    Ok(bridge_acc(&sa, &sb))
}

/// Linear-time version of [`bridge`], kept as an independent check.
pub fn bridge_linear(chains: &[ChainView], side: Side, a: &Slice, b: &Slice) -> Result<Bridge> {
    check_order(a, b)?;
    let sa = SliceAcc::new(MonoChain::new(chains[a.chain], side), a);
    let sb = SliceAcc::new(MonoChain::new(chains[b.chain], side), b);
    Ok(bridge_acc_linear(&sa, &sb))
}

/// Slice covering a chain's whole x-range.
pub fn full_slice(chains: &[ChainView], side: Side, chain: usize) -> Slice {
    let m = MonoChain::new(chains[chain], side);
    Slice {
        chain,
        x_lo: m.first().x,
        x_hi: m.last().x,
        index_range: (0, m.len()),
    }
}

/// Sweep-structure key: the segment from a chain's leftmost to rightmost
/// boundary point. Disjoint chains never change vertical order, so
/// comparing the segments at any common abscissa orders the chains.
#[derive(Debug, Clone, Copy)]
struct SweepKey {
    l: Xy,
    r: Xy,
    id: usize,
}

impl SweepKey {
    fn y_at(&self, x: f64) -> f64 {
        if self.r.x == self.l.x {
            return self.l.y.max(self.r.y);
        }
        let f = ((x - self.l.x) / (self.r.x - self.l.x)).clamp(0.0, 1.0);
        self.l.y + f * (self.r.y - self.l.y)
    }
}

impl PartialEq for SweepKey {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for SweepKey {}

impl PartialOrd for SweepKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SweepKey {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.id == other.id {
            return Ordering::Equal;
        }
        let x = self.l.x.max(other.l.x);
        self.y_at(x)
            .total_cmp(&other.y_at(x))
            .then(self.id.cmp(&other.id))
    }
}

/// Upper envelope of pairwise disjoint chains as maximal slices, left to
/// right. `Side::Lower` gives the envelope of the mirrored chains.
pub fn envelope(chains: &[ChainView], side: Side) -> Vec<Slice> {
    let monos: Vec<MonoChain> = chains.iter().map(|c| MonoChain::new(*c, side)).collect();
    envelope_of(&monos)
}

/// Upper envelope of the chains' upper boundaries.
pub fn upper_envelope(chains: &[ChainView]) -> Vec<Slice> {
    envelope(chains, Side::Upper)
}

fn envelope_of(monos: &[MonoChain]) -> Vec<Slice> {
    let keys: Vec<SweepKey> = monos
        .iter()
        .enumerate()
        .map(|(id, m)| SweepKey {
            l: m.first(),
            r: m.last(),
            id,
        })
        .collect();
    // (x, is_removal, chain)
    let mut events: Vec<(f64, bool, usize)> = Vec::with_capacity(2 * keys.len());
    for k in &keys {
        events.push((k.l.x, false, k.id));
        events.push((k.r.x, true, k.id));
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut active: BTreeSet<SweepKey> = BTreeSet::new();
    let mut out: Vec<(usize, f64, f64)> = Vec::new();
    let mut cur: Option<(usize, f64)> = None;
    let mut i = 0;
    while i < events.len() {
        let x = events[i].0;
        let mut j = i;
        while j < events.len() && events[j].0 == x && !events[j].1 {
            active.insert(keys[events[j].2]);
            j += 1;
        }
        let top = active.last().map(|k| k.id);
        if top != cur.map(|c| c.0) {
            if let Some((id, s)) = cur {
                out.push((id, s, x));
            }
            cur = top.map(|id| (id, x));
        }
        while j < events.len() && events[j].0 == x {
            active.remove(&keys[events[j].2]);
            j += 1;
        }
        let top = active.last().map(|k| k.id);
        if top != cur.map(|c| c.0) {
            if let Some((id, s)) = cur {
                out.push((id, s, x));
            }
            cur = top.map(|id| (id, x));
        }
        i = j;
    }
    debug_assert!(cur.is_none());
    out.into_iter()
        .map(|(chain, x_lo, x_hi)| {
            let m = &monos[chain];
            Slice {
                chain,
                x_lo,
                x_hi,
                index_range: (m.lower_bound(x_lo, false), m.lower_bound(x_hi, true)),
            }
        })
        .collect()
}

/// Length of the upper hull (or mirrored lower hull) of the union.
fn hull_side_length(monos: &[MonoChain], side_slices: &[Slice]) -> f64 {
    let accs: Vec<SliceAcc> = side_slices
        .iter()
        .map(|s| SliceAcc::new(monos[s.chain], s))
        .collect();
    if accs.len() == 1 {
        let a = &accs[0];
        return a.get(a.len() - 1).1 - a.get(0).1;
    }
    let mut kept: Vec<usize> = vec![0];
    let mut bridges: Vec<Bridge> = Vec::new();
    for s in 1..accs.len() {
        bridges.push(bridge_acc(&accs[*kept.last().unwrap()], &accs[s]));
        kept.push(s);
        while kept.len() >= 3 {
            let n = kept.len();
            let (b1, b2) = (&bridges[n - 3], &bridges[n - 2]);
            let valid = b1.right_index < b2.left_index
                || (b1.right_index == b2.left_index
                    && orient_xy(b1.left, b1.right, b2.right) < 0.0);
            if valid {
                break;
            }
            kept.remove(n - 2);
            bridges.truncate(n - 3);
            bridges.push(bridge_acc(&accs[kept[n - 3]], &accs[kept[n - 2]]));
        }
    }
    let first = &accs[kept[0]];
    let last = &accs[*kept.last().unwrap()];
    let mut len = bridges[0].left_arc - first.get(0).1;
    len += last.get(last.len() - 1).1 - bridges[bridges.len() - 1].right_arc;
    for (i, b) in bridges.iter().enumerate() {
        len += b.length();
        if i + 1 < bridges.len() {
            len += bridges[i + 1].left_arc - b.right_arc;
        }
    }
    len
}

/// Perimeter of the convex hull of the union of pairwise disjoint convex
/// chains, using the usual conventions for degenerate hulls.
pub fn hull_of_hulls_perimeter(chains: &[ChainView]) -> Result<f64> {
    let chains: Vec<ChainView> = chains.iter().copied().filter(|c| !c.is_empty()).collect();
    match chains.len() {
        0 => return Err(Error::EmptySet),
        1 => return Ok(chains[0].perimeter()),
        _ => {}
    }
    let mut total = 0.0;
    let mut ends = [(f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY); 2];
    for side in [Side::Upper, Side::Lower] {
        let monos: Vec<MonoChain> = chains.iter().map(|c| MonoChain::new(*c, side)).collect();
        let slices = envelope_of(&monos);
        total += hull_side_length(&monos, &slices);
        // Record the vertical extent at the leftmost and rightmost abscissa.
        let firsts = slices
            .first()
            .map(|s| monos[s.chain].point(s.index_range.0));
        let lasts = slices
            .last()
            .map(|s| monos[s.chain].point(s.index_range.1 - 1));
        for (slot, p) in [(0usize, firsts), (1, lasts)] {
            let p = p.expect("nonempty envelope");
            let y = if side == Side::Upper { p.y } else { -p.y };
            ends[slot].0 = p.x;
            if side == Side::Upper {
                ends[slot].1 = y;
            } else {
                ends[slot].2 = y;
            }
        }
    }
    total += (ends[0].1 - ends[0].2) + (ends[1].1 - ends[1].2);
    Ok(total)
}
