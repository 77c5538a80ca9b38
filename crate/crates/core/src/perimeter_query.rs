//! Hull perimeter of the points inside (or outside) a square cut by a
//! halfplane of one fixed orientation.
//!
//! A three-level range tree: level 1 on x, level 2 on y, level 3 on the
//! coordinate across the halfplane's boundary direction. Each level-3 node
//! keeps the convex hull of its subset, and a query merges the hulls of its
//! canonical nodes with [`hull_of_hulls_perimeter`]. Every level orders
//! points lexicographically, so canonical subsets of one query are separated
//! by lines and their hulls are disjoint.
//!
//! Trees are implicit: a node covering `[lo, hi)` has id `i`, its left child
//! `i + 1` and its right child `i + 2·(mid − lo)`.

use std::collections::HashMap;

use crate::candidates::{Candidate, Direction, Halfplane, HalfplaneSide};
use crate::convex::hull_of_hulls_perimeter;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::hull::{hull_of_sorted, hull_perimeter, prefix_lengths, ChainView};

/// Axis-parallel box (closed, sides may be infinite) optionally cut by a
/// closed halfplane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryRegion {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
    pub halfplane: Option<Halfplane>,
}

impl QueryRegion {
    pub fn whole_plane() -> Self {
        Self {
            xmin: f64::NEG_INFINITY,
            ymin: f64::NEG_INFINITY,
            xmax: f64::INFINITY,
            ymax: f64::INFINITY,
            halfplane: None,
        }
    }

    pub fn rect(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Self {
        Self {
            xmin,
            ymin,
            xmax,
            ymax,
            halfplane: None,
        }
    }

    pub fn with_halfplane(self, h: Halfplane) -> Self {
        Self {
            halfplane: Some(h),
            ..self
        }
    }

    pub fn from_candidate(c: &Candidate) -> Self {
        let (x0, y0, x1, y1) = c.square.bounds();
        Self::rect(x0, y0, x1, y1).with_halfplane(c.halfplane)
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.xmin <= p.x
            && p.x <= self.xmax
            && self.ymin <= p.y
            && p.y <= self.ymax
            && self.halfplane.is_none_or(|h| h.contains(p.x, p.y))
    }
}

/// Interval of one coordinate with independently open or closed ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub lo_open: bool,
    pub hi: f64,
    pub hi_open: bool,
}

impl Interval {
    pub const ALL: Interval = Interval {
        lo: f64::NEG_INFINITY,
        lo_open: false,
        hi: f64::INFINITY,
        hi_open: false,
    };

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            lo_open: false,
            hi,
            hi_open: false,
        }
    }

    pub fn below(hi: f64) -> Self {
        Self {
            hi,
            hi_open: true,
            ..Self::ALL
        }
    }

    pub fn above(lo: f64) -> Self {
        Self {
            lo,
            lo_open: true,
            ..Self::ALL
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        let lo_ok = if self.lo_open {
            v > self.lo
        } else {
            v >= self.lo
        };
        let hi_ok = if self.hi_open {
            v < self.hi
        } else {
            v <= self.hi
        };
        lo_ok && hi_ok
    }

    /// Index range of the keys inside, for keys sorted ascending.
    fn index_range(&self, n: usize, key: impl Fn(usize) -> f64) -> (usize, usize) {
        let a = partition(n, |i| {
            let k = key(i);
            if self.lo_open {
                k <= self.lo
            } else {
                k < self.lo
            }
        });
        let b = partition(n, |i| {
            let k = key(i);
            if self.hi_open {
                k < self.hi
            } else {
                k <= self.hi
            }
        });
        (a, b.max(a))
    }
}

fn partition(n: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, n);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// A range of the form x-interval × y-interval × u-interval, where `u` is
/// the index orientation's normal coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range3 {
    pub x: Interval,
    pub y: Interval,
    pub u: Interval,
}

impl Range3 {
    fn of_region(q: &QueryRegion) -> Self {
        let u = match q.halfplane {
            None => Interval::ALL,
            Some(h) => {
                let c = h.offset();
                match h.side {
                    HalfplaneSide::LeftClosed => Interval {
                        lo: c,
                        ..Interval::ALL
                    },
                    HalfplaneSide::RightClosed => Interval {
                        hi: c,
                        ..Interval::ALL
                    },
                }
            }
        };
        Self {
            x: Interval::closed(q.xmin, q.xmax),
            y: Interval::closed(q.ymin, q.ymax),
            u,
        }
    }

    /// Pairwise disjoint ranges covering the complement of `q`: left of the
    /// box, right of it, below and above it within its x-span, and the box
    /// on the open far side of the halfplane.
    pub fn complement(q: &QueryRegion) -> Vec<Range3> {
        let xs = Interval::closed(q.xmin, q.xmax);
        let mut out = vec![
            Range3 {
                x: Interval::below(q.xmin),
                y: Interval::ALL,
                u: Interval::ALL,
            },
            Range3 {
                x: Interval::above(q.xmax),
                y: Interval::ALL,
                u: Interval::ALL,
            },
            Range3 {
                x: xs,
                y: Interval::below(q.ymin),
                u: Interval::ALL,
            },
            Range3 {
                x: xs,
                y: Interval::above(q.ymax),
                u: Interval::ALL,
            },
        ];
        if let Some(h) = q.halfplane {
            let c = h.offset();
            out.push(Range3 {
                x: xs,
                y: Interval::closed(q.ymin, q.ymax),
                u: match h.side {
                    HalfplaneSide::LeftClosed => Interval::below(c),
                    HalfplaneSide::RightClosed => Interval::above(c),
                },
            });
        }
        out
    }
}

/// One canonical node of a query: a level-3 node (or the level-3 root of a
/// level-2 node when the query has no halfplane).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CanonicalNode {
    chain: u32,
    lo: u32,
    hi: u32,
}

#[derive(Debug, Clone)]
pub struct PerimeterIndex {
    direction: Direction,
    points: Vec<Point>,
    u: Vec<f64>,
    /// Level 1: point indices sorted by (x, y).
    ord1: Vec<u32>,
    /// Per level-1 node: offset of its y-sorted indices in `l2_ids` and the
    /// global id of its level-2 root.
    l1_off: Vec<u32>,
    l1_base: Vec<u32>,
    l2_ids: Vec<u32>,
    /// Per global level-2 node: offset of its u-sorted indices in `l3_ids`,
    /// half the chain id of its level-3 root.
    l2_off: Vec<u32>,
    l3_ids: Vec<u32>,
    /// Chain of the level-3 node at each `l3_ids` slot pair; see `chain_id`.
    chains: Option<ChainArena>,
}

/// All node hulls, stored back to back.
#[derive(Debug, Clone, Default)]
struct ChainArena {
    vertices: Vec<Point>,
    prefix: Vec<f64>,
    ranges: Vec<(u32, u32)>,
}

impl ChainArena {
    fn push(&mut self, v: &[Point]) -> u32 {
        let start = self.vertices.len() as u32;
        self.vertices.extend_from_slice(v);
        self.prefix.extend(prefix_lengths(v));
        self.ranges.push((start, v.len() as u32));
        (self.ranges.len() - 1) as u32
    }

    fn view(&self, id: u32) -> ChainView<'_> {
        let (s, l) = self.ranges[id as usize];
        let r = s as usize..(s + l) as usize;
        ChainView {
            vertices: &self.vertices[r.clone()],
            prefix_len: &self.prefix[r],
        }
    }
}

fn visit_canonical(
    lo: usize,
    hi: usize,
    ql: usize,
    qr: usize,
    id: usize,
    out: &mut impl FnMut(usize, usize, usize),
) {
    if qr <= lo || hi <= ql || ql >= qr {
        return;
    }
    if ql <= lo && hi <= qr {
        out(id, lo, hi);
        return;
    }
    let mid = (lo + hi) / 2;
    visit_canonical(lo, mid, ql, qr, id + 1, out);
    visit_canonical(mid, hi, ql, qr, id + 2 * (mid - lo), out);
}

impl PerimeterIndex {
    /// Builds the index for halfplanes with boundary direction `direction`.
    pub fn build(points: &[Point], direction: Direction) -> Result<Self> {
        Self::build_inner(points, direction, true)
    }

    /// Same tree without hulls; enough for [`PerimeterIndex::decompose`].
    pub fn build_skeleton(points: &[Point], direction: Direction) -> Result<Self> {
        Self::build_inner(points, direction, false)
    }

    fn build_inner(points: &[Point], direction: Direction, with_chains: bool) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::EmptySet);
        }
        let pts = points.to_vec();
        let u: Vec<f64> = pts
            .iter()
            .map(|p| direction.normal_coord(p.x, p.y))
            .collect();
        let t: Vec<f64> = pts
            .iter()
            .map(|p| direction.along_coord(p.x, p.y))
            .collect();

        let mut ord1: Vec<u32> = (0..n as u32).collect();
        ord1.sort_by(|&a, &b| {
            let (p, q) = (&pts[a as usize], &pts[b as usize]);
            p.lex_cmp(q).then(a.cmp(&b))
        });
        let by_y = |a: &u32, b: &u32| {
            let (p, q) = (&pts[*a as usize], &pts[*b as usize]);
            p.y.total_cmp(&q.y).then(p.x.total_cmp(&q.x)).then(a.cmp(b))
        };
        let by_u = |a: &u32, b: &u32| {
            let (i, j) = (*a as usize, *b as usize);
            u[i].total_cmp(&u[j])
                .then(t[i].total_cmp(&t[j]))
                .then(a.cmp(b))
        };

        let mut idx = PerimeterIndex {
            direction,
            points: pts.clone(),
            u: u.clone(),
            ord1,
            l1_off: vec![0; 2 * n - 1],
            l1_base: vec![0; 2 * n - 1],
            l2_ids: Vec::new(),
            l2_off: Vec::new(),
            l3_ids: Vec::new(),
            chains: with_chains.then(ChainArena::default),
        };

        // Level 1 nodes in id order, each with its y-sorted point list.
        let mut stack = vec![(0usize, n, 0usize)];
        while let Some((lo, hi, id)) = stack.pop() {
            let mut ys: Vec<u32> = idx.ord1[lo..hi].to_vec();
            ys.sort_by(by_y);
            idx.l1_off[id] = idx.l2_ids.len() as u32;
            idx.l1_base[id] = idx.l2_off.len() as u32;
            idx.l2_ids.extend_from_slice(&ys);
            // Level 2 nodes of this level-1 node, in local id order.
            let m = ys.len();
            let first_l2 = idx.l2_off.len();
            idx.l2_off.resize(first_l2 + 2 * m - 1, 0);
            let mut stack2 = vec![(0usize, m, 0usize)];
            while let Some((l2lo, l2hi, l2id)) = stack2.pop() {
                let mut us: Vec<u32> = ys[l2lo..l2hi].to_vec();
                us.sort_by(by_u);
                let off = idx.l3_ids.len();
                idx.l2_off[first_l2 + l2id] = off as u32;
                idx.l3_ids.extend_from_slice(&us);
                if l2hi - l2lo > 1 {
                    let mid = (l2lo + l2hi) / 2;
                    stack2.push((mid, l2hi, l2id + 2 * (mid - l2lo)));
                    stack2.push((l2lo, mid, l2id + 1));
                }
            }
            if hi - lo > 1 {
                let mid = (lo + hi) / 2;
                stack.push((mid, hi, id + 2 * (mid - lo)));
                stack.push((lo, mid, id + 1));
            }
        }

        if let Some(arena) = idx.chains.as_mut() {
            // One chain per level-3 node; level-3 node `k` of the level-2
            // node at offset `off` gets chain id `2·off + k`.
            let total = 2 * idx.l3_ids.len();
            arena.ranges.reserve(total);
            let mut ranges = vec![(0u32, 0u32); total];
            let mut scratch: Vec<Point> = Vec::new();
            for g in 0..idx.l2_off.len() {
                let off = idx.l2_off[g] as usize;
                let m = if g + 1 < idx.l2_off.len() {
                    idx.l2_off[g + 1] as usize - off
                } else {
                    idx.l3_ids.len() - off
                };
                build_chains(
                    &idx.points,
                    &idx.l3_ids[off..off + m],
                    arena,
                    &mut ranges[2 * off..2 * off + 2 * m - 1],
                    &mut scratch,
                );
            }
            arena.ranges = ranges;
        }
        Ok(idx)
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Hull of the whole point set, as stored at the root.
    pub fn root_chain(&self) -> ChainView<'_> {
        self.chain(&CanonicalNode {
            chain: 0,
            lo: 0,
            hi: self.points.len() as u32,
        })
    }

    pub fn chain(&self, node: &CanonicalNode) -> ChainView<'_> {
        self.chains
            .as_ref()
            .expect("index built without hulls")
            .view(node.chain)
    }

    /// Points of a canonical node, as indices into the indexed point list.
    pub fn node_points(&self, node: &CanonicalNode) -> impl Iterator<Item = usize> + '_ {
        self.l3_ids[node.lo as usize..node.hi as usize]
            .iter()
            .map(|&i| i as usize)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    fn check(&self, q: &QueryRegion) -> Result<()> {
        match q.halfplane {
            Some(h) if h.direction != self.direction => Err(Error::WrongIndex),
            _ => Ok(()),
        }
    }

    /// Canonical nodes whose point sets partition the points inside `q`.
    pub fn decompose(&self, q: &QueryRegion) -> Result<Vec<CanonicalNode>> {
        self.check(q)?;
        let mut out = Vec::new();
        self.decompose_range(&Range3::of_region(q), q.halfplane.is_some(), &mut out);
        Ok(out)
    }

    /// Appends the canonical nodes of `r` to `out`. With `use_u` false the
    /// u-interval is ignored and each level-2 node contributes its root.
    pub fn decompose_range(&self, r: &Range3, use_u: bool, out: &mut Vec<CanonicalNode>) {
        let n = self.points.len();
        let (a, b) = r.x.index_range(n, |i| self.points[self.ord1[i] as usize].x);
        visit_canonical(0, n, a, b, 0, &mut |id1, lo1, hi1| {
            let m = hi1 - lo1;
            let off = self.l1_off[id1] as usize;
            let ys = &self.l2_ids[off..off + m];
            let (c, d) = r.y.index_range(m, |i| self.points[ys[i] as usize].y);
            let base = self.l1_base[id1] as usize;
            visit_canonical(0, m, c, d, 0, &mut |id2, lo2, hi2| {
                let k = hi2 - lo2;
                let off3 = self.l2_off[base + id2] as usize;
                if !use_u {
                    out.push(CanonicalNode {
                        chain: (2 * off3) as u32,
                        lo: off3 as u32,
                        hi: (off3 + k) as u32,
                    });
                    return;
                }
                let us = &self.l3_ids[off3..off3 + k];
                let (e, f) = r.u.index_range(k, |i| self.u[us[i] as usize]);
                visit_canonical(0, k, e, f, 0, &mut |id3, lo3, hi3| {
                    out.push(CanonicalNode {
                        chain: (2 * off3 + id3) as u32,
                        lo: (off3 + lo3) as u32,
                        hi: (off3 + hi3) as u32,
                    });
                });
            });
        });
    }

    fn merged_perimeter(&self, nodes: &[CanonicalNode]) -> f64 {
        if nodes.is_empty() {
            return 0.0;
        }
        let views: Vec<ChainView> = nodes.iter().map(|n| self.chain(n)).collect();
        hull_of_hulls_perimeter(&views).expect("nonempty node list")
    }

    /// Hull perimeter of the points inside `q`.
    pub fn per_inside(&self, q: &QueryRegion) -> Result<f64> {
        let nodes = self.decompose(q)?;
        Ok(self.merged_perimeter(&nodes))
    }

    /// Canonical nodes of the complement of `q`.
    pub fn decompose_outside(&self, q: &QueryRegion) -> Result<Vec<CanonicalNode>> {
        self.check(q)?;
        let mut nodes = Vec::new();
        for (k, r) in Range3::complement(q).iter().enumerate() {
            self.decompose_range(r, k == 4, &mut nodes);
        }
        Ok(nodes)
    }

    /// Hull perimeter of the points outside `q`.
    pub fn per_outside(&self, q: &QueryRegion) -> Result<f64> {
        let nodes = self.decompose_outside(q)?;
        Ok(self.merged_perimeter(&nodes))
    }
}

/// Fills `ranges[k]` with the hull of level-3 node `k` over `ids`.
fn build_chains(
    points: &[Point],
    ids: &[u32],
    arena: &mut ChainArena,
    ranges: &mut [(u32, u32)],
    scratch: &mut Vec<Point>,
) {
    // Post-order so both children exist before their parent.
    let m = ids.len();
    let mut stack: Vec<(usize, usize, usize, bool)> = vec![(0, m, 0, false)];
    while let Some((lo, hi, id, ready)) = stack.pop() {
        if hi - lo == 1 {
            let r = arena.push(&[points[ids[lo] as usize]]);
            ranges[id] = arena.ranges[r as usize];
            continue;
        }
        let mid = (lo + hi) / 2;
        let (left, right) = (id + 1, id + 2 * (mid - lo));
        if !ready {
            stack.push((lo, hi, id, true));
            stack.push((mid, hi, right, false));
            stack.push((lo, mid, left, false));
            continue;
        }
        scratch.clear();
        for c in [left, right] {
            let (s, l) = ranges[c];
            scratch.extend_from_slice(&arena.vertices[s as usize..(s + l) as usize]);
        }
        scratch.sort_by(|a, b| a.lex_cmp(b));
        let hull = hull_of_sorted(scratch);
        let r = arena.push(&hull);
        ranges[id] = arena.ranges[r as usize];
    }
}

/// Hull perimeters inside and outside `q`, by filtering.
pub fn per_direct(points: &[Point], q: &QueryRegion) -> (f64, f64) {
    let (inside, outside): (Vec<Point>, Vec<Point>) = points.iter().partition(|p| q.contains(p));
    (hull_perimeter(&inside), hull_perimeter(&outside))
}

/// One index per orientation class.
#[derive(Debug, Clone, Default)]
pub struct IndexSet {
    indexes: HashMap<Direction, PerimeterIndex>,
}

impl IndexSet {
    pub fn build(points: &[Point], directions: &[Direction], parallel: bool) -> Result<Self> {
        let built = crate::par::map(directions, parallel, |&d| PerimeterIndex::build(points, d));
        let mut indexes = HashMap::new();
        for (d, idx) in directions.iter().zip(built) {
            indexes.insert(*d, idx?);
        }
        Ok(Self { indexes })
    }

    pub fn get(&self, d: &Direction) -> Option<&PerimeterIndex> {
        self.indexes.get(d)
    }

    pub fn len(&self) -> usize {
        self.indexes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indexes.is_empty()
    }

    fn index_for(&self, q: &QueryRegion) -> Result<&PerimeterIndex> {
        match q.halfplane {
            Some(h) => self.indexes.get(&h.direction).ok_or(Error::WrongIndex),
            None => self.indexes.values().next().ok_or(Error::WrongIndex),
        }
    }

    pub fn per_inside(&self, q: &QueryRegion) -> Result<f64> {
        self.index_for(q)?.per_inside(q)
    }

    pub fn per_outside(&self, q: &QueryRegion) -> Result<f64> {
        self.index_for(q)?.per_outside(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candidates::halfplanes_with_count;
    use crate::hull::convex_hull;
    use crate::quadtree::Square;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid16() -> Vec<Point> {
        (0..16)
            .map(|i| Point::new((i % 4) as f64, (i / 4) as f64, i))
            .collect()
    }

    fn diag_halfplane() -> Halfplane {
        // y <= x
        Halfplane {
            anchor: [0., 0.],
            direction: Direction::reduced(1, 1),
            side: HalfplaneSide::RightClosed,
        }
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
    }

    fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point> {
        (0..n)
            .map(|i| Point::new(rng.gen::<f64>(), rng.gen::<f64>(), i))
            .collect()
    }

    fn random_query(rng: &mut ChaCha8Rng, dirs: &[Direction]) -> QueryRegion {
        let size = rng.gen_range(0.05..0.9);
        let sq = Square::new(rng.gen(), rng.gen(), size);
        let g = 9;
        let cands: Vec<Candidate> = halfplanes_with_count(sq, g)
            .filter(|c| dirs.contains(&c.halfplane.direction))
            .collect();
        QueryRegion::from_candidate(&cands[rng.gen_range(0..cands.len())])
    }

    #[test]
    fn single_point_index() {
        let pts = vec![Point::new(2., 3., 0)];
        let idx = PerimeterIndex::build(&pts, Direction::reduced(1, 0)).unwrap();
        assert_eq!(idx.root_chain().vertices, &pts[..]);
        assert_eq!(idx.per_inside(&QueryRegion::whole_plane()).unwrap(), 0.0);
        assert!(PerimeterIndex::build(&[], Direction::reduced(1, 0)).is_err());
    }

    #[test]
    fn grid_root_chain_and_whole_plane() {
        let idx = PerimeterIndex::build(&grid16(), Direction::reduced(1, 1)).unwrap();
        assert_eq!(idx.root_chain().perimeter(), 12.0);
        let nodes = idx.decompose(&QueryRegion::whole_plane()).unwrap();
        assert_eq!(nodes.len(), 1);
        assert_eq!(idx.per_inside(&QueryRegion::whole_plane()).unwrap(), 12.0);
    }

    #[test]
    fn grid_triangle_query() {
        let pts = grid16();
        let idx = PerimeterIndex::build(&pts, Direction::reduced(1, 1)).unwrap();
        let q = QueryRegion::rect(-0.5, -0.5, 1.5, 1.5).with_halfplane(diag_halfplane());
        let mut got: Vec<(f64, f64)> = idx
            .decompose(&q)
            .unwrap()
            .iter()
            .flat_map(|n| idx.node_points(n).collect::<Vec<_>>())
            .map(|i| (pts[i].x, pts[i].y))
            .collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got, vec![(0., 0.), (1., 0.), (1., 1.)]);
        let want = 2.0 + 2f64.sqrt();
        assert!(close(idx.per_inside(&q).unwrap(), want));
        let (inside, outside) = per_direct(&pts, &q);
        assert!(close(inside, want));
        assert!(close(idx.per_outside(&q).unwrap(), outside));
    }

    #[test]
    fn empty_query_and_whole_plane_direct() {
        let pts = grid16();
        let idx = PerimeterIndex::build(&pts, Direction::reduced(1, 0)).unwrap();
        let empty = QueryRegion::rect(10., 10., 11., 11.);
        assert_eq!(idx.per_inside(&empty).unwrap(), 0.0);
        assert_eq!(idx.per_outside(&empty).unwrap(), 12.0);
        assert_eq!(per_direct(&pts, &empty), (0.0, 12.0));
        assert_eq!(per_direct(&pts, &QueryRegion::whole_plane()), (12.0, 0.0));
    }

    #[test]
    fn wrong_orientation_is_rejected() {
        let idx = PerimeterIndex::build(&grid16(), Direction::reduced(1, 0)).unwrap();
        let q = QueryRegion::whole_plane().with_halfplane(diag_halfplane());
        assert_eq!(idx.per_inside(&q), Err(Error::WrongIndex));
        assert_eq!(idx.decompose(&q), Err(Error::WrongIndex));
    }

    #[test]
    fn two_clusters_outside() {
        let mut pts = Vec::new();
        for (k, &(x, y)) in [(0., 0.), (1., 0.), (1., 1.), (0., 1.)].iter().enumerate() {
            pts.push(Point::new(x, y, k));
            pts.push(Point::new(x + 100., y, k + 4));
        }
        let d = Direction::reduced(0, 1);
        let idx = PerimeterIndex::build(&pts, d).unwrap();
        let h = Halfplane {
            anchor: [50., 0.],
            direction: d,
            side: HalfplaneSide::RightClosed,
        };
        let q = QueryRegion::rect(99., -1., 102., 2.).with_halfplane(h);
        assert!(close(idx.per_outside(&q).unwrap(), 4.0));
        assert!(close(idx.per_inside(&q).unwrap(), 4.0));
    }

    #[test]
    fn every_node_chain_is_the_hull_of_its_subset() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let pts = random_points(&mut rng, 500);
        let idx = PerimeterIndex::build(&pts, Direction::reduced(3, -2)).unwrap();
        let arena = idx.chains.as_ref().unwrap();
        for g in 0..idx.l2_off.len() {
            let off = idx.l2_off[g] as usize;
            let m = if g + 1 < idx.l2_off.len() {
                idx.l2_off[g + 1] as usize - off
            } else {
                idx.l3_ids.len() - off
            };
            let check = |id: usize, lo: usize, hi: usize| {
                let subset: Vec<Point> = idx.l3_ids[off + lo..off + hi]
                    .iter()
                    .map(|&i| pts[i as usize])
                    .collect();
                let want = convex_hull(&subset).unwrap();
                let got = arena.view((2 * off + id) as u32);
                assert_eq!(got.vertices.len(), want.len());
                assert!(close(got.perimeter(), want.perimeter()));
            };
            // Walk every node of this level-3 tree.
            let mut stack = vec![(0usize, m, 0usize)];
            while let Some((lo, hi, id)) = stack.pop() {
                check(id, lo, hi);
                if hi - lo > 1 {
                    let mid = (lo + hi) / 2;
                    stack.push((lo, mid, id + 1));
                    stack.push((mid, hi, id + 2 * (mid - lo)));
                }
            }
        }
    }

    #[test]
    fn random_queries_match_direct_filtering() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for round in 0..20 {
            let n = rng.gen_range(1..400);
            let pts = random_points(&mut rng, n);
            let dirs = crate::candidates::orientation_classes_for(9);
            let d = dirs[round % dirs.len()];
            let idx = PerimeterIndex::build(&pts, d).unwrap();
            for _ in 0..100 {
                let q = random_query(&mut rng, &[d]);
                let nodes = idx.decompose(&q).unwrap();
                let mut members: Vec<usize> = nodes
                    .iter()
                    .flat_map(|n| idx.node_points(n).collect::<Vec<_>>())
                    .collect();
                members.sort_unstable();
                let want: Vec<usize> = (0..n).filter(|&i| q.contains(&pts[i])).collect();
                assert_eq!(members, want, "canonical subsets must tile the query");
                let (inside, outside) = per_direct(&pts, &q);
                assert!(close(idx.per_inside(&q).unwrap(), inside));
                assert!(close(idx.per_outside(&q).unwrap(), outside));
            }
        }
    }

    #[test]
    fn complement_ranges_tile_the_plane() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let dirs = crate::candidates::orientation_classes_for(9);
        for _ in 0..200 {
            let q = random_query(&mut rng, &dirs);
            let ranges = Range3::complement(&q);
            let h = q.halfplane.unwrap();
            for _ in 0..200 {
                let p = Point::new(rng.gen_range(-0.5..1.5), rng.gen_range(-0.5..1.5), 0);
                let u = h.direction.normal_coord(p.x, p.y);
                let hits = ranges
                    .iter()
                    .filter(|r| r.x.contains(p.x) && r.y.contains(p.y) && r.u.contains(u))
                    .count();
                assert_eq!(hits + q.contains(&p) as usize, 1);
            }
        }
    }

    #[test]
    fn index_set_dispatches_by_direction() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let pts = random_points(&mut rng, 120);
        let dirs = crate::candidates::orientation_classes_for(5);
        let set = IndexSet::build(&pts, &dirs, false).unwrap();
        assert_eq!(set.len(), dirs.len());
        for _ in 0..200 {
            let q = random_query(&mut rng, &dirs);
            let (inside, outside) = per_direct(&pts, &q);
            assert!(close(set.per_inside(&q).unwrap(), inside));
            assert!(close(set.per_outside(&q).unwrap(), outside));
        }
        let stray = QueryRegion::whole_plane().with_halfplane(Halfplane {
            anchor: [0., 0.],
            direction: Direction::reduced(7, 5),
            side: HalfplaneSide::LeftClosed,
        });
        assert_eq!(set.per_inside(&stray), Err(Error::WrongIndex));
    }

    #[test]
    fn skeleton_decomposes_like_full_index() {
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        let pts = random_points(&mut rng, 300);
        let d = crate::candidates::orientation_classes_for(9)[3];
        let full = PerimeterIndex::build(&pts, d).unwrap();
        let bare = PerimeterIndex::build_skeleton(&pts, d).unwrap();
        for _ in 0..50 {
            let q = random_query(&mut rng, &[d]);
            assert_eq!(full.decompose(&q).unwrap(), bare.decompose(&q).unwrap());
        }
    }
}
