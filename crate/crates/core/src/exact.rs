//! Exact minimum perimeter-sum bipartition.
//!
//! Three branches, all run, pure minimum:
//! a sweep over seven line orientations, removal of a single hull vertex,
//! and a candidate branch over (expanded base square, grid halfplane) pairs.
//!
//! The candidate branch prunes with a lower bound. For a candidate subset
//! `S` and any `A ⊆ P`, `per(S) + per(P∖S) ≥ per(A∩S) + per(A∖S)`. `A` is the
//! union of the first few convex layers, so the bound only depends on which
//! layer points a candidate captures and is memoized on that signature.
//! Survivors are evaluated exactly. When `S` misses the innermost peeled
//! layer, every deeper point stays inside `hull(A∖S)`, so
//! `per(P∖S) = per(A∖S)`.

use std::f64::consts::PI;
use std::time::Instant;

use serde::Serialize;

use rustc_hash::FxHashMap;

use crate::candidates::{
    grid_lines, Backend, Candidate, Direction, GridLine, Halfplane, HalfplaneSide, SolverConfig,
};
use crate::error::{Error, Result};
use crate::geometry::{dedup_locations, orient, rotate, Orientation, Point};
use crate::hull::{cycle_length, hull_of_sorted, hull_perimeter};
use crate::par;
use crate::partition::{Partition, Provenance, TIE_REL};
use crate::perimeter_query::{IndexSet, QueryRegion};
use crate::quadtree::{expand, Quadtree, Square};

/// Number of convex layers peeled for the candidate lower bound.
const LAYERS: u32 = 4;
/// Relative slack on the pruning threshold.
const PRUNE_SLACK: f64 = 1e-9;
/// Largest input for which the range-tree backend is considered.
pub const RANGE_TREE_MAX_N: usize = 1 << 13;

/// Perimeter of every prefix `{p : p.x ≤ x_i}` of points sorted by x.
/// Points sharing an x value get the value of the whole group.
pub fn prefix_hull_lengths(points: &[Point]) -> Result<Vec<f64>> {
    if points.windows(2).any(|w| w[1].x < w[0].x) {
        return Err(Error::NotSorted);
    }
    let mut out = vec![0.0; points.len()];
    let mut lower = Chain::new(Orientation::Left);
    let mut upper = Chain::new(Orientation::Right);
    let mut group: Vec<Point> = Vec::new();
    let mut s = 0;
    while s < points.len() {
        let mut e = s + 1;
        while e < points.len() && points[e].x == points[s].x {
            e += 1;
        }
        group.clear();
        group.extend_from_slice(&points[s..e]);
        group.sort_by(|a, b| a.y.total_cmp(&b.y));
        for p in &group {
            lower.push(*p);
            upper.push(*p);
        }
        let v = lower.len + upper.len;
        out[s..e].fill(v);
        s = e;
    }
    Ok(out)
}

/// One monotone hull chain with its running length.
struct Chain {
    keep: Orientation,
    stack: Vec<Point>,
    len: f64,
}

impl Chain {
    fn new(keep: Orientation) -> Self {
        Self {
            keep,
            stack: Vec::new(),
            len: 0.0,
        }
    }

    fn push(&mut self, p: Point) {
        if self.stack.last().is_some_and(|q| q.same_pos(&p)) {
            return;
        }
        while self.stack.len() >= 2 {
            let k = self.stack.len();
            if orient(&self.stack[k - 2], &self.stack[k - 1], &p) == self.keep {
                break;
            }
            self.len -= self.stack[k - 2].dist(&self.stack[k - 1]);
            self.stack.pop();
        }
        if let Some(q) = self.stack.last() {
            self.len += q.dist(&p);
        }
        self.stack.push(p);
    }
}

/// A branch result over deduplicated locations.
#[derive(Debug, Clone)]
struct Split {
    cost: f64,
    side: Vec<usize>,
    provenance: Provenance,
}

/// Distinct locations of the input, lexicographically sorted, with the
/// input ids found at each.
struct Locations {
    pts: Vec<Point>,
    groups: Vec<Vec<usize>>,
}

impl Locations {
    fn new(points: &[Point]) -> Self {
        let (reps, groups) = dedup_locations(points);
        let pts = reps
            .iter()
            .enumerate()
            .map(|(k, p)| Point::new(p.x, p.y, k))
            .collect();
        Self { pts, groups }
    }

    fn lift(&self, split: &Split) -> Partition {
        let mut mask = vec![false; self.pts.len()];
        for &k in &split.side {
            mask[k] = true;
        }
        let (mut a, mut b) = (Vec::new(), Vec::new());
        let (mut pa, mut pb) = (Vec::new(), Vec::new());
        for (k, g) in self.groups.iter().enumerate() {
            if mask[k] {
                a.extend_from_slice(g);
                pa.push(self.pts[k]);
            } else {
                b.extend_from_slice(g);
                pb.push(self.pts[k]);
            }
        }
        Partition::new(
            a,
            b,
            hull_perimeter(&pa),
            hull_perimeter(&pb),
            split.provenance.clone(),
        )
    }

    /// Lower cost wins; near-ties go to the smaller lifted `left_ids`.
    fn better(&self, a: &Split, b: &Split) -> bool {
        let scale = a.cost.abs().max(b.cost.abs()).max(f64::MIN_POSITIVE);
        if (a.cost - b.cost).abs() > TIE_REL * scale {
            return a.cost < b.cost;
        }
        self.lift(a).left_ids < self.lift(b).left_ids
    }

    fn min(&self, a: Option<Split>, b: Option<Split>) -> Option<Split> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(a), Some(b)) => Some(if self.better(&b, &a) { b } else { a }),
        }
    }
}

fn check_input(points: &[Point]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints(points.len()));
    }
    if let Some(i) = points
        .iter()
        .position(|p| !p.x.is_finite() || !p.y.is_finite())
    {
        return Err(Error::NonFinite(i));
    }
    Ok(())
}

fn coincident(points: &[Point], provenance: Provenance) -> Partition {
    let mut ids: Vec<usize> = points.iter().map(|p| p.id).collect();
    ids.sort_unstable();
    let first = ids.remove(0);
    Partition::new(vec![first], ids, 0.0, 0.0, provenance)
}

/// Best split by a line of orientation `j·π/7` (plus a right angle), over
/// `j = 0..7`. Points with equal projection stay together.
pub fn best_canonical_orientation_split(points: &[Point]) -> Result<Partition> {
    check_input(points)?;
    let locs = Locations::new(points);
    if locs.pts.len() == 1 {
        return Ok(coincident(
            points,
            Provenance::CanonicalOrientation { j: 0 },
        ));
    }
    let s = sweep(&locs).expect("two distinct locations");
    Ok(locs.lift(&s))
}

fn sweep(locs: &Locations) -> Option<Split> {
    let n = locs.pts.len();
    let mut best: Option<Split> = None;
    for j in 0..7 {
        let mut r = rotate(&locs.pts, -(j as f64) * PI / 7.0);
        r.sort_by(|a, b| a.lex_cmp(b));
        let pre = prefix_hull_lengths(&r).expect("sorted");
        let mirrored: Vec<Point> = r
            .iter()
            .rev()
            .map(|p| Point::new(-p.x, p.y, p.id))
            .collect();
        let suf_rev = prefix_hull_lengths(&mirrored).expect("sorted");
        let mut splits: Vec<(f64, usize)> = Vec::new();
        for i in 0..n - 1 {
            if r[i].x < r[i + 1].x {
                splits.push((pre[i] + suf_rev[n - 2 - i], i));
            }
        }
        let Some(lo) = splits.iter().map(|s| s.0).min_by(f64::total_cmp) else {
            continue;
        };
        for &(c, i) in &splits {
            if c - lo <= TIE_REL * lo.abs().max(f64::MIN_POSITIVE) {
                let cand = Split {
                    cost: c,
                    side: r[..=i].iter().map(|p| p.id).collect(),
                    provenance: Provenance::CanonicalOrientation { j },
                };
                best = locs.min(best, Some(cand));
            }
        }
    }
    best
}

/// Best partition `({p}, P∖{p})`. Only hull vertices can win; each removal
/// is priced from the points in the triangle spanned by the vertex and its
/// two hull neighbors.
pub fn best_singleton_removal(points: &[Point]) -> Result<Partition> {
    check_input(points)?;
    let locs = Locations::new(points);
    if locs.pts.len() == 1 {
        return Ok(coincident(points, Provenance::Singleton));
    }
    let s = singleton(&locs);
    Ok(locs.lift(&s))
}

fn singleton(locs: &Locations) -> Split {
    let pts = &locs.pts;
    let hull = hull_of_sorted(pts);
    let m = hull.len();
    let per_all = cycle_length(&hull);
    let mut costs: Vec<(f64, usize)> = Vec::with_capacity(m);
    if m <= 3 {
        for v in &hull {
            let rest: Vec<Point> = pts.iter().filter(|p| p.id != v.id).copied().collect();
            costs.push((hull_perimeter(&rest), v.id));
        }
    } else {
        let inside = triangle_members(pts, &hull);
        for i in 0..m {
            let (a, v, b) = (hull[(i + m - 1) % m], hull[i], hull[(i + 1) % m]);
            let mut tri: Vec<Point> = vec![a, b];
            tri.extend(inside[i].iter().map(|&k| pts[k]));
            let c = per_all - a.dist(&v) - v.dist(&b) + hull_perimeter(&tri) - a.dist(&b);
            costs.push((c, v.id));
        }
    }
    let lo = costs.iter().map(|c| c.0).min_by(f64::total_cmp).unwrap();
    let mut best: Option<Split> = None;
    for &(c, k) in &costs {
        if c - lo <= TIE_REL * lo.abs().max(f64::MIN_POSITIVE) {
            let cand = Split {
                cost: c,
                side: vec![k],
                provenance: Provenance::Singleton,
            };
            best = locs.min(best, Some(cand));
        }
    }
    best.unwrap()
}

/// For each hull vertex `v_i`, the non-vertex points on `v_i`'s side of the
/// chord `v_{i-1} v_{i+1}` (closed). Needs at least four hull vertices.
fn triangle_members(pts: &[Point], hull: &[Point]) -> Vec<Vec<usize>> {
    let m = hull.len();
    let mut is_vertex = vec![false; pts.len()];
    for v in hull {
        is_vertex[v.id] = true;
    }
    let cx = hull.iter().map(|p| p.x).sum::<f64>() / m as f64;
    let cy = hull.iter().map(|p| p.y).sum::<f64>() / m as f64;
    let c = Point::new(cx, cy, usize::MAX);
    let in_tri = |i: usize, p: &Point| {
        orient(&hull[(i + m - 1) % m], &hull[(i + 1) % m], p) != Orientation::Left
    };
    // Triangles holding the reference point are scanned in full.
    let bad: Vec<bool> = (0..m).map(|i| in_tri(i, &c)).collect();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); m];
    for i in (0..m).filter(|&i| bad[i]) {
        out[i] = pts
            .iter()
            .filter(|p| !is_vertex[p.id] && in_tri(i, p))
            .map(|p| p.id)
            .collect();
    }
    let theta0 = (hull[0].y - cy).atan2(hull[0].x - cx);
    let rel = |p: &Point| ((p.y - cy).atan2(p.x - cx) - theta0).rem_euclid(2.0 * PI);
    let rels: Vec<f64> = hull.iter().map(rel).collect();
    for p in pts.iter().filter(|p| !is_vertex[p.id]) {
        let r = rel(p);
        let k = rels.partition_point(|&t| t <= r).max(1) - 1;
        let mut seen = [usize::MAX; 4];
        for (s, d) in [m - 1, 0, 1, 2].into_iter().enumerate() {
            let i = (k + d) % m;
            if bad[i] || seen.contains(&i) {
                continue;
            }
            seen[s] = i;
            if in_tri(i, p) {
                out[i].push(p.id);
            }
        }
    }
    out
}

/// What the candidate branch did.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct CandidateStats {
    pub grid: usize,
    pub squares: usize,
    pub squares_scanned: usize,
    pub candidates: u64,
    pub survivors: u64,
    pub evaluated: u64,
    pub backend: Option<Backend>,
}

/// Wall time per branch, in milliseconds.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct Timings {
    pub sweep_ms: f64,
    pub singleton_ms: f64,
    pub candidates_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ExactReport {
    pub partition: Partition,
    pub timings: Timings,
    /// One entry per grid size tried.
    pub rounds: Vec<CandidateStats>,
}

/// Shared read-only state of the candidate branch.
struct Ctx<'a> {
    locs: &'a Locations,
    pts: &'a [Point],
    /// Hull vertices in lexicographic order.
    hull_lex: Vec<usize>,
    /// Convex layer (1-based) of each location, 0 below the peeled layers.
    layer: Vec<u32>,
    /// Peeled layer points, in lexicographic order.
    a: Vec<usize>,
    /// Whether the peeled layers hold every location.
    a_is_all: bool,
    squares: Vec<Square>,
}

impl<'a> Ctx<'a> {
    fn new(locs: &'a Locations) -> Self {
        let pts = &locs.pts[..];
        let n = pts.len();
        let mut layer = vec![0u32; n];
        let mut rest: Vec<Point> = pts.to_vec();
        let mut hull_lex = Vec::new();
        for k in 1..=LAYERS {
            if rest.is_empty() {
                break;
            }
            let h = hull_of_sorted(&rest);
            if k == 1 {
                hull_lex = h.iter().map(|p| p.id).collect();
            }
            for p in &h {
                layer[p.id] = k;
            }
            rest.retain(|p| layer[p.id] == 0);
        }
        let a: Vec<usize> = (0..n).filter(|&i| layer[i] != 0).collect();
        let a_is_all = rest.is_empty();
        hull_lex.sort_unstable();
        let mut squares: Vec<Square> = Quadtree::build(pts)
            .map(|t| t.base_squares())
            .unwrap_or_default()
            .iter()
            .map(expand)
            .collect();
        squares.sort_by(|s, t| {
            (s.center[0], s.center[1], s.size)
                .partial_cmp(&(t.center[0], t.center[1], t.size))
                .unwrap()
        });
        squares.dedup();
        Self {
            locs,
            pts,
            hull_lex,
            layer,
            a,
            a_is_all,
            squares,
        }
    }

    /// Locations inside the closed square, in lexicographic order.
    fn in_square(&self, sq: &Square) -> Vec<usize> {
        let (x0, _, x1, _) = sq.bounds();
        let lo = self.pts.partition_point(|p| p.x < x0);
        let hi = self.pts.partition_point(|p| p.x <= x1);
        (lo..hi)
            .filter(|&i| sq.contains(self.pts[i].x, self.pts[i].y))
            .collect()
    }

    fn perimeter_of(&self, idx: impl Iterator<Item = usize>) -> f64 {
        self.perimeter_buf(&mut Vec::new(), idx)
    }

    fn perimeter_buf(&self, buf: &mut Vec<Point>, idx: impl Iterator<Item = usize>) -> f64 {
        buf.clear();
        buf.extend(idx.map(|i| self.pts[i]));
        cycle_length(&hull_of_sorted(buf))
    }

    /// Exact `per(S) + per(P∖S)`, with `s` sorted.
    fn exact_cost(&self, s: &[usize], mark: &mut [bool]) -> f64 {
        for &i in s {
            mark[i] = true;
        }
        let deep_hit = !self.a_is_all && s.iter().any(|&i| self.layer[i] == LAYERS);
        let out = if deep_hit {
            self.perimeter_of((0..self.pts.len()).filter(|&i| !mark[i]))
        } else {
            self.perimeter_of(self.a.iter().copied().filter(|&i| !mark[i]))
        };
        for &i in s {
            mark[i] = false;
        }
        self.perimeter_of(s.iter().copied()) + out
    }
}

/// Outcome of the first pass over one square.
struct Scan {
    survivors: Vec<Candidate>,
    candidates: u64,
    members: usize,
}

/// Sets bit `b` of `sig` for each `us[b]` on the kept side of `off`.
fn side_bits(us: &[f64], off: f64, side: HalfplaneSide, sig: &mut Vec<u64>) {
    sig.clear();
    sig.resize(us.len().div_ceil(64).max(1), 0);
    match side {
        HalfplaneSide::LeftClosed => {
            for (b, &u) in us.iter().enumerate() {
                sig[b / 64] |= ((u >= off) as u64) << (b % 64);
            }
        }
        HalfplaneSide::RightClosed => {
            for (b, &u) in us.iter().enumerate() {
                sig[b / 64] |= ((u <= off) as u64) << (b % 64);
            }
        }
    }
}

fn bit(sig: &[u64], b: usize) -> bool {
    sig[b / 64] >> (b % 64) & 1 == 1
}

/// `per(inside) + per(all ∖ inside)` for sorted index lists.
fn split_bound(ctx: &Ctx, buf: &mut Vec<Point>, inside: &[usize], all: &[usize]) -> f64 {
    let mut k = 0;
    let outside = all.iter().copied().filter(|&i| {
        while k < inside.len() && inside[k] < i {
            k += 1;
        }
        !(k < inside.len() && inside[k] == i)
    });
    let out = ctx.perimeter_buf(buf, outside);
    out + ctx.perimeter_buf(buf, inside.iter().copied())
}

fn scan_square(ctx: &Ctx, sq: &Square, lines: &[GridLine], grid: usize, thr: f64) -> Option<Scan> {
    let prune = thr.is_finite();
    let inside_sq = |i: &usize| sq.contains(ctx.pts[*i].x, ctx.pts[*i].y);
    let v_in: Vec<usize> = ctx.hull_lex.iter().copied().filter(inside_sq).collect();
    if prune && v_in.is_empty() {
        return None;
    }
    let members = ctx.in_square(sq);
    if members.is_empty() {
        return None;
    }
    let mut scan = Scan {
        survivors: Vec::new(),
        candidates: 0,
        members: members.len(),
    };
    if !prune {
        for l in lines {
            for c in l.candidates(*sq, grid) {
                scan.candidates += 1;
                scan.survivors.push(c);
            }
        }
        return Some(scan);
    }
    let r_in: Vec<usize> = ctx
        .a
        .iter()
        .copied()
        .filter(|i| ctx.layer[*i] != 1 && inside_sq(i))
        .collect();
    let limit = thr * (1.0 + PRUNE_SLACK);
    let mut memo_v: FxHashMap<Vec<u64>, f64> = FxHashMap::default();
    let mut memo_a: FxHashMap<(Vec<u64>, Vec<u64>), f64> = FxHashMap::default();
    let (mut uv, mut ur) = (Vec::new(), Vec::new());
    let (mut sig_v, mut sig_r) = (Vec::new(), Vec::new());
    let (mut inside, mut buf) = (Vec::new(), Vec::new());
    for l in lines {
        let d = l.direction;
        let anchor = l.anchor_on(sq, grid);
        let off = d.normal_coord(anchor[0], anchor[1]);
        uv.clear();
        uv.extend(
            v_in.iter()
                .map(|&i| d.normal_coord(ctx.pts[i].x, ctx.pts[i].y)),
        );
        ur.clear();
        let sides: &[HalfplaneSide] = match l.only {
            Some(HalfplaneSide::LeftClosed) => &[HalfplaneSide::LeftClosed],
            Some(HalfplaneSide::RightClosed) => &[HalfplaneSide::RightClosed],
            None => &[HalfplaneSide::LeftClosed, HalfplaneSide::RightClosed],
        };
        for &side in sides {
            scan.candidates += 1;
            side_bits(&uv, off, side, &mut sig_v);
            // Without a hull vertex the cost is at least per(P) ≥ thr.
            if sig_v.iter().all(|&w| w == 0) {
                continue;
            }
            let lb_v = match memo_v.get(&sig_v) {
                Some(&v) => v,
                None => {
                    inside.clear();
                    inside.extend((0..v_in.len()).filter(|&b| bit(&sig_v, b)).map(|b| v_in[b]));
                    let v = split_bound(ctx, &mut buf, &inside, &ctx.hull_lex);
                    memo_v.insert(sig_v.clone(), v);
                    v
                }
            };
            if lb_v > limit {
                continue;
            }
            if ur.is_empty() && !r_in.is_empty() {
                ur.extend(
                    r_in.iter()
                        .map(|&i| d.normal_coord(ctx.pts[i].x, ctx.pts[i].y)),
                );
            }
            side_bits(&ur, off, side, &mut sig_r);
            let key = (sig_v.clone(), sig_r.clone());
            let lb = match memo_a.get(&key) {
                Some(&v) => v,
                None => {
                    inside.clear();
                    inside.extend((0..v_in.len()).filter(|&b| bit(&sig_v, b)).map(|b| v_in[b]));
                    inside.extend((0..r_in.len()).filter(|&b| bit(&sig_r, b)).map(|b| r_in[b]));
                    inside.sort_unstable();
                    let v = split_bound(ctx, &mut buf, &inside, &ctx.a);
                    memo_a.insert(key, v);
                    v
                }
            };
            if lb <= limit {
                scan.survivors.push(Candidate {
                    square: *sq,
                    halfplane: Halfplane {
                        anchor,
                        direction: d,
                        side,
                    },
                });
            }
        }
    }
    Some(scan)
}

fn evaluate_direct(ctx: &Ctx, sq: &Square, survivors: &[Candidate]) -> Option<Split> {
    let n = ctx.pts.len();
    let members = ctx.in_square(sq);
    let mut memo: FxHashMap<Vec<usize>, ()> = FxHashMap::default();
    let mut mark = vec![false; n];
    let mut best: Option<Split> = None;
    for c in survivors {
        let s: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&i| c.halfplane.contains(ctx.pts[i].x, ctx.pts[i].y))
            .collect();
        if s.is_empty() || s.len() == n || memo.contains_key(&s) {
            continue;
        }
        let cost = ctx.exact_cost(&s, &mut mark);
        memo.insert(s.clone(), ());
        let cand = Split {
            cost,
            side: s,
            provenance: Provenance::Candidate {
                square: c.square,
                halfplane: c.halfplane,
            },
        };
        best = ctx.locs.min(best, Some(cand));
    }
    best
}

fn evaluate_range_tree(
    ctx: &Ctx,
    survivors: &[Candidate],
    parallel: bool,
) -> Result<Option<Split>> {
    let n = ctx.pts.len();
    let mut dirs: Vec<Direction> = survivors.iter().map(|c| c.halfplane.direction).collect();
    dirs.sort_by_key(|d| (d.dx, d.dy));
    dirs.dedup();
    let set = IndexSet::build(ctx.pts, &dirs, parallel)?;
    let chunks: Vec<&[Candidate]> = survivors.chunks(256).collect();
    let results = par::map(&chunks, parallel, |chunk| -> Result<Option<Split>> {
        let mut best: Option<Split> = None;
        for c in chunk.iter() {
            let q = QueryRegion::from_candidate(c);
            let idx = set.get(&c.halfplane.direction).ok_or(Error::WrongIndex)?;
            let nodes = idx.decompose(&q)?;
            let count: usize = nodes.iter().map(|nd| idx.node_points(nd).count()).sum();
            if count == 0 || count == n {
                continue;
            }
            let cost = idx.per_inside(&q)? + idx.per_outside(&q)?;
            let mut side: Vec<usize> = nodes.iter().flat_map(|nd| idx.node_points(nd)).collect();
            side.sort_unstable();
            let cand = Split {
                cost,
                side,
                provenance: Provenance::Candidate {
                    square: c.square,
                    halfplane: c.halfplane,
                },
            };
            best = ctx.locs.min(best, Some(cand));
        }
        Ok(best)
    });
    let mut best = None;
    for r in results {
        best = ctx.locs.min(best, r?);
    }
    Ok(best)
}

/// Picks the cheaper backend from rough operation counts.
fn choose_backend(n: usize, dirs: usize, survivors: u64, direct_work: u64) -> Backend {
    if n > RANGE_TREE_MAX_N {
        return Backend::Direct;
    }
    let lg = (n as f64).log2() + 1.0;
    let build = dirs as f64 * n as f64 * lg.powi(3) * 4.0;
    let query = survivors as f64 * lg.powi(4) * 8.0;
    if build + query < direct_work as f64 {
        Backend::RangeTree
    } else {
        Backend::Direct
    }
}

/// One run of the candidate branch at grid size `grid`. With a finite
/// `thr`, candidates whose lower bound exceeds it are skipped.
fn candidate_round(
    ctx: &Ctx,
    cfg: &SolverConfig,
    grid: usize,
    thr: f64,
) -> Result<(Option<Split>, CandidateStats)> {
    let lines: Vec<GridLine> = grid_lines(grid).collect();
    let scans = par::map(&ctx.squares, cfg.parallel, |sq| {
        scan_square(ctx, sq, &lines, grid, thr)
    });
    let mut stats = CandidateStats {
        grid,
        squares: ctx.squares.len(),
        ..Default::default()
    };
    let mut direct_work = 0u64;
    let mut dirs: Vec<Direction> = Vec::new();
    for s in scans.iter().flatten() {
        stats.squares_scanned += 1;
        stats.candidates += s.candidates;
        stats.survivors += s.survivors.len() as u64;
        direct_work += (s.survivors.len() * (s.members + ctx.a.len())) as u64;
        dirs.extend(s.survivors.iter().map(|c| c.halfplane.direction));
    }
    dirs.sort_by_key(|d| (d.dx, d.dy));
    dirs.dedup();
    let backend = match cfg.backend {
        Backend::Auto => choose_backend(ctx.pts.len(), dirs.len(), stats.survivors, direct_work),
        b => b,
    };
    stats.backend = Some(backend);
    if stats.survivors == 0 {
        return Ok((None, stats));
    }
    stats.evaluated = stats.survivors;
    let best = match backend {
        Backend::RangeTree => {
            let all: Vec<Candidate> = scans
                .into_iter()
                .flatten()
                .flat_map(|s| s.survivors)
                .collect();
            evaluate_range_tree(ctx, &all, cfg.parallel)?
        }
        _ => {
            let jobs: Vec<(usize, Vec<Candidate>)> = scans
                .into_iter()
                .enumerate()
                .filter_map(|(k, s)| {
                    s.filter(|s| !s.survivors.is_empty())
                        .map(|s| (k, s.survivors))
                })
                .collect();
            let found = par::map(&jobs, cfg.parallel, |(k, c)| {
                evaluate_direct(ctx, &ctx.squares[*k], c)
            });
            found.into_iter().fold(None, |acc, s| ctx.locs.min(acc, s))
        }
    };
    Ok((best, stats))
}

/// Best candidate partition at the configured grid, without pruning.
/// `None` when no candidate splits the input into two nonempty parts.
pub fn evaluate_candidates(points: &[Point], cfg: &SolverConfig) -> Result<Option<Partition>> {
    check_input(points)?;
    cfg.validate()?;
    let locs = Locations::new(points);
    if locs.pts.len() == 1 {
        return Ok(None);
    }
    let ctx = Ctx::new(&locs);
    let (best, _) = candidate_round(&ctx, cfg, cfg.grid_count(), f64::INFINITY)?;
    Ok(best.map(|s| locs.lift(&s)))
}

pub fn solve_exact(points: &[Point], cfg: &SolverConfig) -> Result<Partition> {
    solve_exact_report(points, cfg).map(|r| r.partition)
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// [`solve_exact`] with branch timings and candidate statistics.
pub fn solve_exact_report(points: &[Point], cfg: &SolverConfig) -> Result<ExactReport> {
    check_input(points)?;
    cfg.validate()?;
    let start = Instant::now();
    let locs = Locations::new(points);
    let mut timings = Timings::default();
    if locs.pts.len() == 1 {
        timings.total_ms = ms(start);
        return Ok(ExactReport {
            partition: coincident(points, Provenance::Singleton),
            timings,
            rounds: Vec::new(),
        });
    }
    let t = Instant::now();
    let swept = sweep(&locs);
    timings.sweep_ms = ms(t);
    let t = Instant::now();
    let single = singleton(&locs);
    timings.singleton_ms = ms(t);
    let mut best = locs.min(swept, Some(single)).unwrap();

    let t = Instant::now();
    let mut rounds = Vec::new();
    if locs.pts.len() > 2 {
        let ctx = Ctx::new(&locs);
        let mut grid = cfg.grid_count();
        let mut round = 0;
        loop {
            let before = best.cost;
            let (found, stats) = candidate_round(&ctx, cfg, grid, best.cost)?;
            rounds.push(stats);
            if let Some(f) = found {
                if locs.better(&f, &best) {
                    best = f;
                }
            }
            let stable = before - best.cost <= TIE_REL * before.abs().max(f64::MIN_POSITIVE);
            if (round > 0 && stable) || round >= cfg.refinement {
                break;
            }
            round += 1;
            grid *= 2;
        }
    }
    timings.candidates_ms = ms(t);
    timings.total_ms = ms(start);
    Ok(ExactReport {
        partition: locs.lift(&best),
        timings,
        rounds,
    })
}
