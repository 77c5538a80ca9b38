//! Compressed quadtree over normalized points and the base squares derived
//! from it.
//!
//! Points are mapped into `[0.25, 0.75]²` and then onto a `2^52` integer
//! grid, so every canonical square is an exact integer box and the smallest
//! canonical square of two points comes from the highest differing bit.

use serde::{Deserialize, Serialize};

use crate::geometry::{bounding_box, Point};

pub const LEVEL_CAP: u32 = 52;
const GRID: f64 = (1u64 << LEVEL_CAP) as f64;

/// Free axis-parallel square: center and edge length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Square {
    pub center: [f64; 2],
    pub size: f64,
}

impl Square {
    pub fn new(cx: f64, cy: f64, size: f64) -> Self {
        Self {
            center: [cx, cy],
            size,
        }
    }

    /// Smallest square centered on the bounding box of the two given boxes
    /// `(xmin, ymin, xmax, ymax)`.
    pub fn enclosing(a: (f64, f64, f64, f64), b: (f64, f64, f64, f64)) -> Self {
        let (x0, y0) = (a.0.min(b.0), a.1.min(b.1));
        let (x1, y1) = (a.2.max(b.2), a.3.max(b.3));
        Self::new((x0 + x1) / 2.0, (y0 + y1) / 2.0, (x1 - x0).max(y1 - y0))
    }

    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        let h = self.size / 2.0;
        (
            self.center[0] - h,
            self.center[1] - h,
            self.center[0] + h,
            self.center[1] + h,
        )
    }

    /// Closed containment.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (x0, y0, x1, y1) = self.bounds();
        x0 <= x && x <= x1 && y0 <= y && y <= y1
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.center[0], self.center[1], self.size * factor)
    }
}

/// Enlarges a square about its center by `1 + 2/c1` with `c1 = 1/4`.
pub fn expand(sq: &Square) -> Square {
    sq.scaled(9.0)
}

/// Translation and uniform scaling from input coordinates into
/// `[0.25, 0.75]²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub xmin: f64,
    pub ymin: f64,
    pub scale: f64,
    /// All input points coincide; `scale` is then 1.
    pub degenerate: bool,
}

impl Normalization {
    pub fn forward(&self, x: f64, y: f64) -> (f64, f64) {
        (
            (x - self.xmin) * self.scale + 0.25,
            (y - self.ymin) * self.scale + 0.25,
        )
    }

    pub fn inverse(&self, u: f64, v: f64) -> (f64, f64) {
        (
            (u - 0.25) / self.scale + self.xmin,
            (v - 0.25) / self.scale + self.ymin,
        )
    }

    pub fn inverse_square(&self, sq: &Square) -> Square {
        let (cx, cy) = self.inverse(sq.center[0], sq.center[1]);
        Square::new(cx, cy, sq.size / self.scale)
    }
}

/// Maps the points into `[0.25, 0.75]²` (ids kept). Returns `None` for an
/// empty input.
pub fn normalize(points: &[Point]) -> Option<(Vec<Point>, Normalization)> {
    let (x0, y0, x1, y1) = bounding_box(points)?;
    let extent = (x1 - x0).max(y1 - y0);
    let degenerate = extent == 0.0;
    let norm = Normalization {
        xmin: x0,
        ymin: y0,
        scale: if degenerate { 1.0 } else { 0.5 / extent },
        degenerate,
    };
    let out = points
        .iter()
        .map(|p| {
            let (u, v) = norm.forward(p.x, p.y);
            Point::new(u.clamp(0.25, 0.75), v.clamp(0.25, 0.75), p.id)
        })
        .collect();
    Some((out, norm))
}

/// Dyadic square of side `2^-level` with lower-left corner
/// `(cell_x, cell_y)·2^-level`, closed on the left and bottom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CanonicalSquare {
    pub level: u32,
    pub cell_x: u64,
    pub cell_y: u64,
}

impl CanonicalSquare {
    pub const UNIT: CanonicalSquare = CanonicalSquare {
        level: 0,
        cell_x: 0,
        cell_y: 0,
    };

    pub fn size(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    fn shift(&self) -> u32 {
        LEVEL_CAP - self.level
    }

    /// Closed integer box `[lo, hi]` on the grid.
    pub fn grid_box(&self) -> GridBox {
        let s = self.shift();
        let (lx, ly) = (self.cell_x << s, self.cell_y << s);
        let w = 1u64 << s;
        GridBox {
            x0: lx,
            y0: ly,
            x1: lx + w,
            y1: ly + w,
        }
    }

    pub fn contains_grid(&self, g: (u64, u64)) -> bool {
        let s = self.shift();
        g.0 >> s == self.cell_x && g.1 >> s == self.cell_y
    }

    /// Bounds `(xmin, ymin, xmax, ymax)` in normalized coordinates.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        self.grid_box().to_unit()
    }

    pub fn to_square(&self) -> Square {
        let (x0, y0, x1, y1) = self.bounds();
        Square::new((x0 + x1) / 2.0, (y0 + y1) / 2.0, x1 - x0)
    }

    fn quadrant(&self, q: usize) -> CanonicalSquare {
        CanonicalSquare {
            level: self.level + 1,
            cell_x: self.cell_x * 2 + (q & 1) as u64,
            cell_y: self.cell_y * 2 + (q >> 1) as u64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridBox {
    pub x0: u64,
    pub y0: u64,
    pub x1: u64,
    pub y1: u64,
}

impl GridBox {
    fn intersects_closed(&self, o: &GridBox) -> bool {
        self.x0 <= o.x1 && o.x0 <= self.x1 && self.y0 <= o.y1 && o.y0 <= self.y1
    }

    /// `self` lies in the open interior of `o`.
    fn strictly_inside(&self, o: &GridBox) -> bool {
        o.x0 < self.x0 && self.x1 < o.x1 && o.y0 < self.y0 && self.y1 < o.y1
    }

    fn to_unit(self) -> (f64, f64, f64, f64) {
        (
            self.x0 as f64 / GRID,
            self.y0 as f64 / GRID,
            self.x1 as f64 / GRID,
            self.y1 as f64 / GRID,
        )
    }
}

fn grid_coord(u: f64) -> u64 {
    (u * GRID).floor() as u64
}

fn grid_of(p: &Point) -> (u64, u64) {
    (grid_coord(p.x), grid_coord(p.y))
}

fn square_from_xor(g: (u64, u64), diff: u64) -> CanonicalSquare {
    let bits = 64 - diff.leading_zeros();
    let level = LEVEL_CAP - bits.min(LEVEL_CAP);
    let s = LEVEL_CAP - level;
    CanonicalSquare {
        level,
        cell_x: g.0 >> s,
        cell_y: g.1 >> s,
    }
}

/// Smallest canonical square containing two normalized points.
pub fn smallest_canonical_square(p: &Point, q: &Point) -> CanonicalSquare {
    let (a, b) = (grid_of(p), grid_of(q));
    square_from_xor(a, (a.0 ^ b.0) | (a.1 ^ b.1))
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Leaf,
    /// Children in quadrant order SW, SE, NW, NE.
    QuadSplit {
        children: [usize; 4],
    },
    Shrink {
        inner: CanonicalSquare,
        child: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadtreeNode {
    pub square: CanonicalSquare,
    pub kind: NodeKind,
    start: usize,
    end: usize,
}

/// Compressed quadtree. Each node's points form a contiguous run of
/// `order`, so the tree stores `O(n)` data even when it is deep.
#[derive(Debug, Clone)]
pub struct Quadtree {
    pub nodes: Vec<QuadtreeNode>,
    pub norm: Normalization,
    /// Normalized points, in input order.
    pub points: Vec<Point>,
    grid: Vec<(u64, u64)>,
    order: Vec<usize>,
}

impl Quadtree {
    /// Builds the tree for `points` (input coordinates). Returns `None` for
    /// an empty input.
    pub fn build(points: &[Point]) -> Option<Quadtree> {
        let (pts, norm) = normalize(points)?;
        Some(Self::build_normalized(pts, norm))
    }

    /// Builds from points already inside `(0, 1)²`.
    pub fn build_normalized(points: Vec<Point>, norm: Normalization) -> Quadtree {
        let grid: Vec<(u64, u64)> = points.iter().map(grid_of).collect();
        let mut t = Quadtree {
            nodes: Vec::new(),
            norm,
            order: (0..points.len()).collect(),
            points,
            grid,
        };
        t.nodes.push(QuadtreeNode {
            square: CanonicalSquare::UNIT,
            kind: NodeKind::Leaf,
            start: 0,
            end: t.order.len(),
        });
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let (sq, start, end) = {
                let n = &t.nodes[id];
                (n.square, n.start, n.end)
            };
            let run = &mut t.order[start..end];
            if run.len() <= 1 {
                continue;
            }
            let g0 = t.grid[run[0]];
            let diff = run.iter().fold(0u64, |d, &i| {
                d | (t.grid[i].0 ^ g0.0) | (t.grid[i].1 ^ g0.1)
            });
            if diff == 0 || sq.level == LEVEL_CAP {
                continue;
            }
            let bit = LEVEL_CAP - sq.level - 1;
            let grid = &t.grid;
            let quad =
                |i: usize| (((grid[i].0 >> bit) & 1) + 2 * ((grid[i].1 >> bit) & 1)) as usize;
            run.sort_by_key(|&i| quad(i));
            let mut bounds = [start; 5];
            for q in 0..4 {
                bounds[q + 1] = start + run.partition_point(|&i| quad(i) <= q);
            }
            let occupied = (0..4).filter(|&q| bounds[q + 1] > bounds[q]).count();
            if occupied >= 2 {
                let mut children = [0usize; 4];
                for q in 0..4 {
                    children[q] = t.nodes.len();
                    t.nodes.push(QuadtreeNode {
                        square: sq.quadrant(q),
                        kind: NodeKind::Leaf,
                        start: bounds[q],
                        end: bounds[q + 1],
                    });
                    stack.push(children[q]);
                }
                t.nodes[id].kind = NodeKind::QuadSplit { children };
            } else {
                let inner = square_from_xor(g0, diff);
                let child = t.nodes.len();
                t.nodes.push(QuadtreeNode {
                    square: inner,
                    kind: NodeKind::Leaf,
                    start,
                    end,
                });
                t.nodes[id].kind = NodeKind::Shrink { inner, child };
                stack.push(child);
            }
        }
        t
    }

    /// Input-order indices of the points inside node `id`.
    pub fn node_points(&self, id: usize) -> &[usize] {
        let n = &self.nodes[id];
        &self.order[n.start..n.end]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Leaf node containing each point, indexed like `points`.
    fn leaf_of_points(&self) -> Vec<usize> {
        let mut out = vec![0; self.points.len()];
        for (id, n) in self.nodes.iter().enumerate() {
            if n.kind == NodeKind::Leaf {
                for &i in self.node_points(id) {
                    out[i] = id;
                }
            }
        }
        out
    }

    /// Regions of the final subdivision: leaf squares and donuts.
    fn regions(&self) -> Vec<Region> {
        let mut out = Vec::new();
        for (id, n) in self.nodes.iter().enumerate() {
            match n.kind {
                NodeKind::Leaf => out.push(Region {
                    node: id,
                    outer: n.square.grid_box(),
                    hole: None,
                }),
                NodeKind::Shrink { inner, .. } => out.push(Region {
                    node: id,
                    outer: n.square.grid_box(),
                    hole: Some(inner),
                }),
                NodeKind::QuadSplit { .. } => {}
            }
        }
        out
    }

    /// Unordered pairs of final regions whose closures meet, each reported
    /// once as indices into [`Quadtree::regions`].
    fn touching_pairs(&self, regions: &[Region]) -> Vec<(usize, usize)> {
        let mut index_of = vec![usize::MAX; self.nodes.len()];
        for (r, reg) in regions.iter().enumerate() {
            index_of[reg.node] = r;
        }
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for (r1, reg) in regions.iter().enumerate() {
            let hole1 = reg.hole.map(|h| h.grid_box());
            stack.clear();
            stack.push(0usize);
            while let Some(id) = stack.pop() {
                let n = &self.nodes[id];
                let b = n.square.grid_box();
                if !b.intersects_closed(&reg.outer) {
                    continue;
                }
                if hole1.is_some_and(|h| b.strictly_inside(&h)) {
                    continue;
                }
                match &n.kind {
                    NodeKind::QuadSplit { children } => stack.extend_from_slice(children),
                    NodeKind::Shrink { inner, child } => {
                        stack.push(*child);
                        let r2 = index_of[id];
                        if r2 > r1 && !reg.outer.strictly_inside(&inner.grid_box()) {
                            out.push((r1, r2));
                        }
                    }
                    NodeKind::Leaf => {
                        let r2 = index_of[id];
                        if r2 > r1 {
                            out.push((r1, r2));
                        }
                    }
                }
            }
        }
        out
    }

    /// All base squares in input coordinates.
    pub fn base_squares(&self) -> Vec<Square> {
        self.base_squares_tagged()
            .into_iter()
            .map(|(_, s)| s)
            .collect()
    }

    /// Base squares with the family that produced each one.
    pub fn base_squares_tagged(&self) -> Vec<(BaseFamily, Square)> {
        let mut out: Vec<(BaseFamily, Square)> = Vec::new();
        // B1: every generated square.
        for n in &self.nodes {
            out.push((BaseFamily::Generated, n.square.to_square()));
            if let NodeKind::Shrink { inner, .. } = n.kind {
                // B3: smallest square around the shrunk square sharing a
                // corner with its parent.
                let s = corner_square(n.square.bounds(), inner.bounds());
                out.push((BaseFamily::ShrinkCorner, s));
            }
        }
        // B2: smallest square containing p with a corner at a corner of p's leaf.
        let leaf = self.leaf_of_points();
        for (i, p) in self.points.iter().enumerate() {
            let s = corner_square(self.nodes[leaf[i]].square.bounds(), (p.x, p.y, p.x, p.y));
            if s.size > 0.0 {
                out.push((BaseFamily::PointCorner, s));
            }
        }
        // B4: touching pairs of final regions.
        let regions = self.regions();
        for (a, b) in self.touching_pairs(&regions) {
            let (ra, rb) = (&regions[a], &regions[b]);
            let ka = self.region_content(ra);
            let kb = self.region_content(rb);
            let (Some(ba), Some(bb)) = (ka, kb) else {
                continue;
            };
            let s = Square::enclosing(ba, bb);
            if s.size > 0.0 {
                out.push((BaseFamily::Touching, s));
            }
        }
        out.into_iter()
            .map(|(f, s)| (f, self.norm.inverse_square(&s)))
            .collect()
    }

    /// What a region contributes to a B4 square: the point of a nonempty
    /// leaf or the inner square of a donut. Empty leaves contribute nothing.
    fn region_content(&self, r: &Region) -> Option<(f64, f64, f64, f64)> {
        match r.hole {
            Some(inner) => Some(inner.bounds()),
            None => self.node_points(r.node).first().map(|&i| {
                let p = self.points[i];
                (p.x, p.y, p.x, p.y)
            }),
        }
    }

    /// Node structure and base squares in input coordinates, for rendering.
    pub fn dump(&self) -> QuadtreeDump {
        let sq = |c: &CanonicalSquare| self.norm.inverse_square(&c.to_square());
        QuadtreeDump {
            nodes: self
                .nodes
                .iter()
                .enumerate()
                .map(|(id, n)| NodeDump {
                    kind: match n.kind {
                        NodeKind::Leaf => "leaf",
                        NodeKind::QuadSplit { .. } => "split",
                        NodeKind::Shrink { .. } => "shrink",
                    }
                    .to_string(),
                    square: sq(&n.square),
                    inner: match &n.kind {
                        NodeKind::Shrink { inner, .. } => Some(sq(inner)),
                        _ => None,
                    },
                    points: self
                        .node_points(id)
                        .iter()
                        .map(|&i| self.points[i].id)
                        .collect(),
                })
                .collect(),
            base_squares: self
                .base_squares_tagged()
                .into_iter()
                .map(|(family, square)| BaseDump { family, square })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseFamily {
    Generated,
    PointCorner,
    ShrinkCorner,
    Touching,
}

#[derive(Debug, Clone)]
struct Region {
    node: usize,
    outer: GridBox,
    hole: Option<CanonicalSquare>,
}

/// Smallest square that shares a corner with `outer` and contains `inner`
/// (both given as bounds). Ties go to the lowest, then leftmost corner.
fn corner_square(outer: (f64, f64, f64, f64), inner: (f64, f64, f64, f64)) -> Square {
    let corners = [
        (outer.0, outer.1, 1.0, 1.0),
        (outer.2, outer.1, -1.0, 1.0),
        (outer.0, outer.3, 1.0, -1.0),
        (outer.2, outer.3, -1.0, -1.0),
    ];
    let mut best: Option<(f64, Square)> = None;
    for (cx, cy, sx, sy) in corners {
        let far_x = if sx > 0.0 { inner.2 - cx } else { cx - inner.0 };
        let far_y = if sy > 0.0 { inner.3 - cy } else { cy - inner.1 };
        let size = far_x.max(far_y);
        if best.is_none_or(|(b, _)| size < b) {
            let sq = Square::new(cx + sx * size / 2.0, cy + sy * size / 2.0, size);
            best = Some((size, sq));
        }
    }
    best.unwrap().1
}

#[derive(Debug, Clone, Serialize)]
pub struct NodeDump {
    pub kind: String,
    pub square: Square,
    pub inner: Option<Square>,
    pub points: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BaseDump {
    pub family: BaseFamily,
    pub square: Square,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadtreeDump {
    pub nodes: Vec<NodeDump>,
    pub base_squares: Vec<BaseDump>,
}
