//! Convex hulls stored as counterclockwise chains with prefix arc lengths.

use crate::error::{Error, Result};
use crate::geometry::{orient, Orientation, Point};

/// A convex polygon: vertices in strict counterclockwise order (no three
/// consecutive vertices collinear) and the arc length from `vertices[0]` to
/// each vertex along the boundary.
///
/// Degenerate hulls have one vertex (a point) or two (a segment). A segment
/// is treated as a polygon traversed both ways, so its perimeter is twice
/// its length.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexChain {
    vertices: Vec<Point>,
    prefix_len: Vec<f64>,
}

/// Borrowed view of a chain. The perimeter-query index keeps all of its
/// chains in one arena and hands these out.
#[derive(Debug, Clone, Copy)]
pub struct ChainView<'a> {
    pub vertices: &'a [Point],
    pub prefix_len: &'a [f64],
}

impl ConvexChain {
    /// Wraps vertices that are already in strict CCW convex position.
    pub fn from_ccw(vertices: Vec<Point>) -> Self {
        let prefix_len = prefix_lengths(&vertices);
        Self {
            vertices,
            prefix_len,
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn prefix_len(&self) -> &[f64] {
        &self.prefix_len
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn view(&self) -> ChainView<'_> {
        ChainView {
            vertices: &self.vertices,
            prefix_len: &self.prefix_len,
        }
    }

    pub fn perimeter(&self) -> f64 {
        self.view().perimeter()
    }

    pub fn diameter(&self) -> f64 {
        diameter(&self.vertices)
    }
}

impl<'a> ChainView<'a> {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn perimeter(&self) -> f64 {
        let k = self.vertices.len();
        if k < 2 {
            return 0.0;
        }
        self.prefix_len[k - 1] + self.vertices[k - 1].dist(&self.vertices[0])
    }

    /// Boundary length walking counterclockwise from vertex `i` to vertex `j`.
    pub fn ccw_arc(&self, i: usize, j: usize) -> f64 {
        if j >= i {
            self.prefix_len[j] - self.prefix_len[i]
        } else {
            self.perimeter() - self.prefix_len[i] + self.prefix_len[j]
        }
    }
}

pub(crate) fn prefix_lengths(vertices: &[Point]) -> Vec<f64> {
    let mut out = Vec::with_capacity(vertices.len());
    let mut acc = 0.0;
    for (i, v) in vertices.iter().enumerate() {
        if i > 0 {
            acc += vertices[i - 1].dist(v);
        }
        out.push(acc);
    }
    out
}

/// Andrew's monotone chain. Duplicates and collinear boundary points are
/// dropped; all-collinear input yields the two extreme points.
pub fn convex_hull(points: &[Point]) -> Result<ConvexChain> {
    if points.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.lex_cmp(b).then(a.id.cmp(&b.id)));
    Ok(ConvexChain::from_ccw(hull_of_sorted(&pts)))
}

/// Hull vertices of points already sorted lexicographically by (x, y).
pub(crate) fn hull_of_sorted(pts: &[Point]) -> Vec<Point> {
    let mut uniq: Vec<Point> = Vec::with_capacity(pts.len());
    for p in pts {
        if uniq.last().is_none_or(|q: &Point| !q.same_pos(p)) {
            uniq.push(*p);
        }
    }
    if uniq.len() <= 2 {
        return uniq;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(uniq.len() + 1);
    for p in &uniq {
        while hull.len() >= 2
            && orient(&hull[hull.len() - 2], &hull[hull.len() - 1], p) != Orientation::Left
        {
            hull.pop();
        }
        hull.push(*p);
    }
    let lower_len = hull.len() + 1;
    for p in uniq.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && orient(&hull[hull.len() - 2], &hull[hull.len() - 1], p) != Orientation::Left
        {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();
    hull
}

/// Perimeter of the hull of `points` (0 for an empty set).
pub fn hull_perimeter(points: &[Point]) -> f64 {
    convex_hull(points).map(|c| c.perimeter()).unwrap_or(0.0)
}

/// Closed-boundary length of a vertex cycle, with the degenerate
/// conventions: one vertex has length 0, two vertices twice their distance.
pub fn cycle_length(vertices: &[Point]) -> f64 {
    match vertices.len() {
        0 | 1 => 0.0,
        k => {
            let mut s = vertices[k - 1].dist(&vertices[0]);
            for w in vertices.windows(2) {
                s += w[0].dist(&w[1]);
            }
            s
        }
    }
}

pub fn perimeter(chain: &ConvexChain) -> f64 {
    chain.perimeter()
}

/// Largest distance between two hull vertices (rotating calipers).
pub fn diameter(hull: &[Point]) -> f64 {
    let k = hull.len();
    if k < 2 {
        return 0.0;
    }
    if k <= 4 {
        let mut best: f64 = 0.0;
        for i in 0..k {
            for j in i + 1..k {
                best = best.max(hull[i].dist(&hull[j]));
            }
        }
        return best;
    }
    let area2 = |a: &Point, b: &Point, c: &Point| {
        ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)).abs()
    };
    let mut best: f64 = 0.0;
    let mut j = 1;
    for i in 0..k {
        let a = &hull[i];
        let b = &hull[(i + 1) % k];
        while area2(a, b, &hull[(j + 1) % k]) > area2(a, b, &hull[j]) {
            j = (j + 1) % k;
        }
        best = best.max(a.dist(&hull[j])).max(b.dist(&hull[j]));
    }
    best
}
