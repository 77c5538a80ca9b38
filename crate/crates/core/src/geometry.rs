//! Points, the orientation predicate and a few rigid motions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An input point. `id` is the index of the point in the caller's input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub id: usize,
}

impl Point {
    pub const fn new(x: f64, y: f64, id: usize) -> Self {
        Self { x, y, id }
    }

    #[inline]
    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    #[inline]
    pub fn same_pos(&self, other: &Point) -> bool {
        self.x == other.x && self.y == other.y
    }

    /// Lexicographic (x, then y) comparison of positions.
    #[inline]
    pub fn lex_cmp(&self, other: &Point) -> std::cmp::Ordering {
        self.x
            .total_cmp(&other.x)
            .then_with(|| self.y.total_cmp(&other.y))
    }
}

/// Builds a point set from raw coordinates, assigning ids in input order.
pub fn points_from_xy(coords: &[(f64, f64)]) -> Result<Vec<Point>> {
    coords
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| {
            if x.is_finite() && y.is_finite() {
                Ok(Point::new(x, y, i))
            } else {
                Err(Error::NonFinite(i))
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Left,
    Right,
    Collinear,
}

/// Sign of the doubled signed area of `abc`, evaluated with adaptive
/// precision so that the answer is exact for any finite input.
#[inline]
pub fn orient(a: &Point, b: &Point, c: &Point) -> Orientation {
    let det = orient_det(a, b, c);
    if det > 0.0 {
        Orientation::Left
    } else if det < 0.0 {
        Orientation::Right
    } else {
        Orientation::Collinear
    }
}

/// Robust determinant; only its sign is meaningful.
#[inline]
pub fn orient_det(a: &Point, b: &Point, c: &Point) -> f64 {
    robust::orient2d(
        robust::Coord { x: a.x, y: a.y },
        robust::Coord { x: b.x, y: b.y },
        robust::Coord { x: c.x, y: c.y },
    )
}

/// Rotates every point counterclockwise about the origin; ids are kept.
pub fn rotate(points: &[Point], angle: f64) -> Vec<Point> {
    if angle == 0.0 {
        return points.to_vec();
    }
    let (s, c) = angle.sin_cos();
    points
        .iter()
        .map(|p| Point::new(c * p.x - s * p.y, s * p.x + c * p.y, p.id))
        .collect()
}

/// Axis-parallel bounding box `(xmin, ymin, xmax, ymax)`.
pub fn bounding_box(points: &[Point]) -> Option<(f64, f64, f64, f64)> {
    let first = points.first()?;
    let mut b = (first.x, first.y, first.x, first.y);
    for p in &points[1..] {
        b.0 = b.0.min(p.x);
        b.1 = b.1.min(p.y);
        b.2 = b.2.max(p.x);
        b.3 = b.3.max(p.y);
    }
    Some(b)
}

/// Groups points with identical coordinates. Returns one representative per
/// location (the lowest id) and, for each representative, all ids at it.
pub fn dedup_locations(points: &[Point]) -> (Vec<Point>, Vec<Vec<usize>>) {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .lex_cmp(&points[b])
            .then(points[a].id.cmp(&points[b].id))
    });
    let mut reps: Vec<Point> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in order {
        let p = points[i];
        match reps.last() {
            Some(r) if r.same_pos(&p) => groups.last_mut().unwrap().push(p.id),
            _ => {
                reps.push(p);
                groups.push(vec![p.id]);
            }
        }
    }
    (reps, groups)
}
