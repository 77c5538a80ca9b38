use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::hull::ConvexChain;

use super::{dist, orient_xy, Xy};

/// Line through a vertex of the first hull (`a`) and one of the second (`b`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub a: Xy,
    pub b: Xy,
}

impl Line {
    fn dir(&self) -> Xy {
        Xy {
            x: self.b.x - self.a.x,
            y: self.b.y - self.a.y,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangentDiagnostics {
    pub inner_tangents: [Line; 2],
    pub outer_tangents: [Line; 2],
    /// Opening angle of the empty wedges between the inner tangents.
    pub separation_angle: f64,
    /// Angle between the two outer tangents; 0 when they are parallel.
    pub outer_angle: f64,
    pub separation_distance: f64,
}

fn xy(p: &Point) -> Xy {
    Xy { x: p.x, y: p.y }
}

fn edges(v: &[Xy]) -> Vec<(Xy, Xy)> {
    match v.len() {
        1 => vec![(v[0], v[0])],
        2 => vec![(v[0], v[1])],
        k => (0..k).map(|i| (v[i], v[(i + 1) % k])).collect(),
    }
}

fn in_box(a: Xy, b: Xy, p: Xy) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn segments_meet(p1: Xy, p2: Xy, q1: Xy, q2: Xy) -> bool {
    let d1 = orient_xy(q1, q2, p1);
    let d2 = orient_xy(q1, q2, p2);
    let d3 = orient_xy(p1, p2, q1);
    let d4 = orient_xy(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && in_box(q1, q2, p1))
        || (d2 == 0.0 && in_box(q1, q2, p2))
        || (d3 == 0.0 && in_box(p1, p2, q1))
        || (d4 == 0.0 && in_box(p1, p2, q2))
}

fn inside_closed(poly: &[Xy], p: Xy) -> bool {
    let k = poly.len();
    k >= 3 && (0..k).all(|i| orient_xy(poly[i], poly[(i + 1) % k], p) >= 0.0)
}

fn disjoint_xy(a: &[Xy], b: &[Xy]) -> bool {
    let (ea, eb) = (edges(a), edges(b));
    if ea
        .iter()
        .any(|&(p1, p2)| eb.iter().any(|&(q1, q2)| segments_meet(p1, p2, q1, q2)))
    {
        return false;
    }
    !(inside_closed(b, a[0]) || inside_closed(a, b[0]))
}

/// True when the convex hulls with the given CCW vertex cycles share no
/// point, boundaries included.
pub fn hulls_disjoint(a: &[Point], b: &[Point]) -> bool {
    let a: Vec<Xy> = a.iter().map(xy).collect();
    let b: Vec<Xy> = b.iter().map(xy).collect();
    !a.is_empty() && !b.is_empty() && disjoint_xy(&a, &b)
}

fn point_segment_dist(p: Xy, a: Xy, b: Xy) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    dist(
        p,
        Xy {
            x: a.x + t * dx,
            y: a.y + t * dy,
        },
    )
}

fn angle_between(u: Xy, v: Xy) -> f64 {
    (u.x * v.y - u.y * v.x).abs().atan2(u.x * v.x + u.y * v.y)
}

pub(crate) fn crossing(l1: &Line, l2: &Line) -> Option<Xy> {
    let (d1, d2) = (l1.dir(), l2.dir());
    let den = d1.x * d2.y - d1.y * d2.x;
    if den == 0.0 {
        return None;
    }
    let t = ((l2.a.x - l1.a.x) * d2.y - (l2.a.y - l1.a.y) * d2.x) / den;
    Some(Xy {
        x: l1.a.x + t * d1.x,
        y: l1.a.y + t * d1.y,
    })
}

/// Common tangents, separation angle and distance of two disjoint hulls,
/// by brute force over vertex pairs.
pub fn tangent_diagnostics(a: &ConvexChain, b: &ConvexChain) -> Result<TangentDiagnostics> {
    let av: Vec<Xy> = a.vertices().iter().map(xy).collect();
    let bv: Vec<Xy> = b.vertices().iter().map(xy).collect();
    if av.is_empty() || bv.is_empty() {
        return Err(Error::EmptySet);
    }
    if !disjoint_xy(&av, &bv) {
        return Err(Error::HullsNotDisjoint);
    }
    let sides = |l: &Line, set: &[Xy]| {
        let mut pos = false;
        let mut neg = false;
        for &v in set {
            let o = orient_xy(l.a, l.b, v);
            pos |= o > 0.0;
            neg |= o < 0.0;
        }
        (pos, neg)
    };
    // Slots: outer with both hulls on the left, outer on the right, inner
    // with `a` on the left, inner with `a` on the right.
    let mut slots: [Option<Line>; 4] = [None; 4];
    for &p in &av {
        for &q in &bv {
            let l = Line { a: p, b: q };
            let (ap, an) = sides(&l, &av);
            let (bp, bn) = sides(&l, &bv);
            let fits = [!an && !bn, !ap && !bp, !an && !bp, !ap && !bn];
            for (slot, ok) in slots.iter_mut().zip(fits) {
                if ok && slot.is_none() {
                    *slot = Some(l);
                }
            }
        }
    }
    let [o1, o2, i1, i2] = slots.map(|s| s.expect("disjoint hulls have all four tangents"));

    let outer_angle = angle_between(o1.dir(), o2.dir());
    let separation_angle = match crossing(&i1, &i2) {
        None => std::f64::consts::PI,
        Some(c) => {
            let wedge = |p: Xy, q: Xy| {
                let u = Xy {
                    x: p.x - c.x,
                    y: p.y - c.y,
                };
                let v = Xy {
                    x: q.x - c.x,
                    y: q.y - c.y,
                };
                (u.x != 0.0 || u.y != 0.0) && (v.x != 0.0 || v.y != 0.0)
            };
            let filled = if wedge(i1.a, i2.a) {
                Some((i1.a, i2.a))
            } else if wedge(i1.b, i2.b) {
                Some((i1.b, i2.b))
            } else {
                None
            };
            match filled {
                None => std::f64::consts::PI,
                Some((p, q)) => {
                    let u = Xy {
                        x: p.x - c.x,
                        y: p.y - c.y,
                    };
                    let v = Xy {
                        x: q.x - c.x,
                        y: q.y - c.y,
                    };
                    std::f64::consts::PI - angle_between(u, v)
                }
            }
        }
    };

    let mut separation_distance = f64::INFINITY;
    for &(s, t) in &edges(&bv) {
        for &p in &av {
            separation_distance = separation_distance.min(point_segment_dist(p, s, t));
        }
    }
    for &(s, t) in &edges(&av) {
        for &p in &bv {
            separation_distance = separation_distance.min(point_segment_dist(p, s, t));
        }
    }

    Ok(TangentDiagnostics {
        inner_tangents: [i1, i2],
        outer_tangents: [o1, o2],
        separation_angle,
        outer_angle,
        separation_distance,
    })
}
