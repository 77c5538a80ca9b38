//! Candidate regions for the small side of a partition: a square from the
//! base-square families intersected with a halfplane whose boundary passes
//! through two points of a grid on the square's boundary.
//!
//! Grid points sit at integer positions in units of `size / count`, so the
//! direction of every boundary line is an integer vector. Reducing it gives
//! an exact orientation class that does not depend on the square.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::quadtree::Square;

/// Reduced integer direction of a boundary line, with `dx > 0`, or
/// `dx == 0` and `dy > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Direction {
    pub dx: i64,
    pub dy: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Direction {
    pub fn reduced(dx: i64, dy: i64) -> Self {
        assert!(dx != 0 || dy != 0, "zero direction");
        let g = gcd(dx, dy);
        let (dx, dy) = (dx / g, dy / g);
        if dx < 0 || (dx == 0 && dy < 0) {
            Self { dx: -dx, dy: -dy }
        } else {
            Self { dx, dy }
        }
    }

    /// Angle of the direction in `[0, π)`.
    pub fn angle(&self) -> f64 {
        let a = (self.dy as f64).atan2(self.dx as f64);
        if a < 0.0 {
            a + std::f64::consts::PI
        } else {
            a
        }
    }

    pub fn unit(&self) -> [f64; 2] {
        let l = (self.dx as f64).hypot(self.dy as f64);
        [self.dx as f64 / l, self.dy as f64 / l]
    }

    /// Coordinate across the line direction: `dx·y − dy·x`. Points to the
    /// left of the directed line have larger values.
    #[inline]
    pub fn normal_coord(&self, x: f64, y: f64) -> f64 {
        self.dx as f64 * y - self.dy as f64 * x
    }

    /// Coordinate along the line direction.
    #[inline]
    pub fn along_coord(&self, x: f64, y: f64) -> f64 {
        self.dx as f64 * x + self.dy as f64 * y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfplaneSide {
    /// Closed side to the left of the directed boundary line.
    LeftClosed,
    RightClosed,
}

/// Closed halfplane bounded by the line through `anchor` with direction
/// `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Halfplane {
    pub anchor: [f64; 2],
    pub direction: Direction,
    pub side: HalfplaneSide,
}

impl Halfplane {
    /// Value of [`Direction::normal_coord`] on the boundary line.
    #[inline]
    pub fn offset(&self) -> f64 {
        self.direction.normal_coord(self.anchor[0], self.anchor[1])
    }

    #[inline]
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let u = self.direction.normal_coord(x, y);
        match self.side {
            HalfplaneSide::LeftClosed => u >= self.offset(),
            HalfplaneSide::RightClosed => u <= self.offset(),
        }
    }

    pub fn opposite_side(&self) -> HalfplaneSide {
        match self.side {
            HalfplaneSide::LeftClosed => HalfplaneSide::RightClosed,
            HalfplaneSide::RightClosed => HalfplaneSide::LeftClosed,
        }
    }
}

/// A square intersected with a halfplane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub square: Square,
    pub halfplane: Halfplane,
}

impl Candidate {
    pub fn contains(&self, p: &Point) -> bool {
        self.square.contains(p.x, p.y) && self.halfplane.contains(p.x, p.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "name")]
pub enum Profile {
    /// The proof constants: 18001 grid points per square.
    Paper,
    Practical {
        grid: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Chosen per run from the candidate count.
    Auto,
    Direct,
    RangeTree,
}

pub const GUARANTEED_GRID: usize = 18001;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub profile: Profile,
    pub c_sep: f64,
    pub c_star: f64,
    pub c1: f64,
    pub c2: f64,
    pub backend: Backend,
    /// Maximum number of grid doublings.
    pub refinement: u32,
    /// Evaluate candidates on the rayon pool (needs the `parallel` feature).
    pub parallel: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            profile: Profile::Practical { grid: 16 },
            c_sep: 1.0 / 250.0,
            c_star: 18.0,
            c1: 0.25,
            c2: 4.0,
            backend: Backend::Auto,
            refinement: 3,
            parallel: true,
        }
    }
}

impl SolverConfig {
    pub fn paper() -> Self {
        Self {
            profile: Profile::Paper,
            refinement: 0,
            ..Self::default()
        }
    }

    pub fn practical(grid: usize) -> Self {
        Self {
            profile: Profile::Practical { grid },
            ..Self::default()
        }
    }

    pub fn grid_count(&self) -> usize {
        match self.profile {
            Profile::Paper => GUARANTEED_GRID,
            Profile::Practical { grid } => grid,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_count() < 5 {
            return Err(Error::ConfigError(format!(
                "grid count {} is below 5",
                self.grid_count()
            )));
        }
        for (name, v) in [
            ("c_sep", self.c_sep),
            ("c_star", self.c_star),
            ("c1", self.c1),
            ("c2", self.c2),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::ConfigError(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

/// Integer position of grid point `k` on a square of side `count`, walking
/// counterclockwise from the lower-left corner in steps of 4.
fn grid_position(k: usize, count: usize) -> (i64, i64) {
    let g = count as i64;
    let t = 4 * k as i64;
    if t <= g {
        (t, 0)
    } else if t <= 2 * g {
        (g, t - g)
    } else if t <= 3 * g {
        (3 * g - t, g)
    } else {
        (0, 4 * g - t)
    }
}

fn check_count(count: usize) -> Result<()> {
    if count < 4 {
        return Err(Error::ConfigError(format!("grid count {count} is below 4")));
    }
    Ok(())
}

/// `count` points spaced `4·size/count` apart along the square's boundary,
/// starting at the lower-left corner and running counterclockwise.
pub fn boundary_grid(sq: &Square, count: usize) -> Result<Vec<[f64; 2]>> {
    check_count(count)?;
    let grid = GridFrame::new(sq, count);
    Ok((0..count)
        .map(|k| grid.point(grid_position(k, count)))
        .collect())
}

#[derive(Debug, Clone, Copy)]
struct GridFrame {
    x0: f64,
    y0: f64,
    unit: f64,
}

impl GridFrame {
    fn new(sq: &Square, count: usize) -> Self {
        let (x0, y0, _, _) = sq.bounds();
        Self {
            x0,
            y0,
            unit: sq.size / count as f64,
        }
    }

    fn point(&self, (i, j): (i64, i64)) -> [f64; 2] {
        [
            self.x0 + i as f64 * self.unit,
            self.y0 + j as f64 * self.unit,
        ]
    }
}

fn edge_mask((i, j): (i64, i64), g: i64) -> u8 {
    (j == 0) as u8 | ((i == g) as u8) << 1 | ((j == g) as u8) << 2 | ((i == 0) as u8) << 3
}

/// Unordered grid-index pairs `(a, b)`, `a < b`, in lexicographic order.
/// Every pair spans a line; all positions are distinct.
pub fn grid_pairs(count: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..count).flat_map(move |a| (a + 1..count).map(move |b| (a, b)))
}

/// Candidates for one square: both closed halfplanes of every line through
/// two grid points. For lines along an edge of the square only the side
/// holding the whole square is kept, once per edge.
pub fn halfplanes_for(sq: &Square, cfg: &SolverConfig) -> impl Iterator<Item = Candidate> {
    halfplanes_with_count(*sq, cfg.grid_count())
}

pub fn halfplanes_with_count(sq: Square, count: usize) -> impl Iterator<Item = Candidate> {
    let frame = GridFrame::new(&sq, count);
    grid_lines(count).flat_map(move |l| l.candidates_in(sq, frame))
}

/// A candidate boundary line in grid units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridLine {
    pub anchor: (i64, i64),
    pub direction: Direction,
    /// Set for lines along an edge of the square: the one side kept.
    pub only: Option<HalfplaneSide>,
}

impl GridLine {
    /// The line's candidates on `sq` for a grid of `count` points.
    pub fn candidates(&self, sq: Square, count: usize) -> impl Iterator<Item = Candidate> {
        self.candidates_in(sq, GridFrame::new(&sq, count))
    }

    /// Anchor of the line on `sq` for a grid of `count` points.
    pub fn anchor_on(&self, sq: &Square, count: usize) -> [f64; 2] {
        GridFrame::new(sq, count).point(self.anchor)
    }

    fn candidates_in(&self, sq: Square, frame: GridFrame) -> impl Iterator<Item = Candidate> {
        let sides: &'static [HalfplaneSide] = match self.only {
            Some(HalfplaneSide::LeftClosed) => &[HalfplaneSide::LeftClosed],
            Some(HalfplaneSide::RightClosed) => &[HalfplaneSide::RightClosed],
            None => &[HalfplaneSide::LeftClosed, HalfplaneSide::RightClosed],
        };
        let anchor = frame.point(self.anchor);
        let direction = self.direction;
        sides.iter().map(move |&side| Candidate {
            square: sq,
            halfplane: Halfplane {
                anchor,
                direction,
                side,
            },
        })
    }
}

/// All candidate boundary lines, lazily: the four edges, then one line per
/// grid pair not on a common edge.
pub fn grid_lines(count: usize) -> impl Iterator<Item = GridLine> {
    let g = count as i64;
    let edges = (0..4u8).map(move |e| {
        // Directed counterclockwise, so the square is on the left.
        let (anchor, dir) = match e {
            0 => ((0, 0), (1, 0)),
            1 => ((g, 0), (0, 1)),
            2 => ((g, g), (-1, 0)),
            _ => ((0, g), (0, -1)),
        };
        let direction = Direction::reduced(dir.0, dir.1);
        let flipped = direction.dx != dir.0 || direction.dy != dir.1;
        GridLine {
            anchor,
            direction,
            only: Some(if flipped {
                HalfplaneSide::RightClosed
            } else {
                HalfplaneSide::LeftClosed
            }),
        }
    });
    let chords = grid_pairs(count).filter_map(move |(a, b)| {
        let (pa, pb) = (grid_position(a, count), grid_position(b, count));
        if edge_mask(pa, g) & edge_mask(pb, g) != 0 {
            return None;
        }
        Some(GridLine {
            anchor: pa,
            direction: Direction::reduced(pb.0 - pa.0, pb.1 - pa.1),
            only: None,
        })
    });
    edges.chain(chords)
}

/// Distinct boundary-line directions over all grid pairs, sorted.
pub fn orientation_classes(cfg: &SolverConfig) -> Vec<Direction> {
    orientation_classes_for(cfg.grid_count())
}

pub fn orientation_classes_for(count: usize) -> Vec<Direction> {
    let mut out: Vec<Direction> = grid_pairs(count)
        .map(|(a, b)| {
            let (pa, pb) = (grid_position(a, count), grid_position(b, count));
            Direction::reduced(pb.0 - pa.0, pb.1 - pa.1)
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn grid_on_unit_square_with_four_points() {
        let g = boundary_grid(&Square::new(0.5, 0.5, 1.0), 4).unwrap();
        assert_eq!(g, vec![[0., 0.], [1., 0.], [1., 1.], [0., 1.]]);
    }

    #[test]
    fn grid_of_eight_hits_corners_and_midpoints() {
        let g = boundary_grid(&Square::new(1., 1., 2.), 8).unwrap();
        let want = [
            [0., 0.],
            [1., 0.],
            [2., 0.],
            [2., 1.],
            [2., 2.],
            [1., 2.],
            [0., 2.],
            [0., 1.],
        ];
        assert_eq!(g, want);
        for k in 0..8 {
            let (a, b) = (g[k], g[(k + 1) % 8]);
            assert_eq!((a[0] - b[0]).hypot(a[1] - b[1]), 1.0);
        }
    }

    #[test]
    fn guaranteed_spacing_beats_required_resolution() {
        let g = boundary_grid(&Square::new(0.5, 0.5, 1.0), GUARANTEED_GRID).unwrap();
        let spacing = (g[1][0] - g[0][0]).hypot(g[1][1] - g[0][1]);
        assert!((spacing - 4.0 / 18001.0).abs() < 1e-15);
        assert!(spacing < (1.0 / 250.0) / 18.0);
        assert!((spacing - 2.2221e-4).abs() < 1e-8);
    }

    #[test]
    fn grid_rejects_tiny_counts() {
        assert!(matches!(
            boundary_grid(&Square::new(0., 0., 1.), 3),
            Err(Error::ConfigError(_))
        ));
        assert!(matches!(
            SolverConfig::practical(4).validate(),
            Err(Error::ConfigError(_))
        ));
        assert!(SolverConfig::practical(5).validate().is_ok());
        assert!(SolverConfig::paper().validate().is_ok());
        let bad = SolverConfig {
            c1: 0.0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn pair_counts() {
        assert_eq!(grid_pairs(4).count() * 2, 12);
        for g in [5usize, 9, 64] {
            assert_eq!(grid_pairs(g).count() * 2, g * (g - 1));
        }
        let full_lines = GUARANTEED_GRID as u64 * (GUARANTEED_GRID as u64 - 1) / 2;
        assert_eq!(full_lines, 162_009_000);
    }

    #[test]
    fn guaranteed_profile_streams_lazily() {
        let sq = Square::new(0., 0., 1.);
        let first: Vec<Candidate> = halfplanes_for(&sq, &SolverConfig::paper())
            .take(10)
            .collect();
        assert_eq!(first.len(), 10);
    }

    #[test]
    fn four_point_classes() {
        let c = orientation_classes_for(4);
        assert_eq!(c.len(), 4);
        let mut angles: Vec<f64> = c.iter().map(|d| d.angle().to_degrees()).collect();
        angles.sort_by(f64::total_cmp);
        for (a, want) in angles.iter().zip([0.0, 45.0, 90.0, 135.0]) {
            assert!((a - want).abs() < 1e-12);
        }
    }

    #[test]
    fn classes_bounded_and_square_independent() {
        for g in [5usize, 16, 64] {
            let c = orientation_classes_for(g);
            assert!(c.len() <= g * (g - 1) / 2);
            let dirs = |sq: Square| -> HashSet<Direction> {
                halfplanes_with_count(sq, g)
                    .map(|c| c.halfplane.direction)
                    .collect()
            };
            let a = dirs(Square::new(0., 0., 1.));
            let b = dirs(Square::new(3., -2., 7.));
            assert_eq!(a, b);
            assert!(a.iter().all(|d| c.binary_search(d).is_ok()));
        }
    }

    #[test]
    fn stream_is_deterministic() {
        let sq = Square::new(0.3, 0.1, 2.0);
        let a: Vec<Candidate> = halfplanes_with_count(sq, 12).collect();
        let b: Vec<Candidate> = halfplanes_with_count(sq, 12).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn halfplanes_are_closed_and_split_the_square() {
        let sq = Square::new(0.5, 0.5, 1.0);
        for c in halfplanes_with_count(sq, 8) {
            let h = c.halfplane;
            assert!(h.contains(h.anchor[0], h.anchor[1]));
            let flipped = Halfplane {
                side: h.opposite_side(),
                ..h
            };
            assert!(flipped.contains(h.anchor[0], h.anchor[1]));
        }
        // Edge lines keep the whole square.
        for c in halfplanes_with_count(sq, 8).take(4) {
            assert!(c.halfplane.contains(0.5, 0.5));
        }
    }

    #[test]
    fn membership_matches_cross_product() {
        let sq = Square::new(0., 0., 2.);
        let pts = [(-0.3, 0.2), (0.7, -0.9), (0.0, 0.0), (0.95, 0.95)];
        for c in halfplanes_with_count(sq, 9) {
            let h = c.halfplane;
            let d = h.direction.unit();
            for &(x, y) in &pts {
                let cross = d[0] * (y - h.anchor[1]) - d[1] * (x - h.anchor[0]);
                if cross.abs() > 1e-9 {
                    let left = cross > 0.0;
                    let want = left == (h.side == HalfplaneSide::LeftClosed);
                    assert_eq!(h.contains(x, y), want);
                }
            }
        }
    }

    #[test]
    fn direction_reduction() {
        assert_eq!(Direction::reduced(-4, -6), Direction { dx: 2, dy: 3 });
        assert_eq!(Direction::reduced(0, -5), Direction { dx: 0, dy: 1 });
        assert_eq!(Direction::reduced(-3, 0), Direction { dx: 1, dy: 0 });
    }
}
