//! Approximate solver: bounding-box case analysis, then an exact solve on a
//! grid coreset.

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{bounding_box, Point};
use crate::hull::hull_perimeter;
use crate::partition::{Partition, Provenance};

/// `64·π·√2`, the ratio between the box width over ε and the cell size.
pub fn cell_ratio() -> f64 {
    64.0 * std::f64::consts::PI * std::f64::consts::SQRT_2
}

/// Coreset size constant: at most `K / ε²` representatives for `ε ≤ 1`.
pub fn coreset_constant() -> f64 {
    (cell_ratio() + 1.0).powi(2)
}

/// Cell size used for a box of long side `w`.
pub fn cell_size_for(w: f64, eps: f64) -> f64 {
    eps * w / cell_ratio()
}

/// One representative per occupied grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCoreset {
    pub cell_size: f64,
    /// Representative ids, ascending.
    pub reps: Vec<usize>,
    /// `members[k]` holds the ids sharing a cell with `reps[k]`, ascending.
    pub members: Vec<Vec<usize>>,
}

impl GridCoreset {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn members_of(&self, rep: usize) -> Option<&[usize]> {
        self.reps
            .binary_search(&rep)
            .ok()
            .map(|k| self.members[k].as_slice())
    }
}

/// Buckets points into square cells of side `cell_size` anchored at the
/// bounding box corner. The lowest id in each cell represents it.
pub fn grid_coreset(points: &[Point], cell_size: f64) -> Result<GridCoreset> {
    if !(cell_size > 0.0 && cell_size.is_finite()) {
        return Err(Error::ConfigError(format!("cell size {cell_size}")));
    }
    let Some((x0, y0, x1, y1)) = bounding_box(points) else {
        return Ok(GridCoreset {
            cell_size,
            reps: Vec::new(),
            members: Vec::new(),
        });
    };
    let cols = (((x1 - x0) / cell_size).ceil() as i64 - 1).max(0);
    let rows = (((y1 - y0) / cell_size).ceil() as i64 - 1).max(0);
    let mut cells: FxHashMap<(i64, i64), Vec<usize>> = FxHashMap::default();
    for p in points {
        let i = (((p.x - x0) / cell_size).floor() as i64).clamp(0, cols);
        let j = (((p.y - y0) / cell_size).floor() as i64).clamp(0, rows);
        cells.entry((i, j)).or_default().push(p.id);
    }
    let mut groups: Vec<Vec<usize>> = cells
        .into_values()
        .map(|mut g| {
            g.sort_unstable();
            g
        })
        .collect();
    groups.sort_unstable_by_key(|g| g[0]);
    Ok(GridCoreset {
        cell_size,
        reps: groups.iter().map(|g| g[0]).collect(),
        members: groups,
    })
}

/// Which rule produced the approximate answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ApproxStep {
    /// Only the outer vertical strips are occupied and the box is flat.
    OuterStrips,
    /// Only two opposite corner cells are occupied.
    Corners,
    /// Exact solve on the coreset, lifted back.
    Coreset { cell_size: f64, reps: usize },
    /// Coreset too small to split, solved exactly on the input.
    Direct,
}

#[derive(Debug, Clone)]
pub struct ApproxReport {
    pub partition: Partition,
    pub step: ApproxStep,
}

pub fn solve_approx<F>(points: &[Point], eps: f64, exact_solver: F) -> Result<Partition>
where
    F: Fn(&[Point]) -> Result<Partition>,
{
    solve_approx_report(points, eps, exact_solver).map(|r| r.partition)
}

pub fn solve_approx_report<F>(points: &[Point], eps: f64, exact_solver: F) -> Result<ApproxReport>
where
    F: Fn(&[Point]) -> Result<Partition>,
{
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::ConfigError(format!(
            "eps must be positive, got {eps}"
        )));
    }
    if points.len() < 2 {
        return Err(Error::TooFewPoints(points.len()));
    }
    if let Some(i) = points
        .iter()
        .position(|p| !p.x.is_finite() || !p.y.is_finite())
    {
        return Err(Error::NonFinite(i));
    }
    let (x0, y0, x1, y1) = bounding_box(points).ok_or(Error::EmptySet)?;
    let pts: Vec<Point> = if x1 - x0 < y1 - y0 {
        points.iter().map(|p| Point::new(p.y, p.x, p.id)).collect()
    } else {
        points.to_vec()
    };
    let (x0, y0, x1, y1) = bounding_box(&pts).ok_or(Error::EmptySet)?;
    let (w, h) = (x1 - x0, y1 - y0);
    if w == 0.0 {
        return Ok(ApproxReport {
            partition: exact_solver(points)?,
            step: ApproxStep::Direct,
        });
    }

    let col = |x: f64| quarter(x, x0, w);
    let row = |y: f64| quarter(y, y0, h);
    if pts.iter().all(|p| matches!(col(p.x), 0 | 3)) {
        if h <= w / 8.0 {
            let mask: Vec<bool> = pts.iter().map(|p| col(p.x) == 0).collect();
            return Ok(ApproxReport {
                partition: Partition::from_mask(&pts, &mask, Provenance::Approx),
                step: ApproxStep::OuterStrips,
            });
        }
        if pts.iter().all(|p| matches!(row(p.y), 0 | 3)) {
            let mut occupied = [false; 4];
            for p in &pts {
                occupied[corner(col(p.x), row(p.y))] = true;
            }
            if occupied.iter().filter(|&&o| o).count() == 2 {
                let first = corner(col(pts[0].x), row(pts[0].y));
                let mask: Vec<bool> = pts
                    .iter()
                    .map(|p| corner(col(p.x), row(p.y)) == first)
                    .collect();
                return Ok(ApproxReport {
                    partition: Partition::from_mask(&pts, &mask, Provenance::Approx),
                    step: ApproxStep::Corners,
                });
            }
        }
    }

    let cell_size = cell_size_for(w, eps);
    let core = grid_coreset(&pts, cell_size)?;
    if core.len() < 2 {
        return Ok(ApproxReport {
            partition: exact_solver(points)?,
            step: ApproxStep::Direct,
        });
    }
    let pos: FxHashMap<usize, usize> = pts.iter().enumerate().map(|(k, p)| (p.id, k)).collect();
    let reps: Vec<Point> = core
        .reps
        .iter()
        .enumerate()
        .map(|(k, id)| {
            let p = pts[pos[id]];
            Point::new(p.x, p.y, k)
        })
        .collect();
    let split = exact_solver(&reps)?;
    let mut mask = vec![false; pts.len()];
    for &k in &split.left_ids {
        for id in &core.members[k] {
            mask[pos[id]] = true;
        }
    }
    let (a, b): (Vec<Point>, Vec<Point>) = pts.iter().partition(|p| mask[pos[&p.id]]);
    let partition = Partition::new(
        a.iter().map(|p| p.id).collect(),
        b.iter().map(|p| p.id).collect(),
        hull_perimeter(&a),
        hull_perimeter(&b),
        Provenance::Approx,
    );
    Ok(ApproxReport {
        partition,
        step: ApproxStep::Coreset {
            cell_size,
            reps: core.len(),
        },
    })
}

/// Index of the half-open quarter `[k/4, (k+1)/4)` holding `v`; the far edge
/// belongs to the last quarter.
fn quarter(v: f64, lo: f64, len: f64) -> usize {
    if len == 0.0 {
        return 0;
    }
    (0..3)
        .find(|&k| v < lo + (k + 1) as f64 * len / 4.0)
        .unwrap_or(3)
}

fn corner(c: usize, r: usize) -> usize {
    usize::from(c == 3) * 2 + usize::from(r == 3)
}
