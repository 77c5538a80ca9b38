//! Brute-force ground truth and separation checks.

use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;

use serde::Serialize;

use crate::convex::tangent_diagnostics;
use crate::error::{Error, Result};
use crate::geometry::{dedup_locations, orient, Orientation, Point};
use crate::hull::{convex_hull, cycle_length, hull_of_sorted};
use crate::par;
use crate::partition::{Partition, Provenance};

pub const LINE_ORACLE_MAX_N: usize = 512;
pub const EXHAUSTIVE_MAX_N: usize = 14;
pub const C_SEP: f64 = 1.0 / 250.0;

fn guard(n: usize, limit: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    if n > limit {
        return Err(Error::OracleTooLarge { n, limit });
    }
    Ok(())
}

/// Hull perimeter of the masked (or unmasked) points, taken in the given
/// lexicographic order.
fn side_perimeter(pts: &[Point], mask: &[u64], want: bool) -> f64 {
    let v: Vec<Point> = pts
        .iter()
        .enumerate()
        .filter(|(k, _)| (mask[k / 64] >> (k % 64) & 1 == 1) == want)
        .map(|(_, p)| *p)
        .collect();
    cycle_length(&hull_of_sorted(&v))
}

/// Best partition among those induced by a line. Every line through two
/// distinct locations is tilted and shifted infinitesimally in all ways, so
/// the points on it may split into any prefix or suffix along the line.
pub fn oracle_line_partitions(points: &[Point]) -> Result<Partition> {
    guard(points.len(), LINE_ORACLE_MAX_N)?;
    let (reps, groups) = dedup_locations(points);
    let m = reps.len();
    if m == 1 {
        return Ok(all_coincident(points));
    }
    let words = m.div_ceil(64);
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut on_line: Vec<(f64, usize)> = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let (a, b) = (&reps[i], &reps[j]);
            let (dx, dy) = (b.x - a.x, b.y - a.y);
            let mut left = vec![0u64; words];
            on_line.clear();
            for (k, p) in reps.iter().enumerate() {
                match orient(a, b, p) {
                    Orientation::Left => left[k / 64] |= 1 << (k % 64),
                    Orientation::Collinear => {
                        on_line.push(((p.x - a.x) * dx + (p.y - a.y) * dy, k))
                    }
                    Orientation::Right => {}
                }
            }
            on_line.sort_by(|x, y| x.0.total_cmp(&y.0));
            let c = on_line.len();
            let mut variants: Vec<Vec<usize>> = (0..=c)
                .map(|t| on_line[..t].iter().map(|x| x.1).collect())
                .collect();
            variants.extend((1..c).map(|t| on_line[t..].iter().map(|x| x.1).collect()));
            for extra in variants {
                let mut mask = left.clone();
                for k in extra {
                    mask[k / 64] |= 1 << (k % 64);
                }
                // Store the side holding location 0.
                if mask[0] & 1 == 0 {
                    for (w, word) in mask.iter_mut().enumerate() {
                        let valid = if w + 1 == words && m % 64 != 0 {
                            (1u64 << (m % 64)) - 1
                        } else {
                            u64::MAX
                        };
                        *word = !*word & valid;
                    }
                }
                let count: u32 = mask.iter().map(|w| w.count_ones()).sum();
                if count == 0 || count as usize == m {
                    continue;
                }
                seen.insert(mask);
            }
        }
    }
    let masks: Vec<Vec<u64>> = seen.into_iter().collect();
    let costs = par::map(&masks, true, |mask| {
        side_perimeter(&reps, mask, true) + side_perimeter(&reps, mask, false)
    });
    let lift = |mask: &[u64]| {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        let (mut pa, mut pb) = (Vec::new(), Vec::new());
        for (k, g) in groups.iter().enumerate() {
            if mask[k / 64] >> (k % 64) & 1 == 1 {
                a.extend_from_slice(g);
                pa.push(reps[k]);
            } else {
                b.extend_from_slice(g);
                pb.push(reps[k]);
            }
        }
        let per = |v: &[Point]| cycle_length(&hull_of_sorted(v));
        Partition::new(a, b, per(&pa), per(&pb), Provenance::Oracle)
    };
    let lo = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let mut best: Option<Partition> = None;
    for (mask, &c) in masks.iter().zip(&costs) {
        if c - lo <= 1e-12 * lo.abs().max(f64::MIN_POSITIVE) {
            let p = lift(mask);
            best = Some(match best {
                Some(b) => Partition::min(b, p),
                None => p,
            });
        }
    }
    Ok(best.expect("at least one line partition"))
}

fn all_coincident(points: &[Point]) -> Partition {
    let mut ids: Vec<usize> = points.iter().map(|p| p.id).collect();
    ids.sort_unstable();
    let first = ids.remove(0);
    Partition::new(vec![first], ids, 0.0, 0.0, Provenance::Oracle)
}

/// Best partition over all `2^(n-1) - 1` bipartitions.
pub fn oracle_exhaustive(points: &[Point]) -> Result<Partition> {
    guard(points.len(), EXHAUSTIVE_MAX_N)?;
    let n = points.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| points[a].lex_cmp(&points[b]));
    let sorted: Vec<Point> = order.iter().map(|&k| points[k]).collect();
    // Bit k of a mask refers to `sorted[k]`; the point with input index 0
    // is always on the masked side.
    let anchor = order.iter().position(|&k| k == 0).unwrap();
    let full = (1u64 << n) - 1;
    let mut best: Option<Partition> = None;
    let mut best_cost = f64::INFINITY;
    for m in 0..(1u64 << (n - 1)) {
        // Spread the n-1 free bits around the anchor bit.
        let low = m & ((1 << anchor) - 1);
        let high = (m >> anchor) << (anchor + 1);
        let mask = low | high | (1 << anchor);
        if mask == full {
            continue;
        }
        let c = side_perimeter(&sorted, &[mask], true) + side_perimeter(&sorted, &[mask], false);
        if c <= best_cost * (1.0 + 1e-12) {
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for (k, p) in sorted.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    a.push(p.id);
                } else {
                    b.push(p.id);
                }
            }
            let pa = side_perimeter(&sorted, &[mask], true);
            let p = Partition::new(a, b, pa, c - pa, Provenance::Oracle);
            best = Some(match best {
                Some(b) => Partition::min(b, p),
                None => p,
            });
            best_cost = best.as_ref().unwrap().cost;
        }
    }
    Ok(best.expect("n ≥ 2"))
}

/// The separation bound function: `f(φ) = [s4/(1+s4)]·[s2/(1+s2)]·[(1−cos(φ/4))/2]`
/// with `s4 = sin(φ/4)` and `s2 = sin(φ/2)`.
pub fn f_sep(phi: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&phi) {
        return Err(Error::Domain(format!("angle {phi} outside [0, π]")));
    }
    let s4 = (phi / 4.0).sin();
    let s2 = (phi / 2.0).sin();
    Ok(s4 / (1.0 + s4) * (s2 / (1.0 + s2)) * ((1.0 - (phi / 4.0).cos()) / 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparationReport {
    pub angle: f64,
    pub distance: f64,
    pub per_min: f64,
    pub satisfied: bool,
}

/// Checks that a partition's hulls are separated by a wide angle or a long
/// distance: `β ≥ π/6` or `dist ≥ min(per)/250`, each up to `1e-9`.
pub fn check_separation_theorem(
    points: &[Point],
    partition: &Partition,
) -> Result<SeparationReport> {
    let by_id: HashMap<usize, Point> = points.iter().map(|p| (p.id, *p)).collect();
    let side = |ids: &[usize]| -> Result<Vec<Point>> {
        ids.iter()
            .map(|i| by_id.get(i).copied().ok_or(Error::EmptySet))
            .collect()
    };
    let a = convex_hull(&side(&partition.left_ids)?)?;
    let b = convex_hull(&side(&partition.right_ids)?)?;
    let d = tangent_diagnostics(&a, &b)?;
    let per_min = a.perimeter().min(b.perimeter());
    let satisfied = d.separation_angle >= PI / 6.0 - 1e-9
        || d.separation_distance >= C_SEP * per_min - 1e-9 * per_min;
    Ok(SeparationReport {
        angle: d.separation_angle,
        distance: d.separation_distance,
        per_min,
        satisfied,
    })
}
