use serde::{Deserialize, Serialize};

use crate::candidates::Halfplane;
use crate::geometry::Point;
use crate::hull::hull_perimeter;
use crate::quadtree::Square;

/// Which part of the solver produced a partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// Separated by a line of orientation `j·π/7`.
    CanonicalOrientation {
        j: usize,
    },
    Singleton,
    Candidate {
        square: Square,
        halfplane: Halfplane,
    },
    Approx,
    Oracle,
}

/// A bipartition of the input ids. `left_ids` always holds the smallest id,
/// both id lists are sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub left_ids: Vec<usize>,
    pub right_ids: Vec<usize>,
    pub cost: f64,
    pub per_left: f64,
    pub per_right: f64,
    pub provenance: Provenance,
}

/// Relative tolerance under which two costs count as a tie.
pub const TIE_REL: f64 = 1e-12;

impl Partition {
    pub fn new(
        mut a: Vec<usize>,
        mut b: Vec<usize>,
        per_a: f64,
        per_b: f64,
        provenance: Provenance,
    ) -> Self {
        a.sort_unstable();
        b.sort_unstable();
        let a_first = match (a.first(), b.first()) {
            (Some(x), Some(y)) => x < y,
            (Some(_), None) => true,
            _ => false,
        };
        let (left_ids, right_ids, per_left, per_right) = if a_first {
            (a, b, per_a, per_b)
        } else {
            (b, a, per_b, per_a)
        };
        Self {
            left_ids,
            right_ids,
            cost: per_left + per_right,
            per_left,
            per_right,
            provenance,
        }
    }

    /// Splits `points` by the `in_a` mask and measures both hulls from scratch.
    pub fn from_mask(points: &[Point], in_a: &[bool], provenance: Provenance) -> Self {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (p, &m) in points.iter().zip(in_a) {
            if m {
                a.push(*p);
            } else {
                b.push(*p);
            }
        }
        Self::new(
            a.iter().map(|p| p.id).collect(),
            b.iter().map(|p| p.id).collect(),
            hull_perimeter(&a),
            hull_perimeter(&b),
            provenance,
        )
    }

    /// Deterministic order: lower cost first, exact ties broken by the
    /// lexicographically smaller `left_ids`.
    pub fn is_better_than(&self, other: &Partition) -> bool {
        let scale = self.cost.abs().max(other.cost.abs()).max(f64::MIN_POSITIVE);
        if (self.cost - other.cost).abs() > TIE_REL * scale {
            return self.cost < other.cost;
        }
        self.left_ids < other.left_ids
    }

    pub fn min(a: Partition, b: Partition) -> Partition {
        if b.is_better_than(&a) {
            b
        } else {
            a
        }
    }

    pub fn len(&self) -> usize {
        self.left_ids.len() + self.right_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
