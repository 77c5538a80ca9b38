//! Seeded random point sets.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    /// Unit square.
    Uniform,
    /// Two to four small disks spread over a 10 × 10 box.
    Clusters,
    /// Unit circle.
    Circle,
    /// Two isotropic normal blobs.
    Gaussians,
}

impl Distribution {
    pub const ALL: [Distribution; 4] = [
        Distribution::Uniform,
        Distribution::Clusters,
        Distribution::Circle,
        Distribution::Gaussians,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Distribution::Uniform => "uniform",
            Distribution::Clusters => "clusters",
            Distribution::Circle => "circle",
            Distribution::Gaussians => "gaussians",
        }
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Distribution::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::ConfigError(format!("unknown distribution {s:?}")))
    }
}

/// `n` points from `dist`, a pure function of `(dist, n, seed)`.
pub fn generate(dist: Distribution, n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match dist {
        Distribution::Uniform => (0..n)
            .map(|i| Point::new(rng.gen(), rng.gen(), i))
            .collect(),
        Distribution::Circle => (0..n)
            .map(|i| {
                let t = rng.gen_range(0.0..2.0 * PI);
                Point::new(t.cos(), t.sin(), i)
            })
            .collect(),
        Distribution::Clusters => {
            let k = rng.gen_range(2..=4);
            let centers: Vec<(f64, f64, f64)> = (0..k)
                .map(|_| {
                    (
                        rng.gen_range(0.0..10.0),
                        rng.gen_range(0.0..10.0),
                        rng.gen_range(0.3..1.0),
                    )
                })
                .collect();
            (0..n)
                .map(|i| {
                    let (cx, cy, r) = centers[i % k];
                    let t = rng.gen_range(0.0..2.0 * PI);
                    let d = r * rng.gen::<f64>().sqrt();
                    Point::new(cx + d * t.cos(), cy + d * t.sin(), i)
                })
                .collect()
        }
        Distribution::Gaussians => {
            let normal = Normal::new(0.0, 1.0).expect("unit normal");
            let gap = rng.gen_range(2.0..6.0);
            (0..n)
                .map(|i| {
                    let off = if i % 2 == 0 { 0.0 } else { gap };
                    Point::new(off + normal.sample(&mut rng), normal.sample(&mut rng), i)
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_sized() {
        for d in Distribution::ALL {
            let a = generate(d, 50, 7);
            assert_eq!(a.len(), 50);
            assert_eq!(a, generate(d, 50, 7));
            assert_ne!(a, generate(d, 50, 8));
            assert!(a.iter().enumerate().all(|(i, p)| p.id == i));
        }
    }

    #[test]
    fn circle_points_lie_on_the_circle() {
        for p in generate(Distribution::Circle, 100, 3) {
            assert!((p.x.hypot(p.y) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn names_round_trip() {
        for d in Distribution::ALL {
            assert_eq!(d.name().parse::<Distribution>().unwrap(), d);
        }
        assert!("spiral".parse::<Distribution>().is_err());
    }
}
