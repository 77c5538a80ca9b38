use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use perisplit::candidates::SolverConfig;
use perisplit::gen::{generate, Distribution};
use perisplit::oracle::LINE_ORACLE_MAX_N;

use crate::{io, solve, Algo, Failure};

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub algo: Algo,
    pub n: usize,
    pub seed: u64,
    pub wall_ms: f64,
    pub cost: f64,
}

/// Least-squares slope of `ln(mean time)` against `ln n`.
pub fn loglog_slope(rows: &[Row], algo: Algo) -> Option<f64> {
    let mut by_n: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.algo == algo) {
        by_n.entry(r.n).or_default().push(r.wall_ms);
    }
    let pts: Vec<(f64, f64)> = by_n
        .iter()
        .map(|(&n, t)| {
            (
                (n as f64).ln(),
                (t.iter().sum::<f64>() / t.len() as f64).ln(),
            )
        })
        .collect();
    fit_slope(&pts)
}

pub fn fit_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn run(
    algos: &[Algo],
    sizes: &[usize],
    seeds: u64,
    dist: Distribution,
    eps: f64,
    cfg: &SolverConfig,
    out: &Path,
) -> Result<(), Failure> {
    let mut rows = Vec::new();
    let mut mismatches = Vec::new();
    for &n in sizes {
        for seed in 0..seeds {
            let pts = generate(dist, n, seed);
            let mut costs = Vec::new();
            for &algo in algos {
                if algo == Algo::Oracle && n > LINE_ORACLE_MAX_N {
                    eprintln!("skip oracle at n={n}");
                    continue;
                }
                let start = Instant::now();
                let (p, _) = solve(&pts, algo, eps, cfg)?;
                let wall_ms = start.elapsed().as_secs_f64() * 1e3;
                if algo != Algo::Approx {
                    costs.push((algo, p.cost));
                }
                rows.push(Row {
                    algo,
                    n,
                    seed,
                    wall_ms,
                    cost: p.cost,
                });
            }
            if let [(a, ca), (b, cb), ..] = costs[..] {
                if (ca - cb).abs() > 1e-9 * ca.abs().max(cb.abs()) {
                    mismatches.push(format!(
                        "n={n} seed={seed}: {} {ca} vs {} {cb}",
                        a.name(),
                        b.name()
                    ));
                }
            }
        }
    }
    let mut csv = String::from("algo,n,seed,wall_ms,cost\n");
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{:.3},{}",
            r.algo.name(),
            r.n,
            r.seed,
            r.wall_ms,
            r.cost
        )
        .unwrap();
    }
    io::write(out, &csv)?;
    for &algo in algos {
        match loglog_slope(&rows, algo) {
            Some(s) => println!("slope {} {s:.3}", algo.name()),
            None => println!("slope {} n/a", algo.name()),
        }
    }
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(Failure::mismatch(format!(
            "OptimalityMismatch: {}",
            mismatches.join("; ")
        )))
    }
}
