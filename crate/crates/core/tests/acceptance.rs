//! End-to-end acceptance checks. Runs as a plain binary so the summary lines
//! are always printed.

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::Instant;

use perisplit::approx::{coreset_constant, solve_approx_report, ApproxStep};
use perisplit::candidates::{orientation_classes_for, Halfplane, HalfplaneSide, SolverConfig};
use perisplit::convex::hull_of_hulls_perimeter;
use perisplit::exact::{best_singleton_removal, solve_exact};
use perisplit::gen::{generate, Distribution};
use perisplit::hull::{convex_hull, hull_perimeter, ConvexChain};
use perisplit::oracle::{check_separation_theorem, oracle_exhaustive, oracle_line_partitions};
use perisplit::partition::Partition;
use perisplit::perimeter_query::{per_direct, PerimeterIndex, QueryRegion};
use perisplit::quadtree::Quadtree;
use perisplit::Point;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const REL: f64 = 1e-9;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL * a.abs().max(b.abs())
}

fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    sxy / sxx
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Oracle-optimal partitions from the exactness sweep, reused by later checks.
struct Solved {
    points: Vec<Point>,
    optimum: Partition,
}

fn exactness(solved: &mut Vec<Solved>) -> Outcome {
    let cfg = SolverConfig::default();
    let mut mismatches = Vec::new();
    let mut solve_ms = 0.0;
    let mut count = 0;
    for dist in [
        Distribution::Uniform,
        Distribution::Clusters,
        Distribution::Circle,
    ] {
        for n in [8usize, 16, 32, 64] {
            for seed in 0..200u64 {
                let pts = generate(dist, n, 1000 * n as u64 + seed);
                let t = Instant::now();
                let p = solve_exact(&pts, &cfg).expect("solve");
                solve_ms += ms(t);
                let o = oracle_line_partitions(&pts).expect("oracle");
                if !close(p.cost, o.cost) {
                    mismatches.push(format!(
                        "{} n={n} seed={seed}: {} vs {}",
                        dist.name(),
                        p.cost,
                        o.cost
                    ));
                }
                count += 1;
                solved.push(Solved {
                    points: pts,
                    optimum: o,
                });
            }
        }
    }
    let pass = mismatches.is_empty() && solve_ms < 60_000.0;
    outcome(
        pass,
        format!(
            "{count} instances, {} mismatches, solve_exact total {:.1} s (limit 60 s){}",
            mismatches.len(),
            solve_ms / 1e3,
            mismatches
                .first()
                .map(|m| format!("; first: {m}"))
                .unwrap_or_default()
        ),
    )
}

fn line_sufficiency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut bad = 0;
    for k in 0..500u64 {
        let n = rng.gen_range(2..=12);
        let dist = Distribution::ALL[(k % 4) as usize];
        let pts = generate(dist, n, 50_000 + k);
        let e = oracle_exhaustive(&pts).expect("exhaustive");
        let l = oracle_line_partitions(&pts).expect("line");
        if !close(e.cost, l.cost) {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("500 instances, {bad} disagreements"))
}

fn separation(solved: &[Solved]) -> Outcome {
    let mut violations = 0;
    let (mut by_angle, mut by_distance) = (0, 0);
    for s in solved {
        let r = check_separation_theorem(&s.points, &s.optimum).expect("disjoint optimum");
        if !r.satisfied {
            violations += 1;
        } else if r.angle >= PI / 6.0 - 1e-9 {
            by_angle += 1;
        } else {
            by_distance += 1;
        }
    }
    outcome(
        violations == 0,
        format!(
            "{} optima, {violations} violations ({by_angle} by angle, {by_distance} by distance only)",
            solved.len()
        ),
    )
}

fn random_family(rng: &mut ChaCha8Rng) -> Vec<ConvexChain> {
    let k = rng.gen_range(1..=20);
    let budget = 2000 / k;
    let mut disks: Vec<(f64, f64, f64)> = Vec::new();
    while disks.len() < k {
        let d = (
            rng.gen_range(0.0..100.0),
            rng.gen_range(0.0..100.0),
            rng.gen_range(0.5..10.0),
        );
        if disks
            .iter()
            .all(|e| (d.0 - e.0).hypot(d.1 - e.1) > d.2 + e.2)
        {
            disks.push(d);
        }
    }
    let mut id = 0;
    disks
        .iter()
        .map(|&(cx, cy, r)| {
            let m = rng.gen_range(1..=budget);
            let on_circle = rng.gen_bool(0.5);
            let pts: Vec<Point> = (0..m)
                .map(|_| {
                    let t = rng.gen_range(0.0..TAU);
                    let s = if on_circle {
                        r
                    } else {
                        r * rng.gen::<f64>().sqrt()
                    };
                    id += 1;
                    Point::new(cx + s * t.cos(), cy + s * t.sin(), id)
                })
                .collect();
            convex_hull(&pts).expect("nonempty")
        })
        .collect()
}

fn hull_of_hulls() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = 0;
    let mut max_vertices = 0;
    for _ in 0..1000 {
        let fam = random_family(&mut rng);
        let views: Vec<_> = fam.iter().map(|c| c.view()).collect();
        let all: Vec<Point> = fam
            .iter()
            .flat_map(|c| c.vertices().iter().copied())
            .collect();
        max_vertices = max_vertices.max(all.len());
        let got = hull_of_hulls_perimeter(&views).expect("family");
        if !close(got, hull_perimeter(&all)) {
            bad += 1;
        }
    }
    outcome(
        bad == 0,
        format!("1000 families (up to {max_vertices} vertices), {bad} mismatches"),
    )
}

/// Square spanning the middle of the unit square, cut by a halfplane through
/// its center region.
fn central_query(rng: &mut ChaCha8Rng, dir: perisplit::candidates::Direction) -> QueryRegion {
    let s: f64 = rng.gen_range(0.4..0.6);
    let (x0, y0) = (rng.gen_range(0.15..0.35), rng.gen_range(0.15..0.35));
    let h = Halfplane {
        anchor: [x0 + s / 2.0 + rng.gen_range(-0.05..0.05), y0 + s / 2.0],
        direction: dir,
        side: if rng.gen() {
            HalfplaneSide::LeftClosed
        } else {
            HalfplaneSide::RightClosed
        },
    };
    QueryRegion::rect(x0, y0, x0 + s, y0 + s).with_halfplane(h)
}

fn range_tree() -> Outcome {
    const C: f64 = 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let dirs = orientation_classes_for(16);
    let mut bad = 0;
    let mut over = 0;
    let mut pairs = 0;
    let mut fit = Vec::new();
    for n in [16usize, 32, 64, 128, 256, 512, 1024, 2000] {
        let mut total_nodes = 0usize;
        let mut queries = 0usize;
        for inst in 0..25u64 {
            let pts = generate(Distribution::Uniform, n, 70_000 + 100 * n as u64 + inst);
            let dir = dirs[rng.gen_range(0..dirs.len())];
            let idx = PerimeterIndex::build(&pts, dir).expect("index");
            let bound = C * (n as f64).log2().powi(3);
            for _ in 0..50 {
                let q = central_query(&mut rng, dir);
                let (inside, outside) = per_direct(&pts, &q);
                let a = idx.per_inside(&q).expect("inside");
                let b = idx.per_outside(&q).expect("outside");
                if !close(a, inside) || !close(b, outside) {
                    bad += 1;
                }
                let nodes = idx.decompose(&q).expect("decompose").len();
                if nodes as f64 > bound {
                    over += 1;
                }
                total_nodes += nodes;
                queries += 1;
                pairs += 1;
            }
        }
        let mean = total_nodes as f64 / queries as f64;
        fit.push(((n as f64).log2().ln(), mean.ln()));
    }
    let exponent = fit_slope(&fit);
    let pass = bad == 0 && over == 0 && (2.5..=3.5).contains(&exponent);
    outcome(
        pass,
        format!(
            "{pairs} pairs, {bad} value mismatches, {over} queries above log2(n)^3 nodes, fitted exponent {exponent:.2} (want 2.5..3.5)"
        ),
    )
}

fn approximation() -> Outcome {
    let cfg = SolverConfig::default();
    let exact = |p: &[Point]| solve_exact(p, &cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad = 0;
    let mut k_fit: f64 = 0.0;
    let mut runs = 0;
    for inst in 0..200u64 {
        let n = rng.gen_range(20..=200);
        let dist = Distribution::ALL[(inst % 4) as usize];
        let pts = generate(dist, n, 80_000 + inst);
        let opt = exact(&pts).expect("exact").cost;
        for eps in [0.5, 0.1, 0.02] {
            let r = solve_approx_report(&pts, eps, exact).expect("approx");
            if r.partition.cost > (1.0 + eps) * opt + 1e-9 || r.partition.len() != n {
                bad += 1;
            }
            if let ApproxStep::Coreset { reps, .. } = r.step {
                k_fit = k_fit.max(reps as f64 * eps * eps);
            }
            runs += 1;
        }
    }
    let k = coreset_constant();
    outcome(
        bad == 0 && k_fit <= k,
        format!("{runs} runs, {bad} over (1+eps)·opt, fitted K {k_fit:.1} <= {k:.1}"),
    )
}

fn scaling() -> Outcome {
    let cfg = SolverConfig::default();
    let mut exact_fit = Vec::new();
    let mut exact_at_8192 = 0.0;
    for e in 10..=16u32 {
        let n = 1usize << e;
        let mut total = 0.0;
        for seed in 0..3u64 {
            let pts = generate(Distribution::Uniform, n, 90_000 + seed);
            let t = Instant::now();
            solve_exact(&pts, &cfg).expect("solve");
            total += ms(t);
        }
        let mean = total / 3.0;
        if n == 8192 {
            exact_at_8192 = mean;
        }
        exact_fit.push(((n as f64).ln(), mean.ln()));
    }
    let mut oracle_fit = Vec::new();
    for n in [32usize, 64, 128, 256] {
        let pts = generate(Distribution::Uniform, n, 91_000);
        let t = Instant::now();
        oracle_line_partitions(&pts).expect("oracle");
        oracle_fit.push(((n as f64).ln(), ms(t).ln()));
    }
    let slope = fit_slope(&exact_fit);
    let oslope = fit_slope(&oracle_fit);
    let (x1, y1) = *oracle_fit.last().unwrap();
    let oracle_8192 = (y1 + oslope * ((8192f64).ln() - x1)).exp();
    let ratio = oracle_8192 / exact_at_8192;
    outcome(
        slope < 1.5 && ratio >= 10.0,
        format!(
            "exact slope {slope:.2} (< 1.5), oracle slope {oslope:.2}, n=8192: exact {:.2} s vs oracle extrapolated {:.0} s ({ratio:.0}x, want >= 10x)",
            exact_at_8192 / 1e3,
            oracle_8192 / 1e3
        ),
    )
}

fn singleton() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bad = 0;
    for inst in 0..100u64 {
        let n = rng.gen_range(3..=200);
        let dist = Distribution::ALL[(inst % 4) as usize];
        let pts = generate(dist, n, 100_000 + inst);
        let got = best_singleton_removal(&pts).expect("singleton").cost;
        let hull = convex_hull(&pts).expect("hull");
        let brute = hull
            .vertices()
            .iter()
            .map(|v| {
                let rest: Vec<Point> = pts.iter().filter(|p| p.id != v.id).copied().collect();
                hull_perimeter(&rest)
            })
            .fold(f64::INFINITY, f64::min);
        if !close(got, brute) {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("100 instances, {bad} mismatches"))
}

fn structure(solved: &[Solved]) -> Outcome {
    const C_NODES: usize = 8;
    const C_BASE: usize = 30;
    let mut worst_nodes: f64 = 0.0;
    let mut worst_base: f64 = 0.0;
    let mut audited = 0;
    let mut missing = 0;
    for s in solved {
        let n = s.points.len();
        let tree = Quadtree::build(&s.points).expect("tree");
        let base = tree.base_squares();
        worst_nodes = worst_nodes.max(tree.len() as f64 / n as f64);
        worst_base = worst_base.max(base.len() as f64 / n as f64);
        let r = check_separation_theorem(&s.points, &s.optimum).expect("disjoint");
        if r.angle >= PI / 6.0 {
            continue;
        }
        let o = &s.optimum;
        let small = if o.per_left <= o.per_right {
            &o.left_ids
        } else {
            &o.right_ids
        };
        let p2: Vec<Point> = small.iter().map(|&i| s.points[i]).collect();
        let hull = convex_hull(&p2).expect("hull");
        let diam = hull.diameter();
        if diam == 0.0 {
            continue;
        }
        audited += 1;
        let good = base.iter().any(|sq| {
            diam / 4.0 <= sq.size
                && sq.size <= 4.0 * diam
                && p2.iter().any(|p| sq.scaled(1.0 + 1e-9).contains(p.x, p.y))
        });
        if !good {
            missing += 1;
        }
    }
    let pass = worst_nodes <= C_NODES as f64 && worst_base <= C_BASE as f64 && missing == 0;
    outcome(
        pass,
        format!(
            "nodes/n max {worst_nodes:.2} (<= {C_NODES}), base/n max {worst_base:.2} (<= {C_BASE}), good base square found for {}/{audited} narrow-angle optima",
            audited - missing
        ),
    )
}

type Check = Box<dyn FnOnce(&mut Vec<Solved>) -> Outcome>;

fn main() -> ExitCode {
    let mut solved = Vec::new();
    let checks: Vec<(&str, Check)> = vec![
        ("1 exactness vs line oracle", Box::new(exactness)),
        (
            "2 line partitions suffice",
            Box::new(|_| line_sufficiency()),
        ),
        ("3 separation audit", Box::new(|s| separation(s))),
        ("4 hull of hulls", Box::new(|_| hull_of_hulls())),
        ("5 range tree", Box::new(|_| range_tree())),
        ("6 approximation", Box::new(|_| approximation())),
        ("7 scaling", Box::new(|_| scaling())),
        ("8 singleton removal", Box::new(|_| singleton())),
        ("9 structural audits", Box::new(|s| structure(s))),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let t = Instant::now();
        let o = check(&mut solved);
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {name}: {verdict} ({:.1} s) {}",
            ms(t) / 1e3,
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("acceptance: all 9 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
