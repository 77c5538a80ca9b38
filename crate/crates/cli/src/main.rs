//! `perisplit` command-line tool.

mod bench;
mod io;
mod render;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use perisplit::approx::solve_approx;
use perisplit::candidates::{Backend, Profile, SolverConfig};
use perisplit::exact::{solve_exact, solve_exact_report};
use perisplit::gen::{generate, Distribution};
use perisplit::hull::hull_perimeter;
use perisplit::oracle::{check_separation_theorem, oracle_line_partitions};
use perisplit::partition::Partition;
use perisplit::Point;

use crate::io::{ResultFile, RunConfig, Timings};
use crate::render::Overlays;

pub const EXIT_INVALID: u8 = 1;
pub const EXIT_MISMATCH: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

/// Error carrying the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn mismatch(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_MISMATCH,
            message: message.into(),
        }
    }
}

impl From<perisplit::Error> for Failure {
    fn from(e: perisplit::Error) -> Self {
        let name = format!("{e:?}");
        let name = name
            .split(['(', ' ', '{'])
            .next()
            .unwrap_or_default()
            .to_string();
        Failure::input(format!("{name}: {e}"))
    }
}

#[derive(Parser)]
#[command(
    name = "perisplit",
    version,
    about = "Split a planar point set into two parts of minimum total hull perimeter"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Exact,
    Approx,
    Oracle,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Exact => "exact",
            Algo::Approx => "approx",
            Algo::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProfileArg {
    Paper,
    Practical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Auto,
    Direct,
    Rangetree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DistArg {
    Uniform,
    Clusters,
    Circle,
    Gaussians,
}

impl From<DistArg> for Distribution {
    fn from(d: DistArg) -> Self {
        match d {
            DistArg::Uniform => Distribution::Uniform,
            DistArg::Clusters => Distribution::Clusters,
            DistArg::Circle => Distribution::Circle,
            DistArg::Gaussians => Distribution::Gaussians,
        }
    }
}

#[derive(clap::Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value = "practical")]
    profile: ProfileArg,
    /// Boundary grid points per square side (practical profile).
    #[arg(long, default_value_t = 16)]
    grid: usize,
    #[arg(long, value_enum, default_value = "auto")]
    backend: BackendArg,
    /// Maximum number of grid doublings.
    #[arg(long, default_value_t = 3)]
    refinement: u32,
    /// Worker threads for candidate evaluation; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, Failure> {
        let mut cfg = match self.profile {
            ProfileArg::Paper => SolverConfig::paper(),
            ProfileArg::Practical => SolverConfig {
                profile: Profile::Practical { grid: self.grid },
                refinement: self.refinement,
                ..SolverConfig::default()
            },
        };
        cfg.backend = match self.backend {
            BackendArg::Auto => Backend::Auto,
            BackendArg::Direct => Backend::Direct,
            BackendArg::Rangetree => Backend::RangeTree,
        };
        cfg.validate().map_err(|e| Failure::usage(e.to_string()))?;
        if let Some(t) = self.threads {
            if t == 0 {
                return Err(Failure::usage("--threads must be at least 1"));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global()
                .map_err(|e| Failure::usage(e.to_string()))?;
        }
        Ok(cfg)
    }

    fn run_config(&self, algo: Algo, eps: Option<f64>, cfg: &SolverConfig) -> RunConfig {
        RunConfig {
            algo: algo.name().to_string(),
            eps,
            profile: match cfg.profile {
                Profile::Paper => "paper",
                Profile::Practical { .. } => "practical",
            }
            .to_string(),
            grid: cfg.grid_count(),
            backend: format!("{:?}", cfg.backend).to_lowercase(),
            refinement: cfg.refinement,
            threads: rayon::current_num_threads(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and write the partition as JSON.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        algo: Algo,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Write a seeded random point set as CSV.
    Gen {
        #[arg(long, value_enum)]
        dist: DistArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time algorithms over a range of sizes and fit log-log slopes.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "exact")]
        algos: Vec<Algo>,
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        #[arg(long, value_enum, default_value = "uniform")]
        dist: DistArg,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a result file against its input.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        result: PathBuf,
        #[arg(long, value_enum)]
        against: Option<Against>,
        /// Also report hull separation angle and distance.
        #[arg(long)]
        separation: bool,
    },
    /// Draw points and hulls as SVG.
    Render {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        result: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        quadtree: bool,
        #[arg(long)]
        squares: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Against {
    Oracle,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Solve {
            input,
            algo,
            eps,
            solver,
            output,
            svg,
        } => {
            let pts = io::read_points(&input)?;
            let cfg = solver.config()?;
            let eps_used = (algo == Algo::Approx).then_some(eps);
            let (p, branch_ms) = solve(&pts, algo, eps, &cfg)?;
            if let Some(svg) = svg {
                let doc = render::render_svg(&pts, &p.left_ids, &p.right_ids, Overlays::default());
                io::write(&svg, &doc)?;
            }
            println!("cost {}", p.cost);
            let result = ResultFile::new(
                p,
                Timings { branch_ms },
                solver.run_config(algo, eps_used, &cfg),
            );
            io::write(&output, &serde_json::to_string_pretty(&result).unwrap())
        }
        Command::Gen { dist, n, seed, out } => {
            io::write(&out, &io::points_csv(&generate(dist.into(), n, seed)))
        }
        Command::Bench {
            algos,
            sizes,
            seeds,
            dist,
            eps,
            solver,
            out,
        } => {
            if sizes.is_empty() || algos.is_empty() || seeds == 0 {
                return Err(Failure::usage(
                    "--sizes, --algos and --seeds must be nonempty",
                ));
            }
            let cfg = solver.config()?;
            bench::run(&algos, &sizes, seeds, dist.into(), eps, &cfg, &out)
        }
        Command::Verify {
            input,
            result,
            against,
            separation,
        } => verify(&input, &result, against, separation),
        Command::Render {
            input,
            result,
            out,
            quadtree,
            squares,
        } => {
            let pts = io::read_points(&input)?;
            let r = io::read_result(&result)?;
            check_ids(pts.len(), &r.left_ids, &r.right_ids)?;
            let doc = render::render_svg(
                &pts,
                &r.left_ids,
                &r.right_ids,
                Overlays { quadtree, squares },
            );
            io::write(&out, &doc)
        }
    }
}

/// Runs one algorithm and returns the partition with per-branch timings.
pub fn solve(
    pts: &[Point],
    algo: Algo,
    eps: f64,
    cfg: &SolverConfig,
) -> Result<(Partition, BTreeMap<String, f64>), Failure> {
    let start = Instant::now();
    let mut ms = BTreeMap::new();
    let p = match algo {
        Algo::Exact => {
            let r = solve_exact_report(pts, cfg)?;
            ms.insert("sweep".to_string(), r.timings.sweep_ms);
            ms.insert("singleton".to_string(), r.timings.singleton_ms);
            ms.insert("candidates".to_string(), r.timings.candidates_ms);
            r.partition
        }
        Algo::Approx => solve_approx(pts, eps, |q| solve_exact(q, cfg))?,
        Algo::Oracle => oracle_line_partitions(pts)?,
    };
    ms.insert("total".to_string(), start.elapsed().as_secs_f64() * 1e3);
    Ok((p, ms))
}

fn check_ids(n: usize, left: &[usize], right: &[usize]) -> Result<(), Failure> {
    if left.is_empty() || right.is_empty() {
        return Err(Failure::input("EmptySide: both sides must be nonempty"));
    }
    let mut seen = vec![false; n];
    for &i in left.iter().chain(right) {
        if i >= n {
            return Err(Failure::input(format!(
                "UnknownId: id {i} but input has {n} points"
            )));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Failure::input(format!("DuplicateId: id {i} appears twice")));
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Failure::input(format!("MissingId: id {i} is not assigned")));
    }
    Ok(())
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300)
}

fn verify(
    input: &std::path::Path,
    result: &std::path::Path,
    against: Option<Against>,
    separation: bool,
) -> Result<(), Failure> {
    let pts = io::read_points(input)?;
    let r = io::read_result(result)?;
    check_ids(pts.len(), &r.left_ids, &r.right_ids)?;
    let side = |ids: &[usize]| -> Vec<Point> { ids.iter().map(|&i| pts[i]).collect() };
    let per_l = hull_perimeter(&side(&r.left_ids));
    let per_r = hull_perimeter(&side(&r.right_ids));
    let cost = per_l + per_r;
    println!("points {}", pts.len());
    println!("sides {} + {}", r.left_ids.len(), r.right_ids.len());
    println!("cost {cost} (claimed {})", r.cost);
    for (name, claimed, actual) in [
        ("per_left", r.per_left, per_l),
        ("per_right", r.per_right, per_r),
    ] {
        if let Some(c) = claimed {
            if !same(c, actual) {
                return Err(Failure::input(format!(
                    "CostMismatch: {name} claimed {c}, recomputed {actual}"
                )));
            }
        }
    }
    if !same(r.cost, cost) {
        return Err(Failure::input(format!(
            "CostMismatch: claimed {}, recomputed {cost}",
            r.cost
        )));
    }
    if separation {
        let p = Partition::new(
            r.left_ids.clone(),
            r.right_ids.clone(),
            per_l,
            per_r,
            perisplit::partition::Provenance::Oracle,
        );
        match check_separation_theorem(&pts, &p) {
            Ok(s) => println!(
                "separation angle {} distance {} per_min {} satisfied {}",
                s.angle, s.distance, s.per_min, s.satisfied
            ),
            Err(e) => println!("separation not measured: {e}"),
        }
    }
    if let Some(Against::Oracle) = against {
        let o = oracle_line_partitions(&pts)?;
        println!("oracle cost {}", o.cost);
        if !same(o.cost, cost) {
            return Err(Failure::mismatch(format!(
                "OptimalityMismatch: result cost {cost}, oracle cost {}",
                o.cost
            )));
        }
    }
    println!("ok");
    Ok(())
}
