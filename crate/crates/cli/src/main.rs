//! `lskum`: command-line driver for the meshfree q-LSKUM Euler solver.

mod output;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lskum_core::{
    bench_layouts, layouts_agree, parse_config_text, partition_cloud, relative_performance, run_recorded,
    validate_cloud, write_point_cloud, BenchReport, Error, Layout, PointCloud, PointKind, SolverConfig,
};

use output::{surface, to_file, with_suffix, write_bench, write_residue, write_solution, write_surface};

#[derive(Parser)]
#[command(
    name = "lskum",
    version,
    about = "Meshfree q-LSKUM solver for the 2D Euler equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the solver and write residue, solution and surface files.
    Solve(RunArgs),
    /// Time the solver in one or more layouts and write per-kernel RDP.
    Bench {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated layouts to run from the same initial state.
        #[arg(long, value_delimiter = ',', default_value = "soa")]
        layouts: Vec<Layout>,
    },
    /// Write a generated point cloud.
    Generate {
        #[command(flatten)]
        grid: GridArgs,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a configuration and the stencils of its cloud.
    Validate(RunArgs),
}

#[derive(Args)]
struct GridArgs {
    /// Point cloud file.
    #[arg(long, value_name = "PATH")]
    grid: Option<String>,
    /// Jittered rectangular lattice.
    #[arg(long, value_name = "NXxNY")]
    generate: Option<String>,
    /// Annulus with a circular wall.
    #[arg(long, value_name = "NTHETAxNR")]
    annular: Option<String>,
    /// Inner and outer annulus radii.
    #[arg(long, value_name = "R1,R2")]
    radii: Option<String>,
    #[arg(long)]
    jitter: Option<String>,
    #[arg(long)]
    seed: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    /// Flat key = value file; flags override it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    mach: Option<String>,
    /// Angle of attack in degrees.
    #[arg(long)]
    aoa: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    iters: Option<String>,
    #[arg(long)]
    inner: Option<String>,
    #[arg(long)]
    cfl: Option<String>,
    /// 1 or 2.
    #[arg(long)]
    order: Option<String>,
    /// aos or soa.
    #[arg(long)]
    layout: Option<String>,
    /// fused or split4.
    #[arg(long)]
    residual_mode: Option<String>,
    #[arg(long)]
    parts: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    /// Relative density and pressure bump amplitude.
    #[arg(long)]
    bump: Option<String>,
    #[arg(long)]
    bump_radius: Option<String>,
    #[arg(long, value_name = "X,Y")]
    bump_center: Option<String>,
    #[arg(long, value_name = "PATH")]
    out_prefix: Option<PathBuf>,
}

impl GridArgs {
    fn pairs(&self) -> Vec<(&'static str, &str)> {
        [
            ("grid", &self.grid),
            ("generate", &self.generate),
            ("annular", &self.annular),
            ("radii", &self.radii),
            ("jitter", &self.jitter),
            ("seed", &self.seed),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }
}

impl RunArgs {
    fn pairs(&self) -> Vec<(&'static str, &str)> {
        let mut pairs = self.grid.pairs();
        pairs.extend(
            [
                ("mach", &self.mach),
                ("aoa", &self.aoa),
                ("gamma", &self.gamma),
                ("iters", &self.iters),
                ("inner", &self.inner),
                ("cfl", &self.cfl),
                ("order", &self.order),
                ("layout", &self.layout),
                ("residual-mode", &self.residual_mode),
                ("parts", &self.parts),
                ("workers", &self.workers),
                ("bump", &self.bump),
                ("bump-radius", &self.bump_radius),
                ("bump-center", &self.bump_center),
            ]
            .into_iter()
            .filter_map(|(k, v)| v.as_deref().map(|v| (k, v))),
        );
        if let Some(p) = self.out_prefix.as_deref().and_then(|p| p.to_str()) {
            pairs.push(("out-prefix", p));
        }
        pairs
    }

    /// Config file first, then flags.
    fn config(&self) -> Result<SolverConfig, Failure> {
        let mut cfg = SolverConfig::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            let pairs = parse_config_text(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            for (k, v) in &pairs {
                cfg.set(k, v)?;
            }
        }
        for (k, v) in self.pairs() {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

enum Failure {
    Config(String),
    Validation(String),
    Solver(String),
    Mismatch(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Solver(_) => 3,
            Failure::Mismatch(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Validation(m) | Failure::Solver(m) | Failure::Mismatch(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Solver { .. } | Error::Positivity { .. } | Error::Reconstruction { .. } => {
                Failure::Solver(e.to_string())
            }
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

/// Builds the cloud and rejects it when any stencil is unusable.
fn checked_cloud(cfg: &SolverConfig) -> Result<PointCloud, Failure> {
    let cloud = cfg.build_cloud()?;
    let report = validate_cloud(&cloud);
    if !report.is_ok() {
        let bad = report.defective_points();
        let shown: Vec<String> = bad.iter().take(10).map(|p| p.to_string()).collect();
        return Err(Failure::Validation(format!(
            "{} defective stencils (points {}{})",
            bad.len(),
            shown.join(", "),
            if bad.len() > 10 { ", ..." } else { "" }
        )));
    }
    Ok(cloud)
}

fn print_report(label: &str, report: &BenchReport) {
    println!(
        "{label}: {} iterations, {} points, {:.6} s, rdp {}",
        report.iterations,
        report.n_points,
        report.total_seconds,
        report.rdp().map_or("n/a".into(), |r| format!("{r:.5e}"))
    );
    for (kernel, seconds) in report.ranked() {
        println!(
            "  {:<14} {:>12.6} s  rdp {}",
            kernel.name(),
            seconds,
            report.kernel_rdp(kernel).map_or("n/a".into(), |r| format!("{r:.5e}"))
        );
    }
}

fn solve(args: &RunArgs) -> Result<(), Failure> {
    let cfg = args.config()?;
    let mut cloud = checked_cloud(&cfg)?;
    cfg.initialize(&mut cloud)?;
    let part = partition_cloud(&cloud, cfg.n_parts)?;
    let opts = cfg.run_options()?;
    let (history, failure) = run_recorded(&mut cloud, &part, &opts)?;

    let prefix = &cfg.out_prefix;
    to_file(&with_suffix(prefix, ".residue.csv"), |o| write_residue(o, &history))?;
    if let Some(e) = failure {
        return Err(Failure::Solver(e.to_string()));
    }
    to_file(&with_suffix(prefix, ".solution.dat"), |o| write_solution(o, &cloud))?;
    if cloud.has_wall() {
        let rows = surface(&cloud, opts.free_stream, cfg.mach, cfg.gamma);
        to_file(&with_suffix(prefix, ".surface.csv"), |o| write_surface(o, &rows))?;
    }
    if let Some(last) = history.records.last() {
        println!(
            "final residue {:.5e}, log10 relative {:.5}",
            last.residue, last.log10_rel
        );
    }
    print_report("solve", &history.report());
    Ok(())
}

fn bench(args: &RunArgs, layouts: &[Layout]) -> Result<(), Failure> {
    let cfg = args.config()?;
    let mut cloud = checked_cloud(&cfg)?;
    cfg.initialize(&mut cloud)?;
    let part = partition_cloud(&cloud, cfg.n_parts)?;
    let runs = bench_layouts(&cloud, &part, &cfg.run_options()?, layouts)?;
    to_file(&with_suffix(&cfg.out_prefix, ".bench.csv"), |o| write_bench(o, &runs))?;
    for run in &runs {
        print_report(&run.layout.to_string(), &run.history.report());
    }
    if let (Some(first), true) = (runs.first(), runs.len() > 1) {
        for run in &runs[1..] {
            if let (Some(a), Some(b)) = (run.history.rdp(), first.history.rdp()) {
                println!(
                    "relative performance {} / {}: {:.5}",
                    run.layout,
                    first.layout,
                    relative_performance(a, b)?
                );
            }
        }
    }
    if !layouts_agree(&runs)? {
        return Err(Failure::Mismatch("layouts produced different results".into()));
    }
    Ok(())
}

fn generate(grid: &GridArgs, out: Option<&PathBuf>) -> Result<(), Failure> {
    let cfg = SolverConfig::from_pairs(grid.pairs())?;
    if matches!(cfg.grid, Some(lskum_core::GridSource::File(_))) {
        return Err(Failure::Config("generate needs --generate or --annular".into()));
    }
    let cloud = cfg.build_cloud()?;
    match out {
        Some(path) => to_file(path, |o| write_point_cloud(&cloud, o).map_err(io::Error::other))?,
        None => {
            let mut stdout = io::stdout().lock();
            write_point_cloud(&cloud, &mut stdout)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn validate(args: &RunArgs) -> Result<(), Failure> {
    let cfg = args.config()?;
    let cloud = cfg.build_cloud()?;
    let report = validate_cloud(&cloud);
    let count = |k: PointKind| cloud.points.iter().filter(|p| p.kind == k).count();
    println!(
        "{} points ({} interior, {} wall, {} outer), h_ref {:.5e}, det_tol {:.5e}",
        cloud.n_points(),
        count(PointKind::Interior),
        count(PointKind::Wall),
        count(PointKind::Outer),
        report.h_ref,
        report.det_tol
    );
    let min_det = report.points.iter().map(|d| d.full_det).fold(f64::INFINITY, f64::min);
    println!("smallest full-stencil determinant {min_det:.5e}");
    for p in report.defective_points().iter().take(20) {
        let d = &report.points[*p];
        println!(
            "  point {p}: {} neighbours, split sizes {:?}, det {:.5e}",
            d.full_size, d.split_sizes, d.full_det
        );
    }
    if report.is_ok() {
        println!("ok");
        Ok(())
    } else {
        Err(Failure::Validation(format!(
            "{} defective stencils",
            report.n_defective()
        )))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Solve(args) => solve(args),
        Command::Bench { run, layouts } => bench(run, layouts),
        Command::Generate { grid, out } => generate(grid, out.as_ref()),
        Command::Validate(args) => validate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
