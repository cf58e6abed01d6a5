//! `stabbing`: generate instances, solve them, check reports, and inspect
//! piercing sets.
//!
//! Exit codes: 0 success, 2 bad input or I/O, 3 generation failed, 4 input
//! not pairwise intersecting, 5 no verified line meeting the guarantee, 6
//! report does not verify, 7 piercing oracle failure, 8 body not
//! well-rounded.

mod files;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use stabbing::rounded::line_bound;
use stabbing::transversal::{guarantee, with_jobs, Side};
use stabbing::{
    cover_lines, generate, piercing_points, solve, solve_bipartite, verify_cover, verify_piercing, verify_report,
    verify_report_bipartite, Error, GenKind, GenSpec, Instance, Precondition, SlabSampler, SolveOptions, Tolerance,
};

use files::{read_json, write_atomic, write_json, FamilyFile, PolygonFile, ReportFile};

#[derive(Parser)]
#[command(
    name = "stabbing",
    version,
    about = "Line transversals for pairwise-intersecting cylinders"
)]
struct Cli {
    /// Worker threads; 0 uses every core. Never changes the output.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Find a line meeting many cylinders of a family or bipartite file.
    Solve(SolveArgs),
    /// Recheck a report against its instance.
    Verify(VerifyArgs),
    /// Build the piercing set of a polygon and test it on random slabs.
    Pierce(PierceArgs),
    /// Cover a rounded-body file by lines through one point.
    CoverRounded(CoverArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    kind: GenKind,
    /// Family size (per side for hyperboloid).
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cross-section radius (coplanar-lines, hyperboloid).
    #[arg(long)]
    delta: Option<f64>,
    /// Roundness parameter (rounded).
    #[arg(long = "d", alias = "D")]
    d: Option<f64>,
    /// Shape jitter (common-point), pivot spread (coplanar-lines) or height
    /// spread (stack).
    #[arg(long)]
    jitter: Option<f64>,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct Tol {
    /// Geometric tolerance.
    #[arg(long, default_value_t = 1e-9)]
    epsilon: f64,
}

impl Tol {
    fn get(&self) -> Result<Tolerance<f64>, Failure> {
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Failure::input(format!("invalid --epsilon {}", self.epsilon)));
        }
        Ok(Tolerance {
            eps: self.epsilon,
            ..Tolerance::default()
        })
    }
}

#[derive(Args)]
struct SolveArgs {
    input: PathBuf,
    #[arg(long, short)]
    out: PathBuf,
    /// Seed for separating parallel axes.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Initial axis rotation for parallel axes, radians.
    #[arg(long, default_value_t = 1e-7)]
    perturb: f64,
    /// Record wall-clock time in the report (makes reports differ run to run).
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    tol: Tol,
}

#[derive(Args)]
struct VerifyArgs {
    family: PathBuf,
    report: PathBuf,
    #[command(flatten)]
    tol: Tol,
}

#[derive(Args)]
struct PierceArgs {
    polygon: PathBuf,
    #[arg(long, short)]
    out: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Containment slack for sampled slabs.
    #[arg(long, default_value_t = 1e-6)]
    margin: f64,
    #[command(flatten)]
    tol: Tol,
}

#[derive(Args)]
struct CoverArgs {
    input: PathBuf,
    #[arg(long, short)]
    out: PathBuf,
    /// Only require `|a - a0| <= 2 r D` of every body.
    #[arg(long)]
    lenient: bool,
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    tol: Tol,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn input(message: impl Into<String>) -> Self {
        Failure::new(2, message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::GenerationFailed(_) => 3,
            Error::NotPairwiseIntersecting(..)
            | Error::NotCrossIntersecting(..)
            | Error::NotPairwiseIntersectable(_) => 4,
            Error::GuaranteeMissed { .. } | Error::PerturbationFailed | Error::InvariantViolated(_) => 5,
            Error::NotWellRounded(_) => 8,
            _ => 2,
        };
        Failure::new(code, e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn load_family(path: &Path) -> Result<FamilyFile, Failure> {
    let file: FamilyFile = read_json(path).map_err(Failure::input)?;
    file.validate()
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(file)
}

fn cmd_gen(a: GenArgs) -> Outcome {
    let spec = GenSpec {
        kind: a.kind,
        n: a.n,
        seed: a.seed,
        delta: a.delta,
        d: a.d,
        jitter: a.jitter,
    };
    let instance = generate(&spec).map_err(|e| match e {
        Error::GenerationFailed(_) => Failure::from(e),
        other => Failure::input(other.to_string()),
    })?;
    let meta = Some(spec);
    let (file, summary) = match instance {
        Instance::Family(cylinders) => {
            let s = format!("kind=family n={}", cylinders.len());
            (FamilyFile::Family { cylinders, meta }, s)
        }
        Instance::Bipartite(f, g) => {
            let s = format!("kind=bipartite n={}+{}", f.len(), g.len());
            (FamilyFile::Bipartite { f, g, meta }, s)
        }
        Instance::Rounded { d, bodies } => {
            let s = format!("kind=rounded n={} D={d}", bodies.len());
            (FamilyFile::Rounded { d, bodies, meta }, s)
        }
    };
    write_json(&a.out, &file).map_err(Failure::input)?;
    println!("{summary}");
    Ok(())
}

fn cmd_solve(a: SolveArgs) -> Outcome {
    let file = load_family(&a.input)?;
    let tol = a.tol.get()?;
    if !(a.perturb > 0.0 && a.perturb.is_finite()) {
        return Err(Failure::input(format!("invalid --perturb {}", a.perturb)));
    }
    let opts = SolveOptions {
        seed: a.seed,
        perturb: a.perturb,
        tol,
        jobs: 0,
    };
    let start = Instant::now();
    let result = match &file {
        FamilyFile::Family { cylinders, .. } => solve(cylinders, opts),
        FamilyFile::Bipartite { f, g, .. } => solve_bipartite(f, g, opts),
        FamilyFile::Rounded { .. } => {
            return Err(Failure::input(
                "rounded files are covered with cover-rounded, not solved",
            ));
        }
    };
    let report = match result {
        Ok(r) => r,
        Err(e @ (Error::NotPairwiseIntersecting(i, j) | Error::NotCrossIntersecting(i, j))) => {
            println!("witness=({i},{j})");
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };
    let elapsed = start.elapsed();
    let (verified, n, on_side) = match &file {
        FamilyFile::Family { cylinders, .. } => (
            verify_report(cylinders, &report, tol),
            cylinders.len(),
            report.hits.len(),
        ),
        FamilyFile::Bipartite { f, g, .. } => {
            let (n, range) = match report.side {
                Some(Side::G) => (g.len(), f.len()..f.len() + g.len()),
                _ => (f.len(), 0..f.len()),
            };
            (
                verify_report_bipartite(f, g, &report, tol),
                n,
                report.hits.iter().filter(|i| range.contains(i)).count(),
            )
        }
        FamilyFile::Rounded { .. } => unreachable!("rejected above"),
    };
    let mut summary = format!(
        "n={n} branch={} hits={on_side} bound={}",
        report.branch,
        n / stabbing::transversal::ALPHA_INV
    );
    if let Some(side) = report.side {
        summary.push_str(&format!(" side={side}"));
    }
    println!("{summary}");
    if !verified || on_side < guarantee(n) {
        return Err(Failure::new(5, "solver output failed verification"));
    }
    let out = ReportFile::Transversal {
        solver: files::solver_id(),
        report,
        verified,
        timing_ms: a.timing.then_some(elapsed.as_secs_f64() * 1e3),
    };
    write_json(&a.out, &out).map_err(Failure::input)
}

fn cmd_verify(a: VerifyArgs) -> Outcome {
    let file = load_family(&a.family)?;
    let report: ReportFile = read_json(&a.report).map_err(Failure::input)?;
    let tol = a.tol.get()?;
    let mismatch = |what: &str| Failure::new(6, what.to_string());
    match (&file, &report) {
        (FamilyFile::Family { cylinders, .. }, ReportFile::Transversal { report, .. }) => {
            let hits = recount(cylinders, report, tol);
            let ok = verify_report(cylinders, report, tol);
            println!("hits={hits} verified={ok}");
            ok.then_some(()).ok_or_else(|| mismatch("report does not verify"))
        }
        (FamilyFile::Bipartite { f, g, .. }, ReportFile::Transversal { report, .. }) => {
            let all: Vec<_> = f.iter().chain(g).cloned().collect();
            let hits = recount(&all, report, tol);
            let ok = verify_report_bipartite(f, g, report, tol);
            println!("hits={hits} verified={ok}");
            ok.then_some(()).ok_or_else(|| mismatch("report does not verify"))
        }
        (FamilyFile::Rounded { bodies, .. }, ReportFile::Cover { cover, .. }) => {
            let ok = verify_cover(bodies, cover, tol);
            println!("lines={} verified={ok}", cover.directions.len());
            ok.then_some(()).ok_or_else(|| mismatch("cover does not verify"))
        }
        _ => Err(mismatch(&format!(
            "a {} file cannot be checked against this report",
            file.kind()
        ))),
    }
}

/// Number of cylinders the report's line actually meets.
fn recount(family: &[stabbing::Cylinder3], report: &stabbing::TransversalReport, tol: Tolerance<f64>) -> usize {
    family
        .iter()
        .filter(|c| stabbing::line_hits_cylinder(&report.line, c, tol).unwrap_or(false))
        .count()
}

fn cmd_pierce(a: PierceArgs) -> Outcome {
    let tol = a.tol.get()?;
    let poly: PolygonFile = read_json(&a.polygon).map_err(Failure::input)?;
    let k = files::polygon_of(&poly).map_err(Failure::input)?;
    if !(a.margin >= 0.0 && a.margin.is_finite()) {
        return Err(Failure::input(format!("invalid --margin {}", a.margin)));
    }
    let set = piercing_points(&k, tol);
    let sampler = SlabSampler {
        trials: a.trials,
        seed: a.seed,
        margin: a.margin,
    };
    let failures = verify_piercing(&k, &set.points, sampler, tol);
    write_atomic(&a.out, svg::render(&k, &set, &failures).as_bytes()).map_err(Failure::input)?;
    println!("|T|={} failures={}", set.points.len(), failures.len());
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(7, "some sampled slabs contain no piercing point"))
    }
}

fn cmd_cover(a: CoverArgs) -> Outcome {
    let tol = a.tol.get()?;
    let file = load_family(&a.input)?;
    let FamilyFile::Rounded { d, bodies, .. } = &file else {
        return Err(Failure::input(format!("expected a rounded file, got {}", file.kind())));
    };
    let pre = if a.lenient {
        Precondition::Lenient
    } else {
        Precondition::Strict
    };
    let start = Instant::now();
    let cover = cover_lines(bodies, *d, pre, tol)?;
    let elapsed = start.elapsed();
    let bound = line_bound(*d);
    println!("lines={} bound={}", cover.directions.len(), bound.floor());
    let verified = verify_cover(bodies, &cover, tol);
    if !verified || cover.directions.len() as f64 > bound {
        return Err(Failure::new(6, "cover failed verification"));
    }
    let out = ReportFile::Cover {
        solver: files::solver_id(),
        cover,
        verified,
        timing_ms: a.timing.then_some(elapsed.as_secs_f64() * 1e3),
    };
    write_json(&a.out, &out).map_err(Failure::input)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli.jobs;
    let result = with_jobs(jobs, move || match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Pierce(a) => cmd_pierce(a),
        Command::CoverRounded(a) => cmd_cover(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
