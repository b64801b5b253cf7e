//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when `verify` finds a failing check, 2 on
//! any input, parse or I/O error.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::construction::{self, Selection, MAX_DEPTH};
use crate::error::{Error, Result};
use crate::estimator::{self, Witness, WindowSpec};
use crate::harness::{self, CheckReport, DEFAULT_SEED};
use crate::metrics::{self, Point, PointSet1};
use crate::pointfile;
use crate::profile::{self, Direction, ProfileSpec};
use crate::scalar::{self, Scalar};
use crate::scheduler::{self, DirectionSequence, DEFAULT_SUBSAMPLE};
use crate::tangents;

pub const THREADS_ENV: &str = "ASSOUAD_FORGE_THREADS";

/// Precision used to syntax-check decimal flags before any file is read.
const CHECK_PREC: u32 = scalar::MIN_PRECISION;

#[derive(Debug, Parser)]
#[command(name = "assouad-forge", version, about = "Build, project and measure planar point sets with prescribed projection dimensions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a truncation and write it as a point file.
    Build(BuildArgs),
    /// Project a point file onto one direction.
    Project(ProjectArgs),
    /// Windowed Assouad-type and box-counting estimates of a point file.
    Estimate(EstimateArgs),
    /// Cluster and full-scope estimates over a grid of directions.
    Sweep(SweepArgs),
    /// Weak-tangent convergence study for one direction.
    Tangent(TangentArgs),
    /// Run every numerical check on a point file.
    Verify(VerifyArgs),
    /// Export the enumerated direction sequence.
    Directions(DirectionsArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub profile: PathBuf,
    /// Keep every cluster with schedule index up to this value.
    #[arg(long, required_unless_present = "clusters")]
    pub gmax: Option<u64>,
    /// Drop scheduled clusters deeper than this.
    #[arg(long)]
    pub depth: Option<u64>,
    /// Exactly these clusters, as `k:n[,k:n...]`.
    #[arg(long, value_parser = parse_clusters, conflicts_with = "gmax")]
    pub clusters: Option<ClusterList>,
    #[arg(long)]
    pub precision_bits: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_decimal_flag)]
    pub theta: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_window_flag, default_value = "dyadic:1..16")]
    pub window: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Directions `i pi / m` for `i = 1..=m`.
    #[arg(long, required_unless_present = "theta")]
    pub thetas: Option<u32>,
    #[arg(long, value_parser = parse_decimal_flag, conflicts_with = "thetas")]
    pub theta: Option<String>,
    #[arg(long, value_parser = parse_window_flag, default_value = "dyadic:1..16")]
    pub window: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TangentArgs {
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long, value_parser = parse_decimal_flag)]
    pub theta: String,
    /// Depths to study, as `a..b` or `a,b,...`.
    #[arg(long, value_parser = parse_ks, default_value = "1..6")]
    pub ks: DepthList,
    /// Skip rows whose schedule index exceeds this.
    #[arg(long, default_value_t = 64)]
    pub gmax: u64,
    #[arg(long)]
    pub precision_bits: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Separation direction; defaults to pi/3, pi/2 and pi.
    #[arg(long, value_parser = parse_decimal_flag)]
    pub theta: Option<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Sampled balls for the radius and covering checks.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, value_parser = parse_decimal_flag, default_value = "0.35")]
    pub epsilon: String,
    /// Regression bound on the measured covering constant.
    #[arg(long, value_parser = parse_decimal_flag)]
    pub bound: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DirectionsArgs {
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long, default_value_t = 64)]
    pub count: usize,
    #[arg(long, default_value_t = 128)]
    pub precision_bits: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterList(pub Vec<(u64, u64)>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthList(pub Vec<u64>);

fn parse_decimal_flag(s: &str) -> std::result::Result<String, String> {
    scalar::parse_decimal(s, CHECK_PREC)
        .map(|_| s.to_string())
        .map_err(|e| e.to_string())
}

fn parse_window_flag(s: &str) -> std::result::Result<String, String> {
    WindowSpec::parse(s, CHECK_PREC)
        .map(|_| s.to_string())
        .map_err(|e| e.to_string())
}

fn parse_clusters(s: &str) -> std::result::Result<ClusterList, String> {
    s.split(',')
        .map(|item| {
            let (k, n) = item
                .split_once(':')
                .ok_or_else(|| format!("expected k:n, got {item:?}"))?;
            let k: u64 = k.trim().parse().map_err(|_| format!("bad k in {item:?}"))?;
            let n: u64 = n.trim().parse().map_err(|_| format!("bad n in {item:?}"))?;
            if k == 0 || n == 0 {
                return Err(format!("k and n must be positive in {item:?}"));
            }
            Ok((k, n))
        })
        .collect::<std::result::Result<_, _>>()
        .map(ClusterList)
}

fn parse_ks(s: &str) -> std::result::Result<DepthList, String> {
    let bad = || format!("expected a..b or a,b,..., got {s:?}");
    let ks: Vec<u64> = if let Some((lo, hi)) = s.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
        (lo..=hi).collect()
    } else {
        s.split(',')
            .map(|k| k.trim().parse().map_err(|_| bad()))
            .collect::<std::result::Result<_, _>>()?
    };
    if ks.is_empty() || ks.contains(&0) {
        return Err(bad());
    }
    Ok(DepthList(ks))
}

/// Parses `argv` (program name first).
pub fn parse_args<I, T>(argv: I) -> std::result::Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Cli::try_parse_from(argv)
}

/// Parses, executes and maps the outcome to an exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match parse_args(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return 2;
    }
    match execute(&cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::Parse(format!("{THREADS_ENV} must be a positive integer")))?;
    // A pool may already exist when called twice in one process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

/// Runs one command. `Ok(false)` means a check failed.
pub fn execute(cmd: &Command) -> Result<bool> {
    match cmd {
        Command::Build(a) => build(a),
        Command::Project(a) => project(a),
        Command::Estimate(a) => estimate(a),
        Command::Sweep(a) => sweep(a),
        Command::Tangent(a) => tangent(a),
        Command::Verify(a) => verify(a),
        Command::Directions(a) => directions(a),
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

/// Writes to a temporary file beside `path` and renames it into place, or
/// prints to stdout without a path.
pub fn write_output(path: Option<&Path>, contents: &str) -> Result<()> {
    let Some(path) = path else {
        std::io::stdout().write_all(contents.as_bytes())?;
        return Ok(());
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn check_precision(bits: u32) -> Result<u32> {
    if bits < scalar::MIN_PRECISION {
        return Err(Error::Precision {
            context: "--precision-bits".into(),
            bits,
        });
    }
    Ok(bits)
}

fn load_profile_spec(path: &Path) -> Result<ProfileSpec> {
    ProfileSpec::from_json(&read_text(path)?)
}

fn build(a: &BuildArgs) -> Result<bool> {
    let spec = load_profile_spec(&a.profile)?;
    let selection = match (&a.clusters, a.gmax) {
        (Some(pairs), _) => Selection::Pairs(pairs.0.clone()),
        (None, Some(g_max)) => Selection::Schedule {
            g_max,
            depth_cap: a.depth,
        },
        (None, None) => return Err(Error::Parse("need --gmax or --clusters".into())),
    };
    let depth = selection.max_depth();
    if depth > MAX_DEPTH {
        return Err(Error::Domain(format!("depth {depth} exceeds {MAX_DEPTH}")));
    }
    let prec = match a.precision_bits {
        Some(bits) => check_precision(bits)?,
        None => scalar::default_precision(depth as u32),
    };
    let profile = profile::make_profile(&spec, prec)?;
    let seq = scheduler::enumerate_directions(&profile, selection.max_direction() as usize, DEFAULT_SUBSAMPLE);
    let trunc = construction::build_f(&profile, &seq, &selection, &spec.digest())?;
    write_output(a.out.as_deref(), &pointfile::write_truncation(&trunc))?;
    Ok(true)
}

enum Input {
    Planar(Vec<Point>, u32),
    Line(PointSet1, u32),
}

fn read_input(path: &Path) -> Result<Input> {
    let text = read_text(path)?;
    if text.lines().next().map(str::trim) == Some(pointfile::MAGIC) {
        let t = pointfile::read_truncation(&text)?;
        Ok(Input::Planar(t.all_points(), t.prec))
    } else {
        let (p, prec) = pointfile::read_points1(&text)?;
        Ok(Input::Line(p, prec))
    }
}

fn project(a: &ProjectArgs) -> Result<bool> {
    let text = read_text(&a.input)?;
    let t = pointfile::read_truncation(&text)?;
    let theta = Direction::new(scalar::parse_decimal(&a.theta, t.prec)?)?;
    let image = metrics::project(&t.all_points(), &theta);
    write_output(a.out.as_deref(), &pointfile::write_points1(&image, t.prec))?;
    Ok(true)
}

pub const ESTIMATE_HEADER: &str =
    "method,estimate,witness_x,witness_y,witness_R,witness_r,witness_count,flags";

fn estimate(a: &EstimateArgs) -> Result<bool> {
    let d = |x: &Scalar| scalar::to_decimal(x, 30);
    let mut out = format!("{ESTIMATE_HEADER}\n");
    let input = read_input(&a.input)?;
    let prec = match &input {
        Input::Planar(_, p) | Input::Line(_, p) => *p,
    };
    let w = WindowSpec::parse(&a.window, prec)?;
    let box_scales: Vec<Scalar> = w.scales().into_iter().map(|s| s.r).collect();
    let (report, witness, boxed) = match &input {
        Input::Planar(points, _) => {
            let r = estimator::assouad_estimate_2d(points, &w)?;
            let witness = r.witness.as_ref().map(|w| fmt_witness(w, |c| (d(&c.x), d(&c.y))));
            let boxed = estimator::box_estimate_2d(points, &box_scales)?;
            ((r.value, r.flags), witness, boxed)
        }
        Input::Line(points, _) => {
            let r = estimator::assouad_estimate_1d(points, &w)?;
            let witness = r.witness.as_ref().map(|w| fmt_witness(w, |c| (d(c), String::new())));
            let boxed = estimator::box_estimate_1d(points, &box_scales)?;
            ((r.value, r.flags), witness, boxed)
        }
    };
    let witness = witness.unwrap_or_else(|| ",,,,".into());
    let _ = writeln!(out, "assouad,{},{},{}", d(&report.0), witness, report.1.join(";"));
    let flag = if boxed.degenerate { "degenerate-count" } else { "" };
    let _ = writeln!(out, "box,{},,,,,,{}", d(&boxed.slope), flag);
    write_output(a.out.as_deref(), &out)?;
    Ok(true)
}

fn fmt_witness<C>(w: &Witness<C>, center: impl Fn(&C) -> (String, String)) -> String {
    let (x, y) = center(&w.center);
    format!(
        "{x},{y},{},{},{}",
        scalar::to_decimal(&w.radius, 30),
        scalar::to_decimal(&w.r, 30),
        w.count
    )
}

fn sweep(a: &SweepArgs) -> Result<bool> {
    let t = pointfile::read_truncation(&read_text(&a.input)?)?;
    let prec = t.prec;
    let w = WindowSpec::parse(&a.window, prec)?;
    let thetas = match (&a.theta, a.thetas) {
        (Some(theta), _) => vec![Direction::new(scalar::parse_decimal(theta, prec)?)?],
        (None, Some(m)) if m > 0 => (1..=m)
            .map(|i| Direction::wrapped(scalar::pi(prec) * i / m))
            .collect(),
        _ => return Err(Error::Parse("--thetas must be positive".into())),
    };
    let rows = estimator::sweep(&t, &thetas, &w)?;
    write_output(a.out.as_deref(), &estimator::sweep_csv(&rows))?;
    Ok(true)
}

fn tangent(a: &TangentArgs) -> Result<bool> {
    let spec = load_profile_spec(&a.profile)?;
    let max_k = *a.ks.0.iter().max().expect("parser rejects empty lists");
    if max_k > MAX_DEPTH {
        return Err(Error::Domain(format!("depth {max_k} exceeds {MAX_DEPTH}")));
    }
    let prec = match a.precision_bits {
        Some(bits) => check_precision(bits)?,
        None => scalar::default_precision(max_k as u32),
    };
    let profile = profile::make_profile(&spec, prec)?;
    let theta = Direction::new(scalar::parse_decimal(&a.theta, prec)?)?;
    let seq = DirectionSequence::through_block(&profile, max_k as u32, DEFAULT_SUBSAMPLE);
    let rows = tangents::convergence_study(&profile, &seq, &theta, &a.ks.0, a.gmax)?;
    write_output(a.out.as_deref(), &tangents::study_csv(&rows))?;
    Ok(true)
}

fn verify(a: &VerifyArgs) -> Result<bool> {
    let t = pointfile::read_truncation(&read_text(&a.input)?)?;
    let prec = t.prec;
    let epsilon = scalar::parse_decimal(&a.epsilon, prec)?;
    if epsilon <= 0 || epsilon > 1 {
        return Err(Error::Domain("--epsilon must lie in (0, 1]".into()));
    }
    let bound = a
        .bound
        .as_deref()
        .map(|b| scalar::parse_decimal(b, prec))
        .transpose()?;
    let thetas = match &a.theta {
        Some(theta) => vec![Direction::new(scalar::parse_decimal(theta, prec)?)?],
        None => [3u32, 2, 1]
            .iter()
            .map(|&q| Direction::wrapped(scalar::pi(prec) / q))
            .collect(),
    };

    let mut reports: Vec<CheckReport> = Vec::new();
    for cl in &t.clusters {
        reports.push(harness::check_yydecay(&cl.c, cl.n)?);
    }
    for cl in &t.clusters {
        reports.push(harness::check_bilipschitz(cl));
    }
    if t.clusters.len() >= 2 {
        for theta in &thetas {
            reports.push(harness::check_separation(&t, theta).to_check());
        }
    }
    reports.push(harness::check_radius_bracket(&t, a.samples, a.seed));
    let covering = harness::check_global_covering(&t, &epsilon, a.samples, a.seed)?;
    reports.push(covering.to_check(bound.as_ref()));

    let mut out = String::new();
    for r in &reports {
        out.push_str(&r.to_json());
        out.push('\n');
    }
    write_output(a.out.as_deref(), &out)?;
    let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.check.as_str()).collect();
    if !failed.is_empty() {
        eprintln!("failed checks: {}", failed.join(", "));
    }
    Ok(failed.is_empty())
}

fn directions(a: &DirectionsArgs) -> Result<bool> {
    let spec = load_profile_spec(&a.profile)?;
    let prec = check_precision(a.precision_bits)?;
    let profile = profile::make_profile(&spec, prec)?;
    let seq = scheduler::enumerate_directions(&profile, a.count, DEFAULT_SUBSAMPLE);
    write_output(a.out.as_deref(), &seq.to_csv())?;
    Ok(true)
}
