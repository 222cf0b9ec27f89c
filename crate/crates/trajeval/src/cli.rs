//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or invalid parameter, 2 I/O or parse
//! error, 3 association failure, 4 degenerate geometry or too little data.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Component, Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use trajeval_core::association::DEFAULT_MAX_DIFF;
use trajeval_core::synth::{degrade, generate, Degradation, DegradationSpec, MotionSpec, Shape};
use trajeval_core::{DeltaSpec, Normalization, RigidTransform, Stats, Trajectory};

use crate::config::{ConfigError, ReportConfig};
use crate::evaluate::{associate_with, evaluate, EvalParams, Evaluation, DEFAULT_SAMPLES, FULL_SPAN_WARNING};
use crate::plot::ate_svg;
use crate::report::{run_report, write_atomic, EntryFailure, ReportOptions};
use crate::tum::{format_value, read_tum_file, write_tum, TumError};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "TRAJEVAL_OUTPUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_ASSOCIATION: i32 = 3;
pub const EXIT_GEOMETRY: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Association(String),
    #[error("{0}")]
    Geometry(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Association(_) => EXIT_ASSOCIATION,
            CliError::Geometry(_) => EXIT_GEOMETRY,
        }
    }
}

impl From<trajeval_core::Error> for CliError {
    fn from(e: trajeval_core::Error) -> Self {
        use trajeval_core::Error as E;
        let msg = e.to_string();
        match e {
            E::NoOverlap { .. } => CliError::Association(msg),
            E::DegenerateGeometry(_)
            | E::InsufficientData { .. }
            | E::EmptyWindow { .. }
            | E::EmptySamples
            | E::OutOfRange { .. } => CliError::Geometry(msg),
            E::DegenerateQuaternion { .. }
            | E::NonFinite { .. }
            | E::InvalidTimestamp(_)
            | E::EmptyTrajectory => CliError::Io(msg),
            E::InvalidParameter(_) | E::EmptyResult => CliError::Usage(msg),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Invalid(_) => CliError::Usage(e.to_string()),
            _ => CliError::Io(e.to_string()),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "trajeval", version, about = "Trajectory evaluation: ATE, RPE, association, synthetic data and benchmark reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Absolute trajectory error after rigid alignment.
    Ate(AteArgs),
    /// Relative pose error over a fixed or averaged window.
    Rpe(RpeArgs),
    /// Print matched timestamp pairs.
    Associate(AssociateArgs),
    /// Generate a synthetic trajectory and optionally a degraded estimate.
    Synth(SynthArgs),
    /// Evaluate every entry of a TOML config and write an aggregate report.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct PairArgs {
    /// Ground-truth trajectory (TUM format).
    groundtruth: PathBuf,
    /// Estimated trajectory (TUM format).
    estimate: PathBuf,
    /// Largest accepted timestamp difference in seconds.
    #[arg(long, default_value_t = DEFAULT_MAX_DIFF)]
    max_diff: f64,
    /// Added to ground-truth timestamps before matching, in seconds.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    offset: f64,
    /// Resample ground truth at estimate timestamps instead of nearest matching.
    #[arg(long)]
    interpolate_gt: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Line,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output format on stdout.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Directory for written files (default: $TRAJEVAL_OUTPUT_DIR, else the current directory).
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AteArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Skip alignment for trajectories already in the same frame.
    #[arg(long)]
    no_align: bool,
    /// Write a top-down SVG plot to this file inside the output directory.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum DeltaArg {
    Value(f64),
    Full,
}

impl FromStr for DeltaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "n" {
            return Ok(DeltaArg::Full);
        }
        s.parse::<f64>()
            .map(DeltaArg::Value)
            .map_err(|_| format!("expected a number or \"n\", got {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UnitArg {
    Frames,
    Seconds,
    All,
}

#[derive(Debug, Args)]
struct RpeArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Window length, or "n" for first-to-last.
    #[arg(long)]
    delta: Option<DeltaArg>,
    /// Window unit; "all" averages over every window length.
    #[arg(long, value_enum, default_value_t = UnitArg::Frames)]
    delta_unit: UnitArg,
    /// Couple budget before "all" switches from exhaustive to sampled.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Sampling seed for "all".
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct AssociateArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Write pairs to this file inside the output directory instead of stdout.
    #[arg(short = 'o', long = "out")]
    out: Option<PathBuf>,
    /// Directory for written files (default: $TRAJEVAL_OUTPUT_DIR, else the current directory).
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShapeArg {
    Line,
    Circle,
    FigureEight,
}

impl From<ShapeArg> for Shape {
    fn from(s: ShapeArg) -> Self {
        match s {
            ShapeArg::Line => Shape::Line,
            ShapeArg::Circle => Shape::Circle,
            ShapeArg::FigureEight => Shape::FigureEight,
        }
    }
}

/// `noise:σt[,σr]`, `drift:σt[,σr]`, `gap:t0,t1` or `truncate:t`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct DegradeArg(Degradation);

impl FromStr for DegradeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| format!("expected KIND:VALUES, got {s:?}"))?;
        let values: Vec<f64> = rest
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| format!("invalid number {v:?} in {s:?}")))
            .collect::<Result<_, _>>()?;
        let arity = |lo: usize, hi: usize| {
            if values.len() < lo || values.len() > hi {
                Err(format!("{kind} takes {lo}..={hi} values, got {}", values.len()))
            } else {
                Ok(())
            }
        };
        let d = match kind {
            "noise" | "drift" => {
                arity(1, 2)?;
                let (sigma_trans, sigma_rot) = (values[0], values.get(1).copied().unwrap_or(0.0));
                if kind == "noise" {
                    Degradation::IidNoise { sigma_trans, sigma_rot }
                } else {
                    Degradation::RandomWalkDrift { sigma_trans, sigma_rot }
                }
            }
            "gap" => {
                arity(2, 2)?;
                Degradation::Gap { start: values[0], end: values[1] }
            }
            "truncate" => {
                arity(1, 1)?;
                Degradation::Truncate { cutoff: values[0] }
            }
            other => return Err(format!("unknown degradation {other:?}")),
        };
        Ok(DegradeArg(d))
    }
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, value_enum, default_value_t = ShapeArg::Circle)]
    shape: ShapeArg,
    /// Seconds.
    #[arg(long, default_value_t = 10.0)]
    duration: f64,
    /// Hz.
    #[arg(long, default_value_t = 30.0)]
    rate: f64,
    /// Meters.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Base seed; the k-th --degrade uses seed + 1 + k.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Degrade this TUM file instead of generating a path.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Degradation step, applied in order; repeatable.
    #[arg(long = "degrade")]
    degrade: Vec<DegradeArg>,
    /// Output file: the generated ground truth, or the degraded input with --input.
    #[arg(long, short = 'o')]
    out: PathBuf,
    /// Degraded estimate output when generating.
    #[arg(long)]
    estimate_out: Option<PathBuf>,
    /// Directory for written files (default: $TRAJEVAL_OUTPUT_DIR, else the current directory).
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// TOML report configuration.
    config: PathBuf,
    /// Overrides output_dir from the config and the environment.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Store evaluation wall time in the records (outputs then differ between runs).
    #[arg(long)]
    timing: bool,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Ate(a) => cmd_ate(a),
        Command::Rpe(a) => cmd_rpe(a),
        Command::Associate(a) => cmd_associate(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Report(a) => cmd_report(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn base_output_dir(flag: Option<PathBuf>, configured: Option<PathBuf>) -> PathBuf {
    flag.or(configured)
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Resolves a user-supplied file name inside the output directory, refusing
/// anything that could escape it.
fn output_path(dir: &Path, name: &Path) -> CliResult<PathBuf> {
    let ok = !name.as_os_str().is_empty()
        && name.components().all(|c| matches!(c, Component::Normal(_) | Component::CurDir));
    if !ok {
        return Err(CliError::Usage(format!(
            "output file {} must be a relative path inside the output directory",
            name.display()
        )));
    }
    Ok(dir.join(name))
}

fn write_output(path: &Path, contents: &[u8]) -> CliResult {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
    }
    write_atomic(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> CliResult<Trajectory> {
    let (traj, norm) = read_tum_file(path).map_err(|e| match e {
        TumError::Io { .. } => CliError::Io(e.to_string()),
        _ => CliError::Io(format!("{}: {e}", path.display())),
    })?;
    note_normalization(path, &norm);
    Ok(traj)
}

fn note_normalization(path: &Path, norm: &Normalization) {
    if norm.reordered {
        eprintln!("note: {}: timestamps were not sorted; sorted on load", path.display());
    }
    if norm.duplicates_dropped > 0 {
        eprintln!(
            "note: {}: dropped {} pose(s) with repeated timestamps",
            path.display(),
            norm.duplicates_dropped
        );
    }
}

fn label_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn pair_params(p: &PairArgs) -> EvalParams {
    EvalParams {
        max_diff: p.max_diff,
        offset: p.offset,
        interpolate_gt: p.interpolate_gt,
        ..EvalParams::default()
    }
}

fn stats_block(out: &mut String, title: &str, unit: &str, s: &Stats) {
    let _ = writeln!(out, "{title} ({unit}), {} samples", s.count);
    for (name, v) in [
        ("rmse", s.rmse),
        ("mean", s.mean),
        ("median", s.median),
        ("std", s.std),
        ("min", s.min),
        ("max", s.max),
    ] {
        let _ = writeln!(out, "  {name:<7}{v:.6}");
    }
}

fn common_text(out: &mut String, e: &Evaluation) {
    let _ = writeln!(
        out,
        "pairs {} (unmatched ground truth {}, unmatched estimate {})",
        e.pairs.len(),
        e.pairs.unmatched_gt_count(),
        e.pairs.unmatched_est_count()
    );
    let _ = writeln!(
        out,
        "coverage {:.1}% of ground-truth timespan, largest gap {:.3} s, {:.1}% of ground-truth poses matched",
        100.0 * e.coverage.temporal_coverage,
        e.coverage.largest_gap,
        100.0 * e.coverage.matched_fraction
    );
}

fn stats_line(out: &mut String, prefix: &str, s: &Stats) {
    let _ = write!(
        out,
        " {prefix}_rmse={} {prefix}_mean={} {prefix}_median={} {prefix}_std={} {prefix}_min={} {prefix}_max={} {prefix}_count={}",
        s.rmse, s.mean, s.median, s.std, s.min, s.max, s.count
    );
}

fn coverage_line(out: &mut String, e: &Evaluation) {
    let _ = write!(
        out,
        "pairs={} unmatched_gt={} unmatched_est={} matched_fraction={} temporal_coverage={} largest_gap={}",
        e.pairs.len(),
        e.pairs.unmatched_gt_count(),
        e.pairs.unmatched_est_count(),
        e.coverage.matched_fraction,
        e.coverage.temporal_coverage,
        e.coverage.largest_gap
    );
}

fn emit(text: &str) -> CliResult<i32> {
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(text.as_bytes())
        .and_then(|_| stdout.flush())
        .map_err(|e| CliError::Io(format!("stdout: {e}")))?;
    Ok(EXIT_OK)
}

fn warn_coverage(e: &Evaluation) {
    if let Some(w) = e.coverage_warning() {
        eprintln!("{w}");
    }
}

fn cmd_ate(a: AteArgs) -> CliResult<i32> {
    let gt = load(&a.pair.groundtruth)?;
    let est = load(&a.pair.estimate)?;
    let params = EvalParams {
        align: !a.no_align,
        compute_rpe: false,
        ..pair_params(&a.pair)
    };
    let plot_path = match &a.plot {
        Some(name) => Some(output_path(&base_output_dir(a.output.output_dir.clone(), None), name)?),
        None => None,
    };
    let eval = evaluate(&gt, &est, &params)?;
    warn_coverage(&eval);
    if let Some(path) = plot_path {
        let transform = eval
            .alignment
            .map(|r| r.transform)
            .unwrap_or_else(RigidTransform::identity);
        write_output(&path, ate_svg(&gt, &est, &eval.pairs, &transform).as_bytes())?;
    }
    let ate = eval.ate.as_ref().expect("ate requested");
    let text = match a.output.format {
        Format::Json => {
            let record = eval.to_record(&label_of(&a.pair.estimate), &label_of(&a.pair.groundtruth), &gt, &est, &params);
            record.to_json() + "\n"
        }
        Format::Line => {
            let mut out = String::new();
            coverage_line(&mut out, &eval);
            stats_line(&mut out, "ate", ate.stats());
            out + "\n"
        }
        Format::Text => {
            let mut out = String::new();
            common_text(&mut out, &eval);
            stats_block(&mut out, "absolute trajectory error", "m", ate.stats());
            if let Some(al) = &eval.alignment {
                let _ = writeln!(out, "alignment residual rmse {:.6} m", al.residual_rmse);
            }
            out
        }
    };
    emit(&text)
}

fn cmd_rpe(a: RpeArgs) -> CliResult<i32> {
    let mut params = pair_params(&a.pair);
    params.compute_ate = false;
    params.delta = match (a.delta_unit, a.delta) {
        (UnitArg::All, Some(_)) => {
            return Err(CliError::Usage("--delta cannot be combined with --delta-unit all".into()))
        }
        (UnitArg::All, None) => DeltaSpec::all_sampled(a.samples, a.seed),
        (unit, delta) => {
            let mut spec = if unit == UnitArg::Frames {
                DeltaSpec::frames(1)
            } else {
                DeltaSpec::seconds(1.0)
            };
            match delta {
                Some(DeltaArg::Value(v)) => spec.delta = v,
                Some(DeltaArg::Full) => params.full_span = true,
                None => {}
            }
            spec.max_samples = a.samples;
            spec.seed = a.seed;
            spec
        }
    };
    params.delta.validate()?;

    let gt = load(&a.pair.groundtruth)?;
    let est = load(&a.pair.estimate)?;
    if params.full_span {
        eprintln!("{FULL_SPAN_WARNING}");
    }
    let eval = evaluate(&gt, &est, &params)?;
    warn_coverage(&eval);
    let rpe = eval.rpe.as_ref().expect("rpe requested");
    let text = match a.output.format {
        Format::Json => {
            let record = eval.to_record(&label_of(&a.pair.estimate), &label_of(&a.pair.groundtruth), &gt, &est, &params);
            record.to_json() + "\n"
        }
        Format::Line => {
            let mut out = String::new();
            coverage_line(&mut out, &eval);
            stats_line(&mut out, "rpe_trans", rpe.trans.stats());
            stats_line(&mut out, "rpe_rot", rpe.rot.stats());
            if let Some((t, r)) = eval.rpe_all_deltas {
                let _ = write!(out, " rpe_all_trans_rmse={t} rpe_all_rot_rmse={r}");
            }
            out + "\n"
        }
        Format::Text => {
            let mut out = String::new();
            common_text(&mut out, &eval);
            match (params.delta.mode.unit(), eval.delta_used.unwrap_or(params.delta.delta)) {
                ("all", _) => {}
                (unit, d) => {
                    let _ = writeln!(out, "window {d} {unit}");
                }
            }
            if let Some((t, r)) = eval.rpe_all_deltas {
                let _ = writeln!(out, "averaged over all windows: translational rmse {t:.6} m, rotational rmse {r:.6} rad");
            }
            stats_block(&mut out, "relative pose error, translational", "m", rpe.trans.stats());
            stats_block(&mut out, "relative pose error, rotational", "rad", rpe.rot.stats());
            out
        }
    };
    emit(&text)
}

fn cmd_associate(a: AssociateArgs) -> CliResult<i32> {
    let target = match &a.out {
        Some(name) => Some(output_path(&base_output_dir(a.output_dir.clone(), None), name)?),
        None => None,
    };
    let gt = load(&a.pair.groundtruth)?;
    let est = load(&a.pair.estimate)?;
    let pairs = associate_with(&gt, &est, &pair_params(&a.pair))?;
    let mut out = String::new();
    for p in pairs.pairs() {
        let _ = writeln!(
            out,
            "{} {}",
            format_value(p.gt.timestamp()),
            format_value(p.est.timestamp())
        );
    }
    match target {
        Some(path) => {
            write_output(&path, out.as_bytes())?;
            eprintln!("{} pairs written to {}", pairs.len(), path.display());
            Ok(EXIT_OK)
        }
        None => emit(&out),
    }
}

fn tum_bytes(traj: &Trajectory) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    write_tum(traj, &mut buf).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(buf)
}

fn apply_degradations(base: &Trajectory, steps: &[DegradeArg], seed: u64) -> CliResult<Trajectory> {
    let mut traj = base.clone();
    for (k, step) in steps.iter().enumerate() {
        // Gap and truncation times are absolute timestamps.
        let spec = DegradationSpec::new(step.0, seed.wrapping_add(1 + k as u64));
        traj = degrade(&traj, &spec)?;
    }
    Ok(traj)
}

fn cmd_synth(a: SynthArgs) -> CliResult<i32> {
    let dir = base_output_dir(a.output_dir.clone(), None);
    let out_path = output_path(&dir, &a.out)?;
    let est_path = match &a.estimate_out {
        Some(name) => Some(output_path(&dir, name)?),
        None => None,
    };
    match (&a.input, est_path.is_some(), a.degrade.is_empty()) {
        (Some(_), true, _) => {
            return Err(CliError::Usage("--estimate-out cannot be combined with --input; the degraded input goes to --out".into()))
        }
        (Some(_), false, true) => {
            return Err(CliError::Usage("--input needs at least one --degrade".into()))
        }
        (None, true, true) => {
            return Err(CliError::Usage("--estimate-out needs at least one --degrade".into()))
        }
        (None, false, false) => {
            return Err(CliError::Usage("--degrade needs --estimate-out when generating".into()))
        }
        _ => {}
    }

    if let Some(input) = &a.input {
        let base = load(input)?;
        let degraded = apply_degradations(&base, &a.degrade, a.seed)?;
        write_output(&out_path, &tum_bytes(&degraded)?)?;
        return Ok(EXIT_OK);
    }

    let spec = MotionSpec {
        scale: a.scale,
        seed: a.seed,
        ..MotionSpec::new(a.shape.into(), a.duration, a.rate)
    };
    let gt = generate(&spec)?;
    let est = match est_path {
        Some(path) => Some((path, apply_degradations(&gt, &a.degrade, a.seed)?)),
        None => None,
    };
    write_output(&out_path, &tum_bytes(&gt)?)?;
    if let Some((path, traj)) = est {
        write_output(&path, &tum_bytes(&traj)?)?;
    }
    Ok(EXIT_OK)
}

fn cmd_report(a: ReportArgs) -> CliResult<i32> {
    let config = ReportConfig::load(&a.config)?;
    let dir = base_output_dir(a.output_dir, config.output_dir.clone());
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let outcome = run_report(&config, &dir, ReportOptions { include_timing: a.timing })
        .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;

    let mut out = String::new();
    for r in &outcome.records {
        match (&r.error, r.ate, r.rpe_trans_headline()) {
            (Some(err), _, _) => {
                let _ = writeln!(out, "{}/{}: failed: {err}", r.algorithm, r.sequence);
            }
            (None, ate, rpe) => {
                let cov = r.coverage.map_or(f64::NAN, |c| c.temporal_coverage);
                let _ = writeln!(
                    out,
                    "{}/{}: ate rmse {:.6} m, rpe trans rmse {:.6} m, coverage {:.1}%{}",
                    r.algorithm,
                    r.sequence,
                    ate.map_or(f64::NAN, |s| s.rmse),
                    rpe.unwrap_or(f64::NAN),
                    100.0 * cov,
                    if cov < crate::evaluate::COVERAGE_WARNING_THRESHOLD { " (low coverage)" } else { "" }
                );
            }
        }
        if let Some(t) = r.evaluation_wall_seconds {
            let _ = writeln!(out, "  evaluated in {t:.3} s");
        }
    }
    let _ = writeln!(
        out,
        "{} entries, {} failed; report written to {}",
        outcome.records.len(),
        outcome.failed_count(),
        outcome.output_dir.display()
    );
    emit(&out)?;
    if !outcome.all_failed() {
        return Ok(EXIT_OK);
    }
    // Every entry failed: report the first entry's failure class.
    Ok(match outcome.failures.iter().flatten().next() {
        Some(EntryFailure::Evaluation(e)) => CliError::from(e.clone()).exit_code(),
        _ => EXIT_IO,
    })
}
