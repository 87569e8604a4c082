//! `nusample` command line.
//!
//! Exit codes: 0 success or admissible, 2 inadmissible sequence / failed
//! verification / non-minimal system, 1 usage or input error.

pub mod render;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::analysis::{
    alphas, analyze, bruteforce_observability_matrix, degree_metrics, fundamental_matrix, joint_test_with,
    DegreeMetrics, SamplingSequence, ADMISSIBILITY_TOL,
};
use crate::design::{
    next_instant_third_order, write_planar_csv, DesignOutcome, DesignRequest, SearchBounds, StrategyRegistry,
    DEFAULT_M_MAX,
};
use crate::design::{DesignResult, Spiral};
use crate::error::{Error, Result};
use crate::io::{load_sequence, load_system};
use crate::linalg::{solve_full_rank, RANK_TOL};
use crate::lti::{check_minimality, LinearModel, ModeBlock};
use crate::sim::{deadbeat_inputs, reconstruct_initial_state, sample_outputs, simulate_impulse_train};

pub use render::{floor_condition, floor_relative, Field, Format, Report, Table};

/// Relative residual under which `verify` passes.
pub const VERIFY_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "nusample", version, about = "Joint reachability/observability of nonuniformly sampled LTI systems")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Joint test, degree metrics and factorization check for a sequence.
    Analyze(AnalyzeArgs),
    /// Design a sampling sequence.
    Design(DesignArgs),
    /// Deadbeat and reconstruction round trips on a random initial state.
    Verify(VerifyArgs),
    /// Scale the sampling intervals and tabulate the metrics.
    Sweep(SweepArgs),
    /// Export the geometry of the first design step as CSV.
    Geometry(GeometryArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub instants: PathBuf,
    /// Relative admissibility tolerance on |det|.
    #[arg(long, env = "NUSAMPLE_TOL")]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t0: f64,
    /// Second instant for the geometric step (default: a quarter turn after t0).
    #[arg(long, allow_negative_numbers = true)]
    pub t1: Option<f64>,
    /// auto, closed, geometric or generic (full names also accepted).
    #[arg(long, default_value = "auto")]
    pub method: String,
    /// Branch m of the closed form.
    #[arg(long, default_value_t = 0)]
    pub branch: u32,
    /// Largest turn count tried by the geometric step.
    #[arg(long, default_value_t = DEFAULT_M_MAX)]
    pub m_max: u32,
    /// Smallest interval tried by the generic search.
    #[arg(long, default_value_t = SearchBounds::default().min)]
    pub min_interval: f64,
    /// Largest interval tried by the generic search.
    #[arg(long, default_value_t = SearchBounds::default().max)]
    pub max_interval: f64,
    /// Grid points per interval in the generic search.
    #[arg(long, default_value_t = SearchBounds::default().steps)]
    pub steps: usize,
    /// Write the geometric trace here (geometric method only).
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub system: PathBuf,
    /// Sequence file; needs `final_instant`.
    #[arg(long)]
    pub instants: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub system: PathBuf,
    /// Base sequence whose intervals are scaled (default: unit intervals from 0).
    #[arg(long)]
    pub instants: Option<PathBuf>,
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Standard deviation of the output noise.
    #[arg(long, default_value_t = 1e-4)]
    pub noise: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "NUSAMPLE_TOL")]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GeometryArgs {
    #[arg(long)]
    pub system: PathBuf,
    /// The first two instants are used.
    #[arg(long)]
    pub instants: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_M_MAX)]
    pub m_max: u32,
}

pub fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    ExitCode::from(run_args(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock()))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            code
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let result = match &cli.command {
        Command::Analyze(a) => run_analyze(a, cli.format, out),
        Command::Design(a) => run_design(a, cli.format, out),
        Command::Verify(a) => run_verify(a, cli.format, out),
        Command::Sweep(a) => run_sweep(a, cli.format, out),
        Command::Geometry(a) => run_geometry(a, cli.format, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Singular { .. } | Error::RankDeficient { .. } | Error::NonMinimal { .. } | Error::NoAdmissibleDesign { .. } => 2,
        _ => 1,
    }
}

fn tolerance(tol: Option<f64>) -> Result<f64> {
    match tol {
        None => Ok(ADMISSIBILITY_TOL),
        Some(t) if t > 0.0 && t.is_finite() => Ok(t),
        Some(t) => Err(Error::Parse(format!("tolerance must be positive, got {t}"))),
    }
}

fn write_io(r: std::io::Result<()>) -> Result<()> {
    r.map_err(Error::Io)
}

fn push_degree(r: &mut Report, m: &DegreeMetrics) {
    r.num("normalized_gram_det", floor_relative(m.normalized_gram_det, 1.0));
    r.num("min_principal_angle", floor_relative(m.min_principal_angle, 1.0));
    r.num("degree_condition_number", floor_condition(m.condition_number));
}

pub fn run_analyze(args: &AnalyzeArgs, format: Format, out: &mut dyn Write) -> Result<u8> {
    let tol = tolerance(args.tol)?;
    let spec = load_system(&args.system)?;
    let seq = load_sequence(&args.instants)?;
    let report = analyze(&spec, &seq, tol)?;
    let j = &report.joint;

    let mut r = Report::new();
    r.int("order", spec.order() as i64);
    r.nums("alphas", report.alphas.as_slice());
    r.num("determinant", floor_relative(j.determinant, j.scale));
    r.num("threshold", j.threshold());
    r.text("verdict", if j.admissible { "admissible" } else { "inadmissible" });
    r.num("condition_number", floor_condition(j.condition_number));
    r.text("minimality", report.minimality.to_string());
    match (&report.degree, &report.factors) {
        (Some(d), Some(f)) => {
            push_degree(&mut r, d);
            r.num("n1", f.n1).num("n2", f.n2).num("m1", f.m1).num("m2", f.m2);
            r.num("basis_constant", f.basis_constant);
            if j.admissible {
                r.num("ratio_ctrl", f.ratio_ctrl()).num("ratio_obs", f.ratio_obs());
            }
        }
        _ => {
            r.text("degree", "unavailable for a non-minimal system");
        }
    }
    write_io(r.render(format, out))?;
    Ok(if report.minimality.minimal && j.admissible { 0 } else { 2 })
}

fn design_report(res: &DesignResult) -> Report {
    let mut r = Report::new();
    r.text("method", res.method.as_str());
    match res.branch {
        Some(m) => r.int("branch", m as i64),
        None => r.text("branch", "none"),
    };
    r.nums("instants", res.sequence.instants());
    r.nums("intervals", &res.sequence.intervals());
    push_degree(&mut r, &res.metric);
    r
}

pub fn run_design(args: &DesignArgs, format: Format, out: &mut dyn Write) -> Result<u8> {
    let spec = load_system(&args.system)?;
    let request = DesignRequest {
        t0: args.t0,
        t1: args.t1,
        branch: args.branch,
        m_max: args.m_max,
        bounds: SearchBounds { min: args.min_interval, max: args.max_interval, steps: args.steps },
    };
    let registry = StrategyRegistry::with_defaults();
    let DesignOutcome { result, trace } = match registry.design(&args.method, &spec, &request) {
        Ok(o) => o,
        Err(Error::NoAdmissibleDesign { best }) => {
            let mut r = design_report(&best);
            r.text("status", "no admissible sequence on the search grid");
            write_io(r.render(format, out))?;
            return Ok(2);
        }
        Err(e) => return Err(e),
    };
    let mut r = design_report(&result);
    if let Some(t) = &trace {
        r.num("rotation", t.rotation);
        r.num("mu", t.mu);
        r.num("surface_exponent", t.surface_exponent);
        r.num("frame_gram_det", floor_relative(t.frame_metric.normalized_gram_det, 1.0));
    }
    if let Some(path) = &args.trace {
        let t = trace.as_ref().ok_or_else(|| {
            Error::Unsupported(format!("method {} produces no geometric trace", result.method))
        })?;
        t.write_csv(create(path)?)?;
    }
    write_io(r.render(format, out))?;
    Ok(0)
}

fn create(path: &Path) -> Result<std::fs::File> {
    std::fs::File::create(path).map_err(|e| Error::Parse(format!("{}: cannot create file: {e}", path.display())))
}

fn relative(diff: f64, base: f64) -> f64 {
    if base > 0.0 { diff / base } else { diff }
}

fn normal_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| StandardNormal.sample(rng)))
}

pub fn run_verify(args: &VerifyArgs, format: Format, out: &mut dyn Write) -> Result<u8> {
    let spec = load_system(&args.system)?;
    let seq = load_sequence(&args.instants)?;
    let n = spec.order();
    if seq.len() != n {
        return Err(Error::OrderMismatch { expected: n, found: seq.len() });
    }
    if seq.final_instant().is_none() {
        return Err(Error::MissingFinalInstant);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let x0 = normal_vector(&mut rng, n);

    let ctrl = LinearModel::controllability(&spec)?;
    let plan = deadbeat_inputs(&ctrl, &x0, &seq)?;
    let traj = simulate_impulse_train(&ctrl, &x0, &plan);
    let deadbeat = relative(traj.final_state().norm(), x0.norm());

    let obs = LinearModel::observability(&spec)?;
    let av = alphas(&seq);
    let y = sample_outputs(&obs, &x0, &av);
    let x_hat = reconstruct_initial_state(&obs, &y, &av)?;
    let recon = relative((&x_hat - &x0).norm(), x0.norm());

    let pass = deadbeat <= VERIFY_TOL && recon <= VERIFY_TOL;
    let mut r = Report::new();
    r.int("seed", args.seed as i64);
    r.nums("initial_state", x0.as_slice());
    r.nums("inputs", &plan.inputs);
    r.num("deadbeat_residual", deadbeat);
    r.num("reconstruction_error", recon);
    r.num("tolerance", VERIFY_TOL);
    r.text("status", if pass { "pass" } else { "fail" });
    write_io(r.render(format, out))?;
    Ok(if pass { 0 } else { 2 })
}

pub const SWEEP_HEADER: [&str; 5] = ["scale", "determinant", "gram_det", "condition_number", "noise_amplification"];

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 { v[k / 2] } else { 0.5 * (v[k / 2 - 1] + v[k / 2]) }
}

pub fn run_sweep(args: &SweepArgs, format: Format, out: &mut dyn Write) -> Result<u8> {
    let tol = tolerance(args.tol)?;
    if !(args.from > 0.0 && args.from.is_finite() && args.to.is_finite() && args.to >= args.from) {
        return Err(Error::Parse(format!("need 0 < --from ≤ --to, got {} and {}", args.from, args.to)));
    }
    if args.points == 0 || args.trials == 0 {
        return Err(Error::Parse("--points and --trials must be positive".into()));
    }
    if !(args.noise > 0.0 && args.noise.is_finite()) {
        return Err(Error::Parse(format!("--noise must be positive, got {}", args.noise)));
    }
    let spec = load_system(&args.system)?;
    let n = spec.order();
    let (t0, base) = match &args.instants {
        Some(p) => {
            let seq = load_sequence(p)?;
            if seq.len() != n {
                return Err(Error::OrderMismatch { expected: n, found: seq.len() });
            }
            (seq.instants()[0], seq.intervals())
        }
        None => (0.0, vec![1.0; n - 1]),
    };
    let minimality = check_minimality(&spec);
    if !minimality.minimal {
        return Err(Error::NonMinimal { blocks: minimality.offending_blocks });
    }
    let obs = LinearModel::observability(&spec)?;

    let trials: Vec<(DVector<f64>, DVector<f64>)> = (0..args.trials as u64)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed.wrapping_add(i));
            let x0 = normal_vector(&mut rng, n);
            let noise = normal_vector(&mut rng, n) * args.noise;
            (x0, noise)
        })
        .collect();

    let mut rows = Vec::with_capacity(args.points);
    for k in 0..args.points {
        let scale = if args.points == 1 {
            args.from
        } else {
            args.from + (args.to - args.from) * k as f64 / (args.points - 1) as f64
        };
        let intervals: Vec<f64> = base.iter().map(|&dt| dt * scale).collect();
        let seq = SamplingSequence::from_intervals(t0, &intervals, None)?;
        let av = alphas(&seq);
        let jt = joint_test_with(&fundamental_matrix(spec.eigen(), &av)?, tol);
        let gram = degree_metrics(&spec, &av)?.normalized_gram_det;
        let o = bruteforce_observability_matrix(&obs, &av)?;
        let errors: Vec<f64> = trials
            .iter()
            .map(|(x0, noise)| {
                let y = &o * x0 + noise;
                match solve_full_rank(&o, &y, RANK_TOL) {
                    Ok(x) => (x - x0).norm(),
                    Err(_) => f64::INFINITY,
                }
            })
            .collect();
        rows.push(vec![
            scale,
            floor_relative(jt.determinant, jt.scale),
            floor_relative(gram, 1.0),
            floor_condition(jt.condition_number),
            median(errors) / args.noise,
        ]);
    }
    write_io(Table { header: SWEEP_HEADER.to_vec(), rows }.render(format, out))?;
    Ok(0)
}

pub fn run_geometry(args: &GeometryArgs, format: Format, out: &mut dyn Write) -> Result<u8> {
    let spec = load_system(&args.system)?;
    let seq = load_sequence(&args.instants)?;
    let t = seq.instants();
    let mut r = Report::new();
    match spec.eigen().blocks() {
        [ModeBlock::Oscillatory { re, im, multiplicity: 1, .. }] => {
            let offsets: Vec<f64> = t.iter().map(|&ti| ti - t[0]).collect();
            write_planar_csv(*re, *im, &offsets, create(&args.out)?)?;
            r.text("kind", "planar");
            r.nums("offsets", &offsets);
        }
        _ => {
            Spiral::from_spec(&spec)?;
            if t.len() < 2 {
                return Err(Error::InvalidSequence("the geometric step needs two instants".into()));
            }
            let (res, trace) = next_instant_third_order(&spec, t[0], t[1], args.m_max)?;
            trace.write_csv(create(&args.out)?)?;
            r.text("kind", "spiral");
            r.nums("instants", res.sequence.instants());
            r.int("branch", trace.chosen as i64);
            r.num("rotation", trace.rotation);
            r.num("mu", trace.mu);
            r.num("surface_exponent", trace.surface_exponent);
            r.num("angle_error", floor_relative(trace.angle_error(), 1.0));
        }
    }
    write_io(r.render(format, out))?;
    Ok(0)
}
