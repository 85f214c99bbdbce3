//! `cattool`: effective cat sizes, parameter sweeps, distribution fits and
//! entropy curves from the command line.
//!
//! Tables go to stdout (the sweep writes files) as tab-separated columns under
//! `#`-prefixed metadata lines. Exit status is 2 for invalid arguments or a
//! malformed CSV, 3 for a distribution that is not normalized and 1 for any
//! other failure.

mod angle;
mod input;

use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use catsize::distinguish::{cat_size, relative_cat_size, CatSizeResult, DEFAULT_CLOSED_FORM_N_MAX};
use catsize::entropy::{
    disconnectivity, entropy_curve, fock_disconnectivity, DisconnectivityResult,
};
use catsize::fit::fit_number_distribution;
use catsize::sequential::{run_protocol, simulate_protocol, BranchChoice};
use catsize::state::number_distribution;
use catsize::{
    FitGrid, FockOccupation, GaussianSpread, ProductBranchPair, RdmMode, SuperpositionSpec,
};

use angle::Angle;
use input::{read_distribution, write_distribution, InputError};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "cattool",
    version,
    about = "Measurement-based effective size of cat states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cat size C_δ = N / n_min for one state.
    Catsize(CatsizeArgs),
    /// Relative cat size 1/n_min over a (θ0, σ) grid, written as TSV.
    Sweep(SweepArgs),
    /// Fit (θ0, σ) to a measured number distribution and report its cat size.
    Fit(FitArgs),
    /// Von Neumann entropy S_n of the n-particle RDM.
    Entropy(EntropyArgs),
    /// Leggett's disconnectivity for a Fock occupation or a cat state.
    Disconnectivity(DisconnectivityArgs),
    /// Sequential single-particle protocol: analytic and simulated success.
    Seqsim(SeqsimArgs),
    /// Model number distribution as `n,probability` CSV (input format of `fit`).
    Distribution(DistributionArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Closed,
    Finite,
}

impl From<Mode> for RdmMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Closed => RdmMode::ClosedForm,
            Mode::Finite => RdmMode::FiniteN,
        }
    }
}

#[derive(Args)]
struct StateArgs {
    /// Total particle number.
    #[arg(long = "N")]
    n_particles: Option<usize>,
    /// Centre of the spread, in radians or as `<x>pi`.
    #[arg(long, allow_hyphen_values = true)]
    theta0: Angle,
    /// Width of the spread.
    #[arg(long, default_value = "0")]
    sigma: Angle,
    #[arg(long, value_enum, default_value_t = Mode::Closed)]
    mode: Mode,
}

#[derive(Args)]
struct CatsizeArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Precision δ; repeat the flag or give a comma list.
    #[arg(long = "delta", value_delimiter = ',', default_value = "0.01")]
    deltas: Vec<f64>,
    /// Largest number of measured particles tried [default: N, capped at 100 in closed mode].
    #[arg(long)]
    n_max: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, allow_hyphen_values = true, default_value = "-0.25pi")]
    theta0_min: Angle,
    #[arg(long, allow_hyphen_values = true, default_value = "0.25pi")]
    theta0_max: Angle,
    #[arg(long, default_value = "0.025pi")]
    theta0_step: Angle,
    #[arg(long, default_value = "0")]
    sigma_min: Angle,
    #[arg(long, default_value = "0.25pi")]
    sigma_max: Angle,
    #[arg(long, default_value = "0.025pi")]
    sigma_step: Angle,
    #[arg(
        long = "delta",
        value_delimiter = ',',
        default_value = "1e-2,1e-4,1e-6,1e-10"
    )]
    deltas: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_CLOSED_FORM_N_MAX)]
    n_max: usize,
    /// Relative sizes below this are reported as 0.
    #[arg(long, default_value_t = 0.01)]
    cutoff: f64,
    /// Output TSV.
    #[arg(long, short)]
    output: PathBuf,
    /// P_E trace TSV [default: <output>.pe.tsv].
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// CSV with header `n,probability` and rows n = 0..N.
    input: PathBuf,
    /// Expected particle number; inferred from the row count if omitted.
    #[arg(long = "N")]
    n_particles: Option<usize>,
    #[arg(long, default_value = "0.01pi")]
    theta_step: Angle,
    #[arg(long, default_value = "0.005pi")]
    sigma_step: Angle,
    #[arg(long, default_value = "0.1pi")]
    sigma_max: Angle,
    #[arg(long = "delta", value_delimiter = ',', default_value = "1e-2,1e-4")]
    deltas: Vec<f64>,
}

#[derive(Args)]
struct EntropyArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Range of n as `a..b` (inclusive).
    #[arg(long = "n", default_value = "1..50", value_parser = parse_range)]
    range: RangeInclusive<usize>,
}

#[derive(Args)]
struct DisconnectivityArgs {
    /// Mode occupations of a Fock state, e.g. `3,2`.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["n_particles", "theta0"])]
    fock: Option<Vec<usize>>,
    #[arg(long = "N")]
    n_particles: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    theta0: Option<Angle>,
    #[arg(long, default_value = "0")]
    sigma: Angle,
    #[arg(long, value_enum, default_value_t = Mode::Closed)]
    mode: Mode,
    #[arg(long, default_value_t = catsize::entropy::DEFAULT_THRESHOLD)]
    threshold: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Truth {
    A,
    B,
    Prior,
}

#[derive(Args)]
struct SeqsimArgs {
    /// Single-particle overlaps c_k = ⟨a_k|b_k⟩, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    overlaps: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    prior_a: f64,
    /// Branch the simulated particles are drawn from.
    #[arg(long, value_enum, default_value_t = Truth::Prior)]
    truth: Truth,
}

#[derive(Args)]
struct DistributionArgs {
    #[arg(long = "N")]
    n_particles: usize,
    #[arg(long, allow_hyphen_values = true)]
    theta0: Angle,
    #[arg(long, default_value = "0")]
    sigma: Angle,
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| format!("`{s}` is not a range like 1..50"))?;
    let lo: usize = a
        .trim()
        .parse()
        .map_err(|_| format!("bad range start `{a}`"))?;
    let hi: usize = b
        .trim()
        .parse()
        .map_err(|_| format!("bad range end `{b}`"))?;
    if lo == 0 || lo > hi {
        return Err(format!("range {lo}..{hi} must satisfy 1 <= start <= end"));
    }
    Ok(lo..=hi)
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn other(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<catsize::Error> for Failure {
    fn from(e: catsize::Error) -> Self {
        match e {
            catsize::Error::InvalidParameter { .. } => Failure::usage(e.to_string()),
            _ => Failure::other(e.to_string()),
        }
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        let code = match e {
            InputError::Malformed { .. } => 2,
            InputError::NotNormalized { .. } => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<String, Failure>;

fn header(command: &str) -> String {
    let args: Vec<String> = std::env::args().skip(1).collect();
    format!(
        "# cattool {VERSION} {command}\n# args: {}\n",
        args.join(" ")
    )
}

fn check_deltas(deltas: &[f64]) -> Result<(), Failure> {
    if deltas.is_empty() {
        return Err(Failure::usage("at least one --delta is required"));
    }
    match deltas.iter().find(|d| !(**d > 0.0 && **d < 0.5)) {
        Some(d) => Err(Failure::usage(format!("--delta {d} is outside (0, 1/2)"))),
        None => Ok(()),
    }
}

/// Angle label for a value computed in radians.
fn label(radians: f64) -> Angle {
    Angle::from_pi_units((radians / std::f64::consts::PI * 1e12).round() / 1e12)
}

fn spread(theta0: Angle, sigma: Angle) -> Result<GaussianSpread, Failure> {
    Ok(GaussianSpread::new(theta0.radians(), sigma.radians())?)
}

fn cmd_catsize(args: &CatsizeArgs) -> Outcome {
    check_deltas(&args.deltas)?;
    let st = &args.state;
    let spread = spread(st.theta0, st.sigma)?;
    if st.mode == Mode::Finite && st.n_particles.is_none() {
        return Err(Failure::usage("--mode finite needs --N"));
    }
    let n_max = args.n_max.unwrap_or(match (st.mode, st.n_particles) {
        (Mode::Finite, Some(n)) => n,
        (_, Some(n)) => n.min(DEFAULT_CLOSED_FORM_N_MAX),
        (_, None) => DEFAULT_CLOSED_FORM_N_MAX,
    });
    let mut out = header("catsize");
    let _ = writeln!(
        out,
        "# theta0 = {}, sigma = {}, N = {}, mode = {}, n_max = {n_max}",
        st.theta0,
        st.sigma,
        st.n_particles.map_or("-".to_string(), |n| n.to_string()),
        if st.mode == Mode::Closed {
            "closed"
        } else {
            "finite"
        },
    );
    out.push_str("delta\tn_min\tcat_size\trelative_size\tp_error\n");
    for &delta in &args.deltas {
        let (r, c) = match st.n_particles {
            Some(n) => {
                let spec = SuperpositionSpec::new(n, spread)?;
                let r = cat_size(&spec, delta, st.mode.into(), n_max)?;
                let c = r.cat_size.to_string();
                (r, c)
            }
            None => (relative_cat_size(&spread, delta, n_max)?, "-".to_string()),
        };
        let _ = writeln!(
            out,
            "{delta}\t{}\t{c}\t{}\t{:e}",
            r.n_min.unwrap_or(0),
            r.relative_size,
            r.final_error_probability().unwrap_or(f64::NAN),
        );
    }
    Ok(out)
}

fn check_range(
    name: &str,
    lo: Angle,
    hi: Angle,
    step: Angle,
    bounds: (f64, f64),
) -> Result<(), Failure> {
    const SLACK: f64 = 1e-12;
    if !(step.radians() > 0.0) {
        return Err(Failure::usage(format!("--{name}-step must be positive")));
    }
    if lo.radians() > hi.radians() {
        return Err(Failure::usage(format!("--{name}-min exceeds --{name}-max")));
    }
    if lo.radians() < bounds.0 - SLACK || hi.radians() > bounds.1 + SLACK {
        return Err(Failure::usage(format!(
            "--{name} range {lo}..{hi} leaves [{}, {}]",
            label(bounds.0),
            label(bounds.1)
        )));
    }
    Ok(())
}

fn default_trace_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".pe.tsv");
    PathBuf::from(name)
}

fn cmd_sweep(args: &SweepArgs) -> Outcome {
    use std::f64::consts::FRAC_PI_2;
    check_deltas(&args.deltas)?;
    check_range(
        "theta0",
        args.theta0_min,
        args.theta0_max,
        args.theta0_step,
        (-FRAC_PI_2, FRAC_PI_2),
    )?;
    check_range(
        "sigma",
        args.sigma_min,
        args.sigma_max,
        args.sigma_step,
        (0.0, FRAC_PI_2),
    )?;
    if args.n_max == 0 {
        return Err(Failure::usage("--n-max must be at least 1"));
    }
    if !(0.0..1.0).contains(&args.cutoff) {
        return Err(Failure::usage("--cutoff must lie in [0, 1)"));
    }
    let thetas = Angle::grid(args.theta0_min, args.theta0_max, args.theta0_step);
    let sigmas = Angle::grid(args.sigma_min, args.sigma_max, args.sigma_step);
    let cells: Vec<(Angle, Angle)> = sigmas
        .iter()
        .flat_map(|s| thetas.iter().map(move |t| (*t, *s)))
        .collect();
    // One scan per cell at the smallest δ covers every larger δ.
    let finest = args.deltas.iter().copied().fold(f64::INFINITY, f64::min);
    let results = cells
        .par_iter()
        .map(|(t, s)| {
            relative_cat_size(&spread(*t, *s)?, finest, args.n_max).map_err(Failure::from)
        })
        .collect::<Result<Vec<CatSizeResult>, Failure>>()?;

    let trace_path = args
        .trace
        .clone()
        .unwrap_or_else(|| default_trace_path(&args.output));
    let trace_name = trace_path.file_name().map_or_else(
        || trace_path.display().to_string(),
        |n| n.to_string_lossy().into_owned(),
    );
    let mut table = header("sweep");
    let _ = writeln!(
        table,
        "# theta0 grid: {}..{} step {} ({} points)\n# sigma grid: {}..{} step {} ({} points)",
        args.theta0_min,
        args.theta0_max,
        args.theta0_step,
        thetas.len(),
        args.sigma_min,
        args.sigma_max,
        args.sigma_step,
        sigmas.len()
    );
    let _ = writeln!(
        table,
        "# closed form, n <= {}, cutoff {} on 1/n_min; undefined or cut-off cells report 0\n# rows ordered by delta, sigma, theta0; trace = {trace_name}#<cell>",
        args.n_max, args.cutoff
    );
    table.push_str("theta0\tsigma\tdelta\tn_min\trelative_size\ttrace\n");
    for &delta in &args.deltas {
        for (cell, ((t, s), r)) in cells.iter().zip(&results).enumerate() {
            let n_min = r
                .probability_trace
                .iter()
                .find(|(_, p)| *p >= 1.0 - delta)
                .map_or(0, |(n, _)| *n);
            let rel = if n_min == 0 { 0.0 } else { 1.0 / n_min as f64 };
            let rel = if rel < args.cutoff { 0.0 } else { rel };
            let _ = writeln!(
                table,
                "{t}\t{s}\t{delta}\t{n_min}\t{rel}\t{trace_name}#{cell}"
            );
        }
    }

    let mut trace = header("sweep P_E trace");
    let _ = writeln!(
        trace,
        "# error probability 1 - P(n) probed while scanning at delta = {finest}"
    );
    trace.push_str("cell\ttheta0\tsigma\tn\tp_error\n");
    for (cell, ((t, s), r)) in cells.iter().zip(&results).enumerate() {
        for (n, p) in &r.probability_trace {
            let _ = writeln!(trace, "{cell}\t{t}\t{s}\t{n}\t{:e}", 1.0 - p);
        }
    }
    let write = |path: &Path, text: &str| {
        std::fs::write(path, text)
            .map_err(|e| Failure::other(format!("cannot write {}: {e}", path.display())))
    };
    write(&args.output, &table)?;
    write(&trace_path, &trace)?;
    Ok(String::new())
}

fn cmd_fit(args: &FitArgs) -> Outcome {
    check_deltas(&args.deltas)?;
    let file = File::open(&args.input)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", args.input.display())))?;
    let target = read_distribution(BufReader::new(file))?;
    let n = target.n_particles();
    if let Some(expected) = args.n_particles {
        if expected != n {
            return Err(Failure::usage(format!(
                "--N {expected} but the file has {} rows (N = {n})",
                n + 1
            )));
        }
    }
    let grid = FitGrid::new(
        args.theta_step.radians(),
        args.sigma_step.radians(),
        args.sigma_max.radians(),
    )?;
    let r = fit_number_distribution(&target, n, grid, &args.deltas)?;
    let mut out = header("fit");
    let _ = writeln!(
        out,
        "# N = {n}; grid theta0 0..0.25pi step {}, sigma 0..{} step {}; cat sizes in finite-N mode",
        args.theta_step, args.sigma_max, args.sigma_step
    );
    out.push_str("theta0\tsigma\tresidual\tdelta\tn_min\tcat_size\trelative_size\n");
    for c in &r.cat_sizes {
        let _ = writeln!(
            out,
            "{}\t{}\t{:e}\t{}\t{}\t{}\t{}",
            label(r.theta0),
            label(r.sigma),
            r.residual,
            c.delta,
            c.n_min.unwrap_or(0),
            c.cat_size,
            c.relative_size
        );
    }
    Ok(out)
}

fn state_spec(st: &StateArgs, n_needed: usize) -> Result<SuperpositionSpec, Failure> {
    let n = match (st.mode, st.n_particles) {
        (Mode::Finite, None) => return Err(Failure::usage("--mode finite needs --N")),
        (Mode::Finite, Some(n)) if n < n_needed => {
            return Err(Failure::usage(format!("n = {n_needed} exceeds --N {n}")))
        }
        (_, Some(n)) => n,
        (Mode::Closed, None) => n_needed,
    };
    Ok(SuperpositionSpec::new(n, spread(st.theta0, st.sigma)?)?)
}

fn cmd_entropy(args: &EntropyArgs) -> Outcome {
    let st = &args.state;
    let spec = state_spec(st, *args.range.end())?;
    let curve = entropy_curve(&spec, st.mode.into(), args.range.clone())?;
    let mut out = header("entropy");
    let _ = writeln!(
        out,
        "# theta0 = {}, sigma = {}; entropies in nats",
        st.theta0, st.sigma
    );
    out.push_str("n\tentropy\n");
    for (n, s) in &curve.values {
        let _ = writeln!(out, "{n}\t{s}");
    }
    Ok(out)
}

fn cmd_disconnectivity(args: &DisconnectivityArgs) -> Outcome {
    let (describe, result): (String, DisconnectivityResult) = match (&args.fock, args.theta0) {
        (Some(counts), _) => {
            let occ = FockOccupation::new(counts.clone())?;
            let text = counts
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(",");
            (
                format!("Fock occupation {text}"),
                fock_disconnectivity(&occ, args.threshold)?,
            )
        }
        (None, Some(theta0)) => {
            let n = args
                .n_particles
                .ok_or_else(|| Failure::usage("a cat state needs --N"))?;
            let st = StateArgs {
                n_particles: Some(n),
                theta0,
                sigma: args.sigma,
                mode: args.mode,
            };
            let curve = entropy_curve(&state_spec(&st, n)?, args.mode.into(), 1..=n)?;
            (
                format!(
                    "cat state N = {n}, theta0 = {theta0}, sigma = {}",
                    args.sigma
                ),
                disconnectivity(&curve, args.threshold)?,
            )
        }
        (None, None) => return Err(Failure::usage("give --fock, or --N with --theta0")),
    };
    let mut out = header("disconnectivity");
    let _ = writeln!(
        out,
        "# {describe}; threshold {}\n# D = {}",
        result.threshold, result.d_value
    );
    out.push_str("n\tbeta\n");
    for (n, b) in &result.betas {
        let _ = writeln!(out, "{n}\t{b}");
    }
    Ok(out)
}

fn cmd_seqsim(args: &SeqsimArgs) -> Outcome {
    let pair = ProductBranchPair::new(args.overlaps.clone(), args.prior_a)?;
    let trace = run_protocol(&pair);
    let truth = match args.truth {
        Truth::A => BranchChoice::A,
        Truth::B => BranchChoice::B,
        Truth::Prior => BranchChoice::FromPrior,
    };
    let empirical = simulate_protocol(&pair, truth, args.seed, args.trials)?;
    // Against a fixed branch the rate is the conditional success, not P_n.
    let analytic = trace.final_success_probability;
    let std_error = (analytic * (1.0 - analytic) / args.trials as f64).sqrt();
    let mut out = header("seqsim");
    let _ = writeln!(out, "# analytic P_n = {analytic}");
    let _ = writeln!(
        out,
        "# empirical = {empirical} over {} trials, seed {}",
        args.trials, args.seed
    );
    if args.truth == Truth::Prior {
        let z = if std_error > 0.0 {
            (empirical - analytic) / std_error
        } else {
            0.0
        };
        let _ = writeln!(out, "# standard error = {std_error:e}, z = {z:.3}");
    }
    out.push_str("k\toverlap\tr\tp_k\n");
    for (step, c) in trace.steps.iter().zip(&args.overlaps) {
        let _ = writeln!(out, "{}\t{c}\t{}\t{}", step.k, step.r, step.p);
    }
    Ok(out)
}

fn cmd_distribution(args: &DistributionArgs) -> Outcome {
    let spec = SuperpositionSpec::new(args.n_particles, spread(args.theta0, args.sigma)?)?;
    Ok(write_distribution(&number_distribution(&spec)?))
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Catsize(a) => cmd_catsize(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Entropy(a) => cmd_entropy(a),
        Command::Disconnectivity(a) => cmd_disconnectivity(a),
        Command::Seqsim(a) => cmd_seqsim(a),
        Command::Distribution(a) => cmd_distribution(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("cattool: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
