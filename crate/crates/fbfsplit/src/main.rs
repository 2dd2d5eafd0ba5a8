//! Command-line front end: run, average, compare, and rate-fit experiments
//! described by JSON configs.
//!
//! Exit codes: 0 success, 2 configuration error, 3 a run left the finite
//! range (its partial trace is still written), 4 a guarantee was violated
//! under `--strict`. Other I/O failures exit 1.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use fbfsplit::harness::{
    compare_methods, fit_rate, run_experiment, toy_experiments, write_comparison, ConfigError,
    Experiment, ExperimentConfig, ExperimentOutput, HarnessError, RateFit,
};
use fbfsplit::solvers::Mode;

#[derive(Parser)]
#[command(
    name = "fbfsplit",
    version,
    about = "Forward-backward-forward splitting experiments on saddle problems"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one experiment config over its seeds and report merits vs bounds.
    Solve(RunArgs),
    /// Run a config over its seeds and report the seed-averaged merit curve.
    Sweep(RunArgs),
    /// Run several configs sharing a problem and align their results.
    Compare(CompareArgs),
    /// Fit a log-log decay rate to a run or an existing trace CSV.
    Rate(RateArgs),
    /// Run the built-in scalar benchmark with all five methods.
    Toy(ToyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Master seed mixed into every seed entry.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (overrides the config's `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit 4 if a checked guarantee is violated.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// Experiment configs (one per method); repeat the flag.
    #[arg(long, required = true)]
    config: Vec<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct RateArgs {
    /// Run this config, then fit its merit curve.
    #[arg(long, conflicts_with = "csv")]
    config: Option<PathBuf>,
    /// Fit an existing trace CSV (columns `iter` and `gap_wbar`).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Fit window as two iteration counts, inclusive.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    window: Option<Vec<u64>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ToyArgs {
    /// Primal regularization weight of the benchmark.
    #[arg(long, default_value_t = 0.01)]
    kappa: f64,
    /// Iteration budget per method.
    #[arg(long, default_value_t = 10_000)]
    iterations: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    strict: bool,
}

struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, msg: impl Display) -> Failure {
    Failure {
        code,
        message: msg.to_string(),
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        fail(2, e)
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Io { .. } => fail(1, e),
            // Solver rejections reachable from here are configuration-level
            // (bad step size, unsupported mode); divergence never surfaces
            // as an error from the harness.
            _ => fail(2, e),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Solve(args) => run_cmd(args, false),
        Cmd::Sweep(args) => run_cmd(args, true),
        Cmd::Compare(args) => compare_cmd(args),
        Cmd::Rate(args) => rate_cmd(args),
        Cmd::Toy(args) => toy_cmd(args),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            std::process::exit(f.code);
        }
    }
}

fn load_experiment(path: &Path, out: Option<PathBuf>) -> Result<Experiment, Failure> {
    let cfg = ExperimentConfig::from_path(path)?;
    let mut exp = cfg.resolve()?;
    if out.is_some() {
        exp.out = out;
    }
    Ok(exp)
}

fn warn_step_caps(label: &str, output: &ExperimentOutput) {
    if output
        .runs
        .iter()
        .any(|r| r.trace.meta.step_cap_exceeded)
    {
        let cap = output.runs[0]
            .trace
            .meta
            .step_cap
            .map(|c| format!("{c}"))
            .unwrap_or_else(|| "?".into());
        eprintln!(
            "warning: {label}: step size exceeds the analyzed cap {cap}; guarantees do not apply"
        );
    }
}

fn describe_mode(mode: Mode) -> String {
    match mode {
        Mode::Deterministic => "deterministic".into(),
        Mode::Stochastic {
            sigma,
            refined_regime,
        } => {
            if refined_regime {
                format!("stochastic sigma={sigma} (refined step regime)")
            } else {
                format!("stochastic sigma={sigma}")
            }
        }
    }
}

fn describe_schedule(schedule: fbfsplit::solvers::StepSchedule) -> String {
    match schedule {
        fbfsplit::solvers::StepSchedule::Constant { alpha } => format!("alpha = {alpha}"),
        fbfsplit::solvers::StepSchedule::InverseSqrt { alpha } => {
            format!("alpha_k = {alpha} / sqrt(k+1)")
        }
    }
}

fn print_rate(fit: &RateFit) {
    println!(
        "rate fit over [{}, {}] on {} checkpoints: slope {:.6}, intercept {:.6}, r^2 {:.6}",
        fit.window.0, fit.window.1, fit.points_used, fit.slope, fit.intercept, fit.r_squared
    );
}

fn print_output(exp: &Experiment, output: &ExperimentOutput, sweep_view: bool) {
    println!(
        "{}: {} {} | {} | K = {} | seeds = {}",
        exp.label,
        exp.solver.method.name(),
        describe_mode(exp.solver.mode),
        describe_schedule(exp.schedule),
        exp.iterations,
        exp.seeds.len()
    );
    for run in &output.runs {
        let last = run.evaluated.last();
        let gap = last
            .map(|r| format!("{:.6e}", r.gap_wbar.to_f64()))
            .unwrap_or_else(|| "-".into());
        let bound = last
            .and_then(|r| r.bound)
            .map(|b| format!("{b:.6e}"))
            .unwrap_or_else(|| "-".into());
        let status = match run.diverged_at {
            Some(k) => format!("DIVERGED at iteration {k}"),
            None => "ok".into(),
        };
        println!(
            "  seed {}: {} iters, {} oracle calls, gap_wbar {}, bound {}, {}",
            run.seed_entry,
            run.trace.iterations_done,
            run.trace.total_oracle_calls,
            gap,
            bound,
            status
        );
    }
    if let Some(report) = &output.bound_report {
        println!(
            "  bound check [{}]: {} checkpoints, {} violations, max excess {:.3e}",
            report.regime,
            report.points.len(),
            report.violations,
            report.max_violation
        );
    }
    if let Some(sweep) = &output.sweep {
        println!("  seed average over {} seeds:", sweep.seeds);
        if sweep_view {
            println!(
                "  {:>10} {:>14} {:>12} {}",
                "iter",
                "mean_gap",
                "2se",
                sweep
                    .checks
                    .iter()
                    .map(|c| format!("{:>14}", c.label))
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            for (i, cp) in sweep.checkpoints.iter().enumerate() {
                let bounds = sweep
                    .checks
                    .iter()
                    .map(|c| format!("{:>14.6e}", c.bounds[i]))
                    .collect::<Vec<_>>()
                    .join(" ");
                println!(
                    "  {:>10} {:>14.6e} {:>12.3e} {}",
                    cp.iterations,
                    cp.mean_gap,
                    2.0 * cp.std_error,
                    bounds
                );
            }
        }
        for check in &sweep.checks {
            println!(
                "  mean-vs-bound [{}]: {} violations, max excess {:.3e}",
                check.label, check.violations, check.max_excess
            );
        }
        if let Some(res) = sweep.residual_asymptote {
            println!("  residual asymptote 9 sigma^2 alpha = {res:.6e}");
        }
    }
    match (&output.rate_fit, &output.rate_fit_error) {
        (Some(fit), _) => {
            print!("  ");
            print_rate(fit);
        }
        (None, Some(err)) => println!("  rate fit unavailable: {err}"),
        _ => {}
    }
    for (_, path) in &output.csv_paths {
        println!("  wrote {}", path.display());
    }
}

fn exit_code_for(exp: &Experiment, output: &ExperimentOutput, strict: bool) -> i32 {
    if output.any_diverged() {
        return 3;
    }
    if strict {
        let stochastic = exp.solver.mode.is_stochastic();
        if stochastic && output.sweep.is_none() {
            eprintln!(
                "note: single noisy run; its guarantee binds only the expectation, so --strict does not apply"
            );
        } else if output.strict_violations(stochastic) > 0 {
            return 4;
        }
    }
    0
}

fn run_cmd(args: RunArgs, sweep_view: bool) -> Result<i32, Failure> {
    let exp = load_experiment(&args.config, args.out)?;
    if sweep_view && exp.seeds.len() < 2 {
        eprintln!("warning: sweep over a single seed performs no averaging");
    }
    let output = run_experiment(&exp, args.seed)?;
    warn_step_caps(&exp.label, &output);
    print_output(&exp, &output, sweep_view);
    Ok(exit_code_for(&exp, &output, args.strict))
}

fn compare_cmd(args: CompareArgs) -> Result<i32, Failure> {
    let mut exps = Vec::new();
    for path in &args.config {
        exps.push(load_experiment(path, None)?);
    }
    let mut comparison = compare_methods(&exps, args.seed)?;
    if let Some(dir) = &args.out {
        write_comparison(&exps, &mut comparison, args.seed, dir)?;
        println!("wrote {}", dir.join("compare.csv").display());
    }
    for (exp, output) in exps.iter().zip(&comparison.outputs) {
        warn_step_caps(&exp.label, output);
    }
    print!("{}", comparison.table());
    let mut code = 0;
    for (exp, output) in exps.iter().zip(&comparison.outputs) {
        let c = exit_code_for(exp, output, args.strict);
        if c == 3 {
            code = 3;
            break;
        }
        if c == 4 {
            code = 4;
        }
    }
    Ok(code)
}

fn rate_cmd(args: RateArgs) -> Result<i32, Failure> {
    let window_override = args.window.as_ref().map(|w| (w[0], w[1]));
    let fit = match (&args.config, &args.csv) {
        (Some(path), None) => {
            let mut exp = load_experiment(path, args.out.clone())?;
            if let Some(w) = window_override {
                exp.rate_window = w;
            }
            let output = run_experiment(&exp, args.seed)?;
            warn_step_caps(&exp.label, &output);
            match (output.rate_fit, output.rate_fit_error) {
                (Some(fit), _) => fit,
                (None, Some(err)) => return Err(fail(2, format!("rate fit failed: {err}"))),
                _ => unreachable!("run_experiment always sets one of the pair"),
            }
        }
        (None, Some(path)) => {
            let points = read_gap_csv(path)?;
            let max_iter = points.iter().map(|p| p.0).max().unwrap_or(0);
            if max_iter == 0 {
                return Err(fail(2, format!("{}: no data rows", path.display())));
            }
            let window = window_override.unwrap_or(((max_iter / 100).max(1), max_iter));
            fit_rate(&points, window).map_err(|e| fail(2, e))?
        }
        _ => {
            return Err(fail(2, "rate needs exactly one of --config or --csv"));
        }
    };
    print_rate(&fit);
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(|e| fail(1, format!("{}: {e}", dir.display())))?;
        let path = dir.join("rate.json");
        let mut text = serde_json::to_string_pretty(&fit).expect("fit serializes");
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| fail(1, format!("{}: {e}", path.display())))?;
        println!("wrote {}", path.display());
    }
    Ok(0)
}

/// Reads `(iter, gap_wbar)` pairs from a trace CSV by header name.
fn read_gap_csv(path: &Path) -> Result<Vec<(u64, f64)>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(2, format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| fail(2, format!("{}: empty file", path.display())))?;
    let cols: Vec<&str> = header.split(',').collect();
    let iter_col = cols
        .iter()
        .position(|&c| c == "iter")
        .ok_or_else(|| fail(2, format!("{}: no `iter` column", path.display())))?;
    let gap_col = cols
        .iter()
        .position(|&c| c == "gap_wbar")
        .ok_or_else(|| fail(2, format!("{}: no `gap_wbar` column", path.display())))?;
    let mut points = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let parse_err = || {
            fail(
                2,
                format!("{}: malformed row {}", path.display(), lineno + 2),
            )
        };
        let iter: u64 = fields
            .get(iter_col)
            .and_then(|s| s.parse().ok())
            .ok_or_else(parse_err)?;
        let gap: f64 = fields
            .get(gap_col)
            .and_then(|s| s.parse().ok())
            .ok_or_else(parse_err)?;
        points.push((iter, gap));
    }
    Ok(points)
}

fn toy_cmd(args: ToyArgs) -> Result<i32, Failure> {
    if !(args.kappa > 0.0) || !args.kappa.is_finite() {
        return Err(fail(2, "kappa must be positive and finite"));
    }
    if args.iterations == 0 {
        return Err(fail(2, "iterations must be at least 1"));
    }
    let exps = toy_experiments(args.kappa, args.iterations);
    let mut comparison = compare_methods(&exps, args.seed)?;
    if let Some(dir) = &args.out {
        write_comparison(&exps, &mut comparison, args.seed, dir)?;
        println!(
            "wrote per-method traces, compare.csv, and plot.gp under {}",
            dir.display()
        );
    }
    println!(
        "scalar benchmark: kappa = {}, K = {}, start (1, 1)",
        args.kappa, args.iterations
    );
    print!("{}", comparison.table());
    let mut code = 0;
    for (exp, output) in exps.iter().zip(&comparison.outputs) {
        warn_step_caps(&exp.label, output);
        let c = exit_code_for(exp, output, args.strict);
        if c == 3 {
            return Ok(3);
        }
        if c == 4 {
            code = 4;
        }
    }
    Ok(code)
}
