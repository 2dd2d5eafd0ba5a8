//! Experiment drivers: run a config over its seeds, average noisy runs,
//! compare methods on a shared problem, and the built-in small benchmark.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::harness::bounds::{record_bound, regime_label, residual_asymptote, variance_constant, BoundPoint, BoundReport};
use crate::harness::config::Experiment;
use crate::harness::ratefit::fit_rate;
use crate::harness::report::{
    self, EvaluatedRecord, ExperimentSummary, RunSummary, SweepCheck, SweepCheckpoint,
    SweepSummary, SUMMARY_FORMAT_VERSION,
};
use crate::harness::HarnessError;
use crate::operators::Operator;
use crate::problems::{toy_gap_box, toy_problem, toy_z0};
use crate::solvers::{run, Method, Mode, RecordSchedule, SolverError, SolverKind, SolverTrace, StepSchedule};

/// Everything produced by one seed of an experiment.
#[derive(Clone, Debug)]
pub struct RunArtifacts {
    pub seed_entry: u64,
    pub stream_seed: u64,
    pub trace: SolverTrace,
    pub evaluated: Vec<EvaluatedRecord>,
    /// Iteration at which the run left the finite range, if it did; the
    /// trace then holds the checkpoints recorded before that point.
    pub diverged_at: Option<u64>,
}

/// Result of running an experiment over all its seeds.
#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub label: String,
    pub runs: Vec<RunArtifacts>,
    /// Per-checkpoint guarantee check on the first seed's run, for modes
    /// with a guarantee. For noisy runs this is informational (the
    /// guarantee binds the mean, not a single sample); see `sweep`.
    pub bound_report: Option<BoundReport>,
    /// Seed-averaged view, present when the experiment has at least two
    /// seeds.
    pub sweep: Option<SweepSummary>,
    pub rate_fit: Option<crate::harness::ratefit::RateFit>,
    pub rate_fit_error: Option<String>,
    /// CSV files written, as (label, path), when the experiment has an
    /// output directory.
    pub csv_paths: Vec<(String, PathBuf)>,
}

impl ExperimentOutput {
    pub fn any_diverged(&self) -> bool {
        self.runs.iter().any(|r| r.diverged_at.is_some())
    }

    /// Violations that strict mode acts on: per-checkpoint excesses for
    /// exact-oracle runs, mean-above-bound excesses for seed-averaged noisy
    /// runs. A single noisy run never counts (its guarantee binds only the
    /// expectation).
    pub fn strict_violations(&self, stochastic: bool) -> u64 {
        if stochastic {
            self.sweep
                .as_ref()
                .map(|s| s.checks.iter().map(|c| c.violations).sum())
                .unwrap_or(0)
        } else {
            self.bound_report.as_ref().map(|b| b.violations).unwrap_or(0)
        }
    }
}

/// Evaluates merits and guarantees at every checkpoint of a finished trace.
pub fn evaluate_trace(exp: &Experiment, trace: &SolverTrace) -> Vec<EvaluatedRecord> {
    let evaluator = exp.evaluator();
    let d2 = exp.gap_box.diameter_squared();
    let lip = exp.problem.operator().lipschitz();
    trace
        .records
        .iter()
        .map(|rec| EvaluatedRecord {
            iterations: rec.iterations,
            alpha: rec.alpha,
            w: rec.w.clone(),
            ergodic: rec.ergodic.clone(),
            oracle_calls: rec.oracle_calls,
            gap_wbar: evaluator.gap(&rec.ergodic),
            bound: record_bound(exp.solver, exp.schedule, d2, lip, rec),
            gap_raw: if exp.raw_iterate_gap {
                Some(evaluator.gap(&rec.w))
            } else {
                None
            },
        })
        .collect()
}

/// Runs one seed entry of an experiment. Divergence is reported in the
/// artifacts, not as an error; configuration-level solver rejections (bad
/// step, unsupported mode) surface as errors.
pub fn run_seed(exp: &Experiment, entry: u64, master: u64) -> Result<RunArtifacts, HarnessError> {
    let cfg = exp.run_config(entry, master);
    let stream_seed = cfg.seed;
    let (trace, diverged_at) = match run(&exp.problem, &exp.z0, &cfg) {
        Ok(trace) => (trace, None),
        Err(SolverError::Diverged { iteration, partial }) => (*partial, Some(iteration)),
        Err(other) => return Err(HarnessError::Solver(other)),
    };
    let evaluated = evaluate_trace(exp, &trace);
    Ok(RunArtifacts {
        seed_entry: entry,
        stream_seed,
        trace,
        evaluated,
        diverged_at,
    })
}

fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    if samples.iter().any(|v| !v.is_finite()) {
        return (f64::INFINITY, 0.0);
    }
    // Identical samples (e.g. zero-noise runs) average to themselves
    // exactly, with no rounding from the sum.
    if samples.windows(2).all(|w| w[0] == w[1]) {
        return (samples[0], 0.0);
    }
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn build_sweep(exp: &Experiment, runs: &[RunArtifacts]) -> Option<SweepSummary> {
    if runs.len() < 2 {
        return None;
    }
    // All seeds share the record schedule, so checkpoints align; a diverged
    // run may be shorter, in which case only common checkpoints average.
    let common = runs.iter().map(|r| r.evaluated.len()).min()?;
    let reference = &runs[0].evaluated;
    let mut checkpoints = Vec::with_capacity(common);
    let mut samples = Vec::with_capacity(runs.len());
    for i in 0..common {
        samples.clear();
        for r in runs {
            samples.push(r.evaluated[i].gap_wbar.to_f64());
        }
        let (mean_gap, std_error) = mean_and_se(&samples);
        checkpoints.push(SweepCheckpoint {
            iterations: reference[i].iterations,
            oracle_calls: reference[i].oracle_calls,
            mean_gap,
            std_error,
        });
    }
    let d2 = exp.gap_box.diameter_squared();
    let lip = exp.problem.operator().lipschitz();
    let records = &runs[0].trace.records[..common];
    let mut checks = Vec::new();
    match exp.solver.mode {
        Mode::Deterministic => {
            if let Some(label) = regime_label(exp.solver, exp.schedule) {
                let bounds: Vec<f64> = records
                    .iter()
                    .map(|r| crate::harness::bounds::deterministic_bound(d2, r.sum_alpha))
                    .collect();
                checks.push(make_check(label, None, bounds, &checkpoints));
            }
        }
        Mode::Stochastic { sigma, .. } => {
            // Always check the standard constant; additionally check the
            // refined one whenever the schedule sits inside its cap.
            let alpha_max = exp.schedule.max_alpha();
            for (refined, label) in [
                (false, "stochastic_c18".to_string()),
                (
                    true,
                    format!("stochastic_refined_{}", exp.solver.method.name()),
                ),
            ] {
                // Note the refined constant can numerically coincide with
                // the standard one (recycled scheme at alpha L = 1/3); both
                // rows are kept in the summary regardless.
                if let Some(c) = variance_constant(exp.solver.method, refined, alpha_max, lip) {
                    let bounds: Vec<f64> = records
                        .iter()
                        .map(|r| {
                            crate::harness::bounds::stochastic_bound(
                                d2,
                                c,
                                sigma,
                                r.sum_alpha,
                                r.sum_alpha_sq,
                            )
                        })
                        .collect();
                    checks.push(make_check(label, Some(c), bounds, &checkpoints));
                }
            }
        }
    }
    let residual = match (exp.solver.mode, exp.schedule) {
        (Mode::Stochastic { sigma, .. }, StepSchedule::Constant { alpha }) => {
            Some(residual_asymptote(sigma, alpha))
        }
        _ => None,
    };
    Some(SweepSummary {
        seeds: runs.len(),
        checkpoints,
        checks,
        residual_asymptote: residual,
    })
}

fn make_check(
    label: String,
    c: Option<f64>,
    bounds: Vec<f64>,
    checkpoints: &[SweepCheckpoint],
) -> SweepCheck {
    let mut violations = 0;
    let mut max_excess: f64 = 0.0;
    for (cp, &b) in checkpoints.iter().zip(&bounds) {
        let excess = cp.mean_gap - (b + 2.0 * cp.std_error);
        if !cp.mean_gap.is_finite() || excess > 0.0 {
            violations += 1;
            if excess.is_finite() {
                max_excess = max_excess.max(excess);
            } else {
                max_excess = f64::INFINITY;
            }
        }
    }
    SweepCheck {
        label,
        variance_constant: c,
        bounds,
        violations,
        max_excess,
    }
}

fn build_bound_report(exp: &Experiment, run0: &RunArtifacts) -> Option<BoundReport> {
    let label = regime_label(exp.solver, exp.schedule)?;
    let points: Vec<BoundPoint> = run0
        .evaluated
        .iter()
        .filter_map(|r| {
            r.bound.map(|b| BoundPoint {
                iterations: r.iterations,
                gap: r.gap_wbar.to_f64(),
                bound: b,
            })
        })
        .collect();
    if points.is_empty() {
        return None;
    }
    Some(BoundReport::from_points(label, points))
}

fn rate_points(output_runs: &[RunArtifacts], sweep: &Option<SweepSummary>) -> Vec<(u64, f64)> {
    match sweep {
        Some(s) => s
            .checkpoints
            .iter()
            .map(|c| (c.iterations, c.mean_gap))
            .collect(),
        None => output_runs[0]
            .evaluated
            .iter()
            .map(|r| (r.iterations, r.gap_wbar.to_f64()))
            .collect(),
    }
}

/// Runs every seed of an experiment (in parallel when there are several),
/// evaluates merits, checks guarantees, fits the decay rate, and writes CSV
/// traces plus a JSON summary when the experiment has an output directory.
pub fn run_experiment(exp: &Experiment, master: u64) -> Result<ExperimentOutput, HarnessError> {
    let runs: Vec<RunArtifacts> = if exp.seeds.len() > 1 {
        exp.seeds
            .par_iter()
            .map(|&entry| run_seed(exp, entry, master))
            .collect::<Result<_, _>>()?
    } else {
        vec![run_seed(exp, exp.seeds[0], master)?]
    };
    let sweep = build_sweep(exp, &runs);
    let bound_report = build_bound_report(exp, &runs[0]);
    let (rate_fit, rate_fit_error) = match fit_rate(&rate_points(&runs, &sweep), exp.rate_window) {
        Ok(fit) => (Some(fit), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let mut output = ExperimentOutput {
        label: exp.label.clone(),
        runs,
        bound_report,
        sweep,
        rate_fit,
        rate_fit_error,
        csv_paths: Vec::new(),
    };
    if let Some(dir) = &exp.out {
        write_experiment_outputs(exp, &mut output, master, dir)?;
    }
    Ok(output)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes per-seed CSVs, the JSON summary, and a plot script into `dir`.
pub fn write_experiment_outputs(
    exp: &Experiment,
    output: &mut ExperimentOutput,
    master: u64,
    dir: &Path,
) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let dim = exp.problem.dim();
    let single = output.runs.len() == 1;
    let mut csv_paths = Vec::new();
    let mut run_summaries = Vec::new();
    for artifacts in &output.runs {
        let name = if single {
            format!("{}.csv", exp.label)
        } else {
            format!("{}_seed{}.csv", exp.label, artifacts.seed_entry)
        };
        let path = dir.join(&name);
        let text = report::trace_csv(dim, &artifacts.evaluated, exp.raw_iterate_gap);
        std::fs::write(&path, text).map_err(io_err(&path))?;
        run_summaries.push(run_summary(artifacts, Some(name.clone())));
        csv_paths.push((exp.label.clone(), path));
    }
    let summary = ExperimentSummary {
        format_version: SUMMARY_FORMAT_VERSION,
        label: exp.label.clone(),
        solver: exp.solver,
        schedule: exp.schedule,
        iterations: exp.iterations,
        master_seed: master,
        diameter_squared: exp.gap_box.diameter_squared(),
        lipschitz: exp.problem.operator().lipschitz(),
        problem: exp.problem_fingerprint(),
        runs: run_summaries,
        bound_report: output.bound_report.clone(),
        rate_fit: output.rate_fit,
        rate_fit_error: output.rate_fit_error.clone(),
        sweep: output.sweep.clone(),
    };
    let spath = dir.join(format!("{}_summary.json", exp.label));
    report::write_summary(&spath, &summary).map_err(io_err(&spath))?;
    let ppath = dir.join(format!("{}_plot.gp", exp.label));
    let first: Vec<(String, PathBuf)> = csv_paths.first().cloned().into_iter().collect();
    std::fs::write(&ppath, report::plot_script(&exp.label, dim, &first)).map_err(io_err(&ppath))?;
    output.csv_paths = csv_paths;
    Ok(())
}

fn run_summary(artifacts: &RunArtifacts, csv: Option<String>) -> RunSummary {
    let last = artifacts.evaluated.last();
    RunSummary {
        seed_entry: artifacts.seed_entry,
        stream_seed: artifacts.stream_seed,
        csv,
        diverged_at: artifacts.diverged_at,
        iterations_done: artifacts.trace.iterations_done,
        oracle_calls: artifacts.trace.total_oracle_calls,
        final_gap_wbar: last.map(|r| r.gap_wbar.to_f64()),
        final_bound: last.and_then(|r| r.bound),
        step_cap: artifacts.trace.meta.step_cap,
        step_cap_exceeded: artifacts.trace.meta.step_cap_exceeded,
    }
}

/// One row of a comparison view.
#[derive(Clone, Debug)]
pub struct CompareRow {
    /// "by_iteration" or "by_oracle".
    pub view: &'static str,
    /// Iteration count or oracle budget the row is aligned at.
    pub key: u64,
    pub label: String,
    pub iterations: u64,
    pub oracle_calls: u64,
    pub gap_wbar: f64,
    pub bound: Option<f64>,
}

/// Final-checkpoint standing of one method in a comparison.
#[derive(Clone, Debug)]
pub struct FinalRow {
    pub label: String,
    pub iterations: u64,
    pub oracle_calls: u64,
    pub gap_wbar: f64,
    pub bound: Option<f64>,
    pub diverged_at: Option<u64>,
}

/// Methods compared on one shared problem: aligned views plus the
/// underlying per-method outputs.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub rows: Vec<CompareRow>,
    pub finals: Vec<FinalRow>,
    pub outputs: Vec<ExperimentOutput>,
}

impl Comparison {
    /// Long-format CSV of both aligned views.
    pub fn csv(&self) -> String {
        let mut out = String::from("view,key,label,iterations,oracle_calls,gap_wbar,bound\n");
        for r in &self.rows {
            let _ = write!(out, "{},{},{},{},{}", r.view, r.key, r.label, r.iterations, r.oracle_calls);
            out.push(',');
            let _ = write!(out, "{}", r.gap_wbar);
            out.push(',');
            match r.bound {
                Some(b) => {
                    let _ = write!(out, "{b}");
                }
                None => out.push_str("nan"),
            }
            out.push('\n');
        }
        out
    }

    /// Plain-text final table for the terminal.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<12} {:>12} {:>14} {:>14} {:>14}  {}",
            "method", "iterations", "oracle_calls", "gap_wbar", "bound", "note"
        );
        for f in &self.finals {
            let bound = f
                .bound
                .map(|b| format!("{b:>14.6e}"))
                .unwrap_or_else(|| format!("{:>14}", "-"));
            let note = match f.diverged_at {
                Some(k) => format!("diverged at iteration {k}"),
                None => String::new(),
            };
            let _ = writeln!(
                out,
                "{:<12} {:>12} {:>14} {:>14.6e} {}  {}",
                f.label, f.iterations, f.oracle_calls, f.gap_wbar, bound, note
            );
        }
        out
    }
}

/// Runs several experiments that must share a problem, start point, and
/// merit box, and aligns their results by iteration and by oracle budget.
/// Each experiment contributes its first seed entry.
pub fn compare_methods(exps: &[Experiment], master: u64) -> Result<Comparison, HarnessError> {
    if exps.is_empty() {
        return Err(HarnessError::NothingToCompare);
    }
    let reference = exps[0].problem_fingerprint();
    for (i, exp) in exps.iter().enumerate().skip(1) {
        if exp.problem_fingerprint() != reference {
            return Err(HarnessError::MismatchedProblems(format!(
                "config {} (label {}) has a different problem or merit box than config 0",
                i, exp.label
            )));
        }
        if exp.z0 != exps[0].z0 {
            return Err(HarnessError::MismatchedProblems(format!(
                "config {} (label {}) has a different start point than config 0",
                i, exp.label
            )));
        }
    }
    let mut outputs = Vec::with_capacity(exps.len());
    for exp in exps {
        let single = Experiment {
            seeds: vec![exp.seeds[0]],
            out: None,
            ..exp.clone()
        };
        outputs.push(run_experiment(&single, master)?);
    }
    let labels = dedup_labels(exps);
    let mut rows = Vec::new();
    let iter_keys: BTreeSet<u64> = outputs
        .iter()
        .flat_map(|o| o.runs[0].evaluated.iter().map(|r| r.iterations))
        .collect();
    for &key in &iter_keys {
        for (o, label) in outputs.iter().zip(&labels) {
            if let Some(rec) = o.runs[0].evaluated.iter().find(|r| r.iterations == key) {
                rows.push(compare_row("by_iteration", key, label, rec));
            }
        }
    }
    let budget_keys: BTreeSet<u64> = outputs
        .iter()
        .flat_map(|o| o.runs[0].evaluated.iter().map(|r| r.oracle_calls))
        .collect();
    for &key in &budget_keys {
        for (o, label) in outputs.iter().zip(&labels) {
            let best = o.runs[0]
                .evaluated
                .iter()
                .take_while(|r| r.oracle_calls <= key)
                .last();
            if let Some(rec) = best {
                rows.push(compare_row("by_oracle", key, label, rec));
            }
        }
    }
    let finals = outputs
        .iter()
        .zip(&labels)
        .map(|(o, label)| {
            let run0 = &o.runs[0];
            match run0.evaluated.last() {
                Some(rec) => FinalRow {
                    label: label.clone(),
                    iterations: rec.iterations,
                    oracle_calls: rec.oracle_calls,
                    gap_wbar: rec.gap_wbar.to_f64(),
                    bound: rec.bound,
                    diverged_at: run0.diverged_at,
                },
                None => FinalRow {
                    label: label.clone(),
                    iterations: run0.trace.iterations_done,
                    oracle_calls: run0.trace.total_oracle_calls,
                    gap_wbar: f64::NAN,
                    bound: None,
                    diverged_at: run0.diverged_at,
                },
            }
        })
        .collect();
    Ok(Comparison {
        rows,
        finals,
        outputs,
    })
}

fn compare_row(view: &'static str, key: u64, label: &str, rec: &EvaluatedRecord) -> CompareRow {
    CompareRow {
        view,
        key,
        label: label.to_string(),
        iterations: rec.iterations,
        oracle_calls: rec.oracle_calls,
        gap_wbar: rec.gap_wbar.to_f64(),
        bound: rec.bound,
    }
}

/// Labels made unique by suffixing repeats, so output files never collide.
fn dedup_labels(exps: &[Experiment]) -> Vec<String> {
    let mut seen = std::collections::HashMap::new();
    exps.iter()
        .map(|e| {
            let n = seen.entry(e.label.clone()).or_insert(0u32);
            *n += 1;
            if *n == 1 {
                e.label.clone()
            } else {
                format!("{}_{}", e.label, n)
            }
        })
        .collect()
}

/// Writes comparison artifacts: one trace CSV per method, the aligned
/// comparison CSV, a summary JSON per method, and a combined plot script.
pub fn write_comparison(
    exps: &[Experiment],
    comparison: &mut Comparison,
    master: u64,
    dir: &Path,
) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let labels = dedup_labels(exps);
    let mut csvs = Vec::new();
    for ((exp, output), label) in exps.iter().zip(comparison.outputs.iter_mut()).zip(&labels) {
        let relabeled = Experiment {
            label: label.clone(),
            seeds: vec![exp.seeds[0]],
            out: None,
            ..exp.clone()
        };
        write_experiment_outputs(&relabeled, output, master, dir)?;
        if let Some(first) = output.csv_paths.first() {
            csvs.push(first.clone());
        }
    }
    let cpath = dir.join("compare.csv");
    std::fs::write(&cpath, comparison.csv()).map_err(io_err(&cpath))?;
    let ppath = dir.join("plot.gp");
    let dim = exps[0].problem.dim();
    std::fs::write(&ppath, report::plot_script("method comparison", dim, &csvs))
        .map_err(io_err(&ppath))?;
    Ok(())
}

/// The built-in benchmark: all five methods on the scalar `kappa |x| + x y`
/// saddle over `y in [-1, 1]`, each at its customary step size, from
/// `(1, 1)`, for 10^4 iterations. Raw-iterate merits are included because
/// the descent-ascent baseline is interesting precisely for its
/// non-vanishing raw merit.
pub fn toy_experiments(kappa: f64, iterations: u64) -> Vec<Experiment> {
    let entries: [(&str, Method, f64); 5] = [
        ("fbf", Method::Fbf, 1.0),
        ("fbfp", Method::Fbfp, 0.5),
        ("eg", Method::Eg, 1.0),
        ("egp", Method::Egp, 0.5),
        (
            "pgda",
            Method::Pgda {
                simultaneous: false,
            },
            0.01,
        ),
    ];
    entries
        .iter()
        .map(|&(label, method, alpha)| Experiment {
            label: label.to_string(),
            problem: toy_problem(kappa),
            gap_box: toy_gap_box(),
            gap_method: crate::gap::GapMethod::ClosedForm,
            z0: toy_z0(),
            solver: SolverKind::deterministic(method),
            schedule: StepSchedule::Constant { alpha },
            iterations,
            seeds: vec![0],
            records: RecordSchedule::Geometric,
            raw_iterate_gap: true,
            rate_window: ((iterations / 100).max(1), iterations),
            out: None,
        })
        .collect()
}
