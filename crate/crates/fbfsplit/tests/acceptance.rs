//! Acceptance gate: ten end-to-end checks with pinned tolerances, one test
//! (and one pass/fail line) per criterion.
//!
//! Run `cargo test --test acceptance` for the pass/fail lines, or add
//! `-- --nocapture` to see the measured numbers behind each verdict.

use std::time::Instant;

use fbfsplit::gap::{averaging_certificate, grid_gap, vi_gap, GapEvaluator, GapMethod};
use fbfsplit::harness::{run_experiment, toy_experiments, Experiment};
use fbfsplit::operators::random_instance;
use fbfsplit::problems::{random_box_problem, toy_gap_box, toy_problem, toy_z0, Problem};
use fbfsplit::regularizers::{prox_residual_check, Regularizer};
use fbfsplit::rng::RngStream;
use fbfsplit::solvers::{
    ogda_sequence, reflected_sequence, run, Method, Mode, RecordSchedule, RunConfig, SolverKind,
    StepSchedule,
};
use fbfsplit::space::{CompactBox, Point, SaddleSplit};
use fbfsplit::Operator;

// ---- pinned tolerances and budgets ----------------------------------------

/// Additive slack on per-checkpoint guarantee comparisons (criteria 1, 2).
const GUARANTEE_SLACK: f64 = 1e-10;
/// Wall-clock budget for each deterministic benchmark run (criteria 1, 2).
const DET_TIME_LIMIT_S: f64 = 5.0;
/// Fit window and admissible slope band for deterministic decay (criterion 3).
const RATE_WINDOW_DET: (u64, u64) = (100, 10_000);
const SLOPE_BAND_DET: (f64, f64) = (-1.25, -0.75);
/// Seed count, horizon, and wall-clock budget for noisy sweeps (criteria 4-6).
const SWEEP_SEEDS: u64 = 20;
const SWEEP_ITERATIONS: u64 = 100_000;
const SWEEP_TIME_LIMIT_S: f64 = 120.0;
/// Fit window and slope band for the noisy decay rate (criterion 6).
const RATE_WINDOW_STOCH: (u64, u64) = (1_000, 100_000);
const SLOPE_BAND_STOCH: (f64, f64) = (-0.65, -0.35);
/// Max deviation between algebraically equivalent recursions (criterion 7).
const EQUIV_TOL: f64 = 1e-12;
const EQUIV_INSTANCES: usize = 10;
const EQUIV_ITERATIONS: u64 = 100;
/// Relative tolerance on the per-step norm growth law (criterion 8).
const NORM_GROWTH_TOL: f64 = 1e-12;
/// "Non-vanishing" floor for the stalled baseline's raw-iterate merit and
/// ceiling for the converging method's (criterion 8).
const STALLED_RAW_GAP_MIN: f64 = 1e-2;
const SOLVED_RAW_GAP_MAX: f64 = 4e-4;
/// Property-suite sample counts and slacks (criterion 9).
const PROP_SAMPLES: usize = 1_000;
const NONEXPANSIVE_SLACK: f64 = 1e-12;
const MONOTONE_TOL: f64 = 1e-10;
const LIPSCHITZ_REL_SLACK: f64 = 1e-9;
const GAP_NONNEG_SLACK: f64 = 1e-10;
const SADDLE_GAP_MAX: f64 = 1e-12;
const CERT_TOL: f64 = 1e-10;
const GRID_POINTS_PER_AXIS: usize = 2_001;
const GRID_AGREE_TOL: f64 = 5e-3;
const GRID_OVERSHOOT_TOL: f64 = 1e-9;

// ---- shared builders ------------------------------------------------------

fn toy_exp(
    method: Method,
    mode: Mode,
    schedule: StepSchedule,
    iterations: u64,
    seeds: Vec<u64>,
) -> Experiment {
    Experiment {
        label: method.name().to_string(),
        problem: toy_problem(0.01),
        gap_box: toy_gap_box(),
        gap_method: GapMethod::ClosedForm,
        z0: toy_z0(),
        solver: SolverKind { method, mode },
        schedule,
        iterations,
        seeds,
        records: RecordSchedule::Geometric,
        raw_iterate_gap: false,
        rate_window: ((iterations / 100).max(1), iterations),
        out: None,
    }
}

fn det_run_config(
    method: Method,
    schedule: StepSchedule,
    iterations: u64,
    records: RecordSchedule,
) -> RunConfig {
    RunConfig {
        kind: SolverKind::deterministic(method),
        schedule,
        iterations,
        seed: 0,
        records,
    }
}

fn max_coord_dev(a: &Point, b: &Point) -> f64 {
    a.coords()
        .iter()
        .zip(b.coords())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn gaussian_point(stream: &mut RngStream, dim: usize, scale: f64) -> Point {
    let mut v = vec![0.0; dim];
    stream.fill_standard_normal(&mut v);
    for x in &mut v {
        *x *= scale;
    }
    Point::new(v)
}

// ---- criterion 1 ----------------------------------------------------------

#[test]
fn crit_01_two_call_constant_step_guarantee() {
    let started = Instant::now();
    let exp = toy_exp(
        Method::Fbf,
        Mode::Deterministic,
        StepSchedule::Constant { alpha: 1.0 },
        10_000,
        vec![0],
    );
    let out = run_experiment(&exp, 0).expect("run succeeds");
    let elapsed = started.elapsed().as_secs_f64();
    let records = &out.runs[0].evaluated;
    assert!(!records.is_empty());
    let mut worst = f64::NEG_INFINITY;
    for rec in records {
        let gap = rec.gap_wbar.finite().expect("finite merit");
        let bound = 4.0 / rec.iterations as f64;
        assert!(
            (rec.bound.unwrap() - bound).abs() <= 1e-15 * bound,
            "harness bound disagrees with 4/K at K = {}",
            rec.iterations
        );
        assert!(
            gap <= bound + GUARANTEE_SLACK,
            "K = {}: merit {gap} exceeds 4/K = {bound}",
            rec.iterations
        );
        worst = worst.max(gap - bound);
    }
    assert_eq!(out.bound_report.as_ref().unwrap().violations, 0);
    assert!(
        elapsed < DET_TIME_LIMIT_S,
        "took {elapsed:.2}s, budget {DET_TIME_LIMIT_S}s"
    );
    println!(
        "ACCEPTANCE 01 PASS - two-call scheme, constant step 1: merit <= 4/K at all {} checkpoints (worst margin {:.3e}, {:.2}s)",
        records.len(),
        worst,
        elapsed
    );
}

// ---- criterion 2 ----------------------------------------------------------

#[test]
fn crit_02_recycling_constant_step_guarantee() {
    let started = Instant::now();
    let exp = toy_exp(
        Method::Fbfp,
        Mode::Deterministic,
        StepSchedule::Constant { alpha: 0.5 },
        10_000,
        vec![0],
    );
    let out = run_experiment(&exp, 0).expect("run succeeds");
    let elapsed = started.elapsed().as_secs_f64();
    let records = &out.runs[0].evaluated;
    let mut worst = f64::NEG_INFINITY;
    for rec in records {
        let gap = rec.gap_wbar.finite().expect("finite merit");
        let bound = 8.0 / rec.iterations as f64;
        assert!(
            (rec.bound.unwrap() - bound).abs() <= 1e-15 * bound,
            "harness bound disagrees with 8/K at K = {}",
            rec.iterations
        );
        assert!(
            gap <= bound + GUARANTEE_SLACK,
            "K = {}: merit {gap} exceeds 8/K = {bound}",
            rec.iterations
        );
        worst = worst.max(gap - bound);
    }
    assert_eq!(out.bound_report.as_ref().unwrap().violations, 0);
    assert!(
        elapsed < DET_TIME_LIMIT_S,
        "took {elapsed:.2}s, budget {DET_TIME_LIMIT_S}s"
    );
    println!(
        "ACCEPTANCE 02 PASS - recycling scheme, constant step 1/2: merit <= 8/K at all {} checkpoints (worst margin {:.3e}, {:.2}s)",
        records.len(),
        worst,
        elapsed
    );
}

// ---- criterion 3 ----------------------------------------------------------

#[test]
fn crit_03_deterministic_rate_is_one_over_k() {
    let mut slopes = Vec::new();
    for method in [Method::Fbf, Method::Fbfp] {
        let mut exp = toy_exp(
            method,
            Mode::Deterministic,
            StepSchedule::Constant { alpha: 0.5 },
            10_000,
            vec![0],
        );
        exp.rate_window = RATE_WINDOW_DET;
        let out = run_experiment(&exp, 0).expect("run succeeds");
        let fit = out.rate_fit.expect("enough positive checkpoints");
        assert!(
            (SLOPE_BAND_DET.0..=SLOPE_BAND_DET.1).contains(&fit.slope),
            "{}: slope {} outside [{}, {}]",
            method.name(),
            fit.slope,
            SLOPE_BAND_DET.0,
            SLOPE_BAND_DET.1
        );
        slopes.push((method.name(), fit.slope, fit.r_squared));
    }
    println!(
        "ACCEPTANCE 03 PASS - log-log slopes over [{}, {}]: {} {:.4} (r^2 {:.4}), {} {:.4} (r^2 {:.4})",
        RATE_WINDOW_DET.0,
        RATE_WINDOW_DET.1,
        slopes[0].0,
        slopes[0].1,
        slopes[0].2,
        slopes[1].0,
        slopes[1].1,
        slopes[1].2
    );
}

// ---- criteria 4-6: noisy sweeps -------------------------------------------

fn sweep_experiment(method: Method, sigma: f64, alpha: f64) -> Experiment {
    toy_exp(
        method,
        Mode::Stochastic {
            sigma,
            refined_regime: false,
        },
        StepSchedule::InverseSqrt { alpha },
        SWEEP_ITERATIONS,
        (0..SWEEP_SEEDS).collect(),
    )
}

#[test]
fn crit_04_noisy_two_call_mean_meets_bound() {
    let started = Instant::now();
    // Step alpha_k = (1/sqrt 2) / sqrt(k+1); the leading constant equals the
    // inclusive noisy-mode cap bit for bit.
    let exp = sweep_experiment(Method::Fbf, 0.1, 1.0 / 2.0_f64.sqrt());
    let out = run_experiment(&exp, 0).expect("sweep succeeds");
    let elapsed = started.elapsed().as_secs_f64();
    let sweep = out.sweep.expect("multi-seed sweep present");
    assert_eq!(sweep.seeds, SWEEP_SEEDS as usize);
    let check = sweep
        .checks
        .iter()
        .find(|c| c.label == "stochastic_c18")
        .expect("standard variance-constant check present");
    assert_eq!(check.variance_constant, Some(18.0));
    let mut worst = f64::NEG_INFINITY;
    for (cp, &bound) in sweep.checkpoints.iter().zip(&check.bounds) {
        let excess = cp.mean_gap - (bound + 2.0 * cp.std_error);
        assert!(
            excess <= 0.0,
            "K = {}: mean {} exceeds bound {} + 2se {}",
            cp.iterations,
            cp.mean_gap,
            bound,
            2.0 * cp.std_error
        );
        worst = worst.max(excess);
    }
    assert_eq!(check.violations, 0);
    assert!(
        elapsed < SWEEP_TIME_LIMIT_S,
        "took {elapsed:.1}s, budget {SWEEP_TIME_LIMIT_S}s"
    );
    println!(
        "ACCEPTANCE 04 PASS - noisy two-call scheme, {} seeds x {} iters: mean merit within C=18 bound + 2se at all {} checkpoints (worst margin {:.3e}, {:.1}s)",
        SWEEP_SEEDS,
        SWEEP_ITERATIONS,
        sweep.checkpoints.len(),
        worst,
        elapsed
    );
}

#[test]
fn crit_05_noisy_recycling_mean_meets_both_bounds() {
    let started = Instant::now();
    let exp = sweep_experiment(Method::Fbfp, 0.1, 1.0 / 3.0);
    let out = run_experiment(&exp, 0).expect("sweep succeeds");
    let elapsed = started.elapsed().as_secs_f64();
    let sweep = out.sweep.expect("multi-seed sweep present");
    let standard = sweep
        .checks
        .iter()
        .find(|c| c.label == "stochastic_c18")
        .expect("standard check present");
    let refined = sweep
        .checks
        .iter()
        .find(|c| c.label == "stochastic_refined_fbfp")
        .expect("refined check present: alpha = 1/3 sits inside the stricter cap");
    assert_eq!(standard.violations, 0, "standard bound violated");
    assert_eq!(refined.violations, 0, "refined bound violated");
    // At alpha L = 1/3 the refined constant collapses to the standard 18.
    let c = refined.variance_constant.unwrap();
    assert!((c - 18.0).abs() <= 1e-12, "refined constant {c}");
    assert!(
        elapsed < SWEEP_TIME_LIMIT_S,
        "took {elapsed:.1}s, budget {SWEEP_TIME_LIMIT_S}s"
    );
    println!(
        "ACCEPTANCE 05 PASS - noisy recycling scheme, {} seeds: mean within the C=18 bound and the refined bound (C = {:.12}) at all {} checkpoints ({:.1}s)",
        SWEEP_SEEDS,
        c,
        sweep.checkpoints.len(),
        elapsed
    );
}

#[test]
fn crit_06_noisy_rate_is_inverse_sqrt_k() {
    let started = Instant::now();
    // Larger noise makes the sqrt regime dominate the fit window.
    let mut exp = sweep_experiment(Method::Fbf, 2.0, 1.0 / 2.0_f64.sqrt());
    exp.rate_window = RATE_WINDOW_STOCH;
    let out = run_experiment(&exp, 0).expect("sweep succeeds");
    let elapsed = started.elapsed().as_secs_f64();
    let fit = out.rate_fit.expect("fit over the seed-mean curve");
    assert!(
        (SLOPE_BAND_STOCH.0..=SLOPE_BAND_STOCH.1).contains(&fit.slope),
        "slope {} outside [{}, {}]",
        fit.slope,
        SLOPE_BAND_STOCH.0,
        SLOPE_BAND_STOCH.1
    );
    assert!(
        elapsed < SWEEP_TIME_LIMIT_S,
        "took {elapsed:.1}s, budget {SWEEP_TIME_LIMIT_S}s"
    );
    println!(
        "ACCEPTANCE 06 PASS - seed-mean log-log slope over [{}, {}]: {:.4} (r^2 {:.4}, {:.1}s)",
        RATE_WINDOW_STOCH.0, RATE_WINDOW_STOCH.1, fit.slope, fit.r_squared, elapsed
    );
}

// ---- criterion 7: recursion equivalences ----------------------------------

fn equivalence_splits() -> Vec<SaddleSplit> {
    [(1, 1), (2, 2), (3, 2), (2, 3), (4, 1)]
        .into_iter()
        .map(|(d, n)| SaddleSplit::new(d, n).unwrap())
        .collect()
}

#[test]
fn crit_07_recursion_equivalences() {
    let splits = equivalence_splits();
    // (a) With no regularizer, the two-call corrected scheme and the
    // two-projection scheme produce identical iterates.
    let mut worst_a: f64 = 0.0;
    for i in 0..EQUIV_INSTANCES {
        let split = splits[i % splits.len()];
        let mut stream = RngStream::seeded(1_000 + i as u64);
        let op = random_instance(split, 1.0, &mut stream);
        let m = op.dim();
        let z0 = gaussian_point(&mut stream, m, 0.5);
        let alpha = 0.9 / op.lipschitz();
        let problem = Problem::bilinear(op, Regularizer::zero(m)).unwrap();
        let schedule = StepSchedule::Constant { alpha };
        let records = RecordSchedule::Every { stride: 1 };
        let fbf = run(
            &problem,
            &z0,
            &det_run_config(Method::Fbf, schedule, EQUIV_ITERATIONS, records.clone()),
        )
        .unwrap();
        let eg = run(
            &problem,
            &z0,
            &det_run_config(Method::Eg, schedule, EQUIV_ITERATIONS, records.clone()),
        )
        .unwrap();
        for (a, b) in fbf.records.iter().zip(&eg.records) {
            worst_a = worst_a.max(max_coord_dev(&a.w, &b.w));
            worst_a = worst_a.max(max_coord_dev(&a.ergodic, &b.ergodic));
        }
    }
    assert!(
        worst_a <= EQUIV_TOL,
        "unregularized two-call vs two-projection: max deviation {worst_a}"
    );

    // (b) The recycling scheme's iterates satisfy the reflected one-call
    // recursion, prox and variable steps included.
    let mut worst_b: f64 = 0.0;
    for i in 0..EQUIV_INSTANCES {
        let split = splits[(i + 1) % splits.len()];
        let mut stream = RngStream::seeded(2_000 + i as u64);
        let (problem, _bx, z0) = random_box_problem(split, &mut stream);
        let alpha = 0.45 / problem.operator().lipschitz();
        let schedule = StepSchedule::InverseSqrt { alpha };
        let trace = run(
            &problem,
            &z0,
            &det_run_config(
                Method::Fbfp,
                schedule,
                EQUIV_ITERATIONS,
                RecordSchedule::Every { stride: 1 },
            ),
        )
        .unwrap();
        let reference = reflected_sequence(&problem, &z0, schedule, EQUIV_ITERATIONS).unwrap();
        assert_eq!(reference.len() as u64, EQUIV_ITERATIONS);
        for (rec, want) in trace.records.iter().zip(&reference) {
            worst_b = worst_b.max(max_coord_dev(&rec.w, want));
        }
    }
    assert!(
        worst_b <= EQUIV_TOL,
        "recycling vs reflected recursion: max deviation {worst_b}"
    );

    // (c) Without a regularizer and at constant step, the recycling scheme
    // follows the optimistic two-term recursion.
    let mut worst_c: f64 = 0.0;
    for i in 0..EQUIV_INSTANCES {
        let split = splits[(i + 2) % splits.len()];
        let mut stream = RngStream::seeded(3_000 + i as u64);
        let op = random_instance(split, 1.0, &mut stream);
        let m = op.dim();
        let z0 = gaussian_point(&mut stream, m, 0.5);
        let alpha = 0.45 / op.lipschitz();
        let reference = ogda_sequence(&op, &z0, alpha, EQUIV_ITERATIONS).unwrap();
        let problem = Problem::bilinear(op, Regularizer::zero(m)).unwrap();
        let trace = run(
            &problem,
            &z0,
            &det_run_config(
                Method::Fbfp,
                StepSchedule::Constant { alpha },
                EQUIV_ITERATIONS,
                RecordSchedule::Every { stride: 1 },
            ),
        )
        .unwrap();
        for (rec, want) in trace.records.iter().zip(&reference) {
            worst_c = worst_c.max(max_coord_dev(&rec.w, want));
        }
    }
    assert!(
        worst_c <= EQUIV_TOL,
        "recycling vs optimistic recursion: max deviation {worst_c}"
    );

    println!(
        "ACCEPTANCE 07 PASS - recursion equivalences over {} instances x {} iterations: max deviations {:.2e} (vs two-projection), {:.2e} (vs reflected), {:.2e} (vs optimistic)",
        EQUIV_INSTANCES, EQUIV_ITERATIONS, worst_a, worst_b, worst_c
    );
}

// ---- criterion 8: descent-ascent pathologies ------------------------------

#[test]
fn crit_08_descent_ascent_spirals_and_stalls() {
    // (a) Simultaneous updates on the plain rotation grow every step by
    // exactly 1 + alpha^2 in squared norm.
    let split = SaddleSplit::new(1, 1).unwrap();
    let op = fbfsplit::operators::BilinearSaddleOperator::new(
        split,
        vec![1.0],
        vec![0.0],
        vec![0.0],
        Some(1.0),
    )
    .unwrap();
    let problem = Problem::bilinear(op, Regularizer::zero(2)).unwrap();
    let z0 = Point::from([1.0, 1.0]);
    let alpha = 0.1;
    let trace = run(
        &problem,
        &z0,
        &det_run_config(
            Method::Pgda { simultaneous: true },
            StepSchedule::Constant { alpha },
            100,
            RecordSchedule::Every { stride: 1 },
        ),
    )
    .unwrap();
    let growth = 1.0 + alpha * alpha;
    let mut prev = z0.norm() * z0.norm();
    let mut worst_rel: f64 = 0.0;
    for rec in &trace.records {
        let cur = rec.w.norm() * rec.w.norm();
        let rel = (cur / prev / growth - 1.0).abs();
        assert!(
            rel <= NORM_GROWTH_TOL,
            "iteration {}: squared-norm ratio off by {rel}",
            rec.iterations
        );
        worst_rel = worst_rel.max(rel);
        prev = cur;
    }

    // (b) On the benchmark, alternating descent-ascent's raw iterate keeps a
    // macroscopic merit after 10^4 iterations while the two-call scheme's
    // raw iterate merit is tiny.
    let exps = toy_experiments(0.01, 10_000);
    let pgda = &exps[4];
    assert_eq!(pgda.label, "pgda");
    let out = run_experiment(pgda, 0).unwrap();
    let stalled = out.runs[0]
        .evaluated
        .last()
        .unwrap()
        .gap_raw
        .unwrap()
        .finite()
        .unwrap();
    assert!(
        stalled >= STALLED_RAW_GAP_MIN,
        "alternating descent-ascent raw merit {stalled} vanished"
    );
    let fbf = &exps[0];
    let out = run_experiment(fbf, 0).unwrap();
    let solved = out.runs[0]
        .evaluated
        .last()
        .unwrap()
        .gap_raw
        .unwrap()
        .finite()
        .unwrap();
    assert!(
        solved <= SOLVED_RAW_GAP_MAX,
        "two-call raw merit {solved} above {SOLVED_RAW_GAP_MAX}"
    );
    println!(
        "ACCEPTANCE 08 PASS - simultaneous updates grow by 1+a^2 per step (worst rel err {:.2e}); alternating raw merit {:.3} stalls vs two-call raw merit {:.1e}",
        worst_rel, stalled, solved
    );
}

// ---- criterion 9: property suites -----------------------------------------

fn property_regularizers() -> Vec<(&'static str, Regularizer)> {
    vec![
        ("zero", Regularizer::zero(3)),
        ("l1", Regularizer::l1(0.01, 3).unwrap()),
        (
            "box",
            Regularizer::box_indicator(CompactBox::symmetric(3, 1.0).unwrap()),
        ),
        (
            "separable",
            Regularizer::separable(
                Regularizer::l1(0.5, 2).unwrap(),
                Regularizer::box_indicator(CompactBox::new(vec![-0.5], vec![2.0]).unwrap()),
            ),
        ),
    ]
}

fn prox_suite() -> (f64, usize) {
    let lambdas = [0.1, 0.5, 1.0, 2.0];
    let mut worst_expansion: f64 = f64::NEG_INFINITY;
    let mut optimality_checks = 0;
    for (name, reg) in property_regularizers() {
        let dim = reg.dim();
        let mut stream = RngStream::seeded(0xD00D + dim as u64);
        for s in 0..PROP_SAMPLES {
            let lambda = lambdas[s % lambdas.len()];
            let u = gaussian_point(&mut stream, dim, 2.0);
            let v = gaussian_point(&mut stream, dim, 2.0);
            let pu = reg.prox(lambda, &u).unwrap();
            let pv = reg.prox(lambda, &v).unwrap();
            let expansion = pu.dist(&pv) - u.dist(&v);
            assert!(
                expansion <= NONEXPANSIVE_SLACK,
                "{name}: prox expanded a pair by {expansion}"
            );
            worst_expansion = worst_expansion.max(expansion);
            // Optimality: the prox output beats random competitors on the
            // prox objective.
            assert!(
                prox_residual_check(&reg, lambda, &u, &pu, 8, &mut stream),
                "{name}: prox output lost an objective competition"
            );
            optimality_checks += 1;
        }
    }
    (worst_expansion, optimality_checks)
}

fn operator_suite() -> (f64, f64) {
    let mut worst_monotone: f64 = 0.0;
    let mut worst_lipschitz: f64 = f64::NEG_INFINITY;
    for (instance, split) in equivalence_splits().into_iter().enumerate() {
        let mut stream = RngStream::seeded(4_000 + instance as u64);
        let op = random_instance(split, 1.0, &mut stream);
        let lip = op.lipschitz();
        let m = op.dim();
        for _ in 0..PROP_SAMPLES / 5 {
            let z = gaussian_point(&mut stream, m, 1.5);
            let zt = gaussian_point(&mut stream, m, 1.5);
            let fz = op.eval(&z);
            let fzt = op.eval(&zt);
            let mut inner = 0.0;
            let mut magnitude = 0.0;
            for i in 0..m {
                let df = fz[i] - fzt[i];
                let dz = z[i] - zt[i];
                inner += df * dz;
                magnitude += (df * dz).abs();
            }
            let tol = MONOTONE_TOL * (1.0 + magnitude);
            // Monotone, and in fact skew: the pairing vanishes identically.
            assert!(inner >= -tol, "monotonicity violated: {inner}");
            assert!(inner.abs() <= tol, "skew pairing nonzero: {inner}");
            worst_monotone = worst_monotone.max(inner.abs());
            let df_norm = fz.sub(&fzt).norm();
            let dz_norm = z.dist(&zt);
            let excess = df_norm - lip * dz_norm * (1.0 + LIPSCHITZ_REL_SLACK);
            assert!(
                excess <= 1e-12,
                "Lipschitz certificate violated by {excess} (L = {lip})"
            );
            worst_lipschitz = worst_lipschitz.max(df_norm / (lip * dz_norm));
        }
    }
    (worst_monotone, worst_lipschitz)
}

fn merit_nonnegativity_suite() -> f64 {
    let mut worst: f64 = f64::INFINITY;
    // Benchmark problem: feasible points fill the whole merit box.
    let problem = toy_problem(0.01);
    let gap_box = toy_gap_box();
    let evaluator = GapEvaluator::new(&problem, gap_box, GapMethod::ClosedForm).unwrap();
    let mut stream = RngStream::seeded(0xFEA51B1E);
    for _ in 0..PROP_SAMPLES {
        let w = Point::from([stream.uniform(-1.0, 1.0), stream.uniform(-1.0, 1.0)]);
        let gap = evaluator.gap(&w).finite().unwrap();
        assert!(gap >= -GAP_NONNEG_SLACK, "merit {gap} negative at {w:?}");
        worst = worst.min(gap);
    }
    // Random saddle instances with an l1 + box structure.
    for (k, split) in [(1usize, 1usize), (2, 2), (3, 1)]
        .into_iter()
        .enumerate()
        .map(|(k, (d, n))| (k, SaddleSplit::new(d, n).unwrap()))
    {
        let mut stream = RngStream::seeded(5_000 + k as u64);
        let (problem, gap_box, _z0) = random_box_problem(split, &mut stream);
        let evaluator = GapEvaluator::new(&problem, gap_box, GapMethod::ClosedForm).unwrap();
        for _ in 0..PROP_SAMPLES / 5 {
            let mut w = Vec::new();
            for _ in 0..split.primal_dim() {
                w.push(stream.uniform(-2.0, 2.0));
            }
            for _ in 0..split.dual_dim() {
                w.push(stream.uniform(-1.0, 1.0));
            }
            let w = Point::new(w);
            let gap = evaluator.gap(&w).finite().unwrap();
            assert!(gap >= -GAP_NONNEG_SLACK, "merit {gap} negative at {w:?}");
            worst = worst.min(gap);
        }
    }
    worst
}

fn averaging_suite() -> usize {
    let problem = toy_problem(0.01);
    let gap_box = toy_gap_box();
    let mut certified = 0;
    for (method, alpha) in [
        (Method::Fbf, 1.0),
        (Method::Fbfp, 0.5),
        (Method::Eg, 0.7),
    ] {
        let trace = run(
            &problem,
            &toy_z0(),
            &det_run_config(
                method,
                StepSchedule::Constant { alpha },
                300,
                RecordSchedule::Every { stride: 1 },
            ),
        )
        .unwrap();
        let steps: Vec<(f64, Point)> = trace
            .records
            .iter()
            .map(|r| (r.alpha, r.w.clone()))
            .collect();
        let cert = averaging_certificate(&problem, &gap_box, &steps, CERT_TOL).unwrap();
        assert!(
            cert.pointwise_dominates,
            "{}: pointwise margin {} below -{CERT_TOL}",
            method.name(),
            cert.min_pointwise_margin
        );
        assert!(
            cert.average_is_certified,
            "{}: lattice max {} below merit of average {}",
            method.name(),
            cert.lattice_average_max,
            cert.gap_at_average
        );
        certified += 1;
    }
    // Variable steps on a random instance, recycling scheme.
    let mut stream = RngStream::seeded(6_000);
    let (problem, gap_box, z0) = random_box_problem(SaddleSplit::new(2, 1).unwrap(), &mut stream);
    let alpha = 0.45 / problem.operator().lipschitz();
    let trace = run(
        &problem,
        &z0,
        &det_run_config(
            Method::Fbfp,
            StepSchedule::InverseSqrt { alpha },
            200,
            RecordSchedule::Every { stride: 1 },
        ),
    )
    .unwrap();
    let steps: Vec<(f64, Point)> = trace
        .records
        .iter()
        .map(|r| (r.alpha, r.w.clone()))
        .collect();
    let cert = averaging_certificate(&problem, &gap_box, &steps, CERT_TOL).unwrap();
    assert!(cert.pointwise_dominates && cert.average_is_certified);
    certified += 1;
    certified
}

fn grid_consistency_suite() -> f64 {
    let problem = toy_problem(0.01);
    let mut worst_diff: f64 = f64::NEG_INFINITY;
    // Two boxes: one whose axis breakpoints sit exactly on the lattice, one
    // shifted so every breakpoint falls between lattice points.
    let boxes = [
        toy_gap_box(),
        CompactBox::new(vec![-1.0005, -1.0005], vec![0.9995, 0.9995]).unwrap(),
    ];
    let mut stream = RngStream::seeded(0x9219D);
    for gap_box in &boxes {
        let mut points = vec![
            Point::from([0.0, 0.0]),
            Point::from([0.5, 0.0]),
            Point::from([-0.7, 0.3]),
            Point::from([0.9, -0.9]),
        ];
        for _ in 0..20 {
            points.push(Point::from([
                stream.uniform(-1.0, 0.99),
                stream.uniform(-1.0, 0.99),
            ]));
        }
        for w in &points {
            let closed = vi_gap(&problem, gap_box, w).unwrap().finite().unwrap();
            let grid = grid_gap(&problem, gap_box, w, GRID_POINTS_PER_AXIS)
                .unwrap()
                .finite()
                .unwrap();
            let diff = closed - grid;
            assert!(
                diff <= GRID_AGREE_TOL,
                "lattice missed {diff} of the merit at {w:?}"
            );
            assert!(
                diff >= -GRID_OVERSHOOT_TOL,
                "lattice exceeded the exact merit by {} at {w:?}",
                -diff
            );
            worst_diff = worst_diff.max(diff.abs());
        }
    }
    worst_diff
}

#[test]
fn crit_09_property_suites() {
    let (worst_expansion, optimality_checks) = prox_suite();
    let (worst_monotone, worst_lip_ratio) = operator_suite();
    let worst_gap = merit_nonnegativity_suite();

    // Merit vanishes at the benchmark's saddle point.
    let problem = toy_problem(0.01);
    let evaluator = GapEvaluator::new(&problem, toy_gap_box(), GapMethod::ClosedForm).unwrap();
    let saddle_gap = evaluator
        .gap(&Point::from([0.0, 0.0]))
        .finite()
        .unwrap();
    assert!(
        (0.0..=SADDLE_GAP_MAX).contains(&saddle_gap),
        "saddle merit {saddle_gap}"
    );

    let certified = averaging_suite();
    let worst_grid = grid_consistency_suite();

    println!(
        "ACCEPTANCE 09 PASS - properties: prox nonexpansive over {} samples/regularizer (worst expansion {:.1e}), {} optimality checks, skew pairing <= {:.1e}, Lipschitz ratio <= {:.6}, merit >= {:.1e} on feasible samples, saddle merit {:.1e}, {} averaging certificates, lattice-vs-exact merit diff <= {:.2e} at {} points/axis",
        PROP_SAMPLES,
        worst_expansion,
        optimality_checks,
        worst_monotone,
        worst_lip_ratio,
        worst_gap,
        saddle_gap,
        certified,
        worst_grid,
        GRID_POINTS_PER_AXIS
    );
}

// ---- criterion 10: oracle accounting --------------------------------------

#[test]
fn crit_10_oracle_call_accounting() {
    let problem = toy_problem(0.01);
    let iterations = 137u64;
    let cases: [(Method, f64, u64); 5] = [
        (Method::Fbf, 1.0, 2 * iterations),
        (Method::Eg, 1.0, 2 * iterations),
        (Method::Fbfp, 0.5, iterations + 1),
        (Method::Egp, 0.5, iterations + 1),
        (
            Method::Pgda {
                simultaneous: false,
            },
            0.01,
            2 * iterations,
        ),
    ];
    for (method, alpha, expected) in cases {
        let trace = run(
            &problem,
            &toy_z0(),
            &det_run_config(
                method,
                StepSchedule::Constant { alpha },
                iterations,
                RecordSchedule::Geometric,
            ),
        )
        .unwrap();
        assert_eq!(
            trace.total_oracle_calls,
            expected,
            "{} spent {} oracle calls, expected {expected}",
            method.name(),
            trace.total_oracle_calls
        );
        assert_eq!(
            trace.records.last().unwrap().oracle_calls,
            expected,
            "final checkpoint accounting for {}",
            method.name()
        );
        assert_eq!(method.oracle_calls(iterations), expected);
    }
    // Noise does not change the call count.
    let cfg = RunConfig {
        kind: SolverKind::stochastic(Method::Fbfp, 0.1),
        schedule: StepSchedule::InverseSqrt { alpha: 1.0 / 3.0 },
        iterations,
        seed: 1,
        records: RecordSchedule::Geometric,
    };
    let trace = run(&problem, &toy_z0(), &cfg).unwrap();
    assert_eq!(trace.total_oracle_calls, iterations + 1);
    println!(
        "ACCEPTANCE 10 PASS - oracle accounting exact at K = {}: two-call methods 2K, recycling methods K+1, noisy runs unchanged",
        iterations
    );
}
