//! Log-log rate fits: deterministic runs decay like 1/K (slope near -1),
//! noisy runs with decaying steps like 1/sqrt(K) (slope near -1/2).
//!
//!     cargo run --example rate_fit

use fbfsplit::harness::run_experiment;
use fbfsplit::solvers::{Mode, StepSchedule};
use fbfsplit::toy_experiments;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Deterministic: step 1/2 keeps every checkpoint's merit positive so the
    // whole window is usable (step 1 solves this benchmark exactly).
    let mut exp = toy_experiments(0.01, 10_000).remove(0);
    exp.schedule = StepSchedule::Constant { alpha: 0.5 };
    exp.rate_window = (100, 10_000);
    let out = run_experiment(&exp, 0)?;
    let fit = out.rate_fit.expect("positive merits in the window");
    println!(
        "deterministic, step 1/2: slope {:.4} (r^2 {:.4}, {} checkpoints in [{}, {}])",
        fit.slope, fit.r_squared, fit.points_used, fit.window.0, fit.window.1
    );

    // Noisy: fit the seed-averaged curve late in the run, where the noise
    // floor dominates the deterministic transient.
    let mut exp = toy_experiments(0.01, 100_000).remove(0);
    exp.solver.mode = Mode::Stochastic {
        sigma: 2.0,
        refined_regime: false,
    };
    exp.schedule = StepSchedule::InverseSqrt {
        alpha: 1.0 / 2.0_f64.sqrt(),
    };
    exp.seeds = (0..10).collect();
    exp.rate_window = (1_000, 100_000);
    let out = run_experiment(&exp, 0)?;
    let fit = out.rate_fit.expect("fit over seed means");
    println!(
        "noisy (sigma 2), decaying steps: slope {:.4} (r^2 {:.4}, {} checkpoints in [{}, {}])",
        fit.slope, fit.r_squared, fit.points_used, fit.window.0, fit.window.1
    );
    Ok(())
}
