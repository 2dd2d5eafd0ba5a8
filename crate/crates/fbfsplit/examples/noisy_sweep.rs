//! Multi-seed run with a noisy oracle: the seed-averaged merit tracks the
//! stochastic guarantee (D^2 + C sigma^2 sum a_k^2) / (2 sum a_k), and a
//! constant step settles at the residual plateau 9 sigma^2 alpha.
//!
//!     cargo run --example noisy_sweep

use fbfsplit::harness::run_experiment;
use fbfsplit::solvers::{Mode, StepSchedule};
use fbfsplit::toy_experiments;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sigma = 0.1;

    // Decaying steps: the mean merit decays like 1/sqrt(K) under the bound.
    let mut exp = toy_experiments(0.01, 20_000).remove(0);
    exp.solver.mode = Mode::Stochastic {
        sigma,
        refined_regime: false,
    };
    exp.schedule = StepSchedule::InverseSqrt { alpha: 0.5 };
    exp.seeds = (0..8).collect();
    let out = run_experiment(&exp, 0)?;
    let sweep = out.sweep.expect("multi-seed runs produce a sweep");
    println!("decaying steps, {} seeds, sigma = {sigma}:", sweep.seeds);
    println!(
        "{:<10} {:>13} {:>11} {:>13}",
        "iter", "mean gap", "2 se", "bound (C=18)"
    );
    let check = &sweep.checks[0];
    for (cp, bound) in sweep.checkpoints.iter().zip(&check.bounds) {
        println!(
            "{:<10} {:>13.6e} {:>11.2e} {:>13.6e}",
            cp.iterations,
            cp.mean_gap,
            2.0 * cp.std_error,
            bound
        );
    }
    println!(
        "check [{}]: {} violations (mean must stay under bound + 2 se)\n",
        check.label, check.violations
    );

    // Constant step: the mean merit flattens near the residual asymptote.
    let mut exp = toy_experiments(0.01, 20_000).remove(0);
    let alpha = 0.35;
    exp.solver.mode = Mode::Stochastic {
        sigma,
        refined_regime: false,
    };
    exp.schedule = StepSchedule::Constant { alpha };
    exp.seeds = (0..8).collect();
    let out = run_experiment(&exp, 0)?;
    let sweep = out.sweep.expect("sweep");
    let plateau = sweep
        .residual_asymptote
        .expect("constant noisy steps have a residual plateau");
    let last = sweep.checkpoints.last().unwrap();
    println!(
        "constant step {alpha}: final mean gap {:.4e} vs residual plateau 9 sigma^2 alpha = {:.4e}",
        last.mean_gap, plateau
    );
    Ok(())
}
