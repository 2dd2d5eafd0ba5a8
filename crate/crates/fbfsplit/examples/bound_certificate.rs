//! One deterministic run with its per-checkpoint guarantee: the averaged
//! iterate's merit never exceeds D^2 / (2 sum a_k), where D is the diameter
//! of the merit box.
//!
//!     cargo run --example bound_certificate

use fbfsplit::harness::run_experiment;
use fbfsplit::solvers::{Method, Mode, StepSchedule};
use fbfsplit::toy_experiments;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Start from the stock benchmark setup, then pin the run down explicitly.
    let mut exp = toy_experiments(0.01, 10_000).remove(0);
    exp.solver.method = Method::Fbf;
    exp.solver.mode = Mode::Deterministic;
    exp.schedule = StepSchedule::Constant { alpha: 1.0 };

    let out = run_experiment(&exp, 0)?;
    println!("{:<10} {:>14} {:>14} {:>10}", "iter", "gap_wbar", "bound", "margin");
    for rec in &out.runs[0].evaluated {
        let gap = rec.gap_wbar.to_f64();
        let bound = rec.bound.expect("deterministic runs carry a bound");
        println!(
            "{:<10} {:>14.6e} {:>14.6e} {:>10.2e}",
            rec.iterations,
            gap,
            bound,
            bound - gap
        );
    }
    let report = out.bound_report.expect("bound report present");
    println!(
        "\nregime: {} | checkpoints: {} | violations: {}",
        report.regime,
        report.points.len(),
        report.violations
    );
    Ok(())
}
