//! Why plain descent-ascent is not a baseline to trust on saddle problems:
//! simultaneous updates on the rotation field x y grow the iterate norm by
//! exactly (1 + a^2)^(1/2) per step, and alternating updates on the
//! regularized benchmark orbit a limit cycle instead of converging.
//!
//!     cargo run --example gda_cycling

use fbfsplit::harness::run_experiment;
use fbfsplit::solvers::{run, Method, RecordSchedule, RunConfig, SolverKind, StepSchedule};
use fbfsplit::{toy_experiments, BilinearSaddleOperator, Point, Problem, Regularizer};
use fbfsplit::space::SaddleSplit;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Pure rotation: F(x, y) = (y, -x), no regularizer.
    let split = SaddleSplit::new(1, 1)?;
    let op = BilinearSaddleOperator::new(split, vec![1.0], vec![0.0], vec![0.0], Some(1.0))?;
    let problem = Problem::bilinear(op, Regularizer::zero(2))?;
    let alpha = 0.1;
    let cfg = RunConfig {
        kind: SolverKind::deterministic(Method::Pgda { simultaneous: true }),
        schedule: StepSchedule::Constant { alpha },
        iterations: 60,
        seed: 0,
        records: RecordSchedule::Every { stride: 10 },
    };
    let trace = run(&problem, &Point::from([1.0, 1.0]), &cfg)?;
    println!("simultaneous descent-ascent on F(x,y) = (y, -x), step {alpha}:");
    println!("{:<8} {:>12} {:>16}", "iter", "|z_k|", "(1+a^2)^(k/2)");
    let z0_norm = 2.0_f64.sqrt();
    for rec in &trace.records {
        let predicted = z0_norm * (1.0 + alpha * alpha).powf(rec.iterations as f64 / 2.0);
        println!(
            "{:<8} {:>12.6} {:>16.6}",
            rec.iterations,
            rec.w.norm(),
            predicted
        );
    }

    // Alternating updates on the benchmark: bounded by the box, but orbiting.
    let exps = toy_experiments(0.01, 10_000);
    let pgda = exps.iter().find(|e| e.label == "pgda").unwrap();
    let fbf = exps.iter().find(|e| e.label == "fbf").unwrap();
    let gap_of = |exp| -> Result<f64, Box<dyn std::error::Error>> {
        let out = run_experiment(exp, 0)?;
        Ok(out.runs[0]
            .evaluated
            .last()
            .unwrap()
            .gap_raw
            .unwrap()
            .to_f64())
    };
    println!(
        "\nafter 10^4 iterations on the benchmark (raw iterate, not averaged):\n  \
         alternating descent-ascent merit: {:.4}\n  \
         two-call corrected scheme merit:  {:.4e}",
        gap_of(pgda)?,
        gap_of(fbf)?
    );
    Ok(())
}
