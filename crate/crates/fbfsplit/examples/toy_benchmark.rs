//! Runs every solver on the built-in |x| + x*y benchmark and prints the
//! aligned comparison table: merit by iteration, merit by oracle budget, and
//! the final row per method.
//!
//!     cargo run --example toy_benchmark

use fbfsplit::{compare_methods, toy_experiments};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kappa = 0.01;
    let iterations = 10_000;
    let experiments = toy_experiments(kappa, iterations);
    let comparison = compare_methods(&experiments, 0)?;
    println!(
        "benchmark: min_x max_y {kappa}|x| + x y over y in [-1, 1], {iterations} iterations\n"
    );
    print!("{}", comparison.table());
    println!(
        "\nThe two-call and recycling schemes drive the averaged iterate's merit\n\
         to the certified O(1/K) curve; alternating descent-ascent stalls at a\n\
         macroscopic merit on the same budget."
    );
    Ok(())
}
