//! Oracle-budget economics of gradient recycling: the recycling variants
//! spend K+1 evaluations where the two-call schemes spend 2K, so at a fixed
//! evaluation budget they complete nearly twice the iterations.
//!
//! The table aligns methods at shared oracle budgets. Whether the extra
//! iterations buy a lower merit depends on the problem and step size; this
//! example reports what happens, it does not assert a winner.
//!
//!     cargo run --example recycling_comparison

use fbfsplit::{compare_methods, toy_experiments};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let all = toy_experiments(0.01, 4_000);
    // Keep the corrected two-call scheme, its recycling variant, and the
    // recycling projection scheme (indices: fbf, fbfp, egp).
    let picked: Vec<_> = all
        .into_iter()
        .filter(|e| matches!(e.label.as_str(), "fbf" | "fbfp" | "egp"))
        .collect();
    let comparison = compare_methods(&picked, 0)?;

    println!("{:<12} {:>10} {:>8} {:>14}", "budget", "method", "iters", "gap_wbar");
    for row in comparison.rows.iter().filter(|r| r.view == "by_oracle") {
        println!(
            "{:<12} {:>10} {:>8} {:>14.6e}",
            row.key, row.label, row.iterations, row.gap_wbar
        );
    }
    println!();
    for f in &comparison.finals {
        println!(
            "final: {:<6} {} iterations, {} oracle calls, gap_wbar {:.6e}",
            f.label, f.iterations, f.oracle_calls, f.gap_wbar
        );
    }
    Ok(())
}
