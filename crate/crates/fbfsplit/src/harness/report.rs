//! Output artifacts: CSV traces, versioned JSON summaries, and a gnuplot
//! script for looking at the results.
//!
//! CSV columns are pinned: `iter,alpha_k,w_0..w_{m-1},wbar_0..wbar_{m-1},
//! gap_wbar,bound,oracle_calls`, with `gap_raw` appended last only when
//! raw-iterate merits were requested. Floats print in Rust's shortest
//! round-trip form, absent bounds print as `nan`, and infinite merits print
//! as `inf`/`-inf`, so rerunning an experiment reproduces files byte for
//! byte.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::extreal::ExtReal;
use crate::harness::bounds::BoundReport;
use crate::harness::ratefit::RateFit;
use crate::solvers::{SolverKind, StepSchedule};
use crate::space::Point;

/// Bumped whenever the summary JSON layout changes shape.
pub const SUMMARY_FORMAT_VERSION: u32 = 1;

/// One checkpoint after merit evaluation.
#[derive(Clone, Debug)]
pub struct EvaluatedRecord {
    pub iterations: u64,
    pub alpha: f64,
    pub w: Point,
    pub ergodic: Point,
    pub oracle_calls: u64,
    pub gap_wbar: ExtReal,
    /// Guarantee at this checkpoint, when the method/mode pair has one.
    pub bound: Option<f64>,
    /// Merit of the raw iterate, when requested.
    pub gap_raw: Option<ExtReal>,
}

fn push_float(line: &mut String, value: f64) {
    if value.is_nan() {
        line.push_str("nan");
    } else if value == f64::INFINITY {
        line.push_str("inf");
    } else if value == f64::NEG_INFINITY {
        line.push_str("-inf");
    } else if value == 0.0 || (1e-4..1e15).contains(&value.abs()) {
        // Rust's Display prints the shortest digit string that parses back
        // to the same float; plain notation stays compact in this range.
        let _ = write!(line, "{value}");
    } else {
        // Extreme magnitudes switch to scientific notation (still shortest
        // round-trip digits) instead of hundreds of padding zeros.
        let _ = write!(line, "{value:e}");
    }
}

fn push_ext(line: &mut String, value: ExtReal) {
    push_float(line, value.to_f64());
}

/// Renders the pinned CSV for one run.
pub fn trace_csv(dim: usize, records: &[EvaluatedRecord], with_raw: bool) -> String {
    let mut out = String::new();
    out.push_str("iter,alpha_k");
    for i in 0..dim {
        let _ = write!(out, ",w_{i}");
    }
    for i in 0..dim {
        let _ = write!(out, ",wbar_{i}");
    }
    out.push_str(",gap_wbar,bound,oracle_calls");
    if with_raw {
        out.push_str(",gap_raw");
    }
    out.push('\n');
    for rec in records {
        let _ = write!(out, "{},", rec.iterations);
        push_float(&mut out, rec.alpha);
        for &v in rec.w.coords() {
            out.push(',');
            push_float(&mut out, v);
        }
        for &v in rec.ergodic.coords() {
            out.push(',');
            push_float(&mut out, v);
        }
        out.push(',');
        push_ext(&mut out, rec.gap_wbar);
        out.push(',');
        match rec.bound {
            Some(b) => push_float(&mut out, b),
            None => out.push_str("nan"),
        }
        let _ = write!(out, ",{}", rec.oracle_calls);
        if with_raw {
            out.push(',');
            match rec.gap_raw {
                Some(g) => push_ext(&mut out, g),
                None => out.push_str("nan"),
            }
        }
        out.push('\n');
    }
    out
}

/// 1-based CSV column of `gap_wbar` for a problem of dimension `dim`
/// (useful for gnuplot `using` clauses).
pub fn gap_column(dim: usize) -> usize {
    2 * dim + 3
}

/// Summary of one run (one seed) inside an experiment summary.
#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub seed_entry: u64,
    pub stream_seed: u64,
    pub csv: Option<String>,
    /// Iteration at which the iterates left the finite range, if they did.
    pub diverged_at: Option<u64>,
    pub iterations_done: u64,
    pub oracle_calls: u64,
    /// Final-checkpoint merit of the averaged iterate (+/-inf serialize as
    /// JSON null).
    pub final_gap_wbar: Option<f64>,
    pub final_bound: Option<f64>,
    pub step_cap: Option<f64>,
    pub step_cap_exceeded: bool,
}

/// Per-experiment summary written next to the CSV traces.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentSummary {
    pub format_version: u32,
    pub label: String,
    pub solver: SolverKind,
    pub schedule: StepSchedule,
    pub iterations: u64,
    pub master_seed: u64,
    pub diameter_squared: f64,
    pub lipschitz: f64,
    pub problem: serde_json::Value,
    pub runs: Vec<RunSummary>,
    pub bound_report: Option<BoundReport>,
    pub rate_fit: Option<RateFit>,
    pub rate_fit_error: Option<String>,
    pub sweep: Option<SweepSummary>,
}

/// Seed-averaged view of a multi-seed experiment.
#[derive(Clone, Debug, Serialize)]
pub struct SweepSummary {
    pub seeds: usize,
    pub checkpoints: Vec<SweepCheckpoint>,
    pub checks: Vec<SweepCheck>,
    /// Late-iteration plateau `9 sigma^2 alpha` for constant-step noisy
    /// runs.
    pub residual_asymptote: Option<f64>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepCheckpoint {
    pub iterations: u64,
    pub oracle_calls: u64,
    pub mean_gap: f64,
    pub std_error: f64,
}

/// One guarantee checked against the seed means. A checkpoint violates when
/// the mean exceeds bound + 2 standard errors.
#[derive(Clone, Debug, Serialize)]
pub struct SweepCheck {
    pub label: String,
    pub variance_constant: Option<f64>,
    /// Bound value per checkpoint, parallel to `checkpoints`.
    pub bounds: Vec<f64>,
    pub violations: u64,
    pub max_excess: f64,
}

pub fn write_summary(path: &Path, summary: &ExperimentSummary) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(summary).expect("summary serializes");
    text.push('\n');
    fs::write(path, text)
}

/// Emits a gnuplot script that plots `gap_wbar` (and bound, when present)
/// against iterations on log-log axes for the given CSV files.
pub fn plot_script(title: &str, dim: usize, csvs: &[(String, PathBuf)]) -> String {
    let gap = gap_column(dim);
    let bound = gap + 1;
    let mut out = String::new();
    out.push_str("# gnuplot script; run `gnuplot -p plot.gp` in this directory\n");
    out.push_str("set datafile separator \",\"\n");
    out.push_str("set logscale xy\n");
    out.push_str("set xlabel \"iterations\"\n");
    out.push_str("set ylabel \"restricted merit of averaged iterate\"\n");
    let _ = writeln!(out, "set title \"{title}\"");
    out.push_str("set key bottom left\n");
    out.push_str("plot \\\n");
    let mut parts = Vec::new();
    for (label, path) in csvs {
        let file = path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        parts.push(format!(
            "  \"{file}\" using 1:{gap} skip 1 with linespoints title \"{label}\""
        ));
    }
    if let Some((_, path)) = csvs.first() {
        let file = path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        parts.push(format!(
            "  \"{file}\" using 1:{bound} skip 1 with lines dashtype 2 title \"bound\""
        ));
    }
    out.push_str(&parts.join(", \\\n"));
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(iter: u64, gap: f64, bound: Option<f64>) -> EvaluatedRecord {
        EvaluatedRecord {
            iterations: iter,
            alpha: 0.5,
            w: Point::from([0.125, -1.0]),
            ergodic: Point::from([0.1, 0.2]),
            oracle_calls: 2 * iter,
            gap_wbar: ExtReal::from_f64(gap),
            bound,
            gap_raw: None,
        }
    }

    #[test]
    fn csv_layout_is_pinned() {
        let text = trace_csv(2, &[record(1, 0.25, Some(4.0))], false);
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "iter,alpha_k,w_0,w_1,wbar_0,wbar_1,gap_wbar,bound,oracle_calls"
        );
        assert_eq!(lines.next().unwrap(), "1,0.5,0.125,-1,0.1,0.2,0.25,4,2");
        assert!(lines.next().is_none());
    }

    #[test]
    fn raw_column_appends_after_pinned_columns() {
        let mut rec = record(2, 0.25, None);
        rec.gap_raw = Some(ExtReal::PosInf);
        let text = trace_csv(2, &[rec], true);
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "iter,alpha_k,w_0,w_1,wbar_0,wbar_1,gap_wbar,bound,oracle_calls,gap_raw"
        );
        assert_eq!(lines.next().unwrap(), "2,0.5,0.125,-1,0.1,0.2,0.25,nan,4,inf");
    }

    #[test]
    fn floats_round_trip_through_the_csv() {
        let vals = [
            1.0 / 3.0,
            0.1,
            1e-300,
            123456.789,
            f64::MIN_POSITIVE,
            -2.2250738585072011e-308,
        ];
        for &v in &vals {
            let mut s = String::new();
            push_float(&mut s, v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v:?} printed as {s}");
            assert!(s.len() <= 25, "{s} unexpectedly long");
        }
    }

    #[test]
    fn gap_column_matches_layout() {
        // dim 2: iter(1) alpha(2) w(3,4) wbar(5,6) gap(7) bound(8) calls(9).
        assert_eq!(gap_column(2), 7);
        let header = trace_csv(2, &[], false);
        let cols: Vec<&str> = header.trim_end().split(',').collect();
        assert_eq!(cols[gap_column(2) - 1], "gap_wbar");
    }

    #[test]
    fn plot_script_references_each_csv() {
        let script = plot_script(
            "toy",
            2,
            &[
                ("fbf".into(), PathBuf::from("out/fbf.csv")),
                ("eg".into(), PathBuf::from("out/eg.csv")),
            ],
        );
        assert!(script.contains("\"fbf.csv\" using 1:7"));
        assert!(script.contains("\"eg.csv\" using 1:7"));
        assert!(script.contains("logscale xy"));
        assert!(script.contains("using 1:8"));
    }
}
