//! Shannon, power-sum and Tsallis partial sums of the machine's P̂, with
//! tail certificates where the machine's closed forms provide one.
//!
//! Run with: cargo run --example entropy_partial_sums

use std::sync::Arc;

use ait::entropy::{power_sum_partial, shannon_partial, tsallis_partial, LogBase};
use ait::enumeration::EnumerationLog;
use ait::numerics::{parse_dyadic, Interval, Precision};
use ait::semimeasure::LowerSemimeasure;

fn main() {
    let prec = Precision::default();
    let log = Arc::new(EnumerationLog::sdvm_exhaustive(16));
    let stage = log.max_stage();
    let r = LowerSemimeasure::from_p_hat(Arc::clone(&log));
    let bound = 1 << 20;

    let shannon = shannon_partial(&r, stage, bound, LogBase::Natural, prec).unwrap();
    println!(
        "Shannon partial (natural log, {} terms): {}",
        shannon.terms.len(),
        shannon.cumulative.to_report_string(12)
    );
    if let Some(tail) = &shannon.tail_bound {
        println!("  certified tail to the limit: <= {}", tail.to_decimal_string());
        println!("  (loose by design: on an optimal machine this sum would diverge)");
    }

    let q2 = Interval::point(parse_dyadic("2").unwrap());
    let power = power_sum_partial(&r, stage, bound, &q2, prec).unwrap();
    println!(
        "\nPower sum q=2: {} + tail <= {}",
        power.cumulative.to_report_string(12),
        power.tail_bound.as_ref().map(|t| t.to_decimal_string()).unwrap_or_default()
    );

    let tsallis = tsallis_partial(&r, stage, bound, &q2, prec).unwrap();
    println!(
        "Tsallis S_2:   {} + tail <= {}",
        tsallis.cumulative.to_report_string(12),
        tsallis.tail_bound.as_ref().map(|t| t.to_decimal_string()).unwrap_or_default()
    );
    println!("  (two evaluation formulas cross-checked; the report is their intersection)");
}
