//! Two finite-stage diagnostics: the additive gap between K̂ and
//! -log2 P̂ (never negative), and the randomness-deficiency slacks of a
//! compressible prefix.
//!
//! Run with: cargo run --example kgap_and_deficiency

use std::sync::Arc;

use ait::entropy::{deficiency_profile, kgap_report};
use ait::enumeration::{DomainSnapshot, EnumerationState};
use ait::machine::Sdvm;
use ait::numerics::{parse_dyadic, Precision};
use ait::BitString;

fn main() {
    let st = EnumerationState::new(Arc::new(Sdvm)).advance_to(12);
    let report = kgap_report(&st, 16, Precision::default()).unwrap();
    println!("s      k̂   -log2 p̂            gap");
    for row in &report.rows {
        println!(
            "{:<6} {:<3} {:<19} {}",
            format!("{:?}", row.s),
            row.k_hat,
            row.neg_log2_p.to_report_string(6),
            row.gap.to_report_string(6),
        );
    }
    println!(
        "gap range: {} .. {}",
        report.min_gap.as_ref().unwrap().to_report_string(6),
        report.max_gap.as_ref().unwrap().to_report_string(6),
    );

    // 0^16 compresses through DUP doubling: EMIT0 DUP DUP DUP DUP HALT.
    let snap = DomainSnapshot::exhaustive(&Sdvm, 12, 1 << 12).unwrap();
    let alpha: BitString = "0000000000000000".parse().unwrap();
    let profile = deficiency_profile(&snap, &alpha, &parse_dyadic("1").unwrap());
    println!("\nDeficiency slacks k̂(α_n) - n for α = 0^16 (exhaustive to length 12):");
    for (i, slack) in profile.slacks.iter().enumerate() {
        let text = slack
            .as_ref()
            .map(|s| s.to_decimal_string())
            .unwrap_or_else(|| "∞".into());
        print!("  n={:<2} {:>4}", i + 1, text);
        if (i + 1) % 4 == 0 {
            println!();
        }
    }
    println!(
        "min slack: {} (bounds the best constant c from below)",
        profile.min_slack.unwrap().to_decimal_string()
    );
}
