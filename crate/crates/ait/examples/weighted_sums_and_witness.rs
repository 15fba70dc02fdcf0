//! The weighted halting sums and the certified divergence witness.
//!
//! On this non-optimal machine Σ |p|·2^{-|p|} converges to exactly 8 —
//! the divergence that holds for optimal computers needs optimality.
//! The power-sum witness certifies divergence lower bounds for q < 1/2.
//!
//! Run with: cargo run --example weighted_sums_and_witness

use std::sync::Arc;

use ait::entropy::{
    divergence_witness, sdvm_length_profile, sdvm_sums, weighted_halting_sum, weighted_k_sum,
    WitnessVerdict,
};
use ait::enumeration::EnumerationState;
use ait::machine::Sdvm;
use ait::numerics::{parse_dyadic, parse_rational, Precision};
use ait::BitString;

fn main() {
    let st = EnumerationState::new(Arc::new(Sdvm)).advance_to(12);
    let all = |_: &BitString| true;
    let id = |n: u64| n;
    println!(
        "Σ |p|·2^(-|p|) over records at stage 12: {}",
        weighted_halting_sum(&st, &id, &all).to_decimal_string()
    );
    println!(
        "Σ k̂(s)·2^(-k̂(s)) at stage 12:           {}",
        weighted_k_sum(&st, &id, &all).to_decimal_string()
    );
    println!("Exact limit of the length sum: {}", sdvm_sums::weighted_length_limit());
    for max_len in [10, 20, 40, 80] {
        println!(
            "  closed-form partial at opcode-length {:>2}: {}",
            max_len,
            sdvm_sums::weighted_length_partial(2 * max_len + 2)
        );
    }

    println!("\nDivergence witnesses (bound B = 10, profile g(n) = 2n + 2):");
    let profile = sdvm_length_profile();
    let b = parse_dyadic("10").unwrap();
    for q_text in ["1/4", "2/5", "9/20", "3/4"] {
        let q = parse_rational(q_text).unwrap();
        match divergence_witness(&profile, &q, &b, Precision::default()).unwrap() {
            WitnessVerdict::ReachesBound { n } => {
                println!("  q = {q_text:>4}: certified >= 10 after lengths 0..={n}")
            }
            WitnessVerdict::Converges => {
                println!("  q = {q_text:>4}: term ratio < 1, the machine bound certifies nothing")
            }
        }
    }
}
