//! The empty-string splice: place 2^{-c}·θ̂ at λ and keep the rest of
//! P̂, auditing the stage mass and the certified limit of P(λ).
//!
//! Run with: cargo run --example construct_splice

use std::sync::Arc;

use ait::enumeration::EnumerationLog;
use ait::semimeasure::LowerSemimeasure;
use ait::BitString;

fn main() {
    let log = Arc::new(EnumerationLog::sdvm_exhaustive(12));
    let r = LowerSemimeasure::from_p_hat(Arc::clone(&log));
    let theta: Vec<_> = (0..=log.max_stage()).map(|n| log.theta(n)).collect();
    println!(
        "θ̂ stream: {:?}",
        theta.iter().map(|t| t.to_decimal_string()).collect::<Vec<_>>()
    );

    let lambda = BitString::empty();
    for c in [2u32, 4, 10] {
        let m = r.ceps_transform(c, theta.clone()).unwrap();
        let n = m.max_stage();
        println!(
            "c = {c:>2}: m(λ) = {:<12} stage mass = {}",
            m.approx(n, &lambda).to_decimal_string(),
            m.stage_mass(n).to_decimal_string()
        );
    }

    // c = 0 would claim θ <= P(λ) = 1/3, which the certificate refutes.
    match r.ceps_transform(0, theta) {
        Err(e) => println!("c = 0 rejected as expected: {e}"),
        Ok(_) => unreachable!("the λ certificate must refuse c = 0"),
    }
}
