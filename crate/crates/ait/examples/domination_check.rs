//! Scan c·r(s) <= m(s) for witnesses: non-falsification for the honest
//! pair (2^{-K̂}, P̂) at c = 1, and a certified violation at c = 2
//! against the exact 2^{-K} limits.
//!
//! Run with: cargo run --example domination_check

use std::sync::Arc;

use ait::enumeration::EnumerationLog;
use ait::numerics::{parse_dyadic, Dyadic};
use ait::semimeasure::{check_domination, LowerSemimeasure};

fn main() {
    let log = Arc::new(EnumerationLog::sdvm_exhaustive(12));
    let k = LowerSemimeasure::from_k_hat(Arc::clone(&log));
    let p = LowerSemimeasure::from_p_hat(Arc::clone(&log));

    // Every witness program contributes its own mass to p̂.
    let fine = check_domination(&k, &p, &Dyadic::one(), 12, 1 << 10);
    println!("1·(2^-K̂) <= P̂:  {}", serde_json::to_string(&fine).unwrap());

    // 2·P(λ) = 2/3 > 2^{-K(λ)} = 1/4: the exact-limit route finds it.
    let violated = check_domination(&p, &k, &parse_dyadic("2").unwrap(), 12, 1 << 10);
    println!("2·P̂ <= 2^-K:    {}", serde_json::to_string(&violated).unwrap());

    // c = 0 is vacuous and flagged as such.
    let vacuous = check_domination(&p, &k, &Dyadic::zero(), 4, 64);
    println!("0·P̂ <= 2^-K:    {}", serde_json::to_string(&vacuous).unwrap());
}
