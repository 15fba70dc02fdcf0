//! Watch the dovetailing schedule discover the domain stage by stage:
//! k̂ falls, p̂ and ω̂ rise, and the discovered programs stay prefix-free.
//!
//! Run with: cargo run --example enumerate_stages

use std::sync::Arc;

use ait::bitcore::{is_prefix_free, StringSet};
use ait::entropy::theta_hat;
use ait::enumeration::EnumerationState;
use ait::machine::Sdvm;
use ait::{BitString, HaltView};

fn main() {
    let lambda = BitString::empty();
    let zero: BitString = "0".parse().unwrap();
    let mut st = EnumerationState::new(Arc::new(Sdvm));
    println!("stage  records  omega_hat      theta_hat      k̂(λ)  p̂(λ)      p̂(0)");
    for _ in 0..12 {
        st = st.advance_stage();
        let programs: StringSet = st.records().iter().map(|r| r.program.clone()).collect();
        assert!(is_prefix_free(&programs));
        println!(
            "{:>5}  {:>7}  {:<13} {:<13} {:>4}  {:<9} {}",
            st.stage(),
            st.records().len(),
            st.omega_hat().to_decimal_string(),
            theta_hat(&st).to_decimal_string(),
            st.k_hat(&lambda).map(|k| k.to_string()).unwrap_or_else(|| "∞".into()),
            st.p_hat(&lambda).to_decimal_string(),
            st.p_hat(&zero).to_decimal_string(),
        );
    }
    println!("\np̂(λ) climbs toward P(λ) = 1/3; ω̂ climbs toward 1 (the machine is total).");
}
