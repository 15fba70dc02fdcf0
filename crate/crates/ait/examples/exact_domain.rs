//! Exhaustive enumeration as an exact oracle: domain counts, the closed
//! form for the halting mass, and the exact machine probability P(s).
//!
//! Run with: cargo run --example exact_domain

use ait::enumeration::{exact_domain_upto, mass_of, sdvm_sufficient_budget};
use ait::machine::{sdvm_exact, Sdvm};
use ait::BitString;

fn main() {
    println!("Domain elements by length (3^j of opcode-length j):");
    for k in 0..=7usize {
        let max_len = 2 * k + 2;
        let records = exact_domain_upto(&Sdvm, max_len, sdvm_sufficient_budget(max_len)).unwrap();
        let mass = mass_of(&records);
        println!(
            "  length <= {max_len:2}: {:>5} programs, mass {} (= 1 - (3/4)^{})",
            records.len(),
            mass.to_decimal_string(),
            k + 1
        );
    }

    println!("\nExact machine probabilities (closed-form recursion):");
    for text in ["", "0", "1", "00", "01", "0000"] {
        let s: BitString = text.parse().unwrap();
        let label = if text.is_empty() { "λ" } else { text };
        println!("  P({label}) = {}", sdvm_exact::probability(&s));
    }
    println!("\nP(λ) = 1/3 is the mass of the DUP-chain programs (DUP)^a·HALT.");
}
