//! The string↔ℕ identification and prefix-free sets with Kraft sums.
//!
//! Run with: cargo run --example prefix_codes

use ait::bitcore::{index_of, is_prefix_free, kraft_sum, string_at, StringSet};
use ait::BitString;

fn main() {
    println!("Enumeration order λ,0,1,00,01,10,11,…");
    for n in 0..9u64 {
        let s = string_at(n);
        println!("  {n} <-> {s:?} (index back: {})", index_of(&s));
    }

    let complete: StringSet = ["0", "10", "11"].iter().map(|t| t.parse().unwrap()).collect();
    let bad: StringSet = ["1", "10"].iter().map(|t| t.parse().unwrap()).collect();
    println!("\n{{0,10,11}} prefix-free: {}", is_prefix_free(&complete));
    println!("{{1,10}}     prefix-free: {}", is_prefix_free(&bad));
    println!("Kraft sum of {{0,10,11}}: {}", kraft_sum(&complete).to_decimal_string());

    let partial: StringSet = ["00", "01"].iter().map(|t| t.parse().unwrap()).collect();
    println!("Kraft sum of {{00,01}}:   {}", kraft_sum(&partial).to_decimal_string());

    let lambda_only: StringSet = [BitString::empty()].into_iter().collect();
    println!("{{λ}} prefix-free: {} (λ prefixes everything else)", is_prefix_free(&lambda_only));
}
