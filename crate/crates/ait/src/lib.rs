//! Desk-scale algorithmic information theory.
//!
//! This crate ships a concrete self-delimiting reference machine (the
//! [`machine::Sdvm`]), dovetailed enumeration of its halting programs,
//! exact dyadic / outward-rounded interval numerics, and the standard
//! constructions on lower-computable semi-measures: scaling, finite
//! mixtures, the empty-string splice, the Tsallis-kernel transform, and
//! the branch-aware root-finding construction that realizes a prescribed
//! Tsallis entropy. All real-valued outputs are certified enclosures.
//!
//! Every quantity computed here is *machine-relative*: the reference
//! machine is an explicitly non-optimal computer, so statements that
//! require an optimal universal machine (divergence of machine-relative
//! sums, universality of the constructed semi-measures) are out of scope.
//! What is in scope is exact: dyadic masses, enclosures that provably
//! contain their limits wherever a tail certificate exists, and loud
//! errors everywhere a precondition cannot be checked.
//!
//! Start with the `examples/` directory; each example is a runnable tour
//! of one capability. The `ait` binary exposes the same operations as
//! subcommands.

pub mod bitcore;
pub mod cli;
pub mod entropy;
pub mod enumeration;
pub mod machine;
pub mod numerics;
pub mod semimeasure;

pub use bitcore::{BitString, StringSet};
pub use enumeration::{EnumerationLog, EnumerationState, HaltView};
pub use machine::{Computer, Outcome};
pub use numerics::{Dyadic, Interval, Precision};
