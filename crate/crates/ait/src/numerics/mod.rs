//! Exact dyadic rationals, outward-rounded interval arithmetic, certified
//! elementary functions, the Tsallis kernel F, and a bracketing root
//! finder. All real-valued results are enclosures: the true value lies
//! between the returned dyadic endpoints.

pub mod bisect;
pub mod dyadic;
pub mod functions;
pub mod interval;
pub mod kernel;

pub use bisect::{bisect_monotone, Direction};
pub use dyadic::{parse_dyadic, parse_rational, rational_to_dyadic, Dyadic, ParseDyadicError, Round};
pub use functions::{
    exp_interval, ln2_interval, ln_interval, log2_interval, pow2_interval, pow_interval,
    sqrt_dyadic,
};
pub use interval::{sum_intervals, Interval, NumericError, Precision};
pub use kernel::{kernel_max_point, kernel_max_value, tsallis_kernel_f};
