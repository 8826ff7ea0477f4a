//! Exact rational arithmetic, the canonical number representation of the
//! planner. Floating point appears only inside the opt-in float solver mode.

use num_bigint::BigInt;
use num_rational::BigRational;

/// Arbitrary-precision rational. All planning quantities (storage,
/// transmission sizes, cut capacities, LP coefficients) are `Rat`s.
pub type Rat = BigRational;

/// Shorthand for building a rational from small integers.
///
/// Panics when `denom` is zero, like the underlying constructor.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}
