//! Exact-arithmetic toolkit for log K-stability of polarised pairs
//! `((X, L); D)` described by intersection numbers.
//!
//! * [`exactnum`]: rationals, polynomials, interpolation, power sums.
//! * [`pairmodel`]: pairs, divisors and average scalar curvatures.
//! * [`thresholds`]: cone-angle windows and sufficient stability criteria.
//! * [`normalcone`]: the deformation to the normal cone and its DF invariant.
//! * [`weightoracle`]: brute-force weight sums that cross-check the above.

pub mod error;
pub mod exactnum;
pub mod normalcone;
pub mod pairfile;
pub mod pairmodel;
pub mod report;
pub mod thresholds;
pub mod weightoracle;

pub use error::{Error, Result};
pub use exactnum::{parse_rational, Polynomial, Rational};
pub use pairmodel::{DivisorSpec, PolarisedPair};
