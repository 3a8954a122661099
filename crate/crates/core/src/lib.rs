//! Verification engine for explicit upper bounds on the number-of-divisors
//! function τ(n) in terms of `log n` and ω(n).
//!
//! The crate evaluates the normalized score λ(n), the companion scores
//! r(n) and t(n), the υ-family bounds, and drives the finite computations
//! that certify the extremal integers (60060, 24·n_16, 720·n_7, and the
//! 44-prime record holder) at 50+ significant digits.

pub mod arith;
pub mod bounds;
pub mod error;
pub mod lemmas;
pub mod search;
pub mod solvers;

pub use arith::{Factorization, PrecisionContext, PrimeTable};
pub use error::{Error, Result};
