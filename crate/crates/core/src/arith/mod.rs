//! Exact integer and prime infrastructure, the multiplicative functions
//! τ, ω, Ω, γ, β on exponent vectors, and the high-precision context.

mod factorization;
mod precision;
mod primes;

pub use factorization::{
    factorize_small, log_plus, Factorization, FactorizationJson, DEFAULT_MATERIALIZE_BOUND,
};
pub use precision::{
    format_truncated, PrecisionContext, RoundingPolicy, DEFAULT_DIGITS, DIGITS_ENV, MIN_DIGITS,
};
pub use primes::{first_k_primes, first_primes, nth_prime_upper_bound, PrimeTable, SegmentedSieve};
