//! Scaled special functions: Hermite polynomials on complex arguments,
//! the regularized incomplete gamma ratio, and (scaled) complementary
//! error functions, all safe against exponent overflow.
//!
//! Everything here is a pure function; call freely from any thread.

mod erf;
mod gamma;
mod hermite;
mod scaled;

pub use erf::{erf, erfc, erfcx};
pub use gamma::{ln_factorial, ln_gamma, regularized_gamma_q, theta_ratio};
pub use hermite::{
    hermite_he, hermite_pair_sequence, hermite_scaled_sequence, pair_sequence_tau_zero,
    TAU_FLOOR,
};
pub use scaled::ScaledValue;

pub(crate) use gamma::regularized_gamma_q_int;
