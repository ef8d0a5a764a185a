//! Monic (probabilists') Hermite polynomials on complex arguments.
//!
//! `He_0 = 1`, `He_1 = x`, `He_{k+1}(x) = x He_k(x) - k He_{k-1}(x)`.
//! The recurrence is backward-stable for the dominant solution, which is
//! the one that matters on the evaluation domain; the explicit
//! coefficient sum cancels catastrophically for large `|x|` and lives
//! only in test oracles.

use num_complex::Complex64;

use super::gamma::ln_factorial;
use super::scaled::ScaledValue;

/// τ below this switches the ensemble sums to their analytic τ→0 limits.
pub const TAU_FLOOR: f64 = 1e-8;

/// He_k(x) by the three-term recurrence, unscaled.
///
/// Overflows honestly for large k and |x|; the scaled sequence below is
/// the production path for ensemble sums.
pub fn hermite_he(k: u32, x: Complex64) -> Complex64 {
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut prev = Complex64::new(1.0, 0.0);
    let mut cur = x;
    for m in 1..k {
        let next = x * cur - (m as f64) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// All of He_0(x) .. He_k_max(x) with shared exponent tracking.
pub fn hermite_scaled_sequence(k_max: u32, x: Complex64) -> Vec<ScaledValue> {
    let mut seq = Vec::with_capacity(k_max as usize + 1);
    seq.push(ScaledValue::ONE);
    if k_max == 0 {
        return seq;
    }
    seq.push(ScaledValue::from_complex(x));
    let sx = ScaledValue::from_complex(x);
    for m in 1..k_max {
        let next = sx
            .mul(&seq[m as usize])
            .sub(&seq[m as usize - 1].scale_f64(m as f64));
        seq.push(next);
    }
    seq
}

/// The K+1 terms t_k = (τ^k / k!) He_k(z/√τ) He_k(z̄/√τ), k = 0..=K.
///
/// Each term is the product of conjugate values and is exactly real and
/// non-negative. Rejects τ ≤ 0: below [`TAU_FLOOR`] callers must take the
/// τ→0 limit, for which the terms collapse to |z|^{2k}/k!
/// ([`pair_sequence_tau_zero`]).
pub fn hermite_pair_sequence(
    k_max: u32,
    z: Complex64,
    tau: f64,
) -> crate::error::Result<Vec<ScaledValue>> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(crate::error::Error::domain(format!(
            "hermite_pair_sequence requires 0 < tau <= 1, got {tau}"
        )));
    }
    let zeta = z / tau.sqrt();
    let ln_tau = tau.ln();
    let seq = hermite_scaled_sequence(k_max, zeta);
    let mut terms = Vec::with_capacity(k_max as usize + 1);
    for (k, h) in seq.iter().enumerate() {
        let weight = (k as f64) * ln_tau - ln_factorial(k as u32);
        terms.push(h.mul_conj(h).scale_log(weight));
    }
    Ok(terms)
}

/// τ→0 limit of [`hermite_pair_sequence`]: t_k = |z|^{2k} / k!.
pub fn pair_sequence_tau_zero(k_max: u32, z: Complex64) -> Vec<ScaledValue> {
    let r2 = z.norm_sqr();
    let mut terms = Vec::with_capacity(k_max as usize + 1);
    if r2 == 0.0 {
        terms.push(ScaledValue::ONE);
        for _ in 1..=k_max {
            terms.push(ScaledValue::ZERO);
        }
        return terms;
    }
    let ln_r2 = r2.ln();
    for k in 0..=k_max {
        terms.push(ScaledValue::from_log(
            (k as f64) * ln_r2 - ln_factorial(k),
        ));
    }
    terms
}
