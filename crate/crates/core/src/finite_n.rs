//! Exact finite-N evaluators for the elliptic Ginibre ensembles: mean
//! complex-eigenvalue densities, the Hermite-sum building blocks P, T, R,
//! mean self-overlaps, and the conditional mean overlap/density ratio.
//!
//! Every evaluator accumulates its Hermite sums in scaled space and folds
//! the analytic prefactor exponents in at the end, so matrix sizes in the
//! hundreds are fine even though individual factors overflow doubles.
//!
//! Conventions baked in here (and surfaced in CLI metadata):
//! - densities are returned exactly as the closed forms are written, which
//!   for the complex ensemble integrates to N over the plane, not 1; the
//!   conditional mean is a ratio and does not depend on that choice;
//! - the real-ensemble density carries |y|, making it an even function of
//!   the imaginary part;
//! - building blocks at negative order are zero (empty sums), which makes
//!   the overlap formulas total down to N = 2.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::{
    erfcx, hermite_pair_sequence, hermite_scaled_sequence, ln_factorial,
    pair_sequence_tau_zero, ScaledValue, TAU_FLOOR,
};

/// Densities below this (after exponent folding) flag the conditional as
/// meaningless: both numerator and denominator are deep in the tail.
pub const DENSITY_FLOOR: f64 = 1e-300;

/// Which elliptic ensemble a computation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleKind {
    /// eGinUE: complex entries, spectrum has no real-axis component.
    ComplexElliptic,
    /// eGinOE: real entries, complex eigenvalues in conjugate pairs.
    RealElliptic,
}

impl EnsembleKind {
    pub fn label(&self) -> &'static str {
        match self {
            EnsembleKind::ComplexElliptic => "eginue",
            EnsembleKind::RealElliptic => "eginoe",
        }
    }
}

/// Ensemble, matrix size and ellipticity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n: u32,
    pub tau: f64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, n: u32, tau: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("matrix size must be >= 2, got {n}")));
        }
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::domain(format!("tau must lie in [0, 1], got {tau}")));
        }
        Ok(EnsembleSpec { kind, n, tau })
    }
}

/// A query point z = x + iy in the spectral plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPoint {
    pub x: f64,
    pub y: f64,
}

impl ComplexPoint {
    pub fn new(x: f64, y: f64) -> Self {
        ComplexPoint { x, y }
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }
}

/// Conditional mean self-overlap, or the underflow flag when the density
/// is below [`DENSITY_FLOOR`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Conditional {
    Value(f64),
    DensityUnderflow,
}

impl Conditional {
    pub fn value(&self) -> Option<f64> {
        match self {
            Conditional::Value(v) => Some(*v),
            Conditional::DensityUnderflow => None,
        }
    }
}

/// Density, overlap and conditional at one point.
#[derive(Debug, Clone, Copy)]
pub struct FiniteNResult {
    pub density: f64,
    pub overlap: f64,
    pub conditional: Conditional,
}

fn require_tau_below_one(tau: f64) -> Result<()> {
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::domain(format!(
            "complex-eigenvalue formulas require 0 <= tau < 1, got {tau}"
        )));
    }
    Ok(())
}

fn require_offaxis(z: ComplexPoint) -> Result<()> {
    if z.y == 0.0 {
        return Err(Error::domain(
            "real-ensemble complex-eigenvalue formulas require Im z != 0",
        ));
    }
    Ok(())
}

/// Terms t_k = (τ^k/k!) He_k(z/√τ) He_k(z̄/√τ), with the τ→0 limit below
/// the floor.
fn pair_terms(k_max: u32, z: Complex64, tau: f64) -> Result<Vec<ScaledValue>> {
    if tau < TAU_FLOOR {
        Ok(pair_sequence_tau_zero(k_max, z))
    } else {
        hermite_pair_sequence(k_max, z, tau)
    }
}

/// ln of the eGinUE Gaussian prefactor 1/(π √(1-τ²)) e^{-(|z|²-τ Re z²)/(1-τ²)}.
fn ln_prefactor_eginue(z: Complex64, tau: f64) -> f64 {
    let quad = (z.norm_sqr() - tau * (z * z).re) / (1.0 - tau * tau);
    -quad - std::f64::consts::PI.ln() - 0.5 * (1.0 - tau * tau).ln()
}

fn sum_prefix(terms: &[ScaledValue], count: usize) -> ScaledValue {
    let mut acc = ScaledValue::ZERO;
    for t in terms.iter().take(count) {
        acc = acc.add(t);
    }
    acc
}

/// Mean density of complex eigenvalues in the eGinUE, scaled form.
pub fn density_eginue_scaled(spec: &EnsembleSpec, z: ComplexPoint) -> Result<ScaledValue> {
    require_kind(spec, EnsembleKind::ComplexElliptic)?;
    require_tau_below_one(spec.tau)?;
    let zc = z.as_complex();
    let terms = pair_terms(spec.n - 1, zc, spec.tau)?;
    Ok(sum_prefix(&terms, spec.n as usize).scale_log(ln_prefactor_eginue(zc, spec.tau)))
}

/// Mean density of complex eigenvalues in the eGinUE.
pub fn density_eginue(spec: &EnsembleSpec, z: ComplexPoint) -> Result<f64> {
    Ok(density_eginue_scaled(spec, z)?.value())
}

fn require_kind(spec: &EnsembleSpec, kind: EnsembleKind) -> Result<()> {
    if spec.kind != kind {
        return Err(Error::domain(format!(
            "evaluator expects the {} ensemble",
            kind.label()
        )));
    }
    Ok(())
}

/// Cumulative inner sums c_k = Σ_{m<=k} He_m(z/√τ) He_m(z̄/√τ)/m! feeding
/// the double-sum forms P_n = Σ τ^k c_k and T_n = Σ k τ^k c_k.
///
/// The double sums are termwise non-negative, unlike the printed
/// antisymmetric-difference forms, which cancel catastrophically near the
/// real axis and are kept only as a cross-check path.
struct PtSums {
    /// p_weighted[k] = τ^k c_k as scaled values.
    weighted: Vec<ScaledValue>,
}

impl PtSums {
    fn build(max_order: i64, z: Complex64, tau: f64) -> Result<Self> {
        if max_order < 0 {
            return Ok(PtSums { weighted: vec![] });
        }
        let k_max = max_order as u32;
        let weighted = if tau < TAU_FLOOR {
            // τ^k c_k -> |z|^{2k}/k! termwise.
            pair_sequence_tau_zero(k_max, z)
        } else {
            let zeta = z / tau.sqrt();
            let h = hermite_scaled_sequence(k_max, zeta);
            let ln_tau = tau.ln();
            let mut cum = ScaledValue::ZERO;
            let mut weighted = Vec::with_capacity(k_max as usize + 1);
            for (m, hm) in h.iter().enumerate() {
                cum = cum.add(&hm.mul_conj(hm).scale_log(-ln_factorial(m as u32)));
                weighted.push(cum.scale_log(m as f64 * ln_tau));
            }
            weighted
        };
        Ok(PtSums { weighted })
    }

    fn p(&self, order: i64) -> ScaledValue {
        if order < 0 {
            return ScaledValue::ZERO;
        }
        sum_prefix(&self.weighted, order as usize + 1)
    }

    fn t(&self, order: i64) -> ScaledValue {
        let mut acc = ScaledValue::ZERO;
        if order < 0 {
            return acc;
        }
        for (k, w) in self.weighted.iter().take(order as usize + 1).enumerate() {
            acc = acc.add(&w.scale_f64(k as f64));
        }
        acc
    }

    /// Σ_{k<=order} (weight0 - k) τ^k c_k, the regrouped form of
    /// weight0·P_order - T_order; termwise non-negative when weight0 > order.
    fn weighted_tail(&self, order: i64, weight0: f64) -> ScaledValue {
        let mut acc = ScaledValue::ZERO;
        if order < 0 {
            return acc;
        }
        for (k, w) in self.weighted.iter().take(order as usize + 1).enumerate() {
            acc = acc.add(&w.scale_f64(weight0 - k as f64));
        }
        acc
    }
}

fn validate_pt_args(tau: f64) -> Result<()> {
    if !(0.0 < tau && tau < 1.0) {
        return Err(Error::domain(format!(
            "P/T/R building blocks require 0 < tau < 1, got {tau}"
        )));
    }
    Ok(())
}

/// P_order via the double sum; zero for negative order.
pub fn p_n_scaled(order: i64, z: ComplexPoint, tau: f64) -> Result<ScaledValue> {
    validate_pt_args(tau)?;
    Ok(PtSums::build(order, z.as_complex(), tau)?.p(order))
}

pub fn p_n(order: i64, z: ComplexPoint, tau: f64) -> Result<f64> {
    Ok(p_n_scaled(order, z, tau)?.value())
}

/// T_order via the double sum; zero for order <= 0.
pub fn t_n_scaled(order: i64, z: ComplexPoint, tau: f64) -> Result<ScaledValue> {
    validate_pt_args(tau)?;
    Ok(PtSums::build(order, z.as_complex(), tau)?.t(order))
}

pub fn t_n(order: i64, z: ComplexPoint, tau: f64) -> Result<f64> {
    Ok(t_n_scaled(order, z, tau)?.value())
}

/// Shared kernel for the antisymmetric-difference cross-check forms of
/// P and T: term_k = weight(k) (τ^{k+1/2}/k!) Im[He_{k+1}(ζ) conj He_k(ζ)]/y.
fn difference_form(
    order: i64,
    z: ComplexPoint,
    tau: f64,
    weight: impl Fn(u32) -> f64,
) -> Result<ScaledValue> {
    validate_pt_args(tau)?;
    require_offaxis(z)?;
    if order < 0 {
        return Ok(ScaledValue::ZERO);
    }
    let zc = z.as_complex();
    if tau < TAU_FLOOR {
        // Limit of each difference term is |z|^{2k}/k!, as for the double sum.
        let t0 = pair_sequence_tau_zero(order as u32, zc);
        let mut acc = ScaledValue::ZERO;
        for (k, t) in t0.iter().enumerate() {
            acc = acc.add(&t.scale_f64(weight(k as u32)));
        }
        return Ok(acc);
    }
    let zeta = zc / tau.sqrt();
    let h = hermite_scaled_sequence(order as u32 + 1, zeta);
    let ln_tau = tau.ln();
    let mut acc = ScaledValue::ZERO;
    for k in 0..=order as usize {
        let prod = h[k + 1].mul_conj(&h[k]);
        let imag = ScaledValue::new(
            Complex64::new(prod.mantissa().im / z.y, 0.0),
            prod.log_scale(),
        );
        let term =
            imag.scale_log((k as f64 + 0.5) * ln_tau - ln_factorial(k as u32));
        acc = acc.add(&term.scale_f64(weight(k as u32)));
    }
    Ok(acc)
}

/// P_order via the printed difference form (cross-check path, needs y != 0).
pub fn p_n_difference_scaled(order: i64, z: ComplexPoint, tau: f64) -> Result<ScaledValue> {
    difference_form(order, z, tau, |_| 1.0)
}

pub fn p_n_difference(order: i64, z: ComplexPoint, tau: f64) -> Result<f64> {
    Ok(p_n_difference_scaled(order, z, tau)?.value())
}

/// T_order via the printed difference form (cross-check path, needs y != 0).
pub fn t_n_difference_scaled(order: i64, z: ComplexPoint, tau: f64) -> Result<ScaledValue> {
    difference_form(order, z, tau, |k| k as f64)
}

pub fn t_n_difference(order: i64, z: ComplexPoint, tau: f64) -> Result<f64> {
    Ok(t_n_difference_scaled(order, z, tau)?.value())
}

/// R_order including its Gaussian prefactor; zero for order <= 0.
pub fn r_n_scaled(order: i64, z: ComplexPoint, tau: f64) -> Result<ScaledValue> {
    validate_pt_args(tau)?;
    if order < 0 {
        return Ok(ScaledValue::ZERO);
    }
    let zc = z.as_complex();
    let terms = pair_terms(order as u32, zc, tau)?;
    let mut acc = ScaledValue::ZERO;
    for (k, t) in terms.iter().enumerate() {
        acc = acc.add(&t.scale_f64(k as f64));
    }
    Ok(acc.scale_log(ln_prefactor_eginue(zc, tau)))
}

pub fn r_n(order: i64, z: ComplexPoint, tau: f64) -> Result<f64> {
    Ok(r_n_scaled(order, z, tau)?.value())
}

/// Mean density of complex eigenvalues in the eGinOE, scaled form.
///
/// Evaluated as |y| erfcx(√(2/(1-τ²)) |y|) e^{-x²/(1+τ) - y²/(1-τ)} √(2/π)/(1+τ) P_{N-2}:
/// erfc and the growing exponential are combined into erfcx so neither
/// factor over- or underflows on its own.
pub fn density_eginoe_complex_scaled(
    spec: &EnsembleSpec,
    z: ComplexPoint,
) -> Result<ScaledValue> {
    require_kind(spec, EnsembleKind::RealElliptic)?;
    require_tau_below_one(spec.tau)?;
    require_offaxis(z)?;
    let tau = spec.tau;
    let p = if tau < TAU_FLOOR {
        PtSums::build(spec.n as i64 - 2, z.as_complex(), tau)?.p(spec.n as i64 - 2)
    } else {
        p_n_scaled(spec.n as i64 - 2, z, tau)?
    };
    let u = (2.0 / (1.0 - tau * tau)).sqrt() * z.y.abs();
    let front = (2.0 / std::f64::consts::PI).sqrt() / (1.0 + tau) * z.y.abs() * erfcx(u);
    let ln_gauss = -z.x * z.x / (1.0 + tau) - z.y * z.y / (1.0 - tau);
    Ok(p.scale_log(ln_gauss).scale_f64(front))
}

/// Mean density of complex eigenvalues in the eGinOE.
pub fn density_eginoe_complex(spec: &EnsembleSpec, z: ComplexPoint) -> Result<f64> {
    Ok(density_eginoe_complex_scaled(spec, z)?.value())
}

/// Mean self-overlap density for the eGinUE, scaled form:
/// ρ_N + (1-τ²)[ρ_{N-1} + (N-2)ρ_{N-2} - R_{N-3}], with ρ_m = 0 for m <= 0
/// and R_m = 0 for m < 0.
///
/// The (N-2)ρ_{N-2} - R_{N-3} difference is regrouped termwise as
/// Σ (N-2-k) t_k, which is non-negative, so the whole sum is a positive
/// accumulation and the overlap >= density identity holds to rounding.
pub fn overlap_eginue_scaled(spec: &EnsembleSpec, z: ComplexPoint) -> Result<ScaledValue> {
    require_kind(spec, EnsembleKind::ComplexElliptic)?;
    require_tau_below_one(spec.tau)?;
    let n = spec.n as i64;
    let tau = spec.tau;
    let zc = z.as_complex();
    let terms = pair_terms(spec.n - 1, zc, tau)?;
    let s_n = sum_prefix(&terms, n as usize);
    let s_n1 = sum_prefix(&terms, n as usize - 1);
    // (N-2)ρ_{N-2} - R_{N-3} regrouped termwise as Σ_{k<=N-3} (N-2-k) t_k.
    let mut extra = ScaledValue::ZERO;
    for k in 0..n.saturating_sub(2) {
        extra = extra.add(&terms[k as usize].scale_f64((n - 2 - k) as f64));
    }
    let inner = s_n.add(&s_n1.add(&extra).scale_f64(1.0 - tau * tau));
    Ok(inner.scale_log(ln_prefactor_eginue(zc, tau)))
}

pub fn overlap_eginue(spec: &EnsembleSpec, z: ComplexPoint) -> Result<f64> {
    Ok(overlap_eginue_scaled(spec, z)?.value())
}

/// Mean self-overlap density for the eGinOE, scaled form:
/// prefactor × [1 + √(π(1-τ²)/2) erfcx(√(2/(1-τ²))|y|)/(2|y|)]
///           × [P_{N-2} + (1-τ²)(P_{N-3} + (N-3)P_{N-4} - T_{N-4})].
pub fn overlap_eginoe_scaled(spec: &EnsembleSpec, z: ComplexPoint) -> Result<ScaledValue> {
    require_kind(spec, EnsembleKind::RealElliptic)?;
    require_tau_below_one(spec.tau)?;
    require_offaxis(z)?;
    let n = spec.n as i64;
    let tau = spec.tau;
    let sums = PtSums::build(n - 2, z.as_complex(), tau)?;
    // (N-3)P_{N-4} - T_{N-4} regrouped as Σ (N-3-k) τ^k c_k, termwise >= 0.
    let tail = sums.weighted_tail(n - 4, (n - 3) as f64);
    let combo = sums
        .p(n - 2)
        .add(&sums.p(n - 3).add(&tail).scale_f64(1.0 - tau * tau));
    let u = (2.0 / (1.0 - tau * tau)).sqrt() * z.y.abs();
    let bracket = 1.0
        + (std::f64::consts::PI * (1.0 - tau * tau) / 2.0).sqrt() * erfcx(u)
            / (2.0 * z.y.abs());
    let ln_pref = -(std::f64::consts::PI).ln() + 0.5 * ((1.0 - tau) / (1.0 + tau)).ln()
        - z.x * z.x / (1.0 + tau)
        - z.y * z.y / (1.0 - tau);
    Ok(combo.scale_log(ln_pref).scale_f64(bracket))
}

pub fn overlap_eginoe(spec: &EnsembleSpec, z: ComplexPoint) -> Result<f64> {
    Ok(overlap_eginoe_scaled(spec, z)?.value())
}

/// Density dispatcher, scaled form.
pub fn density_scaled(spec: &EnsembleSpec, z: ComplexPoint) -> Result<ScaledValue> {
    match spec.kind {
        EnsembleKind::ComplexElliptic => density_eginue_scaled(spec, z),
        EnsembleKind::RealElliptic => density_eginoe_complex_scaled(spec, z),
    }
}

/// Mean density of complex eigenvalues at z for either ensemble.
pub fn density(spec: &EnsembleSpec, z: ComplexPoint) -> Result<f64> {
    Ok(density_scaled(spec, z)?.value())
}

/// Overlap dispatcher, scaled form.
pub fn overlap_scaled(spec: &EnsembleSpec, z: ComplexPoint) -> Result<ScaledValue> {
    match spec.kind {
        EnsembleKind::ComplexElliptic => overlap_eginue_scaled(spec, z),
        EnsembleKind::RealElliptic => overlap_eginoe_scaled(spec, z),
    }
}

/// Mean self-overlap density at z for either ensemble.
pub fn overlap(spec: &EnsembleSpec, z: ComplexPoint) -> Result<f64> {
    Ok(overlap_scaled(spec, z)?.value())
}

/// Conditional mean self-overlap overlap(z)/density(z); flags underflow
/// instead of dividing tail noise.
pub fn conditional_mean(spec: &EnsembleSpec, z: ComplexPoint) -> Result<Conditional> {
    let d = density_scaled(spec, z)?;
    let o = overlap_scaled(spec, z)?;
    Ok(conditional_from_scaled(&o, &d))
}

fn conditional_from_scaled(overlap: &ScaledValue, density: &ScaledValue) -> Conditional {
    if density.value() < DENSITY_FLOOR {
        Conditional::DensityUnderflow
    } else {
        Conditional::Value(overlap.ratio(density))
    }
}

/// Density, overlap and conditional at z in one call.
pub fn evaluate(spec: &EnsembleSpec, z: ComplexPoint) -> Result<FiniteNResult> {
    let d = density_scaled(spec, z)?;
    let o = overlap_scaled(spec, z)?;
    Ok(FiniteNResult {
        density: d.value(),
        overlap: o.value(),
        conditional: conditional_from_scaled(&o, &d),
    })
}
