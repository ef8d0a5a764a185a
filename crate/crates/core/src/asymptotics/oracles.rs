//! Exact double-integral representations of the finite-N building blocks
//! (density, R, P, T), evaluated by nested adaptive quadrature.
//!
//! These are cross-validation oracles: an algebraically independent route
//! to the same quantities the Hermite sums in `finite_n` produce. The Θ
//! ratio appears inside the integrands at finite N (no step-function
//! shortcut), including at negative arguments where it exceeds one.

use crate::error::{Error, Result};
use crate::finite_n::ComplexPoint;
use crate::specfun::regularized_gamma_q_int;

use super::quad;

use std::f64::consts::PI;

/// Which building block the oracle evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    /// Mean eGinUE density of order n.
    DensityEginue,
    /// R_n (with its Gaussian prefactor).
    R,
    /// P_n (bare Hermite sum).
    P,
    /// T_n (bare Hermite sum).
    T,
}

/// Cost guard: the 2-D quadrature is for small-order cross-checks only.
const MAX_ORACLE_ORDER: u32 = 14;

/// Evaluate the integral representation of the requested block at order
/// `n`, point `z` and ellipticity `tau`.
pub fn integral_rep_oracle(
    kind: OracleKind,
    n: u32,
    z: ComplexPoint,
    tau: f64,
) -> Result<f64> {
    if !(0.0 < tau && tau < 1.0) {
        return Err(Error::domain(format!(
            "integral representation requires 0 < tau < 1, got {tau}"
        )));
    }
    if n > MAX_ORACLE_ORDER {
        return Err(Error::domain(format!(
            "integral-representation oracle limited to order <= {MAX_ORACLE_ORDER}, got {n}"
        )));
    }
    match kind {
        OracleKind::P | OracleKind::T => {
            if z.y == 0.0 {
                return Err(Error::domain("P/T representations require Im z != 0"));
            }
        }
        _ => {}
    }
    // The representations degenerate at order zero (the Gaussian scale
    // collapses); order-zero values are the exact empty-sum constants.
    if n == 0 {
        return Ok(match kind {
            OracleKind::DensityEginue => 0.0,
            OracleKind::R => 0.0,
            OracleKind::P => 1.0,
            OracleKind::T => 0.0,
        });
    }

    let nf = n as f64;
    let x = z.x;
    let y = z.y;
    let a_coef = nf * (1.0 - tau) / (2.0 * tau); // p^2
    let c_coef = nf * (1.0 + tau) / (2.0 * tau); // q^2
    let b_coef = (2.0 * nf).sqrt() * y / tau; // linear in p
    let d_coef = (2.0 * nf).sqrt() * x / tau; // oscillation in q

    // Θ index: M = 0 for P, M = 1 otherwise.
    let theta_a = match kind {
        OracleKind::P => n + 1,
        _ => n,
    };
    let quadratic_weight = matches!(kind, OracleKind::R | OracleKind::T);
    let p_factor = matches!(kind, OracleKind::P | OracleKind::T);

    // Truncation: 12 / sqrt(min(N(1-τ)/τ, N(1+τ)/τ)) plus a safety margin,
    // with the p-window recentered on the Gaussian peak.
    let l = 12.0 / (2.0 * a_coef.min(c_coef)).sqrt() + 1.0;
    let p_center = -b_coef / (2.0 * a_coef);

    let inner = |p: f64, abs_tol: f64| -> quad::QuadResult {
        let p2 = p * p;
        quad::integrate(
            |q| {
                let s = nf * (p2 - q * q) / 2.0;
                let mut v = regularized_gamma_q_int(theta_a, s)
                    * (-c_coef * q * q).exp()
                    * (d_coef * q).cos();
                if quadratic_weight {
                    v *= s;
                }
                2.0 * v // even in q: doubled half-range
            },
            0.0,
            l,
            abs_tol,
            1e-9,
            300,
        )
    };

    // Scale hint from the Gaussian peak keeps the inner absolute tolerance
    // meaningful where the q-integral nearly cancels.
    let hint = inner(p_center, 1e-290).value.abs().max(1e-120);
    let inner_abs = hint * 1e-13;

    let mut inner_failed = false;
    let outer = quad::integrate(
        |p| {
            let iq = inner(p, inner_abs);
            if !iq.converged {
                inner_failed = true;
            }
            let gauss = (-a_coef * p * p - b_coef * p).exp();
            let pf = if p_factor { p } else { 1.0 };
            pf * gauss * iq.value
        },
        p_center - l,
        p_center + l,
        1e-300,
        1e-7,
        400,
    );
    if !outer.converged || inner_failed {
        return Err(Error::numerical(
            "integral-representation quadrature did not converge",
        ));
    }

    let quad_exponent = (z.as_complex().norm_sqr() - tau * (z.as_complex() * z.as_complex()).re)
        / (1.0 - tau * tau);
    let value = match kind {
        OracleKind::DensityEginue => {
            let pref = nf / (2.0 * PI * PI * tau) / (1.0 - tau * tau).sqrt()
                * (-quad_exponent + (x * x - y * y) / tau).exp();
            pref * outer.value
        }
        OracleKind::R => {
            // Prefactor N, not N²: checked against the Hermite-sum route
            // and its termwise oracle, which agree with each other; the
            // N² variant is off by exactly one factor of the order.
            let pref = nf / (2.0 * PI * PI * tau) / (1.0 - tau * tau).sqrt()
                * (-quad_exponent + (x * x - y * y) / tau).exp();
            pref * outer.value
        }
        OracleKind::P | OracleKind::T => {
            let pref = -nf * (2.0 * nf).sqrt() / (4.0 * PI * tau * y)
                * ((x * x - y * y) / tau).exp();
            pref * outer.value
        }
    };
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_n::{self, EnsembleKind, EnsembleSpec};

    fn rel_close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn density_representation_matches_hermite_sum() {
        let z = ComplexPoint::new(0.5, 0.5);
        let spec = EnsembleSpec::new(EnsembleKind::ComplexElliptic, 5, 0.3).unwrap();
        let direct = finite_n::density_eginue(&spec, z).unwrap();
        let oracle = integral_rep_oracle(OracleKind::DensityEginue, 5, z, 0.3).unwrap();
        assert!(rel_close(direct, oracle, 1e-4), "direct={direct} oracle={oracle}");
    }

    #[test]
    fn p_representation_matches_double_sum() {
        let z = ComplexPoint::new(1.0, 0.8);
        let direct = finite_n::p_n(6, z, 0.5).unwrap();
        let oracle = integral_rep_oracle(OracleKind::P, 6, z, 0.5).unwrap();
        assert!(rel_close(direct, oracle, 1e-4), "direct={direct} oracle={oracle}");
    }

    #[test]
    fn t_representation_matches_double_sum() {
        let z = ComplexPoint::new(0.7, 0.6);
        let direct = finite_n::t_n(5, z, 0.4).unwrap();
        let oracle = integral_rep_oracle(OracleKind::T, 5, z, 0.4).unwrap();
        assert!(rel_close(direct, oracle, 1e-4), "direct={direct} oracle={oracle}");
    }

    #[test]
    fn r_representation_matches_weighted_sum() {
        let z = ComplexPoint::new(0.8, 0.4);
        let direct = finite_n::r_n(4, z, 0.45).unwrap();
        let oracle = integral_rep_oracle(OracleKind::R, 4, z, 0.45).unwrap();
        assert!(rel_close(direct, oracle, 1e-4), "direct={direct} oracle={oracle}");
    }

    #[test]
    fn order_zero_constants() {
        let z = ComplexPoint::new(0.4, 0.9);
        assert_eq!(integral_rep_oracle(OracleKind::R, 0, z, 0.5).unwrap(), 0.0);
        assert_eq!(integral_rep_oracle(OracleKind::P, 0, z, 0.5).unwrap(), 1.0);
        assert_eq!(integral_rep_oracle(OracleKind::T, 0, z, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn rejects_out_of_range_inputs() {
        let z = ComplexPoint::new(0.4, 0.9);
        assert!(integral_rep_oracle(OracleKind::P, 3, z, 1.2).is_err());
        assert!(integral_rep_oracle(OracleKind::P, 40, z, 0.5).is_err());
        assert!(
            integral_rep_oracle(OracleKind::P, 3, ComplexPoint::new(0.4, 0.0), 0.5).is_err()
        );
    }
}
