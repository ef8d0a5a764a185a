//! Large-N regime formulas: strong non-Hermiticity (bulk and depletion)
//! and weak non-Hermiticity (both ensembles), plus normalized conditional
//! densities and the exact integral-representation oracles used to
//! cross-validate the finite-N evaluators.
//!
//! Scaling conventions:
//! - SNH bulk: z = √N w, overlap scaled by 1/N, density unscaled;
//! - SNH depletion: z = √N δ + iξ, same scalings;
//! - WNH: z = √N X + iπy/√N with τ = 1 - (πα)²/(2N), both overlap and
//!   density scaled by π²/N.

pub mod oracles;
pub mod quad;

pub use oracles::{integral_rep_oracle, OracleKind};

use crate::error::{Error, Result};
use crate::finite_n::EnsembleKind;
use crate::specfun::erfcx;

use std::f64::consts::PI;

/// Asymptotic regime selector with its scaled coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeQuery {
    /// Bulk at strong non-Hermiticity: coordinates w = (w_x, w_y).
    SnhBulk { tau: f64, w_x: f64, w_y: f64 },
    /// Depletion strip of the real ensemble: coordinates (δ, ξ).
    SnhDepletion { tau: f64, delta: f64, xi: f64 },
    /// Weak non-Hermiticity bulk: coordinates (X, y) and width α.
    WnhBulk { alpha: f64, big_x: f64, y: f64 },
}

fn require_snh_tau(tau: f64) -> Result<()> {
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::domain(format!(
            "strong non-Hermiticity requires 0 <= tau < 1, got {tau}"
        )));
    }
    Ok(())
}

fn require_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) {
        return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
    }
    Ok(())
}

fn ellipse_form(tau: f64, w_x: f64, w_y: f64) -> f64 {
    let sx = w_x / (1.0 + tau);
    let sy = w_y / (1.0 - tau);
    sx * sx + sy * sy
}

/// Scaled mean self-overlap in the SNH bulk (both ensembles):
/// (1/π)(1 - e(w)) inside the ellipse, 0 outside.
pub fn snh_bulk_overlap(tau: f64, w_x: f64, w_y: f64) -> Result<f64> {
    require_snh_tau(tau)?;
    let e = ellipse_form(tau, w_x, w_y);
    Ok(if e < 1.0 { (1.0 - e) / PI } else { 0.0 })
}

/// Limiting bulk density 1/(π(1-τ²)) inside the ellipse, 0 outside.
pub fn snh_bulk_density(tau: f64, w_x: f64, w_y: f64) -> Result<f64> {
    require_snh_tau(tau)?;
    Ok(if ellipse_form(tau, w_x, w_y) < 1.0 {
        1.0 / (PI * (1.0 - tau * tau))
    } else {
        0.0
    })
}

/// Bulk conditional mean scaled by 1/N: overlap/density = (1-τ²)(1-e(w)).
pub fn snh_bulk_conditional(tau: f64, w_x: f64, w_y: f64) -> Result<f64> {
    require_snh_tau(tau)?;
    let e = ellipse_form(tau, w_x, w_y);
    Ok(if e < 1.0 { (1.0 - tau * tau) * (1.0 - e) } else { 0.0 })
}

fn depletion_bracket(tau: f64, xi: f64) -> f64 {
    let u = (2.0 / (1.0 - tau * tau)).sqrt() * xi.abs();
    1.0 + (PI * (1.0 - tau * tau) / 2.0).sqrt() * erfcx(u) / (2.0 * xi.abs())
}

/// Scaled mean self-overlap in the eGinOE depletion strip.
pub fn snh_depletion_overlap(tau: f64, delta: f64, xi: f64) -> Result<f64> {
    require_snh_tau(tau)?;
    if xi == 0.0 {
        return Err(Error::domain("depletion overlap requires xi != 0"));
    }
    let support = 1.0 - (delta / (1.0 + tau)).powi(2);
    if support <= 0.0 {
        return Ok(0.0);
    }
    Ok(depletion_bracket(tau, xi) * support / PI)
}

/// Limiting complex-eigenvalue density in the eGinOE depletion strip,
/// symmetrized to an even function of ξ.
pub fn snh_depletion_density(tau: f64, delta: f64, xi: f64) -> Result<f64> {
    require_snh_tau(tau)?;
    let support = 1.0 - (delta / (1.0 + tau)).powi(2);
    if support <= 0.0 {
        return Ok(0.0);
    }
    let one_m = 1.0 - tau * tau;
    let u = (2.0 / one_m).sqrt() * xi.abs();
    Ok((2.0 / PI).sqrt() * xi.abs() * erfcx(u) / one_m.powf(1.5))
}

/// Depletion conditional mean scaled by 1/N: ratio of the two above.
pub fn snh_depletion_conditional(tau: f64, delta: f64, xi: f64) -> Result<f64> {
    let o = snh_depletion_overlap(tau, delta, xi)?;
    let d = snh_depletion_density(tau, delta, xi)?;
    if d == 0.0 {
        return Err(Error::domain(
            "depletion conditional undefined outside the droplet",
        ));
    }
    Ok(o / d)
}

/// e^{-α²u²/2 - 2y²/α²} (cosh(2yu), sinh(2yu)) with the exponents
/// completed to squares, so neither factor overflows at large |y|.
fn wnh_kernel(alpha: f64, y: f64, u: f64) -> (f64, f64) {
    let a = alpha * u / std::f64::consts::SQRT_2;
    let b = std::f64::consts::SQRT_2 * y / alpha;
    let two_yu = 2.0 * y * u;
    if two_yu.abs() < 1.0 {
        // Direct product avoids the cancellation of the square-completed
        // difference at small arguments.
        let g = (-(a * a + b * b)).exp();
        (g * two_yu.cosh(), g * two_yu.sinh())
    } else {
        let gm = (-(a - b) * (a - b)).exp();
        let gp = (-(a + b) * (a + b)).exp();
        (0.5 * (gm + gp), 0.5 * (gm - gp))
    }
}

const WNH_ABS_TOL: f64 = 1e-10;
const WNH_REL_TOL: f64 = 1e-8;
const WNH_MAX_PANELS: usize = 512;

fn wnh_upper_limit(big_x: f64) -> Option<f64> {
    let nu2 = 1.0 - big_x * big_x / 4.0;
    if nu2 <= 0.0 {
        None
    } else {
        Some(PI * nu2.sqrt())
    }
}

fn wnh_quad<F: FnMut(f64) -> f64>(f: F, upper: f64) -> Result<f64> {
    let r = quad::integrate(f, 0.0, upper, WNH_ABS_TOL, WNH_REL_TOL, WNH_MAX_PANELS);
    if !r.converged {
        return Err(Error::numerical("weak-bulk quadrature did not converge"));
    }
    Ok(r.value)
}

/// Scaled mean self-overlap in the weak bulk of the eGinUE; 0 for |X| >= 2.
pub fn wnh_bulk_overlap_eginue(alpha: f64, big_x: f64, y: f64) -> Result<f64> {
    require_alpha(alpha)?;
    let Some(upper) = wnh_upper_limit(big_x) else {
        return Ok(0.0);
    };
    let nu2 = 1.0 - big_x * big_x / 4.0;
    let integral = wnh_quad(
        |u| {
            let (cosh_part, _) = wnh_kernel(alpha, y, u);
            cosh_part * (1.0 + alpha * alpha * PI * PI * (nu2 - u * u / (PI * PI)))
        },
        upper,
    )?;
    Ok(2.0f64.sqrt() / PI.powf(1.5) / alpha * integral)
}

/// Scaled mean self-overlap in the weak bulk of the eGinOE; needs y != 0.
pub fn wnh_bulk_overlap_eginoe(alpha: f64, big_x: f64, y: f64) -> Result<f64> {
    require_alpha(alpha)?;
    if y == 0.0 {
        return Err(Error::domain("weak-bulk eGinOE overlap requires y != 0"));
    }
    let Some(upper) = wnh_upper_limit(big_x) else {
        return Ok(0.0);
    };
    let nu2 = 1.0 - big_x * big_x / 4.0;
    let integral = wnh_quad(
        |u| {
            let (_, sinh_part) = wnh_kernel(alpha, y, u);
            u * sinh_part * (1.0 + alpha * alpha * PI * PI * (nu2 - u * u / (PI * PI)))
        },
        upper,
    )?;
    let bracket = 1.0
        + (PI / 2.0).sqrt() * alpha / (2.0 * y.abs()) * erfcx(2.0f64.sqrt() * y.abs() / alpha);
    Ok(alpha / y / (2.0f64.sqrt() * PI.powf(1.5)) * bracket * integral)
}

/// Scaled density of complex eigenvalues in the weak bulk.
pub fn wnh_density(kind: EnsembleKind, alpha: f64, big_x: f64, y: f64) -> Result<f64> {
    require_alpha(alpha)?;
    match kind {
        EnsembleKind::ComplexElliptic => {
            let Some(upper) = wnh_upper_limit(big_x) else {
                return Ok(0.0);
            };
            let integral = wnh_quad(|u| wnh_kernel(alpha, y, u).0, upper)?;
            Ok(2.0f64.sqrt() / PI.powf(1.5) / alpha * integral)
        }
        EnsembleKind::RealElliptic => {
            if y == 0.0 {
                return Err(Error::domain("weak-bulk eGinOE density requires y != 0"));
            }
            let Some(upper) = wnh_upper_limit(big_x) else {
                return Ok(0.0);
            };
            // |y| symmetrization keeps the density even and non-negative.
            let ya = y.abs();
            let integral = wnh_quad(|u| u * wnh_kernel(alpha, ya, u).1, upper)?;
            Ok(erfcx(2.0f64.sqrt() * ya / alpha) / PI * integral)
        }
    }
}

/// Weak-bulk conditional mean overlap: overlap/density at the same point.
pub fn wnh_conditional(kind: EnsembleKind, alpha: f64, big_x: f64, y: f64) -> Result<f64> {
    let o = match kind {
        EnsembleKind::ComplexElliptic => wnh_bulk_overlap_eginue(alpha, big_x, y)?,
        EnsembleKind::RealElliptic => wnh_bulk_overlap_eginoe(alpha, big_x, y)?,
    };
    let d = wnh_density(kind, alpha, big_x, y)?;
    if d <= 0.0 {
        return Err(Error::domain("weak-bulk conditional undefined outside |X| < 2"));
    }
    Ok(o / d)
}

/// Which coordinate is held fixed in the normalized conditional density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedCoord {
    /// Fix X, normalize over y ∈ (-∞, ∞).
    FixX,
    /// Fix y, normalize over X ∈ [-2, 2].
    FixY,
}

/// Normalized conditional density of complex eigenvalues at weak
/// non-Hermiticity: the density profile along one coordinate divided by
/// its integral.
pub fn wnh_conditional_density(
    kind: EnsembleKind,
    alpha: f64,
    fixed: FixedCoord,
    fixed_value: f64,
    query: f64,
) -> Result<f64> {
    require_alpha(alpha)?;
    let density_at = |big_x: f64, y: f64| -> f64 {
        if kind == EnsembleKind::RealElliptic && y == 0.0 {
            return 0.0; // continuous limit of the sinh factor
        }
        wnh_density(kind, alpha, big_x, y).unwrap_or(0.0)
    };
    let (norm, value) = match fixed {
        FixedCoord::FixY => {
            let y = fixed_value;
            let r = quad::integrate(
                |x| density_at(x, y),
                -2.0,
                2.0,
                1e-12,
                1e-8,
                WNH_MAX_PANELS,
            );
            if !r.converged {
                return Err(Error::numerical("conditional-density normalization failed"));
            }
            (r.value, density_at(query, y))
        }
        FixedCoord::FixX => {
            let big_x = fixed_value;
            // Truncate the y-integral where the profile falls below 1e-16
            // of its peak.
            let mut peak = 0.0f64;
            for i in 0..=40 {
                let y = i as f64 * 0.1 * alpha;
                peak = peak.max(density_at(big_x, y));
            }
            if peak <= 0.0 {
                return Err(Error::domain(
                    "conditional density degenerate: zero profile",
                ));
            }
            let mut limit = 4.0 * alpha;
            for _ in 0..60 {
                if density_at(big_x, limit) < 1e-16 * peak {
                    break;
                }
                limit *= 2.0;
            }
            let r = quad::integrate(
                |y| density_at(big_x, y),
                -limit,
                limit,
                1e-12 * peak,
                1e-8,
                WNH_MAX_PANELS,
            );
            if !r.converged {
                return Err(Error::numerical("conditional-density normalization failed"));
            }
            (r.value, density_at(big_x, query))
        }
    };
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::domain(
            "conditional density degenerate: vanishing normalization",
        ));
    }
    Ok(value / norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn snh_bulk_center_values() {
        for tau in [0.0, 0.25, 0.75] {
            let o = snh_bulk_overlap(tau, 0.0, 0.0).unwrap();
            assert!((o - 1.0 / PI).abs() < 1e-15, "tau={tau}");
        }
        let d = snh_bulk_density(0.25, 0.0, 0.0).unwrap();
        assert!((d - 1.0 / (PI * 0.9375)).abs() < 1e-15);
    }

    #[test]
    fn snh_bulk_edge_and_outside() {
        let tau = 0.4;
        assert_eq!(snh_bulk_overlap(tau, 1.0 + tau, 0.0).unwrap(), 0.0);
        assert_eq!(snh_bulk_density(tau, 2.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn snh_bulk_tau_zero_is_circular_law() {
        for r in [0.0, 0.3, 0.8] {
            let o = snh_bulk_overlap(0.0, r, 0.0).unwrap();
            assert!(rel_close(o, (1.0 - r * r) / PI, 1e-14));
        }
    }

    #[test]
    fn depletion_relaxes_to_bulk_far_from_axis() {
        let tau = 0.25;
        let delta = 0.3;
        let bulk = snh_bulk_overlap(tau, delta, 0.0).unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..20 {
            let xi = 2.0 + i as f64 * 1.5;
            let v = snh_depletion_overlap(tau, delta, xi).unwrap();
            assert!(v <= prev + 1e-15, "not monotone at xi={xi}");
            prev = v;
        }
        let far = snh_depletion_overlap(tau, delta, 40.0).unwrap();
        // The bulk value carries the w_y term; at w_y = 0 they coincide.
        assert!(rel_close(far, bulk, 1e-3), "far={far} bulk={bulk}");
    }

    #[test]
    fn depletion_outside_support_is_zero() {
        assert_eq!(snh_depletion_overlap(0.3, 1.31, 0.5).unwrap(), 0.0);
        assert_eq!(snh_depletion_density(0.3, 1.31, 0.5).unwrap(), 0.0);
        assert!(snh_depletion_overlap(0.3, 0.0, 0.0).is_err());
    }

    #[test]
    fn wnh_eginue_center_matches_simpson_oracle() {
        // (α=1, X=0, y=0): (√2/π^{3/2}) ∫_0^π e^{-u²/2}(1+π²-u²) du.
        let n = 400_000usize;
        let h = PI / n as f64;
        let f = |u: f64| (-u * u / 2.0).exp() * (1.0 + PI * PI - u * u);
        let mut s = f(0.0) + f(PI);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        let oracle = 2.0f64.sqrt() / PI.powf(1.5) * s * h / 3.0;
        let got = wnh_bulk_overlap_eginue(1.0, 0.0, 0.0).unwrap();
        assert!(rel_close(got, oracle, 1e-10), "got={got} oracle={oracle}");
    }

    #[test]
    fn wnh_even_in_y() {
        for y in [0.3, 1.0, 2.7] {
            let a = wnh_bulk_overlap_eginue(1.5, 0.4, y).unwrap();
            let b = wnh_bulk_overlap_eginue(1.5, 0.4, -y).unwrap();
            assert!(rel_close(a, b, 1e-12));
            let a = wnh_bulk_overlap_eginoe(2.0, 0.4, y).unwrap();
            let b = wnh_bulk_overlap_eginoe(2.0, 0.4, -y).unwrap();
            assert!(rel_close(a, b, 1e-12));
            assert!(a > 0.0);
            let a = wnh_density(EnsembleKind::RealElliptic, 2.0, 0.0, y).unwrap();
            let b = wnh_density(EnsembleKind::RealElliptic, 2.0, 0.0, -y).unwrap();
            assert!(rel_close(a, b, 1e-12));
            assert!(a >= 0.0);
        }
    }

    #[test]
    fn wnh_outside_band_is_zero() {
        assert_eq!(wnh_bulk_overlap_eginue(1.0, 2.0, 0.5).unwrap(), 0.0);
        assert_eq!(wnh_bulk_overlap_eginoe(1.0, -2.3, 0.5).unwrap(), 0.0);
        assert_eq!(
            wnh_density(EnsembleKind::ComplexElliptic, 1.0, 2.4, 0.5).unwrap(),
            0.0
        );
    }

    #[test]
    fn wnh_density_center_matches_simpson_oracle() {
        // eGinUE, y=0, X=0, α=1 -> (√2/π^{3/2}) ∫_0^π e^{-u²/2} du.
        let n = 200_000usize;
        let h = PI / n as f64;
        let f = |u: f64| (-u * u / 2.0).exp();
        let mut s = f(0.0) + f(PI);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        let oracle = 2.0f64.sqrt() / PI.powf(1.5) * s * h / 3.0;
        let got = wnh_density(EnsembleKind::ComplexElliptic, 1.0, 0.0, 0.0).unwrap();
        assert!(rel_close(got, oracle, 1e-10));
    }

    #[test]
    fn wnh_kernel_large_y_no_overflow() {
        // cosh(2yu) alone is ~e^{48} here; the completed square keeps the
        // product representable.
        let (c, s) = wnh_kernel(1.0, 12.0, 2.0);
        assert!(c.is_finite() && s.is_finite());
        assert!(c > 0.0 && s > 0.0);
        // The e^{-(a-b)^2} branch dominates by e^{4ab} >> 1.
        let a = 2.0 / std::f64::consts::SQRT_2;
        let b = std::f64::consts::SQRT_2 * 12.0;
        let expect = 0.5 * (-(a - b) * (a - b)).exp();
        assert!(rel_close(c, expect, 1e-10));
        assert!(rel_close(s, expect, 1e-10));
        // Far past the double range the kernel underflows to an honest zero.
        let (c, _) = wnh_kernel(1.0, 40.0, 2.0);
        assert_eq!(c, 0.0);
    }

    #[test]
    fn conditional_density_normalizes() {
        for (kind, alpha, fixed, fv) in [
            (EnsembleKind::ComplexElliptic, 2.0, FixedCoord::FixX, 0.0),
            (EnsembleKind::RealElliptic, 2.0, FixedCoord::FixX, 0.0),
            (EnsembleKind::ComplexElliptic, 1.0, FixedCoord::FixY, 1.0),
            (EnsembleKind::RealElliptic, 1.0, FixedCoord::FixY, 1.0),
        ] {
            let integrand = |q: f64| {
                wnh_conditional_density(kind, alpha, fixed, fv, q).unwrap()
            };
            let (lo, hi) = match fixed {
                FixedCoord::FixY => (-2.0, 2.0),
                FixedCoord::FixX => (-12.0 * alpha, 12.0 * alpha),
            };
            let r = quad::integrate(integrand, lo, hi, 1e-10, 1e-7, 512);
            assert!(
                (r.value - 1.0).abs() < 1e-6,
                "kind={kind:?} fixed={fixed:?} norm={}",
                r.value
            );
        }
    }

    #[test]
    fn conditional_density_symmetric_in_y() {
        let v1 = wnh_conditional_density(
            EnsembleKind::RealElliptic,
            2.0,
            FixedCoord::FixX,
            0.0,
            0.8,
        )
        .unwrap();
        let v2 = wnh_conditional_density(
            EnsembleKind::RealElliptic,
            2.0,
            FixedCoord::FixX,
            0.0,
            -0.8,
        )
        .unwrap();
        assert!(rel_close(v1, v2, 1e-10));
    }
}
