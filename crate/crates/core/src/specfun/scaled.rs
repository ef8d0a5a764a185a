//! Overflow-safe scaled arithmetic.
//!
//! Ensemble sums mix terms whose magnitudes span thousands of decades
//! (Hermite products grow like e^{|z|^2} while the Gaussian prefactors
//! shrink at the same rate), so intermediate values are carried as a
//! mantissa together with a natural-log exponent and only combined into
//! a plain double at the very end.

use num_complex::Complex64;

/// Mantissa magnitudes are renormalized into `[BAND_LO, BAND_HI]`.
const BAND_LO: f64 = 1e-8;
const BAND_HI: f64 = 1e8;

/// A complex value stored as `mantissa * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue {
    mantissa: Complex64,
    log_scale: f64,
}

impl ScaledValue {
    pub const ZERO: ScaledValue = ScaledValue {
        mantissa: Complex64::new(0.0, 0.0),
        log_scale: 0.0,
    };

    pub const ONE: ScaledValue = ScaledValue {
        mantissa: Complex64::new(1.0, 0.0),
        log_scale: 0.0,
    };

    pub fn new(mantissa: Complex64, log_scale: f64) -> Self {
        ScaledValue { mantissa, log_scale }.normalized()
    }

    pub fn from_f64(v: f64) -> Self {
        Self::new(Complex64::new(v, 0.0), 0.0)
    }

    pub fn from_complex(v: Complex64) -> Self {
        Self::new(v, 0.0)
    }

    /// `exp(log_value)` as a scaled value with unit mantissa.
    pub fn from_log(log_value: f64) -> Self {
        ScaledValue {
            mantissa: Complex64::new(1.0, 0.0),
            log_scale: log_value,
        }
    }

    pub fn mantissa(&self) -> Complex64 {
        self.mantissa
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    fn normalized(mut self) -> Self {
        let mag = self.mantissa.norm();
        if mag == 0.0 {
            return ScaledValue::ZERO;
        }
        if !(BAND_LO..=BAND_HI).contains(&mag) {
            let shift = mag.ln();
            self.mantissa *= (-shift).exp();
            self.log_scale += shift;
        }
        self
    }

    pub fn mul(&self, other: &ScaledValue) -> ScaledValue {
        ScaledValue {
            mantissa: self.mantissa * other.mantissa,
            log_scale: self.log_scale + other.log_scale,
        }
        .normalized()
    }

    pub fn scale_f64(&self, factor: f64) -> ScaledValue {
        ScaledValue {
            mantissa: self.mantissa * factor,
            log_scale: self.log_scale,
        }
        .normalized()
    }

    pub fn scale_log(&self, log_factor: f64) -> ScaledValue {
        if self.is_zero() {
            return ScaledValue::ZERO;
        }
        ScaledValue {
            mantissa: self.mantissa,
            log_scale: self.log_scale + log_factor,
        }
    }

    /// Sum with exponent alignment; the smaller operand is demoted so the
    /// `exp` argument is never positive.
    pub fn add(&self, other: &ScaledValue) -> ScaledValue {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let (hi, lo) = if self.log_scale >= other.log_scale {
            (self, other)
        } else {
            (other, self)
        };
        let shift = (lo.log_scale - hi.log_scale).exp();
        ScaledValue {
            mantissa: hi.mantissa + lo.mantissa * shift,
            log_scale: hi.log_scale,
        }
        .normalized()
    }

    pub fn sub(&self, other: &ScaledValue) -> ScaledValue {
        self.add(&other.scale_f64(-1.0))
    }

    /// Product with the conjugate of `other`.
    pub fn mul_conj(&self, other: &ScaledValue) -> ScaledValue {
        ScaledValue {
            mantissa: self.mantissa * other.mantissa.conj(),
            log_scale: self.log_scale + other.log_scale,
        }
        .normalized()
    }

    /// Collapse to a plain complex double. Overflows to infinity and
    /// underflows to zero honestly.
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        self.mantissa * self.log_scale.exp()
    }

    /// Real part of the collapsed value.
    pub fn value(&self) -> f64 {
        self.to_complex().re
    }

    /// ln of the magnitude; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mantissa.norm().ln() + self.log_scale
        }
    }

    /// Ratio of real scaled values as a plain double; stable even when
    /// numerator and denominator individually over/underflow.
    pub fn ratio(&self, denom: &ScaledValue) -> f64 {
        let m = self.mantissa.re / denom.mantissa.re;
        m * (self.log_scale - denom.log_scale).exp()
    }
}
