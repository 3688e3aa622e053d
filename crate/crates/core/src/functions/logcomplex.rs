use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;

/// Wraps an angle in radians into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    if !a.is_finite() {
        return 0.0;
    }
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// A complex number stored as `(ln |w|, arg w)`.
///
/// Values such as `exp(e^{z²})` at `|z| = 10` have a log-modulus near
/// `e^{100}`; they are representable here and nowhere else.
#[derive(Clone, Copy, PartialEq)]
pub struct LogComplex {
    pub log_modulus: f64,
    pub argument: f64,
    pub is_zero: bool,
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        log_modulus: f64::NEG_INFINITY,
        argument: 0.0,
        is_zero: true,
    };

    pub const ONE: LogComplex = LogComplex {
        log_modulus: 0.0,
        argument: 0.0,
        is_zero: false,
    };

    pub fn new(log_modulus: f64, argument: f64) -> Self {
        if log_modulus == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        LogComplex {
            log_modulus,
            argument: wrap_angle(argument),
            is_zero: false,
        }
    }

    /// `e^w` without evaluating the exponential.
    pub fn exp(w: Complex64) -> Self {
        Self::new(w.re, w.im)
    }

    pub fn from_complex(w: Complex64) -> Self {
        if w.re == 0.0 && w.im == 0.0 {
            return Self::ZERO;
        }
        Self::new(w.norm().ln(), w.arg())
    }

    /// Overflows to infinity once `log_modulus` exceeds roughly 709.
    pub fn to_complex(self) -> Complex64 {
        if self.is_zero {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_modulus.exp(), self.argument)
    }

    /// Log-modulus, with `-∞` for zero.
    pub fn ln_abs(self) -> f64 {
        if self.is_zero {
            f64::NEG_INFINITY
        } else {
            self.log_modulus
        }
    }

    pub fn conj(self) -> Self {
        if self.is_zero {
            return self;
        }
        Self::new(self.log_modulus, -self.argument)
    }

    /// Multiplies by a positive real given by its logarithm.
    pub fn scale_ln(self, ln_c: f64) -> Self {
        if self.is_zero {
            return self;
        }
        LogComplex {
            log_modulus: self.log_modulus + ln_c,
            ..self
        }
    }

    pub fn mul(self, other: Self) -> Self {
        if self.is_zero || other.is_zero {
            return Self::ZERO;
        }
        Self::new(
            self.log_modulus + other.log_modulus,
            self.argument + other.argument,
        )
    }

    /// Log-sum-exp addition: the smaller term is divided by the larger one
    /// before anything leaves log scale.
    pub fn add(self, other: Self) -> Self {
        if self.is_zero {
            return other;
        }
        if other.is_zero {
            return self;
        }
        let (big, small) = if self.log_modulus >= other.log_modulus {
            (self, other)
        } else {
            (other, self)
        };
        let ratio = Complex64::from_polar(
            (small.log_modulus - big.log_modulus).exp(),
            small.argument - big.argument,
        );
        // ln|1 + ratio| computed as ln1p to keep precision when |ratio| is tiny
        let t = 2.0 * ratio.re + ratio.norm_sqr();
        if t <= -1.0 {
            return Self::ZERO;
        }
        let ln_abs = 0.5 * t.ln_1p();
        let arg = ratio.im.atan2(1.0 + ratio.re);
        Self::new(big.log_modulus + ln_abs, big.argument + arg)
    }

    /// Integer power; `0⁰ = 1`.
    pub fn pow_int(self, n: u32) -> Self {
        if n == 0 {
            return LogComplex::ONE;
        }
        if self.is_zero {
            return self;
        }
        LogComplex::new(self.log_modulus * n as f64, self.argument * n as f64)
    }
}

impl fmt::Debug for LogComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero {
            write!(f, "LogComplex(0)")
        } else {
            write!(
                f,
                "LogComplex(exp({:e}) * e^(i{:e}))",
                self.log_modulus, self.argument
            )
        }
    }
}

impl From<Complex64> for LogComplex {
    fn from(w: Complex64) -> Self {
        Self::from_complex(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wraps_into_half_open_interval() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(wrap_angle(0.0), 0.0);
    }

    #[test]
    fn zero_is_absorbing_and_neutral() {
        let a = LogComplex::new(3.0, 1.0);
        assert!(a.mul(LogComplex::ZERO).is_zero);
        assert_eq!(a.add(LogComplex::ZERO), a);
        assert!(LogComplex::from_complex(Complex64::new(0.0, 0.0)).is_zero);
    }

    #[test]
    fn exact_cancellation_gives_zero() {
        let a = LogComplex::new(2.0, 0.5);
        let b = LogComplex::new(2.0, 0.5 + PI);
        let s = a.add(b);
        assert!(s.is_zero || s.log_modulus < -30.0);
    }

    #[test]
    fn huge_magnitudes_add() {
        let a = LogComplex::new(1e40, 0.0);
        let b = LogComplex::new(1e40 - 1.0, 0.0);
        let s = a.add(b);
        assert_eq!(s.log_modulus, 1e40);
        let c = LogComplex::new(5.0, 0.0).add(LogComplex::new(5.0, 0.0));
        assert!((c.log_modulus - (5.0 + 2f64.ln())).abs() < 1e-14);
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    proptest! {
        #[test]
        fn round_trip_and_arithmetic_match_linear_scale(
            ar in -50.0f64..50.0, ai in -50.0f64..50.0,
            br in -50.0f64..50.0, bi in -50.0f64..50.0,
        ) {
            let a = Complex64::new(ar, ai);
            let b = Complex64::new(br, bi);
            prop_assume!(a.norm() > 1e-6 && b.norm() > 1e-6);
            let la = LogComplex::from_complex(a);
            let lb = LogComplex::from_complex(b);
            prop_assert!(la.argument > -PI && la.argument <= PI);
            prop_assert!(rel(la.to_complex(), a) < 1e-12);
            prop_assert!(rel(la.mul(lb).to_complex(), a * b) < 1e-12);
            let sum = a + b;
            prop_assume!(sum.norm() > 1e-3 * (a.norm() + b.norm()));
            prop_assert!(rel(la.add(lb).to_complex(), sum) < 1e-11);
        }

        #[test]
        fn exp_round_trip(re in -700.0f64..700.0, im in -10.0f64..10.0) {
            let w = Complex64::new(re, im);
            let l = LogComplex::exp(w);
            prop_assert_eq!(l.log_modulus, re);
            let back = l.to_complex();
            let expect = w.exp();
            prop_assert!(rel(back, expect) < 1e-12);
        }
    }
}
