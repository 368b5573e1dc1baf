use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// A complex number stored as `m · 2^e`, used where Bessel values of high
/// order leave the double-precision exponent range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledComplex {
    pub mantissa: C64,
    pub exponent: i32,
}

/// `x · 2^e` without intermediate overflow or premature underflow.
pub(crate) fn ldexp(mut x: f64, mut e: i32) -> f64 {
    const STEP: i32 = 1000;
    while e > STEP {
        x *= 2f64.powi(STEP);
        e -= STEP;
        if x.is_infinite() || x == 0.0 {
            return x;
        }
    }
    while e < -STEP {
        x *= 2f64.powi(-STEP);
        e += STEP;
        if x == 0.0 || x.is_infinite() {
            return x;
        }
    }
    x * 2f64.powi(e)
}

impl ScaledComplex {
    pub const ZERO: Self = Self { mantissa: C64::new(0.0, 0.0), exponent: 0 };

    pub fn new(mantissa: C64, exponent: i32) -> Self {
        Self { mantissa, exponent }.normalized()
    }

    pub fn from_c64(z: C64) -> Self {
        Self::new(z, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    /// Rescales so that the larger mantissa component lies in [1, 2).
    pub fn normalized(self) -> Self {
        let big = self.mantissa.re.abs().max(self.mantissa.im.abs());
        if big == 0.0 || !big.is_finite() {
            return Self { mantissa: self.mantissa, exponent: if big == 0.0 { 0 } else { self.exponent } };
        }
        let shift = big.log2().floor() as i32;
        let f = 2f64.powi(-shift);
        let m = if f.is_finite() && f != 0.0 {
            self.mantissa * f
        } else {
            C64::new(ldexp(self.mantissa.re, -shift), ldexp(self.mantissa.im, -shift))
        };
        Self { mantissa: m, exponent: self.exponent + shift }
    }

    /// Converts to a plain complex value, failing when the magnitude overflows.
    pub fn value(&self) -> Result<C64> {
        let v = C64::new(ldexp(self.mantissa.re, self.exponent), ldexp(self.mantissa.im, self.exponent));
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Overflow(format!("magnitude 2^{}", self.exponent)));
        }
        Ok(v)
    }

    /// Converts to a plain complex value; magnitudes below the subnormal range
    /// flush to zero and magnitudes above it saturate to infinity.
    pub fn value_lossy(&self) -> C64 {
        C64::new(ldexp(self.mantissa.re, self.exponent), ldexp(self.mantissa.im, self.exponent))
    }

    /// log2 of the magnitude (−∞ for zero).
    pub fn log2_abs(&self) -> f64 {
        self.mantissa.norm().log2() + self.exponent as f64
    }

    pub fn mul(self, o: Self) -> Self {
        Self::new(self.mantissa * o.mantissa, self.exponent + o.exponent)
    }

    pub fn div(self, o: Self) -> Self {
        Self::new(self.mantissa / o.mantissa, self.exponent - o.exponent)
    }

    pub fn scale(self, c: C64) -> Self {
        Self::new(self.mantissa * c, self.exponent)
    }

    pub fn add(self, o: Self) -> Self {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        let e = self.exponent.max(o.exponent);
        let a = C64::new(ldexp(self.mantissa.re, self.exponent - e), ldexp(self.mantissa.im, self.exponent - e));
        let b = C64::new(ldexp(o.mantissa.re, o.exponent - e), ldexp(o.mantissa.im, o.exponent - e));
        Self::new(a + b, e)
    }

    pub fn sub(self, o: Self) -> Self {
        self.add(o.scale(C64::new(-1.0, 0.0)))
    }

    pub fn conj(self) -> Self {
        Self { mantissa: self.mantissa.conj(), exponent: self.exponent }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ldexp_spans_extended_range() {
        assert_eq!(ldexp(1.0, 10), 1024.0);
        assert_eq!(ldexp(1.5, -1070), 3.0 * 2f64.powi(-1000) * 2f64.powi(-71));
        assert_eq!(ldexp(ldexp(3.0, -1030), 1030), 3.0);
        assert_eq!(ldexp(1.0, -1200), 0.0);
        assert!(ldexp(1.0, 1200).is_infinite());
    }

    #[test]
    fn arithmetic_round_trips() {
        let a = ScaledComplex::new(C64::new(3.0, -1.0), 2000);
        let b = ScaledComplex::new(C64::new(0.5, 2.0), -2010);
        let p = a.mul(b).value().unwrap();
        let expect = C64::new(3.0, -1.0) * C64::new(0.5, 2.0) * 2f64.powi(-10);
        assert!((p - expect).norm() < 1e-15 * expect.norm());
        let s = ScaledComplex::from_c64(C64::new(1.0, 0.0)).add(ScaledComplex::from_c64(C64::new(0.0, 1.0)));
        assert_eq!(s.value().unwrap(), C64::new(1.0, 1.0));
        assert!(a.value().is_err());
    }
}
