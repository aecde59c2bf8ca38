//! Closed intervals with exact rational endpoints.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn point(x: BigRational) -> Self {
        RatInterval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        RatInterval { lo, hi }
    }

    /// `center +- radius`.
    pub fn around(center: BigRational, radius: &BigRational) -> Self {
        RatInterval {
            lo: &center - radius,
            hi: center + radius,
        }
    }

    pub fn from_int(x: &BigInt) -> Self {
        Self::point(BigRational::from_integer(x.clone()))
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn radius(&self) -> BigRational {
        (&self.hi - &self.lo) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Enclosure of `|x|` over the interval.
    pub fn abs(&self) -> RatInterval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            -self.clone()
        } else {
            let m = if -&self.lo > self.hi {
                -&self.lo
            } else {
                self.hi.clone()
            };
            RatInterval::new(BigRational::zero(), m)
        }
    }

    pub fn scale(&self, c: &BigRational) -> RatInterval {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if a <= b {
            RatInterval::new(a, b)
        } else {
            RatInterval::new(b, a)
        }
    }

    /// Division by an interval that excludes zero.
    pub fn div(&self, other: &RatInterval) -> Option<RatInterval> {
        if other.contains_zero() {
            return None;
        }
        let recip = RatInterval::new(other.hi.recip(), other.lo.recip());
        Some(self * &recip)
    }

    /// Outward-rounded square root of a non-negative interval, endpoints
    /// accurate to `2^-bits`.
    pub fn sqrt(&self, bits: u32) -> RatInterval {
        let lo = sqrt_bound(&self.lo, bits, false);
        let hi = sqrt_bound(&self.hi, bits, true);
        RatInterval::new(lo, hi)
    }

    pub fn to_f64(&self) -> f64 {
        self.mid().to_f64().unwrap_or(f64::NAN)
    }
}

fn sqrt_bound(x: &BigRational, bits: u32, upper: bool) -> BigRational {
    if !x.is_positive() {
        return BigRational::zero();
    }
    let scale = BigInt::one() << (2 * bits as usize);
    // floor(x * 4^bits)
    let scaled = (x * BigRational::from_integer(scale)).floor().to_integer();
    let n: BigUint = scaled.to_biguint().unwrap_or_default();
    let mut r = n.sqrt();
    if upper {
        r += 1u32;
    }
    BigRational::new(BigInt::from(r), BigInt::one() << bits as usize)
}

impl Add for &RatInterval {
    type Output = RatInterval;
    fn add(self, o: &RatInterval) -> RatInterval {
        RatInterval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }
}

impl Sub for &RatInterval {
    type Output = RatInterval;
    fn sub(self, o: &RatInterval) -> RatInterval {
        RatInterval::new(&self.lo - &o.hi, &self.hi - &o.lo)
    }
}

impl Mul for &RatInterval {
    type Output = RatInterval;
    fn mul(self, o: &RatInterval) -> RatInterval {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().cloned().unwrap_or_default();
        let hi = c.iter().max().cloned().unwrap_or_default();
        RatInterval::new(lo, hi)
    }
}

impl Neg for RatInterval {
    type Output = RatInterval;
    fn neg(self) -> RatInterval {
        RatInterval::new(-self.hi, -self.lo)
    }
}

/// Horner evaluation of an integer polynomial over an interval (an enclosure
/// of the range).
pub fn eval_poly(p: &[BigInt], x: &RatInterval) -> RatInterval {
    let mut acc = RatInterval::point(BigRational::zero());
    for c in p.iter().rev() {
        acc = &(&acc * x) + &RatInterval::from_int(c);
    }
    acc
}

/// Rational approximation of an `f64` (exact binary value).
pub fn rat_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn arithmetic_encloses() {
        let a = RatInterval::new(r(-1, 1), r(2, 1));
        let b = RatInterval::new(r(3, 1), r(4, 1));
        let p = &a * &b;
        assert_eq!(p, RatInterval::new(r(-4, 1), r(8, 1)));
        assert_eq!(a.abs(), RatInterval::new(r(0, 1), r(2, 1)));
        assert!(a.div(&a).is_none());
        let q = b.div(&b).unwrap();
        assert!(q.lo <= r(1, 1) && q.hi >= r(1, 1));
    }

    #[test]
    fn sqrt_brackets() {
        let two = RatInterval::point(r(2, 1));
        let s = two.sqrt(40);
        assert!(&s.lo * &s.lo <= r(2, 1));
        assert!(&s.hi * &s.hi >= r(2, 1));
        assert!(s.width() < r(1, 1 << 30));
    }
}
