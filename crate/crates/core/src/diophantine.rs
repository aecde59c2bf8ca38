//! Simultaneous approximation: the smallest `q <= m^k` with
//! `max_i |q c_i - p_i| < 1/m`, certified against interval inputs.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::interval::RatInterval;
use crate::json::{int_to_json, ints_to_json};
use crate::par::Parallelism;

/// Largest `m^k` either scan accepts.
pub const MAX_SCAN: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletResult {
    pub q: u64,
    pub p: Vec<BigInt>,
    pub m: u64,
    /// Upper bound on `max_i |q c_i - p_i|` over the input intervals.
    pub err: BigRational,
}

impl DirichletResult {
    pub fn to_json(&self) -> Value {
        json!({
            "q": self.q,
            "p": ints_to_json(&self.p),
            "m": self.m,
            "err": self.err.to_f64(),
            "err_exact": {"num": int_to_json(self.err.numer()), "den": int_to_json(self.err.denom())},
        })
    }
}

/// Parses `1.25`, `-3e-2`, `7` or `2/3` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Invalid(format!("not a number: {s:?}"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut x = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        x = -x;
    }
    Ok(x)
}

fn check_args(c: &[RatInterval], m: u64) -> Result<u64> {
    if c.is_empty() {
        return Err(Error::Invalid("empty coordinate vector".into()));
    }
    if m == 0 {
        return Err(Error::Invalid("m must be positive".into()));
    }
    let k = u32::try_from(c.len()).map_err(|_| Error::Invalid("too many coordinates".into()))?;
    match m.checked_pow(k) {
        Some(b) if b <= MAX_SCAN => Ok(b),
        _ => Err(Error::LimitExceeded {
            last_completed_radius: 0,
            reason: format!("m^k exceeds the scan limit {MAX_SCAN}"),
        }),
    }
}

enum Verdict {
    Valid(Vec<BigInt>, BigRational),
    Invalid,
    Unsure,
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// Distance from `x` to the nearest integer.
fn dist_z(x: &BigRational) -> BigRational {
    let f = x - BigRational::from_integer(x.floor().to_integer());
    let g = BigRational::one() - &f;
    f.min(g)
}

fn verdict(c: &[RatInterval], q: u64, m: u64) -> Verdict {
    let inv_m = BigRational::new(BigInt::one(), BigInt::from(m));
    let qr = BigRational::from_integer(BigInt::from(q));
    let mut p = Vec::with_capacity(c.len());
    let mut err = BigRational::zero();
    let mut unsure = false;
    for ci in c {
        let x = RatInterval::new(&ci.lo * &qr, &ci.hi * &qr);
        let pi = (x.mid() + half()).floor().to_integer();
        let pr = BigRational::from_integer(pi.clone());
        let e = (&x.lo - &pr).abs().max((&x.hi - &pr).abs());
        if e >= inv_m {
            // rule out every admissible p, not just the nearest one
            let contains_int = x.lo.ceil() <= x.hi;
            let lowest = if contains_int || x.width() >= BigRational::one() {
                BigRational::zero()
            } else {
                dist_z(&x.lo).min(dist_z(&x.hi))
            };
            if lowest >= inv_m {
                return Verdict::Invalid;
            }
            unsure = true;
        }
        err = err.max(e);
        p.push(pi);
    }
    if unsure {
        Verdict::Unsure
    } else {
        Verdict::Valid(p, err)
    }
}

/// Floating-point filter: true unless `q` is certainly invalid.
fn maybe(cf: &[(f64, f64)], q: u64, inv_m: f64) -> bool {
    let qf = q as f64;
    cf.iter().all(|&(mid, rad)| {
        let x = qf * mid;
        let d = (x - x.round()).abs();
        let slack = qf * (rad + mid.abs() * 1e-15) + 1e-9;
        d - slack < inv_m
    })
}

/// The smallest valid `q`. Candidates surviving a floating-point filter are
/// decided exactly; a candidate whose error interval straddles `1/m` gives
/// `InsufficientPrecision`.
pub fn dirichlet_approx(c: &[RatInterval], m: u64, par: Parallelism) -> Result<DirichletResult> {
    let bound = check_args(c, m)?;
    let cf: Vec<(f64, f64)> = c
        .iter()
        .map(|x| {
            let mid = x.mid().to_f64().unwrap_or(f64::NAN);
            let rad = x.radius().to_f64().unwrap_or(f64::INFINITY);
            (mid, rad * (1.0 + 1e-12))
        })
        .collect();
    if cf.iter().any(|(mid, rad)| !mid.is_finite() || !rad.is_finite()) {
        return Err(Error::Invalid("coordinates out of floating-point range".into()));
    }
    let inv_m = 1.0 / m as f64;
    let mut start = 1u64;
    while start <= bound {
        let len = usize::try_from(bound - start + 1).map_err(|_| Error::Invalid("scan too long".into()))?;
        let Some(off) = par.find_first(len, |i| maybe(&cf, start + i as u64, inv_m)) else {
            break;
        };
        let q = start + off as u64;
        match verdict(c, q, m) {
            Verdict::Valid(p, err) => return Ok(DirichletResult { q, p, m, err }),
            Verdict::Invalid => start = q + 1,
            Verdict::Unsure => return Err(Error::InsufficientPrecision),
        }
    }
    // the theorem guarantees a q for exact inputs; wide intervals can defeat it
    Err(Error::InsufficientPrecision)
}

/// Exhaustive sequential scan over `q = 1..=m^k`, in integer arithmetic on a
/// common denominator. Independent of `dirichlet_approx`.
pub fn brute_force_dirichlet(c: &[RatInterval], m: u64) -> Result<DirichletResult> {
    let bound = check_args(c, m)?;
    let d = c
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.lo.denom()).lcm(x.hi.denom()));
    // c_i in [a_i / d, b_i / d]
    let ends: Vec<(BigInt, BigInt)> = c
        .iter()
        .map(|x| {
            (
                x.lo.numer() * (&d / x.lo.denom()),
                x.hi.numer() * (&d / x.hi.denom()),
            )
        })
        .collect();
    let mb = BigInt::from(m);
    let two = BigInt::from(2);
    for q in 1..=bound {
        let qb = BigInt::from(q);
        let mut p = Vec::with_capacity(c.len());
        let mut worst = BigInt::zero();
        let mut ok = true;
        let mut sure_bad = false;
        for (a, b) in &ends {
            let (lo, hi) = (&qb * a, &qb * b);
            // nearest integer to the midpoint (lo + hi) / 2d
            let pi = (&lo + &hi + &d).div_floor(&(&d * &two));
            let pd = &pi * &d;
            let e = (&lo - &pd).abs().max((&hi - &pd).abs());
            if &e * &mb >= d {
                ok = false;
                // every x in [lo, hi]/d at distance >= 1/m from all integers?
                let fl = lo.div_floor(&d);
                let contains_int = &fl * &d == lo || (&fl + 1) * &d <= hi;
                if !contains_int && &hi - &lo < d {
                    let dl = (&lo - &fl * &d).min((&fl + 1) * &d - &lo);
                    let fh = hi.div_floor(&d);
                    let dh = (&hi - &fh * &d).min((&fh + 1) * &d - &hi);
                    if dl.min(dh) * &mb >= d {
                        sure_bad = true;
                        break;
                    }
                }
            }
            worst = worst.max(e);
            p.push(pi);
        }
        if ok {
            return Ok(DirichletResult {
                q,
                p,
                m,
                err: BigRational::new(worst, d.clone()),
            });
        }
        if !sure_bad {
            return Err(Error::InsufficientPrecision);
        }
    }
    Err(Error::InsufficientPrecision)
}

/// Point intervals for exact inputs.
pub fn exact(c: &[BigRational]) -> Vec<RatInterval> {
    c.iter().cloned().map(RatInterval::point).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn parses() {
        assert_eq!(r("1.25"), BigRational::new(5.into(), 4.into()));
        assert_eq!(r("-3e-2"), BigRational::new((-3).into(), 100.into()));
        assert_eq!(r("2/3"), BigRational::new(2.into(), 3.into()));
        assert_eq!(r("12"), BigRational::from_integer(12.into()));
        assert!(parse_rational("1.2.3").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn examples() {
        let par = Parallelism::default();
        let a = dirichlet_approx(&exact(&[r("1/2")]), 2, par).unwrap();
        assert_eq!((a.q, a.p.clone(), a.err.clone()), (2, vec![BigInt::one()], BigRational::zero()));
        let g = dirichlet_approx(&exact(&[r("1.6180339887")]), 10, par).unwrap();
        assert_eq!((g.q, g.p.clone()), (5, vec![BigInt::from(8)]));
        assert!((g.err.to_f64().unwrap() - 0.0902).abs() < 1e-3);
        let t = dirichlet_approx(&exact(&[r("1/3"), r("2/3")]), 3, par).unwrap();
        assert_eq!((t.q, t.p.clone()), (3, vec![BigInt::from(1), BigInt::from(2)]));
        let z = dirichlet_approx(&exact(&[r("4"), r("-7")]), 5, par).unwrap();
        assert_eq!((z.q, z.p), (1, vec![BigInt::from(4), BigInt::from(-7)]));
    }

    #[test]
    fn brute_force_examples() {
        let g = brute_force_dirichlet(&exact(&[r("1.6180339887")]), 10).unwrap();
        assert_eq!(g.q, 5);
        let t = brute_force_dirichlet(&exact(&[r("1/3"), r("2/3")]), 3).unwrap();
        assert_eq!(t.q, 3);
        let mixed = exact(&[r("0.61803399"), r("-0.85065081")]);
        let a = dirichlet_approx(&mixed, 4, Parallelism::Sequential).unwrap();
        assert_eq!(a, brute_force_dirichlet(&mixed, 4).unwrap());
        assert!(a.q <= 16);
    }

    #[test]
    fn straddling_needs_precision() {
        // q = 1: |c - 0| is 1/3 +- 1/100 against 1/m = 1/3
        let c = vec![RatInterval::around(r("1/3"), &r("1/100"))];
        assert_eq!(dirichlet_approx(&c, 3, Parallelism::default()), Err(Error::InsufficientPrecision));
        assert_eq!(brute_force_dirichlet(&c, 3), Err(Error::InsufficientPrecision));
    }

    #[test]
    fn rejects_huge_scans() {
        let c = exact(&vec![r("0.1"); 4]);
        assert!(matches!(dirichlet_approx(&c, 1000, Parallelism::default()), Err(Error::LimitExceeded { .. })));
    }
}
