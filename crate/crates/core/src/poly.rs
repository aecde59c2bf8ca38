//! Integer and rational polynomials, coefficients stored low degree first.

use nalgebra::{Complex, DMatrix};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type IntPoly = Vec<BigInt>;
pub type RatPoly = Vec<BigRational>;

pub fn trim<T: Zero>(p: &mut Vec<T>) {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

pub fn degree<T: Zero>(p: &[T]) -> usize {
    p.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

pub fn is_one(p: &[BigInt]) -> bool {
    degree(p) == 0 && p.first().is_some_and(One::is_one)
}

pub fn mul(a: &[BigInt], b: &[BigInt]) -> IntPoly {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

/// Division by a monic divisor: returns `(quotient, remainder)`.
pub fn divrem_monic(a: &[BigInt], b: &[BigInt]) -> (IntPoly, IntPoly) {
    let db = degree(b);
    debug_assert!(b[db].is_one());
    let mut rem: IntPoly = a.to_vec();
    trim(&mut rem);
    let da = degree(&rem);
    if da < db || (da == 0 && rem[0].is_zero()) {
        return (vec![BigInt::zero()], rem);
    }
    let mut quot = vec![BigInt::zero(); da - db + 1];
    for i in (0..=da - db).rev() {
        let c = rem[i + db].clone();
        if c.is_zero() {
            continue;
        }
        for j in 0..=db {
            rem[i + j] -= &c * &b[j];
        }
        quot[i] = c;
    }
    trim(&mut rem);
    trim(&mut quot);
    (quot, rem)
}

pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// The `n`-th cyclotomic polynomial.
pub fn cyclotomic(n: u64) -> IntPoly {
    let mut p: IntPoly = vec![BigInt::zero(); n as usize + 1];
    p[0] = -BigInt::one();
    p[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            let (q, r) = divrem_monic(&p, &cyclotomic(d));
            debug_assert!(r.iter().all(Zero::is_zero));
            p = q;
        }
    }
    p
}

/// All `n` whose cyclotomic polynomial has degree at most `max_degree`.
pub fn cyclotomic_indices(max_degree: usize) -> Vec<u64> {
    // phi(n) >= sqrt(n / 2)
    let bound = 2 * (max_degree as u64).pow(2) + 2;
    (1..=bound)
        .filter(|&n| euler_phi(n) as usize <= max_degree)
        .collect()
}

/// Splits `p` into its cyclotomic factors `(n, multiplicity)` and the
/// remaining cofactor, which has no root of unity as a root.
pub fn cyclotomic_split(p: &[BigInt]) -> (Vec<(u64, usize)>, IntPoly) {
    let mut rest: IntPoly = p.to_vec();
    trim(&mut rest);
    let mut factors = Vec::new();
    for n in cyclotomic_indices(degree(&rest)) {
        let c = cyclotomic(n);
        let mut mult = 0;
        loop {
            if degree(&rest) < degree(&c) {
                break;
            }
            let (q, r) = divrem_monic(&rest, &c);
            if r.iter().all(Zero::is_zero) {
                rest = q;
                mult += 1;
            } else {
                break;
            }
        }
        if mult > 0 {
            factors.push((n, mult));
        }
    }
    (factors, rest)
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a / num_integer::gcd(a, b) * b
}

/// Power sums `p_1..=p_count` of the roots of a monic integer polynomial
/// (Newton's identities; all values are integers).
pub fn power_sums(p: &[BigInt], count: usize) -> Vec<BigInt> {
    let d = degree(p);
    // e-coefficients: p(x) = x^d + a_{d-1} x^{d-1} + ... ; with s_j = a_{d-j}
    let a = |j: usize| -> BigInt {
        if j <= d {
            p[d - j].clone()
        } else {
            BigInt::zero()
        }
    };
    let mut sums: Vec<BigInt> = Vec::with_capacity(count);
    for m in 1..=count {
        // p_m + a_1 p_{m-1} + ... + a_{m-1} p_1 + m a_m = 0
        let mut acc = BigInt::zero();
        for j in 1..m {
            if j <= d {
                acc += a(j) * &sums[m - j - 1];
            }
        }
        if m <= d {
            acc += a(m) * BigInt::from(m);
        }
        sums.push(-acc);
    }
    sums
}

/// Monic polynomial whose roots are the reciprocals of the roots of `p`
/// (requires constant term `+-1`).
pub fn reciprocal(p: &[BigInt]) -> IntPoly {
    let d = degree(p);
    let c0 = &p[0];
    debug_assert!(c0.abs().is_one());
    (0..=d).map(|i| &p[d - i] * c0).collect()
}

pub fn eval_rat(p: &[BigInt], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + BigRational::from_integer(c.clone());
    }
    acc
}

pub fn eval_f64(p: &[BigInt], x: f64) -> f64 {
    let mut acc = 0.0;
    for c in p.iter().rev() {
        acc = acc * x + c.to_f64().unwrap_or(f64::NAN);
    }
    acc
}

pub fn eval_complex(p: &[BigInt], z: Complex<f64>) -> Complex<f64> {
    let mut acc = Complex::new(0.0, 0.0);
    for c in p.iter().rev() {
        acc = acc * z + Complex::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
    }
    acc
}

pub fn derivative(p: &[BigInt]) -> IntPoly {
    if p.len() <= 1 {
        return vec![BigInt::zero()];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

fn to_rat(p: &[BigInt]) -> RatPoly {
    p.iter().cloned().map(BigRational::from_integer).collect()
}

fn rat_rem(a: &[BigRational], b: &[BigRational]) -> RatPoly {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = degree(b);
    let lead = b[db].clone();
    while !(r.len() == 1 && r[0].is_zero()) && degree(&r) >= db {
        let dr = degree(&r);
        let c = &r[dr] / &lead;
        for j in 0..=db {
            let t = &c * &b[j];
            r[dr - db + j] -= t;
        }
        r.truncate(dr);
        if r.is_empty() {
            r.push(BigRational::zero());
        }
        trim(&mut r);
    }
    r
}

fn rat_div_exact(a: &[BigRational], b: &[BigRational]) -> RatPoly {
    let db = degree(b);
    let mut r = a.to_vec();
    trim(&mut r);
    let da = degree(&r);
    if da < db {
        return vec![BigRational::zero()];
    }
    let mut q = vec![BigRational::zero(); da - db + 1];
    for i in (0..=da - db).rev() {
        let c = &r[i + db] / &b[db];
        for j in 0..=db {
            let t = &c * &b[j];
            r[i + j] -= t;
        }
        q[i] = c;
    }
    q
}

fn rat_gcd(a: &[BigRational], b: &[BigRational]) -> RatPoly {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !(y.len() == 1 && y[0].is_zero()) {
        let r = rat_rem(&x, &y);
        x = y;
        y = r;
    }
    let lead = x[degree(&x)].clone();
    x.iter().map(|c| c / &lead).collect()
}

/// Squarefree part of `p` over the rationals, scaled to integer coefficients
/// with positive leading coefficient.
pub fn squarefree(p: &[BigInt]) -> IntPoly {
    let rp = to_rat(p);
    let g = rat_gcd(&rp, &to_rat(&derivative(p)));
    let q = rat_div_exact(&rp, &g);
    primitive(&q)
}

fn primitive(q: &[BigRational]) -> IntPoly {
    let den = q
        .iter()
        .fold(BigInt::one(), |acc, c| num_integer::lcm(acc, c.denom().clone()));
    let mut ints: IntPoly = q.iter().map(|c| (c * &den).to_integer()).collect();
    let g = ints
        .iter()
        .fold(BigInt::zero(), |acc, c| num_integer::gcd(acc, c.clone()));
    if !g.is_zero() {
        for c in ints.iter_mut() {
            *c = &*c / &g;
        }
    }
    trim(&mut ints);
    if ints.last().is_some_and(Signed::is_negative) {
        for c in ints.iter_mut() {
            *c = -c.clone();
        }
    }
    ints
}

/// Sturm chain of a squarefree polynomial.
pub fn sturm_chain(p: &[BigInt]) -> Vec<RatPoly> {
    let mut chain = vec![to_rat(p), to_rat(&derivative(p))];
    loop {
        let n = chain.len();
        let r = rat_rem(&chain[n - 2], &chain[n - 1]);
        if r.len() == 1 && r[0].is_zero() {
            break;
        }
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    chain
}

fn rat_poly_eval(p: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn sign_changes(chain: &[RatPoly], x: &BigRational) -> usize {
    let signs: Vec<i8> = chain
        .iter()
        .map(|p| {
            let v = rat_poly_eval(p, x);
            if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            }
        })
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots in `(a, b]`.
pub fn sturm_count(chain: &[RatPoly], a: &BigRational, b: &BigRational) -> usize {
    sign_changes(chain, a).saturating_sub(sign_changes(chain, b))
}

/// Numerical roots (eigenvalues of the companion matrix).
pub fn numeric_roots(p: &[BigInt]) -> Vec<Complex<f64>> {
    let d = degree(p);
    if d == 0 {
        return Vec::new();
    }
    let lead = p[d].to_f64().unwrap_or(1.0);
    let mut comp = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        comp[(i, d - 1)] = -p[i].to_f64().unwrap_or(f64::NAN) / lead;
    }
    let mut roots: Vec<Complex<f64>> = comp.complex_eigenvalues().iter().copied().collect();
    // polish with a few Newton steps
    let dp = derivative(p);
    for z in roots.iter_mut() {
        for _ in 0..4 {
            let f = eval_complex(p, *z);
            let g = eval_complex(&dp, *z);
            if g.norm() == 0.0 {
                break;
            }
            let step = f / g;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *z -= step;
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        c.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn cyclotomics() {
        assert_eq!(cyclotomic(1), p(&[-1, 1]));
        assert_eq!(cyclotomic(2), p(&[1, 1]));
        assert_eq!(cyclotomic(4), p(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), p(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), p(&[1, 0, -1, 0, 1]));
        let idx = cyclotomic_indices(2);
        assert_eq!(idx, vec![1, 2, 3, 4, 6]);
    }

    #[test]
    fn split_and_sums() {
        // (x-1)^2 (x^2 - 3x + 1)
        let f = mul(&mul(&p(&[-1, 1]), &p(&[-1, 1])), &p(&[1, -3, 1]));
        let (factors, rest) = cyclotomic_split(&f);
        assert_eq!(factors, vec![(1, 2)]);
        assert_eq!(rest, p(&[1, -3, 1]));
        // traces of [[2,1],[1,1]]^j are Lucas numbers L_{2j}
        let sums = power_sums(&p(&[1, -3, 1]), 5);
        assert_eq!(sums, p(&[3, 7, 18, 47, 123]));
    }

    #[test]
    fn sturm_counts_roots() {
        let f = p(&[1, -3, 1]);
        let chain = sturm_chain(&f);
        let r = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
        assert_eq!(sturm_count(&chain, &r(-10, 1), &r(10, 1)), 2);
        assert_eq!(sturm_count(&chain, &r(0, 1), &r(1, 1)), 1);
        assert_eq!(squarefree(&p(&[1, -2, 1])), p(&[-1, 1]));
    }
}
