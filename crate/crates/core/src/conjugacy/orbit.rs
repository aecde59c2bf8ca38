//! Orbits `{phi^r v : r in Z}` of vectors under `phi`, with sound stopping rules.
//!
//! Everything is driven by the minimal polynomial `mu_v` of `v`, i.e. the
//! monic generator of the annihilator of `v` in `Q[x]`. It is an integer
//! polynomial dividing the minimal polynomial of `phi`.
//!
//! * If `mu_v` has a root off the unit circle, pick `lambda` of largest
//!   modulus. Writing `x = sum_i c_i phi^i v` in the Krylov basis, the
//!   functional `ev(x) = sum_i c_i lambda^i` satisfies
//!   `ev(phi^r v) = lambda^r`, and `|ev(x)| <= M ||x||_inf`. So
//!   `||phi^r v||_inf <= B` forces `|lambda|^r <= M B`, which bounds `r`
//!   from above. The reciprocal polynomial bounds `r` from below.
//! * If `mu_v` is a product of distinct cyclotomic factors, the orbit is
//!   periodic with period `N = lcm { n : Phi_n | mu_v }`.
//! * Otherwise `phi^N` is unipotent on the Krylov space, and on each residue
//!   class `r = N j + i` the coordinates of `phi^r v` are polynomials in `j`,
//!   which escape any box once `|j|` passes an explicit bound.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::matrix::{rat_express, rat_inverse};
use crate::poly::{self, IntPoly};

/// Largest number of orbit points a single enumeration may visit.
const MAX_ENUMERATION: u128 = 20_000_000;

/// Relative safety margin applied to every floating-point bound.
const MARGIN: f64 = 1e-9;

/// How the orbit of a vector with a given minimal polynomial behaves.
#[derive(Debug)]
pub(crate) enum PolyClass {
    /// `log` lower bounds for the largest root of `mu_v` and of its
    /// reciprocal, and `rho_hi >= max |root|`.
    Hyperbolic {
        log_fwd: f64,
        log_bwd: f64,
        rho_hi: f64,
    },
    Cyclotomic {
        period: u64,
        squarefree: bool,
    },
}

pub(crate) fn classify_poly(mu: &[BigInt]) -> Result<PolyClass> {
    let (factors, rest) = poly::cyclotomic_split(mu);
    if poly::degree(&rest) == 0 {
        let period = factors.iter().fold(1u64, |acc, &(n, _)| poly::lcm_u64(acc, n));
        let squarefree = factors.iter().all(|&(_, m)| m == 1);
        return Ok(PolyClass::Cyclotomic { period, squarefree });
    }
    let log_fwd = log_spectral_radius_lower(&rest)?;
    let log_bwd = log_spectral_radius_lower(&poly::reciprocal(&rest))?;
    let max_coeff = mu.iter().map(ln_abs).fold(f64::NEG_INFINITY, f64::max);
    let rho_hi = (1.0 + max_coeff.exp()) * (1.0 + MARGIN);
    Ok(PolyClass::Hyperbolic {
        log_fwd,
        log_bwd,
        rho_hi,
    })
}

/// `ln |x|` for arbitrarily large `x`.
pub(crate) fn ln_abs(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        x.to_f64().unwrap_or(0.0).abs().ln()
    } else {
        let shift = bits - 900;
        let top: BigInt = x.abs() >> shift;
        top.to_f64().unwrap_or(0.0).ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// A certified-with-margin lower bound on `ln max |root|` for a monic integer
/// polynomial with a root off the unit circle, from `|p_j| <= d rho^j`.
fn log_spectral_radius_lower(p: &[BigInt]) -> Result<f64> {
    let d = poly::degree(p) as f64;
    let mut best = f64::NEG_INFINITY;
    let mut count = 256;
    while count <= 8192 {
        let sums = poly::power_sums(p, count);
        for (j, s) in sums.iter().enumerate() {
            if s.is_zero() {
                continue;
            }
            let v = (ln_abs(s) - d.ln()) / (j + 1) as f64;
            best = best.max(v);
        }
        if best > 1e-6 {
            return Ok(best * (1.0 - MARGIN));
        }
        count *= 4;
    }
    Err(Error::Internal(
        "could not certify a root off the unit circle".into(),
    ))
}

/// Everything needed to enumerate the relevant part of one orbit.
pub(crate) enum Plan {
    Zero,
    /// `phi^r v` for `0 <= r < period`.
    Periodic(Vec<Vec<BigInt>>),
    /// `phi^(N j + i) v = sum_t binom(j, t) terms[i][t]`.
    Unipotent {
        period: i64,
        terms: Vec<Vec<Vec<BigInt>>>,
    },
    /// `|ev(x)| <= m_fwd ||x||` for the expanding functional, and
    /// `<= m_bwd ||x||` for the contracting one.
    Hyperbolic {
        m_fwd: f64,
        m_bwd: f64,
        log_fwd: f64,
        log_bwd: f64,
    },
}

/// Source of per-polynomial classifications (memoized by the caller).
pub(crate) trait ClassCache {
    fn class_of(&self, mu: &IntPoly) -> Result<Arc<PolyClass>>;
}

fn to_rat(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

/// Krylov vectors `v, phi v, ..., phi^(d-1) v` and the minimal polynomial of `v`.
fn krylov(spec: &GroupSpec, v: &[BigInt]) -> (Vec<Vec<BigInt>>, IntPoly) {
    let mut basis: Vec<Vec<BigInt>> = Vec::new();
    let mut rat_basis: Vec<Vec<BigRational>> = Vec::new();
    let mut cur = v.to_vec();
    loop {
        let rc = to_rat(&cur);
        if let Some(comb) = rat_express(&rat_basis, &rc) {
            let mut mu: Vec<BigRational> = comb.into_iter().map(|c| -c).collect();
            mu.push(BigRational::one());
            let mu: IntPoly = mu.into_iter().map(|c| c.to_integer()).collect();
            return (basis, mu);
        }
        basis.push(cur.clone());
        rat_basis.push(rc);
        cur = spec.act(1, &cur);
    }
}

/// Row sums of `|K^+|` for the left inverse `K^+ = (K^T K)^-1 K^T`.
fn left_inverse_row_sums(basis: &[Vec<BigInt>]) -> Vec<f64> {
    let d = basis.len();
    let gram: Vec<Vec<BigRational>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let s: BigInt = basis[i].iter().zip(&basis[j]).map(|(a, b)| a * b).sum();
                    BigRational::from_integer(s)
                })
                .collect()
        })
        .collect();
    let inv = rat_inverse(&gram).expect("Krylov vectors are independent");
    let k = basis[0].len();
    (0..d)
        .map(|i| {
            let mut sum = BigRational::zero();
            for c in 0..k {
                let mut e = BigRational::zero();
                for (j, b) in basis.iter().enumerate() {
                    e += &inv[i][j] * BigRational::from_integer(b[c].clone());
                }
                sum += e.abs();
            }
            sum.to_f64().unwrap_or(f64::INFINITY) * (1.0 + MARGIN)
        })
        .collect()
}

pub(crate) fn plan(spec: &GroupSpec, cache: &impl ClassCache, v: &[BigInt]) -> Result<Plan> {
    if v.iter().all(Zero::is_zero) {
        return Ok(Plan::Zero);
    }
    let (basis, mu) = krylov(spec, v);
    match &*cache.class_of(&mu)? {
        PolyClass::Hyperbolic {
            log_fwd,
            log_bwd,
            rho_hi,
        } => {
            let sums = left_inverse_row_sums(&basis);
            let mut m_fwd = 0.0;
            let mut m_bwd = 0.0;
            let mut pow = 1.0;
            for s in &sums {
                m_fwd += s * pow;
                m_bwd += s;
                pow *= rho_hi;
            }
            Ok(Plan::Hyperbolic {
                m_fwd: m_fwd * (1.0 + MARGIN),
                m_bwd: m_bwd * (1.0 + MARGIN),
                log_fwd: *log_fwd,
                log_bwd: *log_bwd,
            })
        }
        PolyClass::Cyclotomic { period, squarefree } => {
            let period = *period;
            if *squarefree {
                let mut pts = Vec::with_capacity(period as usize);
                let mut cur = v.to_vec();
                for _ in 0..period {
                    pts.push(cur.clone());
                    cur = spec.act(1, &cur);
                }
                debug_assert_eq!(cur, v);
                return Ok(Plan::Periodic(pts));
            }
            let period_i = i64::try_from(period)
                .map_err(|_| Error::Internal("cyclotomic period too large".into()))?;
            let step = spec.phi_power(period_i);
            let d = basis.len();
            let mut terms = Vec::with_capacity(period as usize);
            let mut b = v.to_vec();
            for _ in 0..period {
                // t-th finite difference: (phi^N - I)^t b
                let mut ts = vec![b.clone()];
                for _ in 1..d {
                    let last = ts.last().unwrap();
                    let next: Vec<BigInt> = step
                        .mul_vec(last)
                        .into_iter()
                        .zip(last)
                        .map(|(a, c)| a - c)
                        .collect();
                    if next.iter().all(Zero::is_zero) {
                        break;
                    }
                    ts.push(next);
                }
                terms.push(ts);
                b = spec.act(1, &b);
            }
            Ok(Plan::Unipotent {
                period: period_i,
                terms,
            })
        }
    }
}

/// Largest `r >= 0` not excluded by `rate^r <= m * bound`.
fn exponent_bound(m: f64, bound: &BigInt, log_rate: f64) -> Result<u64> {
    let lhs = m.ln() + ln_abs(bound).max(0.0);
    if !lhs.is_finite() {
        return Err(Error::Internal("non-finite orbit bound".into()));
    }
    if lhs <= 0.0 {
        return Ok(0);
    }
    let r = (lhs / log_rate).floor() + 1.0;
    if r > MAX_ENUMERATION as f64 {
        return Err(Error::Internal("orbit window too large".into()));
    }
    Ok(r as u64)
}

fn sup_norm(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).max().unwrap_or_default()
}

fn l1_norm(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).sum()
}

/// Orders candidates by sup norm, then l1 norm, then lexicographically.
fn better(a: &[BigInt], an: &BigInt, b: &[BigInt], bn: &BigInt) -> bool {
    an < bn || (an == bn && (l1_norm(a), a) < (l1_norm(b), b))
}

fn binom_poly_eval(terms: &[Vec<BigInt>], j: &BigInt) -> Vec<BigInt> {
    // sum_t binom(j, t) terms[t]
    let k = terms[0].len();
    let mut out = terms[0].clone();
    let mut coef = BigInt::one();
    for (t, term) in terms.iter().enumerate().skip(1) {
        coef = coef * (j - BigInt::from(t - 1)) / BigInt::from(t);
        for l in 0..k {
            out[l] += &coef * &term[l];
        }
    }
    out
}

/// Bound `J` with `||sum_t binom(j,t) terms[t]||_inf > B` for all `|j| > J`.
fn unipotent_window(terms: &[Vec<BigInt>], bound: &BigInt) -> BigInt {
    let top = terms.len() - 1;
    if top == 0 {
        return BigInt::zero();
    }
    let k = terms[0].len();
    // monomial coefficients of top! * binom(j, t) for each t
    let mut fact = BigInt::one();
    for i in 2..=top {
        fact *= BigInt::from(i);
    }
    let mut basis: Vec<Vec<BigInt>> = Vec::with_capacity(top + 1);
    let mut falling: Vec<BigInt> = vec![BigInt::one()];
    let mut t_fact = BigInt::one();
    for t in 0..=top {
        if t > 0 {
            // falling *= (j - (t-1))
            let mut next = vec![BigInt::zero(); falling.len() + 1];
            for (i, c) in falling.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * BigInt::from(t - 1);
            }
            falling = next;
            t_fact *= BigInt::from(t);
        }
        let scale = &fact / &t_fact;
        basis.push(falling.iter().map(|c| c * &scale).collect());
    }
    let scaled_bound = &fact * bound;
    let mut best: Option<BigInt> = None;
    for l in 0..k {
        let mut coeffs = vec![BigInt::zero(); top + 1];
        for (t, b) in basis.iter().enumerate() {
            if terms[t][l].is_zero() {
                continue;
            }
            for (i, c) in b.iter().enumerate() {
                coeffs[i] += c * &terms[t][l];
            }
        }
        let Some(e) = coeffs.iter().rposition(|c| !c.is_zero()) else {
            continue;
        };
        if e == 0 {
            continue;
        }
        let lower: BigInt = coeffs[..e].iter().map(|c| c.abs()).sum();
        let j = (lower + &scaled_bound) / coeffs[e].abs();
        best = Some(match best {
            Some(b) if b <= j => b,
            _ => j,
        });
    }
    best.unwrap_or_default()
}

fn is_affine(terms: &[Vec<BigInt>]) -> bool {
    terms.len() <= 2
}

/// `||c + j e||_inf`.
fn affine_norm(c: &[BigInt], e: &[BigInt], j: &BigInt) -> BigInt {
    c.iter()
        .zip(e)
        .map(|(a, b)| (a + j * b).abs())
        .max()
        .unwrap_or_default()
}

/// `||c + j e||_1`.
fn affine_l1(c: &[BigInt], e: &[BigInt], j: &BigInt) -> BigInt {
    c.iter().zip(e).map(|(a, b)| (a + j * b).abs()).sum()
}

/// Minimisers `[a, b]` of an integer-convex `f` on `[lo, hi]`.
fn convex_argmin(f: impl Fn(&BigInt) -> BigInt, lo: &BigInt, hi: &BigInt) -> (BigInt, BigInt) {
    let one = BigInt::one();
    let two = BigInt::from(2);
    // first j with f(j+1) >= f(j) is the first minimiser
    let (mut a, mut b) = (lo.clone(), hi.clone());
    while a < b {
        let mid = (&a + &b).div_floor(&two);
        if f(&(&mid + &one)) >= f(&mid) {
            b = mid;
        } else {
            a = mid + &one;
        }
    }
    let first = a;
    let fmin = f(&first);
    // last j with f(j) == fmin
    let (mut a, mut b) = (first.clone(), hi.clone());
    while a < b {
        let mid = (&a + &b + &one).div_floor(&two);
        if f(&mid) == fmin {
            a = mid;
        } else {
            b = mid - &one;
        }
    }
    (first, a)
}

/// Least point of the affine line `j -> c + j e`, `|j| <= window`, in the
/// order (sup norm, l1 norm, lexicographic); both norms are convex in `j`.
fn affine_min(c: &[BigInt], e: &[BigInt], window: &BigInt) -> (BigInt, Vec<BigInt>) {
    let (a, b) = convex_argmin(|j| affine_norm(c, e, j), &-window.clone(), window);
    let (a, b) = convex_argmin(|j| affine_l1(c, e, j), &a, &b);
    let increasing = e.iter().find(|x| !x.is_zero()).is_none_or(|x| x.is_positive());
    let pick = if increasing { a } else { b };
    let point: Vec<BigInt> = c.iter().zip(e).map(|(x, y)| x + &pick * y).collect();
    (affine_norm(c, e, &pick), point)
}

/// Least point of the orbit of `v` in the order (sup norm, l1 norm, lexicographic).
pub(crate) fn canonical(spec: &GroupSpec, cache: &impl ClassCache, v: &[BigInt]) -> Result<Vec<BigInt>> {
    let bound = sup_norm(v);
    let mut best = v.to_vec();
    let mut best_n = bound.clone();
    match plan(spec, cache, v)? {
        Plan::Zero => {}
        Plan::Periodic(pts) => {
            for p in pts {
                let n = sup_norm(&p);
                if better(&p, &n, &best, &best_n) {
                    best = p;
                    best_n = n;
                }
            }
        }
        Plan::Unipotent { terms, .. } => {
            for ts in &terms {
                let window = unipotent_window(ts, &bound);
                if is_affine(ts) {
                    let zero = vec![BigInt::zero(); v.len()];
                    let e = ts.get(1).unwrap_or(&zero);
                    let (n, p) = affine_min(&ts[0], e, &window);
                    if better(&p, &n, &best, &best_n) {
                        best = p;
                        best_n = n;
                    }
                    continue;
                }
                check_window(&window)?;
                let mut j = -window.clone();
                while j <= window {
                    let p = binom_poly_eval(ts, &j);
                    let n = sup_norm(&p);
                    if better(&p, &n, &best, &best_n) {
                        best = p;
                        best_n = n;
                    }
                    j += 1;
                }
            }
        }
        Plan::Hyperbolic {
            m_fwd,
            m_bwd,
            log_fwd,
            log_bwd,
        } => {
            let r_fwd = exponent_bound(m_fwd, &bound, log_fwd)?;
            let r_bwd = exponent_bound(m_bwd, &bound, log_bwd)?;
            for (steps, dir) in [(r_fwd, 1i64), (r_bwd, -1)] {
                let mut cur = v.to_vec();
                for _ in 0..steps {
                    cur = spec.act(dir, &cur);
                    let n = sup_norm(&cur);
                    if better(&cur, &n, &best, &best_n) {
                        best.clone_from(&cur);
                        best_n = n;
                    }
                }
            }
        }
    }
    Ok(best)
}

fn check_window(window: &BigInt) -> Result<()> {
    if window > &BigInt::from(MAX_ENUMERATION / 2) {
        return Err(Error::Internal(format!(
            "unipotent orbit window {window} exceeds the enumeration limit"
        )));
    }
    Ok(())
}

/// Some `r` with `phi^r v = w`, if one exists.
pub(crate) fn exponent(
    spec: &GroupSpec,
    cache: &impl ClassCache,
    v: &[BigInt],
    w: &[BigInt],
) -> Result<Option<BigInt>> {
    if v == w {
        return Ok(Some(BigInt::zero()));
    }
    let bound = sup_norm(w);
    match plan(spec, cache, v)? {
        Plan::Zero => Ok(None),
        Plan::Periodic(pts) => Ok(pts.iter().position(|p| p == w).map(BigInt::from)),
        Plan::Unipotent { period, terms } => {
            for (i, ts) in terms.iter().enumerate() {
                let window = unipotent_window(ts, &bound);
                let found = if is_affine(ts) {
                    affine_solve(&ts[0], ts.get(1), w, &window)
                } else {
                    check_window(&window)?;
                    let mut j = -window.clone();
                    let mut hit = None;
                    while j <= window {
                        if binom_poly_eval(ts, &j) == w {
                            hit = Some(j.clone());
                            break;
                        }
                        j += 1;
                    }
                    hit
                };
                if let Some(j) = found {
                    return Ok(Some(j * BigInt::from(period) + BigInt::from(i)));
                }
            }
            Ok(None)
        }
        Plan::Hyperbolic {
            m_fwd,
            m_bwd,
            log_fwd,
            log_bwd,
        } => {
            let r_fwd = exponent_bound(m_fwd, &bound, log_fwd)?;
            let r_bwd = exponent_bound(m_bwd, &bound, log_bwd)?;
            for (steps, dir) in [(r_fwd, 1i64), (r_bwd, -1)] {
                let mut cur = v.to_vec();
                for r in 1..=steps {
                    cur = spec.act(dir, &cur);
                    if cur == w {
                        return Ok(Some(BigInt::from(dir * r as i64)));
                    }
                }
            }
            Ok(None)
        }
    }
}

/// `j` with `c + j e = w` and `|j| <= window`.
fn affine_solve(c: &[BigInt], e: Option<&Vec<BigInt>>, w: &[BigInt], window: &BigInt) -> Option<BigInt> {
    let Some(e) = e else {
        return (c == w).then(BigInt::zero);
    };
    let l = e.iter().position(|x| !x.is_zero())?;
    let (j, rem) = (&w[l] - &c[l]).div_rem(&e[l]);
    if !rem.is_zero() || j.abs() > *window {
        return None;
    }
    let ok = c.iter().zip(e).zip(w).all(|((a, b), t)| a + &j * b == *t);
    ok.then_some(j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;
    use std::sync::Mutex;

    struct Memo(Mutex<HashMap<IntPoly, Arc<PolyClass>>>);

    impl ClassCache for Memo {
        fn class_of(&self, mu: &IntPoly) -> Result<Arc<PolyClass>> {
            let mut m = self.0.lock().unwrap();
            if let Some(c) = m.get(mu) {
                return Ok(c.clone());
            }
            let c = Arc::new(classify_poly(mu)?);
            m.insert(mu.clone(), c.clone());
            Ok(c)
        }
    }

    fn memo() -> Memo {
        Memo(Mutex::new(HashMap::new()))
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn golden_ratio_rates() {
        let c = classify_poly(&ints(&[1, -3, 1])).unwrap();
        let PolyClass::Hyperbolic { log_fwd, log_bwd, rho_hi } = c else {
            panic!("expected hyperbolic");
        };
        let true_log = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        assert!(log_fwd <= true_log && log_fwd > 0.95 * true_log);
        assert!(log_bwd <= true_log && log_bwd > 0.95 * true_log);
        assert!(rho_hi >= (3.0 + 5f64.sqrt()) / 2.0);
    }

    #[test]
    fn sol_orbit_minimum() {
        let spec = GroupSpec::from_i64(&[&[2, 1], &[1, 1]]).unwrap();
        let m = memo();
        // (1, 0) and (1, -1) tie on the sup norm; the l1 norm decides
        assert_eq!(canonical(&spec, &m, &ints(&[2, 1])).unwrap(), ints(&[1, 0]));
        assert_eq!(canonical(&spec, &m, &ints(&[13, 8])).unwrap(), ints(&[1, 0]));
        assert_eq!(canonical(&spec, &m, &ints(&[1, -1])).unwrap(), ints(&[1, 0]));
        assert_eq!(canonical(&spec, &m, &ints(&[2, 0])).unwrap(), ints(&[2, 0]));
        assert_eq!(
            exponent(&spec, &m, &ints(&[1, 0]), &ints(&[13, 8])).unwrap(),
            Some(BigInt::from(3))
        );
        assert_eq!(
            exponent(&spec, &m, &ints(&[13, 8]), &ints(&[1, 0])).unwrap(),
            Some(BigInt::from(-3))
        );
        assert_eq!(exponent(&spec, &m, &ints(&[1, 0]), &ints(&[2, 0])).unwrap(), None);
    }

    #[test]
    fn heisenberg_orbits() {
        let spec = GroupSpec::from_i64(&[&[1, 1], &[0, 1]]).unwrap();
        let m = memo();
        // (a, b) -> (a + j b, b)
        assert_eq!(canonical(&spec, &m, &ints(&[2, 2])).unwrap(), ints(&[0, 2]));
        assert_eq!(canonical(&spec, &m, &ints(&[7, 3])).unwrap(), ints(&[1, 3]));
        assert_eq!(canonical(&spec, &m, &ints(&[5, 0])).unwrap(), ints(&[5, 0]));
        assert_eq!(
            exponent(&spec, &m, &ints(&[0, 2]), &ints(&[2, 2])).unwrap(),
            Some(BigInt::from(1))
        );
        assert_eq!(exponent(&spec, &m, &ints(&[1, 2]), &ints(&[0, 2])).unwrap(), None);
        let far = ints(&[1_000_000_000_001, 1]);
        assert_eq!(canonical(&spec, &m, &far).unwrap(), ints(&[0, 1]));
        assert_eq!(
            exponent(&spec, &m, &ints(&[0, 1]), &far).unwrap(),
            Some(BigInt::from(1_000_000_000_001i64))
        );
    }

    #[test]
    fn periodic_and_mixed_orbits() {
        // order-6 rotation
        let spec = GroupSpec::from_i64(&[&[0, -1], &[1, 1]]).unwrap();
        let m = memo();
        let c = canonical(&spec, &m, &ints(&[3, 1])).unwrap();
        let mut cur = ints(&[3, 1]);
        let mut seen = vec![];
        for _ in 0..6 {
            seen.push(cur.clone());
            cur = spec.act(1, &cur);
        }
        assert!(seen.contains(&c));
        assert!(seen.iter().all(|p| sup_norm(p) >= sup_norm(&c)));
        // -1 times a Jordan block: period 2 and unipotent square
        let spec = GroupSpec::from_i64(&[&[-1, 1], &[0, -1]]).unwrap();
        let v = ints(&[4, 3]);
        let w = spec.act(7, &v);
        assert_eq!(exponent(&spec, &m, &v, &w).unwrap(), Some(BigInt::from(7)));
        assert_eq!(
            canonical(&spec, &m, &v).unwrap(),
            canonical(&spec, &m, &w).unwrap()
        );
        // block sum of a hyperbolic and a rotation block
        let spec = GroupSpec::from_i64(&[&[2, 1, 0], &[1, 1, 0], &[0, 0, -1]]).unwrap();
        let v = ints(&[1, 0, 1]);
        let w = spec.act(-5, &v);
        assert_eq!(exponent(&spec, &m, &v, &w).unwrap(), Some(BigInt::from(-5)));
    }

    #[test]
    fn cubic_unipotent_orbit() {
        // single 3x3 Jordan block: coordinates quadratic in r
        let spec = GroupSpec::from_i64(&[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]).unwrap();
        let m = memo();
        let v = ints(&[5, -2, 1]);
        for r in [-4i64, -1, 3, 6] {
            let w = spec.act(r, &v);
            assert_eq!(exponent(&spec, &m, &v, &w).unwrap(), Some(BigInt::from(r)));
            assert_eq!(
                canonical(&spec, &m, &w).unwrap(),
                canonical(&spec, &m, &v).unwrap()
            );
        }
    }

    #[test]
    fn affine_min_matches_scan() {
        let cases: &[(&[i64], &[i64])] = &[
            (&[7, 3], &[3, 0]),
            (&[5, -4, 2], &[-2, 1, 0]),
            (&[0, 9], &[1, -1]),
            (&[4, 4], &[0, 0]),
            (&[-11, 6, 1], &[3, -2, 1]),
        ];
        let w = BigInt::from(30);
        for (c, e) in cases {
            let (c, e) = (ints(c), ints(e));
            let mut best: Option<(BigInt, BigInt, Vec<BigInt>)> = None;
            for j in -30i64..=30 {
                let p: Vec<BigInt> = c.iter().zip(&e).map(|(a, b)| a + b * j).collect();
                let key = (sup_norm(&p), l1_norm(&p), p);
                if best.as_ref().is_none_or(|b| &key < b) {
                    best = Some(key);
                }
            }
            let (n, _, p) = best.unwrap();
            assert_eq!(affine_min(&c, &e, &w), (n, p));
        }
    }
}
