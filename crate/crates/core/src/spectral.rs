//! Spectral classification of `phi`: quasi-unipotence, certified contracting
//! directions and numerical invariant-subspace frames.

use nalgebra::{Complex, DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::interval::{eval_poly, rat_from_f64, RatInterval};
use crate::matrix::IntMatrix;
use crate::poly::{self, IntPoly};

fn require_unimodular(phi: &IntMatrix) -> Result<()> {
    let det = phi.det();
    if det.abs().is_one() {
        Ok(())
    } else {
        Err(Error::NotUnimodular {
            det: det.to_string(),
        })
    }
}

/// True iff every eigenvalue of `phi` is a root of unity.
///
/// Decided exactly: the characteristic polynomial is divided by every
/// cyclotomic polynomial of degree at most `k`, and the verdict is whether
/// nothing is left over.
pub fn is_quasi_unipotent(phi: &IntMatrix) -> Result<bool> {
    require_unimodular(phi)?;
    let (_, rest) = poly::cyclotomic_split(&phi.charpoly());
    Ok(poly::is_one(&rest))
}

/// Independent check of quasi-unipotence: `phi^N` is unipotent for
/// `N = lcm { n : euler_phi(n) <= k }`.
pub fn has_unipotent_power(phi: &IntMatrix) -> bool {
    let k = phi.dim();
    let n = poly::cyclotomic_indices(k)
        .into_iter()
        .fold(1u64, poly::lcm_u64);
    let pn = crate::group::matrix_power(phi, n as i64).expect("non-negative power");
    let nil = pn.sub(&IntMatrix::identity(k));
    let mut acc = IntMatrix::identity(k);
    for _ in 0..k {
        acc = acc.mul(&nil);
    }
    acc.is_zero()
}

/// A real vector in the contracting subspace of `phi`, with a certified
/// coordinatewise error bound.
#[derive(Debug, Clone)]
pub struct ContractingVector {
    /// Rational centres of the coordinates.
    pub center: Vec<BigRational>,
    /// Every true coordinate lies within `errbound` of its centre.
    pub errbound: BigRational,
    /// The eigenvalue whose eigendirection was taken.
    pub eigenvalue: Complex<f64>,
    /// Isolating interval of the eigenvalue when it is real.
    pub eigenvalue_interval: Option<RatInterval>,
    /// False only for complex eigenvalues, whose bound rests on floating point.
    pub rigorous: bool,
}

impl ContractingVector {
    pub fn to_f64(&self) -> Vec<f64> {
        self.center
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    pub fn intervals(&self) -> Vec<RatInterval> {
        self.center
            .iter()
            .map(|c| RatInterval::around(c.clone(), &self.errbound))
            .collect()
    }
}

/// Deterministic unit vector (`||v||_inf = 1`, first nonzero coordinate
/// positive) along the eigendirection of the smallest-modulus eigenvalue,
/// or the real part of its eigenvector when that eigenvalue is complex.
pub fn contracting_vector(phi: &IntMatrix, precision: &BigRational) -> Result<ContractingVector> {
    require_unimodular(phi)?;
    if is_quasi_unipotent(phi)? {
        return Err(Error::QuasiUnipotent);
    }
    if !precision.is_positive() {
        return Err(Error::Invalid("precision must be positive".into()));
    }
    let mu = phi.minpoly();
    let roots = poly::numeric_roots(&mu);
    let min_mod = roots.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    let tol = 1e-9 * min_mod.max(1e-300);
    let mut candidates: Vec<Complex<f64>> = roots
        .iter()
        .copied()
        .filter(|z| z.norm() <= min_mod + tol)
        .collect();
    // prefer real roots, then the positive one, then positive imaginary part
    candidates.sort_by(|a, b| {
        let ra = a.im.abs() <= 1e-9 * a.norm().max(1.0);
        let rb = b.im.abs() <= 1e-9 * b.norm().max(1.0);
        rb.cmp(&ra)
            .then(b.re.partial_cmp(&a.re).unwrap_or(std::cmp::Ordering::Equal))
            .then(b.im.partial_cmp(&a.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    let lambda = candidates[0];
    let column_polys = eigen_column_polys(phi, &mu);
    let sqf = poly::squarefree(&mu);

    if let Some(iv) = isolate_real_root(&sqf, lambda) {
        return real_contracting_vector(&sqf, &column_polys, iv, lambda, precision);
    }
    complex_contracting_vector(&mu, &column_polys, lambda, precision)
}

/// Entries of `q(phi)` with `q(x) = mu(x) / (x - lambda)`, each an integer
/// polynomial in `lambda`. For any root `lambda` of `mu`, every column of
/// `q(phi)` lies in `ker(phi - lambda)` and some column is nonzero.
fn eigen_column_polys(phi: &IntMatrix, mu: &[BigInt]) -> Vec<Vec<IntPoly>> {
    let d = poly::degree(mu);
    let k = phi.dim();
    // b_{d-1} = 1, b_{i-1} = a_i + lambda * b_i
    let mut b: Vec<IntPoly> = vec![vec![BigInt::zero()]; d];
    b[d - 1] = vec![BigInt::one()];
    for i in (1..d).rev() {
        let mut next: IntPoly = vec![BigInt::zero(); b[i].len() + 1];
        next[0] = mu[i].clone();
        for (j, c) in b[i].iter().enumerate() {
            next[j + 1] += c;
        }
        b[i - 1] = next;
    }
    let mut powers = vec![IntMatrix::identity(k)];
    for _ in 1..d {
        powers.push(powers.last().unwrap().mul(phi));
    }
    let mut entries = vec![vec![vec![BigInt::zero()]; k]; k];
    for (i, bi) in b.iter().enumerate() {
        for r in 0..k {
            for c in 0..k {
                let coef = &powers[i][(r, c)];
                if coef.is_zero() {
                    continue;
                }
                let e = &mut entries[r][c];
                if e.len() < bi.len() {
                    e.resize(bi.len(), BigInt::zero());
                }
                for (j, x) in bi.iter().enumerate() {
                    e[j] += coef * x;
                }
            }
        }
    }
    entries
}

fn isolate_real_root(sqf: &[BigInt], lambda: Complex<f64>) -> Option<RatInterval> {
    if lambda.im.abs() > 1e-6 * lambda.norm().max(1.0) {
        return None;
    }
    let chain = poly::sturm_chain(sqf);
    let center = rat_from_f64(lambda.re);
    let mut delta = BigRational::new(BigInt::one(), BigInt::from(1u64 << 20));
    for _ in 0..80 {
        let a = &center - &delta;
        let b = &center + &delta;
        match poly::sturm_count(&chain, &a, &b) {
            1 => return Some(RatInterval::new(a, b)),
            0 => delta = delta * BigRational::from_integer(BigInt::from(2)),
            _ => delta = delta / BigRational::from_integer(BigInt::from(2)),
        }
        if delta > BigRational::one() {
            return None;
        }
    }
    None
}

/// Halves the isolating interval `steps` times.
fn bisect(sqf: &[BigInt], iv: &RatInterval, steps: usize) -> RatInterval {
    let mut lo = iv.lo.clone();
    let mut hi = iv.hi.clone();
    let sign = |x: &BigRational| poly::eval_rat(sqf, x).signum();
    let s_lo = sign(&lo);
    if s_lo.is_zero() {
        return RatInterval::point(lo);
    }
    for _ in 0..steps {
        let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
        let s = sign(&mid);
        if s.is_zero() {
            return RatInterval::point(mid);
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    RatInterval::new(lo, hi)
}

fn real_contracting_vector(
    sqf: &[BigInt],
    column_polys: &[Vec<IntPoly>],
    iv: RatInterval,
    lambda: Complex<f64>,
    precision: &BigRational,
) -> Result<ContractingVector> {
    let k = column_polys.len();
    // pick the column with the largest numerical norm
    let col = (0..k)
        .max_by(|&a, &b| {
            let na = (0..k)
                .map(|r| poly::eval_f64(&column_polys[r][a], lambda.re).abs())
                .fold(0.0, f64::max);
            let nb = (0..k)
                .map(|r| poly::eval_f64(&column_polys[r][b], lambda.re).abs())
                .fold(0.0, f64::max);
            na.partial_cmp(&nb).unwrap_or(std::cmp::Ordering::Equal).then(b.cmp(&a))
        })
        .unwrap_or(0);
    let mut iv = iv;
    for _round in 0..64 {
        let w: Vec<RatInterval> = (0..k).map(|r| eval_poly(&column_polys[r][col], &iv)).collect();
        let j_star = (0..k)
            .max_by(|&a, &b| {
                let ma = w[a].mid().abs();
                let mb = w[b].mid().abs();
                ma.cmp(&mb).then(b.cmp(&a))
            })
            .unwrap_or(0);
        if let Some(mut v) = normalise(&w, j_star) {
            let first_nonzero = v.iter().position(|x| !x.contains_zero());
            if let Some(f) = first_nonzero {
                if v[f].hi.is_negative() {
                    v = v.into_iter().map(|x| -x).collect();
                }
                let errbound = v.iter().map(|x| x.radius()).max().unwrap_or_default();
                if &errbound <= precision {
                    return Ok(ContractingVector {
                        center: v.iter().map(RatInterval::mid).collect(),
                        errbound,
                        eigenvalue: lambda,
                        eigenvalue_interval: Some(iv),
                        rigorous: true,
                    });
                }
            }
        }
        iv = bisect(sqf, &iv, 24);
    }
    Err(Error::InsufficientPrecision)
}

fn normalise(w: &[RatInterval], j_star: usize) -> Option<Vec<RatInterval>> {
    let pivot = &w[j_star];
    let mut out = Vec::with_capacity(w.len());
    for (j, x) in w.iter().enumerate() {
        if j == j_star {
            out.push(RatInterval::point(BigRational::one()));
        } else {
            out.push(x.div(pivot)?);
        }
    }
    Some(out)
}

fn complex_contracting_vector(
    mu: &[BigInt],
    column_polys: &[Vec<IntPoly>],
    lambda: Complex<f64>,
    precision: &BigRational,
) -> Result<ContractingVector> {
    let k = column_polys.len();
    let d = poly::degree(mu) as f64;
    let dmu = poly::derivative(mu);
    let p = poly::eval_complex(mu, lambda);
    let dp = poly::eval_complex(&dmu, lambda);
    let incl = if dp.norm() > 0.0 {
        d * p.norm() / dp.norm()
    } else {
        f64::INFINITY
    };
    let eval = |poly_: &IntPoly| poly::eval_complex(poly_, lambda);
    let deriv = |poly_: &IntPoly| poly::eval_complex(&poly::derivative(poly_), lambda);
    let col = (0..k)
        .max_by(|&a, &b| {
            let na = (0..k).map(|r| eval(&column_polys[r][a]).norm()).fold(0.0, f64::max);
            let nb = (0..k).map(|r| eval(&column_polys[r][b]).norm()).fold(0.0, f64::max);
            na.partial_cmp(&nb).unwrap_or(std::cmp::Ordering::Equal).then(b.cmp(&a))
        })
        .unwrap_or(0);
    let w: Vec<Complex<f64>> = (0..k).map(|r| eval(&column_polys[r][col])).collect();
    let dw: f64 = (0..k)
        .map(|r| deriv(&column_polys[r][col]).norm())
        .fold(0.0, f64::max);
    let j_star = (0..k)
        .max_by(|&a, &b| w[a].norm().partial_cmp(&w[b].norm()).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or(0);
    let pivot = w[j_star];
    let mut v: Vec<f64> = w.iter().map(|z| (z / pivot).re).collect();
    v[j_star] = 1.0;
    if let Some(f) = v.iter().position(|x| x.abs() > 1e-12) {
        if v[f] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    let err = 4.0 * dw * incl / pivot.norm() + 1e-12;
    let errbound = rat_from_f64(err);
    if !err.is_finite() || &errbound > precision {
        return Err(Error::InsufficientPrecision);
    }
    Ok(ContractingVector {
        center: v.into_iter().map(rat_from_f64).collect(),
        errbound,
        eigenvalue: lambda,
        eigenvalue_interval: None,
        rigorous: false,
    })
}

/// Numerical splitting `R^k = S (+) T` into the sums of generalized
/// eigenspaces whose eigenvalues do / do not satisfy a modulus predicate.
#[derive(Debug, Clone)]
pub struct Eigenframe {
    /// Dimension of `S`.
    pub dim_s: usize,
    /// Columns: basis of `S` followed by basis of `T`.
    pub basis: DMatrix<f64>,
    /// Inverse of `basis`: maps a vector to its `(S, T)` coordinates.
    pub coords: DMatrix<f64>,
}

impl Eigenframe {
    /// `S` = eigenvalues with `|lambda| < 1`.
    pub fn contracting(phi: &IntMatrix) -> Option<Self> {
        Self::split(phi, |m| m < 1.0 - 1e-9)
    }

    /// `S` = eigenvalues with `|lambda| > 1`.
    pub fn expanding(phi: &IntMatrix) -> Option<Self> {
        Self::split(phi, |m| m > 1.0 + 1e-9)
    }

    fn split(phi: &IntMatrix, in_s: impl Fn(f64) -> bool) -> Option<Self> {
        let k = phi.dim();
        let roots = poly::numeric_roots(&phi.charpoly());
        let (s_roots, t_roots): (Vec<_>, Vec<_>) = roots.into_iter().partition(|z| in_s(z.norm()));
        let a = DMatrix::from_row_slice(
            k,
            k,
            &phi.to_f64_rows().into_iter().flatten().collect::<Vec<f64>>(),
        );
        // S = column space of prod_{t in T} (A - t), and vice versa
        let s_basis = column_space(&poly_at(&a, &t_roots), s_roots.len())?;
        let t_basis = column_space(&poly_at(&a, &s_roots), t_roots.len())?;
        let mut basis = DMatrix::<f64>::zeros(k, k);
        for j in 0..s_roots.len() {
            basis.set_column(j, &s_basis.column(j));
        }
        for j in 0..t_roots.len() {
            basis.set_column(s_roots.len() + j, &t_basis.column(j));
        }
        let coords = basis.clone().try_inverse()?;
        Some(Eigenframe {
            dim_s: s_roots.len(),
            basis,
            coords,
        })
    }

    /// `(S, T)` coordinates of an integer vector.
    pub fn split_coords(&self, v: &[f64]) -> DVector<f64> {
        &self.coords * DVector::from_column_slice(v)
    }

    /// The `S`-component of `v` in ambient coordinates.
    pub fn project_s(&self, v: &[f64]) -> Vec<f64> {
        let c = self.split_coords(v);
        let mut out = vec![0.0; v.len()];
        for j in 0..self.dim_s {
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.basis[(i, j)] * c[j];
            }
        }
        out
    }

    /// Sup norm of the `T`-coordinates of `v`.
    pub fn t_size(&self, v: &[f64]) -> f64 {
        let c = self.split_coords(v);
        (self.dim_s..v.len()).map(|j| c[j].abs()).fold(0.0, f64::max)
    }
}

fn poly_at(a: &DMatrix<f64>, roots: &[Complex<f64>]) -> DMatrix<f64> {
    let k = a.nrows();
    let ac = a.map(|x| Complex::new(x, 0.0));
    let mut acc = DMatrix::<Complex<f64>>::identity(k, k);
    for r in roots {
        let shifted = &ac - DMatrix::<Complex<f64>>::identity(k, k) * *r;
        acc = acc * shifted;
        // rescale to keep the magnitude sane; only the column space matters
        let m = acc.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if m > 0.0 {
            acc /= Complex::new(m, 0.0);
        }
    }
    acc.map(|z| z.re)
}

fn column_space(m: &DMatrix<f64>, rank: usize) -> Option<DMatrix<f64>> {
    let k = m.nrows();
    if rank == 0 {
        return Some(DMatrix::zeros(k, 0));
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut out = DMatrix::<f64>::zeros(k, rank);
    for (j, &idx) in order.iter().take(rank).enumerate() {
        out.set_column(j, &u.column(idx));
    }
    Some(out)
}
