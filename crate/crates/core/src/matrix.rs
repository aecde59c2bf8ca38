//! Exact square integer matrices over arbitrary-precision integers.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A `k x k` integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    k: usize,
    entries: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.k {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.k {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.k + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.k + j]
    }
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return Err(Error::NotSquare);
        }
        let mut entries = Vec::with_capacity(k * k);
        for row in rows {
            if row.len() != k {
                return Err(Error::NotSquare);
            }
            entries.extend(row);
        }
        Ok(IntMatrix { k, entries })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn identity(k: usize) -> Self {
        let mut m = Self::zero(k);
        for i in 0..k {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn zero(k: usize) -> Self {
        IntMatrix {
            k,
            entries: vec![BigInt::zero(); k * k],
        }
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries.chunks(self.k).map(|r| r.to_vec()).collect()
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.k..(i + 1) * self.k]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.k).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_identity(&self) -> bool {
        (0..self.k).all(|i| {
            (0..self.k).all(|j| {
                let e = &self[(i, j)];
                if i == j {
                    e.is_one()
                } else {
                    e.is_zero()
                }
            })
        })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let k = self.k;
        let mut out = IntMatrix::zero(k);
        for i in 0..k {
            for l in 0..k {
                let a = &self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..k {
                    let b = &other[(l, j)];
                    if !b.is_zero() {
                        out.entries[i * k + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        (0..self.k)
            .map(|i| {
                let mut acc = BigInt::zero();
                for (a, x) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        IntMatrix {
            k: self.k,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        IntMatrix {
            k: self.k,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> IntMatrix {
        IntMatrix {
            k: self.k,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn trace(&self) -> BigInt {
        (0..self.k).map(|i| self[(i, i)].clone()).sum()
    }

    /// Largest absolute row sum, the operator norm induced by the sup norm.
    pub fn norm_inf(&self) -> BigInt {
        (0..self.k)
            .map(|i| self.row(i).iter().map(|a| a.abs()).sum::<BigInt>())
            .max()
            .unwrap_or_default()
    }

    /// Largest absolute column sum, the operator norm induced by the l1 norm.
    pub fn norm_one(&self) -> BigInt {
        (0..self.k)
            .map(|j| (0..self.k).map(|i| self[(i, j)].abs()).sum::<BigInt>())
            .max()
            .unwrap_or_default()
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.entries.iter().map(|a| a.abs()).max().unwrap_or_default()
    }

    /// Determinant via fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        let k = self.k;
        let mut a = self.entries.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for p in 0..k {
            if a[p * k + p].is_zero() {
                let Some(r) = (p + 1..k).find(|&r| !a[r * k + p].is_zero()) else {
                    return BigInt::zero();
                };
                for j in 0..k {
                    a.swap(p * k + j, r * k + j);
                }
                sign = -sign;
            }
            for i in p + 1..k {
                for j in p + 1..k {
                    let v = &a[i * k + j] * &a[p * k + p] - &a[i * k + p] * &a[p * k + j];
                    a[i * k + j] = v / &prev;
                }
            }
            prev = a[p * k + p].clone();
        }
        sign * prev
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zero(self.k);
        for i in 0..self.k {
            for j in 0..self.k {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Exact inverse over the rationals, `None` if singular.
    pub fn inverse_rational(&self) -> Option<Vec<Vec<BigRational>>> {
        let rows: Vec<Vec<BigRational>> = self
            .rows()
            .into_iter()
            .map(|r| r.into_iter().map(BigRational::from_integer).collect())
            .collect();
        rat_inverse(&rows)
    }

    /// Inverse of a matrix with determinant `+-1`.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix> {
        let det = self.det();
        if det.abs() != BigInt::one() {
            return Err(Error::NotUnimodular {
                det: det.to_string(),
            });
        }
        let inv = self.inverse_rational().ok_or(Error::NotUnimodular {
            det: det.to_string(),
        })?;
        let rows = inv
            .into_iter()
            .map(|r| r.into_iter().map(|x| x.to_integer()).collect())
            .collect();
        IntMatrix::from_rows(rows)
    }

    /// Characteristic polynomial `det(xI - A)`, coefficients low to high (monic).
    ///
    /// Faddeev-LeVerrier; every division is exact over the integers.
    pub fn charpoly(&self) -> Vec<BigInt> {
        let k = self.k;
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = BigInt::one();
        let ident = IntMatrix::identity(k);
        let mut m = IntMatrix::zero(k);
        for step in 1..=k {
            // M_step = A * M_{step-1} + c_{k-step+1} I
            m = self.mul(&m).add(&ident.scale(&coeffs[k - step + 1]));
            let am = self.mul(&m);
            let c = -(am.trace()) / BigInt::from(step);
            coeffs[k - step] = c;
        }
        coeffs
    }

    /// Minimal polynomial (monic, low to high) found from the first linear
    /// dependency among `I, A, A^2, ...`.
    pub fn minpoly(&self) -> Vec<BigInt> {
        let k = self.k;
        let mut powers: Vec<Vec<BigRational>> = Vec::new();
        let mut cur = IntMatrix::identity(k);
        for _ in 0..=k {
            let flat: Vec<BigRational> = cur
                .entries
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect();
            if let Some(comb) = rat_express(&powers, &flat) {
                // A^d = sum comb_i A^i  =>  x^d - sum comb_i x^i
                let mut poly: Vec<BigRational> = comb.into_iter().map(|c| -c).collect();
                poly.push(BigRational::one());
                return poly.into_iter().map(|c| c.to_integer()).collect();
            }
            powers.push(flat);
            cur = cur.mul(self);
        }
        self.charpoly()
    }

    /// Smith normal form `U * self * V = D` with `U, V` unimodular.
    pub fn smith_normal_form(&self) -> Snf {
        smith(self)
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.rows()
            .into_iter()
            .map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }

    /// Entries as `i64` if they all fit.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.entries.iter().map(|x| x.to_i64()).collect()
    }
}

/// Result of a Smith normal form computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snf {
    pub u: IntMatrix,
    pub v: IntMatrix,
    /// Diagonal of `D`, non-negative, each dividing the next (zeros last).
    pub diag: Vec<BigInt>,
}

impl Snf {
    pub fn d_matrix(&self) -> IntMatrix {
        let mut d = IntMatrix::zero(self.diag.len());
        for (i, x) in self.diag.iter().enumerate() {
            d[(i, i)] = x.clone();
        }
        d
    }

    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|d| !d.is_zero()).count()
    }
}

fn smith(m: &IntMatrix) -> Snf {
    let k = m.k;
    let mut a = m.clone();
    let mut u = IntMatrix::identity(k);
    let mut v = IntMatrix::identity(k);

    let swap_rows = |x: &mut IntMatrix, i: usize, j: usize| {
        for c in 0..x.k {
            x.entries.swap(i * x.k + c, j * x.k + c);
        }
    };
    let swap_cols = |x: &mut IntMatrix, i: usize, j: usize| {
        for r in 0..x.k {
            x.entries.swap(r * x.k + i, r * x.k + j);
        }
    };
    // row_i -= q * row_j
    let row_axpy = |x: &mut IntMatrix, i: usize, j: usize, q: &BigInt| {
        for c in 0..x.k {
            let t = &x[(j, c)] * q;
            x[(i, c)] -= t;
        }
    };
    let col_axpy = |x: &mut IntMatrix, i: usize, j: usize, q: &BigInt| {
        for r in 0..x.k {
            let t = &x[(r, j)] * q;
            x[(r, i)] -= t;
        }
    };

    for t in 0..k {
        loop {
            // pivot: smallest nonzero |entry| in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..k {
                for j in t..k {
                    if a[(i, j)].is_zero() {
                        continue;
                    }
                    match best {
                        Some((bi, bj)) if a[(bi, bj)].abs() <= a[(i, j)].abs() => {}
                        _ => best = Some((i, j)),
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(a, u, v);
            };
            if pi != t {
                swap_rows(&mut a, pi, t);
                swap_rows(&mut u, pi, t);
            }
            if pj != t {
                swap_cols(&mut a, pj, t);
                swap_cols(&mut v, pj, t);
            }
            let mut clean = true;
            for i in t + 1..k {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = a[(i, t)].div_floor(&a[(t, t)]);
                row_axpy(&mut a, i, t, &q);
                row_axpy(&mut u, i, t, &q);
                if !a[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..k {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = a[(t, j)].div_floor(&a[(t, t)]);
                col_axpy(&mut a, j, t, &q);
                col_axpy(&mut v, j, t, &q);
                if !a[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the trailing block by the pivot
            let mut bad_row = None;
            'outer: for i in t + 1..k {
                for j in t + 1..k {
                    if !a[(i, j)].is_multiple_of(&a[(t, t)]) {
                        bad_row = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad_row {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    row_axpy(&mut a, t, i, &minus_one);
                    row_axpy(&mut u, t, i, &minus_one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            for c in 0..k {
                a[(t, c)] = -a[(t, c)].clone();
                u[(t, c)] = -u[(t, c)].clone();
            }
        }
    }
    finish(a, u, v)
}

fn finish(a: IntMatrix, u: IntMatrix, v: IntMatrix) -> Snf {
    let mut diag: Vec<BigInt> = (0..a.k).map(|i| a[(i, i)].clone()).collect();
    let mut u = u;
    for (i, d) in diag.iter_mut().enumerate() {
        if d.is_negative() {
            *d = -d.clone();
            for c in 0..u.k {
                u[(i, c)] = -u[(i, c)].clone();
            }
        }
    }
    Snf { u, v, diag }
}

/// Gauss-Jordan inverse over the rationals.
pub(crate) fn rat_inverse(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for j in 0..2 * n {
                    let t = &a[c][j] * &f;
                    a[r][j] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Expresses `target` as a rational combination of `basis` vectors, if possible.
pub(crate) fn rat_express(
    basis: &[Vec<BigRational>],
    target: &[BigRational],
) -> Option<Vec<BigRational>> {
    let d = basis.len();
    let n = target.len();
    if d == 0 {
        return target.iter().all(Zero::is_zero).then(Vec::new);
    }
    // augmented system: rows = coordinates, columns = basis vectors + target
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut r: Vec<BigRational> = basis.iter().map(|b| b[i].clone()).collect();
            r.push(target[i].clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..d {
        let Some(p) = (row..n).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][c].recip();
        for x in a[row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != row && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for j in 0..=d {
                    let t = &a[row][j] * &f;
                    a[r][j] -= t;
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    if (row..n).any(|r| !a[r][d].is_zero()) {
        return None;
    }
    let mut sol = vec![BigRational::zero(); d];
    for (r, &c) in pivots.iter().enumerate() {
        sol[c] = a[r][d].clone();
    }
    Some(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64(rows).unwrap()
    }

    #[test]
    fn det_and_inverse() {
        let phi = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(phi.det(), big(1));
        assert_eq!(phi.inverse_unimodular().unwrap(), m(&[&[1, -1], &[-1, 2]]));
        let sing = m(&[&[1, 2], &[2, 4]]);
        assert_eq!(sing.det(), big(0));
        assert!(sing.inverse_unimodular().is_err());
        let p3 = m(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 3]]);
        assert_eq!(p3.det(), big(1));
    }

    #[test]
    fn charpoly_examples() {
        let phi = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(phi.charpoly(), vec![big(1), big(-3), big(1)]);
        let heis = m(&[&[1, 1], &[0, 1]]);
        assert_eq!(heis.charpoly(), vec![big(1), big(-2), big(1)]);
        assert_eq!(heis.minpoly(), vec![big(1), big(-2), big(1)]);
        assert_eq!(IntMatrix::identity(3).minpoly(), vec![big(-1), big(1)]);
    }

    #[test]
    fn snf_examples() {
        let phi = m(&[&[2, 1], &[1, 1]]);
        let i_minus = IntMatrix::identity(2).sub(&phi);
        let snf = i_minus.smith_normal_form();
        assert_eq!(snf.diag, vec![big(1), big(1)]);
        assert_eq!(snf.u.mul(&i_minus).mul(&snf.v), snf.d_matrix());

        let zero = IntMatrix::zero(2);
        assert_eq!(zero.smith_normal_form().diag, vec![big(0), big(0)]);

        let heis = m(&[&[1, 1], &[0, 1]]);
        let h2 = heis.mul(&heis);
        let a = IntMatrix::identity(2).sub(&h2);
        assert_eq!(a, m(&[&[0, -2], &[0, 0]]));
        let snf = a.smith_normal_form();
        assert_eq!(snf.diag, vec![big(2), big(0)]);
        assert_eq!(snf.u.mul(&a).mul(&snf.v), snf.d_matrix());
    }

    #[test]
    fn snf_needs_divisibility_fix() {
        let a = m(&[&[2, 0], &[0, 3]]);
        let snf = a.smith_normal_form();
        assert_eq!(snf.diag, vec![big(1), big(6)]);
        assert_eq!(snf.u.mul(&a).mul(&snf.v), snf.d_matrix());
    }
}
