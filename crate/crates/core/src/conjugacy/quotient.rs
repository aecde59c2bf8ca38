//! The finite-orbit quotient `Z^k / (I - phi^s) Z^k` for a nonzero shift `s`.
//!
//! With `U (I - phi^s) V = D` in Smith form, a vector `v` has coset
//! coordinates `y = U v`, reduced modulo `d_i` where `d_i > 0` and kept
//! exact where `d_i = 0`. `phi` acts on them as `A = U phi U^-1`, and since
//! `phi^s` is trivial on the quotient every orbit has length dividing `|s|`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::matrix::IntMatrix;

pub(crate) struct Quotient {
    shift: i64,
    u: IntMatrix,
    v: IntMatrix,
    diag: Vec<BigInt>,
    action: IntMatrix,
    small: Option<SmallAction>,
}

/// `A` with rows reduced modulo `d_i`, for quotients where every `d_i` is
/// positive and small enough for `i128` products.
struct SmallAction {
    k: usize,
    diag: Vec<i128>,
    rows: Vec<i128>,
}

const SMALL_LIMIT: i64 = 1 << 40;

impl Quotient {
    pub(crate) fn new(spec: &GroupSpec, shift: i64) -> Result<Self> {
        debug_assert!(shift != 0);
        let k = spec.k();
        let m = IntMatrix::identity(k).sub(&spec.phi_power(shift));
        let snf = m.smith_normal_form();
        let u_inv = snf.u.inverse_unimodular()?;
        let action = snf.u.mul(spec.phi()).mul(&u_inv);
        let small = if snf
            .diag
            .iter()
            .all(|d| d.is_positive() && d < &BigInt::from(SMALL_LIMIT))
        {
            let diag: Vec<i128> = snf.diag.iter().map(|d| d.to_i128().unwrap()).collect();
            let mut rows = Vec::with_capacity(k * k);
            for i in 0..k {
                for j in 0..k {
                    rows.push(action[(i, j)].mod_floor(&snf.diag[i]).to_i128().unwrap());
                }
            }
            Some(SmallAction { k, diag, rows })
        } else {
            None
        };
        Ok(Quotient {
            shift,
            u: snf.u,
            v: snf.v,
            diag: snf.diag,
            action,
            small,
        })
    }

    fn reduce(&self, mut y: Vec<BigInt>) -> Vec<BigInt> {
        for (x, d) in y.iter_mut().zip(&self.diag) {
            if !d.is_zero() {
                *x = x.mod_floor(d);
            }
        }
        y
    }

    /// Coset coordinates of `v`.
    pub(crate) fn coords(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.reduce(self.u.mul_vec(v))
    }

    fn apply(&self, y: &[BigInt]) -> Vec<BigInt> {
        self.reduce(self.action.mul_vec(y))
    }

    fn period(&self) -> u64 {
        self.shift.unsigned_abs()
    }

    /// Lexicographically least point of the orbit of `coords(v)`.
    pub(crate) fn canonical(&self, v: &[BigInt]) -> Vec<BigInt> {
        let y = self.coords(v);
        if let Some(s) = &self.small {
            let mut cur: Vec<i128> = y.iter().map(|x| x.to_i128().unwrap()).collect();
            let mut best = cur.clone();
            let mut next = vec![0i128; s.k];
            for _ in 1..self.period() {
                for (i, out) in next.iter_mut().enumerate() {
                    let row = &s.rows[i * s.k..(i + 1) * s.k];
                    let acc: i128 = row.iter().zip(&cur).map(|(a, b)| a * b).sum();
                    *out = acc.rem_euclid(s.diag[i]);
                }
                std::mem::swap(&mut cur, &mut next);
                if cur < best {
                    best.clone_from(&cur);
                }
            }
            return best.into_iter().map(BigInt::from).collect();
        }
        let mut cur = y;
        let mut best = cur.clone();
        for _ in 1..self.period() {
            cur = self.apply(&cur);
            if cur < best {
                best.clone_from(&cur);
            }
        }
        best
    }

    /// Smallest `0 <= r < |s|` with `A^r coords(v) = coords(w)`.
    pub(crate) fn orbit_exponent(&self, v: &[BigInt], w: &[BigInt]) -> Option<i64> {
        let target = self.coords(w);
        let mut cur = self.coords(v);
        for r in 0..self.period() {
            if cur == target {
                return Some(r as i64);
            }
            cur = self.apply(&cur);
        }
        None
    }

    /// Some `u` with `(I - phi^s) u = b`, if one exists.
    pub(crate) fn solve(&self, b: &[BigInt]) -> Result<Vec<BigInt>> {
        let ub = self.u.mul_vec(b);
        let mut z = Vec::with_capacity(ub.len());
        for (x, d) in ub.iter().zip(&self.diag) {
            if d.is_zero() {
                if !x.is_zero() {
                    return Err(Error::Internal("vector outside the image lattice".into()));
                }
                z.push(BigInt::zero());
            } else {
                let (q, r) = x.div_rem(d);
                if !r.is_zero() {
                    return Err(Error::Internal("vector outside the image lattice".into()));
                }
                z.push(q);
            }
        }
        Ok(self.v.mul_vec(&z))
    }

    #[cfg(test)]
    pub(crate) fn invariant_factors(&self) -> &[BigInt] {
        &self.diag
    }
}
