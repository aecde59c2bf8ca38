//! The group `Z^k x|_phi Z` in normal form `(vec, shift)`.
//!
//! The product law is `(v, s)(w, t) = (v + phi^s w, s + t)`; powers of `phi`
//! are exact and memoized per spec.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// A group element `(vec, shift)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    pub vec: Vec<BigInt>,
    pub shift: BigInt,
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "((")?;
        for (i, x) in self.vec.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "),{})", self.shift)
    }
}

impl Element {
    pub fn new(vec: Vec<BigInt>, shift: BigInt) -> Self {
        Element { vec, shift }
    }

    pub fn from_i64(vec: &[i64], shift: i64) -> Self {
        Element {
            vec: vec.iter().map(|&x| BigInt::from(x)).collect(),
            shift: BigInt::from(shift),
        }
    }

    pub fn identity(k: usize) -> Self {
        Element {
            vec: vec![BigInt::zero(); k],
            shift: BigInt::zero(),
        }
    }

    /// The element `(v, 0)` of the normal subgroup `Z^k`.
    pub fn translation(vec: Vec<BigInt>) -> Self {
        Element {
            vec,
            shift: BigInt::zero(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.shift.is_zero() && self.vec.iter().all(Zero::is_zero)
    }

    pub fn sup_norm(&self) -> BigInt {
        self.vec.iter().map(|x| x.abs()).max().unwrap_or_default()
    }
}

/// A word in the generators of a [`GroupSpec`]: indices into its generator list.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Default)]
struct PowerCache {
    table: RwLock<HashMap<i64, Arc<IntMatrix>>>,
}

/// Rank, automorphism and generating set of `Z^k x|_phi Z`.
#[derive(Clone)]
pub struct GroupSpec {
    k: usize,
    phi: IntMatrix,
    phi_inv: IntMatrix,
    generators: Vec<Element>,
    inverse_index: Vec<usize>,
    default_generators: bool,
    powers: Arc<PowerCache>,
}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupSpec")
            .field("k", &self.k)
            .field("phi", &self.phi)
            .field("generators", &self.generators)
            .finish()
    }
}

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        self.phi == other.phi && self.generators == other.generators
    }
}

/// The default symmetric generating set `e_1, e_1^-1, ..., e_k, e_k^-1, t, t^-1`.
pub fn default_generators(k: usize) -> Vec<Element> {
    let mut gens = Vec::with_capacity(2 * k + 2);
    for i in 0..k {
        for sign in [1i64, -1] {
            let mut v = vec![BigInt::zero(); k];
            v[i] = BigInt::from(sign);
            gens.push(Element::translation(v));
        }
    }
    gens.push(Element::new(vec![BigInt::zero(); k], BigInt::one()));
    gens.push(Element::new(vec![BigInt::zero(); k], -BigInt::one()));
    gens
}

impl GroupSpec {
    /// Spec with the default generators.
    pub fn new(phi: IntMatrix) -> Result<Self> {
        let k = phi.dim();
        Self::build(phi, default_generators(k), true)
    }

    /// Spec with an explicit generator list, which must be closed under inverses.
    pub fn with_generators(phi: IntMatrix, generators: Vec<Element>) -> Result<Self> {
        let is_default = generators == default_generators(phi.dim());
        Self::build(phi, generators, is_default)
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::new(IntMatrix::from_i64(rows)?)
    }

    fn build(phi: IntMatrix, generators: Vec<Element>, default_generators: bool) -> Result<Self> {
        let k = phi.dim();
        let phi_inv = phi.inverse_unimodular()?;
        if generators.is_empty() {
            return Err(Error::Invalid("empty generator list".into()));
        }
        for g in &generators {
            if g.vec.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    found: g.vec.len(),
                });
            }
        }
        let mut spec = GroupSpec {
            k,
            phi,
            phi_inv,
            generators,
            inverse_index: Vec::new(),
            default_generators,
            powers: Arc::new(PowerCache::default()),
        };
        let mut inverse_index = Vec::with_capacity(spec.generators.len());
        for (i, g) in spec.generators.iter().enumerate() {
            let inv = spec.invert(g)?;
            let j = spec
                .generators
                .iter()
                .position(|h| *h == inv)
                .ok_or(Error::AsymmetricGenerators { index: i })?;
            inverse_index.push(j);
        }
        spec.inverse_index = inverse_index;
        Ok(spec)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn phi(&self) -> &IntMatrix {
        &self.phi
    }

    pub fn phi_inv(&self) -> &IntMatrix {
        &self.phi_inv
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn has_default_generators(&self) -> bool {
        self.default_generators
    }

    /// Index of the inverse of generator `i`.
    pub fn inverse_of(&self, i: usize) -> usize {
        self.inverse_index[i]
    }

    pub fn identity(&self) -> Element {
        Element::identity(self.k)
    }

    fn check(&self, g: &Element) -> Result<()> {
        if g.vec.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                found: g.vec.len(),
            });
        }
        Ok(())
    }

    /// `phi^r`, exact and memoized.
    pub fn phi_power(&self, r: i64) -> Arc<IntMatrix> {
        if let Some(m) = self.powers.table.read().ok().and_then(|t| t.get(&r).cloned()) {
            return m;
        }
        let m = Arc::new(matrix_power_with_inverse(&self.phi, &self.phi_inv, r));
        if let Ok(mut t) = self.powers.table.write() {
            t.entry(r).or_insert_with(|| m.clone());
        }
        m
    }

    fn phi_power_big(&self, r: &BigInt) -> Result<Arc<IntMatrix>> {
        let r = r
            .to_i64()
            .ok_or_else(|| Error::Invalid(format!("shift {r} too large")))?;
        Ok(self.phi_power(r))
    }

    /// `phi^r v`.
    pub fn act(&self, r: i64, v: &[BigInt]) -> Vec<BigInt> {
        match r {
            0 => v.to_vec(),
            1 => self.phi.mul_vec(v),
            -1 => self.phi_inv.mul_vec(v),
            _ => self.phi_power(r).mul_vec(v),
        }
    }

    pub fn multiply(&self, g: &Element, h: &Element) -> Result<Element> {
        self.check(g)?;
        self.check(h)?;
        let moved = if g.shift.is_zero() {
            h.vec.clone()
        } else {
            self.phi_power_big(&g.shift)?.mul_vec(&h.vec)
        };
        Ok(Element {
            vec: g.vec.iter().zip(moved).map(|(a, b)| a + b).collect(),
            shift: &g.shift + &h.shift,
        })
    }

    pub fn invert(&self, g: &Element) -> Result<Element> {
        self.check(g)?;
        let neg_shift = -&g.shift;
        let moved = if g.shift.is_zero() {
            g.vec.clone()
        } else {
            self.phi_power_big(&neg_shift)?.mul_vec(&g.vec)
        };
        Ok(Element {
            vec: moved.into_iter().map(|x| -x).collect(),
            shift: neg_shift,
        })
    }

    /// `g x g^-1 = (g.vec + phi^{g.shift} x.vec - phi^{x.shift} g.vec, x.shift)`.
    pub fn conjugate(&self, x: &Element, g: &Element) -> Result<Element> {
        self.check(x)?;
        self.check(g)?;
        let a = if g.shift.is_zero() {
            x.vec.clone()
        } else {
            self.phi_power_big(&g.shift)?.mul_vec(&x.vec)
        };
        let b = if x.shift.is_zero() {
            g.vec.clone()
        } else {
            self.phi_power_big(&x.shift)?.mul_vec(&g.vec)
        };
        let vec = g
            .vec
            .iter()
            .zip(a)
            .zip(b)
            .map(|((gv, av), bv)| gv + av - bv)
            .collect();
        Ok(Element {
            vec,
            shift: x.shift.clone(),
        })
    }

    /// Left-to-right product of the generators named by `w`.
    pub fn evaluate_word(&self, w: &Word) -> Result<Element> {
        let n = self.generators.len();
        let mut acc = self.identity();
        for &i in &w.0 {
            let g = self
                .generators
                .get(i)
                .ok_or(Error::IndexOutOfRange { index: i, len: n })?;
            acc = self.multiply(&acc, g)?;
        }
        Ok(acc)
    }

    /// `g^n` by repeated squaring (`n` may be negative).
    pub fn power(&self, g: &Element, n: i64) -> Result<Element> {
        let mut base = if n < 0 { self.invert(g)? } else { g.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.multiply(&acc, &base)?;
            }
            base = self.multiply(&base, &base)?;
            e >>= 1;
        }
        Ok(acc)
    }
}

/// Exact `phi^r`; negative `r` requires `|det phi| = 1`.
pub fn matrix_power(phi: &IntMatrix, r: i64) -> Result<IntMatrix> {
    if r >= 0 {
        return Ok(pow_nonneg(phi, r as u64));
    }
    let inv = phi.inverse_unimodular()?;
    Ok(pow_nonneg(&inv, r.unsigned_abs()))
}

fn matrix_power_with_inverse(phi: &IntMatrix, phi_inv: &IntMatrix, r: i64) -> IntMatrix {
    if r >= 0 {
        pow_nonneg(phi, r as u64)
    } else {
        pow_nonneg(phi_inv, r.unsigned_abs())
    }
}

fn pow_nonneg(m: &IntMatrix, mut e: u64) -> IntMatrix {
    let mut acc = IntMatrix::identity(m.dim());
    let mut base = m.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base);
        }
        e >>= 1;
        if e > 0 {
            base = base.mul(&base);
        }
    }
    acc
}
