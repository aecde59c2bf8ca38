//! Conjugacy growth of a finite-index subgroup `H = L x|_{phi^e} (e Z)`
//! against the ambient group: `gamma_H^c(n) <= (m + 1) gamma_G^c(kconst n)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ball::BallOptions;
use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};
use crate::matrix::IntMatrix;
use crate::norm::{word_norm, Norm};

use super::conjugacy_growth;

/// `H = L x|_{phi^e} (e Z)` inside `G`, with `L` spanned by the columns of `basis`.
#[derive(Debug, Clone)]
pub struct FiniteIndexEmbedding {
    pub ambient: GroupSpec,
    pub basis: IntMatrix,
    pub e: u64,
    /// Generators of `H`, as elements of `G`.
    pub generators: Vec<Element>,
    /// `[G : H] = e |det basis|`.
    pub index: BigInt,
    /// `max |t|_G` over the generators.
    pub kconst: usize,
    /// `basis^-1 phi^e basis` with the generators in `L`-coordinates.
    rebased: GroupSpec,
}

impl FiniteIndexEmbedding {
    /// Default generators are `(b_j, 0)^{+-1}` for the basis columns and
    /// `(0, e)^{+-1}`. `cap` bounds the word-norm search for `kconst`.
    pub fn new(
        ambient: &GroupSpec,
        basis: IntMatrix,
        e: u64,
        generators: Option<Vec<Element>>,
        cap: usize,
    ) -> Result<Self> {
        let k = ambient.k();
        if basis.dim() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: basis.dim(),
            });
        }
        if e == 0 {
            return Err(Error::Invalid("shift modulus e must be at least 1".into()));
        }
        let det = basis.det();
        if det.is_zero() {
            return Err(Error::Invalid("sublattice basis is singular".into()));
        }
        let e_i64 = i64::try_from(e).map_err(|_| Error::Invalid("e too large".into()))?;
        let psi = rebase(&basis, &ambient.phi_power(e_i64))?;
        // phi(L) = L
        rebase(&basis, ambient.phi())?;
        let generators = generators.unwrap_or_else(|| {
            let mut gens = Vec::with_capacity(2 * k + 2);
            for j in 0..k {
                let col = basis.column(j);
                gens.push(Element::translation(col.clone()));
                gens.push(Element::translation(col.into_iter().map(|x| -x).collect()));
            }
            gens.push(Element::new(vec![BigInt::zero(); k], BigInt::from(e)));
            gens.push(Element::new(vec![BigInt::zero(); k], -BigInt::from(e)));
            gens
        });
        let mut local = Vec::with_capacity(generators.len());
        for g in &generators {
            local.push(to_local(&basis, e, g)?);
        }
        let rebased = GroupSpec::with_generators(psi, local)?;
        let opts = BallOptions::default();
        let mut kconst = 1;
        for g in &generators {
            match word_norm(ambient, g, cap, &opts)? {
                Norm::Exact(n) => kconst = kconst.max(n),
                Norm::Unknown { lower_bound } => {
                    return Err(Error::LimitExceeded {
                        last_completed_radius: lower_bound - 1,
                        reason: format!("generator {g:?} is longer than the norm cap"),
                    })
                }
            }
        }
        Ok(FiniteIndexEmbedding {
            ambient: ambient.clone(),
            index: det.abs() * BigInt::from(e),
            basis,
            e,
            generators,
            kconst,
            rebased,
        })
    }

    /// `H` as a standalone group.
    pub fn rebased(&self) -> &GroupSpec {
        &self.rebased
    }
}

/// `B^-1 M B`, which must be an integer matrix.
fn rebase(basis: &IntMatrix, m: &IntMatrix) -> Result<IntMatrix> {
    let inv = basis.inverse_rational().ok_or(Error::NotInvariant)?;
    let mb = m.mul(basis);
    let k = basis.dim();
    let mut rows = Vec::with_capacity(k);
    for i in 0..k {
        let mut row = Vec::with_capacity(k);
        for j in 0..k {
            let mut acc = num_rational::BigRational::zero();
            for l in 0..k {
                acc += &inv[i][l] * num_rational::BigRational::from_integer(mb[(l, j)].clone());
            }
            if !acc.is_integer() {
                return Err(Error::NotInvariant);
            }
            row.push(acc.to_integer());
        }
        rows.push(row);
    }
    IntMatrix::from_rows(rows)
}

fn to_local(basis: &IntMatrix, e: u64, g: &Element) -> Result<Element> {
    let inv = basis.inverse_rational().ok_or(Error::NotInvariant)?;
    let k = basis.dim();
    let mut vec = Vec::with_capacity(k);
    for row in inv.iter().take(k) {
        let mut acc = num_rational::BigRational::zero();
        for (a, x) in row.iter().zip(&g.vec) {
            acc += a * num_rational::BigRational::from_integer(x.clone());
        }
        if !acc.is_integer() {
            return Err(Error::Invalid(format!("generator {g:?} is not in H")));
        }
        vec.push(acc.to_integer());
    }
    let (shift, rem) = g.shift.div_rem(&BigInt::from(e));
    if !rem.is_zero() {
        return Err(Error::Invalid(format!("generator {g:?} is not in H")));
    }
    Ok(Element::new(vec, shift))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma1Row {
    pub n: usize,
    pub gamma_h: u64,
    /// Radius at which `gamma_G^c` was read: `kconst n`, or less if the
    /// ambient table was truncated (then a lower bound for the true value).
    pub g_radius: usize,
    pub gamma_g: u64,
    /// `(m + 1) gamma_g`.
    pub bound: BigInt,
    pub holds: bool,
    /// False when `gamma_g` was read below `kconst n`.
    pub g_exact: bool,
}

#[derive(Debug, Clone)]
pub struct Lemma1Report {
    pub index: BigInt,
    pub kconst: usize,
    pub rows: Vec<Lemma1Row>,
    /// Every row holds.
    pub holds: bool,
    pub h_radius: usize,
    pub g_radius: usize,
}

/// Checks `gamma_H^c(n) <= (m + 1) gamma_G^c(kconst n)` for `n = 0..=radius`.
/// If the ambient table is truncated, the largest completed value is used as a
/// lower bound for `gamma_G^c(kconst n)`, so a passing row is still a proof.
pub fn finite_index_comparison(
    emb: &FiniteIndexEmbedding,
    radius: usize,
    opts: &BallOptions,
) -> Result<Lemma1Report> {
    let h = conjugacy_growth(&emb.rebased, radius, opts)?;
    let g = conjugacy_growth(&emb.ambient, emb.kconst * radius, opts)?;
    let factor = &emb.index + BigInt::one();
    let mut rows = Vec::new();
    for n in 0..h.conj_classes.len() {
        let want = emb.kconst * n;
        let at = want.min(g.radius());
        let gamma_g = g.conj_classes[at];
        let bound = &factor * BigInt::from(gamma_g);
        let gamma_h = h.conj_classes[n];
        rows.push(Lemma1Row {
            n,
            gamma_h,
            g_radius: at,
            gamma_g,
            holds: BigInt::from(gamma_h) <= bound,
            bound,
            g_exact: at == want,
        });
    }
    let complete = h.truncated.is_none();
    Ok(Lemma1Report {
        index: emb.index.clone(),
        kconst: emb.kconst,
        holds: complete && rows.iter().all(|r| r.holds),
        rows,
        h_radius: h.radius(),
        g_radius: g.radius(),
    })
}

impl Lemma1Report {
    pub fn index_u64(&self) -> Option<u64> {
        self.index.to_u64()
    }
}
