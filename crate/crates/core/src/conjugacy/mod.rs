//! Exact conjugacy decision, canonical class keys and conjugacy growth.
//!
//! `(v, s)` and `(w, s)` are conjugate iff `w in phi^r v + (I - phi^s) Z^k`
//! for some `r`. For `s != 0` this is an orbit question in the quotient
//! `Z^k / (I - phi^s) Z^k` (see [`quotient`]); for `s = 0` it is membership
//! in the `phi`-orbit of `v` (see [`orbit`]).

mod lemma1;
mod orbit;
mod quotient;

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::ball::{walk_spheres, BallOptions, Truncation};
use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};
use crate::par::Parallelism;
use crate::poly::IntPoly;

pub use lemma1::{finite_index_comparison, FiniteIndexEmbedding, Lemma1Report, Lemma1Row};
use orbit::{ClassCache, PolyClass};
use quotient::Quotient;

/// Which invariant identifies the class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KeyTag {
    /// Least point of the orbit in the coset coordinates of
    /// `Z^k / (I - phi^s) Z^k` (shift `s != 0`).
    FiniteQuotientOrbit(Vec<BigInt>),
    /// Minimal-norm orbit representative (shift 0).
    VectorOrbit(Vec<BigInt>),
}

/// Canonical fingerprint of a conjugacy class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConjClassKey {
    pub shift: BigInt,
    pub tag: KeyTag,
}

/// Memo tables for one spec: Smith forms per shift and orbit data per
/// minimal polynomial. Safe to share across threads; contents only affect
/// speed, never results.
pub struct ConjugacyContext {
    spec: GroupSpec,
    quotients: RwLock<HashMap<i64, Arc<Quotient>>>,
    classes: RwLock<HashMap<IntPoly, Arc<PolyClass>>>,
}

impl ClassCache for ConjugacyContext {
    fn class_of(&self, mu: &IntPoly) -> Result<Arc<PolyClass>> {
        if let Some(c) = self.classes.read().ok().and_then(|m| m.get(mu).cloned()) {
            return Ok(c);
        }
        let c = Arc::new(orbit::classify_poly(mu)?);
        if let Ok(mut m) = self.classes.write() {
            m.entry(mu.clone()).or_insert_with(|| c.clone());
        }
        Ok(c)
    }
}

fn shift_i64(s: &BigInt) -> Result<i64> {
    s.to_i64()
        .ok_or_else(|| Error::Invalid(format!("shift {s} too large")))
}

impl ConjugacyContext {
    pub fn new(spec: &GroupSpec) -> Self {
        ConjugacyContext {
            spec: spec.clone(),
            quotients: RwLock::new(HashMap::new()),
            classes: RwLock::new(HashMap::new()),
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    fn quotient(&self, s: i64) -> Result<Arc<Quotient>> {
        if let Some(q) = self.quotients.read().ok().and_then(|m| m.get(&s).cloned()) {
            return Ok(q);
        }
        let q = Arc::new(Quotient::new(&self.spec, s)?);
        if let Ok(mut m) = self.quotients.write() {
            m.entry(s).or_insert_with(|| q.clone());
        }
        Ok(q)
    }

    fn check(&self, g: &Element) -> Result<()> {
        if g.vec.len() != self.spec.k() {
            return Err(Error::DimensionMismatch {
                expected: self.spec.k(),
                found: g.vec.len(),
            });
        }
        Ok(())
    }

    pub fn canonical_key(&self, g: &Element) -> Result<ConjClassKey> {
        self.check(g)?;
        let tag = if g.shift.is_zero() {
            KeyTag::VectorOrbit(orbit::canonical(&self.spec, self, &g.vec)?)
        } else {
            let q = self.quotient(shift_i64(&g.shift)?)?;
            KeyTag::FiniteQuotientOrbit(q.canonical(&g.vec))
        };
        Ok(ConjClassKey {
            shift: g.shift.clone(),
            tag,
        })
    }

    /// A conjugator `x` with `x g x^-1 = h`, or `None` if `g` and `h` are
    /// not conjugate. Every returned conjugator has been rechecked.
    pub fn are_conjugate(&self, g: &Element, h: &Element) -> Result<Option<Element>> {
        self.check(g)?;
        self.check(h)?;
        if g.shift != h.shift {
            return Ok(None);
        }
        let k = self.spec.k();
        let conj = if g.shift.is_zero() {
            match orbit::exponent(&self.spec, self, &g.vec, &h.vec)? {
                None => return Ok(None),
                Some(r) => Element::new(vec![BigInt::zero(); k], r),
            }
        } else {
            let q = self.quotient(shift_i64(&g.shift)?)?;
            let Some(r) = q.orbit_exponent(&g.vec, &h.vec) else {
                return Ok(None);
            };
            let moved = self.spec.act(r, &g.vec);
            let b: Vec<BigInt> = h.vec.iter().zip(moved).map(|(a, c)| a - c).collect();
            Element::new(q.solve(&b)?, BigInt::from(r))
        };
        if self.spec.conjugate(g, &conj)? != *h {
            return Err(Error::Internal(format!(
                "conjugator {conj:?} fails the recheck for {g:?} -> {h:?}"
            )));
        }
        Ok(Some(conj))
    }

    /// Keys of many elements, in input order.
    pub fn keys(&self, elements: &[Element], par: Parallelism) -> Result<Vec<ConjClassKey>> {
        par.map(elements, |g| self.canonical_key(g)).into_iter().collect()
    }
}

pub fn canonical_key(spec: &GroupSpec, g: &Element) -> Result<ConjClassKey> {
    ConjugacyContext::new(spec).canonical_key(g)
}

/// See [`ConjugacyContext::are_conjugate`].
pub fn are_conjugate(spec: &GroupSpec, g: &Element, h: &Element) -> Result<Option<Element>> {
    ConjugacyContext::new(spec).are_conjugate(g, h)
}

/// Searches `B(radius)` for `x` with `x g x^-1 = h`. A hit is a proof of
/// conjugacy; a miss only rules out short conjugators.
pub fn brute_force_conjugate(
    spec: &GroupSpec,
    g: &Element,
    h: &Element,
    radius: usize,
    opts: &BallOptions,
) -> Result<Option<Element>> {
    let ball = crate::ball::ball_elements(spec, radius, opts)?;
    let hit = opts
        .parallelism
        .find_first(ball.len(), |i| spec.conjugate(g, &ball[i]).ok().as_ref() == Some(h));
    Ok(hit.map(|i| ball[i].clone()))
}

/// `{ x g x^-1 : x in ball }`, for repeated brute-force queries against one `g`.
pub fn conjugates_within(
    spec: &GroupSpec,
    g: &Element,
    ball: &[Element],
    par: Parallelism,
) -> Result<HashSet<Element>> {
    let v: Vec<Element> = par
        .map(ball, |x| spec.conjugate(g, x))
        .into_iter()
        .collect::<Result<_>>()?;
    Ok(v.into_iter().collect())
}

/// `gamma^c(m)` and `|B(m)|` for `m = 0..=radius`.
#[derive(Debug, Clone)]
pub struct ConjGrowthTable {
    pub radii: Vec<usize>,
    pub ball_sizes: Vec<u64>,
    pub conj_classes: Vec<u64>,
    pub truncated: Option<Truncation>,
}

impl ConjGrowthTable {
    pub fn radius(&self) -> usize {
        self.radii.last().copied().unwrap_or(0)
    }

    /// CSV with columns `n,ball_size,conj_classes`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,ball_size,conj_classes\n");
        for i in 0..self.radii.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                self.radii[i], self.ball_sizes[i], self.conj_classes[i]
            ));
        }
        out
    }
}

/// Counts distinct class keys over `B(m)`.
pub fn conjugacy_growth(spec: &GroupSpec, n: usize, opts: &BallOptions) -> Result<ConjGrowthTable> {
    let ctx = ConjugacyContext::new(spec);
    let mut seen: HashSet<ConjClassKey> = HashSet::new();
    let mut classes = Vec::new();
    let table = walk_spheres(spec, n, opts, |_, sphere| {
        for key in ctx.keys(sphere, opts.parallelism)? {
            seen.insert(key);
        }
        classes.push(seen.len() as u64);
        Ok(())
    })?;
    Ok(ConjGrowthTable {
        radii: table.radii,
        ball_sizes: table.counts,
        conj_classes: classes,
        truncated: table.truncated,
    })
}

/// Cross-validation mode: counts classes with pairwise [`are_conjugate`]
/// tests against one representative per class instead of keys. Quadratic.
pub fn conjugacy_growth_pairwise(
    spec: &GroupSpec,
    n: usize,
    opts: &BallOptions,
) -> Result<ConjGrowthTable> {
    let ctx = ConjugacyContext::new(spec);
    let mut reps: HashMap<BigInt, Vec<Element>> = HashMap::new();
    let mut count = 0u64;
    let mut classes = Vec::new();
    let table = walk_spheres(spec, n, opts, |_, sphere| {
        for g in sphere {
            let bucket = reps.entry(g.shift.clone()).or_default();
            let hits = opts.parallelism.map(bucket, |r| ctx.are_conjugate(r, g));
            let mut found = false;
            for h in hits {
                if h?.is_some() {
                    found = true;
                    break;
                }
            }
            if !found {
                bucket.push(g.clone());
                count += 1;
            }
        }
        classes.push(count);
        Ok(())
    })?;
    Ok(ConjGrowthTable {
        radii: table.radii,
        ball_sizes: table.counts,
        conj_classes: classes,
        truncated: table.truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sol() -> GroupSpec {
        GroupSpec::from_i64(&[&[2, 1], &[1, 1]]).unwrap()
    }

    fn heis() -> GroupSpec {
        GroupSpec::from_i64(&[&[1, 1], &[0, 1]]).unwrap()
    }

    fn e(v: &[i64], s: i64) -> Element {
        Element::from_i64(v, s)
    }

    #[test]
    fn decision_examples() {
        let g = sol();
        assert_eq!(
            are_conjugate(&g, &e(&[1, 0], 0), &e(&[2, 1], 0)).unwrap(),
            Some(e(&[0, 0], 1))
        );
        assert_eq!(are_conjugate(&g, &e(&[1, 0], 0), &e(&[2, 0], 0)).unwrap(), None);
        assert!(are_conjugate(&g, &e(&[0, 0], 1), &e(&[17, -4], 1)).unwrap().is_some());
        let h = heis();
        assert!(are_conjugate(&h, &e(&[0, 2], 0), &e(&[2, 2], 0)).unwrap().is_some());
        assert_eq!(are_conjugate(&h, &e(&[1, 2], 0), &e(&[0, 2], 0)).unwrap(), None);
        assert_eq!(are_conjugate(&g, &e(&[1, 0], 1), &e(&[1, 0], 2)).unwrap(), None);
    }

    #[test]
    fn key_examples() {
        let g = sol();
        let ctx = ConjugacyContext::new(&g);
        let k1 = ctx.canonical_key(&e(&[0, 0], 1)).unwrap();
        assert_eq!(k1, ctx.canonical_key(&e(&[1, 0], 1)).unwrap());
        assert_eq!(k1, ctx.canonical_key(&e(&[17, -4], 1)).unwrap());
        assert_eq!(
            k1,
            ConjClassKey {
                shift: BigInt::from(1),
                tag: KeyTag::FiniteQuotientOrbit(vec![BigInt::zero(), BigInt::zero()]),
            }
        );
        assert_eq!(
            ctx.canonical_key(&g.identity()).unwrap(),
            ConjClassKey {
                shift: BigInt::zero(),
                tag: KeyTag::VectorOrbit(vec![BigInt::zero(), BigInt::zero()]),
            }
        );
        assert_eq!(
            ctx.canonical_key(&e(&[2, 1], 0)).unwrap().tag,
            KeyTag::VectorOrbit(vec![BigInt::from(1), BigInt::zero()])
        );
    }

    #[test]
    fn growth_examples() {
        let t = conjugacy_growth(&sol(), 2, &BallOptions::default()).unwrap();
        assert_eq!(t.conj_classes[0], 1);
        assert_eq!(t.conj_classes[1], 7);
        let z3 = GroupSpec::from_i64(&[&[1, 0], &[0, 1]]).unwrap();
        let t = conjugacy_growth(&z3, 3, &BallOptions::default()).unwrap();
        assert_eq!(t.conj_classes, t.ball_sizes);
        assert_eq!(t.conj_classes[2], 25);
        assert!(t.to_csv().starts_with("n,ball_size,conj_classes\n0,1,1\n"));
    }

    #[test]
    fn pairwise_mode_agrees() {
        for spec in [sol(), heis()] {
            let a = conjugacy_growth(&spec, 4, &BallOptions::default()).unwrap();
            let b = conjugacy_growth_pairwise(&spec, 4, &BallOptions::default()).unwrap();
            assert_eq!(a.conj_classes, b.conj_classes);
        }
    }

    #[test]
    fn brute_force_examples() {
        let g = sol();
        let opts = BallOptions::default();
        let x = brute_force_conjugate(&g, &e(&[1, 0], 0), &e(&[2, 1], 0), 2, &opts).unwrap();
        assert!(x.is_some());
        let a = e(&[3, 1], 2);
        assert_eq!(
            brute_force_conjugate(&g, &a, &a, 0, &opts).unwrap(),
            Some(g.identity())
        );
        assert!(brute_force_conjugate(&g, &e(&[1, 0], 0), &e(&[2, 0], 0), 8, &opts)
            .unwrap()
            .is_none());
    }
}
