//! Explicit words for group elements (upper bounds on the word norm).
//!
//! Words are first built over the standard letters `e_i^{+-1}, t^{+-1}` and
//! then translated to the spec's generators. For a shift-0 vector `w` the
//! candidates are:
//!
//! * conjugation: `t^J x t^-J` with `x = phi^-J w`,
//! * the trivial word with `||w||_1` letters,
//! * commutators: `t^b y t^-b y^-1 r` with `(phi^b - I) y + r = w`,
//! * a two-sided `phi`-adic expansion, logarithmic in `||w||` when `phi` is
//!   hyperbolic: `w` is split into a part near the contracting subspace,
//!   written as `sum_j phi^-j d_j`, and a part near the expanding one,
//!   written as `sum_j phi^j e_j`, with small digits.
//!
//! The shortest candidate wins; ties go to the earlier strategy in the list.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec, Word};
use crate::matrix::{IntMatrix, Snf};
use crate::spectral::Eigenframe;

/// Radius of the shortest-word dictionary used for small pieces.
const DICT_RADIUS: usize = 5;
/// Largest conjugation exponent tried.
const MAX_CONJ: i64 = 64;
/// Largest commutator exponent tried.
const MAX_COMM: i64 = 256;
/// Largest digit bound tried by the expansion.
const MAX_DIGIT: i64 = 4;
/// Expansion steps before giving up.
const MAX_STEPS: usize = 400;
/// Vectors beyond this size skip the floating-point expansion.
const FLOAT_LIMIT: f64 = 1e15;
/// Longest word a certificate may spell out.
const MAX_WORD: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Letter {
    /// `e_i` or its inverse.
    E(usize, bool),
    /// `t` or its inverse.
    T(bool),
}

impl Letter {
    fn inverse(self) -> Letter {
        match self {
            Letter::E(i, p) => Letter::E(i, !p),
            Letter::T(p) => Letter::T(!p),
        }
    }
}

enum Plan {
    Trivial,
    Conjugation(i64, Vec<BigInt>),
    Commutator(i64, Vec<BigInt>, Vec<BigInt>),
    PhiAdic(Vec<Letter>, i64),
}

/// Which construction produced a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Dictionary,
    Conjugation,
    Trivial,
    Commutator,
    PhiAdic { digit_bound: i64 },
}

#[derive(Debug, Clone)]
pub struct Certificate {
    pub word: Word,
    pub strategy: Strategy,
}

/// Per-spec data for building certificates: a dictionary of geodesics,
/// spectral frames, and the translation of standard letters into the
/// spec's generators.
pub struct CertificateBuilder {
    spec: GroupSpec,
    k: usize,
    dict: HashMap<Element, Vec<Letter>>,
    contracting: Option<Eigenframe>,
    expanding: Option<Eigenframe>,
    phi: Vec<i128>,
    phi_inv: Vec<i128>,
    /// Word in the spec's generators for each standard letter.
    letters: HashMap<Letter, Vec<usize>>,
}

fn letter_elem(k: usize, l: Letter) -> Element {
    let mut v = vec![BigInt::zero(); k];
    match l {
        Letter::E(i, p) => {
            v[i] = if p { BigInt::one() } else { -BigInt::one() };
            Element::translation(v)
        }
        Letter::T(p) => Element::new(v, if p { BigInt::one() } else { -BigInt::one() }),
    }
}

fn all_letters(k: usize) -> Vec<Letter> {
    let mut out = Vec::with_capacity(2 * k + 2);
    for i in 0..k {
        out.push(Letter::E(i, true));
        out.push(Letter::E(i, false));
    }
    out.push(Letter::T(true));
    out.push(Letter::T(false));
    out
}

/// Shortest words (over `alphabet`) for every element within `radius`.
fn geodesics<L: Copy>(
    spec: &GroupSpec,
    alphabet: &[(L, Element)],
    radius: usize,
    mut stop: impl FnMut(&Element) -> bool,
) -> Result<HashMap<Element, Vec<L>>> {
    let mut dict: HashMap<Element, Vec<L>> = HashMap::new();
    dict.insert(spec.identity(), Vec::new());
    let mut queue = VecDeque::from([spec.identity()]);
    while let Some(g) = queue.pop_front() {
        let w = dict[&g].clone();
        if stop(&g) || w.len() >= radius {
            continue;
        }
        for (l, x) in alphabet {
            let h = spec.multiply(&g, x)?;
            if !dict.contains_key(&h) {
                let mut w2 = w.clone();
                w2.push(*l);
                dict.insert(h.clone(), w2);
                queue.push_back(h);
            }
        }
    }
    Ok(dict)
}

fn to_i128(m: &IntMatrix) -> Option<Vec<i128>> {
    m.to_i64().map(|v| v.into_iter().map(i128::from).collect())
}

impl CertificateBuilder {
    pub fn new(spec: &GroupSpec) -> Result<Self> {
        let k = spec.k();
        let std_alphabet: Vec<(Letter, Element)> =
            all_letters(k).into_iter().map(|l| (l, letter_elem(k, l))).collect();
        let dict = geodesics(spec, &std_alphabet, DICT_RADIUS, |_| false)?;
        let letters = if spec.has_default_generators() {
            all_letters(k)
                .into_iter()
                .map(|l| {
                    let idx = match l {
                        Letter::E(i, p) => 2 * i + usize::from(!p),
                        Letter::T(p) => 2 * k + usize::from(!p),
                    };
                    (l, vec![idx])
                })
                .collect()
        } else {
            translate_letters(spec)?
        };
        let hyperbolic = !crate::spectral::is_quasi_unipotent(spec.phi())?;
        let (contracting, expanding) = if hyperbolic {
            (Eigenframe::contracting(spec.phi()), Eigenframe::expanding(spec.phi()))
        } else {
            (None, None)
        };
        Ok(CertificateBuilder {
            spec: spec.clone(),
            k,
            dict,
            contracting,
            expanding,
            phi: to_i128(spec.phi()).unwrap_or_default(),
            phi_inv: to_i128(spec.phi_inv()).unwrap_or_default(),
            letters,
        })
    }

    /// A word evaluating exactly to `g`.
    pub fn certificate(&self, g: &Element) -> Result<Certificate> {
        if g.vec.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                found: g.vec.len(),
            });
        }
        let (letters, strategy) = self.letters_for(g)?;
        let mut word = Vec::new();
        for l in &letters {
            word.extend_from_slice(&self.letters[l]);
        }
        let word = Word(word);
        if self.spec.evaluate_word(&word)? != *g {
            return Err(Error::Internal(format!("certificate for {g:?} does not evaluate back")));
        }
        Ok(Certificate { word, strategy })
    }

    fn letters_for(&self, g: &Element) -> Result<(Vec<Letter>, Strategy)> {
        if let Some(w) = self.dict.get(g) {
            return Ok((w.clone(), Strategy::Dictionary));
        }
        let s = g
            .shift
            .to_i64()
            .ok_or_else(|| Error::Invalid("shift too large for a certificate".into()))?;
        let t = Letter::T(s > 0);
        let ts = vec![t; s.unsigned_abs() as usize];
        // (w, s) = (w, 0) t^s = t^s (phi^-s w, 0)
        let (mut a, sa) = self.vector_word(&g.vec)?;
        a.extend_from_slice(&ts);
        let (b, sb) = if s == 0 {
            (Vec::new(), sa)
        } else {
            let moved = self.spec.act(-s, &g.vec);
            let (mut w, st) = self.vector_word(&moved)?;
            let mut b = ts.clone();
            b.append(&mut w);
            (b, st)
        };
        if s != 0 && b.len() < a.len() {
            Ok((b, sb))
        } else {
            Ok((a, sa))
        }
    }

    fn small_cost(&self, x: &[BigInt]) -> BigInt {
        match self.dict.get(&Element::translation(x.to_vec())) {
            Some(w) => BigInt::from(w.len()),
            None => x.iter().map(|c| c.abs()).sum(),
        }
    }

    fn small_word(&self, x: &[BigInt]) -> Vec<Letter> {
        if let Some(w) = self.dict.get(&Element::translation(x.to_vec())) {
            return w.clone();
        }
        trivial(x)
    }

    fn vector_word(&self, w: &[BigInt]) -> Result<(Vec<Letter>, Strategy)> {
        // costs first; only the winner is spelled out
        let mut cands: Vec<(BigInt, Plan)> = Vec::new();
        if let Some((c, j, x)) = self.conjugation(w) {
            cands.push((c, Plan::Conjugation(j, x)));
        }
        cands.push((trivial_len(w), Plan::Trivial));
        if let Some((c, b, y, r)) = self.commutator(w) {
            cands.push((c, Plan::Commutator(b, y, r)));
        }
        if let Some((word, bound)) = self.phi_adic(w) {
            cands.push((BigInt::from(word.len()), Plan::PhiAdic(word, bound)));
        }
        let (cost, plan) = cands
            .into_iter()
            .reduce(|a, b| if b.0 < a.0 { b } else { a })
            .expect("trivial candidate is always present");
        if cost > BigInt::from(MAX_WORD) {
            return Err(Error::LimitExceeded {
                last_completed_radius: 0,
                reason: format!("shortest certificate found has {cost} letters"),
            });
        }
        Ok(match plan {
            Plan::Trivial => (trivial(w), Strategy::Trivial),
            Plan::Conjugation(j, x) => {
                let n = j.unsigned_abs() as usize;
                let mut out = vec![Letter::T(j > 0); n];
                out.extend(self.small_word(&x));
                out.extend(vec![Letter::T(j < 0); n]);
                (out, Strategy::Conjugation)
            }
            Plan::Commutator(b, y, r) => {
                let neg_y: Vec<BigInt> = y.iter().map(|c| -c).collect();
                let n = b.unsigned_abs() as usize;
                let mut out = vec![Letter::T(b > 0); n];
                out.extend(trivial(&y));
                out.extend(vec![Letter::T(b < 0); n]);
                out.extend(trivial(&neg_y));
                out.extend(self.small_word(&r));
                (out, Strategy::Commutator)
            }
            Plan::PhiAdic(word, bound) => (word, Strategy::PhiAdic { digit_bound: bound }),
        })
    }

    /// Best `t^J x t^-J`, as `(cost, J, x)`.
    fn conjugation(&self, w: &[BigInt]) -> Option<(BigInt, i64, Vec<BigInt>)> {
        let limit: BigInt = trivial_len(w) * 4 + 64;
        let mut best: Option<(BigInt, i64, Vec<BigInt>)> = None;
        let mut consider = |j: i64, x: Vec<BigInt>| {
            let cost = self.small_cost(&x) + BigInt::from(2 * j.abs());
            if best.as_ref().is_none_or(|(c, _, _)| &cost < c) {
                best = Some((cost, j, x));
            }
        };
        consider(0, w.to_vec());
        for dir in [1i64, -1] {
            let mut x = w.to_vec();
            for j in 1..=MAX_CONJ {
                x = self.spec.act(-dir, &x);
                if trivial_len(&x) > limit {
                    break;
                }
                consider(dir * j, x.clone());
            }
        }
        best
    }

    /// Best `t^b y t^-b y^-1 r`, as `(cost, b, y, r)`.
    #[allow(clippy::type_complexity)]
    fn commutator(&self, w: &[BigInt]) -> Option<(BigInt, i64, Vec<BigInt>, Vec<BigInt>)> {
        if w.iter().all(Zero::is_zero) {
            return None;
        }
        let size = w.iter().map(|x| x.abs()).max().unwrap_or_default();
        let root = size.sqrt().to_i64().unwrap_or(MAX_COMM);
        let max_b = (2 * root + 2).min(MAX_COMM);
        let mut best: Option<(BigInt, i64, Vec<BigInt>, Vec<BigInt>)> = None;
        let ident = IntMatrix::identity(self.k);
        for b in (1..=max_b).flat_map(|b| [b, -b]) {
            let m = self.spec.phi_power(b).sub(&ident);
            if m.is_zero() {
                continue;
            }
            let Snf { u, v, diag } = m.smith_normal_form();
            let uw = u.mul_vec(w);
            let z: Vec<BigInt> = uw
                .iter()
                .zip(&diag)
                .map(|(x, d)| if d.is_zero() { BigInt::zero() } else { round_div(x, d) })
                .collect();
            if z.iter().all(Zero::is_zero) {
                continue;
            }
            let y = v.mul_vec(&z);
            let my = m.mul_vec(&y);
            let r: Vec<BigInt> = w.iter().zip(&my).map(|(a, c)| a - c).collect();
            let cost = BigInt::from(2 * b.abs()) + trivial_len(&y) * 2 + self.small_cost(&r);
            if best.as_ref().is_none_or(|(c, ..)| &cost < c) {
                best = Some((cost, b, y, r));
            }
        }
        best
    }

    fn phi_adic(&self, w: &[BigInt]) -> Option<(Vec<Letter>, i64)> {
        let (fc, fe) = (self.contracting.as_ref()?, self.expanding.as_ref()?);
        if self.phi.is_empty() || self.phi_inv.is_empty() {
            return None;
        }
        let wf: Vec<f64> = w.iter().map(|x| x.to_f64().unwrap_or(f64::INFINITY)).collect();
        if wf.iter().any(|x| !x.is_finite() || x.abs() > FLOAT_LIMIT) {
            return None;
        }
        let wi: Vec<i128> = w.iter().map(|x| x.to_i128().unwrap()).collect();
        let x: Vec<i128> = fc.project_s(&wf).iter().map(|c| c.round() as i128).collect();
        let y: Vec<i128> = wi.iter().zip(&x).map(|(a, b)| a - b).collect();
        for bound in 1..=MAX_DIGIT {
            let Some(xw) = self.expand(&x, &self.phi, fc, bound, false) else {
                continue;
            };
            let Some(yw) = self.expand(&y, &self.phi_inv, fe, bound, true) else {
                continue;
            };
            let mut word = xw;
            word.extend(yw);
            return Some((free_reduce(word), bound));
        }
        None
    }

    /// Writes `x = d_0 + phi^-s d_1 + ... + phi^-sJ x_J` where `step` is
    /// `phi^s`, keeping the frame's `T`-coordinates small; `s = 1` when
    /// `inverse` is false. Emits `[d_0] t^-s [d_1] ... [x_J] t^sJ`.
    fn expand(
        &self,
        x: &[i128],
        step: &[i128],
        frame: &Eigenframe,
        bound: i64,
        inverse: bool,
    ) -> Option<Vec<Letter>> {
        let k = self.k;
        let digits = digit_set(k, bound);
        let mut cur = x.to_vec();
        let mut chosen: Vec<Vec<i128>> = Vec::new();
        let mut tails: Vec<Vec<i128>> = vec![cur.clone()];
        let mut spent = 0usize;
        let mut best_j = 0usize;
        let mut best_cost = self.small_cost(&big(&cur));
        for j in 1..=MAX_STEPS {
            if cur.iter().all(|c| *c == 0) {
                break;
            }
            let d = digits
                .iter()
                .map(|d| {
                    let diff: Vec<f64> = cur.iter().zip(d).map(|(a, b)| (a - b) as f64).collect();
                    (frame.t_size(&diff), d)
                })
                .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal))
                .map(|(_, d)| d.clone())?;
            let diff: Vec<i128> = cur.iter().zip(&d).map(|(a, b)| a - b).collect();
            let mut next = vec![0i128; k];
            for (i, n) in next.iter_mut().enumerate() {
                let mut acc: i128 = 0;
                for l in 0..k {
                    acc = acc.checked_add(step[i * k + l].checked_mul(diff[l])?)?;
                }
                *n = acc;
            }
            spent += d.iter().map(|c| c.unsigned_abs() as usize).sum::<usize>() + 1;
            chosen.push(d);
            cur = next;
            if cur.iter().any(|c| c.unsigned_abs() > 1 << 100) {
                return None;
            }
            let cost = BigInt::from(spent + j) + self.small_cost(&big(&cur));
            if cost < best_cost {
                best_cost = cost;
                best_j = j;
            }
            tails.push(cur.clone());
        }
        let size = tails[best_j].iter().map(|c| c.unsigned_abs()).max().unwrap_or(0);
        if (best_j == 0 && size > 1 << 20) || best_cost > BigInt::from(MAX_WORD) {
            // never got anywhere: treat as a blow-up so a larger digit set is tried
            return None;
        }
        let back = Letter::T(inverse);
        let fwd = Letter::T(!inverse);
        let mut out = Vec::new();
        for d in &chosen[..best_j] {
            out.extend(trivial(&big(d)));
            out.push(back);
        }
        out.extend(self.small_word(&big(&tails[best_j])));
        out.extend(vec![fwd; best_j]);
        Some(out)
    }
}

fn big(v: &[i128]) -> Vec<BigInt> {
    v.iter().map(|&c| BigInt::from(c)).collect()
}

/// All digit vectors with `||d||_inf <= bound`, smallest `l1` norm first.
fn digit_set(k: usize, bound: i64) -> Vec<Vec<i128>> {
    let mut out: Vec<Vec<i128>> = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-bound..=bound).map(move |c| {
                    let mut q = p.clone();
                    q.push(c as i128);
                    q
                })
            })
            .collect();
    }
    out.sort_by_key(|d| (d.iter().map(|c| c.abs()).sum::<i128>(), d.clone()));
    out
}

fn round_div(x: &BigInt, d: &BigInt) -> BigInt {
    // nearest integer to x / d
    let two = BigInt::from(2);
    let (q, r) = (x * &two + d).div_mod_floor(&(d * &two));
    let _ = r;
    q
}

fn trivial_len(w: &[BigInt]) -> BigInt {
    w.iter().map(|x| x.abs()).sum()
}

fn trivial(w: &[BigInt]) -> Vec<Letter> {
    let mut out = Vec::new();
    for (i, x) in w.iter().enumerate() {
        let n = x.abs().to_usize().expect("trivial word too long");
        out.extend(std::iter::repeat_n(Letter::E(i, x.is_positive()), n));
    }
    out
}

fn free_reduce(word: Vec<Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(word.len());
    for l in word {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Shortest word in the spec's generators for each standard letter.
fn translate_letters(spec: &GroupSpec) -> Result<HashMap<Letter, Vec<usize>>> {
    let k = spec.k();
    let alphabet: Vec<(usize, Element)> = spec.generators().iter().cloned().enumerate().collect();
    let targets: Vec<(Letter, Element)> = all_letters(k).into_iter().map(|l| (l, letter_elem(k, l))).collect();
    let mut remaining = targets.len();
    let dict = geodesics(spec, &alphabet, 16, |g| {
        if targets.iter().any(|(_, t)| t == g) {
            remaining -= 1;
        }
        false
    })
    .ok();
    let _ = remaining;
    let dict = dict.ok_or_else(|| Error::NotGenerating("search failed".into()))?;
    let mut out = HashMap::new();
    for (l, t) in targets {
        let w = dict
            .get(&t)
            .ok_or_else(|| Error::NotGenerating(format!("no word of length <= 16 for {t:?}")))?;
        out.insert(l, w.clone());
    }
    Ok(out)
}

/// A word evaluating to `g`; see the module docs for the construction.
pub fn word_certificate(spec: &GroupSpec, g: &Element) -> Result<Word> {
    Ok(CertificateBuilder::new(spec)?.certificate(g)?.word)
}
