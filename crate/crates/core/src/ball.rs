//! Sphere-by-sphere breadth-first enumeration of word-metric balls.
//!
//! Spheres are kept as sorted, deduplicated vectors. The next sphere is every
//! left neighbour `s * g` of the current sphere that lies in neither the
//! current nor the previous sphere, which is exact because the generating set
//! is symmetric. Elements are packed as `i64` words while they fit and the
//! walk is promoted to arbitrary precision on the first overflow.

use std::hash::Hash;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};
use crate::matrix::IntMatrix;
use crate::par::Parallelism;

/// Default memory budget: 8 GiB.
pub const DEFAULT_MAX_BYTES: u64 = 8 << 30;

#[derive(Debug, Clone)]
pub struct BallOptions {
    /// Approximate upper bound on the bytes held by the walk.
    pub max_bytes: u64,
    /// Keep every sphere in the resulting table.
    pub retain_elements: bool,
    pub parallelism: Parallelism,
}

impl Default for BallOptions {
    fn default() -> Self {
        BallOptions {
            max_bytes: DEFAULT_MAX_BYTES,
            retain_elements: false,
            parallelism: Parallelism::default(),
        }
    }
}

impl BallOptions {
    pub fn with_parallelism(parallelism: Parallelism) -> Self {
        BallOptions {
            parallelism,
            ..Default::default()
        }
    }
}

/// Marker left on a table whose enumeration stopped early.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Truncation {
    pub last_completed_radius: usize,
    pub reason: String,
}

impl Truncation {
    pub fn to_error(&self) -> Error {
        Error::LimitExceeded {
            last_completed_radius: self.last_completed_radius,
            reason: self.reason.clone(),
        }
    }
}

/// Ball sizes `|B(m)|` for `m = 0..=radius`.
#[derive(Debug, Clone)]
pub struct BallTable {
    pub spec: GroupSpec,
    /// Radii that were completed, `0..=r`.
    pub radii: Vec<usize>,
    /// `|B(m)|`.
    pub counts: Vec<u64>,
    /// `|B(m) \ B(m-1)|`.
    pub new_elements: Vec<u64>,
    pub truncated: Option<Truncation>,
    /// Sorted spheres, when requested.
    pub spheres: Option<Vec<Vec<Element>>>,
}

impl BallTable {
    /// Largest completed radius.
    pub fn radius(&self) -> usize {
        self.radii.last().copied().unwrap_or(0)
    }

    pub fn count(&self, n: usize) -> Option<u64> {
        self.counts.get(n).copied()
    }

    pub fn is_complete(&self) -> bool {
        self.truncated.is_none()
    }

    /// The table itself, or the truncation as an error.
    pub fn complete(self) -> Result<Self> {
        match &self.truncated {
            Some(t) => Err(t.to_error()),
            None => Ok(self),
        }
    }

    /// CSV with columns `n,ball_size,new_elements`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,ball_size,new_elements\n");
        for (i, n) in self.radii.iter().enumerate() {
            out.push_str(&format!("{n},{},{}\n", self.counts[i], self.new_elements[i]));
        }
        out
    }

    /// Every retained element of `B(radius)`.
    pub fn elements(&self) -> Option<Vec<Element>> {
        self.spheres
            .as_ref()
            .map(|s| s.iter().flatten().cloned().collect())
    }
}

/// A concrete element encoding used by the walk.
pub(crate) trait Repr: Clone + Ord + Eq + Hash + Send + Sync + Sized {
    type Gens: Send + Sync;

    fn gens(spec: &GroupSpec) -> Option<Self::Gens>;
    /// `gens[i] * x`, or `None` on overflow.
    fn left_mul(gens: &Self::Gens, i: usize, x: &Self) -> Option<Self>;
    fn encode(g: &Element) -> Option<Self>;
    fn decode(&self) -> Element;
    fn approx_bytes(k: usize) -> u64;
}

/// `(vec, shift)` packed into machine words, vector first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Packed(SmallVec<[i64; 4]>);

pub(crate) struct PackedGen {
    vec: Vec<i64>,
    shift: i64,
    /// `phi^shift`, row-major; `None` when the shift is zero.
    action: Option<Vec<i64>>,
}

impl Repr for Packed {
    type Gens = Vec<PackedGen>;

    fn gens(spec: &GroupSpec) -> Option<Vec<PackedGen>> {
        spec.generators()
            .iter()
            .map(|g| {
                let shift = g.shift.to_i64()?;
                let action = if shift == 0 {
                    None
                } else {
                    Some(spec.phi_power(shift).to_i64()?)
                };
                Some(PackedGen {
                    vec: g.vec.iter().map(|x| x.to_i64()).collect::<Option<_>>()?,
                    shift,
                    action,
                })
            })
            .collect()
    }

    #[inline]
    fn left_mul(gens: &Vec<PackedGen>, i: usize, x: &Packed) -> Option<Packed> {
        let g = &gens[i];
        let k = g.vec.len();
        let mut out: SmallVec<[i64; 4]> = SmallVec::with_capacity(k + 1);
        match &g.action {
            None => {
                for j in 0..k {
                    out.push(g.vec[j].checked_add(x.0[j])?);
                }
            }
            Some(m) => {
                for j in 0..k {
                    let mut acc = g.vec[j] as i128;
                    for l in 0..k {
                        acc += m[j * k + l] as i128 * x.0[l] as i128;
                    }
                    out.push(i64::try_from(acc).ok()?);
                }
            }
        }
        out.push(g.shift.checked_add(x.0[k])?);
        Some(Packed(out))
    }

    fn encode(g: &Element) -> Option<Packed> {
        let mut out: SmallVec<[i64; 4]> = SmallVec::with_capacity(g.vec.len() + 1);
        for x in &g.vec {
            out.push(x.to_i64()?);
        }
        out.push(g.shift.to_i64()?);
        Some(Packed(out))
    }

    fn decode(&self) -> Element {
        let k = self.0.len() - 1;
        Element {
            vec: self.0[..k].iter().map(|&x| BigInt::from(x)).collect(),
            shift: BigInt::from(self.0[k]),
        }
    }

    fn approx_bytes(k: usize) -> u64 {
        let inline = std::mem::size_of::<Packed>() as u64;
        if k < 4 {
            inline
        } else {
            inline + 8 * (k as u64 + 1)
        }
    }
}

pub(crate) struct BigGen {
    elem: Element,
    action: Option<Arc<IntMatrix>>,
}

impl Repr for Element {
    type Gens = Vec<BigGen>;

    fn gens(spec: &GroupSpec) -> Option<Vec<BigGen>> {
        spec.generators()
            .iter()
            .map(|g| {
                let action = if g.shift.is_zero() {
                    None
                } else {
                    Some(spec.phi_power(g.shift.to_i64()?))
                };
                Some(BigGen {
                    elem: g.clone(),
                    action,
                })
            })
            .collect()
    }

    fn left_mul(gens: &Vec<BigGen>, i: usize, x: &Element) -> Option<Element> {
        let g = &gens[i];
        let moved = match &g.action {
            None => x.vec.clone(),
            Some(m) => m.mul_vec(&x.vec),
        };
        Some(Element {
            vec: g.elem.vec.iter().zip(moved).map(|(a, b)| a + b).collect(),
            shift: &g.elem.shift + &x.shift,
        })
    }

    fn encode(g: &Element) -> Option<Element> {
        Some(g.clone())
    }

    fn decode(&self) -> Element {
        self.clone()
    }

    fn approx_bytes(k: usize) -> u64 {
        // Vec header + BigInt headers + one limb each, roughly
        (std::mem::size_of::<Element>() + (k + 1) * 40) as u64
    }
}

/// Raised when a packed walk leaves the `i64` range.
#[derive(Debug)]
pub(crate) struct Overflow;

/// Spheres `S(r-1)` and `S(r)` of a left-multiplication breadth-first walk.
pub(crate) struct Walker<R: Repr> {
    gens: R::Gens,
    ngen: usize,
    k: usize,
    pub(crate) radius: usize,
    pub(crate) prev: Vec<R>,
    pub(crate) cur: Vec<R>,
    par: Parallelism,
}

impl<R: Repr> Walker<R> {
    /// A walk whose sphere of radius 0 is `{start}`.
    pub(crate) fn new(spec: &GroupSpec, start: &Element, par: Parallelism) -> Option<Self> {
        Some(Walker {
            gens: R::gens(spec)?,
            ngen: spec.generators().len(),
            k: spec.k(),
            radius: 0,
            prev: Vec::new(),
            cur: vec![R::encode(start)?],
            par,
        })
    }

    /// Rough peak memory of the next step.
    pub(crate) fn next_step_bytes(&self) -> u64 {
        let per = R::approx_bytes(self.k);
        (self.prev.len() as u64 + self.cur.len() as u64 * (1 + self.ngen as u64)) * per
    }

    pub(crate) fn step(&mut self) -> std::result::Result<(), Overflow> {
        let overflow = AtomicBool::new(false);
        let prev = &self.prev;
        let cur = &self.cur;
        let gens = &self.gens;
        let ngen = self.ngen;
        let mut next = self.par.flat_map(cur, |x, out| {
            for i in 0..ngen {
                match R::left_mul(gens, i, x) {
                    Some(y) => {
                        if cur.binary_search(&y).is_err() && prev.binary_search(&y).is_err() {
                            out.push(y);
                        }
                    }
                    None => overflow.store(true, Ordering::Relaxed),
                }
            }
        });
        if overflow.load(Ordering::Relaxed) {
            return Err(Overflow);
        }
        self.par.sort_unstable(&mut next);
        next.dedup();
        self.prev = std::mem::replace(&mut self.cur, next);
        self.radius += 1;
        Ok(())
    }

    fn promote(self, spec: &GroupSpec) -> Walker<Element> {
        Walker {
            gens: <Element as Repr>::gens(spec).expect("shifts of generators fit in i64"),
            ngen: self.ngen,
            k: self.k,
            radius: self.radius,
            prev: self.prev.iter().map(Repr::decode).collect(),
            cur: self.cur.iter().map(Repr::decode).collect(),
            par: self.par,
        }
    }
}

/// A walk that starts packed and switches to bignum entries when needed.
pub(crate) enum AnyWalker {
    Small(Walker<Packed>),
    Big(Walker<Element>),
}

impl AnyWalker {
    pub(crate) fn new(spec: &GroupSpec, start: &Element, par: Parallelism) -> Result<Self> {
        if let Some(w) = Walker::<Packed>::new(spec, start, par) {
            return Ok(AnyWalker::Small(w));
        }
        Walker::<Element>::new(spec, start, par)
            .map(AnyWalker::Big)
            .ok_or_else(|| Error::Invalid("generator shift exceeds 64 bits".into()))
    }

    pub(crate) fn radius(&self) -> usize {
        match self {
            AnyWalker::Small(w) => w.radius,
            AnyWalker::Big(w) => w.radius,
        }
    }

    pub(crate) fn sphere_len(&self) -> usize {
        match self {
            AnyWalker::Small(w) => w.cur.len(),
            AnyWalker::Big(w) => w.cur.len(),
        }
    }

    pub(crate) fn sphere_elements(&self) -> Vec<Element> {
        match self {
            AnyWalker::Small(w) => w.cur.iter().map(Repr::decode).collect(),
            AnyWalker::Big(w) => w.cur.clone(),
        }
    }

    pub(crate) fn next_step_bytes(&self) -> u64 {
        match self {
            AnyWalker::Small(w) => w.next_step_bytes(),
            AnyWalker::Big(w) => w.next_step_bytes(),
        }
    }

    pub(crate) fn step(self, spec: &GroupSpec) -> Self {
        match self {
            AnyWalker::Small(mut w) => {
                if w.step().is_ok() {
                    return AnyWalker::Small(w);
                }
                let mut big = w.promote(spec);
                big.step().expect("bignum steps cannot overflow");
                AnyWalker::Big(big)
            }
            AnyWalker::Big(mut w) => {
                w.step().expect("bignum steps cannot overflow");
                AnyWalker::Big(w)
            }
        }
    }
}

/// Walks the spheres `S(0), S(1), ..., S(n)` of `spec`, calling `visit` with
/// each sphere as soon as it is complete. Stops early, with a truncation
/// marker, when the next step would exceed `opts.max_bytes`.
pub fn walk_spheres<F>(spec: &GroupSpec, n: usize, opts: &BallOptions, mut visit: F) -> Result<BallTable>
where
    F: FnMut(usize, &[Element]) -> Result<()>,
{
    let mut walker = AnyWalker::new(spec, &spec.identity(), opts.parallelism)?;
    let mut table = BallTable {
        spec: spec.clone(),
        radii: Vec::new(),
        counts: Vec::new(),
        new_elements: Vec::new(),
        truncated: None,
        spheres: opts.retain_elements.then(Vec::new),
    };
    let mut total: u64 = 0;
    let mut retained_bytes: u64 = 0;
    let per = <Element as Repr>::approx_bytes(spec.k());
    loop {
        let r = walker.radius();
        let size = walker.sphere_len() as u64;
        total += size;
        let elements = walker.sphere_elements();
        visit(r, &elements)?;
        table.radii.push(r);
        table.counts.push(total);
        table.new_elements.push(size);
        if let Some(s) = table.spheres.as_mut() {
            retained_bytes += size * per;
            s.push(elements);
        }
        if r >= n {
            break;
        }
        let need = walker.next_step_bytes() + retained_bytes;
        if need > opts.max_bytes {
            table.truncated = Some(Truncation {
                last_completed_radius: r,
                reason: format!(
                    "radius {} needs about {need} bytes, budget is {}",
                    r + 1,
                    opts.max_bytes
                ),
            });
            break;
        }
        walker = walker.step(spec);
    }
    Ok(table)
}

/// `|B(m)|` for `m = 0..=n`.
pub fn enumerate_ball(spec: &GroupSpec, n: usize, opts: &BallOptions) -> BallTable {
    if opts.retain_elements {
        return walk_spheres(spec, n, opts, |_, _| Ok(())).expect("visitor cannot fail");
    }
    // counting only: skip decoding the spheres
    let mut walker = match AnyWalker::new(spec, &spec.identity(), opts.parallelism) {
        Ok(w) => w,
        Err(e) => {
            return BallTable {
                spec: spec.clone(),
                radii: Vec::new(),
                counts: Vec::new(),
                new_elements: Vec::new(),
                truncated: Some(Truncation {
                    last_completed_radius: 0,
                    reason: e.to_string(),
                }),
                spheres: None,
            }
        }
    };
    let mut table = BallTable {
        spec: spec.clone(),
        radii: vec![0],
        counts: vec![1],
        new_elements: vec![1],
        truncated: None,
        spheres: None,
    };
    while walker.radius() < n {
        let need = walker.next_step_bytes();
        if need > opts.max_bytes {
            table.truncated = Some(Truncation {
                last_completed_radius: walker.radius(),
                reason: format!(
                    "radius {} needs about {need} bytes, budget is {}",
                    walker.radius() + 1,
                    opts.max_bytes
                ),
            });
            break;
        }
        walker = walker.step(spec);
        let size = walker.sphere_len() as u64;
        table.radii.push(walker.radius());
        table.counts.push(table.counts.last().unwrap() + size);
        table.new_elements.push(size);
    }
    table
}

/// Every element of `B(n)`, sorted by radius and then by normal form.
pub fn ball_elements(spec: &GroupSpec, n: usize, opts: &BallOptions) -> Result<Vec<Element>> {
    let opts = BallOptions {
        retain_elements: true,
        ..opts.clone()
    };
    let table = enumerate_ball(spec, n, &opts).complete()?;
    Ok(table.elements().unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sol() -> GroupSpec {
        GroupSpec::from_i64(&[&[2, 1], &[1, 1]]).unwrap()
    }

    fn z3() -> GroupSpec {
        GroupSpec::from_i64(&[&[1, 0], &[0, 1]]).unwrap()
    }

    #[test]
    fn sol_goldens() {
        let t = enumerate_ball(&sol(), 3, &BallOptions::default());
        assert_eq!(t.counts, vec![1, 7, 33, 103]);
        assert_eq!(t.new_elements, vec![1, 6, 26, 70]);
        assert!(t.is_complete());
    }

    #[test]
    fn z3_closed_form() {
        let t = enumerate_ball(&z3(), 8, &BallOptions::default());
        for n in 0..=8u64 {
            assert_eq!(t.counts[n as usize], (4 * n * n * n + 6 * n * n + 8 * n + 3) / 3);
        }
        assert_eq!(t.counts[2], 25);
    }

    #[test]
    fn modes_agree() {
        let spec = GroupSpec::from_i64(&[&[1, 1], &[0, 1]]).unwrap();
        let a = enumerate_ball(&spec, 6, &BallOptions::with_parallelism(Parallelism::Sequential));
        let b = enumerate_ball(&spec, 6, &BallOptions::with_parallelism(Parallelism::Parallel));
        assert_eq!(a.counts, b.counts);
        assert_eq!(a.counts, vec![1, 7, 29, 83, 189, 379, 697]);
    }

    #[test]
    fn retained_spheres_match_counts() {
        let opts = BallOptions {
            retain_elements: true,
            ..Default::default()
        };
        let t = enumerate_ball(&sol(), 3, &opts);
        let spheres = t.spheres.as_ref().unwrap();
        for (s, &c) in spheres.iter().zip(&t.new_elements) {
            assert_eq!(s.len() as u64, c);
        }
        assert_eq!(spheres[0], vec![Element::identity(2)]);
        assert!(spheres[1].contains(&Element::from_i64(&[0, 0], 1)));
    }

    #[test]
    fn budget_truncates() {
        let opts = BallOptions {
            max_bytes: 10_000,
            ..Default::default()
        };
        let t = enumerate_ball(&sol(), 10, &opts);
        let tr = t.truncated.clone().unwrap();
        assert_eq!(tr.last_completed_radius, t.radius());
        assert!(t.radius() < 10);
        assert!(t.complete().is_err());
    }

    #[test]
    fn promotion_to_bignum() {
        // phi with huge entries overflows i64 after a few steps
        let big = 1i64 << 40;
        let spec = GroupSpec::from_i64(&[&[big + 1, big], &[1, 1]]).unwrap();
        let t = enumerate_ball(&spec, 4, &BallOptions::default());
        let opts = BallOptions {
            retain_elements: true,
            ..Default::default()
        };
        let all = walk_spheres(&spec, 4, &opts, |_, _| Ok(())).unwrap();
        assert_eq!(t.counts, all.counts);
        let elems = all.elements().unwrap();
        assert!(elems.iter().any(|g| g.sup_norm() > BigInt::from(i64::MAX)));
        // compare with a plain bignum closure under left multiplication
        let mut seen = std::collections::BTreeSet::new();
        seen.insert(spec.identity());
        let mut frontier = vec![spec.identity()];
        for _ in 0..4 {
            let mut next = Vec::new();
            for g in &frontier {
                for s in spec.generators() {
                    let h = spec.multiply(s, g).unwrap();
                    if seen.insert(h.clone()) {
                        next.push(h);
                    }
                }
            }
            frontier = next;
        }
        assert_eq!(seen.len() as u64, t.counts[4]);
    }

    #[test]
    fn csv_layout() {
        let t = enumerate_ball(&sol(), 2, &BallOptions::default());
        assert_eq!(t.to_csv(), "n,ball_size,new_elements\n0,1,1\n1,7,6\n2,33,26\n");
    }
}
