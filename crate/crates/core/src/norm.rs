//! Exact word norms by meet-in-the-middle search.
//!
//! One walk grows spheres around the identity, the other around `g` (by left
//! multiplication, so its sphere of radius `j` is `S(j) g`). If the two
//! explored regions have radii `a` and `b`, every pair of spheres with
//! `i <= a, j <= b` has been intersected, and `|g| = min { i + j }` over the
//! hits as soon as that minimum is at most `a + b`.

use std::collections::HashMap;

use crate::ball::{BallOptions, Overflow, Packed, Repr, Walker};
use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};

/// Outcome of a bounded norm query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    Exact(usize),
    /// `|g| >= lower_bound`, where `lower_bound = cap + 1`.
    Unknown { lower_bound: usize },
}

impl Norm {
    pub fn exact(self) -> Option<usize> {
        match self {
            Norm::Exact(n) => Some(n),
            Norm::Unknown { .. } => None,
        }
    }

    /// A proven lower bound on the norm.
    pub fn lower_bound(self) -> usize {
        match self {
            Norm::Exact(n) => n,
            Norm::Unknown { lower_bound } => lower_bound,
        }
    }
}

/// `|g|` if it is at most `cap`, otherwise `Unknown`.
pub fn word_norm(spec: &GroupSpec, g: &Element, cap: usize, opts: &BallOptions) -> Result<Norm> {
    if g.vec.len() != spec.k() {
        return Err(Error::DimensionMismatch {
            expected: spec.k(),
            found: g.vec.len(),
        });
    }
    match search::<Packed>(spec, g, cap, opts) {
        Ok(r) => r,
        Err(Overflow) => search::<Element>(spec, g, cap, opts).unwrap_or_else(|_| {
            Err(Error::Internal("bignum search overflowed".into()))
        }),
    }
}

struct Side<R: Repr> {
    walker: Walker<R>,
    seen: HashMap<R, usize>,
}

fn search<R: Repr>(
    spec: &GroupSpec,
    g: &Element,
    cap: usize,
    opts: &BallOptions,
) -> std::result::Result<Result<Norm>, Overflow> {
    let par = opts.parallelism;
    let id = spec.identity();
    let (Some(wa), Some(wb)) = (Walker::<R>::new(spec, &id, par), Walker::<R>::new(spec, g, par)) else {
        return Err(Overflow);
    };
    let mut sides = [
        Side {
            seen: wa.cur.iter().map(|x| (x.clone(), 0)).collect(),
            walker: wa,
        },
        Side {
            seen: wb.cur.iter().map(|x| (x.clone(), 0)).collect(),
            walker: wb,
        },
    ];
    let mut best = if sides[0].seen.contains_key(&sides[1].walker.cur[0]) {
        Some(0)
    } else {
        None
    };
    let per = R::approx_bytes(spec.k());
    loop {
        let a = sides[0].walker.radius;
        let b = sides[1].walker.radius;
        if let Some(d) = best {
            if d <= a + b {
                return Ok(Ok(Norm::Exact(d)));
            }
        }
        if a + b >= cap {
            return Ok(Ok(Norm::Unknown {
                lower_bound: a + b + 1,
            }));
        }
        let x = if sides[0].walker.cur.len() <= sides[1].walker.cur.len() {
            0
        } else {
            1
        };
        let bytes = (sides[0].seen.len() + sides[1].seen.len()) as u64 * 2 * per
            + sides[x].walker.next_step_bytes();
        if bytes > opts.max_bytes {
            return Ok(Err(Error::LimitExceeded {
                last_completed_radius: a + b,
                reason: format!("norm search needs about {bytes} bytes"),
            }));
        }
        sides[x].walker.step()?;
        let r = sides[x].walker.radius;
        let (mine, other) = if x == 0 {
            let (l, rr) = sides.split_at_mut(1);
            (&mut l[0], &rr[0])
        } else {
            let (l, rr) = sides.split_at_mut(1);
            (&mut rr[0], &l[0])
        };
        for y in &mine.walker.cur {
            if let Some(&j) = other.seen.get(y) {
                best = Some(best.map_or(r + j, |d: usize| d.min(r + j)));
            }
            mine.seen.insert(y.clone(), r);
        }
    }
}
