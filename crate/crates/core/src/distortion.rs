//! Empirical distortion of cyclic subgroups: two-sided bounds on `|u^N|`
//! for `N = 1, 2, 4, ...`, and a fit of `c` in
//! `log2(N+1) / c - eps <= |u^N| <= c log2(N+1) + eps`.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::ball::BallOptions;
use crate::certificate::{CertificateBuilder, Strategy};
use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};
use crate::json::element_to_json;
use crate::norm::{word_norm, Norm};

/// The log bound is reported as holding when the fitted `c` is at most this.
pub const C_MAX: f64 = 6.0;
/// Slopes of `log hi` against `log N` at least this count as undistorted.
const LINEAR_SLOPE: f64 = 0.85;
/// Samples below this `N` are left out of the slope fit.
const SLOPE_FROM: u64 = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistortionSample {
    pub n: u64,
    pub lo: usize,
    pub hi: usize,
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistortionKind {
    /// The two-sided log bound held.
    Logarithmic,
    /// `|u^N|` grows like `N^exponent` with `exponent < 1`.
    Power { exponent: f64 },
    Undistorted,
}

#[derive(Debug, Clone)]
pub struct DistortionProfile {
    pub u: Element,
    pub samples: Vec<DistortionSample>,
    pub c: f64,
    pub eps: f64,
    pub bound_holds: bool,
    /// Least-squares slope of `log hi` against `log N`, for `N >= 16`.
    pub exponent: Option<f64>,
    pub kind: DistortionKind,
    /// Largest digit bound used by a `phi`-adic certificate, if any.
    pub digit_bound: Option<i64>,
}

impl DistortionProfile {
    pub fn to_json(&self) -> Value {
        let samples: Vec<Value> = self
            .samples
            .iter()
            .map(|s| json!({"N": s.n, "lo": s.lo, "hi": s.hi, "exact": s.exact}))
            .collect();
        let kind = match self.kind {
            DistortionKind::Logarithmic => json!("logarithmic"),
            DistortionKind::Power { exponent } => json!({"power": exponent}),
            DistortionKind::Undistorted => json!("undistorted"),
        };
        json!({
            "u": element_to_json(&self.u),
            "samples": samples,
            "c": self.c,
            "eps": self.eps,
            "bound_holds": self.bound_holds,
            "exponent": self.exponent,
            "kind": kind,
            "digit_bound": self.digit_bound,
        })
    }
}

/// Smallest `n` such that some word of length `n` could reach `g`, from the
/// growth of `||vec||_inf` and `|shift|` along words.
pub fn growth_lower_bound(spec: &GroupSpec, g: &Element) -> usize {
    let gens = spec.generators();
    let c_gen = gens.iter().map(|x| x.sup_norm()).max().unwrap_or_default();
    let s_max = gens.iter().map(|x| x.shift.abs()).max().unwrap_or_default();
    let m = spec.phi().norm_inf().max(spec.phi_inv().norm_inf());
    let target = g.sup_norm();
    let shift = g.shift.abs();
    let step = num_traits::pow(m, s_max.to_usize().unwrap_or(0));
    // after n letters: ||vec|| <= c_gen (1 + step + ... + step^(n-1)), |shift| <= n s_max
    let mut n = 0usize;
    let mut reach = BigInt::zero();
    let mut term = c_gen.clone();
    while reach < target || BigInt::from(n) * &s_max < shift {
        if c_gen.is_zero() && s_max.is_zero() {
            break;
        }
        reach += &term;
        term *= &step;
        n += 1;
    }
    n
}

/// Samples `u^N` for `N = 1, 2, 4, ..., <= n_max`. Norms up to `cap` are
/// computed exactly.
pub fn distortion_profile(
    spec: &GroupSpec,
    u: &Element,
    n_max: u64,
    cap: usize,
    opts: &BallOptions,
) -> Result<DistortionProfile> {
    if u.is_identity() {
        return Err(Error::Invalid("distortion profile of the identity".into()));
    }
    if n_max == 0 {
        return Err(Error::Invalid("Nmax must be at least 1".into()));
    }
    let builder = CertificateBuilder::new(spec)?;
    let mut samples = Vec::new();
    let mut digit_bound: Option<i64> = None;
    let mut n = 1u64;
    while n <= n_max {
        let exp = i64::try_from(n).map_err(|_| Error::Invalid("N too large".into()))?;
        let g = spec.power(u, exp)?;
        let cert = builder.certificate(&g)?;
        if let Strategy::PhiAdic { digit_bound: b } = cert.strategy {
            digit_bound = Some(digit_bound.map_or(b, |d| d.max(b)));
        }
        let hi = cert.word.len();
        let search_cap = cap.min(hi);
        let sample = match word_norm(spec, &g, search_cap, opts)? {
            Norm::Exact(d) => DistortionSample {
                n,
                lo: d,
                hi: d,
                exact: true,
            },
            Norm::Unknown { lower_bound } => {
                let lo = lower_bound.max(growth_lower_bound(spec, &g)).min(hi);
                DistortionSample {
                    n,
                    lo,
                    hi,
                    exact: lo == hi,
                }
            }
        };
        samples.push(sample);
        n = match n.checked_mul(2) {
            Some(x) => x,
            None => break,
        };
    }
    let eps = samples[0].hi as f64;
    let c = fit_c(&samples, eps);
    let bound_holds = c <= C_MAX;
    let exponent = slope(&samples);
    let kind = if bound_holds {
        DistortionKind::Logarithmic
    } else {
        match exponent {
            Some(e) if e >= LINEAR_SLOPE => DistortionKind::Undistorted,
            Some(e) => DistortionKind::Power { exponent: e },
            None => DistortionKind::Undistorted,
        }
    };
    Ok(DistortionProfile {
        u: u.clone(),
        samples,
        c,
        eps,
        bound_holds,
        exponent,
        kind,
        digit_bound,
    })
}

/// Least `c >= 1` with `L/c - eps <= lo` and `hi <= c L + eps` on every
/// sample, where `L = log2(N+1)`.
fn fit_c(samples: &[DistortionSample], eps: f64) -> f64 {
    let mut c: f64 = 1.0;
    for s in samples {
        let l = ((s.n + 1) as f64).log2();
        c = c.max((s.hi as f64 - eps) / l);
        c = c.max(l / (s.lo as f64 + eps));
    }
    c
}

fn slope(samples: &[DistortionSample]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.n >= SLOPE_FROM && s.hi > 0)
        .map(|s| ((s.n as f64).ln(), (s.hi as f64).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growth_bound_examples() {
        let z = GroupSpec::from_i64(&[&[1, 0], &[0, 1]]).unwrap();
        assert_eq!(growth_lower_bound(&z, &Element::from_i64(&[37, 0], 0)), 37);
        assert_eq!(growth_lower_bound(&z, &Element::from_i64(&[0, 0], 5)), 5);
        let sol = GroupSpec::from_i64(&[&[2, 1], &[1, 1]]).unwrap();
        // 1 + 3 + 9 = 13 < 20 <= 40
        assert_eq!(growth_lower_bound(&sol, &Element::from_i64(&[20, 0], 0)), 4);
        assert_eq!(growth_lower_bound(&sol, &sol.identity()), 0);
    }

    #[test]
    fn sol_is_logarithmic() {
        let g = GroupSpec::from_i64(&[&[2, 1], &[1, 1]]).unwrap();
        let p = distortion_profile(&g, &Element::from_i64(&[1, 0], 0), 64, 10, &BallOptions::default()).unwrap();
        assert!(p.bound_holds, "{p:?}");
        assert_eq!(p.kind, DistortionKind::Logarithmic);
        assert!(p.samples.iter().all(|s| s.lo <= s.hi));
        assert!(p.samples.iter().filter(|s| s.exact).count() >= 3);
    }

    #[test]
    fn abelian_is_undistorted() {
        let z = GroupSpec::from_i64(&[&[1, 0], &[0, 1]]).unwrap();
        let p = distortion_profile(&z, &Element::from_i64(&[1, 0], 0), 256, 8, &BallOptions::default()).unwrap();
        assert!(!p.bound_holds);
        assert_eq!(p.kind, DistortionKind::Undistorted);
        for s in &p.samples {
            assert_eq!((s.lo, s.hi), (s.n as usize, s.n as usize));
        }
    }
}
