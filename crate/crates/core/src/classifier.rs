//! Heuristic growth classification of finite tables, and the report comparing
//! it with the algebraic prediction (quasi-unipotent iff polynomial).
//!
//! Two least-squares lines are fitted over a window of radii: `log2 count`
//! against `n` (slope `alpha`) and against `log2 n` (slope `degree`). The
//! table is called exponential when `alpha >= alpha_min` and the first line
//! fits strictly better.

use serde_json::{json, Value};

use crate::ball::BallOptions;
use crate::conjugacy::conjugacy_growth;
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::spectral::is_quasi_unipotent;

pub const DEFAULT_ALPHA_MIN: f64 = 0.1;
const MIN_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthKind {
    Exponential { rate: f64 },
    PolynomiallyBounded { degree: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthVerdict {
    pub kind: GrowthKind,
    pub alpha: f64,
    pub degree: f64,
    /// Root-mean-square residual of the exponential fit.
    pub residual_exp: f64,
    /// Root-mean-square residual of the polynomial fit.
    pub residual_poly: f64,
    pub window: (usize, usize),
}

impl GrowthVerdict {
    pub fn is_exponential(&self) -> bool {
        matches!(self.kind, GrowthKind::Exponential { .. })
    }

    pub fn to_json(&self) -> Value {
        let verdict = match self.kind {
            GrowthKind::Exponential { .. } => "exponential",
            GrowthKind::PolynomiallyBounded { .. } => "polynomially_bounded",
        };
        json!({
            "verdict": verdict,
            "alpha": self.alpha,
            "degree": self.degree,
            "residuals": {"exponential": self.residual_exp, "polynomial": self.residual_poly},
            "window": [self.window.0, self.window.1],
        })
    }
}

/// Slope and RMS residual of the least-squares line through `pts`.
fn fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let icept = my - slope * mx;
    let ssr: f64 = pts.iter().map(|p| (p.1 - icept - slope * p.0).powi(2)).sum();
    (slope, (ssr / n).sqrt())
}

/// Upper half of the radii, excluding 0.
pub fn default_window(table: &[(usize, u64)]) -> Option<(usize, usize)> {
    let last = table.last()?.0;
    Some((last.div_ceil(2).max(1), last))
}

pub fn classify_growth(
    table: &[(usize, u64)],
    window: Option<(usize, usize)>,
    alpha_min: f64,
) -> Result<GrowthVerdict> {
    if table.iter().any(|&(_, c)| c == 0) {
        return Err(Error::Invalid("counts must be positive".into()));
    }
    if table.windows(2).any(|w| w[1].1 < w[0].1) {
        return Err(Error::Invalid("counts must be nondecreasing".into()));
    }
    let window = window
        .or_else(|| default_window(table))
        .ok_or_else(|| Error::Invalid("empty table".into()))?;
    let pts: Vec<(usize, u64)> = table
        .iter()
        .copied()
        .filter(|&(n, _)| n >= window.0.max(1) && n <= window.1)
        .collect();
    if pts.len() < MIN_POINTS {
        return Err(Error::Invalid(format!(
            "window [{}, {}] has {} usable points; need {MIN_POINTS}",
            window.0,
            window.1,
            pts.len()
        )));
    }
    let exp_pts: Vec<(f64, f64)> = pts.iter().map(|&(n, c)| (n as f64, (c as f64).log2())).collect();
    let poly_pts: Vec<(f64, f64)> = pts
        .iter()
        .map(|&(n, c)| ((n as f64).log2(), (c as f64).log2()))
        .collect();
    let (alpha, residual_exp) = fit(&exp_pts);
    let (degree, residual_poly) = fit(&poly_pts);
    let kind = if alpha >= alpha_min && residual_exp < residual_poly {
        GrowthKind::Exponential { rate: alpha }
    } else {
        GrowthKind::PolynomiallyBounded { degree }
    };
    Ok(GrowthVerdict {
        kind,
        alpha,
        degree,
        residual_exp,
        residual_poly,
        window,
    })
}

#[derive(Debug, Clone)]
pub struct DichotomyReport {
    pub quasi_unipotent: bool,
    pub gamma: GrowthVerdict,
    pub gamma_c: GrowthVerdict,
    pub agreement: bool,
    /// `gamma^c(n) = gamma(n)` on every computed radius.
    pub gamma_c_equals_gamma: bool,
    pub ball_sizes: Vec<u64>,
    pub conj_classes: Vec<u64>,
    /// Radii actually completed, when the budget stopped the computation early.
    pub truncated_at: Option<usize>,
}

impl DichotomyReport {
    pub fn to_json(&self) -> Value {
        json!({
            "quasi_unipotent": self.quasi_unipotent,
            "gamma": self.gamma.to_json(),
            "gamma_c": self.gamma_c.to_json(),
            "agreement": self.agreement,
            "gamma_c_equals_gamma": self.gamma_c_equals_gamma,
            "ball_sizes": self.ball_sizes,
            "conj_classes": self.conj_classes,
            "truncated_at": self.truncated_at,
        })
    }
}

pub fn dichotomy_report(spec: &GroupSpec, nmax: usize, opts: &BallOptions) -> Result<DichotomyReport> {
    let quasi_unipotent = is_quasi_unipotent(spec.phi())?;
    let t = conjugacy_growth(spec, nmax, opts)?;
    let gamma: Vec<(usize, u64)> = t.radii.iter().copied().zip(t.ball_sizes.iter().copied()).collect();
    let gamma_c: Vec<(usize, u64)> = t.radii.iter().copied().zip(t.conj_classes.iter().copied()).collect();
    let gv = classify_growth(&gamma, None, DEFAULT_ALPHA_MIN)?;
    let cv = classify_growth(&gamma_c, None, DEFAULT_ALPHA_MIN)?;
    let agreement = if quasi_unipotent {
        !gv.is_exponential() && !cv.is_exponential()
    } else {
        gv.is_exponential() && cv.is_exponential()
    };
    Ok(DichotomyReport {
        quasi_unipotent,
        gamma: gv,
        gamma_c: cv,
        agreement,
        gamma_c_equals_gamma: t.ball_sizes == t.conj_classes,
        truncated_at: t.truncated.as_ref().map(|_| t.radius()),
        ball_sizes: t.ball_sizes,
        conj_classes: t.conj_classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z3(n: usize) -> u64 {
        let n = n as u64;
        (4 * n * n * n + 6 * n * n + 8 * n + 3) / 3
    }

    #[test]
    fn cubic_is_polynomial() {
        let t: Vec<(usize, u64)> = (0..=20).map(|n| (n, z3(n))).collect();
        let v = classify_growth(&t, None, DEFAULT_ALPHA_MIN).unwrap();
        assert!(!v.is_exponential());
        assert!((v.degree - 3.0).abs() <= 0.5, "{v:?}");
    }

    #[test]
    fn constant_is_degree_zero() {
        let t: Vec<(usize, u64)> = (0..=10).map(|n| (n, 1)).collect();
        let v = classify_growth(&t, None, DEFAULT_ALPHA_MIN).unwrap();
        assert_eq!(v.kind, GrowthKind::PolynomiallyBounded { degree: 0.0 });
    }

    #[test]
    fn sol_balls_are_exponential() {
        let g = GroupSpec::from_i64(&[&[2, 1], &[1, 1]]).unwrap();
        let b = crate::ball::enumerate_ball(&g, 14, &BallOptions::default());
        let t: Vec<(usize, u64)> = b.radii.iter().copied().zip(b.counts.iter().copied()).collect();
        let v = classify_growth(&t, Some((6, 14)), DEFAULT_ALPHA_MIN).unwrap();
        assert!(v.is_exponential() && v.alpha > 0.0, "{v:?}");
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(classify_growth(&[(0, 1), (1, 3), (2, 2), (3, 4), (4, 5)], None, 0.1).is_err());
        assert!(classify_growth(&[(0, 1), (1, 3)], None, 0.1).is_err());
        assert!(classify_growth(&[(0, 0), (1, 3), (2, 4), (3, 5), (4, 6)], None, 0.1).is_err());
    }

    #[test]
    fn z3_report() {
        let z = GroupSpec::from_i64(&[&[1, 0], &[0, 1]]).unwrap();
        let r = dichotomy_report(&z, 12, &BallOptions::default()).unwrap();
        assert!(r.quasi_unipotent && r.agreement && r.gamma_c_equals_gamma);
    }
}
