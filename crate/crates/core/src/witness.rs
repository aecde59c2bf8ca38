//! Families of pairwise non-conjugate short elements: `(t u, 0)` for
//! `t = 1..=m`, where `u` is a Dirichlet approximation of `q v` for a
//! contracting eigenvector `v`. Every `t u` stays within `sqrt(k)` of the
//! contracting line, so its certificate is short, while a conjugacy between
//! `t u` and `t' u` would give `phi^r` the rational eigenvalue `t'/t`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::ball::BallOptions;
use crate::certificate::CertificateBuilder;
use crate::conjugacy::{brute_force_conjugate, conjugacy_growth, ConjugacyContext};
use crate::diophantine::{dirichlet_approx, DirichletResult};
use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec, Word};
use crate::interval::RatInterval;
use crate::json::{element_to_json, int_to_json, ints_to_json};
use crate::matrix::IntMatrix;
use crate::spectral::{contracting_vector, is_quasi_unipotent};

/// Verification fails when the fitted `C` exceeds this.
pub const C_LIMIT: f64 = 12.0;
/// Attempts at increasing precision before giving up.
const PRECISION_RETRIES: usize = 4;

#[derive(Debug, Clone)]
pub struct WitnessFamily {
    pub n: u32,
    pub k: usize,
    pub m: u64,
    /// Unit contracting vector (Euclidean norm), coordinatewise enclosures.
    pub v: Vec<RatInterval>,
    pub q: u64,
    pub u: Vec<BigInt>,
    pub elements: Vec<Element>,
    pub certificates: Vec<Word>,
    pub dirichlet: DirichletResult,
}

/// `max { m : m^(k+1) <= 2^n }`.
pub fn family_size(n: u32, k: usize) -> u64 {
    let target = BigInt::one() << n as usize;
    let e = k as u32 + 1;
    let (mut lo, mut hi) = (1u64, 1u64 << (n / e + 1).min(63));
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if num_traits::pow(BigInt::from(mid), e as usize) <= target {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

/// Outward rounding to multiples of `2^-bits`.
fn round_out(x: &RatInterval, bits: usize) -> RatInterval {
    let s = BigRational::from_integer(BigInt::one() << bits);
    let lo = (&x.lo * &s).floor() / &s;
    let hi = (&x.hi * &s).ceil() / &s;
    RatInterval::new(lo, hi)
}

/// Enclosure of the contracting eigenvector scaled to Euclidean length 1,
/// each coordinate of width at most about `precision`.
fn unit_vector(phi: &IntMatrix, precision: &BigRational) -> Result<Vec<RatInterval>> {
    let k = phi.dim();
    let cv = contracting_vector(phi, &(precision / BigRational::from_integer(BigInt::from(16 * k))))?;
    let iv = cv.intervals();
    let mut norm2 = RatInterval::point(BigRational::zero());
    for x in &iv {
        norm2 = &norm2 + &(x * x);
    }
    let bits = precision.denom().bits() as u32 + 8;
    let norm = norm2.sqrt(bits);
    let bits = bits as usize + 4;
    iv.iter()
        .map(|x| {
            x.div(&norm)
                .map(|y| round_out(&y, bits))
                .ok_or_else(|| Error::Internal("contracting vector has zero norm".into()))
        })
        .collect()
}

/// Builds the family for scale `n`: `m = floor(2^(n/(k+1)))`, `(q, u)` from
/// the smallest Dirichlet approximation of the unit contracting vector, and
/// certificates for each `t u`.
pub fn build_witness_family(spec: &GroupSpec, n: u32, opts: &BallOptions) -> Result<WitnessFamily> {
    if is_quasi_unipotent(spec.phi())? {
        return Err(Error::QuasiUnipotent);
    }
    let k = spec.k();
    let m = family_size(n, k);
    if m < 2 {
        return Err(Error::Invalid(format!("n = {n} gives family size m = {m}; need m >= 2")));
    }
    let mk = num_traits::pow(BigInt::from(m), k);
    // 1 / (4 m m^k) keeps the strict inequality stable
    let mut precision = BigRational::new(BigInt::one(), BigInt::from(4 * m) * &mk);
    let mut found = None;
    for _ in 0..PRECISION_RETRIES {
        let v = unit_vector(spec.phi(), &precision)?;
        match dirichlet_approx(&v, m, opts.parallelism) {
            Ok(d) => {
                found = Some((v, d));
                break;
            }
            Err(Error::InsufficientPrecision) => precision = &precision * &precision,
            Err(e) => return Err(e),
        }
    }
    let (v, dir) = found.ok_or(Error::InsufficientPrecision)?;
    let u = dir.p.clone();
    if u.iter().all(Zero::is_zero) {
        return Err(Error::Internal("Dirichlet vector u is zero".into()));
    }
    // ||m (q v - u)||_2^2 <= k, hence the same for every t <= m
    let qr = BigRational::from_integer(BigInt::from(dir.q));
    let mr = BigRational::from_integer(BigInt::from(m));
    let mut dev = RatInterval::point(BigRational::zero());
    for (vi, ui) in v.iter().zip(&u) {
        let d = &RatInterval::new(&vi.lo * &qr, &vi.hi * &qr) - &RatInterval::from_int(ui);
        let d = d.scale(&mr);
        dev = &dev + &(&d * &d);
    }
    if dev.hi > BigRational::from_integer(BigInt::from(k)) {
        return Err(Error::Internal("family leaves the sqrt(k) tube".into()));
    }
    if BigInt::from(dir.q) > mk {
        return Err(Error::Internal("t q exceeds 2^n".into()));
    }
    let elements: Vec<Element> = (1..=m)
        .map(|t| {
            let tb = BigInt::from(t);
            Element::translation(u.iter().map(|x| x * &tb).collect())
        })
        .collect();
    let builder = CertificateBuilder::new(spec)?;
    let certificates = opts
        .parallelism
        .map(&elements, |g| builder.certificate(g).map(|c| c.word))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(WitnessFamily {
        n,
        k,
        m,
        v,
        q: dir.q,
        u,
        elements,
        certificates,
        dirichlet: dir,
    })
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub ball: BallOptions,
    /// Largest radius at which the `gamma^c` cross-check is attempted.
    pub cross_check_max_radius: usize,
    /// Radius of the brute-force spot check on the first pairs.
    pub spot_radius: usize,
    /// Number of leading elements whose pairs are spot-checked.
    pub spot_elements: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            ball: BallOptions::default(),
            cross_check_max_radius: 16,
            spot_radius: 6,
            spot_elements: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheck {
    pub radius: usize,
    pub gamma_c: u64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    pub pairwise_nonconjugate: bool,
    pub checked_pairs: usize,
    /// First conjugate pair found, 1-based.
    pub conjugate_pair: Option<(usize, usize)>,
    pub certificates_ok: bool,
    pub max_cert_length: usize,
    /// `max_cert_length / n`.
    pub fitted_c: BigRational,
    pub c_ok: bool,
    pub spot_checked_pairs: usize,
    pub spot_ok: bool,
    /// `None` when `ceil(C n)` is beyond the enumerable range.
    pub cross_check: Option<CrossCheck>,
    pub verified: bool,
}

impl WitnessReport {
    pub fn fitted_c_f64(&self) -> f64 {
        self.fitted_c.to_f64().unwrap_or(f64::NAN)
    }
}

/// Runs checks (a) to (d) on a family. Failures are reported, not raised.
pub fn verify_witness_family(
    spec: &GroupSpec,
    fam: &WitnessFamily,
    opts: &VerifyOptions,
) -> Result<WitnessReport> {
    let par = opts.ball.parallelism;
    let m = fam.elements.len();
    let ctx = ConjugacyContext::new(spec);
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let verdicts = par.map(&pairs, |&(i, j)| {
        ctx.are_conjugate(&fam.elements[i], &fam.elements[j])
            .map(|c| c.is_some())
    });
    let mut conjugate_pair = None;
    for (p, v) in pairs.iter().zip(verdicts) {
        if v? {
            conjugate_pair = Some((p.0 + 1, p.1 + 1));
            break;
        }
    }
    let certificates_ok = fam.certificates.len() == m
        && par.all(&(0..m).collect::<Vec<_>>(), |&i| {
            spec.evaluate_word(&fam.certificates[i]).ok().as_ref() == Some(&fam.elements[i])
        });
    let max_cert_length = fam.certificates.iter().map(|w| w.len()).max().unwrap_or(0);
    let n = fam.n.max(1);
    let fitted_c = BigRational::new(BigInt::from(max_cert_length), BigInt::from(n));
    let c_ok = fitted_c.to_f64().unwrap_or(f64::INFINITY) <= C_LIMIT;

    let lead = m.min(opts.spot_elements);
    let mut spot_checked_pairs = 0;
    let mut spot_ok = true;
    for i in 0..lead {
        for j in i + 1..lead {
            spot_checked_pairs += 1;
            let hit = brute_force_conjugate(spec, &fam.elements[i], &fam.elements[j], opts.spot_radius, &opts.ball)?;
            if hit.is_some() {
                spot_ok = false;
            }
        }
    }

    let radius = (&fitted_c * BigRational::from_integer(BigInt::from(n)))
        .ceil()
        .to_integer()
        .to_usize()
        .unwrap_or(usize::MAX);
    let cross_check = if radius <= opts.cross_check_max_radius {
        let t = conjugacy_growth(spec, radius, &opts.ball)?;
        if t.truncated.is_some() {
            None
        } else {
            let gamma_c = *t.conj_classes.last().unwrap_or(&0);
            Some(CrossCheck {
                radius,
                gamma_c,
                holds: gamma_c >= m as u64,
            })
        }
    } else {
        None
    };
    let pairwise_nonconjugate = conjugate_pair.is_none();
    let verified = pairwise_nonconjugate
        && certificates_ok
        && c_ok
        && spot_ok
        && cross_check.as_ref().is_none_or(|c| c.holds);
    Ok(WitnessReport {
        pairwise_nonconjugate,
        checked_pairs: pairs.len(),
        conjugate_pair,
        certificates_ok,
        max_cert_length,
        fitted_c,
        c_ok,
        spot_checked_pairs,
        spot_ok,
        cross_check,
        verified,
    })
}

impl WitnessFamily {
    pub fn to_json(&self, report: Option<&WitnessReport>) -> Value {
        let v: Vec<f64> = self.v.iter().map(|x| x.to_f64()).collect();
        let v_err = self
            .v
            .iter()
            .map(|x| x.radius().to_f64().unwrap_or(f64::NAN))
            .fold(0.0, f64::max);
        let mut out = json!({
            "n": self.n,
            "k": self.k,
            "m": self.m,
            "v": v,
            "v_err": v_err,
            "q": self.q,
            "u": ints_to_json(&self.u),
            "dirichlet_err": self.dirichlet.err.to_f64(),
            "elements": self.elements.iter().map(element_to_json).collect::<Vec<_>>(),
            "certificates": self.certificates.iter().map(|w| w.0.clone()).collect::<Vec<_>>(),
            "cert_lengths": self.certificates.iter().map(|w| w.len()).collect::<Vec<_>>(),
        });
        if let Some(r) = report {
            out["verification"] = json!({
                "pairwise_nonconjugate": r.pairwise_nonconjugate,
                "checked_pairs": r.checked_pairs,
                "conjugate_pair": r.conjugate_pair.map(|(a, b)| vec![a, b]),
                "certificates_ok": r.certificates_ok,
                "max_cert_length": r.max_cert_length,
                "fitted_C": r.fitted_c_f64(),
                "fitted_C_exact": {"num": int_to_json(r.fitted_c.numer()), "den": int_to_json(r.fitted_c.denom())},
                "C_within_limit": r.c_ok,
                "spot_checked_pairs": r.spot_checked_pairs,
                "spot_ok": r.spot_ok,
                "cross_check": r.cross_check.as_ref().map(|c| json!({
                    "radius": c.radius, "gamma_c": c.gamma_c, "holds": c.holds
                })),
                "verified": r.verified,
            });
        }
        out
    }
}

/// Rational roots of the characteristic polynomial of `phi^r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalEigenvalues {
    pub r: u32,
    pub roots: Vec<BigInt>,
}

/// For `r = 1..=rmax`, the rational (hence integer, the polynomial being
/// monic) roots of `charpoly(phi^r)`, found among the divisors of its
/// constant term.
pub fn rational_eigenvalue_check(phi: &IntMatrix, rmax: u32) -> Result<Vec<RationalEigenvalues>> {
    let det = phi.det();
    if det.abs() != BigInt::one() {
        return Err(Error::NotUnimodular { det: det.to_string() });
    }
    let mut out = Vec::new();
    let mut pow = IntMatrix::identity(phi.dim());
    for r in 1..=rmax {
        pow = pow.mul(phi);
        let cp = pow.charpoly();
        let c0 = cp[0].abs();
        let mut roots = Vec::new();
        // |c0| = |det|^r = 1
        let divisors: Vec<BigInt> = if c0.is_one() { vec![BigInt::one()] } else { divisors(&c0)? };
        for d in divisors {
            for cand in [d.clone(), -d] {
                if crate::poly::eval_rat(&cp, &BigRational::from_integer(cand.clone())).is_zero() {
                    roots.push(cand);
                }
            }
        }
        roots.sort();
        out.push(RationalEigenvalues { r, roots });
    }
    Ok(out)
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let n = n
        .to_u64()
        .filter(|&x| x <= 1 << 40)
        .ok_or_else(|| Error::Invalid("constant term too large to factor".into()))?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Ok(out)
}
