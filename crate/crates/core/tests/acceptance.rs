//! The acceptance criteria, run in order with their runtime limits.
//! Prints one PASS/FAIL line per criterion and exits nonzero on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cgl_core::ball::{ball_elements, enumerate_ball, BallOptions};
use cgl_core::classifier::dichotomy_report;
use cgl_core::conjugacy::{
    are_conjugate, brute_force_conjugate, canonical_key, conjugates_within, finite_index_comparison,
    FiniteIndexEmbedding,
};
use cgl_core::diophantine::{brute_force_dirichlet, dirichlet_approx, exact};
use cgl_core::distortion::{distortion_profile, DistortionKind, C_MAX};
use cgl_core::witness::{build_witness_family, verify_witness_family, VerifyOptions, C_LIMIT};
use cgl_core::{Element, GroupSpec, IntMatrix, Parallelism};

type Outcome = Result<String, String>;

fn sol() -> GroupSpec {
    GroupSpec::from_i64(&[&[2, 1], &[1, 1]]).unwrap()
}

fn heis() -> GroupSpec {
    GroupSpec::from_i64(&[&[1, 1], &[0, 1]]).unwrap()
}

fn z3() -> GroupSpec {
    GroupSpec::from_i64(&[&[1, 0], &[0, 1]]).unwrap()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    // shifts of hyperbolic specs stay small: phi^s has entries ~ lambda^|s|
    let specs = [
        (sol(), 40),
        (heis(), 1_000_000),
        (z3(), 1_000_000),
        (GroupSpec::from_i64(&[&[0, 0, 1], &[1, 0, -1], &[0, 1, 0]]).unwrap(), 40),
    ];
    let mut triples = 0;
    for i in 0..10_000 {
        let (spec, smax) = &specs[i % specs.len()];
        let mut el = || {
            let v: Vec<i64> = (0..spec.k()).map(|_| rng.gen_range(-1_000_000..=1_000_000)).collect();
            Element::from_i64(&v, rng.gen_range(-smax..=*smax))
        };
        let (a, b, c) = (el(), el(), el());
        let m = |x: &Element, y: &Element| spec.multiply(x, y).map_err(e);
        check(m(&m(&a, &b)?, &c)? == m(&a, &m(&b, &c)?)?, || format!("associativity fails at {i}"))?;
        let id = spec.identity();
        check(m(&a, &id)? == a && m(&id, &a)? == a, || format!("identity fails at {i}"))?;
        let inv = spec.invert(&a).map_err(e)?;
        check(m(&a, &inv)?.is_identity() && m(&inv, &a)?.is_identity(), || format!("inverse fails at {i}"))?;
        let xg = spec.conjugate(&a, &b).map_err(e)?;
        check(xg.shift == a.shift, || format!("conjugate changes shift at {i}"))?;
        check(xg == m(&m(&b, &a)?, &inv_of(spec, &b)?)?, || format!("conjugate formula fails at {i}"))?;
        let lhs = spec.conjugate(&xg, &c).map_err(e)?;
        let rhs = spec.conjugate(&a, &m(&c, &b)?).map_err(e)?;
        check(lhs == rhs, || format!("conjugation is not an action at {i}"))?;
        triples += 1;
    }
    Ok(format!("{triples} triples over 4 specs"))
}

fn inv_of(spec: &GroupSpec, g: &Element) -> Result<Element, String> {
    spec.invert(g).map_err(e)
}

fn criterion_2() -> Outcome {
    let s = enumerate_ball(&sol(), 2, &BallOptions::default());
    check(s.counts == [1, 7, 33], || format!("SOL ball sizes {:?}", s.counts))?;
    let z = enumerate_ball(&z3(), 20, &BallOptions::default());
    check(z.is_complete() && z.counts.len() == 21, || "Z^3 ball truncated".into())?;
    for (n, c) in z.counts.iter().enumerate() {
        let n = n as u64;
        let want = (4 * n * n * n + 6 * n * n + 8 * n + 3) / 3;
        check(*c == want, || format!("Z^3 |B({n})| = {c}, closed form {want}"))?;
    }
    Ok(format!("SOL |B(1)|, |B(2)| = 7, 33; Z^3 |B(20)| = {}", z.counts[20]))
}

fn criterion_3() -> Outcome {
    let opts = BallOptions::default();
    let mut report = Vec::new();
    for (name, spec) in [("SOL", sol()), ("Heisenberg", heis())] {
        let b3 = ball_elements(&spec, 3, &opts).map_err(e)?;
        let b8 = ball_elements(&spec, 8, &opts).map_err(e)?;
        let (mut positives, mut brute_hits) = (0, 0);
        for (i, g) in b3.iter().enumerate() {
            let orbit = conjugates_within(&spec, g, &b8, Parallelism::default()).map_err(e)?;
            for (j, h) in b3.iter().enumerate() {
                let fast = are_conjugate(&spec, g, h).map_err(e)?;
                if let Some(x) = &fast {
                    positives += 1;
                    check(&spec.conjugate(g, x).map_err(e)? == h, || {
                        format!("{name}: conjugator for pair ({i},{j}) fails the recheck")
                    })?;
                }
                if orbit.contains(h) {
                    brute_hits += 1;
                    check(fast.is_some(), || format!("{name}: brute force finds a conjugator for ({i},{j})"))?;
                }
            }
        }
        // the batched orbit agrees with the query form on a sample
        for (i, g) in b3.iter().enumerate().step_by(17) {
            for h in b3.iter().step_by(13) {
                let single = brute_force_conjugate(&spec, g, h, 8, &opts).map_err(e)?;
                if let Some(x) = &single {
                    check(&spec.conjugate(g, x).map_err(e)? == h, || format!("{name}: brute conjugator {i} wrong"))?;
                }
                let orbit_hit = conjugates_within(&spec, g, &b8, Parallelism::Sequential).map_err(e)?.contains(h);
                check(single.is_some() == orbit_hit, || format!("{name}: brute force forms disagree"))?;
            }
        }
        report.push(format!(
            "{name}: {} pairs, {positives} conjugate, {brute_hits} found by brute force",
            b3.len() * b3.len()
        ));
    }
    Ok(format!("{}; 0 disagreements", report.join("; ")))
}

fn criterion_4() -> Outcome {
    let spec = sol();
    let i_minus = IntMatrix::identity(2).sub(spec.phi());
    check(i_minus.det().abs().is_one(), || "|det(I - phi)| != 1".into())?;
    let b6 = ball_elements(&spec, 6, &BallOptions::default()).map_err(e)?;
    let shift1: Vec<&Element> = b6.iter().filter(|g| g.shift == BigInt::one()).collect();
    let first = canonical_key(&spec, shift1[0]).map_err(e)?;
    for g in &shift1 {
        let k = canonical_key(&spec, g).map_err(e)?;
        check(k == first, || format!("{g:?} has a different key"))?;
    }
    Ok(format!("{} shift-1 elements of B(6), one key", shift1.len()))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let den: BigInt = BigInt::one() << 48u32;
    for i in 0..1000 {
        let k = rng.gen_range(1..=3usize);
        let m = rng.gen_range(2..=32u64);
        let c: Vec<BigRational> = (0..k)
            .map(|_| BigRational::new(BigInt::from(rng.gen_range(0..=(1u64 << 48))), den.clone()))
            .collect();
        let iv = exact(&c);
        let r = dirichlet_approx(&iv, m, Parallelism::default()).map_err(e)?;
        let b = brute_force_dirichlet(&iv, m).map_err(e)?;
        check(r.q >= 1 && r.q <= m.pow(k as u32), || format!("input {i}: q = {} out of range", r.q))?;
        let bound = BigRational::new(BigInt::one(), BigInt::from(m));
        let q = BigRational::from_integer(BigInt::from(r.q));
        for (ci, pi) in c.iter().zip(&r.p) {
            let err = (&q * ci - BigRational::from_integer(pi.clone())).abs();
            check(err < bound, || format!("input {i}: error {err} >= 1/{m}"))?;
        }
        check(r.q == b.q, || format!("input {i}: q = {}, oracle {}", r.q, b.q))?;
    }
    Ok("1000 inputs, all match the oracle".into())
}

fn criterion_6() -> Outcome {
    let spec = sol();
    let opts = BallOptions::default();
    let small = build_witness_family(&spec, 6, &opts).map_err(e)?;
    check(small.m == 4 && small.q == 6, || format!("n = 6: m = {}, q = {}", small.m, small.q))?;
    check(small.u == [BigInt::from(3), BigInt::from(-5)], || format!("n = 6: u = {:?}", small.u))?;

    let fam = build_witness_family(&spec, 18, &opts).map_err(e)?;
    check(fam.m == 64, || format!("n = 18: m = {}", fam.m))?;
    let rep = verify_witness_family(&spec, &fam, &VerifyOptions::default()).map_err(e)?;
    check(rep.checked_pairs == 2016, || format!("{} pairs checked", rep.checked_pairs))?;
    check(rep.pairwise_nonconjugate, || format!("conjugate pair {:?}", rep.conjugate_pair))?;
    check(rep.certificates_ok, || "certificates do not re-evaluate".into())?;
    check(rep.c_ok && rep.fitted_c_f64() <= C_LIMIT, || format!("fitted C = {}", rep.fitted_c_f64()))?;
    check(rep.verified, || "n = 18 family not verified".into())?;

    // largest n whose ceil(C n) ball is enumerable
    let fam9 = build_witness_family(&spec, 9, &opts).map_err(e)?;
    let rep9 = verify_witness_family(&spec, &fam9, &VerifyOptions::default()).map_err(e)?;
    let cc = rep9.cross_check.as_ref().ok_or("n = 9: no cross-check")?;
    check(rep9.verified && cc.holds && cc.gamma_c >= fam9.m, || format!("n = 9 cross-check {cc:?}"))?;
    Ok(format!(
        "n = 6: q = 6, u = (3,-5); n = 18: 2016 pairs, max length {}, C = {:.3}; n = 9: gamma^c({}) = {} >= {}",
        rep.max_cert_length,
        rep.fitted_c_f64(),
        cc.radius,
        cc.gamma_c,
        fam9.m
    ))
}

fn criterion_7() -> Outcome {
    let spec = sol();
    let opts = BallOptions::default();
    let mut sizes = Vec::new();
    for (n, want) in [(9u32, 8usize), (12, 16), (15, 32), (18, 64)] {
        let fam = build_witness_family(&spec, n, &opts).map_err(e)?;
        let vopts = VerifyOptions {
            cross_check_max_radius: 0,
            ..Default::default()
        };
        let rep = verify_witness_family(&spec, &fam, &vopts).map_err(e)?;
        check(rep.verified, || format!("n = {n} not verified"))?;
        check(fam.elements.len() == want, || format!("n = {n}: size {}", fam.elements.len()))?;
        check(want.ilog2() == n / 3, || format!("n = {n}: log2 size != n/3"))?;
        sizes.push(want);
    }
    Ok(format!("sizes {sizes:?}"))
}

fn criterion_8() -> Outcome {
    let opts = BallOptions::default();
    let h = dichotomy_report(&heis(), 25, &opts).map_err(e)?;
    check(h.quasi_unipotent && h.agreement, || format!("Heisenberg {:?}", h.to_json()))?;
    check((3.5..=4.5).contains(&h.gamma.degree), || format!("Heisenberg gamma degree {}", h.gamma.degree))?;
    check(!h.gamma_c.is_exponential() && h.gamma_c.degree <= 3.5, || {
        format!("Heisenberg gamma^c degree {}", h.gamma_c.degree)
    })?;
    let s = dichotomy_report(&sol(), 12, &opts).map_err(e)?;
    check(!s.quasi_unipotent && s.gamma.is_exponential() && s.gamma_c.is_exponential() && s.agreement, || {
        format!("SOL {:?}", s.to_json())
    })?;
    let z = dichotomy_report(&z3(), 20, &opts).map_err(e)?;
    check(z.quasi_unipotent && z.agreement && z.gamma_c_equals_gamma, || format!("Z^3 {:?}", z.to_json()))?;
    Ok(format!(
        "Heisenberg degrees {:.2} / {:.2}; SOL rates {:.3} / {:.3}; Z^3 gamma^c = gamma",
        h.gamma.degree, h.gamma_c.degree, s.gamma.alpha, s.gamma_c.alpha
    ))
}

fn criterion_9() -> Outcome {
    let opts = BallOptions::default();
    let emb = FiniteIndexEmbedding::new(&sol(), IntMatrix::identity(2), 2, None, 8).map_err(e)?;
    check(emb.index == BigInt::from(2) && emb.kconst == 2, || {
        format!("SOL: index {}, kconst {}", emb.index, emb.kconst)
    })?;
    let r = finite_index_comparison(&emb, 8, &opts).map_err(e)?;
    check(r.holds && r.rows.len() == 9, || format!("SOL rows {:?}", r.rows))?;
    for row in &r.rows {
        check(row.g_exact && row.bound == BigInt::from(3 * row.gamma_g), || format!("SOL row {row:?}"))?;
    }

    let two = IntMatrix::from_i64(&[&[2, 0], &[0, 2]]).unwrap();
    let emb = FiniteIndexEmbedding::new(&z3(), two, 2, None, 8).map_err(e)?;
    check(emb.index == BigInt::from(8), || format!("Z^3 index {}", emb.index))?;
    let z = finite_index_comparison(&emb, 10, &opts).map_err(e)?;
    check(z.holds && z.rows.len() == 11 && z.rows.iter().all(|r| r.g_exact), || {
        format!("Z^3 rows {:?}", z.rows)
    })?;
    Ok(format!(
        "SOL gamma_H^c(8) = {} <= 3 * {}; Z^3 (kconst {}) gamma_H^c(10) = {} <= 9 * {}",
        r.rows[8].gamma_h, r.rows[8].gamma_g, emb.kconst, z.rows[10].gamma_h, z.rows[10].gamma_g
    ))
}

fn criterion_10() -> Outcome {
    let opts = BallOptions::default();
    let u = Element::from_i64(&[1, 0], 0);
    let s = distortion_profile(&sol(), &u, 1024, 16, &opts).map_err(e)?;
    check(s.samples.last().map(|x| x.n) == Some(1024), || "SOL: N does not reach 2^10".into())?;
    check(s.bound_holds && s.c <= C_MAX && s.kind == DistortionKind::Logarithmic, || {
        format!("SOL c = {}", s.c)
    })?;
    let exact = s.samples.iter().filter(|x| x.exact).count();
    check(exact >= 3, || "SOL: too few exact spot checks".into())?;

    let z = distortion_profile(&z3(), &u, 1024, 16, &opts).map_err(e)?;
    check(!z.bound_holds && z.kind == DistortionKind::Undistorted, || format!("Z^3 kind {:?}", z.kind))?;

    // e1 is fixed by [[1,1],[0,1]], hence central
    let h = distortion_profile(&heis(), &u, 1024, 30, &opts).map_err(e)?;
    let exponent = match h.kind {
        DistortionKind::Power { exponent } => exponent,
        k => return Err(format!("Heisenberg kind {k:?}")),
    };
    check(!h.bound_holds && (0.35..=0.65).contains(&exponent), || format!("Heisenberg exponent {exponent}"))?;
    Ok(format!(
        "SOL c = {:.2} ({exact} exact samples); Z^3 undistorted (c = {:.1}); Heisenberg N^{exponent:.3}",
        s.c, z.c
    ))
}

fn main() -> ExitCode {
    let criteria: [(fn() -> Outcome, u64); 10] = [
        (criterion_1, 10),
        (criterion_2, 60),
        (criterion_3, 300),
        (criterion_4, 60),
        (criterion_5, 30),
        (criterion_6, 600),
        (criterion_7, 600),
        (criterion_8, 600),
        (criterion_9, 600),
        (criterion_10, 300),
    ];
    let mut failed = 0;
    for (i, (f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > Duration::from_secs(*limit) => Err(format!("{msg}; over the {limit} s limit")),
            o => o,
        };
        match outcome {
            Ok(msg) => println!("PASS criterion {}: {msg} [{:.1} s]", i + 1, took.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {}: {msg} [{:.1} s]", i + 1, took.as_secs_f64());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
