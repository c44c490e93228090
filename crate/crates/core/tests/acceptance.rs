//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero on any failure.
//!
//! Every check is exact; the only tolerance is the runtime ceiling per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use secnc_core::audit::{self, ReliabilityOptions, SecrecyOptions};
use secnc_core::gf::{FieldParams, Gf, PrimeField};
use secnc_core::linalg::{enumerate, expand, rank_distance, MatrixFq};
use secnc_core::network_sim::{lift, noncoherent_decode};
use secnc_core::rankmetric::{all_messages, GabidulinCode};
use secnc_core::secure_scheme::{enumerate_inputs, SchemeInstance, SchemeParams};
use secnc_core::{Elem, Error};

/// Leakage must be exactly zero, not merely small.
const LEAKAGE_TOLERANCE: f64 = 0.0;
const BUDGET: u64 = 1 << 22;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn scheme() -> SchemeInstance {
    SchemeInstance::build(SchemeParams::binary(4, 4, 1, 1, 1).unwrap()).unwrap()
}

fn mrd_distance() -> Outcome {
    let field = Gf::binary(4).unwrap();
    let mut seen = Vec::new();
    for k in 1..=3 {
        let code = GabidulinCode::with_default_points(field.clone(), 4, k).unwrap();
        // independent count: smallest rank over every nonzero codeword
        let min = all_messages(&field, k, BUDGET)
            .unwrap()
            .into_iter()
            .filter(|u| u.iter().any(|e| *e != Elem::ZERO))
            .map(|u| expand(&field, &code.encode(&u).unwrap()).rank())
            .min()
            .unwrap();
        ensure(min == 4 - k + 1, || format!("k={k}: min rank {min}, expected {}", 4 - k + 1))?;
        let lib = code.min_rank_distance(BUDGET).unwrap();
        ensure(lib == min, || format!("k={k}: library distance {lib} disagrees with {min}"))?;
        seen.push(format!("k={k}:d={min}"));
    }
    Ok(seen.join(" "))
}

fn decode_radius_one() -> Outcome {
    let field = Gf::binary(4).unwrap();
    let base = field.base();
    let code = GabidulinCode::with_default_points(field.clone(), 4, 2).unwrap();
    let messages = all_messages(&field, 2, BUDGET).unwrap();
    let codewords: Vec<MatrixFq> = messages.iter().map(|u| expand(&field, &code.encode(u).unwrap())).collect();
    let errors = enumerate::rank_bounded(base, 4, 4, 1, BUDGET).unwrap();
    ensure(errors.len() == 226, || format!("{} rank<=1 matrices, expected 226", errors.len()))?;
    let bad: usize = (0..messages.len())
        .into_par_iter()
        .map(|ui| {
            let mut bad = 0;
            for e in &errors {
                let y = codewords[ui].add(e).unwrap();
                let received = secnc_core::linalg::contract(&field, &y).unwrap();
                let decoded = code.decode(&received, 1).unwrap();
                let oracle: Vec<usize> = (0..codewords.len())
                    .filter(|&c| rank_distance(&codewords[c], &y).unwrap() <= 1)
                    .collect();
                if decoded.message() != Some(&messages[ui][..]) || oracle != [ui] {
                    bad += 1;
                }
            }
            bad
        })
        .sum();
    ensure(bad == 0, || format!("{bad} of {} cases disagree", messages.len() * errors.len()))?;
    // the library's brute-force decoder agrees with the test-side enumeration on a sample
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let ui = rng.gen_range(0..messages.len());
        let e = &errors[rng.gen_range(0..errors.len())];
        let y = secnc_core::linalg::contract(&field, &codewords[ui].add(e).unwrap()).unwrap();
        let listed = audit::brute_force_decode(&code, &y, 1, BUDGET).unwrap();
        ensure(listed == vec![messages[ui].clone()], || "library oracle disagrees".into())?;
    }
    Ok(format!("{} cases, 0 failures, oracle agrees", messages.len() * errors.len()))
}

fn reliability() -> Outcome {
    let opts = ReliabilityOptions { random_transfers: 20, ..Default::default() };
    let r = audit::reliability_audit(&scheme(), &opts, &mut ChaCha8Rng::seed_from_u64(3)).map_err(|e| e.to_string())?;
    ensure(r.transfers == 21 && r.exhaustive, || "audit did not cover identity + 20 transfers".into())?;
    ensure(r.cases == 256 * (226 + 20 * 466), || format!("{} cases", r.cases))?;
    ensure(r.failures == 0, || r.render())?;
    Ok(format!("{} transfers, {} cases, 0 failures", r.transfers, r.cases))
}

fn secrecy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let good = audit::secrecy_audit(&scheme(), &SecrecyOptions::default(), &mut rng).map_err(|e| e.to_string())?;
    ensure(good.records.len() == 15, || format!("{} eavesdroppers", good.records.len()))?;
    ensure(good.records.iter().all(|r| r.exact_zero && r.leakage_bits <= LEAKAGE_TOLERANCE), || good.render())?;
    let broken = SchemeInstance::build_non_mrd(SchemeParams::binary(4, 4, 1, 1, 1).unwrap()).unwrap();
    let bad = audit::secrecy_audit(&broken, &SecrecyOptions::default(), &mut rng).map_err(|e| e.to_string())?;
    ensure(bad.max_leakage() > 0.0, || "negative control leaked nothing".into())?;
    Ok(format!(
        "15 B, max leakage {} bits; broken variant leaks {:.3} bits",
        good.max_leakage(),
        bad.max_leakage()
    ))
}

fn erasure() -> Outcome {
    let inst = scheme();
    let field = inst.field();
    let reps = enumerate::full_rank_rref(field.base(), 2, 4, BUDGET).unwrap();
    ensure(reps.len() == 35, || format!("{} representatives", reps.len()))?;
    let (msgs, vs) = enumerate_inputs(&inst, BUDGET).unwrap();
    let mut cases = 0;
    for a in &reps {
        for s in &msgs {
            for v in &vs {
                let x = expand(field, &inst.encode_with_randomness(s, v).unwrap());
                let out = inst.erasure_decode(&a.mul(&x).unwrap(), a).unwrap();
                ensure(out.message() == Some(&s[..]), || format!("A'={a:?} S={s:?} V={v:?}"))?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases, 0 failures"))
}

fn rate_boundary() -> Outcome {
    let mut checked = 0;
    for n in 3..=8usize {
        for t in 0..=2usize {
            for mu in 0..=2usize {
                let Some(k) = n.checked_sub(2 * t + mu).filter(|&k| k >= 1) else { continue };
                let field = |m| FieldParams::with_default_modulus(2, m).unwrap();
                let at = SchemeParams::new(field(n), n, t, mu, k);
                ensure(SchemeInstance::build(at).is_ok(), || format!("rejected n={n} t={t} mu={mu} k={k}"))?;
                let over = SchemeParams::new(field(n), n, t, mu, k + 1);
                ensure(matches!(over.validate(), Err(Error::RateBound { .. })), || format!("accepted k={} at n={n} t={t} mu={mu}", k + 1))?;
                let short = SchemeParams::new(field(n - 1), n, t, mu, k);
                ensure(matches!(short.validate(), Err(Error::PacketLength { .. })), || format!("accepted m={} at n={n}", n - 1))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} parameter sets"))
}

fn noncoherent() -> Outcome {
    let inst = scheme();
    let field = inst.field();
    let base = field.base();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for trial in 0..1000 {
        let s = inst.random_message(&mut rng);
        let x = inst.encode(&s, &mut rng).unwrap();
        let a = MatrixFq::random_full_rank(base, 4, 4, &mut rng);
        let d = MatrixFq::random(base, 4, 1, &mut rng);
        let z = MatrixFq::random(base, 1, 8, &mut rng);
        let y = a.mul(&lift(field, &x)).unwrap().add(&d.mul(&z).unwrap()).unwrap();
        let out = noncoherent_decode(&inst, &y).map_err(|e| e.to_string())?;
        ensure(out.message() == Some(&s[..]), || format!("trial {trial}: {out:?}"))?;
        if trial % 10 == 0 {
            let candidates = audit::brute_force_noncoherent(&inst, &y, BUDGET).map_err(|e| e.to_string())?;
            ensure(candidates == vec![s.clone()], || format!("trial {trial}: oracle gives {candidates:?}"))?;
            checked += 1;
        }
    }
    Ok(format!("1000 trials recovered, {checked} oracle-checked"))
}

fn field_axioms() -> Result<usize, String> {
    let mut fields = Vec::new();
    for q in (2u32..=256).filter(|&q| secnc_core::gf::is_prime(q)) {
        let mut m = 1;
        while (q as u64).pow(m as u32) <= 256 {
            fields.push((q, m));
            m += 1;
        }
    }
    fields.par_iter().try_for_each(|&(q, m)| {
        let f = Gf::new(FieldParams::with_default_modulus(q, m).unwrap());
        let all: Vec<Elem> = f.elements().collect();
        let order = all.len();
        for &a in &all {
            for &b in &all {
                let ab = f.mul(a, b);
                ensure(ab == f.mul(b, a) && f.add(a, b) == f.add(b, a), || format!("GF({q}^{m}) commutativity"))?;
                for &c in &all {
                    ensure(f.mul(ab, c) == f.mul(a, f.mul(b, c)), || format!("GF({q}^{m}) mul associativity"))?;
                    ensure(f.add(f.add(a, b), c) == f.add(a, f.add(b, c)), || format!("GF({q}^{m}) add associativity"))?;
                    ensure(f.mul(a, f.add(b, c)) == f.add(ab, f.mul(a, c)), || format!("GF({q}^{m}) distributivity"))?;
                }
            }
            ensure(f.add(a, Elem::ZERO) == a && f.mul(a, Elem::ONE) == a, || format!("GF({q}^{m}) identities"))?;
            ensure(f.add(a, f.neg(a)) == Elem::ZERO, || format!("GF({q}^{m}) additive inverse"))?;
            if a != Elem::ZERO {
                ensure(f.mul(a, f.inv(a).unwrap()) == Elem::ONE, || format!("GF({q}^{m}) inverse"))?;
            }
        }
        // some element generates all nonzero elements
        let cyclic = all.iter().filter(|&&a| a != Elem::ZERO).any(|&a| {
            let mut p = a;
            let mut k = 1;
            while p != Elem::ONE {
                p = f.mul(p, a);
                k += 1;
            }
            k == order - 1
        });
        ensure(cyclic, || format!("GF({q}^{m}) multiplicative group not cyclic"))
    })?;
    Ok(fields.len())
}

fn metric_axioms() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..10_000 {
        let q = [2u32, 3, 5][i % 3];
        let f = PrimeField::new(q).unwrap();
        let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let x = MatrixFq::random(f, r, c, &mut rng);
        let y = if i % 7 == 0 { x.clone() } else { MatrixFq::random(f, r, c, &mut rng) };
        let z = MatrixFq::random(f, r, c, &mut rng);
        let d = |a: &MatrixFq, b: &MatrixFq| rank_distance(a, b).unwrap();
        ensure((d(&x, &y) == 0) == (x == y), || "identity of indiscernibles".into())?;
        ensure(d(&x, &y) == d(&y, &x), || "symmetry".into())?;
        ensure(d(&x, &z) <= d(&x, &y) + d(&y, &z), || "triangle inequality".into())?;
    }
    Ok(())
}

fn encoder_views() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let insts = [
        scheme(),
        SchemeInstance::build(SchemeParams::binary(6, 6, 1, 1, 3).unwrap()).unwrap(),
        SchemeInstance::build(SchemeParams::binary(8, 7, 2, 2, 1).unwrap()).unwrap(),
    ];
    for i in 0..1000 {
        let inst = &insts[i % insts.len()];
        let s = inst.random_message(&mut rng);
        let v = inst.random_randomness(&mut rng);
        ensure(
            inst.encode_with_randomness(&s, &v).unwrap() == inst.encode_via_transform(&s, &v).unwrap(),
            || format!("views differ for S={s:?} V={v:?}"),
        )?;
    }
    Ok(())
}

fn properties() -> Outcome {
    let fields = field_axioms()?;
    metric_axioms()?;
    encoder_views()?;
    Ok(format!("{fields} fields exhaustive, 10000 metric triples, 1000 encoder views"))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 8] = [
        ("1 MRD distance of Gabidulin codes, n=m=4, k=1..3", 10, mrd_distance),
        ("2 unique decoding within radius 1, [4,2] code", 60, decode_radius_one),
        ("3 zero-error scheme, identity + 20 random transfers", 60, reliability),
        ("4 perfect secrecy over all 15 eavesdroppers", 10, secrecy),
        ("5 erasure decoding over all 35 reduced channels", 30, erasure),
        ("6 rate and packet-length boundary", 10, rate_boundary),
        ("7 noncoherent decoding with lifting", 120, noncoherent),
        ("8 field, metric and encoder-view properties", 120, properties),
    ];
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > Duration::from_secs(limit) => {
                Err(format!("{detail}; took {:.1}s, limit {limit}s", elapsed.as_secs_f64()))
            }
            other => other,
        };
        match result {
            Ok(detail) => println!("PASS criterion {name}: {detail} ({:.2}s)", elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why} ({:.2}s)", elapsed.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
