//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line with
//! its wall time against the allowed budget; run with `--nocapture` to see them.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use dehn_core::decision::{coset_decide, CosetOutcome};
use dehn_core::density::{
    cogrowth_profile, rho_exact, rho_sample, translation_check, MembershipPredicate, PredicateSpec,
    DEFAULT_ENUMERATION_CAP,
};
use dehn_core::enumerators::{EnumeratorKind, EnumeratorSpec, PowerSchedule};
use dehn_core::forcing::{certify_gs, run, verify_l, verify_m};
use dehn_core::gs::{dhat, rational, tail_bound, DegreeHistogram, GsCertificate, Rational};
use dehn_core::magnus::{magnus_embed, SeriesContext};
use dehn_core::words::{
    index_to_word, pair, sphere_size, unpair, word_to_index, Alphabet, Sphere, Word, WordIndex,
};
use dehn_core::zassenhaus::{degree, filtration_check, DegreeValue, EqualityOracle};
use dehn_core::ForcingConfig;
use num_traits::{Pow, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_word(rng: &mut ChaCha8Rng, rank: usize, max_len: usize) -> Word {
    let len = rng.random_range(0..=max_len);
    let r = rank as i64;
    let raw: Vec<i64> = (0..len)
        .map(|_| {
            let g = rng.random_range(1..=r);
            if rng.random_bool(0.5) {
                g
            } else {
                -g
            }
        })
        .collect();
    Word::from_signed(rank, raw).unwrap()
}

fn random_nontrivial(rng: &mut ChaCha8Rng, rank: usize, max_len: usize) -> Word {
    loop {
        let w = random_word(rng, rank, max_len);
        if !w.is_identity() {
            return w;
        }
    }
}

fn gs_threshold() -> Check {
    let a = Alphabet::new(2).unwrap();
    let t0 = rational(3, 5);
    let cert = GsCertificate::new(
        &DegreeHistogram::default(),
        dhat(&[], 2, a.rank()).unwrap(),
        t0,
    )
    .unwrap();
    ensure(cert.h_value == rational(-1, 5), || {
        format!("H = {}", cert.h_value)
    })?;
    ensure(cert.k == 6, || format!("k = {}", cert.k))?;
    Ok(format!("H = {}, k = {}", cert.h_value, cert.k))
}

fn tail_identity() -> Check {
    let mut worst = (0.0f64, 0, 0);
    let mut failing = Vec::new();
    for tenths in 1..=9i64 {
        let t = rational(tenths, 10);
        for k in 0..=10u64 {
            let closed = tail_bound(k, &t).unwrap();
            let mut sum = Rational::zero();
            for i in k..=k + 60 {
                sum += Rational::from_integer(((i - k) as i64).into()) * Pow::pow(&t, i as i32);
            }
            let gap = (closed - sum).to_f64().unwrap().abs();
            if gap > worst.0 {
                worst = (gap, tenths, k);
            }
            if gap > 1e-12 {
                failing.push(format!("t=0.{tenths},k={k}"));
            }
        }
    }
    let summary = format!("max gap {:.3e} at t=0.{} k={}", worst.0, worst.1, worst.2);
    ensure(failing.is_empty(), || {
        format!(
            "{summary}; {} of 99 cases exceed 1e-12, first {}",
            failing.len(),
            failing[0]
        )
    })?;
    Ok(summary)
}

fn magnus_zassenhaus() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (p, n) in [(2u32, 6usize), (3, 5)] {
        let ctx = SeriesContext::new(p, 2, n).unwrap();
        for _ in 0..500 {
            let u = random_word(&mut rng, 2, 12);
            let v = random_word(&mut rng, 2, 12);
            let lhs = magnus_embed(&u.multiply(&v).unwrap(), &ctx).unwrap();
            let rhs = magnus_embed(&u, &ctx)
                .unwrap()
                .mul(&magnus_embed(&v, &ctx).unwrap())
                .unwrap();
            ensure(lhs == rhs, || {
                format!("homomorphism fails for p={p}: {u} * {v}")
            })?;
        }
    }

    for p in [2u32, 3] {
        let ctx = SeriesContext::new(p, 2, 9).unwrap();
        let mut q = 1u32;
        while q <= 8 {
            for g in 1..=2 {
                let d = degree(&Word::generator(2, g).unwrap().pow(q as i64), &ctx).unwrap();
                ensure(d == DegreeValue::Finite(q), || {
                    format!("deg x{g}^{q} = {d:?} for p={p}")
                })?;
            }
            q *= p;
        }
    }

    let mut checked = 0;
    let mut undecided = 0;
    for p in [2u32, 3] {
        let ctx = SeriesContext::new(p, 2, 10).unwrap();
        for _ in 0..200 {
            let g = random_nontrivial(&mut rng, 2, 6);
            let h = random_nontrivial(&mut rng, 2, 6);
            let (DegreeValue::Finite(i), DegreeValue::Finite(j)) =
                (degree(&g, &ctx).unwrap(), degree(&h, &ctx).unwrap())
            else {
                continue;
            };
            let report = filtration_check(&[(g.clone(), h.clone())], i, j, &ctx).unwrap();
            ensure(report.is_clean(), || {
                format!(
                    "filtration law broken by ({g}, {h}): {:?}",
                    report.violations
                )
            })?;
            checked += report.checked;
            undecided += report.indeterminate.len();
        }
    }

    let x1 = Word::generator(2, 1).unwrap();
    let x2 = Word::generator(2, 2).unwrap();
    let c2 = Word::commutator(&x1, &x2).unwrap();
    let deep = [
        x1.pow(4),
        x2.pow(-4),
        Word::commutator(&c2, &x1).unwrap(),
        Word::commutator(&x2, &c2).unwrap(),
    ];
    let mut equal_pairs = 0;
    for n in 2..=3usize {
        let oracle = EqualityOracle::new(n, 2, 2).unwrap();
        for trial in 0..200 {
            let u = random_word(&mut rng, 2, 8);
            let w = random_word(&mut rng, 2, 8);
            let v = if trial % 2 == 0 {
                let c = deep[rng.random_range(0..deep.len())]
                    .conjugate_by(&random_word(&mut rng, 2, 4))
                    .unwrap();
                u.multiply(&c).unwrap()
            } else {
                random_word(&mut rng, 2, 8)
            };
            let eq = oracle.equal(&u, &v).unwrap();
            ensure(trial % 2 == 1 || eq, || {
                format!("{u} and {v} should agree mod D_{n}")
            })?;
            if eq {
                equal_pairs += 1;
                let right = oracle
                    .equal(&u.multiply(&w).unwrap(), &v.multiply(&w).unwrap())
                    .unwrap();
                let left = oracle
                    .equal(&w.multiply(&u).unwrap(), &w.multiply(&v).unwrap())
                    .unwrap();
                let inv = oracle.equal(&u.inverse(), &v.inverse()).unwrap();
                ensure(right && left && inv, || {
                    format!("congruence fails for {u}, {v}, {w} at n={n}")
                })?;
            }
        }
    }
    Ok(format!(
        "1000 products, {checked} filtration checks ({undecided} beyond truncation), {equal_pairs} congruent triples"
    ))
}

fn forcing_trace() -> Check {
    let family = vec![EnumeratorSpec {
        e: 0,
        kind: EnumeratorKind::GeneratorPowers {
            generator: 1,
            schedule: PowerSchedule::PowersOfP,
        },
    }];
    let cfg = ForcingConfig::new(
        Alphabet::new(2).unwrap(),
        2,
        vec![],
        rational(3, 5),
        family,
        12,
    )
    .unwrap();
    ensure(cfg.k() == 6, || format!("k = {}", cfg.k()))?;
    let state = run(&cfg).unwrap();
    let first = state.relators.first().ok_or("no relator emitted")?;
    let x1 = Word::generator(2, 1).unwrap();
    ensure(first.relator == x1.pow(-8), || {
        format!("first relator {}", first.relator)
    })?;
    ensure(
        index_to_word(&first.x1, 2) == x1.pow(8) && index_to_word(&first.x2, 2) == x1.pow(16),
        || "recorded pair is not (x1^8, x1^16)".into(),
    )?;
    ensure(first.degree == DegreeValue::Finite(8), || {
        format!("degree {:?}", first.degree)
    })?;
    let l = verify_l(&state.relators, cfg.k(), 16);
    ensure(l.passes(), || format!("verify_l: {l:?}"))?;
    let m = verify_m(&state, &cfg).unwrap();
    ensure(m.passes(), || format!("verify_m: {m:?}"))?;
    let gs = certify_gs(&state, &cfg).unwrap();
    let expected = rational(-1, 5) + Pow::pow(&rational(3, 5), 8i32);
    ensure(gs.passes() && gs.total_h == expected, || {
        format!("certify_gs: H = {}", gs.total_h)
    })?;
    Ok(format!(
        "x1^-8 at stage {}, H = {}",
        first.stage, gs.total_h
    ))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn forge(config: &Path, extra: &[&str], log: &Path) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_dehn"))
        .arg("forge")
        .arg("--config")
        .arg(config)
        .arg("--log")
        .arg(log)
        .args(extra)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!(
            "forge exited with {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        )
    })?;
    std::fs::read(log).map_err(|e| e.to_string())
}

fn determinism_and_resume() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut summary = Vec::new();
    for (name, cut) in [("worked.json", "5"), ("mixed.json", "10")] {
        let cfg = configs().join(name);
        let a = forge(&cfg, &[], &dir.path().join("a.jsonl"))?;
        let b = forge(&cfg, &[], &dir.path().join("b.jsonl"))?;
        ensure(a == b, || format!("{name}: two runs differ"))?;
        ensure(!a.is_empty(), || format!("{name}: empty log"))?;
        let ck = dir.path().join("ck.json");
        let ck_arg = ck.to_str().unwrap();
        forge(
            &cfg,
            &["--stage-budget", cut, "--checkpoint", ck_arg],
            &dir.path().join("c.jsonl"),
        )?;
        let resumed = forge(&cfg, &["--resume", ck_arg], &dir.path().join("d.jsonl"))?;
        ensure(a == resumed, || format!("{name}: resumed log differs"))?;
        summary.push(format!("{name} {} bytes", a.len()));
    }
    Ok(summary.join(", "))
}

fn density_exactness() -> Check {
    let pred = MembershipPredicate::compile(
        &PredicateSpec::Kernel { level: 2, p: 2 },
        &Alphabet::new(2).unwrap(),
    )
    .map_err(|e| e.to_string())?;
    let exact = rho_exact(&pred, 2, 2, DEFAULT_ENUMERATION_CAP).unwrap();
    ensure(exact.rho == rational(1, 3), || {
        format!("rho_2 = {}", exact.rho)
    })?;
    let s = rho_sample(&pred, 2, 2, 100_000, 1).unwrap();
    ensure(s.ci_low <= 1.0 / 3.0 && 1.0 / 3.0 <= s.ci_high, || {
        format!("1/3 outside [{}, {}]", s.ci_low, s.ci_high)
    })?;
    ensure(s.ci_low <= s.rho && s.rho <= s.ci_high, || {
        "estimate outside its interval".into()
    })?;
    let mut checks = 0;
    for u_len in 1..=2 {
        for u in Sphere::new(2, u_len).unwrap() {
            for k in 0..=8 {
                let c = translation_check(&u, &pred, 2, k, DEFAULT_ENUMERATION_CAP).unwrap();
                ensure(c.density_holds() && c.count_holds(), || {
                    format!("translation bound fails: {c:?}")
                })?;
                checks += 1;
            }
        }
    }
    Ok(format!(
        "rho_2 = 1/3, sampled {:.4} in [{:.4}, {:.4}], {checks} translation bounds",
        s.rho, s.ci_low, s.ci_high
    ))
}

fn sphere_and_enumeration() -> Check {
    for d in [2usize, 3] {
        for n in 0..=8 {
            let count = Sphere::new(d, n).unwrap().count() as u64;
            let formula = if n == 0 {
                1
            } else {
                2 * d as u64 * (2 * d as u64 - 1).pow(n as u32 - 1)
            };
            ensure(
                count == formula && sphere_size(d, n) == formula.into(),
                || format!("|S_{n}| for d={d}: enumerated {count}, formula {formula}"),
            )?;
        }
    }
    for d in [2usize, 3] {
        let mut previous: Option<Word> = None;
        for i in 0..100_000u64 {
            let w = index_to_word(&WordIndex(i.into()), d);
            ensure(word_to_index(&w) == WordIndex(i.into()), || {
                format!("index {i} does not round-trip for d={d}")
            })?;
            if let Some(prev) = &previous {
                ensure(prev.len() <= w.len(), || {
                    format!("index {i} breaks length order for d={d}")
                })?;
            }
            previous = Some(w);
        }
    }
    for x in 0..200u64 {
        for y in 0..200u64 {
            let z = pair(x, y).unwrap();
            ensure(unpair(z) == (x, y), || {
                format!("unpair(pair({x}, {y})) != ({x}, {y})")
            })?;
        }
    }
    Ok("sphere sizes, 2 x 10^5 indices, 40000 pairs".into())
}

fn coset_semi_decision() -> Check {
    let a = Alphabet::new(2).unwrap();
    let rel = [a.parse("x1^2").unwrap()];
    let reps = [a.identity(), a.parse("x1").unwrap()];
    let out = coset_decide(&a.parse("x1^3").unwrap(), &reps, &rel, 10_000).unwrap();
    ensure(out == CosetOutcome::Index(2), || {
        format!("x1^3 gave {out:?}")
    })?;
    let mut answered = 0;
    for n in 0..=2 {
        for w in Sphere::new(2, n).unwrap() {
            let once = coset_decide(&w, &reps, &rel, 10_000).unwrap();
            let twice = coset_decide(&w, &reps, &rel, 20_000).unwrap();
            if let CosetOutcome::Index(i) = once {
                answered += 1;
                ensure(twice == CosetOutcome::Index(i), || {
                    format!("{w}: {once:?} then {twice:?}")
                })?;
            }
        }
    }
    Ok(format!(
        "x1^3 -> index 2, {answered} answers stable under doubling"
    ))
}

fn cogrowth_value() -> Check {
    let pred = MembershipPredicate::compile(&PredicateSpec::All {}, &Alphabet::new(2).unwrap())
        .map_err(|e| e.to_string())?;
    let profile = cogrowth_profile(&pred, 2, [10], DEFAULT_ENUMERATION_CAP).unwrap();
    let point = &profile.points[0];
    let closed = (4.0f64 * 3f64.powi(9)).powf(0.1);
    ensure(point.count == 4 * 3u64.pow(9), || {
        format!("count {}", point.count)
    })?;
    ensure((point.root - closed).abs() < 1e-9, || {
        format!("root {} vs {closed}", point.root)
    })?;
    Ok(format!("{:.12}", point.root))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("GS threshold", 1, gs_threshold),
        ("tail identity", 1, tail_identity),
        ("Magnus/Zassenhaus suite", 30, magnus_zassenhaus),
        ("forcing worked trace", 10, forcing_trace),
        ("determinism and resume", 30, determinism_and_resume),
        ("density exactness", 60, density_exactness),
        ("sphere/enumeration suite", 30, sphere_and_enumeration),
        ("coset semi-decision", 10, coset_semi_decision),
        ("cogrowth profile", 60, cogrowth_value),
    ];
    let mut failed = BTreeMap::new();
    for (i, (name, budget, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            if elapsed <= Duration::from_secs(budget) {
                Ok(detail)
            } else {
                Err(format!("{detail}; over the {budget} s budget"))
            }
        });
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d.clone()),
            Err(d) => ("FAIL", d.clone()),
        };
        println!(
            "{tag} {} {name} ({:.2} s / {budget} s): {detail}",
            i + 1,
            elapsed.as_secs_f64()
        );
        if result.is_err() {
            failed.insert(i + 1, name);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
