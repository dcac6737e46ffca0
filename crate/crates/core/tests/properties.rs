use std::collections::HashMap;
use std::sync::Arc;

use dehn_core::enumerators::{
    Enumerator, EnumeratorError, EnumeratorKind, EnumeratorSpec, PowerSchedule,
};
use dehn_core::forcing::{certify_gs, run, verify_l, verify_m};
use dehn_core::gs::{compute_k, evaluate_h, rational, tail_bound, DegreeHistogram, Rational};
use dehn_core::magnus::{magnus_embed, Monomial, SeriesContext, TruncatedSeries};
use dehn_core::words::{
    index_to_word, pair, sphere_size, unpair, word_to_index, Alphabet, Letter, Sphere, Word,
    WordIndex,
};
use dehn_core::zassenhaus::{degree, DegreeValue, EqualityOracle};
use dehn_core::ForcingConfig;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive};
use proptest::prelude::*;

fn word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    let r = rank as i64;
    prop::collection::vec(prop_oneof![1..=r, -r..=-1], 0..=max_len)
        .prop_map(move |raw| Word::from_signed(rank, raw).unwrap())
}

fn nontrivial(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    word(rank, max_len).prop_filter("nontrivial", |w| !w.is_identity())
}

fn series(ctx: Arc<SeriesContext>) -> impl Strategy<Value = TruncatedSeries> {
    let rank = ctx.rank();
    let order = ctx.order();
    let p = ctx.prime();
    prop::collection::vec((prop::collection::vec(1..=rank, 0..=order), 0..p), 0..8).prop_map(
        move |terms| {
            let mut s = TruncatedSeries::zero(&ctx);
            for (vars, c) in terms {
                s = s
                    .add(&TruncatedSeries::monomial(&ctx, &Monomial(vars), c).unwrap())
                    .unwrap();
            }
            s
        },
    )
}

proptest! {
    #[test]
    fn reduction_is_idempotent(raw in prop::collection::vec((1usize..=3, any::<bool>()), 0..30)) {
        let letters: Vec<Letter> = raw.iter().map(|&(g, inv)| Letter::new(g, inv)).collect();
        let once = Word::reduce(3, letters);
        let twice = Word::reduce(3, once.letters().iter().copied());
        prop_assert_eq!(&once, &twice);
        for pair in once.letters().windows(2) {
            prop_assert_ne!(pair[0].inverse(), pair[1]);
        }
    }

    #[test]
    fn group_laws(a in word(3, 10), b in word(3, 10), c in word(3, 10)) {
        let id = Word::identity(3);
        prop_assert_eq!(&(&(&a * &b) * &c), &(&a * &(&b * &c)));
        prop_assert_eq!(&(&a * &id), &a);
        prop_assert_eq!(&(&id * &a), &a);
        prop_assert!((&a * &a.inverse()).is_identity());
        prop_assert_eq!(&(&a * &b).inverse(), &(&b.inverse() * &a.inverse()));
    }

    #[test]
    fn alphabet_format_parse_roundtrip(w in word(3, 12)) {
        let a = Alphabet::new(3).unwrap();
        prop_assert_eq!(a.parse(&a.format(&w)).unwrap(), w);
    }

    #[test]
    fn index_roundtrip_random(w in word(4, 40)) {
        prop_assert_eq!(index_to_word(&word_to_index(&w), 4), w);
    }
}

#[test]
fn enumeration_bijection_and_monotonicity() {
    for rank in [2, 3] {
        let mut last = 0;
        for i in 0..100_000u64 {
            let idx = WordIndex::from(i);
            let w = index_to_word(&idx, rank);
            assert!(w.len() >= last);
            last = w.len();
            assert_eq!(word_to_index(&w), idx);
        }
    }
}

#[test]
fn sphere_formula_matches_enumeration() {
    for rank in [2usize, 3] {
        for n in 0..=8 {
            let expected = if n == 0 {
                BigUint::one()
            } else {
                BigUint::from(2 * rank * (2 * rank - 1).pow(n as u32 - 1))
            };
            assert_eq!(sphere_size(rank, n), expected);
            let mut count = 0u64;
            let mut prev: Option<WordIndex> = None;
            for w in Sphere::new(rank, n).unwrap() {
                assert_eq!(w.len(), n);
                let idx = word_to_index(&w);
                assert!(prev.as_ref().is_none_or(|p| *p < idx));
                prev = Some(idx);
                count += 1;
            }
            assert_eq!(BigUint::from(count), expected);
        }
    }
}

#[test]
fn pairing_grid() {
    let mut seen = std::collections::HashSet::new();
    for x in 0..200 {
        for y in 0..200 {
            let z = pair(x, y).unwrap();
            assert_eq!(unpair(z), (x, y));
            assert!(seen.insert(z));
        }
    }
}

fn ring_axioms(ctx: Arc<SeriesContext>) {
    let s = || series(ctx.clone());
    proptest!(ProptestConfig::with_cases(64), |(a in s(), b in s(), c in s())| {
        let one = TruncatedSeries::one(&ctx);
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().mul(&c).unwrap(), a.mul(&c).unwrap().add(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(&a.mul(&one).unwrap(), &a);
        prop_assert_eq!(&one.mul(&a).unwrap(), &a);
        prop_assert!(a.sub(&a).unwrap().is_zero());
    });
}

#[test]
fn ring_axioms_p2() {
    ring_axioms(SeriesContext::new(2, 2, 5).unwrap());
}

#[test]
fn ring_axioms_p3() {
    ring_axioms(SeriesContext::new(3, 2, 4).unwrap());
}

#[test]
fn magnus_homomorphism_and_units() {
    for (p, n) in [(2u32, 6usize), (3, 5)] {
        let ctx = SeriesContext::new(p, 2, n).unwrap();
        proptest!(ProptestConfig::with_cases(500), |(u in word(2, 12), v in word(2, 12))| {
            let lhs = magnus_embed(&(&u * &v), &ctx).unwrap();
            let rhs = magnus_embed(&u, &ctx).unwrap().mul(&magnus_embed(&v, &ctx).unwrap()).unwrap();
            prop_assert_eq!(&lhs, &rhs);
            let mu = magnus_embed(&u, &ctx).unwrap();
            prop_assert_eq!(mu.constant_term(), 1);
            prop_assert_eq!(magnus_embed(&u.inverse(), &ctx).unwrap(), mu.invert_unit().unwrap());
        });
    }
}

#[test]
fn magnus_injective_on_short_words() {
    let ctx = SeriesContext::new(2, 2, 8).unwrap();
    let mut images = HashMap::new();
    for n in 0..=3 {
        for w in Sphere::new(2, n).unwrap() {
            let img = magnus_embed(&w, &ctx).unwrap();
            if let Some(other) = images.insert(img.coefficients_below(9).to_vec(), w.clone()) {
                panic!("{w} and {other} share an image");
            }
        }
    }
}

#[test]
fn equality_is_a_congruence_and_monotone() {
    for n in 2..=5usize {
        let oracle = EqualityOracle::new(n, 2, 2).unwrap();
        let coarser = EqualityOracle::new(n - 1, 2, 2).unwrap();
        proptest!(ProptestConfig::with_cases(100), |(u in word(2, 8), v in word(2, 8), w in word(2, 8))| {
            let uv = oracle.equal(&u, &v).unwrap();
            prop_assert!(oracle.equal(&u, &u).unwrap());
            prop_assert_eq!(uv, oracle.equal(&v, &u).unwrap());
            if uv && oracle.equal(&v, &w).unwrap() {
                prop_assert!(oracle.equal(&u, &w).unwrap());
            }
            if uv {
                prop_assert!(oracle.equal(&(&w * &u), &(&w * &v)).unwrap());
                prop_assert!(oracle.equal(&(&u * &w), &(&v * &w)).unwrap());
                prop_assert!(coarser.equal(&u, &v).unwrap());
            }
        });
        // random triples rarely collide, so also close the loop on forced ones
        let a = Word::from_signed(2, [1, 2]).unwrap();
        let b = &a * &Word::from_signed(2, [1; 8]).unwrap();
        if n <= 8 {
            assert!(oracle.equal(&a, &b).unwrap());
            let w = Word::from_signed(2, [2, -1, 2]).unwrap();
            assert!(oracle.equal(&(&w * &a), &(&w * &b)).unwrap());
            assert!(oracle.equal(&(&a * &w), &(&b * &w)).unwrap());
        }
    }
}

#[test]
fn degree_superadditivity() {
    for p in [2u32, 3] {
        let ctx = SeriesContext::new(p, 2, 10).unwrap();
        proptest!(ProptestConfig::with_cases(200), |(g in nontrivial(2, 6), h in nontrivial(2, 6))| {
            let dg = degree(&g, &ctx).unwrap();
            let dh = degree(&h, &ctx).unwrap();
            let (DegreeValue::Finite(a), DegreeValue::Finite(b)) = (dg, dh) else {
                return Ok(());
            };
            let c = Word::commutator(&g, &h).unwrap();
            if !c.is_identity() {
                prop_assert_ne!(degree(&c, &ctx).unwrap().is_at_least(a + b), Some(false));
            }
            prop_assert_ne!(degree(&g.pow(p as i64), &ctx).unwrap().is_at_least(p * a), Some(false));
        });
    }
}

#[test]
fn generator_power_degrees() {
    for p in [2u32, 3] {
        let ctx = SeriesContext::new(p, 2, 9).unwrap();
        let mut q = 1;
        while q <= 8 {
            for g in 1..=2 {
                let w = Word::generator(2, g).unwrap().pow(q as i64);
                assert_eq!(degree(&w, &ctx).unwrap(), DegreeValue::Finite(q));
            }
            q *= p;
        }
    }
}

#[test]
fn quotient_by_d3_is_finite_in_effect() {
    let oracle = EqualityOracle::new(3, 2, 2).unwrap();
    let mut classes: HashMap<Vec<u16>, usize> = HashMap::new();
    for n in 0..=4 {
        for w in Sphere::new(2, n).unwrap() {
            *classes.entry(oracle.class_key(&w).unwrap()).or_default() += 1;
        }
    }
    // F/D_3F has order 2^(2 + 1 + 2) = 32 for p = 2, d = 2
    assert!(classes.len() <= 32);
    assert!(classes.values().all(|&c| c >= 2));
}

fn histogram_from(counts: &[(u32, u64)]) -> DegreeHistogram {
    let mut h = DegreeHistogram::default();
    for &(i, c) in counts {
        for _ in 0..c {
            h.record(DegreeValue::Finite(i));
        }
    }
    h
}

proptest! {
    #[test]
    fn evaluate_h_clears_denominators(
        counts in prop::collection::vec((1u32..12, 0u64..4), 0..6),
        dhat in 0usize..5,
        a in 1i64..50,
        extra in 1i64..50,
    ) {
        let b = a + extra;
        let hist = histogram_from(&counts);
        let h = evaluate_h(&hist, dhat, &rational(a, b)).unwrap();
        let top = counts.iter().map(|c| c.0).max().unwrap_or(1).max(1);
        let (ab, bb) = (BigInt::from(a), BigInt::from(b));
        let mut int = bb.pow(top) - BigInt::from(dhat) * &ab * bb.pow(top - 1);
        for (i, c) in &hist.counts {
            int += BigInt::from(*c) * ab.pow(*i) * bb.pow(top - i);
        }
        prop_assert_eq!(h * Rational::from_integer(bb.pow(top)), Rational::from_integer(int));
    }

    #[test]
    fn compute_k_is_minimal(a in 1i64..40, extra in 1i64..40, e_num in 1i64..20, e_den in 1i64..200) {
        let t = rational(a, a + extra);
        let eps = rational(e_num, e_num + e_den);
        let k = compute_k(&t, &eps).unwrap();
        prop_assert!(tail_bound(k, &t).unwrap() < eps);
        if k >= 1 {
            prop_assert!(tail_bound(k - 1, &t).unwrap() >= eps);
        }
    }
}

#[test]
fn tail_identity() {
    for tenths in 1..=9 {
        let t = rational(tenths, 10);
        let tf = tenths as f64 / 10.0;
        for k in 0..=10u64 {
            let closed = tail_bound(k, &t).unwrap().to_f64().unwrap();
            let sum: f64 = (k..=k + 60)
                .map(|i| (i - k) as f64 * tf.powi(i as i32))
                .sum();
            // the first omitted term bounds how close a 61-term sum can get
            let omitted: f64 = (k + 61..k + 4000)
                .map(|i| (i - k) as f64 * tf.powi(i as i32))
                .sum();
            assert!((closed - sum - omitted).abs() < 1e-12, "t={tf} k={k}");
            if tenths <= 5 {
                assert!((closed - sum).abs() < 1e-12, "t={tf} k={k}");
            }
        }
    }
}

fn builtin_kinds() -> Vec<EnumeratorKind> {
    vec![
        EnumeratorKind::AllWords,
        EnumeratorKind::GeneratorPowers {
            generator: 2,
            schedule: PowerSchedule::All,
        },
        EnumeratorKind::GeneratorPowers {
            generator: 1,
            schedule: PowerSchedule::PowersOfP,
        },
        EnumeratorKind::IndexArithmetic { start: 3, step: 7 },
        EnumeratorKind::ExplicitList {
            words: vec!["x1*x2".into(), "1".into(), "x2^-3".into()],
        },
        EnumeratorKind::RegisterMachine {
            program: "inc 0\ninc 0\nhalt\n".into(),
        },
    ]
}

#[test]
fn stage_sets_grow_and_repeat() {
    let a = Alphabet::new(2).unwrap();
    let powers_of_two = EnumeratorKind::GeneratorPowers {
        generator: 1,
        schedule: PowerSchedule::PowersOfP,
    };
    for kind in builtin_kinds() {
        let en = Enumerator::new(&EnumeratorSpec { e: 1, kind }, &a, 2).unwrap();
        let mut prev = en.enumerate_up_to(0).unwrap();
        for s in 1..=100 {
            let cur = match en.enumerate_up_to(s) {
                Ok(cur) => cur,
                // x1^(2^j) outgrows the word length cap long before s = 100
                Err(EnumeratorError::WordTooLong { .. }) if en.spec().kind == powers_of_two => {
                    break
                }
                Err(e) => panic!("{e}"),
            };
            for m in &prev.members {
                assert!(cur.contains(&m.word));
            }
            assert_eq!(cur, en.enumerate_up_to(s).unwrap());
            prev = cur;
        }
    }
}

#[test]
fn looping_machine_contributes_nothing() {
    let a = Alphabet::new(2).unwrap();
    let spec = EnumeratorSpec {
        e: 0,
        kind: EnumeratorKind::RegisterMachine {
            program: "dec 1 0\n".into(),
        },
    };
    let en = Enumerator::new(&spec, &a, 2).unwrap();
    // stage sets are monotone in s, so the largest stage covers all smaller ones
    assert!(en.enumerate_up_to(10_000).unwrap().is_empty());
}

#[test]
fn forcing_invariants_on_mixed_families() {
    let a = Alphabet::new(2).unwrap();
    let family: Vec<EnumeratorSpec> = builtin_kinds()
        .into_iter()
        .enumerate()
        .map(|(e, kind)| EnumeratorSpec { e: e as u64, kind })
        .collect();
    let base = vec![a.parse("x1^4").unwrap()];
    let t0 = rational(3, 5);
    let h = evaluate_h(&histogram_from(&[(4, 1)]), 2, &t0).unwrap();
    assert!(h.is_negative());
    let cfg = ForcingConfig::new(a.clone(), 2, base, t0, family, 24).unwrap();
    let state = run(&cfg).unwrap();
    assert_eq!(state, run(&cfg).unwrap());
    assert_eq!(state.log(&a), run(&cfg).unwrap().log(&a));
    let mut sources = std::collections::HashSet::new();
    for r in &state.relators {
        assert!(sources.insert(r.e));
        assert_eq!(
            r.degree.is_at_least((r.e + cfg.k() + 1) as u32),
            Some(true),
            "{r:?}"
        );
    }
    assert!(verify_m(&state, &cfg).unwrap().passes());
    assert!(verify_l(&state.relators, cfg.k(), 24).passes());
    assert!(certify_gs(&state, &cfg).unwrap().passes());
}
