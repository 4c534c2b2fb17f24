use genlimit::adversaries::AdversarySpec;
use genlimit::breadth::{check_approximate, check_exact, check_infinite_coverage};
use genlimit::collections::{Collection, CollectionName, TellTaleKind};
use genlimit::conditions::violation_witness;
use genlimit::error::Error;
use genlimit::generators::{sample_with, GeneratorKind, GeneratorParams, SupportDescriptor};
use genlimit::sets::{zigzag_decode, zigzag_encode, Base, Cardinality, Elem, FiniteSet, Fms};
use genlimit::sim::{n_star, run_duel, stability_counters, DuelConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Ids above every explicit element the strategies produce.
const WINDOW: Elem = 400;

fn base() -> impl Strategy<Value = Base> {
    prop_oneof![
        Just(Base::Empty),
        Just(Base::Full),
        (-20i64..20).prop_map(|from| Base::Suffix { from }),
        (2u64..8).prop_map(|of| Base::Multiples { of }),
        (0u8..2).prop_map(|residue| Base::Parity { residue }),
    ]
}

fn small_set(below: Elem) -> impl Strategy<Value = FiniteSet> {
    prop::collection::vec(1..below, 0..6).prop_map(|v| v.into_iter().collect())
}

fn fms() -> impl Strategy<Value = Fms> {
    (base(), small_set(60), small_set(60)).prop_map(|(b, add, sub)| Fms::new(b, add, sub))
}

fn brute(a: &Fms) -> Vec<bool> {
    (1..=WINDOW).map(|x| a.member(x)).collect()
}

proptest! {
    #[test]
    fn intersect_and_modify_match_membership(a in fms(), b in fms(), plus in small_set(80), minus in small_set(80)) {
        let Ok(meet) = a.intersect(&b) else { return Ok(()) };
        let m = a.modify(&plus, &minus);
        for x in 1..=WINDOW {
            prop_assert_eq!(meet.member(x), a.member(x) && b.member(x));
            let expected = !minus.contains(x) && (a.member(x) || plus.contains(x));
            prop_assert_eq!(m.member(x), expected);
        }
    }

    #[test]
    fn relation_matches_window_counts(a in fms(), b in fms()) {
        let Ok(r) = a.relate(&b) else { return Ok(()) };
        let (ma, mb) = (brute(&a), brute(&b));
        let only_a = ma.iter().zip(&mb).filter(|(x, y)| **x && !**y).count() as u64;
        let only_b = ma.iter().zip(&mb).filter(|(x, y)| !**x && **y).count() as u64;
        // Finite differences only involve explicit or suffix-gap ids, all inside the window.
        match r.diff_card {
            Cardinality::Finite(k) => prop_assert_eq!(k, only_a),
            Cardinality::Infinite => prop_assert!(only_a > 0),
        }
        match r.rev_diff_card {
            Cardinality::Finite(k) => prop_assert_eq!(k, only_b),
            Cardinality::Infinite => prop_assert!(only_b > 0),
        }
        prop_assert_eq!(r.subset, r.diff_card.is_zero());
        prop_assert_eq!(r.equal, r.diff_card.is_zero() && r.rev_diff_card.is_zero());
        prop_assert_eq!(r.equal, a == b);
    }

    #[test]
    fn cardinality_and_enumeration_agree(a in fms()) {
        let listed = a.enumerate(50);
        prop_assert!(listed.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(listed.iter().all(|&x| a.member(x)));
        if let Cardinality::Finite(k) = a.cardinality() {
            prop_assert_eq!(listed.len() as u64, k.min(50));
        } else {
            prop_assert_eq!(listed.len(), 50);
        }
        if let Some(&first) = listed.first() {
            prop_assert_eq!(a.nth(1), Some(first));
            prop_assert_eq!(a.first(), Some(first));
        }
    }

    #[test]
    fn zigzag_round_trips(z in -1_000_000i64..1_000_000) {
        prop_assert_eq!(zigzag_decode(zigzag_encode(z)), z);
        prop_assert!(zigzag_encode(z) >= 1);
    }

    #[test]
    fn samples_lie_in_the_support(a in fms(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match sample_with(&a, &mut rng) {
            Ok(x) => prop_assert!(a.member(x)),
            Err(e) => {
                prop_assert_eq!(e, Error::EmptySupport);
                prop_assert_eq!(a.cardinality(), Cardinality::Finite(0));
            }
        }
        let d = SupportDescriptor::Fms(a.clone());
        prop_assert_eq!(genlimit::generators::sample(&d, seed).ok(), genlimit::generators::sample(&d, seed).ok());
    }

    #[test]
    fn exact_breadth_implies_approximate(k in fms(), supp in fms(), seen in small_set(60)) {
        let Ok(exact) = check_exact(&supp, &k, &seen) else { return Ok(()) };
        if exact.holds {
            prop_assert!(check_approximate(&supp, &k).unwrap().holds);
        }
        if let Ok(v) = check_infinite_coverage(&supp, &k, &seen) {
            if v.holds {
                prop_assert!(supp.is_subset(&k).unwrap());
                prop_assert!(seen.iter().all(|x| !supp.member(x)));
            }
        }
    }

    #[test]
    fn single_removal_witness_postcondition(t in small_set(40)) {
        let c = Collection::builtin(CollectionName::SingleRemoval);
        let j = violation_witness(&c, 0, &t, TellTaleKind::Strong).unwrap();
        let lj = c.language(j).unwrap();
        let star = c.language(0).unwrap();
        prop_assert!(lj.contains_all(&t));
        let r = lj.relate(&star).unwrap();
        prop_assert!(r.subset && !r.equal);
        // Least such index.
        for i in 0..j {
            let li = c.language(i).unwrap();
            let r = li.relate(&star).unwrap();
            prop_assert!(!(li.contains_all(&t) && r.subset && !r.equal));
        }
    }

    #[test]
    fn suffix_witness_postcondition(t in prop::collection::vec(-30i64..30, 1..5)) {
        let c = Collection::builtin(CollectionName::Suffixes);
        let t: FiniteSet = t.into_iter().map(zigzag_encode).collect();
        let j = violation_witness(&c, 0, &t, TellTaleKind::Weak).unwrap();
        let lj = c.language(j).unwrap();
        let star = c.language(0).unwrap();
        prop_assert!(lj.contains_all(&t));
        let r = lj.relate(&star).unwrap();
        prop_assert!(r.subset && r.rev_diff_card == Cardinality::Infinite);
        for i in 0..j {
            let li = c.language(i).unwrap();
            let r = li.relate(&star).unwrap();
            prop_assert!(!(li.contains_all(&t) && r.subset && r.rev_diff_card == Cardinality::Infinite));
        }
    }

    #[test]
    fn prime_vsi_matches_brute_force(samples in prop::collection::vec(1u64..200, 1..4)) {
        let c = Collection::builtin(CollectionName::PrimeMultiples);
        let s: FiniteSet = samples.iter().copied().collect();
        // Languages containing a sample below 200 have primes below 200, so index ≤ 46.
        let consistent: Vec<Fms> = (1..=46)
            .map(|i| c.language(i).unwrap())
            .filter(|l| l.contains_all(&s))
            .collect();
        match c.vsi_set(&s) {
            Err(e) => {
                prop_assert_eq!(e, Error::EmptyVersionSpace);
                prop_assert!(consistent.is_empty());
            }
            Ok(v) => {
                prop_assert!(!consistent.is_empty());
                for x in 1..=WINDOW {
                    prop_assert_eq!(v.member(x), consistent.iter().all(|l| l.member(x)));
                    prop_assert_eq!(c.vsi_membership(&s, x).unwrap(), v.member(x));
                }
            }
        }
    }

    #[test]
    fn parity_vsi_matches_brute_force(samples in prop::collection::vec(1u64..60, 1..4)) {
        let c = Collection::builtin(CollectionName::ParityDemo);
        let s: FiniteSet = samples.iter().copied().collect();
        let consistent: Vec<Fms> = (0..=1).map(|i| c.language(i).unwrap()).filter(|l| l.contains_all(&s)).collect();
        match c.vsi_set(&s) {
            Err(e) => {
                prop_assert_eq!(e, Error::EmptyVersionSpace);
                prop_assert!(consistent.is_empty());
            }
            Ok(v) => {
                for x in 1..=WINDOW {
                    prop_assert_eq!(v.member(x), consistent.iter().all(|l| l.member(x)));
                }
            }
        }
    }

    #[test]
    fn single_removal_vsi_is_the_sample(samples in small_set(80)) {
        prop_assume!(!samples.is_empty());
        let c = Collection::builtin(CollectionName::SingleRemoval);
        let v = c.vsi_set(&samples).unwrap();
        prop_assert_eq!(v, Fms::finite(samples));
    }
}

fn iid_config(collection: CollectionName, generator: GeneratorKind, target: usize, seed: u64) -> DuelConfig {
    let mut cfg = DuelConfig::new(collection, generator, AdversarySpec::Iid { target });
    cfg.horizon = 120;
    cfg.seed = seed;
    cfg.generator_params = GeneratorParams {
        closure_dimension: Some(1),
    };
    cfg.checkpoints = Some((1..=120).collect());
    cfg
}

fn duel_case() -> impl Strategy<Value = DuelConfig> {
    let gens = prop_oneof![
        Just(GeneratorKind::KmSubset),
        Just(GeneratorKind::Telltale),
        Just(GeneratorKind::ExhaustiveFn),
        Just(GeneratorKind::TelltaleExhaustive),
        Just(GeneratorKind::IdentifierExact),
    ];
    (gens, 1usize..6, any::<u64>()).prop_map(|(g, target, seed)| {
        let c = match g {
            GeneratorKind::IdentifierExact => CollectionName::PrimeMultiples,
            _ => CollectionName::SingleRemoval,
        };
        iid_config(c, g, target, seed)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn duels_are_reproducible(cfg in duel_case()) {
        let a = run_duel(&cfg).unwrap();
        let b = run_duel(&cfg).unwrap();
        prop_assert_eq!(serde_json::to_string(&a.0).unwrap(), serde_json::to_string(&b.0).unwrap());
        prop_assert_eq!(a.1, b.1);
    }

    #[test]
    fn counters_and_n_star_are_consistent(cfg in duel_case()) {
        let (traces, report) = run_duel(&cfg).unwrap();
        let notion = cfg.effective_notions()[0];
        let failing = traces.iter().filter(|t| !t.verdicts[&notion].holds).count() as u64;
        prop_assert_eq!(report.counters.c_b, failing);
        prop_assert_eq!(report.counters, stability_counters(&traces));
        // Counters are monotone prefix counts.
        let mut last = stability_counters(&[]);
        for n in 1..=traces.len() {
            let now = stability_counters(&traces[..n]);
            prop_assert!(now.c_b >= last.c_b && now.c_s >= last.c_s);
            last = now;
        }
        match n_star(&traces, notion) {
            Some(n) => prop_assert!(traces[n as usize - 1..].iter().all(|t| t.verdicts[&notion].holds)),
            None => prop_assert!(!traces.last().unwrap().verdicts[&notion].holds),
        }
        prop_assert!(traces.iter().enumerate().all(|(k, t)| t.step == k as u64 + 1));
    }

    #[test]
    fn closure_stable_freezes(seed in any::<u64>(), target in 0usize..2) {
        let (traces, _) = run_duel(&iid_config(CollectionName::ParityDemo, GeneratorKind::ClosureStable, target, seed)).unwrap();
        let frozen = traces.iter().position(|t| t.seen_size >= 2);
        if let Some(k) = frozen {
            prop_assert!(traces[k + 1..].iter().all(|t| !t.changed));
            prop_assert!(traces[k..].iter().all(|t| t.descriptor == traces[k].descriptor));
        }
    }
}
