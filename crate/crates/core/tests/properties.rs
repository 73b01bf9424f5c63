//! Randomized checks of the library-wide invariants.

use std::collections::BTreeSet;

use irta::{
    atomic_regions, check_deterministic, check_integer_reset, complement, complete, determinize, is_empty,
    parse_automaton, print_automaton, product, random_irta, region_of, Automaton, ConfigSet, Determinized,
    Emptiness, FuzzParams, IrtaParams, OffsetClass, Product, ProductRegion, Rational, Simulator, TimedWord,
    WordGenerator,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn automata(seed: u64, count: usize) -> Vec<Automaton> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_irta(&mut rng, &IrtaParams::default())).collect()
}

fn words(a: &Automaton, seed: u64, count: usize) -> Vec<TimedWord> {
    let params = FuzzParams {
        seed,
        max_time: a.max_const() + 4,
        ..FuzzParams::default()
    };
    let mut g = WordGenerator::new(a.alphabet(), &params);
    (0..count).map(|_| g.next_word().unwrap()).collect()
}

/// Concrete configurations of the input, abstracted to (location, offset) pairs
/// relative to the deterministic clock value `n`.
fn abstracted(cs: &ConfigSet, n: Rational, k: u64) -> BTreeSet<(String, OffsetClass)> {
    cs.configs
        .iter()
        .map(|c| {
            let d = c.clock.checked_sub(n).expect("offset is nonnegative");
            assert!(d.is_integer(), "offset {d} is not an integer");
            (c.loc.clone(), OffsetClass::saturate(d.floor(), k))
        })
        .collect()
}

fn check_bisimulation(a: &Automaton, det: &Determinized, w: &TimedWord) {
    let orig = Simulator::new(a).unwrap().trace(w).unwrap();
    let dsim = Simulator::new(&det.automaton).unwrap();
    let mirror = dsim.trace(w).unwrap();
    for (cs, dcs) in orig.iter().zip(&mirror) {
        assert!(dcs.len() <= 1);
        match dcs.configs.iter().next() {
            None => assert!(cs.is_empty(), "deterministic run died but {cs:?} survives on {w}"),
            Some(c) => {
                let state = det.state(&c.loc).unwrap();
                assert_eq!(&abstracted(cs, c.clock, det.k), state.pairs(), "on {w}");
            }
        }
    }
}

#[test]
fn determinization_preserves_language_and_offsets() {
    for (i, a) in automata(11, 60).iter().enumerate() {
        let det = determinize(a).unwrap();
        let sa = Simulator::new(a).unwrap();
        let sd = Simulator::new(&det.automaton).unwrap();
        for w in words(a, i as u64, 200) {
            assert_eq!(sa.member(&w).unwrap(), sd.member(&w).unwrap(), "{}\n{w}", print_automaton(a));
            check_bisimulation(a, &det, &w);
        }
    }
}

#[test]
fn determinized_output_is_deterministic_irta_within_bound() {
    for a in automata(12, 200) {
        let det = determinize(&a).unwrap();
        assert!(check_deterministic(&det.automaton).is_ok());
        assert!(check_integer_reset(&det.automaton).is_ok());
        assert!(det.automaton.max_const() <= a.max_const());
        for e in det.automaton.edges().iter().filter(|e| e.reset) {
            assert!(e.guard.as_point().is_some_and(|c| c >= 1 && c <= a.max_const()));
        }
        let bound = (1u64 << (a.locations().len() as u64 * (a.max_const() + 2))) - 1;
        assert!(det.states.len() as u64 <= bound);
        assert!(det.states.iter().all(|s| !s.is_empty()));
    }
}

#[test]
fn shared_fraction_invariant_holds() {
    for (i, a) in automata(13, 50).iter().enumerate() {
        let sim = Simulator::new(a).unwrap();
        for w in words(a, 100 + i as u64, 200) {
            assert!(sim.trace(&w).unwrap().iter().all(ConfigSet::shared_fraction_holds));
        }
    }
}

#[test]
fn member_ignores_edge_order_and_determinism_check_is_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for (i, a) in automata(14, 50).iter().enumerate() {
        let mut edges = a.edges().to_vec();
        edges.shuffle(&mut rng);
        let b = a.with_edges(edges);
        assert_eq!(check_deterministic(a).is_ok(), check_deterministic(&b).is_ok());
        let (sa, sb) = (Simulator::new(a).unwrap(), Simulator::new(&b).unwrap());
        for w in words(a, 200 + i as u64, 100) {
            assert_eq!(sa.member(&w).unwrap(), sb.member(&w).unwrap());
        }
    }
}

#[test]
fn completion_is_total() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for a in automata(15, 20) {
        let c = complete(&determinize(&a).unwrap().automaton).unwrap();
        for loc in c.locations() {
            for letter in c.alphabet() {
                for _ in 0..1_000 {
                    let q = rng.gen_range(1..=6u64);
                    let v = Rational::new(rng.gen_range(0..=8 * q), q).unwrap();
                    let enabled = c
                        .edges()
                        .iter()
                        .filter(|e| &e.src == loc && &e.letter == letter && e.guard.eval(v))
                        .count();
                    assert_eq!(enabled, 1, "{loc} {letter} {v}");
                }
            }
        }
    }
}

#[test]
fn complement_and_product_semantics() {
    let autos = automata(16, 40);
    for (i, pair) in autos.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        let det = determinize(a).unwrap().automaton;
        let co = complement(&det).unwrap();
        let coco = complement(&co).unwrap();
        let p = product(a, b).unwrap();
        let (sa, sb) = (Simulator::new(a).unwrap(), Simulator::new(b).unwrap());
        let (sco, scoco) = (Simulator::new(&co).unwrap(), Simulator::new(&coco).unwrap());
        for w in words(a, 300 + i as u64, 100) {
            let in_a = sa.member(&w).unwrap();
            assert_eq!(sco.member(&w).unwrap(), !in_a);
            assert_eq!(scoco.member(&w).unwrap(), in_a);
            assert_eq!(p.member(&w).unwrap(), in_a && sb.member(&w).unwrap());
        }
        // the product of a deterministic automaton with itself changes nothing
        let pp = product(&det, &det).unwrap();
        for w in words(a, 400 + i as u64, 50) {
            assert_eq!(pp.member(&w).unwrap(), sa.member(&w).unwrap());
        }
    }
}

#[test]
fn emptiness_agrees_with_fuzzing() {
    let autos = automata(17, 60);
    let mut empties = 0;
    for (i, a) in autos.iter().enumerate() {
        let subjects = [Product::single(a), product(a, &autos[(i + 1) % autos.len()]).unwrap()];
        for p in subjects {
            match is_empty(&p).unwrap() {
                Emptiness::NonEmpty { witness } => assert!(p.member(&witness).unwrap()),
                Emptiness::Empty => {
                    empties += 1;
                    for w in words(a, 500 + i as u64, 1_000) {
                        assert!(!p.member(&w).unwrap(), "{w}");
                    }
                }
            }
        }
    }
    assert!(empties > 0, "generator produced no empty languages");
}

#[test]
fn delay_successor_is_realizable() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let ks = [1u64, 2];
    for _ in 0..2_000 {
        let q = rng.gen_range(1..=5u64);
        let f = Rational::new(rng.gen_range(0..q), q).unwrap();
        let values: Vec<Rational> = (0..2)
            .map(|_| f.checked_add_integer(rng.gen_range(0..5)).unwrap())
            .collect();
        let here = ProductRegion::of(&values, &ks).unwrap();
        let next = here.delay_successor(&ks);
        let delay = if f == Rational::ZERO {
            Rational::new(1, 2).unwrap()
        } else {
            Rational::ONE.checked_sub(f).unwrap()
        };
        let moved: Vec<Rational> = values.iter().map(|v| v.checked_add(delay).unwrap()).collect();
        assert_eq!(ProductRegion::of(&moved, &ks).unwrap(), next);
        for (i, v) in moved.iter().enumerate() {
            assert_eq!(next.clock_region(i, ks[i]), region_of(*v, ks[i]));
        }
    }
}

#[test]
fn regions_partition_the_line() {
    for k in 0..4 {
        assert_eq!(atomic_regions(k).len() as u64, 2 * k + 2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_irta(&mut rng, &IrtaParams::default());
        prop_assert_eq!(parse_automaton(&print_automaton(&a)).unwrap(), a.clone());
        let det = determinize(&a).unwrap().automaton;
        prop_assert_eq!(parse_automaton(&print_automaton(&det)).unwrap(), det);
    }
}
