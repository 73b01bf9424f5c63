//! Random timed words and random IRTA, plus the differential fuzzer that
//! compares two automata word by word.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::guard::{Guard, Region};
use crate::model::{Automaton, Edge, Monotonicity, TimedWord};
use crate::rational::Rational;
use crate::semantics::Simulator;
use crate::validate::check_integer_reset;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzParams {
    pub count: usize,
    pub seed: u64,
    pub max_len: usize,
    pub max_time: u64,
    pub denominators: Vec<u64>,
    pub monotonicity: Monotonicity,
}

impl Default for FuzzParams {
    fn default() -> Self {
        FuzzParams {
            count: 10_000,
            seed: 42,
            max_len: 8,
            max_time: 5,
            denominators: vec![1, 2, 3, 4],
            monotonicity: Monotonicity::Weak,
        }
    }
}

impl FuzzParams {
    /// Defaults with `max_time = K + 4` for the larger constant of the two.
    pub fn for_automata(a: &Automaton, b: &Automaton) -> FuzzParams {
        FuzzParams {
            max_time: a.max_const().max(b.max_const()) + 4,
            ..FuzzParams::default()
        }
    }
}

/// Draws words whose timestamps are `k/q` with `q` from the configured
/// denominators and consecutive gaps of at most two time units.
pub struct WordGenerator<'p> {
    rng: ChaCha8Rng,
    alphabet: Vec<String>,
    params: &'p FuzzParams,
}

impl<'p> WordGenerator<'p> {
    pub fn new(alphabet: &[String], params: &'p FuzzParams) -> WordGenerator<'p> {
        WordGenerator {
            rng: ChaCha8Rng::seed_from_u64(params.seed),
            alphabet: alphabet.to_vec(),
            params,
        }
    }

    pub fn next_word(&mut self) -> Result<TimedWord, Error> {
        let p = self.params;
        let len = self.rng.gen_range(0..=p.max_len);
        let mut t = Rational::ZERO;
        let mut events = Vec::with_capacity(len);
        for _ in 0..len {
            let q = *p.denominators.choose(&mut self.rng).unwrap_or(&1);
            let scaled = t.numer() as u128 * q as u128;
            let floor = (scaled / t.denom() as u128) as u64;
            let exact = scaled % t.denom() as u128 == 0;
            let first = match (p.monotonicity, exact) {
                (Monotonicity::Weak, true) => floor,
                _ => floor + 1,
            };
            let last = p.max_time.saturating_mul(q);
            if first > last {
                break;
            }
            let k = (first + self.rng.gen_range(0..=2 * q)).min(last);
            t = Rational::new(k, q)?;
            let letter = self.alphabet.choose(&mut self.rng).cloned().unwrap_or_default();
            events.push((letter, t));
        }
        TimedWord::with_monotonicity(events, p.monotonicity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Mismatch {
    pub word: TimedWord,
    pub verdict_a: bool,
    pub verdict_b: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzReport {
    pub tried: usize,
    pub mismatches: Vec<Mismatch>,
    pub seed: u64,
    pub params: FuzzParams,
    /// Simulator steps on an IRTA where some clock's fractional part
    /// differed from global time.
    pub fraction_violations: usize,
    /// Simulator steps checked for the shared-fraction invariant.
    pub steps_checked: usize,
}

impl FuzzReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

impl fmt::Display for FuzzReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        let denoms: Vec<String> = p.denominators.iter().map(u64::to_string).collect();
        writeln!(
            f,
            "seed {} count {} max-len {} max-time {} denoms {}",
            self.seed,
            p.count,
            p.max_len,
            p.max_time,
            denoms.join(",")
        )?;
        writeln!(f, "tried {}", self.tried)?;
        writeln!(
            f,
            "fraction-invariant checked {} violations {}",
            self.steps_checked, self.fraction_violations
        )?;
        writeln!(f, "mismatches {}", self.mismatches.len())?;
        for m in &self.mismatches {
            writeln!(
                f,
                "  {} : first {} second {}",
                m.word,
                if m.verdict_a { "accepts" } else { "rejects" },
                if m.verdict_b { "accepts" } else { "rejects" }
            )?;
        }
        Ok(())
    }
}

struct Checked<'a> {
    sim: Simulator<'a>,
    irta: bool,
}

impl Checked<'_> {
    fn verdict(&self, w: &TimedWord, steps: &mut usize, violations: &mut usize) -> Result<bool, Error> {
        let trace = self.sim.trace(w)?;
        if self.irta {
            for cs in &trace[1..] {
                *steps += 1;
                if !cs.shared_fraction_holds() {
                    *violations += 1;
                }
            }
        }
        Ok(self.sim.accepts(trace.last().expect("trace is never empty")))
    }
}

/// Runs both automata on `params.count` random words and records every
/// word on which they disagree. Identical inputs give identical reports.
pub fn fuzz_equivalence(a: &Automaton, b: &Automaton, params: &FuzzParams) -> Result<FuzzReport, Error> {
    if !a.same_alphabet(b) {
        return Err(Error::AlphabetMismatch);
    }
    let sides = [a, b].map(|x| -> Result<Checked<'_>, Error> {
        Ok(Checked {
            sim: Simulator::new(x)?.with_monotonicity(params.monotonicity),
            irta: check_integer_reset(x).is_ok(),
        })
    });
    let [sa, sb] = sides;
    let (sa, sb) = (sa?, sb?);
    let mut gen = WordGenerator::new(a.alphabet(), params);
    let mut mismatches = Vec::new();
    let (mut steps, mut violations) = (0, 0);
    for _ in 0..params.count {
        let w = gen.next_word()?;
        let va = sa.verdict(&w, &mut steps, &mut violations)?;
        let vb = sb.verdict(&w, &mut steps, &mut violations)?;
        if va != vb {
            // independent re-run through the plain membership path
            if sa.sim.member(&w)? != va || sb.sim.member(&w)? != vb {
                return Err(Error::Internal(format!("verdicts on `{w}` are not reproducible")));
            }
            mismatches.push(Mismatch {
                word: w,
                verdict_a: va,
                verdict_b: vb,
            });
        }
    }
    mismatches.sort();
    mismatches.dedup();
    Ok(FuzzReport {
        tried: params.count,
        mismatches,
        seed: params.seed,
        params: params.clone(),
        fraction_violations: violations,
        steps_checked: steps,
    })
}

/// Shape of randomly generated automata.
#[derive(Debug, Clone)]
pub struct IrtaParams {
    pub max_locations: usize,
    pub max_const: u64,
    pub alphabet: Vec<String>,
    pub max_edges: usize,
}

impl Default for IrtaParams {
    fn default() -> Self {
        IrtaParams {
            max_locations: 4,
            max_const: 2,
            alphabet: vec!["a".into(), "b".into()],
            max_edges: 14,
        }
    }
}

fn random_guard<R: Rng>(rng: &mut R, k: u64) -> Guard {
    let c = rng.gen_range(0..=k);
    match rng.gen_range(0..8) {
        0 | 1 => Guard::point(c),
        2 => Guard::at_least(c),
        3 => Guard::greater_than(c),
        4 => Guard::interval(0, true, Some((c.max(1), false))),
        5 => Guard::interval(0, true, Some((c, true))),
        6 if c < k => Region::OpenUnit(c).guard(),
        6 => Guard::TRUE,
        _ => {
            let d = rng.gen_range(c..=k);
            Guard::interval(c, rng.gen(), Some((d, rng.gen())))
        }
    }
}

/// A random single-clock IRTA: resets are only placed on point guards.
pub fn random_irta<R: Rng>(rng: &mut R, params: &IrtaParams) -> Automaton {
    let n = rng.gen_range(1..=params.max_locations.max(1));
    let locations: Vec<String> = (0..n).map(|i| format!("l{i}")).collect();
    let accepting: Vec<String> = locations.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
    let edge_count = rng.gen_range(0..=params.max_edges);
    let mut edges = Vec::with_capacity(edge_count);
    for _ in 0..edge_count {
        let guard = random_guard(rng, params.max_const);
        let reset = guard.as_point().is_some() && rng.gen_bool(0.5);
        edges.push(Edge::new(
            locations.choose(rng).expect("nonempty").clone(),
            locations.choose(rng).expect("nonempty").clone(),
            params.alphabet.choose(rng).cloned().unwrap_or_default(),
            guard,
            reset,
        ));
    }
    Automaton::builder("G")
        .alphabet(params.alphabet.iter().cloned())
        .clock("x")
        .locations(locations)
        .initial("l0")
        .accepting(accepting)
        .edges(edges)
        .build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determinize::determinize;
    use crate::validate::check_integer_reset;

    fn figure_a() -> Automaton {
        Automaton::builder("A")
            .alphabet(["b", "c", "e"])
            .locations(["S"])
            .accepting(["S"])
            .edges([
                Edge::new("S", "S", "b", Guard::point(1), true),
                Edge::new("S", "S", "b", Guard::at_least(1), false),
                Edge::new("S", "S", "c", Guard::point(1), true),
                Edge::new("S", "S", "c", Guard::greater_than(1), false),
                Edge::new("S", "S", "e", Guard::at_least(1), false),
            ])
            .build()
    }

    #[test]
    fn words_respect_params() {
        let params = FuzzParams {
            max_len: 6,
            max_time: 3,
            denominators: vec![3],
            ..FuzzParams::default()
        };
        let mut g = WordGenerator::new(&["a".into()], &params);
        for _ in 0..500 {
            let w = g.next_word().unwrap();
            assert!(w.len() <= 6);
            for e in w.events() {
                assert!(e.time <= Rational::from_integer(3));
                assert!(3 % e.time.denom() == 0);
            }
        }
    }

    #[test]
    fn strict_words_increase() {
        let params = FuzzParams {
            monotonicity: Monotonicity::Strict,
            ..FuzzParams::default()
        };
        let mut g = WordGenerator::new(&["a".into()], &params);
        for _ in 0..500 {
            g.next_word().unwrap().check(Monotonicity::Strict).unwrap();
        }
    }

    #[test]
    fn zero_count_is_empty_report() {
        let a = figure_a();
        let params = FuzzParams {
            count: 0,
            ..FuzzParams::default()
        };
        let r = fuzz_equivalence(&a, &a, &params).unwrap();
        assert_eq!(r.tried, 0);
        assert!(r.mismatches.is_empty());
    }

    #[test]
    fn finds_missing_e_edge() {
        let a = figure_a();
        let params = FuzzParams {
            count: 2_000,
            ..FuzzParams::default()
        };
        let r = fuzz_equivalence(&a, &a.without_edge(4), &params).unwrap();
        assert!(!r.is_clean());
        assert!(r
            .mismatches
            .iter()
            .all(|m| m.word.events().iter().any(|e| e.letter == "e")));
        assert_eq!(r.fraction_violations, 0);
    }

    #[test]
    fn reports_are_reproducible() {
        let a = figure_a();
        let d = determinize(&a).unwrap().automaton;
        let params = FuzzParams {
            count: 500,
            seed: 7,
            ..FuzzParams::default()
        };
        let r1 = fuzz_equivalence(&a, &a.without_edge(1), &params).unwrap();
        let r2 = fuzz_equivalence(&a, &a.without_edge(1), &params).unwrap();
        assert_eq!(r1.to_string(), r2.to_string());
        assert!(fuzz_equivalence(&a, &d, &params).unwrap().is_clean());
    }

    #[test]
    fn alphabet_mismatch() {
        let a = figure_a();
        let b = Automaton::builder("B").alphabet(["b"]).locations(["p"]).build();
        assert!(matches!(
            fuzz_equivalence(&a, &b, &FuzzParams::default()),
            Err(Error::AlphabetMismatch)
        ));
    }

    #[test]
    fn generated_automata_are_irta() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let a = random_irta(&mut rng, &IrtaParams::default());
            assert!(check_integer_reset(&a).is_ok());
            assert!(a.max_const() <= 2);
            assert!(crate::model::validate_wellformed(&a).is_ok());
        }
    }
}
