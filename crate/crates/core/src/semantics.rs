//! Exact operational semantics over timed words.
//!
//! Works for any well-formed automaton, deterministic or not, and serves
//! as the membership oracle for everything else in the crate.

use std::collections::BTreeSet;

use crate::error::Error;
use crate::model::{Automaton, Compiled, Monotonicity, TimedWord};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Config {
    pub loc: String,
    pub clock: Rational,
    pub last_reset_time: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigSet {
    pub configs: BTreeSet<Config>,
    pub current_time: Rational,
}

impl ConfigSet {
    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    /// Every clock shares the fractional part of the current time.
    pub fn shared_fraction_holds(&self) -> bool {
        let f = self.current_time.fract();
        self.configs.iter().all(|c| c.clock.fract() == f)
    }
}

/// Reusable simulator for one automaton.
#[derive(Debug, Clone)]
pub struct Simulator<'a> {
    automaton: &'a Automaton,
    compiled: Compiled,
    mode: Monotonicity,
}

impl<'a> Simulator<'a> {
    pub fn new(a: &'a Automaton) -> Result<Simulator<'a>, Error> {
        Ok(Simulator {
            automaton: a,
            compiled: Compiled::new(a)?,
            mode: Monotonicity::Weak,
        })
    }

    pub fn with_monotonicity(mut self, mode: Monotonicity) -> Self {
        self.mode = mode;
        self
    }

    pub fn automaton(&self) -> &Automaton {
        self.automaton
    }

    pub fn initial(&self) -> ConfigSet {
        let mut configs = BTreeSet::new();
        configs.insert(Config {
            loc: self.automaton.initial().to_string(),
            clock: Rational::ZERO,
            last_reset_time: Rational::ZERO,
        });
        ConfigSet {
            configs,
            current_time: Rational::ZERO,
        }
    }

    pub fn step(&self, cs: &ConfigSet, letter: &str, t: Rational) -> Result<ConfigSet, Error> {
        if t < cs.current_time {
            return Err(Error::TimeRegression {
                time: t,
                current: cs.current_time,
            });
        }
        let li = self.compiled.letter(letter)?;
        let mut next = BTreeSet::new();
        for c in &cs.configs {
            let src = self
                .compiled
                .loc(&c.loc)
                .ok_or_else(|| Error::Internal(format!("unknown location `{}` in configuration", c.loc)))?;
            let clock = t.checked_sub(c.last_reset_time)?;
            for &(guard, reset, dst) in &self.compiled.out[src][li] {
                if !guard.eval(clock) {
                    continue;
                }
                next.insert(if reset {
                    Config {
                        loc: self.compiled.names[dst].clone(),
                        clock: Rational::ZERO,
                        last_reset_time: t,
                    }
                } else {
                    Config {
                        loc: self.compiled.names[dst].clone(),
                        clock,
                        last_reset_time: c.last_reset_time,
                    }
                });
            }
        }
        Ok(ConfigSet {
            configs: next,
            current_time: t,
        })
    }

    pub fn accepts(&self, cs: &ConfigSet) -> bool {
        cs.configs.iter().any(|c| self.automaton.is_accepting(&c.loc))
    }

    /// Every configuration set along the run, starting with the initial one.
    pub fn trace(&self, w: &TimedWord) -> Result<Vec<ConfigSet>, Error> {
        w.check(self.mode)?;
        let mut sets = Vec::with_capacity(w.len() + 1);
        let mut cs = self.initial();
        for e in w.events() {
            let next = self.step(&cs, &e.letter, e.time)?;
            sets.push(cs);
            cs = next;
        }
        sets.push(cs);
        Ok(sets)
    }

    pub fn run(&self, w: &TimedWord) -> Result<ConfigSet, Error> {
        w.check(self.mode)?;
        let mut cs = self.initial();
        for e in w.events() {
            if cs.is_empty() {
                // still validate the remaining letters and times
                self.compiled.letter(&e.letter)?;
                cs.current_time = e.time;
                continue;
            }
            cs = self.step(&cs, &e.letter, e.time)?;
        }
        Ok(cs)
    }

    pub fn member(&self, w: &TimedWord) -> Result<bool, Error> {
        Ok(self.accepts(&self.run(w)?))
    }
}

pub fn initial_configs(a: &Automaton) -> Result<ConfigSet, Error> {
    Ok(Simulator::new(a)?.initial())
}

pub fn step_configs(a: &Automaton, cs: &ConfigSet, letter: &str, t: Rational) -> Result<ConfigSet, Error> {
    Simulator::new(a)?.step(cs, letter, t)
}

pub fn member(a: &Automaton, w: &TimedWord) -> Result<bool, Error> {
    Simulator::new(a)?.member(w)
}

pub fn member_with(a: &Automaton, w: &TimedWord, mode: Monotonicity) -> Result<bool, Error> {
    Simulator::new(a)?.with_monotonicity(mode).member(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guard::Guard;
    use crate::model::Edge;

    fn q(n: u64, d: u64) -> Rational {
        Rational::new(n, d).unwrap()
    }

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

    fn clocks(cs: &ConfigSet) -> Vec<(String, Rational)> {
        cs.configs.iter().map(|c| (c.loc.clone(), c.clock)).collect()
    }

    #[test]
    fn initial_sets() {
        let a = figure_a();
        let cs = initial_configs(&a).unwrap();
        assert_eq!(clocks(&cs), vec![("S".into(), Rational::ZERO)]);
        assert_eq!(cs.current_time, Rational::ZERO);
        let b = a.with_locations(vec!["l0".into(), "S".into()]).with_initial("l0");
        assert_eq!(clocks(&initial_configs(&b).unwrap())[0].0, "l0");
    }

    #[test]
    fn step_examples() {
        let a = figure_a();
        let sim = Simulator::new(&a).unwrap();
        let at1 = sim.step(&sim.initial(), "b", Rational::ONE).unwrap();
        assert_eq!(
            clocks(&at1),
            vec![("S".into(), Rational::ZERO), ("S".into(), Rational::ONE)]
        );
        let dead = sim.step(&sim.initial(), "b", q(1, 2)).unwrap();
        assert!(dead.is_empty());
        assert_eq!(dead.current_time, q(1, 2));

        let next = sim.step(&at1, "c", q(3, 2)).unwrap();
        assert_eq!(clocks(&next), vec![("S".into(), q(3, 2))]);
        assert!(next.shared_fraction_holds());
    }

    #[test]
    fn step_errors() {
        let a = figure_a();
        let sim = Simulator::new(&a).unwrap();
        let at1 = sim.step(&sim.initial(), "b", Rational::ONE).unwrap();
        assert!(matches!(
            sim.step(&at1, "b", q(1, 2)),
            Err(Error::TimeRegression { .. })
        ));
        assert!(matches!(
            sim.step(&at1, "z", Rational::ONE),
            Err(Error::UnknownLetter(_))
        ));
    }

    #[test]
    fn member_examples() {
        let a = figure_a();
        assert!(member(&a, &TimedWord::empty()).unwrap());
        let w = TimedWord::new([("b", Rational::ONE), ("c", q(3, 2))]).unwrap();
        assert!(member(&a, &w).unwrap());
        let w = TimedWord::new([("b", q(1, 2))]).unwrap();
        assert!(!member(&a, &w).unwrap());
    }

    #[test]
    fn empty_set_absorbs() {
        let a = figure_a();
        let sim = Simulator::new(&a).unwrap();
        let dead = sim.step(&sim.initial(), "b", q(1, 2)).unwrap();
        assert!(sim.step(&dead, "e", q(9, 2)).unwrap().is_empty());
    }

    #[test]
    fn strict_mode_rejects_ties() {
        let a = figure_a();
        let w = TimedWord::new([("b", Rational::ONE), ("b", Rational::ONE)]).unwrap();
        assert!(member(&a, &w).unwrap());
        assert!(matches!(
            member_with(&a, &w, Monotonicity::Strict),
            Err(Error::NonMonotoneTime { index: 1 })
        ));
    }

    #[test]
    fn trace_covers_every_prefix() {
        let a = figure_a();
        let sim = Simulator::new(&a).unwrap();
        let w = TimedWord::new([("b", Rational::ONE), ("c", q(3, 2)), ("e", q(7, 3))]).unwrap();
        let sets = sim.trace(&w).unwrap();
        assert_eq!(sets.len(), 4);
        assert!(sets.iter().all(ConfigSet::shared_fraction_holds));
    }
}
