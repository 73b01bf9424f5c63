//! Offset-class subset construction for single-clock IRTA.
//!
//! A state of the output is a set of pairs `(l, d)`: the input could be in
//! location `l` with clock `x = n + d`, where `n` is the fresh deterministic
//! clock and `d` an integer offset saturated above `K`. Because resets only
//! happen at integer clock values, all offsets stay integral, and the
//! region of `n` decides every input guard uniformly.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::Error;
use crate::guard::{atomic_regions, merge_adjacent, shift_guard_to_n, OffsetClass, Region};
use crate::model::{Automaton, Compiled, Edge};
use crate::validate::check_integer_reset;

/// Canonically ordered set of `(location, offset class)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetState {
    pairs: BTreeSet<(String, OffsetClass)>,
}

impl SubsetState {
    pub fn new<I, S>(pairs: I) -> SubsetState
    where
        I: IntoIterator<Item = (S, OffsetClass)>,
        S: Into<String>,
    {
        SubsetState {
            pairs: pairs.into_iter().map(|(l, d)| (l.into(), d)).collect(),
        }
    }

    pub fn pairs(&self) -> &BTreeSet<(String, OffsetClass)> {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, loc: &str, d: OffsetClass) -> bool {
        self.pairs.contains(&(loc.to_string(), d))
    }

    /// Renders as `{(S,0),(S,1+)}` for the given `K`.
    pub fn display(&self, k: u64) -> SubsetDisplay<'_> {
        SubsetDisplay { state: self, k }
    }
}

pub struct SubsetDisplay<'a> {
    state: &'a SubsetState,
    k: u64,
}

impl fmt::Display for SubsetDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (l, d)) in self.state.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({},{})", l, d.display(self.k))?;
        }
        f.write_str("}")
    }
}

/// How output guards are labelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GuardStyle {
    /// Adjacent regions with the same target and reset flag become one guard.
    #[default]
    Merged,
    /// One edge per atomic region.
    Atomic,
}

#[derive(Debug, Clone)]
pub struct Determinized {
    pub automaton: Automaton,
    /// `states[i]` is the subset behind `automaton.locations()[i]`.
    pub states: Vec<SubsetState>,
    /// `K` of the input automaton.
    pub k: u64,
}

impl Determinized {
    pub fn state(&self, loc: &str) -> Option<&SubsetState> {
        self.automaton.location_index(loc).map(|i| &self.states[i])
    }

    pub fn location_of(&self, state: &SubsetState) -> Option<&str> {
        self.states
            .iter()
            .position(|s| s == state)
            .map(|i| self.automaton.locations()[i].as_str())
    }
}

type Pairs = BTreeSet<(usize, OffsetClass)>;

struct Construction<'a> {
    compiled: Compiled,
    automaton: &'a Automaton,
    k: u64,
}

impl<'a> Construction<'a> {
    fn new(a: &'a Automaton) -> Result<Construction<'a>, Error> {
        let compiled = Compiled::new(a)?;
        let report = check_integer_reset(a);
        if !report.is_ok() {
            return Err(Error::NotIrta {
                name: a.name().to_string(),
                edges: report.offending,
            });
        }
        Ok(Construction {
            k: compiled.k,
            compiled,
            automaton: a,
        })
    }

    fn successor(&self, q: &Pairs, letter: usize, r: Region) -> Result<(Pairs, bool), Error> {
        let mut enabled = Vec::new();
        let mut any_reset = false;
        for &(l, d) in q {
            for &(guard, reset, dst) in &self.compiled.out[l][letter] {
                if shift_guard_to_n(&guard, d, self.k).contains(&r) {
                    any_reset |= reset;
                    enabled.push((d, reset, dst));
                }
            }
        }
        let lift = match r {
            Region::Point(c) if any_reset => c,
            _ if any_reset => {
                return Err(Error::Internal(format!(
                    "resetting edge enabled on non-point region {r}"
                )))
            }
            _ => 0,
        };
        // resetting n at n = 0 changes nothing, so no reset is emitted there
        let reset_n = lift > 0;
        let next = enabled
            .into_iter()
            .map(|(d, reset, dst)| {
                if reset {
                    (dst, OffsetClass::Exact(0))
                } else {
                    (dst, d.plus(lift, self.k))
                }
            })
            .collect();
        Ok((next, reset_n))
    }

    fn to_public(&self, q: &Pairs) -> SubsetState {
        SubsetState::new(q.iter().map(|(l, d)| (self.compiled.names[*l].clone(), *d)))
    }

    fn to_internal(&self, q: &SubsetState) -> Result<Pairs, Error> {
        q.pairs
            .iter()
            .map(|(l, d)| {
                self.compiled
                    .loc(l)
                    .map(|i| (i, *d))
                    .ok_or_else(|| Error::Internal(format!("unknown location `{l}` in subset")))
            })
            .collect()
    }

    fn run(&self, style: GuardStyle) -> Result<Determinized, Error> {
        let a = self.automaton;
        let regions = atomic_regions(self.k);
        let start: Pairs = [(self.compiled.initial, OffsetClass::Exact(0))].into();
        let mut states = vec![start.clone()];
        let mut index: HashMap<Pairs, usize> = [(start, 0)].into();
        let mut queue = VecDeque::from([0usize]);
        // rows[state][letter] = [(region, (target, reset))]
        let mut rows: Vec<Vec<Vec<(Region, (usize, bool))>>> = Vec::new();

        while let Some(i) = queue.pop_front() {
            let mut per_letter = Vec::with_capacity(a.alphabet().len());
            for letter in 0..a.alphabet().len() {
                let mut row = Vec::new();
                for &r in &regions {
                    let (next, reset) = self.successor(&states[i], letter, r)?;
                    if next.is_empty() {
                        continue;
                    }
                    let j = match index.get(&next) {
                        Some(&j) => j,
                        None => {
                            let j = states.len();
                            states.push(next.clone());
                            index.insert(next, j);
                            queue.push_back(j);
                            j
                        }
                    };
                    row.push((r, (j, reset)));
                }
                per_letter.push(row);
            }
            debug_assert_eq!(rows.len(), i);
            rows.push(per_letter);
        }

        let names: Vec<String> = (1..=states.len()).map(|i| format!("S{i}")).collect();
        let mut edges = Vec::new();
        for (i, per_letter) in rows.iter().enumerate() {
            for (letter, row) in per_letter.iter().enumerate() {
                let labelled: Vec<_> = match style {
                    GuardStyle::Merged => merge_adjacent(row),
                    GuardStyle::Atomic => row.iter().map(|(r, p)| (r.guard(), *p)).collect(),
                };
                for (guard, (j, reset)) in labelled {
                    edges.push(Edge::new(
                        names[i].clone(),
                        names[j].clone(),
                        a.alphabet()[letter].clone(),
                        guard,
                        reset,
                    ));
                }
            }
        }
        let accepting: Vec<String> = states
            .iter()
            .zip(&names)
            .filter(|(q, _)| q.iter().any(|(l, _)| self.compiled.accepting[*l]))
            .map(|(_, n)| n.clone())
            .collect();
        let automaton = Automaton::builder(format!("{}_det", a.name()))
            .alphabet(a.alphabet().iter().cloned())
            .clock("n")
            .locations(names.iter().cloned())
            .initial(names[0].clone())
            .accepting(accepting)
            .edges(edges)
            .build();
        Ok(Determinized {
            automaton,
            states: states.iter().map(|q| self.to_public(q)).collect(),
            k: self.k,
        })
    }
}

/// One step of the construction: the subset reached from `q` on `letter`
/// when `n` lies in region `r`, and whether `n` is reset. An empty result
/// means no edge.
pub fn successor_subset(
    q: &SubsetState,
    letter: &str,
    r: Region,
    a: &Automaton,
) -> Result<(SubsetState, bool), Error> {
    let c = Construction::new(a)?;
    let li = c.compiled.letter(letter)?;
    let (next, reset) = c.successor(&c.to_internal(q)?, li, r)?;
    Ok((c.to_public(&next), reset))
}

/// Determinizes with merged guard labels.
pub fn determinize(a: &Automaton) -> Result<Determinized, Error> {
    determinize_with(a, GuardStyle::Merged)
}

pub fn determinize_with(a: &Automaton, style: GuardStyle) -> Result<Determinized, Error> {
    Construction::new(a)?.run(style)
}
