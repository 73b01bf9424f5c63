//! Automaton and timed-word data model.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::Error;
use crate::guard::Guard;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: String,
    pub dst: String,
    pub letter: String,
    pub guard: Guard,
    pub reset: bool,
}

impl Edge {
    pub fn new(
        src: impl Into<String>,
        dst: impl Into<String>,
        letter: impl Into<String>,
        guard: Guard,
        reset: bool,
    ) -> Edge {
        Edge {
            src: src.into(),
            dst: dst.into(),
            letter: letter.into(),
            guard,
            reset,
        }
    }
}

/// A single-clock timed automaton over finite timed words.
///
/// Values are immutable; the `with_*` methods return modified copies and
/// keep the derived maximal constant in sync with the edges.
#[derive(Debug, Clone)]
pub struct Automaton {
    name: String,
    alphabet: Vec<String>,
    clock: String,
    locations: Vec<String>,
    initial: String,
    accepting: BTreeSet<String>,
    edges: Vec<Edge>,
    max_const: u64,
}

fn max_const_of(edges: &[Edge]) -> u64 {
    edges
        .iter()
        .filter_map(|e| e.guard.max_constant())
        .max()
        .unwrap_or(0)
}

impl Automaton {
    pub fn builder(name: impl Into<String>) -> AutomatonBuilder {
        AutomatonBuilder {
            name: name.into(),
            alphabet: Vec::new(),
            clock: "x".to_string(),
            locations: Vec::new(),
            initial: None,
            accepting: BTreeSet::new(),
            edges: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn clock(&self) -> &str {
        &self.clock
    }

    pub fn locations(&self) -> &[String] {
        &self.locations
    }

    pub fn initial(&self) -> &str {
        &self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<String> {
        &self.accepting
    }

    pub fn is_accepting(&self, loc: &str) -> bool {
        self.accepting.contains(loc)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Largest finite guard endpoint over all edges (`K`), 0 if none.
    pub fn max_const(&self) -> u64 {
        self.max_const
    }

    pub fn with_name(&self, name: impl Into<String>) -> Automaton {
        Automaton {
            name: name.into(),
            ..self.clone()
        }
    }

    pub fn with_edges(&self, edges: Vec<Edge>) -> Automaton {
        Automaton {
            max_const: max_const_of(&edges),
            edges,
            ..self.clone()
        }
    }

    pub fn with_edge_replaced(&self, index: usize, edge: Edge) -> Automaton {
        let mut edges = self.edges.clone();
        edges[index] = edge;
        self.with_edges(edges)
    }

    pub fn without_edge(&self, index: usize) -> Automaton {
        let mut edges = self.edges.clone();
        edges.remove(index);
        self.with_edges(edges)
    }

    pub fn with_accepting<I, S>(&self, accepting: I) -> Automaton
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Automaton {
            accepting: accepting.into_iter().map(Into::into).collect(),
            ..self.clone()
        }
    }

    pub fn with_locations(&self, locations: Vec<String>) -> Automaton {
        Automaton {
            locations,
            ..self.clone()
        }
    }

    pub fn with_initial(&self, initial: impl Into<String>) -> Automaton {
        Automaton {
            initial: initial.into(),
            ..self.clone()
        }
    }

    pub fn location_index(&self, loc: &str) -> Option<usize> {
        self.locations.iter().position(|l| l == loc)
    }

    pub fn letter_index(&self, letter: &str) -> Option<usize> {
        self.alphabet.iter().position(|l| l == letter)
    }

    /// Edges in canonical order: source, letter, guard, then target and reset.
    pub fn sorted_edges(&self) -> Vec<Edge> {
        let mut edges = self.edges.clone();
        let key = |e: &Edge| {
            (
                self.location_index(&e.src).unwrap_or(usize::MAX),
                self.letter_index(&e.letter).unwrap_or(usize::MAX),
                e.guard,
                self.location_index(&e.dst).unwrap_or(usize::MAX),
                e.reset,
            )
        };
        edges.sort_by(|a, b| key(a).cmp(&key(b)).then_with(|| (&a.src, &a.letter, &a.dst).cmp(&(&b.src, &b.letter, &b.dst))));
        edges
    }

    pub fn same_alphabet(&self, other: &Automaton) -> bool {
        let a: BTreeSet<&String> = self.alphabet.iter().collect();
        let b: BTreeSet<&String> = other.alphabet.iter().collect();
        a == b
    }
}

/// Structural equality: edges compare as a multiset, accepting as a set.
impl PartialEq for Automaton {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.alphabet == other.alphabet
            && self.clock == other.clock
            && self.locations == other.locations
            && self.initial == other.initial
            && self.accepting == other.accepting
            && self.edges.len() == other.edges.len()
            && self.sorted_edges() == other.sorted_edges()
    }
}

impl Eq for Automaton {}

pub struct AutomatonBuilder {
    name: String,
    alphabet: Vec<String>,
    clock: String,
    locations: Vec<String>,
    initial: Option<String>,
    accepting: BTreeSet<String>,
    edges: Vec<Edge>,
}

impl AutomatonBuilder {
    pub fn alphabet<I, S>(mut self, letters: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.alphabet = letters.into_iter().map(Into::into).collect();
        self
    }

    pub fn clock(mut self, clock: impl Into<String>) -> Self {
        self.clock = clock.into();
        self
    }

    pub fn locations<I, S>(mut self, locations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.locations = locations.into_iter().map(Into::into).collect();
        self
    }

    pub fn initial(mut self, loc: impl Into<String>) -> Self {
        self.initial = Some(loc.into());
        self
    }

    pub fn accepting<I, S>(mut self, locations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.accepting = locations.into_iter().map(Into::into).collect();
        self
    }

    pub fn edge(mut self, edge: Edge) -> Self {
        self.edges.push(edge);
        self
    }

    pub fn edges(mut self, edges: impl IntoIterator<Item = Edge>) -> Self {
        self.edges.extend(edges);
        self
    }

    /// Never fails; structural problems are reported by [`validate_wellformed`].
    /// Without an explicit initial location the first location is used.
    pub fn build(self) -> Automaton {
        let initial = self
            .initial
            .or_else(|| self.locations.first().cloned())
            .unwrap_or_default();
        Automaton {
            max_const: max_const_of(&self.edges),
            name: self.name,
            alphabet: self.alphabet,
            clock: self.clock,
            locations: self.locations,
            initial,
            accepting: self.accepting,
            edges: self.edges,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Issue {
    MissingInitial(String),
    UnknownAccepting(String),
    UnknownSource { edge: usize, location: String },
    UnknownTarget { edge: usize, location: String },
    UnknownLetter { edge: usize, letter: String },
    DuplicateLocation(String),
    DuplicateLetter(String),
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::MissingInitial(l) => write!(f, "missing initial location `{l}`"),
            Issue::UnknownAccepting(l) => write!(f, "accepting location `{l}` is not declared"),
            Issue::UnknownSource { edge, location } => {
                write!(f, "edge {edge}: unknown source location `{location}`")
            }
            Issue::UnknownTarget { edge, location } => {
                write!(f, "edge {edge}: unknown target location `{location}`")
            }
            Issue::UnknownLetter { edge, letter } => {
                write!(f, "edge {edge}: letter `{letter}` is not in the alphabet")
            }
            Issue::DuplicateLocation(l) => write!(f, "location `{l}` declared twice"),
            Issue::DuplicateLetter(l) => write!(f, "letter `{l}` declared twice"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return f.write_str("well-formed");
        }
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

pub fn validate_wellformed(a: &Automaton) -> ValidationReport {
    let mut issues = Vec::new();
    let mut seen = BTreeSet::new();
    for l in &a.locations {
        if !seen.insert(l) {
            issues.push(Issue::DuplicateLocation(l.clone()));
        }
    }
    let mut letters = BTreeSet::new();
    for l in &a.alphabet {
        if !letters.insert(l) {
            issues.push(Issue::DuplicateLetter(l.clone()));
        }
    }
    if !seen.contains(&a.initial) {
        issues.push(Issue::MissingInitial(a.initial.clone()));
    }
    for l in &a.accepting {
        if !seen.contains(l) {
            issues.push(Issue::UnknownAccepting(l.clone()));
        }
    }
    for (i, e) in a.edges.iter().enumerate() {
        if !seen.contains(&e.src) {
            issues.push(Issue::UnknownSource {
                edge: i,
                location: e.src.clone(),
            });
        }
        if !seen.contains(&e.dst) {
            issues.push(Issue::UnknownTarget {
                edge: i,
                location: e.dst.clone(),
            });
        }
        if !letters.contains(&e.letter) {
            issues.push(Issue::UnknownLetter {
                edge: i,
                letter: e.letter.clone(),
            });
        }
    }
    ValidationReport { issues }
}

/// Index-based view of a well-formed automaton.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub initial: usize,
    pub accepting: Vec<bool>,
    pub k: u64,
    /// `out[loc][letter]` lists `(guard, reset, dst)`.
    pub out: Vec<Vec<Vec<(Guard, bool, usize)>>>,
    pub names: Vec<String>,
    locs: HashMap<String, usize>,
    letters: HashMap<String, usize>,
}

impl Compiled {
    pub fn new(a: &Automaton) -> Result<Compiled, Error> {
        let report = validate_wellformed(a);
        if !report.is_ok() {
            return Err(Error::Malformed(report));
        }
        let locs: HashMap<&str, usize> = a
            .locations
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let letters: HashMap<String, usize> = a
            .alphabet
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        let mut out = vec![vec![Vec::new(); a.alphabet.len()]; a.locations.len()];
        for e in &a.edges {
            out[locs[e.src.as_str()]][letters[&e.letter]].push((e.guard, e.reset, locs[e.dst.as_str()]));
        }
        Ok(Compiled {
            initial: locs[a.initial.as_str()],
            accepting: a.locations.iter().map(|l| a.accepting.contains(l)).collect(),
            k: a.max_const,
            out,
            names: a.locations.clone(),
            locs: locs.iter().map(|(l, i)| (l.to_string(), *i)).collect(),
            letters,
        })
    }

    pub fn loc(&self, name: &str) -> Option<usize> {
        self.locs.get(name).copied()
    }

    pub fn letter(&self, letter: &str) -> Result<usize, Error> {
        self.letters
            .get(letter)
            .copied()
            .ok_or_else(|| Error::UnknownLetter(letter.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimedEvent {
    pub letter: String,
    pub time: Rational,
}

/// A finite word of `(letter, absolute time)` events with non-decreasing times.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimedWord {
    events: Vec<TimedEvent>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Monotonicity {
    /// Equal adjacent timestamps allowed.
    #[default]
    Weak,
    Strict,
}

impl TimedWord {
    pub fn empty() -> TimedWord {
        TimedWord::default()
    }

    pub fn new<I, S>(events: I) -> Result<TimedWord, Error>
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<String>,
    {
        Self::with_monotonicity(events, Monotonicity::Weak)
    }

    pub fn with_monotonicity<I, S>(events: I, mode: Monotonicity) -> Result<TimedWord, Error>
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<String>,
    {
        let events: Vec<TimedEvent> = events
            .into_iter()
            .map(|(letter, time)| TimedEvent {
                letter: letter.into(),
                time,
            })
            .collect();
        let word = TimedWord { events };
        word.check(mode)?;
        Ok(word)
    }

    pub fn check(&self, mode: Monotonicity) -> Result<(), Error> {
        for (i, pair) in self.events.windows(2).enumerate() {
            let bad = match mode {
                Monotonicity::Weak => pair[1].time < pair[0].time,
                Monotonicity::Strict => pair[1].time <= pair[0].time,
            };
            if bad {
                return Err(Error::NonMonotoneTime { index: i + 1 });
            }
        }
        Ok(())
    }

    pub fn events(&self) -> &[TimedEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// Renders in the `letter@time` grammar; the empty word renders as the empty string.
impl fmt::Display for TimedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.events.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}@{}", e.letter, e.time)?;
        }
        Ok(())
    }
}
