//! Completion, complement, synchronized product, region-graph emptiness,
//! inclusion and equivalence.
//!
//! The region graph relies on the integer-reset discipline: every clock of
//! every component has the fractional part of global time, so a joint
//! region is just one integer class per clock plus a shared "fraction is
//! zero / positive" bit.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::determinize::determinize;
use crate::error::Error;
use crate::guard::{atomic_regions, merge_adjacent, Guard, OffsetClass, Region};
use crate::model::{validate_wellformed, Automaton, Compiled, Edge, TimedWord};
use crate::rational::Rational;
use crate::semantics::Simulator;
use crate::validate::{check_deterministic, check_integer_reset};

fn require_deterministic(d: &Automaton) -> Result<(), Error> {
    let report = validate_wellformed(d);
    if !report.is_ok() {
        return Err(Error::Malformed(report));
    }
    if !check_deterministic(d).is_ok() {
        return Err(Error::NotDeterministic(d.name().to_string()));
    }
    Ok(())
}

fn require_irta(a: &Automaton) -> Result<(), Error> {
    let report = check_integer_reset(a);
    if report.is_ok() {
        Ok(())
    } else {
        Err(Error::NotIrta {
            name: a.name().to_string(),
            edges: report.offending,
        })
    }
}

fn fresh_name(taken: &[String], base: &str) -> String {
    let mut name = base.to_string();
    let mut i = 1;
    while taken.contains(&name) {
        name = format!("{base}_{i}");
        i += 1;
    }
    name
}

/// Adds a non-accepting sink so that every (location, letter, region) has
/// exactly one edge. The sink is only added when some slot is missing.
pub fn complete(d: &Automaton) -> Result<Automaton, Error> {
    require_deterministic(d)?;
    let k = d.max_const();
    let regions = atomic_regions(k);
    let sink = fresh_name(d.locations(), "sink");
    let mut extra = Vec::new();
    for loc in d.locations() {
        for letter in d.alphabet() {
            let out: Vec<&Edge> = d
                .edges()
                .iter()
                .filter(|e| &e.src == loc && &e.letter == letter)
                .collect();
            let missing: Vec<(Region, ())> = regions
                .iter()
                .filter(|r| !out.iter().any(|e| e.guard.covers(**r)))
                .map(|r| (*r, ()))
                .collect();
            for (guard, ()) in merge_adjacent(&missing) {
                extra.push(Edge::new(loc.clone(), sink.clone(), letter.clone(), guard, false));
            }
        }
    }
    if extra.is_empty() {
        return Ok(d.clone());
    }
    for letter in d.alphabet() {
        extra.push(Edge::new(
            sink.clone(),
            sink.clone(),
            letter.clone(),
            Guard::TRUE,
            false,
        ));
    }
    let mut locations = d.locations().to_vec();
    locations.push(sink);
    let edges = d.edges().iter().cloned().chain(extra).collect();
    Ok(d.with_locations(locations).with_edges(edges))
}

/// Completes `d` and inverts its accepting set.
pub fn complement(d: &Automaton) -> Result<Automaton, Error> {
    let c = complete(d)?;
    let accepting: Vec<String> = c
        .locations()
        .iter()
        .filter(|l| !c.is_accepting(l))
        .cloned()
        .collect();
    Ok(c.with_accepting(accepting).with_name(format!("{}_co", d.name())))
}

/// `(source, letter, region) -> (target, reset)` for a deterministic
/// automaton, with guards expanded over the atomic regions of constant `k`
/// (which must be at least the automaton's own maximal constant).
pub type RegionTable = BTreeMap<(String, String, Region), (String, bool)>;

pub fn region_table(d: &Automaton, k: u64) -> Result<RegionTable, Error> {
    require_deterministic(d)?;
    let k = k.max(d.max_const());
    let mut table = BTreeMap::new();
    for e in d.edges() {
        for r in atomic_regions(k) {
            if e.guard.covers(r) {
                table.insert(
                    (e.src.clone(), e.letter.clone(), r),
                    (e.dst.clone(), e.reset),
                );
            }
        }
    }
    Ok(table)
}

/// Synchronized product: all components read the same letter at the same
/// instant, each with its own clock; a word is accepted when every
/// component accepts it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Product {
    components: Vec<Automaton>,
}

impl Product {
    pub fn single(a: &Automaton) -> Product {
        Product {
            components: vec![a.clone()],
        }
    }

    pub fn components(&self) -> &[Automaton] {
        &self.components
    }

    pub fn alphabet(&self) -> &[String] {
        self.components[0].alphabet()
    }

    pub fn member(&self, w: &TimedWord) -> Result<bool, Error> {
        for c in &self.components {
            if !Simulator::new(c)?.member(w)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl From<&Automaton> for Product {
    fn from(a: &Automaton) -> Product {
        Product::single(a)
    }
}

pub fn product(a: &Automaton, b: &Automaton) -> Result<Product, Error> {
    if !a.same_alphabet(b) {
        return Err(Error::AlphabetMismatch);
    }
    Ok(Product {
        components: vec![a.clone(), b.clone()],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Frac {
    Zero,
    Positive,
}

/// Joint region of several clocks sharing one fractional part.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductRegion {
    /// Integer class of each clock: `Exact(c)` for `c <= K_i`, else `AboveK`.
    pub ints: Vec<OffsetClass>,
    pub frac: Frac,
}

impl ProductRegion {
    pub fn initial(n: usize) -> ProductRegion {
        ProductRegion {
            ints: vec![OffsetClass::Exact(0); n],
            frac: Frac::Zero,
        }
    }

    /// Region of concrete clock values; `None` if their fractional parts differ.
    pub fn of(values: &[Rational], ks: &[u64]) -> Option<ProductRegion> {
        let frac = values.first().map(|v| v.fract()).unwrap_or(Rational::ZERO);
        if values.iter().any(|v| v.fract() != frac) {
            return None;
        }
        Some(ProductRegion {
            ints: values
                .iter()
                .zip(ks)
                .map(|(v, &k)| OffsetClass::saturate(v.floor(), k))
                .collect(),
            frac: if frac == Rational::ZERO {
                Frac::Zero
            } else {
                Frac::Positive
            },
        })
    }

    /// Next region reached by letting time pass.
    pub fn delay_successor(&self, ks: &[u64]) -> ProductRegion {
        match self.frac {
            Frac::Zero => ProductRegion {
                ints: self.ints.clone(),
                frac: Frac::Positive,
            },
            Frac::Positive => ProductRegion {
                ints: self
                    .ints
                    .iter()
                    .zip(ks)
                    .map(|(c, &k)| c.plus(1, k))
                    .collect(),
                frac: Frac::Zero,
            },
        }
    }

    /// Atomic region of clock `i` (constants up to `k`).
    pub fn clock_region(&self, i: usize, k: u64) -> Region {
        match (self.ints[i], self.frac) {
            (OffsetClass::Exact(c), Frac::Zero) => Region::Point(c),
            (OffsetClass::Exact(c), Frac::Positive) if c < k => Region::OpenUnit(c),
            _ => Region::AboveK(k),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RegionNode {
    pub locs: Vec<usize>,
    pub region: ProductRegion,
}

#[derive(Debug, Clone, Copy)]
enum Step {
    Delay,
    Fire(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Emptiness {
    Empty,
    NonEmpty { witness: TimedWord },
}

impl Emptiness {
    pub fn is_empty(&self) -> bool {
        matches!(self, Emptiness::Empty)
    }

    pub fn witness(&self) -> Option<&TimedWord> {
        match self {
            Emptiness::Empty => None,
            Emptiness::NonEmpty { witness } => Some(witness),
        }
    }
}

struct RegionGraph<'a> {
    product: &'a Product,
    compiled: Vec<Compiled>,
    ks: Vec<u64>,
    /// `letters[i][l]`: index in component `i` of product letter `l`.
    letters: Vec<Vec<usize>>,
}

impl<'a> RegionGraph<'a> {
    fn new(p: &'a Product) -> Result<RegionGraph<'a>, Error> {
        let mut compiled = Vec::new();
        let mut letters = Vec::new();
        for c in &p.components {
            if !c.same_alphabet(&p.components[0]) {
                return Err(Error::AlphabetMismatch);
            }
            let comp = Compiled::new(c)?;
            require_irta(c)?;
            letters.push(
                p.alphabet()
                    .iter()
                    .map(|l| comp.letter(l))
                    .collect::<Result<Vec<_>, _>>()?,
            );
            compiled.push(comp);
        }
        Ok(RegionGraph {
            ks: compiled.iter().map(|c| c.k).collect(),
            product: p,
            compiled,
            letters,
        })
    }

    fn accepting(&self, node: &RegionNode) -> bool {
        node.locs
            .iter()
            .zip(&self.compiled)
            .all(|(l, c)| c.accepting[*l])
    }

    fn discrete(&self, node: &RegionNode, letter: usize) -> Result<Vec<RegionNode>, Error> {
        let mut partial: Vec<(Vec<usize>, Vec<OffsetClass>)> = vec![(Vec::new(), Vec::new())];
        for (i, comp) in self.compiled.iter().enumerate() {
            let region = node.region.clock_region(i, self.ks[i]);
            let value = region.representative();
            let mut options = Vec::new();
            for &(guard, reset, dst) in &comp.out[node.locs[i]][self.letters[i][letter]] {
                if !guard.eval(value) {
                    continue;
                }
                let class = if reset {
                    if !matches!(region, Region::Point(_)) {
                        return Err(Error::Internal(format!(
                            "reset enabled on non-integer region {region}"
                        )));
                    }
                    OffsetClass::Exact(0)
                } else {
                    node.region.ints[i]
                };
                options.push((dst, class));
            }
            if options.is_empty() {
                return Ok(Vec::new());
            }
            partial = partial
                .into_iter()
                .flat_map(|(locs, ints)| {
                    options.iter().map(move |&(dst, class)| {
                        let mut locs = locs.clone();
                        let mut ints = ints.clone();
                        locs.push(dst);
                        ints.push(class);
                        (locs, ints)
                    })
                })
                .collect();
        }
        Ok(partial
            .into_iter()
            .map(|(locs, ints)| RegionNode {
                locs,
                region: ProductRegion {
                    ints,
                    frac: node.region.frac,
                },
            })
            .collect())
    }

    fn search(&self) -> Result<Emptiness, Error> {
        let start = RegionNode {
            locs: self.compiled.iter().map(|c| c.initial).collect(),
            region: ProductRegion::initial(self.compiled.len()),
        };
        let mut nodes = vec![start.clone()];
        let mut parent: Vec<Option<(usize, Step)>> = vec![None];
        let mut index: HashMap<RegionNode, usize> = [(start, 0)].into();
        let mut queue = VecDeque::from([0usize]);
        let letters = self.product.alphabet().len();

        while let Some(i) = queue.pop_front() {
            if self.accepting(&nodes[i]) {
                return Ok(Emptiness::NonEmpty {
                    witness: self.witness(&nodes, &parent, i)?,
                });
            }
            let mut succ = vec![(
                RegionNode {
                    locs: nodes[i].locs.clone(),
                    region: nodes[i].region.delay_successor(&self.ks),
                },
                Step::Delay,
            )];
            for l in 0..letters {
                succ.extend(self.discrete(&nodes[i], l)?.into_iter().map(|n| (n, Step::Fire(l))));
            }
            for (n, step) in succ {
                if index.contains_key(&n) {
                    continue;
                }
                let j = nodes.len();
                index.insert(n.clone(), j);
                nodes.push(n);
                parent.push(Some((i, step)));
                queue.push_back(j);
            }
        }
        Ok(Emptiness::Empty)
    }

    fn witness(
        &self,
        nodes: &[RegionNode],
        parent: &[Option<(usize, Step)>],
        mut at: usize,
    ) -> Result<TimedWord, Error> {
        let mut steps = Vec::new();
        while let Some((p, step)) = parent[at] {
            steps.push((step, nodes[p].region.frac));
            at = p;
        }
        steps.reverse();
        let half = Rational::new(1, 2)?;
        let mut t = Rational::ZERO;
        let mut events = Vec::new();
        for (step, frac) in steps {
            match step {
                Step::Delay => {
                    t = match frac {
                        Frac::Zero => t.checked_add(half)?,
                        Frac::Positive => Rational::from_integer(t.floor() + 1),
                    }
                }
                Step::Fire(l) => events.push((self.product.alphabet()[l].clone(), t)),
            }
        }
        let w = TimedWord::new(events)?;
        if !self.product.member(&w)? {
            return Err(Error::Internal(format!(
                "region-graph witness `{w}` rejected by the simulator"
            )));
        }
        Ok(w)
    }
}

/// Region-graph reachability of an accepting node. Non-empty answers carry
/// a witness word already confirmed by the simulator.
pub fn is_empty(p: &Product) -> Result<Emptiness, Error> {
    RegionGraph::new(p)?.search()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Inclusion {
    Holds,
    /// A word accepted by the left automaton and rejected by the right one.
    Fails { counterexample: TimedWord },
}

impl Inclusion {
    pub fn holds(&self) -> bool {
        matches!(self, Inclusion::Holds)
    }
}

/// `L(a) ⊆ L(b)`, decided by emptiness of `a × complement(determinize(b))`.
pub fn includes(a: &Automaton, b: &Automaton) -> Result<Inclusion, Error> {
    if !a.same_alphabet(b) {
        return Err(Error::AlphabetMismatch);
    }
    require_irta(a)?;
    let co = complement(&determinize(b)?.automaton)?;
    match is_empty(&product(a, &co)?)? {
        Emptiness::Empty => Ok(Inclusion::Holds),
        Emptiness::NonEmpty { witness } => {
            let in_a = Simulator::new(a)?.member(&witness)?;
            let in_b = Simulator::new(b)?.member(&witness)?;
            if !in_a || in_b {
                return Err(Error::Internal(format!(
                    "inclusion counterexample `{witness}` does not separate the automata"
                )));
            }
            Ok(Inclusion::Fails {
                counterexample: witness,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent,
    /// `word` is accepted by exactly one side; `accepted_by_first` tells which.
    Distinguished { word: TimedWord, accepted_by_first: bool },
}

impl Equivalence {
    pub fn holds(&self) -> bool {
        matches!(self, Equivalence::Equivalent)
    }
}

pub fn equivalent(a: &Automaton, b: &Automaton) -> Result<Equivalence, Error> {
    if let Inclusion::Fails { counterexample } = includes(a, b)? {
        return Ok(Equivalence::Distinguished {
            word: counterexample,
            accepted_by_first: true,
        });
    }
    if let Inclusion::Fails { counterexample } = includes(b, a)? {
        return Ok(Equivalence::Distinguished {
            word: counterexample,
            accepted_by_first: false,
        });
    }
    Ok(Equivalence::Equivalent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::member;

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

    #[test]
    fn complete_adds_sink_for_missing_slots() {
        let d = determinize(&figure_a()).unwrap().automaton;
        let c = complete(&d).unwrap();
        assert!(c.locations().contains(&"sink".to_string()));
        assert!(c.edges().iter().any(|e| e.src == "S1"
            && e.letter == "b"
            && e.dst == "sink"
            && e.guard.covers(Region::OpenUnit(0))));
        assert!(!c.is_accepting("sink"));
        assert!(check_deterministic(&c).is_ok());
    }

    #[test]
    fn complete_keeps_total_automata() {
        let total = Automaton::builder("t")
            .alphabet(["a"])
            .locations(["p"])
            .edge(Edge::new("p", "p", "a", Guard::TRUE, false))
            .build();
        assert_eq!(complete(&total).unwrap(), total);
    }

    #[test]
    fn complete_edgeless() {
        let a = Automaton::builder("z").alphabet(["a", "b"]).locations(["p"]).build();
        let c = complete(&a).unwrap();
        assert_eq!(c.locations().len(), 2);
        // p -> sink and sink -> sink on each letter
        assert_eq!(c.edges().len(), 4);
    }

    #[test]
    fn complete_rejects_nondeterministic() {
        assert!(matches!(complete(&figure_a()), Err(Error::NotDeterministic(_))));
    }

    #[test]
    fn sink_name_avoids_clashes() {
        let a = Automaton::builder("z").alphabet(["a"]).locations(["sink"]).build();
        let c = complete(&a).unwrap();
        assert_eq!(c.locations()[1], "sink_1");
    }

    #[test]
    fn complement_flips_empty_word() {
        let d = determinize(&figure_a()).unwrap().automaton;
        let co = complement(&d).unwrap();
        assert!(member(&d, &TimedWord::empty()).unwrap());
        assert!(!member(&co, &TimedWord::empty()).unwrap());
        let w = TimedWord::new([("b", q(1, 2))]).unwrap();
        assert!(member(&co, &w).unwrap());
    }

    #[test]
    fn product_requires_same_alphabet() {
        let a = figure_a();
        let b = Automaton::builder("b").alphabet(["b"]).locations(["p"]).build();
        assert!(matches!(product(&a, &b), Err(Error::AlphabetMismatch)));
        let d = determinize(&a).unwrap().automaton;
        let p = product(&a, &d).unwrap();
        assert!(p.member(&TimedWord::new([("b", Rational::ONE)]).unwrap()).unwrap());
    }

    #[test]
    fn figure_a_is_nonempty() {
        let e = is_empty(&Product::single(&figure_a())).unwrap();
        // the empty word is already accepted
        assert_eq!(e.witness(), Some(&TimedWord::empty()));
    }

    #[test]
    fn witness_needs_delays() {
        let a = figure_a().with_locations(vec!["S".into(), "T".into()]).with_accepting(["T"]);
        let a = a.with_edges(
            a.edges()
                .iter()
                .cloned()
                .chain([Edge::new("S", "T", "c", Guard::greater_than(1), false)])
                .collect(),
        );
        let w = is_empty(&Product::single(&a)).unwrap();
        let w = w.witness().unwrap();
        assert_eq!(w.to_string(), "c@3/2");
        assert!(member(&a, w).unwrap());
    }

    #[test]
    fn dead_guard_is_empty() {
        let a = Automaton::builder("d")
            .alphabet(["a"])
            .locations(["p", "f"])
            .initial("p")
            .accepting(["f"])
            .edge(Edge::new("p", "f", "a", Guard::Empty, false))
            .build();
        assert!(is_empty(&Product::single(&a)).unwrap().is_empty());
    }

    #[test]
    fn figure_equivalent_to_its_determinization() {
        let a = figure_a();
        let d = determinize(&a).unwrap().automaton;
        assert!(is_empty(&product(&a, &complement(&d).unwrap()).unwrap())
            .unwrap()
            .is_empty());
        assert!(equivalent(&a, &d).unwrap().holds());
        assert!(equivalent(&a, &a).unwrap().holds());
    }

    #[test]
    fn deleting_d2_breaks_inclusion() {
        let a = figure_a();
        let smaller = a.without_edge(1);
        match includes(&a, &smaller).unwrap() {
            Inclusion::Fails { counterexample } => {
                assert!(member(&a, &counterexample).unwrap());
                assert!(!member(&smaller, &counterexample).unwrap());
            }
            Inclusion::Holds => panic!("inclusion should fail"),
        }
        assert!(includes(&smaller, &a).unwrap().holds());
    }

    #[test]
    fn deleting_d5_breaks_equivalence() {
        let a = figure_a();
        let r = equivalent(&a, &a.without_edge(4)).unwrap();
        assert!(!r.holds());
    }

    #[test]
    fn non_irta_is_refused() {
        let a = figure_a();
        let bad = a.with_edge_replaced(1, Edge::new("S", "S", "b", Guard::at_least(1), true));
        assert!(matches!(is_empty(&Product::single(&bad)), Err(Error::NotIrta { .. })));
        assert!(matches!(includes(&bad, &a), Err(Error::NotIrta { .. })));
    }

    #[test]
    fn delay_successor_cycles_through_classes() {
        let ks = [1, 0];
        let r0 = ProductRegion::initial(2);
        let r1 = r0.delay_successor(&ks);
        assert_eq!(r1.frac, Frac::Positive);
        let r2 = r1.delay_successor(&ks);
        assert_eq!(r2.ints, vec![OffsetClass::Exact(1), OffsetClass::AboveK]);
        let r4 = r2.delay_successor(&ks).delay_successor(&ks);
        assert_eq!(r4.ints, vec![OffsetClass::AboveK, OffsetClass::AboveK]);
        assert_eq!(
            ProductRegion::of(&[q(3, 2), q(1, 2)], &ks),
            Some(ProductRegion {
                ints: vec![OffsetClass::Exact(1), OffsetClass::Exact(0)],
                frac: Frac::Positive
            })
        );
        assert_eq!(ProductRegion::of(&[q(3, 2), q(1, 3)], &ks), None);
    }
}
