//! Single-clock integer reset timed automata (IRTA).
//!
//! Exact simulation over rational timestamps, determinization by the
//! offset-class subset construction, complement, product, region-graph
//! emptiness, and language inclusion/equivalence with simulator-checked
//! counterexamples.

pub mod analysis;
pub mod determinize;
pub mod error;
pub mod format;
pub mod fuzz;
pub mod guard;
pub mod model;
pub mod rational;
pub mod semantics;
pub mod validate;

pub use analysis::{
    complement, complete, equivalent, includes, is_empty, product, Emptiness, Equivalence, Frac,
    Inclusion, Product, ProductRegion, RegionNode, region_table, RegionTable,
};
pub use determinize::{determinize, determinize_with, successor_subset, Determinized, GuardStyle, SubsetState};
pub use error::{Error, ParseError, SourceSpan};
pub use format::{parse_automaton, parse_timed_word, parse_timed_word_with, print_automaton, to_dot};
pub use fuzz::{fuzz_equivalence, random_irta, FuzzParams, FuzzReport, IrtaParams, Mismatch, WordGenerator};
pub use guard::{
    atomic_regions, merge_adjacent, normalize_guard, region_of, shift_guard_to_n, CmpOp, Guard, OffsetClass,
    Region,
};
pub use model::{validate_wellformed, Automaton, Edge, Issue, Monotonicity, TimedEvent, TimedWord, ValidationReport};
pub use rational::Rational;
pub use semantics::{initial_configs, member, member_with, step_configs, Config, ConfigSet, Simulator};
pub use validate::{check_deterministic, check_integer_reset, DeterminismReport, IntegerResetReport};
