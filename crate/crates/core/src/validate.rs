//! Integer-reset and determinism checks.

use std::fmt;

use crate::model::Automaton;

/// Resetting edges whose guard is not a single integer point.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntegerResetReport {
    pub offending: Vec<usize>,
}

impl IntegerResetReport {
    pub fn is_ok(&self) -> bool {
        self.offending.is_empty()
    }
}

/// An edge resets only if its guard is a point `[c, c]` (or empty, which never fires).
pub fn check_integer_reset(a: &Automaton) -> IntegerResetReport {
    let offending = a
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.reset && !e.guard.is_empty() && e.guard.as_point().is_none())
        .map(|(i, _)| i)
        .collect();
    IntegerResetReport { offending }
}

/// Pairs of edges (by index, smaller first) that share source and letter
/// and have overlapping guards.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeterminismReport {
    pub conflicts: Vec<(usize, usize)>,
}

impl DeterminismReport {
    pub fn is_ok(&self) -> bool {
        self.conflicts.is_empty()
    }
}

pub fn check_deterministic(a: &Automaton) -> DeterminismReport {
    let edges = a.edges();
    let mut conflicts = Vec::new();
    for (i, e) in edges.iter().enumerate() {
        for (j, f) in edges.iter().enumerate().skip(i + 1) {
            if e.src == f.src && e.letter == f.letter && !e.guard.is_disjoint(&f.guard) {
                conflicts.push((i, j));
            }
        }
    }
    DeterminismReport { conflicts }
}

impl fmt::Display for IntegerResetReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            f.write_str("integer-reset")
        } else {
            write!(f, "non-integer resets on edges {:?}", self.offending)
        }
    }
}
