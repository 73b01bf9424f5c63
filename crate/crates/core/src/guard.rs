//! One-clock interval guards, the region partition, and the offset shift
//! used by the determinizer.

use std::cmp::Ordering;
use std::fmt;

use crate::rational::Rational;

/// Comparison operator of an atomic constraint `clock OP c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// A nonempty interval of clock values with integer endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    lower: u64,
    lower_closed: bool,
    /// `None` is `+inf`.
    upper: Option<(u64, bool)>,
}

impl Interval {
    pub fn lower(&self) -> u64 {
        self.lower
    }

    pub fn lower_closed(&self) -> bool {
        self.lower_closed
    }

    pub fn upper(&self) -> Option<u64> {
        self.upper.map(|(u, _)| u)
    }

    pub fn upper_closed(&self) -> bool {
        matches!(self.upper, Some((_, true)))
    }

    fn contains(&self, v: Rational) -> bool {
        let lo_ok = match v.cmp_integer(self.lower) {
            Ordering::Greater => true,
            Ordering::Equal => self.lower_closed,
            Ordering::Less => false,
        };
        let hi_ok = match self.upper {
            None => true,
            Some((u, closed)) => match v.cmp_integer(u) {
                Ordering::Less => true,
                Ordering::Equal => closed,
                Ordering::Greater => false,
            },
        };
        lo_ok && hi_ok
    }

    /// Is `other` a subset of `self`?
    fn includes(&self, other: &Interval) -> bool {
        let lo_ok = match self.lower.cmp(&other.lower) {
            Ordering::Less => true,
            Ordering::Equal => self.lower_closed || !other.lower_closed,
            Ordering::Greater => false,
        };
        let hi_ok = match (self.upper, other.upper) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some((a, ac)), Some((b, bc))) => match a.cmp(&b) {
                Ordering::Greater => true,
                Ordering::Equal => ac || !bc,
                Ordering::Less => false,
            },
        };
        lo_ok && hi_ok
    }

    fn shifted(&self, by: u64) -> Interval {
        Interval {
            lower: self.lower + by,
            lower_closed: self.lower_closed,
            upper: self.upper.map(|(u, c)| (u + by, c)),
        }
    }

    fn sort_key(&self) -> (u64, bool, u64, bool) {
        match self.upper {
            Some((u, c)) => (self.lower, !self.lower_closed, u, c),
            None => (self.lower, !self.lower_closed, u64::MAX, true),
        }
    }
}

/// Normalized guard: either the canonical empty guard or one interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Guard {
    Empty,
    Interval(Interval),
}

impl Guard {
    /// `x >= 0`, satisfied by every clock value.
    pub const TRUE: Guard = Guard::Interval(Interval {
        lower: 0,
        lower_closed: true,
        upper: None,
    });

    /// Builds a guard from bounds, collapsing unsatisfiable intervals to `Empty`.
    pub fn interval(lower: u64, lower_closed: bool, upper: Option<(u64, bool)>) -> Guard {
        if let Some((u, uc)) = upper {
            if u < lower || (u == lower && !(lower_closed && uc)) {
                return Guard::Empty;
            }
        }
        Guard::Interval(Interval {
            lower,
            lower_closed,
            upper,
        })
    }

    pub fn point(c: u64) -> Guard {
        Guard::interval(c, true, Some((c, true)))
    }

    pub fn at_least(c: u64) -> Guard {
        Guard::interval(c, true, None)
    }

    pub fn greater_than(c: u64) -> Guard {
        Guard::interval(c, false, None)
    }

    pub fn as_interval(&self) -> Option<&Interval> {
        match self {
            Guard::Empty => None,
            Guard::Interval(i) => Some(i),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Guard::Empty)
    }

    /// The constant `c` if this guard is exactly `x == c`.
    pub fn as_point(&self) -> Option<u64> {
        match self {
            Guard::Interval(Interval {
                lower,
                lower_closed: true,
                upper: Some((u, true)),
            }) if lower == u => Some(*lower),
            _ => None,
        }
    }

    pub fn eval(&self, v: Rational) -> bool {
        match self {
            Guard::Empty => false,
            Guard::Interval(i) => i.contains(v),
        }
    }

    pub fn intersect(&self, other: &Guard) -> Guard {
        let (a, b) = match (self, other) {
            (Guard::Interval(a), Guard::Interval(b)) => (a, b),
            _ => return Guard::Empty,
        };
        let (lower, lower_closed) = match a.lower.cmp(&b.lower) {
            Ordering::Greater => (a.lower, a.lower_closed),
            Ordering::Less => (b.lower, b.lower_closed),
            Ordering::Equal => (a.lower, a.lower_closed && b.lower_closed),
        };
        let upper = match (a.upper, b.upper) {
            (None, u) | (u, None) => u,
            (Some((x, xc)), Some((y, yc))) => Some(match x.cmp(&y) {
                Ordering::Less => (x, xc),
                Ordering::Greater => (y, yc),
                Ordering::Equal => (x, xc && yc),
            }),
        };
        Guard::interval(lower, lower_closed, upper)
    }

    pub fn is_disjoint(&self, other: &Guard) -> bool {
        self.intersect(other).is_empty()
    }

    /// Does every value in `region` satisfy this guard?
    pub fn covers(&self, region: Region) -> bool {
        match self {
            Guard::Empty => false,
            Guard::Interval(i) => i.includes(&region.interval()),
        }
    }

    /// Largest finite endpoint, if any.
    pub fn max_constant(&self) -> Option<u64> {
        match self {
            Guard::Empty => None,
            Guard::Interval(i) => Some(i.upper().unwrap_or(i.lower)),
        }
    }

    /// Canonical atomic constraints. `true` is the empty list; the empty
    /// guard is rendered as `clock < 0`.
    pub fn atoms(&self) -> Vec<(CmpOp, u64)> {
        match self {
            Guard::Empty => vec![(CmpOp::Lt, 0)],
            Guard::Interval(i) => {
                if let Some(c) = self.as_point() {
                    return vec![(CmpOp::Eq, c)];
                }
                let mut out = Vec::with_capacity(2);
                if i.lower_closed {
                    if i.lower > 0 {
                        out.push((CmpOp::Ge, i.lower));
                    }
                } else {
                    out.push((CmpOp::Gt, i.lower));
                }
                match i.upper {
                    Some((u, true)) => out.push((CmpOp::Le, u)),
                    Some((u, false)) => out.push((CmpOp::Lt, u)),
                    None => {}
                }
                out
            }
        }
    }

    /// Renders the guard over the named clock, e.g. `x >= 1 & x < 2`.
    pub fn display<'a>(&'a self, clock: &'a str) -> GuardDisplay<'a> {
        GuardDisplay { guard: self, clock }
    }
}

impl Ord for Guard {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Guard::Empty, Guard::Empty) => Ordering::Equal,
            (Guard::Empty, _) => Ordering::Less,
            (_, Guard::Empty) => Ordering::Greater,
            (Guard::Interval(a), Guard::Interval(b)) => a.sort_key().cmp(&b.sort_key()),
        }
    }
}

impl PartialOrd for Guard {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub struct GuardDisplay<'a> {
    guard: &'a Guard,
    clock: &'a str,
}

impl fmt::Display for GuardDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms = self.guard.atoms();
        if atoms.is_empty() {
            return f.write_str("true");
        }
        for (i, (op, c)) in atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{} {} {}", self.clock, op.symbol(), c)?;
        }
        Ok(())
    }
}

/// The unique interval equal to the conjunction of `atoms`.
pub fn normalize_guard(atoms: &[(CmpOp, u64)]) -> Guard {
    atoms.iter().fold(Guard::TRUE, |acc, &(op, c)| {
        let atom = match op {
            CmpOp::Eq => Guard::point(c),
            CmpOp::Ge => Guard::at_least(c),
            CmpOp::Gt => Guard::greater_than(c),
            CmpOp::Le => Guard::interval(0, true, Some((c, true))),
            CmpOp::Lt => Guard::interval(0, true, Some((c, false))),
        };
        acc.intersect(&atom)
    })
}

/// One cell of the partition `{0}, (0,1), {1}, ..., {K}, (K, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Point(u64),
    /// The open unit interval `(c, c + 1)`.
    OpenUnit(u64),
    /// `(K, inf)` for the carried `K`.
    AboveK(u64),
}

impl Region {
    /// Index along the real line: `{0}` is 0, `(0,1)` is 1, and so on.
    pub fn position(&self) -> u64 {
        match *self {
            Region::Point(c) => 2 * c,
            Region::OpenUnit(c) => 2 * c + 1,
            Region::AboveK(k) => 2 * k + 1,
        }
    }

    fn interval(&self) -> Interval {
        match *self {
            Region::Point(c) => Interval {
                lower: c,
                lower_closed: true,
                upper: Some((c, true)),
            },
            Region::OpenUnit(c) => Interval {
                lower: c,
                lower_closed: false,
                upper: Some((c + 1, false)),
            },
            Region::AboveK(k) => Interval {
                lower: k,
                lower_closed: false,
                upper: None,
            },
        }
    }

    pub fn guard(&self) -> Guard {
        Guard::Interval(self.interval())
    }

    pub fn contains(&self, v: Rational) -> bool {
        self.interval().contains(v)
    }

    /// Some value inside the region, with fractional part 0 or 1/2.
    pub fn representative(&self) -> Rational {
        let half = Rational::new(1, 2).expect("nonzero denominator");
        match *self {
            Region::Point(c) => Rational::from_integer(c),
            Region::OpenUnit(c) => Rational::from_integer(c)
                .checked_add(half)
                .expect("small constant"),
            Region::AboveK(k) => Rational::from_integer(k + 1),
        }
    }
}

impl Ord for Region {
    fn cmp(&self, other: &Self) -> Ordering {
        self.position().cmp(&other.position())
    }
}

impl PartialOrd for Region {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Point(c) => write!(f, "{{{c}}}"),
            Region::OpenUnit(c) => write!(f, "({c},{})", c + 1),
            Region::AboveK(k) => write!(f, "({k},inf)"),
        }
    }
}

/// `[{0}, (0,1), {1}, ..., {K}, (K,inf)]`, length `2K + 2`.
pub fn atomic_regions(k: u64) -> Vec<Region> {
    let mut out = Vec::with_capacity(2 * k as usize + 2);
    for c in 0..k {
        out.push(Region::Point(c));
        out.push(Region::OpenUnit(c));
    }
    out.push(Region::Point(k));
    out.push(Region::AboveK(k));
    out
}

pub fn region_of(v: Rational, k: u64) -> Region {
    if v.cmp_integer(k) == Ordering::Greater {
        Region::AboveK(k)
    } else if v.is_integer() {
        Region::Point(v.floor())
    } else {
        Region::OpenUnit(v.floor())
    }
}

/// Integer difference `x - n` between an original clock and the
/// deterministic clock, saturated above `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OffsetClass {
    Exact(u64),
    /// Any offset `>= K + 1`.
    AboveK,
}

impl OffsetClass {
    pub fn saturate(d: u64, k: u64) -> OffsetClass {
        if d > k {
            OffsetClass::AboveK
        } else {
            OffsetClass::Exact(d)
        }
    }

    /// Adds an integer amount, saturating.
    pub fn plus(self, c: u64, k: u64) -> OffsetClass {
        match self {
            OffsetClass::Exact(d) => OffsetClass::saturate(d + c, k),
            OffsetClass::AboveK => OffsetClass::AboveK,
        }
    }

    /// Does the concrete integer offset `d` belong to this class?
    pub fn matches(&self, d: u64, k: u64) -> bool {
        *self == OffsetClass::saturate(d, k)
    }

    /// Renders `AboveK` as `K+` (the `1+` of a `K = 1` automaton).
    pub fn display(&self, k: u64) -> String {
        match self {
            OffsetClass::Exact(d) => d.to_string(),
            OffsetClass::AboveK => format!("{k}+"),
        }
    }
}

/// Regions `r` of `n` such that `x = n + d` satisfies `g` for every `n` in `r`
/// (and, for `AboveK`, for every concrete offset above `K`).
pub fn shift_guard_to_n(g: &Guard, d: OffsetClass, k: u64) -> Vec<Region> {
    let Guard::Interval(gi) = g else {
        return Vec::new();
    };
    atomic_regions(k)
        .into_iter()
        .filter(|r| {
            let ri = r.interval();
            let xs = match d {
                OffsetClass::Exact(d0) => ri.shifted(d0),
                // union over all d0 >= K+1 of r + d0 is unbounded above
                OffsetClass::AboveK => Interval {
                    upper: None,
                    ..ri.shifted(k + 1)
                },
            };
            gi.includes(&xs)
        })
        .collect()
}

/// Merges maximal runs of line-adjacent regions carrying equal payloads
/// into single interval guards. Rows must be in line order.
pub fn merge_adjacent<P: PartialEq + Clone>(rows: &[(Region, P)]) -> Vec<(Guard, P)> {
    let mut out: Vec<(Guard, P)> = Vec::new();
    let mut run: Option<(Region, Region, &P)> = None;
    let flush = |run: Option<(Region, Region, &P)>, out: &mut Vec<(Guard, P)>| {
        if let Some((first, last, p)) = run {
            let lo = first.interval();
            let hi = last.interval();
            out.push((
                Guard::interval(lo.lower, lo.lower_closed, hi.upper),
                p.clone(),
            ));
        }
    };
    for (r, p) in rows {
        match run {
            Some((first, last, q)) if q == p && r.position() == last.position() + 1 => {
                run = Some((first, *r, q));
            }
            _ => {
                flush(run.take(), &mut out);
                run = Some((*r, *r, p));
            }
        }
    }
    flush(run, &mut out);
    out
}
