//! Exact nonnegative rationals used for timestamps and clock values.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// A nonnegative rational number `num / den` kept in lowest terms.
///
/// Arithmetic is checked: any result that does not fit in 64 bits is an
/// [`Error::Overflow`], and a subtraction that would go negative is an
/// [`Error::NegativeTime`].
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: u64,
    den: u64,
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Rational, Error> {
        if den == 0 {
            return Err(Error::ZeroDenominator);
        }
        Self::from_wide(num as u128, den as u128)
    }

    pub fn from_integer(n: u64) -> Rational {
        Rational { num: n, den: 1 }
    }

    fn from_wide(num: u128, den: u128) -> Result<Rational, Error> {
        debug_assert!(den != 0);
        let g = gcd(num, den).max(1);
        let (num, den) = (num / g, den / g);
        let num = u64::try_from(num).map_err(|_| Error::Overflow)?;
        let den = u64::try_from(den).map_err(|_| Error::Overflow)?;
        Ok(Rational { num, den })
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn floor(&self) -> u64 {
        self.num / self.den
    }

    /// Fractional part, in `[0, 1)`.
    pub fn fract(&self) -> Rational {
        Rational {
            num: self.num % self.den,
            den: self.den,
        }
    }

    pub fn checked_add(self, other: Rational) -> Result<Rational, Error> {
        let num = self.num as u128 * other.den as u128 + other.num as u128 * self.den as u128;
        let den = self.den as u128 * other.den as u128;
        Self::from_wide(num, den)
    }

    pub fn checked_sub(self, other: Rational) -> Result<Rational, Error> {
        let lhs = self.num as u128 * other.den as u128;
        let rhs = other.num as u128 * self.den as u128;
        if lhs < rhs {
            return Err(Error::NegativeTime);
        }
        Self::from_wide(lhs - rhs, self.den as u128 * other.den as u128)
    }

    pub fn checked_add_integer(self, n: u64) -> Result<Rational, Error> {
        self.checked_add(Rational::from_integer(n))
    }

    /// Compares against an integer without building a second rational.
    pub fn cmp_integer(&self, n: u64) -> Ordering {
        (self.num as u128).cmp(&(n as u128 * self.den as u128))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `INT` or `INT/INT`. Decimal notation is rejected.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::InvalidRational(s.to_string());
        let digits = |t: &str| -> Result<u64, Error> {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            t.parse::<u64>().map_err(|_| Error::Overflow)
        };
        match s.split_once('/') {
            None => Ok(Rational::from_integer(digits(s)?)),
            Some((n, d)) => Rational::new(digits(n)?, digits(d)?),
        }
    }
}
