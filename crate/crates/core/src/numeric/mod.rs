//! Scalar arithmetic shared by all backends: exact rationals and
//! double-precision approximations with a tracked precision claim.

mod approx;
mod rational;
mod scalar;

use std::cmp::Ordering;
use std::fmt;

pub use approx::{Approx, Elementary, DEFAULT_PRECISION};
pub use rational::{Rational, POW_BIT_LIMIT};
pub use scalar::Scalar;

/// Order of an infinitesimal: a rational, or `+∞` for quantities that
/// vanish faster than every power of the base.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtOrder {
    Finite(Rational),
    PositiveInfinity,
}

impl ExtOrder {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtOrder::Finite(r) => Some(r),
            ExtOrder::PositiveInfinity => None,
        }
    }
}

impl PartialOrd for ExtOrder {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtOrder {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtOrder::Finite(a), ExtOrder::Finite(b)) => a.cmp(b),
            (ExtOrder::Finite(_), ExtOrder::PositiveInfinity) => Ordering::Less,
            (ExtOrder::PositiveInfinity, ExtOrder::Finite(_)) => Ordering::Greater,
            (ExtOrder::PositiveInfinity, ExtOrder::PositiveInfinity) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtOrder::Finite(r) => write!(f, "{r}"),
            ExtOrder::PositiveInfinity => f.write_str("infinity"),
        }
    }
}
