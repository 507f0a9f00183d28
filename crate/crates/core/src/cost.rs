//! Arc lengths extended with an absorbing infinity.

use std::fmt;

use crate::error::{Error, Result};

/// Largest magnitude accepted for a finite input cost.
pub const MAX_INPUT_COST: i64 = 1 << 40;

/// An integer arc length or `Infinite`.
///
/// Variant order makes the derived `Ord` treat `Infinite` as the maximum and
/// two infinities as equal, so `Infinite > Infinite` is false.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CostValue {
    Finite(i64),
    Infinite,
}

impl CostValue {
    pub const ZERO: CostValue = CostValue::Finite(0);

    pub fn is_infinite(self) -> bool {
        matches!(self, CostValue::Infinite)
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            CostValue::Finite(v) => Some(v),
            CostValue::Infinite => None,
        }
    }

    /// `∞ + b = ∞`, `∞ + ∞ = ∞`.
    pub fn checked_add(self, rhs: CostValue) -> Result<CostValue> {
        match (self, rhs) {
            (CostValue::Finite(a), CostValue::Finite(b)) => a
                .checked_add(b)
                .map(CostValue::Finite)
                .ok_or(Error::Overflow),
            _ => Ok(CostValue::Infinite),
        }
    }

    /// `∞ − b = ∞` for every finite `b`. An all-infinite line subtracts its
    /// infinite minimum from infinite cells, so `∞ − ∞` is kept as `∞`.
    /// Subtracting `∞` from a finite value has no meaning here and is an error.
    pub fn checked_sub(self, rhs: CostValue) -> Result<CostValue> {
        match (self, rhs) {
            (CostValue::Finite(a), CostValue::Finite(b)) => a
                .checked_sub(b)
                .map(CostValue::Finite)
                .ok_or(Error::Overflow),
            (CostValue::Infinite, _) => Ok(CostValue::Infinite),
            (CostValue::Finite(_), CostValue::Infinite) => {
                Err(Error::Undefined("finite value minus infinity"))
            }
        }
    }
}

impl From<i64> for CostValue {
    fn from(v: i64) -> Self {
        CostValue::Finite(v)
    }
}

impl fmt::Display for CostValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostValue::Finite(v) => write!(f, "{v}"),
            CostValue::Infinite => f.write_str("inf"),
        }
    }
}
