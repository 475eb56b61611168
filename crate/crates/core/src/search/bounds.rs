//! Model-size and derivation-length bounds, in checked `u128` arithmetic.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::{count_individuals, length, Concept};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("bound does not fit in 128 bits")]
pub struct Overflow;

/// `3 · n·⌊log₂(n+1)⌋ · 2ⁿ`.
pub fn mu(n: u64) -> Result<u128, Overflow> {
    if n >= 128 {
        return Err(Overflow);
    }
    let n = n as u128;
    let log = (n + 1).ilog2() as u128;
    3u128
        .checked_mul(n)
        .and_then(|v| v.checked_mul(log))
        .and_then(|v| v.checked_mul(1u128 << n))
        .ok_or(Overflow)
}

/// `(n·(k+M·μ(n)) + 2n·(k+M·μ(n))²)²`.
pub fn step_bound(n: u64, k: u64, m: u64) -> Result<u128, Overflow> {
    let n128 = n as u128;
    let i = if m == 0 {
        k as u128
    } else {
        (m as u128)
            .checked_mul(mu(n)?)
            .and_then(|v| v.checked_add(k as u128))
            .ok_or(Overflow)?
    };
    let inner = n128
        .checked_mul(i)
        .and_then(|a| {
            let sq = i.checked_mul(i)?;
            a.checked_add(sq.checked_mul(2)?.checked_mul(n128)?)
        })
        .ok_or(Overflow)?;
    inner.checked_mul(inner).ok_or(Overflow)
}

/// The quantities the bounds are computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundParams {
    /// Length of the concept.
    pub n: u64,
    /// Individuals, counting the root label.
    pub k: u64,
    /// Distinct subconcepts of the form `∃R.D`.
    pub existentials: u64,
}

impl BoundParams {
    pub fn of(c: &Concept) -> BoundParams {
        let mut seen = BTreeSet::new();
        collect_existentials(c, &mut seen);
        BoundParams {
            n: length(c) as u64,
            k: count_individuals(c) as u64,
            existentials: seen.len() as u64,
        }
    }

    pub fn mu(&self) -> Result<u128, Overflow> {
        mu(self.n)
    }

    /// Per-branch step bound with eager blocking from the root, where the
    /// number of individuals created before blocking starts is zero.
    pub fn step_bound(&self) -> Result<u128, Overflow> {
        step_bound(self.n, self.k, self.existentials)
    }
}

fn collect_existentials<'a>(c: &'a Concept, seen: &mut BTreeSet<&'a Concept>) {
    if matches!(c, Concept::Exists(..)) {
        seen.insert(c);
    }
    for child in c.children() {
        collect_existentials(child, seen);
    }
}
