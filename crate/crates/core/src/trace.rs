//! Derivation events emitted by the search driver.
//!
//! Facts are carried as printed text (`a0:some Q . A`) so consumers need no
//! access to the concept store. Every branch lives in a tree node; a
//! branching step ends its node and opens one node per child.

use crate::engine::Rule;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    /// Start of a derivation (again after each deepening restart).
    Root {
        node: usize,
        facts: Vec<String>,
    },
    Step {
        node: usize,
        rule: Rule,
        premises: Vec<String>,
        /// One conclusion set per child.
        conclusions: Vec<Vec<String>>,
        /// Node of each child; equal to `node` for non-branching rules.
        children: Vec<usize>,
    },
    Closed {
        node: usize,
        clash: [String; 2],
    },
    /// Fully expanded open branch.
    Open {
        node: usize,
    },
    /// Branch abandoned at a step limit.
    Cut {
        node: usize,
        steps: u64,
    },
    Restart {
        bound: u64,
    },
}

impl TraceEvent {
    pub fn node(&self) -> Option<usize> {
        match self {
            TraceEvent::Root { node, .. }
            | TraceEvent::Step { node, .. }
            | TraceEvent::Closed { node, .. }
            | TraceEvent::Open { node }
            | TraceEvent::Cut { node, .. } => Some(*node),
            TraceEvent::Restart { .. } => None,
        }
    }
}
