//! Expansion strategies and verdicts.
//!
//! Every strategy continues the left child of a branching step in place and
//! defers the right child, so (ub) merges are tried before distinctness.
//! Within a branch the engine agenda decides the order of rule instances.

mod bounds;

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::engine::{Branch, Engine, EngineConfig, EngineError, Individual, Rule};
use crate::normalize::{conjoin_problem, normalize, NormalizeError};
use crate::semantics::{eval_concept, extract_model, Model};
use crate::syntax::{Concept, Problem};
use crate::trace::TraceEvent;

pub use bounds::{mu, step_bound, BoundParams, Overflow};

/// Steps a branch gets before breadth-first search moves to the next one.
pub const BFS_QUANTUM: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    BreadthFirst,
    /// Depth-first with a per-branch step bound that grows after each
    /// unsuccessful pass.
    IterativeDeepening {
        initial: u64,
        increment: u64,
    },
    /// Depth-first, abandoning branches longer than the derivation bound.
    AvoidHugeBranch,
}

impl Default for Strategy {
    fn default() -> Self {
        Strategy::IterativeDeepening {
            initial: 64,
            increment: 64,
        }
    }
}

impl Strategy {
    pub const NAMES: [&'static str; 3] = ["bfs", "dfs-id", "dfs-ahb"];

    pub fn all() -> [Strategy; 3] {
        [
            Strategy::BreadthFirst,
            Strategy::default(),
            Strategy::AvoidHugeBranch,
        ]
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::BreadthFirst => "bfs",
            Strategy::IterativeDeepening { .. } => "dfs-id",
            Strategy::AvoidHugeBranch => "dfs-ahb",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown strategy `{0}` (expected bfs, dfs-id or dfs-ahb)")]
pub struct UnknownStrategy(pub String);

impl FromStr for Strategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bfs" => Ok(Strategy::BreadthFirst),
            "dfs-id" => Ok(Strategy::default()),
            "dfs-ahb" => Ok(Strategy::AvoidHugeBranch),
            _ => Err(UnknownStrategy(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Limits {
    pub max_branch_steps: Option<u64>,
    pub max_total_steps: Option<u64>,
    pub timeout: Option<Duration>,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub limits: Limits,
    pub engine: EngineConfig,
    /// Explore the merge child of (ub) first; otherwise the distinct child.
    pub merge_first: bool,
    /// Keep searching after the first open branch (the verdict still
    /// reports the first one).
    pub exhaustive: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::default(),
            limits: Limits::default(),
            engine: EngineConfig::default(),
            merge_first: true,
            exhaustive: false,
        }
    }
}

impl SearchConfig {
    pub fn with_strategy(strategy: Strategy) -> SearchConfig {
        SearchConfig {
            strategy,
            ..SearchConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitReason {
    TotalSteps,
    Timeout,
    /// Some branch hit the user's per-branch step limit.
    BranchSteps,
    /// Some branch hit the derivation bound.
    BranchBound,
}

impl fmt::Display for LimitReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitReason::TotalSteps => "max-steps",
            LimitReason::Timeout => "timeout",
            LimitReason::BranchSteps => "max-branch-steps",
            LimitReason::BranchBound => "branch-bound",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    /// Rule applications over all branches and passes.
    pub steps: u64,
    /// Tree nodes created.
    pub nodes: usize,
    pub closed: usize,
    pub open: usize,
    pub cut: usize,
    pub restarts: usize,
    /// Largest step count reached by any branch.
    pub max_branch_steps: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct Satisfiable {
    pub model: Model,
    /// Tree node of the open branch.
    pub node: usize,
    pub branch_steps: u64,
    pub stats: Stats,
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Satisfiable(Box<Satisfiable>),
    Unsatisfiable(Stats),
    ResourceLimit { reason: LimitReason, stats: Stats },
}

impl Verdict {
    pub fn stats(&self) -> &Stats {
        match self {
            Verdict::Satisfiable(s) => &s.stats,
            Verdict::Unsatisfiable(stats) | Verdict::ResourceLimit { stats, .. } => stats,
        }
    }

    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Satisfiable(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, Verdict::Unsatisfiable(_))
    }

    pub fn model(&self) -> Option<&Model> {
        match self {
            Verdict::Satisfiable(s) => Some(&s.model),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Satisfiable(_) => f.write_str("SAT"),
            Verdict::Unsatisfiable(_) => f.write_str("UNSAT"),
            Verdict::ResourceLimit { reason, .. } => write!(f, "LIMIT {reason}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafKind {
    Closed,
    Open,
    Cut,
}

/// Hooks into a running search. All methods default to doing nothing.
pub trait Observer {
    /// Whether [`Observer::event`] should receive trace events.
    fn tracing(&self) -> bool {
        false
    }

    fn event(&mut self, _event: TraceEvent) {}

    /// Called once for every branch that closes, is fully expanded or is
    /// abandoned.
    fn leaf(&mut self, _engine: &Engine, _branch: &Branch, _kind: LeafKind) {}
}

struct Silent;

impl Observer for Silent {}

/// Collects trace events.
#[derive(Debug, Default)]
pub struct Recorder {
    pub events: Vec<TraceEvent>,
}

impl Observer for Recorder {
    fn tracing(&self) -> bool {
        true
    }

    fn event(&mut self, event: TraceEvent) {
        self.events.push(event);
    }
}

/// Decides satisfiability of a core-syntax concept.
pub fn decide(c: &Concept, config: &SearchConfig) -> Result<Verdict, SearchError> {
    decide_observed(c, config, &mut Silent)
}

pub fn decide_observed(
    c: &Concept,
    config: &SearchConfig,
    observer: &mut dyn Observer,
) -> Result<Verdict, SearchError> {
    run(c, &[], config, observer)
}

/// Normalizes and decides a problem. A satisfiable verdict's model is also
/// checked against the problem before normalization.
pub fn solve(p: &Problem, config: &SearchConfig) -> Result<Verdict, SearchError> {
    solve_observed(p, config, &mut Silent)
}

pub fn solve_observed(
    p: &Problem,
    config: &SearchConfig,
    observer: &mut dyn Observer,
) -> Result<Verdict, SearchError> {
    let original = conjoin_problem(p)?;
    let normalized = normalize(p)?;
    run(&normalized.concept, &[original], config, observer)
}

fn run(
    c: &Concept,
    extra_checks: &[Concept],
    config: &SearchConfig,
    observer: &mut dyn Observer,
) -> Result<Verdict, SearchError> {
    if let Strategy::IterativeDeepening { initial, increment } = config.strategy {
        if initial == 0 || increment == 0 {
            return Err(SearchError::Config(
                "iterative deepening needs a positive initial bound and increment".into(),
            ));
        }
    }
    let mut engine = Engine::new(config.engine);
    let mut root = engine.init(c)?;
    let mut checks = vec![c.clone()];
    checks.extend_from_slice(extra_checks);
    let mut search = Search {
        engine,
        config,
        observer,
        checks,
        stats: Stats::default(),
        start: Instant::now(),
        found: None,
    };
    root.set_node(search.new_node());
    let outcome = match config.strategy {
        Strategy::BreadthFirst => search.breadth_first(root),
        Strategy::IterativeDeepening { initial, increment } => {
            search.iterative_deepening(root, initial, increment)
        }
        Strategy::AvoidHugeBranch => {
            let bound = BoundParams::of(c)
                .step_bound()
                .ok()
                .and_then(|b| u64::try_from(b).ok());
            search.avoid_huge_branch(root, bound)
        }
    };
    search.stats.elapsed = search.start.elapsed();
    let stats = search.stats.clone();
    match outcome {
        Ok(End::Unsat) => Ok(Verdict::Unsatisfiable(stats)),
        Ok(End::Cut(reason)) | Err(Halt::Limit(reason)) => match search.found.take() {
            Some(sat) => Ok(search.sat(sat)),
            None => Ok(Verdict::ResourceLimit { reason, stats }),
        },
        Ok(End::Found) => {
            let sat = search.found.take().expect("found");
            Ok(search.sat(sat))
        }
        Err(Halt::Error(e)) => Err(e),
    }
}

enum End {
    Found,
    Unsat,
    Cut(LimitReason),
}

enum Halt {
    Limit(LimitReason),
    Error(SearchError),
}

impl From<SearchError> for Halt {
    fn from(e: SearchError) -> Self {
        Halt::Error(e)
    }
}

impl From<EngineError> for Halt {
    fn from(e: EngineError) -> Self {
        Halt::Error(e.into())
    }
}

enum Advance {
    Continue(Option<Branch>),
    Done(LeafKind, Option<Branch>),
}

struct Search<'a> {
    engine: Engine,
    config: &'a SearchConfig,
    observer: &'a mut dyn Observer,
    /// Concepts the extracted model must satisfy at the root's element.
    checks: Vec<Concept>,
    stats: Stats,
    start: Instant,
    found: Option<Satisfiable>,
}

impl Search<'_> {
    fn new_node(&mut self) -> usize {
        self.stats.nodes += 1;
        self.stats.nodes - 1
    }

    fn sat(&self, mut sat: Satisfiable) -> Verdict {
        sat.stats = self.stats.clone();
        Verdict::Satisfiable(Box::new(sat))
    }

    fn tracing(&self) -> bool {
        self.observer.tracing()
    }

    fn emit_root(&mut self, b: &Branch) {
        if self.tracing() {
            let facts = b
                .facts()
                .iter()
                .map(|&f| self.engine.fact_text(f))
                .collect();
            self.observer.event(TraceEvent::Root {
                node: b.node(),
                facts,
            });
        }
    }

    fn breadth_first(&mut self, root: Branch) -> Result<End, Halt> {
        self.emit_root(&root);
        let cap = self.config.limits.max_branch_steps;
        let mut queue = VecDeque::from([root]);
        let mut cut = false;
        while let Some(mut b) = queue.pop_front() {
            let mut alive = true;
            for _ in 0..BFS_QUANTUM {
                match self.step(&mut b, cap)? {
                    Advance::Continue(fork) => queue.extend(fork),
                    Advance::Done(kind, fork) => {
                        queue.extend(fork);
                        alive = false;
                        match kind {
                            LeafKind::Open if self.open(&b)? => return Ok(End::Found),
                            LeafKind::Cut => cut = true,
                            _ => {}
                        }
                        break;
                    }
                }
            }
            if alive {
                queue.push_back(b);
            }
        }
        Ok(self.finish(cut, LimitReason::BranchSteps))
    }

    fn iterative_deepening(
        &mut self,
        root: Branch,
        initial: u64,
        increment: u64,
    ) -> Result<End, Halt> {
        let user = self.config.limits.max_branch_steps;
        let mut bound = initial;
        loop {
            let cap = user.map_or(bound, |u| u.min(bound));
            let mut pass = root.clone();
            if self.stats.restarts > 0 {
                pass.set_node(self.new_node());
                self.observer.event(TraceEvent::Restart { bound });
            }
            self.emit_root(&pass);
            let cut = self.depth_first(pass, Some(cap))?;
            if self.found.is_some() {
                return Ok(End::Found);
            }
            if !cut {
                return Ok(End::Unsat);
            }
            if user.is_some_and(|u| cap >= u) {
                return Ok(End::Cut(LimitReason::BranchSteps));
            }
            bound = bound.saturating_add(increment);
            self.stats.restarts += 1;
        }
    }

    fn avoid_huge_branch(&mut self, root: Branch, bound: Option<u64>) -> Result<End, Halt> {
        let user = self.config.limits.max_branch_steps;
        let (cap, reason) = match (user, bound) {
            (Some(u), Some(b)) if u < b => (Some(u), LimitReason::BranchSteps),
            (_, Some(b)) => (Some(b), LimitReason::BranchBound),
            (u, None) => (u, LimitReason::BranchSteps),
        };
        self.emit_root(&root);
        let cut = self.depth_first(root, cap)?;
        if self.found.is_some() {
            return Ok(End::Found);
        }
        Ok(self.finish(cut, reason))
    }

    fn finish(&self, cut: bool, reason: LimitReason) -> End {
        if self.found.is_some() {
            End::Found
        } else if cut {
            End::Cut(reason)
        } else {
            End::Unsat
        }
    }

    /// Left-to-right depth-first pass; returns whether any branch was cut.
    fn depth_first(&mut self, root: Branch, cap: Option<u64>) -> Result<bool, Halt> {
        let mut stack = vec![root];
        let mut cut = false;
        while let Some(mut b) = stack.pop() {
            loop {
                match self.step(&mut b, cap)? {
                    Advance::Continue(fork) => stack.extend(fork),
                    Advance::Done(kind, fork) => {
                        stack.extend(fork);
                        match kind {
                            LeafKind::Open if self.open(&b)? => return Ok(cut),
                            LeafKind::Cut => cut = true,
                            _ => {}
                        }
                        break;
                    }
                }
            }
        }
        Ok(cut)
    }

    fn leaf(&mut self, b: &Branch, kind: LeafKind) {
        match kind {
            LeafKind::Closed => {
                self.stats.closed += 1;
                if self.tracing() {
                    let (x, y) = b.clash().expect("closed branch has a clash");
                    let clash = [self.engine.fact_text(x), self.engine.fact_text(y)];
                    self.observer.event(TraceEvent::Closed {
                        node: b.node(),
                        clash,
                    });
                }
            }
            LeafKind::Cut => {
                self.stats.cut += 1;
                self.observer.event(TraceEvent::Cut {
                    node: b.node(),
                    steps: b.step_count(),
                });
            }
            LeafKind::Open => {
                self.stats.open += 1;
                self.observer.event(TraceEvent::Open { node: b.node() });
            }
        }
        self.observer.leaf(&self.engine, b, kind);
    }

    /// One rule application on `b`, or the reason `b` is finished.
    fn step(&mut self, b: &mut Branch, cap: Option<u64>) -> Result<Advance, Halt> {
        if b.is_closed() {
            self.leaf(b, LeafKind::Closed);
            return Ok(Advance::Done(LeafKind::Closed, None));
        }
        let limits = &self.config.limits;
        if limits
            .max_total_steps
            .is_some_and(|m| self.stats.steps >= m)
        {
            return Err(Halt::Limit(LimitReason::TotalSteps));
        }
        if limits.timeout.is_some_and(|t| self.start.elapsed() >= t) {
            return Err(Halt::Limit(LimitReason::Timeout));
        }
        let Some(inst) = self.engine.schedule(b) else {
            let pending = self.engine.applicable(b);
            if let Some(first) = pending.first() {
                return Err(SearchError::Internal(format!(
                    "agenda is empty but {} instances are applicable, first {}",
                    pending.len(),
                    first.rule
                ))
                .into());
            }
            return Ok(Advance::Done(LeafKind::Open, None));
        };
        // An application may close the branch, which costs a second step.
        if cap.is_some_and(|c| b.step_count() + 2 > c) {
            self.leaf(b, LeafKind::Cut);
            return Ok(Advance::Done(LeafKind::Cut, None));
        }
        let premises: Vec<String> = if self.tracing() {
            inst.premises().map(|f| self.engine.fact_text(f)).collect()
        } else {
            Vec::new()
        };
        let exp = self.engine.apply_in_place(b, &inst)?;
        self.stats.steps += 1;
        let node = b.node();
        let mut fork = exp.right;
        let children = match fork.as_mut() {
            Some(right) => {
                let (l, r) = (self.new_node(), self.new_node());
                b.set_node(l);
                right.set_node(r);
                vec![l, r]
            }
            None => vec![node],
        };
        if self.tracing() {
            let conclusions = exp
                .conclusions
                .iter()
                .map(|set| set.iter().map(|&f| self.engine.fact_text(f)).collect())
                .collect();
            self.observer.event(TraceEvent::Step {
                node,
                rule: inst.rule,
                premises,
                conclusions,
                children,
            });
        }
        if inst.rule == Rule::UB && !self.config.merge_first {
            if let Some(right) = fork.as_mut() {
                std::mem::swap(b, right);
            }
        }
        self.stats.max_branch_steps = self.stats.max_branch_steps.max(b.step_count());
        if let Some(right) = &fork {
            self.stats.max_branch_steps = self.stats.max_branch_steps.max(right.step_count());
            if right.is_closed() {
                self.leaf(right, LeafKind::Closed);
                fork = None;
            }
        }
        if b.is_closed() {
            self.leaf(b, LeafKind::Closed);
            return Ok(Advance::Done(LeafKind::Closed, fork));
        }
        Ok(Advance::Continue(fork))
    }

    /// Handles a fully expanded open branch; returns whether to stop.
    fn open(&mut self, b: &Branch) -> Result<bool, Halt> {
        let x = extract_model(&self.engine, b)
            .map_err(|e| SearchError::Internal(format!("model extraction failed: {e}")))?;
        let root = x.element(Individual::ROOT);
        for c in &self.checks {
            let ext = eval_concept(&x.model, c)
                .map_err(|e| SearchError::Internal(format!("model check failed: {e}")))?;
            if !ext.contains(&root) {
                return Err(SearchError::Internal(format!(
                    "extracted model does not satisfy {c} at the root"
                ))
                .into());
            }
        }
        self.leaf(b, LeafKind::Open);
        if self.found.is_none() {
            self.found = Some(Satisfiable {
                model: x.model,
                node: b.node(),
                branch_steps: b.step_count(),
                stats: Stats::default(),
            });
        }
        Ok(!self.config.exhaustive)
    }
}
