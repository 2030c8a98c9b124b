//! Implicate search.
//!
//! The search enumerates hypothesis sets `M ⊆ A` depth first, adding one
//! abducible per level, and reports `¬M` whenever `S ∪ M` is unsatisfiable.
//! Two strategies share the driver: [`Algorithm::Bp`] branches on every
//! remaining candidate, while [`Algorithm::Imp`] orders hypotheses, skips
//! literals a model of `S ∪ M` already makes redundant, and applies a
//! subset-closed [`ResultPredicate`].
//!
//! Recursion is an explicit stack. Each level owns one frame on the main
//! session holding its hypothesis, so the session's scope always equals `M`.
//! A second, bare session (theory only) answers the `M`-satisfiability test,
//! predicate checks and minimization.

mod predicate;
mod steps;
mod submin;

use std::time::Duration;

use crate::abducibles::AbducibleSet;
use crate::clock::Instant;
use crate::logic::{Clause, Lit};
use crate::oracle::{check_with, Oracle, OracleError, SatStatus};

pub use predicate::{predicate_holds, ResultPredicate};
pub use steps::{
    candidates_after, compatible_from_model, fix, unit_consequences, uprop, CompatibleSet,
    CompatibleSource, FixMode,
};
pub use submin::{submin, Minimized};

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum Algorithm {
    Bp,
    #[default]
    Imp,
}

/// Choice of the unit set `U` with `M ⊆ U` and every member entailed by `S ∪ M`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum UnitMode {
    /// `U = M`.
    #[default]
    Hypotheses,
    /// `M` closed under unit propagation over a clausal view of `S`.
    Propagate(Vec<Clause>),
}

/// Where minimization happens.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum Minimization {
    /// Every implicate goes to the sink as soon as it is found.
    #[default]
    Streaming,
    /// Each level returns the minimized union of its children.
    Eager,
}

#[derive(Clone, Debug, Default)]
pub struct EngineConfig {
    pub algorithm: Algorithm,
    pub predicate: ResultPredicate,
    /// Use models of `S ∪ M` to skip branches (imp only).
    pub model_pruning: bool,
    pub fix: FixMode,
    pub units: UnitMode,
    pub minimization: Minimization,
    pub time_limit: Option<Duration>,
    /// Stop once this many implicates were accepted.
    pub max_implicates: Option<usize>,
    pub record_trace: bool,
}

impl EngineConfig {
    pub fn imp() -> Self {
        EngineConfig { model_pruning: true, ..Default::default() }
    }

    pub fn bp() -> Self {
        EngineConfig { algorithm: Algorithm::Bp, ..Default::default() }
    }

    pub fn eager(mut self) -> Self {
        self.minimization = Minimization::Eager;
        self
    }
}

/// Receives implicates from a streaming search.
pub trait ImplicateSink {
    /// Offers an implicate and reports whether it was kept. `bare` is the
    /// theory-only session.
    fn accept(&mut self, clause: &Clause, bare: &mut dyn Oracle) -> Result<bool, OracleError>;
}

impl ImplicateSink for Vec<Clause> {
    fn accept(&mut self, clause: &Clause, _bare: &mut dyn Oracle) -> Result<bool, OracleError> {
        self.push(clause.clone());
        Ok(true)
    }
}

/// Why a search may have missed implicates.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum Completion {
    #[default]
    Complete,
    /// Time or count budget exhausted.
    Budget,
    /// The oracle could not decide some `S ∪ M`.
    Unknown,
}

impl Completion {
    pub fn as_str(self) -> &'static str {
        match self {
            Completion::Complete => "no",
            Completion::Budget => "budget",
            Completion::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    /// `M` is unsatisfiable on its own.
    HypothesesUnsat(Vec<Lit>),
    PredicateFails(Vec<Lit>),
    /// `S ∪ M` is unsatisfiable.
    Implicate(Vec<Lit>),
    /// Children are about to be explored.
    Expand(Vec<Lit>),
}

#[derive(Clone, Debug, Default)]
pub struct SearchStats {
    pub nodes: u64,
    pub max_depth: usize,
    /// Checks issued on the main and bare sessions during the search.
    pub oracle_calls: u64,
    /// Implicates found, before any minimization.
    pub found: u64,
    /// Implicates the sink kept (streaming) or the final count (eager).
    pub accepted: u64,
    pub unknown_answers: u64,
    pub time_to_first: Option<Duration>,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Default)]
pub struct SearchOutcome {
    /// The minimized result in eager mode; empty when streaming.
    pub implicates: Vec<Clause>,
    pub completion: Completion,
    pub stats: SearchStats,
    pub trace: Vec<TraceEvent>,
}

struct Level {
    branches: Vec<(Lit, Vec<Lit>)>,
    next: usize,
    results: Vec<Clause>,
}

enum Node {
    Leaf(Vec<Clause>),
    Inner(Level),
}

struct Search<'a> {
    main: &'a mut dyn Oracle,
    bare: &'a mut dyn Oracle,
    abducibles: &'a AbducibleSet,
    config: &'a EngineConfig,
    sink: Option<&'a mut dyn ImplicateSink>,
    start: Instant,
    outcome: SearchOutcome,
}

/// Enumerates the implicates of the main session's formulas whose negations
/// are drawn from `abducibles`. `main` must be at scope depth 0 and is
/// returned to it; `bare` must hold the theory alone.
///
/// In streaming mode every implicate found goes to `sink` (if any) and the
/// outcome carries no clauses; in eager mode the outcome holds the minimized
/// set.
pub fn search<'a>(
    main: &'a mut dyn Oracle,
    bare: &'a mut dyn Oracle,
    abducibles: &'a AbducibleSet,
    config: &'a EngineConfig,
    sink: Option<&'a mut dyn ImplicateSink>,
) -> Result<SearchOutcome, OracleError> {
    if config.algorithm == Algorithm::Imp && config.model_pruning {
        main.set_model_atoms(&abducibles.atoms())?;
    }
    let before = main.stats() + bare.stats();
    let mut s = Search {
        main,
        bare,
        abducibles,
        config,
        sink,
        start: Instant::now(),
        outcome: SearchOutcome::default(),
    };
    let result = s.run();
    let after = s.main.stats() + s.bare.stats();
    let mut outcome = s.outcome;
    outcome.stats.oracle_calls = after.checks - before.checks;
    outcome.stats.elapsed = s.start.elapsed();
    result.map(|implicates| {
        if config.minimization == Minimization::Eager {
            outcome.stats.accepted = implicates.len() as u64;
        }
        outcome.implicates = implicates;
        outcome
    })
}

/// Eager `bp` from the empty hypothesis set.
pub fn bp(
    main: &mut dyn Oracle,
    bare: &mut dyn Oracle,
    abducibles: &AbducibleSet,
) -> Result<Vec<Clause>, OracleError> {
    Ok(search(main, bare, abducibles, &EngineConfig::bp().eager(), None)?.implicates)
}

/// Eager `imp` from the empty hypothesis set, with model pruning.
pub fn imp(
    main: &mut dyn Oracle,
    bare: &mut dyn Oracle,
    abducibles: &AbducibleSet,
    predicate: ResultPredicate,
) -> Result<Vec<Clause>, OracleError> {
    let config = EngineConfig { predicate, ..EngineConfig::imp().eager() };
    Ok(search(main, bare, abducibles, &config, None)?.implicates)
}

fn negation(m: &[Lit]) -> Clause {
    Clause::new(m.iter().map(|l| l.complement()))
}

impl Search<'_> {
    fn run(&mut self) -> Result<Vec<Clause>, OracleError> {
        let mut path: Vec<Lit> = Vec::new();
        let root = match self.expand(&path, self.abducibles.members().to_vec())? {
            Node::Leaf(res) => return self.finish(res),
            Node::Inner(level) => level,
        };
        let mut stack = vec![root];
        loop {
            let top = stack.len() - 1;
            if stack[top].next < stack[top].branches.len() {
                if self.over_budget() {
                    self.outcome.completion = Completion::Budget;
                    break;
                }
                let i = stack[top].next;
                stack[top].next += 1;
                let l = stack[top].branches[i].0;
                let cands = std::mem::take(&mut stack[top].branches[i].1);
                self.main.assert_scoped(&[l])?;
                path.push(l);
                match self.expand(&path, cands)? {
                    Node::Leaf(res) => {
                        self.main.retract_scope()?;
                        path.pop();
                        stack[top].results.extend(res);
                    }
                    Node::Inner(level) => stack.push(level),
                }
            } else {
                let level = stack.pop().expect("non-empty stack");
                let res = self.minimize(level.results)?;
                match stack.last_mut() {
                    Some(parent) => {
                        self.main.retract_scope()?;
                        path.pop();
                        parent.results.extend(res);
                    }
                    None => return self.finish(res),
                }
            }
        }
        let mut collected = Vec::new();
        while let Some(level) = stack.pop() {
            collected.extend(level.results);
            if !stack.is_empty() {
                self.main.retract_scope()?;
            }
        }
        let res = self.minimize(collected)?;
        self.finish(res)
    }

    fn finish(&mut self, res: Vec<Clause>) -> Result<Vec<Clause>, OracleError> {
        Ok(match self.config.minimization {
            Minimization::Eager => res,
            Minimization::Streaming => Vec::new(),
        })
    }

    fn over_budget(&self) -> bool {
        let count_hit = self
            .config
            .max_implicates
            .is_some_and(|max| self.outcome.stats.accepted >= max as u64);
        let time_hit = self.config.time_limit.is_some_and(|t| self.start.elapsed() >= t);
        count_hit || time_hit
    }

    fn minimize(&mut self, clauses: Vec<Clause>) -> Result<Vec<Clause>, OracleError> {
        if self.config.minimization == Minimization::Streaming || clauses.len() <= 1 {
            return Ok(clauses);
        }
        let m = submin(clauses, self.bare)?;
        self.outcome.stats.unknown_answers += m.unresolved as u64;
        Ok(m.clauses)
    }

    fn trace(&mut self, event: impl FnOnce() -> TraceEvent) {
        if self.config.record_trace {
            self.outcome.trace.push(event());
        }
    }

    /// Reports an implicate. In eager mode it is returned to the caller's level.
    fn emit(&mut self, clause: Clause, out: &mut Vec<Clause>) -> Result<(), OracleError> {
        let stats = &mut self.outcome.stats;
        stats.found += 1;
        if stats.time_to_first.is_none() {
            stats.time_to_first = Some(self.start.elapsed());
        }
        match self.config.minimization {
            Minimization::Eager => out.push(clause),
            Minimization::Streaming => {
                let kept = match self.sink.as_deref_mut() {
                    Some(sink) => sink.accept(&clause, self.bare)?,
                    None => true,
                };
                if kept {
                    self.outcome.stats.accepted += 1;
                }
            }
        }
        Ok(())
    }

    /// Evaluates the node for hypotheses `m` (already asserted on `main`)
    /// with candidate list `a`.
    fn expand(&mut self, m: &[Lit], a: Vec<Lit>) -> Result<Node, OracleError> {
        self.outcome.stats.nodes += 1;
        self.outcome.stats.max_depth = self.outcome.stats.max_depth.max(m.len());
        debug_assert_eq!(self.main.depth(), m.len());

        let imp = self.config.algorithm == Algorithm::Imp;
        if imp && !self.config.predicate.holds(m, self.bare)? {
            self.trace(|| TraceEvent::PredicateFails(m.to_vec()));
            return Ok(Node::Leaf(Vec::new()));
        }
        // unknown counts as satisfiable here and below
        if !m.is_empty() && check_with(self.bare, m)? == SatStatus::Unsat {
            self.trace(|| TraceEvent::HypothesesUnsat(m.to_vec()));
            return Ok(Node::Leaf(Vec::new()));
        }
        let res = if imp && self.config.model_pruning {
            self.main.check_sat()?
        } else {
            crate::oracle::SatResult { status: self.main.check_status()?, model: None }
        };
        match res.status {
            SatStatus::Unsat => {
                self.trace(|| TraceEvent::Implicate(m.to_vec()));
                let mut out = Vec::new();
                self.emit(negation(m), &mut out)?;
                return Ok(Node::Leaf(out));
            }
            SatStatus::Unknown => {
                self.outcome.stats.unknown_answers += 1;
                if self.outcome.completion == Completion::Complete {
                    self.outcome.completion = Completion::Unknown;
                }
            }
            SatStatus::Sat => {}
        }
        self.trace(|| TraceEvent::Expand(m.to_vec()));

        let a = fix(&a, m, self.config.fix, self.main, self.bare)?;
        let mut results = Vec::new();
        let branches = if imp {
            let u = match &self.config.units {
                UnitMode::Hypotheses => m.to_vec(),
                UnitMode::Propagate(clauses) => {
                    unit_consequences(clauses, m).unwrap_or_else(|| m.to_vec())
                }
            };
            for c in uprop(&u, &a, m) {
                self.emit(c, &mut results)?;
            }
            let i = if res.model.is_some() {
                compatible_from_model(&res, self.abducibles)
            } else {
                CompatibleSet::full(self.abducibles)
            };
            a.iter()
                .filter(|l| i.contains(l.complement()))
                .map(|&l| (l, candidates_after(&a, l, &i)))
                .collect()
        } else {
            a.iter().map(|&l| (l, a.clone())).collect()
        };
        Ok(Node::Inner(Level { branches, next: 0, results }))
    }
}
