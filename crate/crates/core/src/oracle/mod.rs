//! Satisfiability oracles.
//!
//! The engine and the store only talk to an [`Oracle`]: a stateful session
//! holding a base formula set plus a stack of scoped literal frames. Two
//! backends implement it: [`SmtSession`] drives an external solver over the
//! SMT-LIB command protocol, and [`PropositionalSession`] is a small
//! in-process solver for Boolean inputs that doubles as a test oracle.

mod dpll;
mod propositional;
mod smtlib;

use std::sync::Arc;
use std::time::Duration;

use thiserror::Error;

use crate::logic::{AtomId, Clause, Lit, LiteralTable};
use crate::problem::Problem;

pub use dpll::{Dpll, DpllLit};
pub use propositional::PropositionalSession;
pub use smtlib::{SmtSession, SolverCommand, SOLVER_ENV};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SatStatus {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatResult {
    pub status: SatStatus,
    /// Literals over the configured model atoms that hold in the model found.
    /// Atoms the model leaves undetermined contribute neither polarity.
    pub model: Option<Vec<Lit>>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Entailment {
    Yes,
    No,
    Unknown,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Capabilities {
    pub supports_models: bool,
    pub supports_unknown: bool,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleStats {
    pub checks: u64,
    pub pushes: u64,
}

impl std::ops::Add for OracleStats {
    type Output = OracleStats;

    fn add(self, o: OracleStats) -> OracleStats {
        OracleStats { checks: self.checks + o.checks, pushes: self.pushes + o.pushes }
    }
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("could not start solver `{command}`: {source}")]
    Spawn { command: String, source: std::io::Error },
    #[error("solver I/O failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver reported an error: {0}")]
    Solver(String),
    #[error("unexpected solver response: {0}")]
    Protocol(String),
    #[error("solver did not answer within {0:?}")]
    Timeout(Duration),
    #[error("backend does not support this input: {0}")]
    Unsupported(String),
    #[error("pop without a matching push")]
    NoScope,
}

/// A satisfiability session over a base problem `S` and a stack of literal
/// frames. Calls on one session must be serialized.
pub trait Oracle {
    /// Pushes one frame holding `lits`.
    fn assert_scoped(&mut self, lits: &[Lit]) -> Result<(), OracleError>;

    /// Pops the most recent frame.
    fn retract_scope(&mut self) -> Result<(), OracleError>;

    /// Satisfiability of `S` together with every scoped literal.
    fn check_status(&mut self) -> Result<SatStatus, OracleError>;

    /// Values of the model atoms in the model of the last satisfiable check.
    fn model_literals(&mut self) -> Result<Option<Vec<Lit>>, OracleError>;

    /// Atoms whose values [`Oracle::check_sat`] reports.
    fn set_model_atoms(&mut self, atoms: &[AtomId]) -> Result<(), OracleError>;

    fn depth(&self) -> usize;

    fn capabilities(&self) -> Capabilities;

    fn stats(&self) -> OracleStats;

    /// [`Oracle::check_status`] plus model extraction when satisfiable and
    /// supported.
    fn check_sat(&mut self) -> Result<SatResult, OracleError> {
        let status = self.check_status()?;
        let model = if status == SatStatus::Sat && self.capabilities().supports_models {
            self.model_literals()?
        } else {
            None
        };
        Ok(SatResult { status, model })
    }
}

/// Satisfiability of the session's formulas extended by `lits`, leaving the
/// scope stack as it was.
pub fn check_with(oracle: &mut dyn Oracle, lits: &[Lit]) -> Result<SatStatus, OracleError> {
    if has_complementary_pair(lits) {
        return Ok(SatStatus::Unsat);
    }
    oracle.assert_scoped(lits)?;
    let status = oracle.check_status();
    oracle.retract_scope()?;
    status
}

/// Whether `premise ⊨ clause` modulo the session's formulas, decided as
/// unsatisfiability of `premise ∪ ¬clause`.
pub fn entails(
    oracle: &mut dyn Oracle,
    premise: &[Lit],
    clause: &Clause,
) -> Result<Entailment, OracleError> {
    if premise.iter().any(|&l| clause.contains(l)) {
        return Ok(Entailment::Yes);
    }
    let mut query: Vec<Lit> = premise.to_vec();
    query.extend(clause.lits().iter().map(|l| l.complement()));
    Ok(match check_with(oracle, &query)? {
        SatStatus::Unsat => Entailment::Yes,
        SatStatus::Sat => Entailment::No,
        SatStatus::Unknown => Entailment::Unknown,
    })
}

/// Whether clause `c` entails clause `d`: each literal of `c` must entail `d`.
pub fn clause_entails(
    oracle: &mut dyn Oracle,
    c: &Clause,
    d: &Clause,
) -> Result<Entailment, OracleError> {
    if c.is_subset_of(d) {
        return Ok(Entailment::Yes);
    }
    let mut result = Entailment::Yes;
    for &l in c.lits() {
        match entails(oracle, &[l], d)? {
            Entailment::Yes => {}
            Entailment::No => return Ok(Entailment::No),
            Entailment::Unknown => result = Entailment::Unknown,
        }
    }
    Ok(result)
}

pub fn is_tautology(oracle: &mut dyn Oracle, clause: &Clause) -> Result<Entailment, OracleError> {
    if clause.is_syntactic_tautology() {
        return Ok(Entailment::Yes);
    }
    entails(oracle, &[], clause)
}

fn has_complementary_pair(lits: &[Lit]) -> bool {
    let mut sorted = lits.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.windows(2).any(|w| w[0].atom() == w[1].atom())
}

/// Which decision procedure sessions are opened on.
#[derive(Clone, Debug)]
pub enum Backend {
    Internal,
    External(SolverCommand),
}

impl Backend {
    /// `internal`, or a solver command line.
    pub fn parse(text: &str, query_timeout: Option<Duration>) -> Backend {
        if text.trim() == "internal" {
            Backend::Internal
        } else {
            Backend::External(SolverCommand::parse(text, query_timeout))
        }
    }
}

/// Opens a session on `problem`. With `with_assertions == false` the session
/// holds the declarations only, giving a bare theory context for entailment
/// checks between literal sets.
pub fn open_session(
    problem: &Problem,
    table: Arc<LiteralTable>,
    backend: &Backend,
    with_assertions: bool,
) -> Result<Box<dyn Oracle>, OracleError> {
    Ok(match backend {
        Backend::Internal => Box::new(PropositionalSession::open(problem, table, with_assertions)?),
        Backend::External(cmd) => Box::new(SmtSession::open(cmd, problem, table, with_assertions)?),
    })
}
