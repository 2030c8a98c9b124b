use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{Context, Result};
use pimt_core::engine::{search, Completion, EngineConfig, ImplicateSink, SearchStats};
use pimt_core::oracle::{Backend, Oracle, OracleError};
use pimt_core::store::{ImplicateStore, LitOrder};
use pimt_core::{Clause, LiteralTable};

use crate::setup::{prepare, AbducibleSource};

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub problem: PathBuf,
    pub logic: Option<String>,
    pub abducibles: AbducibleSource,
    pub backend: Backend,
    pub engine: EngineConfig,
    pub dump_store: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub implicates: Vec<Clause>,
    pub completion: Completion,
    pub stats: SearchStats,
}

/// The text of one output line: the implicate, then the hypothesis set it
/// rules out as a comment.
pub fn implicate_line(table: &LiteralTable, c: &Clause) -> String {
    let clause = table.clause_text(c);
    if c.is_empty() {
        clause
    } else {
        format!("{clause} ; hypothesis {}", table.conjunction_text(&c.hypotheses()))
    }
}

struct Printer<'a> {
    store: ImplicateStore,
    table: &'a LiteralTable,
    out: &'a mut dyn Write,
}

impl ImplicateSink for Printer<'_> {
    fn accept(&mut self, clause: &Clause, bare: &mut dyn Oracle) -> Result<bool, OracleError> {
        let outcome = self.store.add_minimal(clause, bare)?;
        if outcome.accepted() {
            for r in &outcome.removed {
                writeln!(self.out, "; retract {}", self.table.clause_text(r))?;
            }
            writeln!(self.out, "{}", implicate_line(self.table, clause))?;
            self.out.flush()?;
        }
        Ok(outcome.accepted())
    }
}

fn seconds(d: Duration) -> String {
    format!("{:.3}s", d.as_secs_f64())
}

/// Runs one search, streaming implicates and then a summary block to `out`.
pub fn run(opts: &RunOptions, out: &mut dyn Write) -> Result<RunReport> {
    let mut p = prepare(&opts.problem, opts.logic.as_deref(), &opts.abducibles, &opts.backend)?;
    let store = ImplicateStore::new(LitOrder::from_abducibles(&p.abducibles));
    let mut printer = Printer { store, table: &p.table, out };
    let outcome = search(
        p.main.as_mut(),
        p.bare.as_mut(),
        &p.abducibles,
        &opts.engine,
        Some(&mut printer),
    )
    .context("search failed")?;
    let store = printer.store;
    let clauses = store.clauses();
    let stats = &outcome.stats;
    writeln!(out, "---")?;
    writeln!(out, "implicates: {}", clauses.len())?;
    writeln!(out, "abducibles: {}", p.abducibles.len())?;
    let first = stats.time_to_first.map_or_else(|| "none".to_string(), seconds);
    writeln!(out, "time_to_first: {first}")?;
    writeln!(out, "total_time: {}", seconds(stats.elapsed))?;
    writeln!(out, "oracle_calls: {}", stats.oracle_calls)?;
    writeln!(out, "incomplete: {}", outcome.completion.as_str())?;
    if let Some(path) = &opts.dump_store {
        std::fs::write(path, store.dump(&p.table))
            .with_context(|| format!("cannot write store dump {}", path.display()))?;
    }
    Ok(RunReport { implicates: clauses, completion: outcome.completion, stats: outcome.stats })
}
