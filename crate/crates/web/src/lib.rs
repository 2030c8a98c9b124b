//! Browser bindings. Every entry point takes SMT-LIB text over Bool
//! constants, runs on the built-in propositional backend and returns JSON.

use std::sync::Arc;
use std::time::Duration;

use pimt_core::abducibles::{self, AbducibleSet, Origin};
use pimt_core::engine::{
    candidates_after, compatible_from_model, search, Algorithm, EngineConfig, ResultPredicate, TraceEvent,
};
use pimt_core::oracle::{Oracle, PropositionalSession, SatStatus};
use pimt_core::store::{ATree, ImplicateStore, LitOrder, Rejection};
use pimt_core::{Clause, Lit, LiteralTable, Problem, SExpr};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const TIME_LIMIT: Duration = Duration::from_secs(5);

struct Session {
    table: Arc<LiteralTable>,
    abducibles: AbducibleSet,
    main: PropositionalSession,
    bare: PropositionalSession,
}

fn err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// Opens both sessions. An empty abducible text means every declared Bool
/// constant in both polarities.
fn open(problem: &str, abducible_text: &str, extra: &[SExpr]) -> Result<(Session, Vec<Lit>), JsError> {
    let problem = Problem::parse(problem).map_err(err)?;
    let mut table = LiteralTable::new();
    let abducibles = if abducible_text.trim().is_empty() {
        let mut lits = Vec::new();
        for sym in problem.signature.symbols() {
            if sym.is_constant() && sym.result == "Bool" {
                let l = table.intern(&SExpr::atom(&sym.name));
                lits.extend([l, l.complement()]);
            }
        }
        AbducibleSet::new(lits, Origin::Generated)
    } else {
        abducibles::load_file(abducible_text, &problem.signature, &mut table).map_err(err)?.set
    };
    let extra: Vec<Lit> = extra.iter().map(|t| table.intern(t)).collect();
    let table = Arc::new(table);
    let main = PropositionalSession::open(&problem, table.clone(), true).map_err(err)?;
    let bare = PropositionalSession::open(&problem, table.clone(), false).map_err(err)?;
    Ok((Session { table, abducibles, main, bare }, extra))
}

#[derive(Serialize)]
struct Implicate {
    clause: String,
    hypothesis: String,
}

#[derive(Serialize)]
struct TraceLine {
    event: &'static str,
    hypothesis: String,
}

#[derive(Serialize)]
struct Enumeration {
    abducibles: Vec<String>,
    implicates: Vec<Implicate>,
    trace: Vec<TraceLine>,
    nodes: u64,
    oracle_calls: u64,
    complete: bool,
}

/// Enumerates implicates. `size_limit` 0 means no limit; `algorithm` is
/// `imp` or `bp`.
#[wasm_bindgen]
pub fn enumerate(problem: &str, abducibles: &str, size_limit: u32, algorithm: &str) -> Result<String, JsError> {
    let (mut s, _) = open(problem, abducibles, &[])?;
    let mut config = match algorithm {
        "imp" => EngineConfig::imp(),
        "bp" => EngineConfig { algorithm: Algorithm::Bp, ..EngineConfig::default() },
        other => return Err(err(format!("unknown algorithm {other}"))),
    }
    .eager();
    if size_limit > 0 {
        config.predicate = ResultPredicate::SizeLimit(size_limit as usize);
    }
    config.time_limit = Some(TIME_LIMIT);
    config.record_trace = true;
    let out = search(&mut s.main, &mut s.bare, &s.abducibles, &config, None).map_err(err)?;
    let t = &s.table;
    let trace = out
        .trace
        .iter()
        .map(|e| {
            let (event, m) = match e {
                TraceEvent::HypothesesUnsat(m) => ("hypotheses unsat", m),
                TraceEvent::PredicateFails(m) => ("predicate fails", m),
                TraceEvent::Implicate(m) => ("implicate", m),
                TraceEvent::Expand(m) => ("expand", m),
            };
            TraceLine { event, hypothesis: t.conjunction_text(m) }
        })
        .collect();
    let report = Enumeration {
        abducibles: s.abducibles.members().iter().map(|&l| t.lit_text(l)).collect(),
        implicates: out
            .implicates
            .iter()
            .map(|c| Implicate { clause: t.clause_text(c), hypothesis: t.conjunction_text(&c.hypotheses()) })
            .collect(),
        trace,
        nodes: out.stats.nodes,
        oracle_calls: out.stats.oracle_calls,
        complete: out.completion.as_str() == "no",
    };
    serde_json::to_string(&report).map_err(err)
}

#[derive(Serialize)]
struct Edge {
    lit: String,
    /// `None` marks a stored clause ending here.
    below: Option<Vec<Edge>>,
}

fn tree_json(t: &ATree, table: &LiteralTable) -> Option<Vec<Edge>> {
    match t {
        ATree::Bot => None,
        ATree::Node(children) => Some(
            children
                .iter()
                .map(|(&l, sub)| Edge { lit: table.lit_text(l), below: tree_json(sub, table) })
                .collect(),
        ),
    }
}

#[derive(Serialize)]
struct StoreStep {
    clause: String,
    outcome: &'static str,
    removed: Vec<String>,
    tree: Option<Vec<Edge>>,
    stored: Vec<String>,
}

fn parse_clause(line: &str) -> Result<Vec<SExpr>, JsError> {
    let term = SExpr::parse(line).map_err(err)?;
    if term.is_atom("false") {
        return Ok(Vec::new());
    }
    match (term.head(), term.as_list()) {
        (Some("or"), Some(items)) => Ok(items[1..].to_vec()),
        _ => Ok(vec![term]),
    }
}

/// Adds the clauses (one per line) to a store in order, reporting each step.
/// Entailment is checked modulo the problem's declarations only.
#[wasm_bindgen]
pub fn store_steps(problem: &str, clauses: &str) -> Result<String, JsError> {
    let lines: Vec<&str> = clauses.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    let parsed = lines.iter().map(|l| parse_clause(l)).collect::<Result<Vec<_>, _>>()?;
    let terms: Vec<SExpr> = parsed.iter().flatten().cloned().collect();
    let (mut s, lits) = open(problem, "", &terms)?;
    let mut lits = lits.into_iter();
    let mut store = ImplicateStore::new(LitOrder::by_id());
    let mut steps = Vec::new();
    for (line, c) in lines.iter().zip(&parsed) {
        let clause = Clause::new(lits.by_ref().take(c.len()));
        let outcome = store.add_minimal(&clause, &mut s.bare).map_err(err)?;
        let label = match outcome.rejected {
            None => "accepted",
            Some(Rejection::Tautology) => "tautology",
            Some(Rejection::Subsumed) => "subsumed",
        };
        steps.push(StoreStep {
            clause: line.to_string(),
            outcome: label,
            removed: outcome.removed.iter().map(|r| s.table.clause_text(r)).collect(),
            tree: tree_json(store.tree(), &s.table),
            stored: store.clauses().iter().map(|c| s.table.clause_text(c)).collect(),
        });
    }
    serde_json::to_string(&steps).map_err(err)
}

#[derive(Serialize)]
struct Branch {
    lit: String,
    candidates: Vec<String>,
}

#[derive(Serialize)]
struct RootBranches {
    satisfiable: bool,
    compatible: Vec<String>,
    branches: Vec<Branch>,
    skipped: Vec<String>,
}

/// The first branching step of the model-guided search: the model found for
/// the problem, the literals it lets the search skip and the candidate list
/// of each remaining branch.
#[wasm_bindgen]
pub fn root_branches(problem: &str, abducibles: &str) -> Result<String, JsError> {
    let (mut s, _) = open(problem, abducibles, &[])?;
    s.main.set_model_atoms(&s.abducibles.atoms()).map_err(err)?;
    let res = s.main.check_sat().map_err(err)?;
    let t = &s.table;
    if res.status != SatStatus::Sat {
        let report = RootBranches { satisfiable: false, compatible: vec![], branches: vec![], skipped: vec![] };
        return serde_json::to_string(&report).map_err(err);
    }
    let i = compatible_from_model(&res, &s.abducibles);
    let a = s.abducibles.members();
    let (taken, skipped): (Vec<Lit>, Vec<Lit>) = a.iter().partition(|l| i.contains(l.complement()));
    let report = RootBranches {
        satisfiable: true,
        compatible: i.members().map(|l| t.lit_text(l)).collect(),
        branches: taken
            .iter()
            .map(|&l| Branch {
                lit: t.lit_text(l),
                candidates: candidates_after(a, l, &i).iter().map(|&c| t.lit_text(c)).collect(),
            })
            .collect(),
        skipped: skipped.iter().map(|&l| t.lit_text(l)).collect(),
    };
    serde_json::to_string(&report).map_err(err)
}
