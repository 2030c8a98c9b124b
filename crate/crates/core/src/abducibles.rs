//! Abducible literals: the candidate hypotheses implicates are built from.
//!
//! A set is either generated from the signature (all ground equalities and
//! disequalities between terms up to a given height, optionally with
//! arithmetic comparisons) or read from a file with one literal per line. In
//! both cases the listing order is the total order the search uses to avoid
//! revisiting hypothesis sets.

use std::collections::HashSet;

use thiserror::Error;

use crate::logic::{AtomId, Lit, LiteralTable, Signature, Sort, BOOL};
use crate::oracle::{check_with, Oracle, OracleError, SatStatus};
use crate::problem::Problem;
use crate::sexp::{ParseError, SExpr};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    Generated,
    UserSupplied,
}

#[derive(Debug, Error)]
pub enum AbducibleError {
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
    #[error("line {line}: `{text}` is not a Boolean literal over the signature")]
    IllSorted { line: usize, text: String },
    #[error("line {line}: `{text}` is unsatisfiable on its own")]
    Unsatisfiable { line: usize, text: String },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// An ordered, duplicate-free list of literals.
#[derive(Clone, Debug)]
pub struct AbducibleSet {
    members: Vec<Lit>,
    rank: Vec<u32>,
    origin: Origin,
}

const UNRANKED: u32 = u32::MAX;

impl AbducibleSet {
    /// Keeps the first occurrence of repeated literals.
    pub fn new(lits: impl IntoIterator<Item = Lit>, origin: Origin) -> Self {
        let mut set = AbducibleSet { members: Vec::new(), rank: Vec::new(), origin };
        for l in lits {
            if set.rank(l).is_none() {
                if set.rank.len() <= l.index() {
                    set.rank.resize(l.index() + 1, UNRANKED);
                }
                set.rank[l.index()] = set.members.len() as u32;
                set.members.push(l);
            }
        }
        set
    }

    pub fn members(&self) -> &[Lit] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn contains(&self, l: Lit) -> bool {
        self.rank(l).is_some()
    }

    /// Position of `l` in the order, if it is a member.
    pub fn rank(&self, l: Lit) -> Option<usize> {
        match self.rank.get(l.index()) {
            Some(&r) if r != UNRANKED => Some(r as usize),
            _ => None,
        }
    }

    /// Atoms of the members, each once, in order of first appearance.
    pub fn atoms(&self) -> Vec<AtomId> {
        let mut seen = HashSet::new();
        self.members.iter().map(|l| l.atom()).filter(|a| seen.insert(*a)).collect()
    }

    /// The same literals listed in another order.
    pub fn reordered(&self, order: &[Lit]) -> Self {
        debug_assert_eq!(order.len(), self.len());
        AbducibleSet::new(order.iter().copied(), self.origin)
    }

    /// Drops members that are unsatisfiable on their own. `oracle` must be a
    /// bare session. Returns the kept set and the dropped literals.
    pub fn filter_satisfiable(
        &self,
        oracle: &mut dyn Oracle,
    ) -> Result<(AbducibleSet, Vec<Lit>), OracleError> {
        let mut kept = Vec::new();
        let mut dropped = Vec::new();
        for &l in &self.members {
            // unknown counts as satisfiable: the literal stays a candidate
            if check_with(oracle, &[l])? == SatStatus::Unsat {
                dropped.push(l);
            } else {
                kept.push(l);
            }
        }
        Ok((AbducibleSet::new(kept, self.origin), dropped))
    }

    /// One literal per line, loadable by [`load_file`].
    pub fn to_file_text(&self, table: &LiteralTable) -> String {
        let mut out = String::new();
        for &l in &self.members {
            out.push_str(&table.lit_text(l));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, Default)]
pub struct GenerateOptions {
    /// Maximal term height; seeds have height 0.
    pub depth: usize,
    /// Also emit `<=` and `>=` atoms between arithmetic terms.
    pub inequalities: bool,
}

/// Declared constants of the problem, in declaration order.
pub fn default_seeds(problem: &Problem) -> Vec<SExpr> {
    problem
        .signature
        .symbols()
        .iter()
        .filter(|s| s.is_constant())
        .map(|s| SExpr::atom(&s.name))
        .collect()
}

/// Ground terms of height at most `depth` over `seeds` and the signature's
/// function symbols, each with its sort. Terms of smaller height come first.
pub fn enumerate_terms(sig: &Signature, seeds: &[SExpr], depth: usize) -> Vec<(SExpr, Sort)> {
    let mut terms: Vec<(SExpr, Sort)> = Vec::new();
    let mut seen: HashSet<SExpr> = HashSet::new();
    for s in seeds {
        if let Some(sort) = sig.sort_of(s) {
            if seen.insert(s.clone()) {
                terms.push((s.clone(), sort));
            }
        }
    }
    let mut level_start = 0;
    for _ in 0..depth {
        let level_end = terms.len();
        let mut fresh = Vec::new();
        for sym in sig.symbols().iter().filter(|s| !s.is_constant()) {
            // argument tuples over all terms so far, with at least one
            // argument from the previous level so each term appears once
            let mut tuples: Vec<(Vec<usize>, bool)> = vec![(Vec::new(), false)];
            for arg_sort in &sym.args {
                let mut next = Vec::new();
                for (tuple, has_new) in &tuples {
                    for (i, (_, sort)) in terms[..level_end].iter().enumerate() {
                        if sort == arg_sort {
                            let mut t = tuple.clone();
                            t.push(i);
                            next.push((t, *has_new || i >= level_start));
                        }
                    }
                }
                tuples = next;
            }
            for (tuple, has_new) in tuples {
                if !has_new {
                    continue;
                }
                let term = SExpr::app(&sym.name, tuple.iter().map(|&i| terms[i].0.clone()));
                if seen.insert(term.clone()) {
                    fresh.push((term, sym.result.clone()));
                }
            }
        }
        level_start = level_end;
        terms.extend(fresh);
    }
    terms
}

/// Literal terms (atoms and `(not atom)`) between distinct terms of equal
/// sort. Pairs are visited by the index of their later term, so the output
/// for a smaller depth is a prefix of the output for a larger one.
pub fn generate_literals(sig: &Signature, seeds: &[SExpr], opts: &GenerateOptions) -> Vec<SExpr> {
    let terms = enumerate_terms(sig, seeds, opts.depth);
    let mut out = Vec::new();
    for j in 0..terms.len() {
        for i in 0..j {
            let (ti, si) = &terms[i];
            let (tj, sj) = &terms[j];
            if si != sj {
                continue;
            }
            let (a, b) = if ti.to_string() <= tj.to_string() { (ti, tj) } else { (tj, ti) };
            let mut preds = vec!["="];
            if opts.inequalities && Signature::is_arithmetic(si) {
                preds.extend(["<=", ">="]);
            }
            for p in preds {
                let atom = SExpr::app(p, [a.clone(), b.clone()]);
                out.push(atom.clone());
                out.push(SExpr::app("not", [atom]));
            }
        }
    }
    out
}

/// Generates and registers abducibles. Individually unsatisfiable literals
/// are still included; see [`AbducibleSet::filter_satisfiable`].
pub fn generate(
    sig: &Signature,
    seeds: &[SExpr],
    opts: &GenerateOptions,
    table: &mut LiteralTable,
) -> AbducibleSet {
    let lits: Vec<Lit> = generate_literals(sig, seeds, opts).iter().map(|t| table.intern(t)).collect();
    AbducibleSet::new(lits, Origin::Generated)
}

/// A parsed abducible file: the set plus the source line of each member.
#[derive(Clone, Debug)]
pub struct LoadedAbducibles {
    pub set: AbducibleSet,
    pub lines: Vec<usize>,
}

impl LoadedAbducibles {
    /// Rejects the first member that is unsatisfiable on its own, reporting
    /// its line. `oracle` must be a bare session.
    pub fn check_satisfiable(
        &self,
        oracle: &mut dyn Oracle,
        table: &LiteralTable,
    ) -> Result<(), AbducibleError> {
        for (&l, &line) in self.set.members().iter().zip(&self.lines) {
            if check_with(oracle, &[l])? == SatStatus::Unsat {
                return Err(AbducibleError::Unsatisfiable { line, text: table.lit_text(l) });
            }
        }
        Ok(())
    }
}

/// Reads one literal per line. Blank lines and lines starting with `#` are
/// skipped; negative literals are written `(not atom)`.
pub fn load_file(
    text: &str,
    sig: &Signature,
    table: &mut LiteralTable,
) -> Result<LoadedAbducibles, AbducibleError> {
    let mut lits = Vec::new();
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let term = SExpr::parse(trimmed).map_err(|source| AbducibleError::Parse { line, source })?;
        if sig.sort_of(&term).as_deref() != Some(BOOL) {
            return Err(AbducibleError::IllSorted { line, text: term.to_string() });
        }
        let lit = table.intern(&term);
        if !lits.contains(&lit) {
            lits.push(lit);
            lines.push(line);
        }
    }
    Ok(LoadedAbducibles { set: AbducibleSet::new(lits, Origin::UserSupplied), lines })
}
