//! Signatures, literals and clauses.
//!
//! Atoms are ground Boolean terms stored once in a [`LiteralTable`]; a [`Lit`]
//! packs an atom index with a polarity bit so that complementation is a single
//! xor. Clauses are duplicate-free sorted vectors of literals.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::sexp::{ParseError, SExpr};

pub type Sort = String;

pub const BOOL: &str = "Bool";
pub const INT: &str = "Int";
pub const REAL: &str = "Real";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub args: Vec<Sort>,
    pub result: Sort,
}

impl Symbol {
    pub fn is_constant(&self) -> bool {
        self.args.is_empty()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("symbol `{0}` declared twice")]
    DuplicateSymbol(String),
    #[error("sort `{0}` declared twice")]
    DuplicateSort(String),
    #[error("sort `{sort}` used by `{symbol}` is not declared")]
    UndeclaredSort { symbol: String, sort: Sort },
}

/// The sorted signature a problem is written over.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    pub logic: String,
    sorts: Vec<Sort>,
    symbols: Vec<Symbol>,
    by_name: HashMap<String, usize>,
}

impl Signature {
    pub fn new(logic: impl Into<String>) -> Self {
        Signature {
            logic: logic.into(),
            sorts: vec![BOOL.into(), INT.into(), REAL.into()],
            symbols: Vec::new(),
            by_name: HashMap::new(),
        }
    }

    pub fn declare_sort(&mut self, name: impl Into<Sort>) -> Result<(), SignatureError> {
        let name = name.into();
        if self.sorts.contains(&name) {
            return Err(SignatureError::DuplicateSort(name));
        }
        self.sorts.push(name);
        Ok(())
    }

    pub fn declare_fun(
        &mut self,
        name: impl Into<String>,
        args: Vec<Sort>,
        result: impl Into<Sort>,
    ) -> Result<(), SignatureError> {
        let name = name.into();
        let result = result.into();
        if self.by_name.contains_key(&name) {
            return Err(SignatureError::DuplicateSymbol(name));
        }
        for sort in args.iter().chain(std::iter::once(&result)) {
            if !self.has_sort(sort) {
                return Err(SignatureError::UndeclaredSort { symbol: name, sort: sort.clone() });
            }
        }
        self.by_name.insert(name.clone(), self.symbols.len());
        self.symbols.push(Symbol { name, args, result });
        Ok(())
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.sorts
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbol(&self, name: &str) -> Option<&Symbol> {
        self.by_name.get(name).map(|&i| &self.symbols[i])
    }

    fn has_sort(&self, sort: &str) -> bool {
        // parametric sorts such as (Array Int Int) are accepted as written
        sort.starts_with('(') || self.sorts.iter().any(|s| s == sort)
    }

    pub fn is_arithmetic(sort: &str) -> bool {
        sort == INT || sort == REAL
    }

    /// Sort of a ground term, or `None` if it is ill-sorted or uses an
    /// unknown symbol.
    pub fn sort_of(&self, term: &SExpr) -> Option<Sort> {
        match term {
            SExpr::Atom(a) => {
                if a == "true" || a == "false" {
                    Some(BOOL.into())
                } else if a.bytes().all(|b| b.is_ascii_digit()) && !a.is_empty() {
                    Some(INT.into())
                } else if is_decimal(a) {
                    Some(REAL.into())
                } else {
                    let sym = self.symbol(a)?;
                    sym.is_constant().then(|| sym.result.clone())
                }
            }
            SExpr::List(items) => {
                let head = items.first()?.as_atom()?;
                let args = &items[1..];
                let arg_sorts: Option<Vec<Sort>> = args.iter().map(|a| self.sort_of(a)).collect();
                let arg_sorts = arg_sorts?;
                let all = |s: &str| arg_sorts.iter().all(|x| x == s);
                match head {
                    "not" => (args.len() == 1 && all(BOOL)).then(|| BOOL.into()),
                    "and" | "or" | "xor" | "=>" => {
                        (!args.is_empty() && all(BOOL)).then(|| BOOL.into())
                    }
                    "=" | "distinct" => (args.len() >= 2 && arg_sorts.windows(2).all(|w| w[0] == w[1]))
                        .then(|| BOOL.into()),
                    "<=" | "<" | ">=" | ">" => (args.len() >= 2
                        && arg_sorts.iter().all(|s| Self::is_arithmetic(s))
                        && arg_sorts.windows(2).all(|w| w[0] == w[1]))
                    .then(|| BOOL.into()),
                    "+" | "-" | "*" => {
                        if args.is_empty() {
                            None
                        } else if all(INT) {
                            Some(INT.into())
                        } else if all(REAL) {
                            Some(REAL.into())
                        } else {
                            None
                        }
                    }
                    "div" | "mod" => (args.len() == 2 && all(INT)).then(|| INT.into()),
                    "abs" => (args.len() == 1 && all(INT)).then(|| INT.into()),
                    "/" => (args.len() >= 2 && all(REAL)).then(|| REAL.into()),
                    "ite" => (args.len() == 3 && arg_sorts[0] == BOOL && arg_sorts[1] == arg_sorts[2])
                        .then(|| arg_sorts[1].clone()),
                    _ => {
                        let sym = self.symbol(head)?;
                        (sym.args == arg_sorts).then(|| sym.result.clone())
                    }
                }
            }
        }
    }
}

fn is_decimal(a: &str) -> bool {
    match a.split_once('.') {
        Some((i, f)) => {
            !i.is_empty()
                && !f.is_empty()
                && i.bytes().all(|b| b.is_ascii_digit())
                && f.bytes().all(|b| b.is_ascii_digit())
        }
        None => false,
    }
}

/// Index of an atom in a [`LiteralTable`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomId(pub u32);

/// A literal: atom index shifted left once, low bit set for negative polarity.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(atom: AtomId, positive: bool) -> Self {
        Lit(atom.0 << 1 | u32::from(!positive))
    }

    pub fn positive(atom: AtomId) -> Self {
        Lit::new(atom, true)
    }

    pub fn negative(atom: AtomId) -> Self {
        Lit::new(atom, false)
    }

    pub fn from_index(index: usize) -> Self {
        Lit(index as u32)
    }

    pub fn atom(self) -> AtomId {
        AtomId(self.0 >> 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Dense index, usable for bitsets over all literals of a table.
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn complement(self) -> Self {
        Lit(self.0 ^ 1)
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        self.complement()
    }
}

#[derive(Debug, Error)]
pub enum LiteralError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("`{0}` is not a Boolean term over the signature")]
    IllSorted(String),
    #[error("atom `{0}` is not registered")]
    Unregistered(String),
}

/// Append-only registry of atoms; literals are ids into it.
#[derive(Clone, Debug, Default)]
pub struct LiteralTable {
    atoms: Vec<SExpr>,
    texts: Vec<String>,
    index: HashMap<String, AtomId>,
}

impl LiteralTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    /// Number of distinct literals (two per atom).
    pub fn num_lits(&self) -> usize {
        2 * self.atoms.len()
    }

    /// Registers a term as an atom. `(not t)` wrappers are peeled off and
    /// reflected in the returned literal's polarity.
    pub fn intern(&mut self, term: &SExpr) -> Lit {
        let (atom, positive) = strip_negations(term);
        let text = atom.to_string();
        let id = match self.index.get(&text) {
            Some(&id) => id,
            None => {
                let id = AtomId(self.atoms.len() as u32);
                self.atoms.push(atom.clone());
                self.texts.push(text.clone());
                self.index.insert(text, id);
                id
            }
        };
        Lit::new(id, positive)
    }

    pub fn lookup(&self, term: &SExpr) -> Option<Lit> {
        let (atom, positive) = strip_negations(term);
        let id = *self.index.get(&atom.to_string())?;
        Some(Lit::new(id, positive))
    }

    /// Parses and registers a literal in term syntax, checking that the atom
    /// is a Boolean term of the signature.
    pub fn intern_text(&mut self, text: &str, sig: &Signature) -> Result<Lit, LiteralError> {
        let term = SExpr::parse(text)?;
        if sig.sort_of(&term).as_deref() != Some(BOOL) {
            return Err(LiteralError::IllSorted(term.to_string()));
        }
        Ok(self.intern(&term))
    }

    pub fn lookup_text(&self, text: &str) -> Result<Lit, LiteralError> {
        let term = SExpr::parse(text)?;
        self.lookup(&term).ok_or_else(|| LiteralError::Unregistered(term.to_string()))
    }

    pub fn atom(&self, id: AtomId) -> &SExpr {
        &self.atoms[id.0 as usize]
    }

    pub fn atom_text(&self, id: AtomId) -> &str {
        &self.texts[id.0 as usize]
    }

    pub fn contains(&self, lit: Lit) -> bool {
        (lit.atom().0 as usize) < self.atoms.len()
    }

    pub fn lit_term(&self, lit: Lit) -> SExpr {
        let atom = self.atom(lit.atom()).clone();
        if lit.is_positive() {
            atom
        } else {
            SExpr::app("not", [atom])
        }
    }

    pub fn lit_text(&self, lit: Lit) -> String {
        if lit.is_positive() {
            self.atom_text(lit.atom()).to_string()
        } else {
            format!("(not {})", self.atom_text(lit.atom()))
        }
    }

    /// `false` for the empty clause, the bare literal for a unit clause and
    /// `(or l1 ... ln)` otherwise.
    pub fn clause_text(&self, clause: &Clause) -> String {
        match clause.lits() {
            [] => "false".into(),
            [l] => self.lit_text(*l),
            lits => {
                let parts: Vec<String> = lits.iter().map(|&l| self.lit_text(l)).collect();
                format!("(or {})", parts.join(" "))
            }
        }
    }

    /// Conjunction of literals: `true`, a single literal, or `(and ...)`.
    pub fn conjunction_text(&self, lits: &[Lit]) -> String {
        match lits {
            [] => "true".into(),
            [l] => self.lit_text(*l),
            lits => {
                let parts: Vec<String> = lits.iter().map(|&l| self.lit_text(l)).collect();
                format!("(and {})", parts.join(" "))
            }
        }
    }

    /// Reads a clause printed by [`LiteralTable::clause_text`].
    pub fn parse_clause(&self, text: &str) -> Result<Clause, LiteralError> {
        let term = SExpr::parse(text)?;
        if term.is_atom("false") {
            return Ok(Clause::empty());
        }
        if term.head() == Some("or") {
            let items = &term.as_list().unwrap()[1..];
            let lits: Result<Vec<Lit>, LiteralError> = items
                .iter()
                .map(|t| self.lookup(t).ok_or_else(|| LiteralError::Unregistered(t.to_string())))
                .collect();
            return Ok(Clause::new(lits?));
        }
        let lit = self.lookup(&term).ok_or_else(|| LiteralError::Unregistered(term.to_string()))?;
        Ok(Clause::new([lit]))
    }
}

fn strip_negations(term: &SExpr) -> (&SExpr, bool) {
    let mut t = term;
    let mut positive = true;
    while t.head() == Some("not") && t.as_list().map_or(0, |l| l.len()) == 2 {
        t = &t.as_list().unwrap()[1];
        positive = !positive;
    }
    (t, positive)
}

/// A duplicate-free set of literals, kept sorted by literal id.
///
/// The `Ord` implementation is the clause order used throughout: shorter
/// clauses first, ties broken lexicographically on the sorted literal ids.
/// A strict subset is therefore always strictly smaller.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Self {
        let mut lits: Vec<Lit> = lits.into_iter().collect();
        lits.sort_unstable();
        lits.dedup();
        Clause { lits }
    }

    /// The empty clause, i.e. falsity.
    pub fn empty() -> Self {
        Clause { lits: Vec::new() }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.lits.binary_search(&lit).is_ok()
    }

    pub fn is_subset_of(&self, other: &Clause) -> bool {
        self.lits.iter().all(|&l| other.contains(l))
    }

    /// True when the clause holds both a literal and its complement.
    pub fn is_syntactic_tautology(&self) -> bool {
        self.lits.windows(2).any(|w| w[0].atom() == w[1].atom())
    }

    /// The set of complements of this clause's literals, sorted by id.
    pub fn hypotheses(&self) -> Vec<Lit> {
        hypotheses_of_clause(self)
    }
}

impl Ord for Clause {
    fn cmp(&self, other: &Self) -> Ordering {
        compare(self, other)
    }
}

impl PartialOrd for Clause {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lits.is_empty() {
            return f.write_str("false");
        }
        let ids: Vec<String> = self.lits.iter().map(|l| {
            let sign = if l.is_positive() { "" } else { "-" };
            format!("{sign}{}", l.atom().0)
        }).collect();
        write!(f, "[{}]", ids.join(" "))
    }
}

/// Cardinality first, then lexicographic on sorted literal ids.
pub fn compare(c: &Clause, d: &Clause) -> Ordering {
    c.lits.len().cmp(&d.lits.len()).then_with(|| c.lits.cmp(&d.lits))
}

pub fn complement(lit: Lit) -> Lit {
    lit.complement()
}

/// `{l1..ln}` to the clause `¬l1 ∨ ... ∨ ¬ln`.
pub fn clause_of_hypotheses(hyps: &[Lit]) -> Clause {
    Clause::new(hyps.iter().map(|l| l.complement()))
}

/// Inverse of [`clause_of_hypotheses`]; the result is sorted by literal id.
pub fn hypotheses_of_clause(clause: &Clause) -> Vec<Lit> {
    let mut out: Vec<Lit> = clause.lits.iter().map(|l| l.complement()).collect();
    out.sort_unstable();
    out
}
