//! Random propositional instances and truth-table oracles shared by tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use pimt_core::abducibles::{AbducibleSet, Origin};
use pimt_core::logic::AtomId;
use pimt_core::oracle::{Oracle, PropositionalSession};
use pimt_core::store::ATree;
use pimt_core::{Clause, Lit, LiteralTable, Problem, SExpr};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn lit(atom: usize, positive: bool) -> Lit {
    Lit::new(AtomId(atom as u32), positive)
}

/// A CNF over atoms `p0 … p{n-1}`, each literal an (atom, polarity) pair.
#[derive(Clone, Debug)]
pub struct Cnf {
    pub atoms: usize,
    pub clauses: Vec<Vec<(usize, bool)>>,
}

impl Cnf {
    pub fn random(rng: &mut TestRng, max_atoms: usize, max_clauses: usize) -> Cnf {
        let atoms = rng.gen_range(1..=max_atoms);
        let count = rng.gen_range(1..=max_clauses);
        let clauses = (0..count)
            .map(|_| {
                let len = rng.gen_range(1..=3.min(atoms));
                let mut vars: Vec<usize> = (0..atoms).collect();
                vars.shuffle(rng);
                vars[..len].iter().map(|&v| (v, rng.gen_bool(0.5))).collect()
            })
            .collect();
        Cnf { atoms, clauses }
    }

    pub fn smt2(&self) -> String {
        let mut out = String::from("(set-logic QF_UF)\n");
        for i in 0..self.atoms {
            out.push_str(&format!("(declare-const p{i} Bool)\n"));
        }
        for c in &self.clauses {
            let lits: Vec<String> = c
                .iter()
                .map(|&(v, pos)| if pos { format!("p{v}") } else { format!("(not p{v})") })
                .collect();
            match lits.len() {
                0 => out.push_str("(assert false)\n"),
                1 => out.push_str(&format!("(assert {})\n", lits[0])),
                _ => out.push_str(&format!("(assert (or {}))\n", lits.join(" "))),
            }
        }
        out
    }

    /// Clauses over the interned literals, for unit propagation.
    pub fn clause_view(&self) -> Vec<Clause> {
        self.clauses
            .iter()
            .map(|c| Clause::new(c.iter().map(|&(v, pos)| lit(v, pos))))
            .collect()
    }

    pub fn satisfied_by(&self, assignment: u32) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&(v, pos)| (assignment >> v & 1 == 1) == pos))
    }

    pub fn models(&self) -> Vec<u32> {
        (0..1u32 << self.atoms).filter(|&m| self.satisfied_by(m)).collect()
    }
}

pub fn clause_holds(c: &Clause, assignment: u32) -> bool {
    c.lits()
        .iter()
        .any(|l| (assignment >> l.atom().0 & 1 == 1) == l.is_positive())
}

/// All clauses over `n` atoms whose complement lies in `abducibles`, without
/// complementary pairs.
pub fn all_clauses(n: usize, abducibles: &[Lit]) -> Vec<Clause> {
    let allowed: BTreeSet<Lit> = abducibles.iter().map(|l| l.complement()).collect();
    let mut out = Vec::new();
    for code in 0..3usize.pow(n as u32) {
        let mut c = Vec::new();
        let mut k = code;
        let mut ok = true;
        for v in 0..n {
            match k % 3 {
                1 => c.push(lit(v, true)),
                2 => c.push(lit(v, false)),
                _ => {}
            }
            k /= 3;
        }
        for l in &c {
            if !allowed.contains(l) {
                ok = false;
            }
        }
        if ok {
            out.push(Clause::new(c));
        }
    }
    out
}

/// Prime implicates by enumeration: every clause over the abducibles true in
/// all models, keeping only those with no implicate strictly inside. For
/// propositional non-tautological clauses entailment is inclusion.
pub fn brute_force_primes(cnf: &Cnf, abducibles: &[Lit]) -> BTreeSet<Clause> {
    let models = cnf.models();
    let implicates: Vec<Clause> = all_clauses(cnf.atoms, abducibles)
        .into_iter()
        .filter(|c| models.iter().all(|&m| clause_holds(c, m)))
        .collect();
    implicates
        .iter()
        .filter(|d| !implicates.iter().any(|c| c != *d && c.is_subset_of(d)))
        .cloned()
        .collect()
}

pub fn all_literals(n: usize) -> Vec<Lit> {
    (0..n).flat_map(|v| [lit(v, true), lit(v, false)]).collect()
}

pub struct Fixture {
    pub problem: Problem,
    pub table: Arc<LiteralTable>,
    pub main: PropositionalSession,
    pub bare: PropositionalSession,
}

/// Problem text with atoms `p0 …` interned so `AtomId(i)` is `pi`.
pub fn fixture_from_text(text: &str, atoms: &[String]) -> Fixture {
    let problem = Problem::parse(text).expect("test problem parses");
    let mut table = LiteralTable::new();
    for a in atoms {
        table.intern(&SExpr::parse(a).expect("atom parses"));
    }
    let table = Arc::new(table);
    let main = PropositionalSession::open(&problem, table.clone(), true).expect("open main");
    let bare = PropositionalSession::open(&problem, table.clone(), false).expect("open bare");
    Fixture { problem, table, main, bare }
}

pub fn fixture(cnf: &Cnf) -> Fixture {
    let atoms: Vec<String> = (0..cnf.atoms).map(|i| format!("p{i}")).collect();
    fixture_from_text(&cnf.smt2(), &atoms)
}

pub fn abducibles(lits: Vec<Lit>) -> AbducibleSet {
    AbducibleSet::new(lits, Origin::UserSupplied)
}

/// Every clause in `clauses` follows from `S`: `S ∪ ¬C` has no model.
pub fn audit(cnf: &Cnf, clauses: &[Clause]) -> usize {
    let models = cnf.models();
    clauses.iter().filter(|c| !models.iter().all(|&m| clause_holds(c, m))).count()
}

/// Same check through a fresh oracle session on `S`.
pub fn audit_with_oracle(main: &mut dyn Oracle, clauses: &[Clause]) -> usize {
    clauses
        .iter()
        .filter(|c| {
            let neg: Vec<Lit> = c.lits().iter().map(|l| l.complement()).collect();
            pimt_core::oracle::check_with(main, &neg).unwrap()
                != pimt_core::oracle::SatStatus::Unsat
        })
        .count()
}

/// Boolean formulas over a few base variables, used as compound atoms so
/// that entailment between literals is semantic rather than syntactic.
#[derive(Clone, Debug)]
pub enum Formula {
    Var(usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn random(rng: &mut TestRng, vars: usize, depth: usize) -> Formula {
        if depth == 0 || rng.gen_bool(0.3) {
            return Formula::Var(rng.gen_range(0..vars));
        }
        match rng.gen_range(0..3) {
            0 => Formula::Not(Box::new(Formula::random(rng, vars, depth - 1))),
            1 => Formula::And(
                Box::new(Formula::random(rng, vars, depth - 1)),
                Box::new(Formula::random(rng, vars, depth - 1)),
            ),
            _ => Formula::Or(
                Box::new(Formula::random(rng, vars, depth - 1)),
                Box::new(Formula::random(rng, vars, depth - 1)),
            ),
        }
    }

    pub fn text(&self) -> String {
        match self {
            Formula::Var(i) => format!("x{i}"),
            Formula::Not(f) => format!("(not {})", f.text()),
            Formula::And(a, b) => format!("(and {} {})", a.text(), b.text()),
            Formula::Or(a, b) => format!("(or {} {})", a.text(), b.text()),
        }
    }

    pub fn eval(&self, assignment: u32) -> bool {
        match self {
            Formula::Var(i) => assignment >> i & 1 == 1,
            Formula::Not(f) => !f.eval(assignment),
            Formula::And(a, b) => a.eval(assignment) && b.eval(assignment),
            Formula::Or(a, b) => a.eval(assignment) || b.eval(assignment),
        }
    }
}

/// Literals over compound atoms, with truth tables over the base variables.
pub struct CompoundPool {
    pub vars: usize,
    /// Truth table of each positive atom, bit `a` set when true under `a`.
    pub tables: Vec<u64>,
    pub fixture: Fixture,
}

impl CompoundPool {
    pub fn random(rng: &mut TestRng, vars: usize, atoms: usize) -> CompoundPool {
        let mut texts: Vec<String> = Vec::new();
        let mut formulas = Vec::new();
        while texts.len() < atoms {
            let f = Formula::random(rng, vars, 2);
            // atoms are stored without a leading negation
            if matches!(f, Formula::Not(_)) {
                continue;
            }
            let t = f.text();
            if !texts.contains(&t) {
                texts.push(t);
                formulas.push(f);
            }
        }
        let mut smt = String::from("(set-logic QF_UF)\n");
        for i in 0..vars {
            smt.push_str(&format!("(declare-const x{i} Bool)\n"));
        }
        let tables = formulas
            .iter()
            .map(|f| (0..1u32 << vars).filter(|&a| f.eval(a)).fold(0u64, |t, a| t | 1 << a))
            .collect();
        CompoundPool { vars, tables, fixture: fixture_from_text(&smt, &texts) }
    }

    pub fn all(&self) -> u64 {
        (1u64 << (1u32 << self.vars)) - 1
    }

    pub fn lit_table(&self, l: Lit) -> u64 {
        let t = self.tables[l.atom().0 as usize];
        if l.is_positive() {
            t
        } else {
            !t & self.all()
        }
    }

    pub fn clause_table(&self, c: &Clause) -> u64 {
        c.lits().iter().fold(0, |t, &l| t | self.lit_table(l))
    }

    pub fn conj_table(&self, lits: &[Lit]) -> u64 {
        lits.iter().fold(self.all(), |t, &l| t & self.lit_table(l))
    }

    pub fn clause_entails(&self, c: &Clause, d: &Clause) -> bool {
        self.clause_table(c) & !self.clause_table(d) == 0
    }

    pub fn conj_entails(&self, phi: &[Lit], d: &Clause) -> bool {
        self.conj_table(phi) & !self.clause_table(d) == 0
    }

    pub fn literals(&self) -> Vec<Lit> {
        all_literals(self.tables.len())
    }
}

pub fn random_clause(rng: &mut TestRng, lits: &[Lit], max_len: usize) -> Clause {
    let len = rng.gen_range(0..=max_len);
    let mut chosen = Vec::new();
    for _ in 0..len {
        let l = *lits.choose(rng).unwrap();
        if !chosen.contains(&l.complement()) {
            chosen.push(l);
        }
    }
    Clause::new(chosen)
}

/// A random tree over `lits`, possibly with empty maps below the root.
pub fn random_tree(rng: &mut TestRng, lits: &[Lit], depth: usize) -> ATree {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.7) { ATree::Bot } else { ATree::empty() };
    }
    let mut children = std::collections::BTreeMap::new();
    let mut rest: Vec<Lit> = lits.to_vec();
    rest.shuffle(rng);
    let width = rng.gen_range(0..=3.min(rest.len()));
    let mut sorted: Vec<Lit> = rest[..width].to_vec();
    sorted.sort();
    for l in sorted {
        let above: Vec<Lit> = lits.iter().copied().filter(|&x| x > l).collect();
        children.insert(l, random_tree(rng, &above, depth - 1));
    }
    ATree::Node(children)
}
