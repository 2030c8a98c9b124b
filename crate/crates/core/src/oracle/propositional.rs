//! In-process oracle for purely Boolean problems.
//!
//! Terms are Tseitin-encoded into [`Dpll`] clauses on first use; every check
//! re-solves from scratch with the scoped literals as assumptions.

use std::collections::HashMap;
use std::sync::Arc;

use super::dpll::{Dpll, DpllLit};
use super::{Capabilities, Oracle, OracleError, OracleStats, SatStatus};
use crate::logic::{AtomId, Lit, LiteralTable, Signature, BOOL};
use crate::problem::Problem;
use crate::sexp::SExpr;

pub struct PropositionalSession {
    table: Arc<LiteralTable>,
    signature: Signature,
    solver: Dpll,
    true_var: DpllLit,
    encoded: HashMap<SExpr, DpllLit>,
    atom_lits: Vec<Option<DpllLit>>,
    frames: Vec<Vec<DpllLit>>,
    model_atoms: Vec<AtomId>,
    last_model: Option<Vec<bool>>,
    stats: OracleStats,
}

impl PropositionalSession {
    pub fn open(
        problem: &Problem,
        table: Arc<LiteralTable>,
        with_assertions: bool,
    ) -> Result<Self, OracleError> {
        let mut solver = Dpll::new();
        let true_var = solver.new_var();
        solver.add_clause(&[true_var]);
        let mut session = PropositionalSession {
            table,
            signature: problem.signature.clone(),
            solver,
            true_var,
            encoded: HashMap::new(),
            atom_lits: Vec::new(),
            frames: Vec::new(),
            model_atoms: Vec::new(),
            last_model: None,
            stats: OracleStats::default(),
        };
        if with_assertions {
            for a in &problem.assertions {
                let l = session.encode(a)?;
                session.solver.add_clause(&[l]);
            }
        }
        Ok(session)
    }

    fn atom_lit(&mut self, atom: AtomId) -> Result<DpllLit, OracleError> {
        let idx = atom.0 as usize;
        if let Some(Some(l)) = self.atom_lits.get(idx) {
            return Ok(*l);
        }
        let term = self.table.atom(atom).clone();
        let l = self.encode(&term)?;
        if self.atom_lits.len() <= idx {
            self.atom_lits.resize(idx + 1, None);
        }
        self.atom_lits[idx] = Some(l);
        Ok(l)
    }

    fn lit(&mut self, lit: Lit) -> Result<DpllLit, OracleError> {
        let a = self.atom_lit(lit.atom())?;
        Ok(if lit.is_positive() { a } else { -a })
    }

    fn encode(&mut self, term: &SExpr) -> Result<DpllLit, OracleError> {
        let expanded = expand_lets(term, &HashMap::new());
        self.encode_closed(&expanded)
    }

    fn define(&mut self, clauses: impl FnOnce(DpllLit) -> Vec<Vec<DpllLit>>) -> DpllLit {
        let v = self.solver.new_var();
        for c in clauses(v) {
            self.solver.add_clause(&c);
        }
        v
    }

    fn and(&mut self, xs: Vec<DpllLit>) -> DpllLit {
        self.define(|v| {
            let mut cs: Vec<Vec<DpllLit>> = xs.iter().map(|&x| vec![-v, x]).collect();
            let mut big: Vec<DpllLit> = xs.iter().map(|&x| -x).collect();
            big.push(v);
            cs.push(big);
            cs
        })
    }

    fn or(&mut self, xs: Vec<DpllLit>) -> DpllLit {
        let negated = xs.into_iter().map(|x| -x).collect();
        -self.and(negated)
    }

    fn iff(&mut self, a: DpllLit, b: DpllLit) -> DpllLit {
        self.define(|v| vec![vec![-v, -a, b], vec![-v, a, -b], vec![v, a, b], vec![v, -a, -b]])
    }

    fn ite(&mut self, c: DpllLit, a: DpllLit, b: DpllLit) -> DpllLit {
        self.define(|v| vec![vec![-v, -c, a], vec![-v, c, b], vec![v, -c, -a], vec![v, c, -b]])
    }

    fn encode_closed(&mut self, term: &SExpr) -> Result<DpllLit, OracleError> {
        if let Some(&l) = self.encoded.get(term) {
            return Ok(l);
        }
        let unsupported = || OracleError::Unsupported(format!("non-Boolean term `{term}`"));
        let l = match term {
            SExpr::Atom(a) if a == "true" => self.true_var,
            SExpr::Atom(a) if a == "false" => -self.true_var,
            SExpr::Atom(a) => {
                let sym = self.signature.symbol(a).ok_or_else(unsupported)?;
                if !sym.is_constant() || sym.result != BOOL {
                    return Err(unsupported());
                }
                self.solver.new_var()
            }
            SExpr::List(items) => {
                let head = items.first().and_then(SExpr::as_atom).ok_or_else(unsupported)?;
                let args: Vec<DpllLit> = items[1..]
                    .iter()
                    .map(|a| self.encode_closed(a))
                    .collect::<Result<_, _>>()?;
                match (head, args.len()) {
                    ("not", 1) => -args[0],
                    ("and", n) if n > 0 => self.and(args),
                    ("or", n) if n > 0 => self.or(args),
                    ("=>", n) if n >= 2 => {
                        let mut acc = args[n - 1];
                        for &a in args[..n - 1].iter().rev() {
                            acc = self.or(vec![-a, acc]);
                        }
                        acc
                    }
                    ("xor", n) if n >= 2 => {
                        let mut acc = args[0];
                        for &a in &args[1..] {
                            acc = -self.iff(acc, a);
                        }
                        acc
                    }
                    ("=", n) if n >= 2 => {
                        let pairs: Vec<(DpllLit, DpllLit)> =
                            args.windows(2).map(|w| (w[0], w[1])).collect();
                        let links: Vec<DpllLit> =
                            pairs.into_iter().map(|(a, b)| self.iff(a, b)).collect();
                        if links.len() == 1 { links[0] } else { self.and(links) }
                    }
                    ("distinct", n) if n >= 2 => {
                        let mut diffs = Vec::new();
                        for i in 0..n {
                            for j in i + 1..n {
                                diffs.push(-self.iff(args[i], args[j]));
                            }
                        }
                        if diffs.len() == 1 { diffs[0] } else { self.and(diffs) }
                    }
                    ("ite", 3) => self.ite(args[0], args[1], args[2]),
                    _ => return Err(unsupported()),
                }
            }
        };
        self.encoded.insert(term.clone(), l);
        Ok(l)
    }
}

/// Substitutes `let` bindings away.
fn expand_lets(term: &SExpr, env: &HashMap<String, SExpr>) -> SExpr {
    match term {
        SExpr::Atom(a) => env.get(a).cloned().unwrap_or_else(|| term.clone()),
        SExpr::List(items) => {
            if items.len() == 3 && items[0].is_atom("let") {
                if let Some(bindings) = items[1].as_list() {
                    let mut inner = env.clone();
                    for b in bindings {
                        if let Some([SExpr::Atom(name), value]) = b.as_list() {
                            inner.insert(name.clone(), expand_lets(value, env));
                        }
                    }
                    return expand_lets(&items[2], &inner);
                }
            }
            SExpr::List(items.iter().map(|i| expand_lets(i, env)).collect())
        }
    }
}

impl Oracle for PropositionalSession {
    fn assert_scoped(&mut self, lits: &[Lit]) -> Result<(), OracleError> {
        let frame = lits.iter().map(|&l| self.lit(l)).collect::<Result<Vec<_>, _>>()?;
        self.frames.push(frame);
        self.stats.pushes += 1;
        Ok(())
    }

    fn retract_scope(&mut self) -> Result<(), OracleError> {
        self.frames.pop().map(|_| ()).ok_or(OracleError::NoScope)
    }

    fn check_status(&mut self) -> Result<SatStatus, OracleError> {
        self.stats.checks += 1;
        let assumptions: Vec<DpllLit> = self.frames.iter().flatten().copied().collect();
        self.last_model = self.solver.solve(&assumptions);
        Ok(if self.last_model.is_some() { SatStatus::Sat } else { SatStatus::Unsat })
    }

    fn model_literals(&mut self) -> Result<Option<Vec<Lit>>, OracleError> {
        let Some(model) = &self.last_model else {
            return Ok(None);
        };
        let mut out = Vec::with_capacity(self.model_atoms.len());
        for &atom in &self.model_atoms {
            let Some(Some(s)) = self.atom_lits.get(atom.0 as usize) else { continue };
            let var = s.unsigned_abs() as usize;
            if var >= model.len() {
                continue;
            }
            let value = model[var] == (*s > 0);
            out.push(Lit::new(atom, value));
        }
        Ok(Some(out))
    }

    fn set_model_atoms(&mut self, atoms: &[AtomId]) -> Result<(), OracleError> {
        for &a in atoms {
            self.atom_lit(a)?;
        }
        self.model_atoms = atoms.to_vec();
        Ok(())
    }

    fn depth(&self) -> usize {
        self.frames.len()
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities { supports_models: true, supports_unknown: false }
    }

    fn stats(&self) -> OracleStats {
        self.stats
    }
}
