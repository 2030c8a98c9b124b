//! Trie storage for implicates with redundancy elimination modulo the theory.
//!
//! An [`ATree`] is either `⊥` or a map from literals to subtrees; the clauses
//! it stores are the root-to-`⊥` paths. Literals along a path increase in a
//! fixed order ([`LitOrder`]), so clauses sharing a prefix share a path.
//!
//! Forward subsumption (is a new clause entailed by a stored one?) walks the
//! tree with one entailment query per visited edge. Backward subsumption
//! (drop stored clauses entailed by a new one) descends while asserting the
//! complements of path literals, so every query is shared by all clauses
//! below the node it is issued at.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::abducibles::AbducibleSet;
use crate::engine::ImplicateSink;
use crate::logic::{Clause, Lit, LiteralTable};
use crate::oracle::{is_tautology, Entailment, Oracle, OracleError, SatStatus};

/// Total order on literals used along tree paths.
#[derive(Clone, Debug, Default)]
pub struct LitOrder {
    rank: Vec<u32>,
}

impl LitOrder {
    /// Plain literal-id order.
    pub fn by_id() -> Self {
        LitOrder { rank: Vec::new() }
    }

    /// The abducible order; other literals come after all members, by id.
    pub fn from_abducibles(set: &AbducibleSet) -> Self {
        let mut rank = Vec::new();
        for (i, &l) in set.members().iter().enumerate() {
            if rank.len() <= l.index() {
                rank.resize(l.index() + 1, u32::MAX);
            }
            rank[l.index()] = i as u32;
        }
        LitOrder { rank }
    }

    pub fn key(&self, l: Lit) -> (u32, Lit) {
        (self.rank.get(l.index()).copied().unwrap_or(u32::MAX), l)
    }

    pub fn less(&self, a: Lit, b: Lit) -> bool {
        self.key(a) < self.key(b)
    }

    pub fn sorted(&self, clause: &Clause) -> Vec<Lit> {
        let mut lits = clause.lits().to_vec();
        lits.sort_by_key(|&l| self.key(l));
        lits
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ATree {
    Bot,
    Node(BTreeMap<Lit, ATree>),
}

impl Default for ATree {
    fn default() -> Self {
        ATree::empty()
    }
}

impl ATree {
    /// The tree storing no clause.
    pub fn empty() -> Self {
        ATree::Node(BTreeMap::new())
    }

    pub fn is_empty_node(&self) -> bool {
        matches!(self, ATree::Node(c) if c.is_empty())
    }

    /// Number of nodes, `⊥` leaves included.
    pub fn size(&self) -> usize {
        match self {
            ATree::Bot => 1,
            ATree::Node(c) => 1 + c.values().map(ATree::size).sum::<usize>(),
        }
    }

    /// The stored clauses.
    pub fn clause_set(&self) -> BTreeSet<Clause> {
        let mut out = BTreeSet::new();
        self.collect(&mut Vec::new(), &mut out);
        out
    }

    fn collect(&self, prefix: &mut Vec<Lit>, out: &mut BTreeSet<Clause>) {
        match self {
            ATree::Bot => {
                out.insert(Clause::new(prefix.iter().copied()));
            }
            ATree::Node(children) => {
                for (&l, child) in children {
                    prefix.push(l);
                    child.collect(prefix, out);
                    prefix.pop();
                }
            }
        }
    }

    /// Sibling literals are distinct by construction; this checks that every
    /// literal below an edge is strictly greater than the edge literal.
    pub fn is_well_formed(&self, order: &LitOrder) -> bool {
        fn min_ok(t: &ATree, bound: Option<Lit>, order: &LitOrder) -> bool {
            match t {
                ATree::Bot => true,
                ATree::Node(children) => children.iter().all(|(&l, child)| {
                    bound.is_none_or(|b| order.less(b, l)) && min_ok(child, Some(l), order)
                }),
            }
        }
        min_ok(self, None, order)
    }

    /// No empty map below the root.
    pub fn is_simp_normal(&self) -> bool {
        fn inner(t: &ATree) -> bool {
            match t {
                ATree::Bot => true,
                ATree::Node(c) => !c.is_empty() && c.values().all(inner),
            }
        }
        match self {
            ATree::Bot => true,
            ATree::Node(c) => c.values().all(inner),
        }
    }

    /// Removes `l:∅` pairs at every depth until none is left.
    pub fn simp(self) -> ATree {
        self.simp_counted().0
    }

    /// [`ATree::simp`] together with the number of rule applications.
    pub fn simp_counted(self) -> (ATree, usize) {
        match self {
            ATree::Bot => (ATree::Bot, 0),
            ATree::Node(children) => {
                let mut steps = 0;
                let mut kept = BTreeMap::new();
                for (l, child) in children {
                    let (child, n) = child.simp_counted();
                    steps += n;
                    if child.is_empty_node() {
                        steps += 1;
                    } else {
                        kept.insert(l, child);
                    }
                }
                (ATree::Node(kept), steps)
            }
        }
    }

    /// Adds a clause along its `order`-sorted path. A clause extending a stored
    /// clause is already represented by it and leaves the tree unchanged; a
    /// clause that is a prefix of stored clauses replaces them, since a path
    /// ends at `⊥`.
    pub fn insert(&mut self, clause: &Clause, order: &LitOrder) {
        let lits = order.sorted(clause);
        let mut node = self;
        for l in lits {
            match node {
                ATree::Bot => return,
                ATree::Node(children) => {
                    node = children.entry(l).or_insert_with(ATree::empty);
                }
            }
        }
        *node = ATree::Bot;
    }

    /// Whether some stored clause entails `clause`. `oracle` must be a bare
    /// session; it is left as it was found.
    pub fn forward_subsumed(
        &self,
        clause: &Clause,
        oracle: &mut dyn Oracle,
    ) -> Result<bool, OracleError> {
        if self.is_empty_node() {
            return Ok(false);
        }
        let negated: Vec<Lit> = clause.lits().iter().map(|l| l.complement()).collect();
        oracle.assert_scoped(&negated)?;
        let result = self.forward_rec(clause, oracle);
        oracle.retract_scope()?;
        result
    }

    fn forward_rec(&self, clause: &Clause, oracle: &mut dyn Oracle) -> Result<bool, OracleError> {
        match self {
            ATree::Bot => Ok(true),
            ATree::Node(children) => {
                for (&l, child) in children {
                    let edge_entails = if clause.contains(l) {
                        true
                    } else {
                        oracle.assert_scoped(&[l])?;
                        let status = oracle.check_status();
                        oracle.retract_scope()?;
                        // unknown: assume l does not entail the clause
                        status? == SatStatus::Unsat
                    };
                    if edge_entails && child.forward_rec(clause, oracle)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    /// Drops the stored clauses entailed by the conjunction `phi`, then
    /// normalizes with [`ATree::simp`]. `oracle` must be a bare session.
    pub fn remove_subsumed(self, phi: &[Lit], oracle: &mut dyn Oracle) -> Result<ATree, OracleError> {
        Ok(self.remove_subsumed_tracked(phi, oracle, &mut Vec::new())?.0)
    }

    /// [`ATree::remove_subsumed`], also reporting the removed clauses.
    pub fn remove_subsumed_tracked(
        self,
        phi: &[Lit],
        oracle: &mut dyn Oracle,
        removed: &mut Vec<Clause>,
    ) -> Result<(ATree, usize), OracleError> {
        oracle.assert_scoped(phi)?;
        let mut checks = 0;
        let result = self.rm_rec(oracle, &mut Vec::new(), removed, &mut checks);
        oracle.retract_scope()?;
        Ok((result?.simp(), checks))
    }

    fn rm_rec(
        self,
        oracle: &mut dyn Oracle,
        path: &mut Vec<Lit>,
        removed: &mut Vec<Clause>,
        checks: &mut usize,
    ) -> Result<ATree, OracleError> {
        *checks += 1;
        if oracle.check_status()? == SatStatus::Unsat {
            self.drain_into(path, removed);
            return Ok(ATree::empty());
        }
        match self {
            ATree::Bot => Ok(ATree::Bot),
            ATree::Node(children) => {
                let mut out = BTreeMap::new();
                for (l, child) in children {
                    oracle.assert_scoped(&[l.complement()])?;
                    path.push(l);
                    let sub = child.rm_rec(oracle, path, removed, checks);
                    path.pop();
                    oracle.retract_scope()?;
                    out.insert(l, sub?);
                }
                Ok(ATree::Node(out))
            }
        }
    }

    /// Drops the stored clauses entailed by the clause `c`, i.e. those
    /// entailed by every literal of `c` separately. Literals of `c` that
    /// already entail everything below a node are not re-queried deeper.
    pub fn remove_entailed_by_clause(
        self,
        c: &Clause,
        oracle: &mut dyn Oracle,
        removed: &mut Vec<Clause>,
    ) -> Result<ATree, OracleError> {
        let alive: Vec<Lit> = c.lits().to_vec();
        Ok(self.rm_clause_rec(&alive, oracle, &mut Vec::new(), removed)?.simp())
    }

    fn rm_clause_rec(
        self,
        alive: &[Lit],
        oracle: &mut dyn Oracle,
        path: &mut Vec<Lit>,
        removed: &mut Vec<Clause>,
    ) -> Result<ATree, OracleError> {
        let mut still = Vec::with_capacity(alive.len());
        for &l in alive {
            oracle.assert_scoped(&[l])?;
            let status = oracle.check_status();
            oracle.retract_scope()?;
            if status? != SatStatus::Unsat {
                still.push(l);
            }
        }
        if still.is_empty() {
            self.drain_into(path, removed);
            return Ok(ATree::empty());
        }
        match self {
            ATree::Bot => Ok(ATree::Bot),
            ATree::Node(children) => {
                let mut out = BTreeMap::new();
                for (l, child) in children {
                    oracle.assert_scoped(&[l.complement()])?;
                    path.push(l);
                    let sub = child.rm_clause_rec(&still, oracle, path, removed);
                    path.pop();
                    oracle.retract_scope()?;
                    out.insert(l, sub?);
                }
                Ok(ATree::Node(out))
            }
        }
    }

    fn drain_into(&self, path: &mut Vec<Lit>, removed: &mut Vec<Clause>) {
        let mut set = BTreeSet::new();
        self.collect(path, &mut set);
        removed.extend(set);
    }

    /// Indented edge listing, one literal per line.
    pub fn debug_dump(&self, table: &LiteralTable) -> String {
        fn rec(t: &ATree, depth: usize, table: &LiteralTable, out: &mut String) {
            if let ATree::Node(children) = t {
                for (&l, child) in children {
                    let mark = if matches!(child, ATree::Bot) { "  ⊥" } else { "" };
                    let _ = writeln!(out, "{}{}{}", "  ".repeat(depth), table.lit_text(l), mark);
                    rec(child, depth + 1, table, out);
                }
            }
        }
        let mut out = String::new();
        match self {
            ATree::Bot => out.push_str("⊥\n"),
            t => rec(t, 0, table, &mut out),
        }
        out
    }
}

/// Why [`ImplicateStore::add_minimal`] turned a clause away.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Rejection {
    Tautology,
    Subsumed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AddOutcome {
    pub rejected: Option<Rejection>,
    /// Stored clauses dropped because the new clause entails them.
    pub removed: Vec<Clause>,
}

impl AddOutcome {
    pub fn accepted(&self) -> bool {
        self.rejected.is_none()
    }
}

/// An [`ATree`] kept free of tautologies and of clauses entailed by other
/// stored clauses, as far as the oracle can tell.
#[derive(Clone, Debug, Default)]
pub struct ImplicateStore {
    tree: ATree,
    order: LitOrder,
}

impl ImplicateStore {
    pub fn new(order: LitOrder) -> Self {
        ImplicateStore { tree: ATree::empty(), order }
    }

    pub fn tree(&self) -> &ATree {
        &self.tree
    }

    pub fn order(&self) -> &LitOrder {
        &self.order
    }

    /// Stored clauses in clause order.
    pub fn clauses(&self) -> Vec<Clause> {
        self.tree.clause_set().into_iter().collect()
    }

    pub fn len(&self) -> usize {
        self.tree.clause_set().len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty_node()
    }

    /// Inserts `clause` unless it is a tautology or entailed by a stored
    /// clause; stored clauses it entails are removed first. `oracle` must be
    /// a bare session.
    pub fn add_minimal(
        &mut self,
        clause: &Clause,
        oracle: &mut dyn Oracle,
    ) -> Result<AddOutcome, OracleError> {
        if is_tautology(oracle, clause)? == Entailment::Yes {
            return Ok(AddOutcome { rejected: Some(Rejection::Tautology), removed: Vec::new() });
        }
        if self.tree.forward_subsumed(clause, oracle)? {
            return Ok(AddOutcome { rejected: Some(Rejection::Subsumed), removed: Vec::new() });
        }
        let mut removed = Vec::new();
        let tree = std::mem::take(&mut self.tree);
        self.tree = tree.remove_entailed_by_clause(clause, oracle, &mut removed)?;
        self.tree.insert(clause, &self.order);
        Ok(AddOutcome { rejected: None, removed })
    }

    /// One clause per line in clause order.
    pub fn dump(&self, table: &LiteralTable) -> String {
        let mut out = String::new();
        for c in self.clauses() {
            out.push_str(&table.clause_text(&c));
            out.push('\n');
        }
        out
    }
}

impl ImplicateSink for ImplicateStore {
    fn accept(&mut self, clause: &Clause, bare: &mut dyn Oracle) -> Result<bool, OracleError> {
        Ok(self.add_minimal(clause, bare)?.accepted())
    }
}
