//! The per-node building blocks of the search.

use std::collections::BTreeSet;

use crate::abducibles::AbducibleSet;
use crate::logic::{Clause, Lit};
use crate::oracle::{check_with, Oracle, OracleError, SatResult, SatStatus};

/// How candidate hypotheses are pruned once `M` is fixed.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum FixMode {
    /// Drop members of `M` and complements of members of `M`.
    #[default]
    Complement,
    /// Also drop `l` when `M ⊨ ¬l` or `S ∪ M ⊨ l`, as far as the oracle can tell.
    Entailment,
}

/// Prunes the candidate list `a` for hypotheses `m`. For [`FixMode::Entailment`]
/// `main` must hold `S` with `m` asserted and `bare` the theory alone.
pub fn fix(
    a: &[Lit],
    m: &[Lit],
    mode: FixMode,
    main: &mut dyn Oracle,
    bare: &mut dyn Oracle,
) -> Result<Vec<Lit>, OracleError> {
    let mut out = Vec::with_capacity(a.len());
    for &l in a {
        if m.contains(&l) || m.contains(&l.complement()) {
            continue;
        }
        if mode == FixMode::Entailment {
            let mut with_l = m.to_vec();
            with_l.push(l);
            if check_with(bare, &with_l)? == SatStatus::Unsat {
                continue;
            }
            if check_with(main, &[l.complement()])? == SatStatus::Unsat {
                continue;
            }
        }
        out.push(l);
    }
    Ok(out)
}

/// The set `I` consulted when choosing which hypotheses to branch on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibleSet {
    pub source: CompatibleSource,
    members: BTreeSet<Lit>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CompatibleSource {
    Model,
    Full,
}

impl CompatibleSet {
    /// The complements of all abducibles: every hypothesis stays a branch.
    pub fn full(abducibles: &AbducibleSet) -> Self {
        CompatibleSet {
            source: CompatibleSource::Full,
            members: abducibles.members().iter().map(|l| l.complement()).collect(),
        }
    }

    pub fn from_literals(lits: impl IntoIterator<Item = Lit>) -> Self {
        CompatibleSet { source: CompatibleSource::Model, members: lits.into_iter().collect() }
    }

    pub fn contains(&self, l: Lit) -> bool {
        self.members.contains(&l)
    }

    pub fn members(&self) -> impl Iterator<Item = Lit> + '_ {
        self.members.iter().copied()
    }
}

/// Reads `I` off a satisfiable check. Literals over abducible atoms true in
/// the model are members; an abducible the model leaves open contributes its
/// complement. Without a model every complement of an abducible is a member.
pub fn compatible_from_model(res: &SatResult, abducibles: &AbducibleSet) -> CompatibleSet {
    let Some(model) = &res.model else {
        return CompatibleSet::full(abducibles);
    };
    let mut members: BTreeSet<Lit> = model.iter().copied().collect();
    for &l in abducibles.members() {
        if !members.contains(&l) && !members.contains(&l.complement()) {
            members.insert(l.complement());
        }
    }
    CompatibleSet { source: CompatibleSource::Model, members }
}

/// `A[l]^I`: the candidates after `l`, plus those before `l` whose
/// complement is outside `I`. `a` must be in abducible order and contain `l`.
pub fn candidates_after(a: &[Lit], l: Lit, i: &CompatibleSet) -> Vec<Lit> {
    let pos = a.iter().position(|&x| x == l).expect("branch literal is a candidate");
    a[..pos]
        .iter()
        .copied()
        .filter(|x| !i.contains(x.complement()))
        .chain(a[pos + 1..].iter().copied())
        .collect()
}

/// `{¬M ∨ ¬l | l ∈ A, ¬l ∈ U}`.
pub fn uprop(u: &[Lit], a: &[Lit], m: &[Lit]) -> Vec<Clause> {
    a.iter()
        .filter(|l| u.contains(&l.complement()))
        .map(|&l| {
            let mut lits: Vec<Lit> = m.iter().map(|x| x.complement()).collect();
            lits.push(l.complement());
            Clause::new(lits)
        })
        .collect()
}

/// Literals forced by unit propagation over `clauses` from the assignment
/// `m`, `m` itself included. Returns `None` on a conflict.
pub fn unit_consequences(clauses: &[Clause], m: &[Lit]) -> Option<Vec<Lit>> {
    let mut assigned: BTreeSet<Lit> = m.iter().copied().collect();
    loop {
        let mut changed = false;
        for c in clauses {
            if c.lits().iter().any(|l| assigned.contains(l)) {
                continue;
            }
            let mut open = c.lits().iter().filter(|l| !assigned.contains(&l.complement()));
            match (open.next(), open.next()) {
                (None, _) => return None,
                (Some(&l), None) => {
                    assigned.insert(l);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    let mut out: Vec<Lit> = m.to_vec();
    out.extend(assigned.into_iter().filter(|l| !m.contains(l)));
    Some(out)
}
