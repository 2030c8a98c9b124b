use std::collections::BTreeSet;

use crate::logic::Clause;
use crate::oracle::{clause_entails, is_tautology, Entailment, Oracle, OracleError};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Minimized {
    /// Surviving clauses in clause order.
    pub clauses: Vec<Clause>,
    /// Entailment questions the oracle could not settle. Each one kept a
    /// clause that might be redundant.
    pub unresolved: usize,
}

/// Deletes tautologies, then every `D` for which another clause `C` has
/// `C ⊨ D` and either `D ⊭ C` or `C ≺ D`. All deletions are judged against
/// the tautology-free input, so the outcome does not depend on input order.
/// `bare` must hold the theory only.
pub fn submin(
    clauses: impl IntoIterator<Item = Clause>,
    bare: &mut dyn Oracle,
) -> Result<Minimized, OracleError> {
    let unique: BTreeSet<Clause> = clauses.into_iter().collect();
    let mut unresolved = 0;
    let mut pool = Vec::with_capacity(unique.len());
    for c in unique {
        match is_tautology(bare, &c)? {
            Entailment::Yes => {}
            Entailment::No => pool.push(c),
            Entailment::Unknown => {
                unresolved += 1;
                pool.push(c);
            }
        }
    }
    let mut kept = Vec::with_capacity(pool.len());
    for (j, d) in pool.iter().enumerate() {
        let mut redundant = false;
        for (i, c) in pool.iter().enumerate() {
            if i == j {
                continue;
            }
            match clause_entails(bare, c, d)? {
                Entailment::No => continue,
                Entailment::Unknown => {
                    unresolved += 1;
                    continue;
                }
                Entailment::Yes => {}
            }
            // pool is sorted, so i < j means c ≺ d
            if i < j {
                redundant = true;
                break;
            }
            match clause_entails(bare, d, c)? {
                Entailment::No => {
                    redundant = true;
                    break;
                }
                Entailment::Unknown => unresolved += 1,
                Entailment::Yes => {}
            }
        }
        if !redundant {
            kept.push(d.clone());
        }
    }
    Ok(Minimized { clauses: kept, unresolved })
}
