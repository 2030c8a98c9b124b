//! Subset-closed filters on hypothesis sets.

use crate::logic::{Clause, Lit};
use crate::oracle::{entails, Entailment, Oracle, OracleError};

/// A predicate `P` on hypothesis sets such that `P(A)` and `B ⊆ A` imply
/// `P(B)`. Every constructor preserves the property, so a failing `P(M)`
/// prunes the whole subtree below `M`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum ResultPredicate {
    #[default]
    True,
    /// `|M| ≤ k`.
    SizeLimit(usize),
    /// `φ ⊨ M`, with `φ` a conjunction of literals.
    Implicant(Vec<Lit>),
    And(Vec<ResultPredicate>),
    Or(Vec<ResultPredicate>),
}

impl ResultPredicate {
    /// Evaluates `P(M)`. Implicant checks run on `bare`; an unknown answer
    /// counts as holding so no branch is lost.
    pub fn holds(&self, m: &[Lit], bare: &mut dyn Oracle) -> Result<bool, OracleError> {
        Ok(match self {
            ResultPredicate::True => true,
            ResultPredicate::SizeLimit(k) => m.len() <= *k,
            ResultPredicate::Implicant(phi) => {
                for &l in m {
                    if entails(bare, phi, &Clause::new([l]))? == Entailment::No {
                        return Ok(false);
                    }
                }
                true
            }
            ResultPredicate::And(ps) => {
                for p in ps {
                    if !p.holds(m, bare)? {
                        return Ok(false);
                    }
                }
                true
            }
            ResultPredicate::Or(ps) => {
                for p in ps {
                    if p.holds(m, bare)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }

    /// Whether evaluation never needs the oracle.
    pub fn is_syntactic(&self) -> bool {
        match self {
            ResultPredicate::True | ResultPredicate::SizeLimit(_) => true,
            ResultPredicate::Implicant(_) => false,
            ResultPredicate::And(ps) | ResultPredicate::Or(ps) => ps.iter().all(Self::is_syntactic),
        }
    }
}

/// Free-function form of [`ResultPredicate::holds`].
pub fn predicate_holds(
    p: &ResultPredicate,
    m: &[Lit],
    bare: &mut dyn Oracle,
) -> Result<bool, OracleError> {
    p.holds(m, bare)
}
