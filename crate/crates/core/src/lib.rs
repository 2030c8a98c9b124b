//! Prime implicates over abducible literals, relative to a background theory.
//!
//! Given a quantifier-free problem `S` and a finite set of abducible
//! literals, the engine enumerates the clauses `C` with `S ⊨ C` whose negated
//! literals are all abducibles, keeping only the most general ones. Any
//! satisfiability oracle can be plugged in; generated implicates are kept in
//! a trie-based store that removes redundancy modulo the theory.

pub mod abducibles;
pub mod clock;
pub mod engine;
pub mod logic;
pub mod oracle;
pub mod problem;
pub mod sexp;
pub mod store;

pub use logic::{Clause, Lit, LiteralTable, Signature};
pub use problem::Problem;
pub use sexp::SExpr;
