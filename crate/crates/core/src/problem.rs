//! Reading quantifier-free problems in SMT-LIB script syntax.

use thiserror::Error;

use crate::logic::{Signature, SignatureError, BOOL};
use crate::sexp::{ParseError, SExpr};

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("line {line}: {source}")]
    Signature { line: usize, source: SignatureError },
    #[error("line {line}: unsupported command `{command}`")]
    Unsupported { line: usize, command: String },
    #[error("line {line}: malformed command: {message}")]
    Malformed { line: usize, message: String },
}

/// A set of assertions over a declared signature.
#[derive(Clone, Debug, Default)]
pub struct Problem {
    pub signature: Signature,
    /// Sort and function declarations, in input order, as the solver must see them.
    pub declarations: Vec<SExpr>,
    pub assertions: Vec<SExpr>,
}

impl Problem {
    pub fn parse(text: &str) -> Result<Problem, ProblemError> {
        let mut problem = Problem { signature: Signature::new("ALL"), ..Default::default() };
        for (line, cmd) in SExpr::parse_all(text)? {
            let malformed = |message: &str| ProblemError::Malformed { line, message: message.into() };
            let items = cmd.as_list().ok_or_else(|| malformed("expected a command"))?;
            let head = items.first().and_then(SExpr::as_atom).ok_or_else(|| malformed("expected a command"))?;
            let sig_err = |source| ProblemError::Signature { line, source };
            match head {
                "set-logic" => {
                    let tag = items.get(1).and_then(SExpr::as_atom).ok_or_else(|| malformed("set-logic needs a tag"))?;
                    problem.signature.logic = tag.to_string();
                }
                "declare-sort" => {
                    let name = items.get(1).and_then(SExpr::as_atom).ok_or_else(|| malformed("declare-sort needs a name"))?;
                    let arity = items.get(2).and_then(SExpr::as_atom).unwrap_or("0");
                    if arity != "0" {
                        return Err(ProblemError::Unsupported { line, command: "declare-sort with arity".into() });
                    }
                    problem.signature.declare_sort(name).map_err(sig_err)?;
                    problem.declarations.push(cmd.clone());
                }
                "declare-fun" | "declare-const" => {
                    let name = items.get(1).and_then(SExpr::as_atom).ok_or_else(|| malformed("missing symbol name"))?;
                    let (args, result) = if head == "declare-fun" {
                        if items.len() != 4 {
                            return Err(malformed("declare-fun takes a name, argument sorts and a result sort"));
                        }
                        let args = items[2].as_list().ok_or_else(|| malformed("argument sorts must be a list"))?;
                        (args.iter().map(|s| s.to_string()).collect(), items[3].to_string())
                    } else {
                        if items.len() != 3 {
                            return Err(malformed("declare-const takes a name and a sort"));
                        }
                        (Vec::new(), items[2].to_string())
                    };
                    problem.signature.declare_fun(name, args, result).map_err(sig_err)?;
                    problem.declarations.push(cmd.clone());
                }
                "assert" => {
                    if items.len() != 2 {
                        return Err(malformed("assert takes one term"));
                    }
                    let term = &items[1];
                    if let Some(sort) = problem.signature.sort_of(term) {
                        if sort != BOOL {
                            return Err(malformed(&format!("asserted term has sort {sort}")));
                        }
                    }
                    problem.assertions.push(term.clone());
                }
                "set-info" | "set-option" | "check-sat" | "exit" | "get-model" | "get-value"
                | "get-info" | "get-assertions" | "echo" | "get-unsat-core" => {}
                other => {
                    return Err(ProblemError::Unsupported { line, command: other.to_string() });
                }
            }
        }
        Ok(problem)
    }

    pub fn logic(&self) -> &str {
        &self.signature.logic
    }

    /// Ground terms occurring in the assertions, each once, in first-occurrence
    /// order (subterms before the terms containing them).
    pub fn ground_subterms(&self) -> Vec<SExpr> {
        fn walk(t: &SExpr, out: &mut Vec<SExpr>) {
            if let SExpr::List(items) = t {
                if matches!(items.first().and_then(SExpr::as_atom), Some("let" | "forall" | "exists" | "!")) {
                    return;
                }
                for a in &items[1..] {
                    walk(a, out);
                }
            }
            if !out.contains(t) {
                out.push(t.clone());
            }
        }
        let mut out = Vec::new();
        for a in &self.assertions {
            walk(a, &mut out);
        }
        out
    }
}
