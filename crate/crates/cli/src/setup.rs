//! Loading a problem, building its abducibles and opening oracle sessions.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use pimt_core::abducibles::{self, AbducibleSet, GenerateOptions};
use pimt_core::oracle::{open_session, Backend, Oracle};
use pimt_core::{LiteralTable, Problem, SExpr};

#[derive(Clone, Debug)]
pub enum AbducibleSource {
    File(PathBuf),
    Generate {
        options: GenerateOptions,
        /// Extra seed terms, in SMT-LIB syntax.
        seeds: Vec<String>,
        /// Also seed with the problem's declared constants.
        declared_constants: bool,
    },
}

pub struct Prepared {
    pub problem: Problem,
    pub table: Arc<LiteralTable>,
    pub abducibles: AbducibleSet,
    /// Generated abducibles dropped as unsatisfiable on their own.
    pub dropped: usize,
    pub main: Box<dyn Oracle>,
    pub bare: Box<dyn Oracle>,
}

pub fn read_problem(path: &Path, logic: Option<&str>) -> Result<Problem> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read problem file {}", path.display()))?;
    let mut problem =
        Problem::parse(&text).with_context(|| format!("cannot parse {}", path.display()))?;
    if let Some(tag) = logic {
        problem.signature.logic = tag.to_string();
    }
    Ok(problem)
}

pub fn prepare(
    path: &Path,
    logic: Option<&str>,
    source: &AbducibleSource,
    backend: &Backend,
) -> Result<Prepared> {
    let problem = read_problem(path, logic)?;
    let mut table = LiteralTable::new();
    let (set, lines) = match source {
        AbducibleSource::File(file) => {
            let text = std::fs::read_to_string(file)
                .with_context(|| format!("cannot read abducible file {}", file.display()))?;
            let loaded = abducibles::load_file(&text, &problem.signature, &mut table)
                .with_context(|| format!("in abducible file {}", file.display()))?;
            (loaded.set.clone(), Some(loaded))
        }
        AbducibleSource::Generate { options, seeds, declared_constants } => {
            let mut all = if *declared_constants { abducibles::default_seeds(&problem) } else { Vec::new() };
            for s in seeds {
                let term = SExpr::parse(s).with_context(|| format!("cannot parse seed term `{s}`"))?;
                if problem.signature.sort_of(&term).is_none() {
                    bail!("seed term `{s}` is not well-sorted");
                }
                if !all.contains(&term) {
                    all.push(term);
                }
            }
            (abducibles::generate(&problem.signature, &all, options, &mut table), None)
        }
    };
    let table = Arc::new(table);
    let mut bare = open_session(&problem, table.clone(), backend, false)
        .context("cannot open the theory-only solver session")?;
    let (abducibles, dropped) = match lines {
        Some(loaded) => {
            loaded
                .check_satisfiable(bare.as_mut(), &table)
                .context("abducible rejected")?;
            (set, 0)
        }
        None => {
            let (kept, dropped) = set.filter_satisfiable(bare.as_mut())?;
            (kept, dropped.len())
        }
    };
    let main = open_session(&problem, table.clone(), backend, true)
        .context("cannot open the solver session")?;
    Ok(Prepared { problem, table, abducibles, dropped, main, bare })
}
