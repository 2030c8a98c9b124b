//! Front end for the `pimt` binary: single runs and benchmark manifests.

pub mod bench;
pub mod run;
pub mod setup;

use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pimt_core::abducibles::GenerateOptions;
use pimt_core::engine::{Algorithm, EngineConfig, ResultPredicate};
use pimt_core::oracle::{Backend, SOLVER_ENV};

use crate::run::RunOptions;
use crate::setup::AbducibleSource;

#[derive(Debug, Parser)]
#[command(name = "pimt", version, about = "Enumerate prime implicates over abducible literals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate implicates of one problem.
    Run(RunArgs),
    /// Measure time to first implicate over a manifest of problems.
    Bench(BenchArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum AlgorithmArg {
    Bp,
    Imp,
}

#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    /// Problem in SMT-LIB syntax.
    pub problem: PathBuf,
    /// `internal`, or a solver command line speaking SMT-LIB on stdin.
    #[arg(long, env = SOLVER_ENV, default_value = "z3")]
    pub backend: String,
    /// Override the problem's logic.
    #[arg(long)]
    pub logic: Option<String>,
    /// Read abducibles from a file, one literal per line.
    #[arg(long, conflicts_with_all = ["abduce_depth", "abduce_ineq", "seed_term", "no_default_seeds"])]
    pub abducibles: Option<PathBuf>,
    /// Maximal term height of generated abducibles.
    #[arg(long, default_value_t = 1)]
    pub abduce_depth: usize,
    /// Also generate `<=` and `>=` abducibles between arithmetic terms.
    #[arg(long)]
    pub abduce_ineq: bool,
    /// Extra term to build abducibles from (repeatable).
    #[arg(long)]
    pub seed_term: Vec<String>,
    /// Do not seed generation with the declared constants.
    #[arg(long)]
    pub no_default_seeds: bool,
    /// Only report implicates with at most this many literals.
    #[arg(long)]
    pub size_limit: Option<usize>,
    #[arg(long, value_enum, default_value = "imp")]
    pub algorithm: AlgorithmArg,
    /// Do not use solver models to skip branches.
    #[arg(long)]
    pub no_model_pruning: bool,
    /// Overall time budget in seconds.
    #[arg(long)]
    pub timeout: Option<f64>,
    /// Per-query solver timeout in seconds.
    #[arg(long, default_value_t = 5.0)]
    pub query_timeout: f64,
    /// Stop after this many implicates.
    #[arg(long)]
    pub max_implicates: Option<usize>,
    /// Write the final store, one clause per line.
    #[arg(long)]
    pub dump_store: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct BenchArgs {
    /// TOML manifest listing problems and run settings.
    pub manifest: PathBuf,
    /// Overrides the manifest's backend.
    #[arg(long, env = SOLVER_ENV)]
    pub backend: Option<String>,
}

impl RunArgs {
    pub fn options(&self) -> anyhow::Result<RunOptions> {
        for (name, v) in [("--timeout", self.timeout), ("--query-timeout", Some(self.query_timeout))] {
            if let Some(v) = v {
                anyhow::ensure!(v.is_finite() && v > 0.0, "{name} must be a positive number of seconds");
            }
        }
        let abducibles = match &self.abducibles {
            Some(path) => AbducibleSource::File(path.clone()),
            None => AbducibleSource::Generate {
                options: GenerateOptions { depth: self.abduce_depth, inequalities: self.abduce_ineq },
                seeds: self.seed_term.clone(),
                declared_constants: !self.no_default_seeds,
            },
        };
        let mut engine = match self.algorithm {
            AlgorithmArg::Imp => EngineConfig::imp(),
            AlgorithmArg::Bp => EngineConfig { algorithm: Algorithm::Bp, ..EngineConfig::default() },
        };
        if self.no_model_pruning {
            engine.model_pruning = false;
        }
        if let Some(k) = self.size_limit {
            engine.predicate = ResultPredicate::SizeLimit(k);
        }
        engine.time_limit = self.timeout.map(Duration::from_secs_f64);
        engine.max_implicates = self.max_implicates;
        let query_timeout = Duration::from_secs_f64(self.query_timeout);
        Ok(RunOptions {
            problem: self.problem.clone(),
            logic: self.logic.clone(),
            abducibles,
            backend: Backend::parse(&self.backend, Some(query_timeout)),
            engine,
            dump_store: self.dump_store.clone(),
        })
    }
}
