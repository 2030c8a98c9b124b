//! External solver session over the SMT-LIB 2 command protocol.
//!
//! The solver runs as a child process in incremental mode. Commands go to its
//! stdin; a reader thread parses stdout into s-expressions and hands them to
//! the session over a channel so that every query can carry a deadline.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use super::{Capabilities, Oracle, OracleError, OracleStats, SatStatus};
use crate::logic::{AtomId, Lit, LiteralTable};
use crate::problem::Problem;
use crate::sexp::SExpr;

/// Environment variable overriding the solver program.
pub const SOLVER_ENV: &str = "PIMT_SOLVER";

/// Extra wall-clock allowance on top of the solver's own soft timeout before
/// the process is considered hung.
const HARD_TIMEOUT_GRACE: Duration = Duration::from_secs(2);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverCommand {
    pub program: String,
    pub args: Vec<String>,
    /// Per-query soft timeout. For z3 it is forwarded as `-t:<ms>`; for other
    /// solvers it only bounds how long the session waits for an answer.
    pub query_timeout: Option<Duration>,
}

impl SolverCommand {
    /// z3 in interactive SMT-LIB mode, honoring [`SOLVER_ENV`].
    pub fn z3(query_timeout: Option<Duration>) -> Self {
        let program = std::env::var(SOLVER_ENV).unwrap_or_else(|_| "z3".into());
        SolverCommand { program, args: vec!["-in".into(), "-smt2".into()], query_timeout }
    }

    /// Splits a command line on whitespace. A bare `z3` gets the interactive
    /// arguments added.
    pub fn parse(line: &str, query_timeout: Option<Duration>) -> Self {
        let mut parts = line.split_whitespace().map(String::from);
        let program = parts.next().unwrap_or_else(|| "z3".into());
        let args: Vec<String> = parts.collect();
        if args.is_empty() && is_z3(&program) {
            return SolverCommand { program, ..Self::z3(query_timeout) };
        }
        SolverCommand { program, args, query_timeout }
    }

    fn full_args(&self) -> Vec<String> {
        let mut args = self.args.clone();
        if let Some(t) = self.query_timeout {
            if is_z3(&self.program) && !args.iter().any(|a| a.starts_with("-t:")) {
                args.push(format!("-t:{}", t.as_millis().max(1)));
            }
        }
        args
    }

    pub fn display(&self) -> String {
        std::iter::once(self.program.clone()).chain(self.full_args()).collect::<Vec<_>>().join(" ")
    }
}

fn is_z3(program: &str) -> bool {
    std::path::Path::new(program)
        .file_name()
        .and_then(|f| f.to_str())
        .is_some_and(|f| f == "z3" || f == "z3.exe")
}

pub struct SmtSession {
    table: Arc<LiteralTable>,
    child: Child,
    stdin: BufWriter<ChildStdin>,
    responses: Receiver<Result<SExpr, String>>,
    hard_timeout: Option<Duration>,
    depth: usize,
    model_atoms: Vec<AtomId>,
    models_supported: bool,
    dead: bool,
    transcript: Option<Vec<String>>,
    stats: OracleStats,
}

impl SmtSession {
    pub fn open(
        cmd: &SolverCommand,
        problem: &Problem,
        table: Arc<LiteralTable>,
        with_assertions: bool,
    ) -> Result<Self, OracleError> {
        Self::start(cmd, problem, table, with_assertions, None)
    }

    /// [`SmtSession::open`] with every command recorded from the first one.
    pub fn open_recorded(
        cmd: &SolverCommand,
        problem: &Problem,
        table: Arc<LiteralTable>,
        with_assertions: bool,
    ) -> Result<Self, OracleError> {
        Self::start(cmd, problem, table, with_assertions, Some(Vec::new()))
    }

    fn start(
        cmd: &SolverCommand,
        problem: &Problem,
        table: Arc<LiteralTable>,
        with_assertions: bool,
        transcript: Option<Vec<String>>,
    ) -> Result<Self, OracleError> {
        let mut child = Command::new(&cmd.program)
            .args(cmd.full_args())
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|source| OracleError::Spawn { command: cmd.display(), source })?;
        let stdin = BufWriter::new(child.stdin.take().expect("piped stdin"));
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || read_responses(BufReader::new(stdout), tx));

        let mut session = SmtSession {
            table,
            child,
            stdin,
            responses: rx,
            hard_timeout: cmd.query_timeout.map(|t| t + HARD_TIMEOUT_GRACE),
            depth: 0,
            model_atoms: Vec::new(),
            models_supported: true,
            dead: false,
            transcript,
            stats: OracleStats::default(),
        };
        session.send("(set-option :produce-models true)")?;
        session.send(&format!("(set-logic {})", problem.logic()))?;
        for decl in &problem.declarations {
            session.send(&decl.to_string())?;
        }
        if with_assertions {
            for a in &problem.assertions {
                session.send(&format!("(assert {a})"))?;
            }
        }
        session.stdin.flush()?;
        Ok(session)
    }

    /// Starts recording every command sent from now on.
    pub fn record_transcript(&mut self) {
        self.transcript = Some(Vec::new());
    }

    pub fn transcript(&self) -> &[String] {
        self.transcript.as_deref().unwrap_or(&[])
    }

    fn send(&mut self, cmd: &str) -> Result<(), OracleError> {
        if self.dead {
            return Err(OracleError::Protocol("solver session was terminated".into()));
        }
        if let Some(t) = self.transcript.as_mut() {
            t.push(cmd.to_string());
        }
        writeln!(self.stdin, "{cmd}")?;
        Ok(())
    }

    fn receive(&mut self) -> Result<SExpr, OracleError> {
        let received = match self.hard_timeout {
            Some(t) => self.responses.recv_timeout(t),
            None => self.responses.recv().map_err(|_| RecvTimeoutError::Disconnected),
        };
        match received {
            Ok(Ok(e)) => Ok(e),
            Ok(Err(msg)) => {
                self.dead = true;
                Err(OracleError::Protocol(msg))
            }
            Err(RecvTimeoutError::Timeout) => {
                self.dead = true;
                let _ = self.child.kill();
                Err(OracleError::Timeout(self.hard_timeout.unwrap_or_default()))
            }
            Err(RecvTimeoutError::Disconnected) => {
                self.dead = true;
                Err(OracleError::Protocol("solver closed its output".into()))
            }
        }
    }
}

fn solver_error(e: &SExpr) -> Option<String> {
    match e.as_list()? {
        [head, msg] if head.is_atom("error") => {
            Some(msg.as_atom().unwrap_or_default().trim_matches('"').to_string())
        }
        _ => None,
    }
}

/// Accumulates stdout lines until parentheses balance, then parses.
fn read_responses(mut reader: impl BufRead, tx: mpsc::Sender<Result<SExpr, String>>) {
    let mut pending = String::new();
    let mut depth: i64 = 0;
    let mut in_string = false;
    let mut in_quote = false;
    let mut line = String::new();
    loop {
        line.clear();
        match reader.read_line(&mut line) {
            Ok(0) => {
                let _ = tx.send(Err("solver exited".into()));
                return;
            }
            Ok(_) => {}
            Err(e) => {
                let _ = tx.send(Err(e.to_string()));
                return;
            }
        }
        for c in line.chars() {
            match c {
                '"' if !in_quote => in_string = !in_string,
                '|' if !in_string => in_quote = !in_quote,
                '(' if !in_string && !in_quote => depth += 1,
                ')' if !in_string && !in_quote => depth -= 1,
                _ => {}
            }
        }
        pending.push_str(&line);
        if depth <= 0 && !in_string && !in_quote {
            match SExpr::parse_all(&pending) {
                Ok(exprs) => {
                    for (_, e) in exprs {
                        if tx.send(Ok(e)).is_err() {
                            return;
                        }
                    }
                }
                Err(e) => {
                    let _ = tx.send(Err(format!("unparsable solver output: {e}")));
                    return;
                }
            }
            pending.clear();
            depth = 0;
        }
    }
}

impl Oracle for SmtSession {
    fn assert_scoped(&mut self, lits: &[Lit]) -> Result<(), OracleError> {
        self.send("(push 1)")?;
        for &l in lits {
            let text = self.table.lit_text(l);
            self.send(&format!("(assert {text})"))?;
        }
        self.depth += 1;
        self.stats.pushes += 1;
        Ok(())
    }

    fn retract_scope(&mut self) -> Result<(), OracleError> {
        if self.depth == 0 {
            return Err(OracleError::NoScope);
        }
        self.send("(pop 1)")?;
        self.depth -= 1;
        Ok(())
    }

    fn check_status(&mut self) -> Result<SatStatus, OracleError> {
        self.send("(check-sat)")?;
        self.stdin.flush()?;
        self.stats.checks += 1;
        loop {
            let e = self.receive()?;
            if let Some(msg) = solver_error(&e) {
                return Err(OracleError::Solver(msg));
            }
            match e.as_atom() {
                Some("sat") => return Ok(SatStatus::Sat),
                Some("unsat") => return Ok(SatStatus::Unsat),
                Some("unknown") | Some("timeout") => return Ok(SatStatus::Unknown),
                // acknowledgements such as `success` or `unsupported`
                Some(_) => continue,
                None => return Err(OracleError::Protocol(e.to_string())),
            }
        }
    }

    fn model_literals(&mut self) -> Result<Option<Vec<Lit>>, OracleError> {
        if self.model_atoms.is_empty() || !self.models_supported {
            return Ok(if self.models_supported { Some(Vec::new()) } else { None });
        }
        let atoms: Vec<String> =
            self.model_atoms.iter().map(|&a| self.table.atom_text(a).to_string()).collect();
        self.send(&format!("(get-value ({}))", atoms.join(" ")))?;
        self.stdin.flush()?;
        let e = self.receive()?;
        if solver_error(&e).is_some() {
            self.models_supported = false;
            return Ok(None);
        }
        let pairs = e.as_list().ok_or_else(|| OracleError::Protocol(e.to_string()))?;
        if pairs.len() != self.model_atoms.len() {
            return Err(OracleError::Protocol(format!("get-value returned {} values", pairs.len())));
        }
        let mut out = Vec::with_capacity(pairs.len());
        for (pair, &atom) in pairs.iter().zip(&self.model_atoms) {
            match pair.as_list() {
                Some([_, v]) if v.is_atom("true") => out.push(Lit::positive(atom)),
                Some([_, v]) if v.is_atom("false") => out.push(Lit::negative(atom)),
                _ => {}
            }
        }
        Ok(Some(out))
    }

    fn set_model_atoms(&mut self, atoms: &[AtomId]) -> Result<(), OracleError> {
        self.model_atoms = atoms.to_vec();
        Ok(())
    }

    fn depth(&self) -> usize {
        self.depth
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities { supports_models: self.models_supported, supports_unknown: true }
    }

    fn stats(&self) -> OracleStats {
        self.stats
    }
}

impl Drop for SmtSession {
    fn drop(&mut self) {
        if !self.dead {
            let _ = writeln!(self.stdin, "(exit)");
            let _ = self.stdin.flush();
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
