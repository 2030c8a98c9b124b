mod common;

use std::sync::Arc;
use std::time::Duration;

use common::*;
use pimt_core::abducibles::{load_file, AbducibleError};
use pimt_core::engine::submin;
use pimt_core::oracle::{
    check_with, entails, open_session, Backend, Entailment, Oracle, PropositionalSession,
    SatStatus, SmtSession, SolverCommand,
};
use pimt_core::store::{ATree, LitOrder};
use pimt_core::{Clause, LiteralTable, Problem, SExpr};
use rand::Rng;

fn z3() -> Option<SolverCommand> {
    let cmd = SolverCommand::z3(Some(Duration::from_secs(5)));
    let found = std::process::Command::new(&cmd.program)
        .arg("-version")
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false);
    if !found {
        eprintln!("skipping: `{}` not available", cmd.program);
    }
    found.then_some(cmd)
}

fn interned(problem: &Problem, atoms: &[&str]) -> Arc<LiteralTable> {
    let mut table = LiteralTable::new();
    for a in atoms {
        table.intern_text(a, &problem.signature).unwrap();
    }
    Arc::new(table)
}

#[test]
fn internal_session_basics() {
    let s = Cnf { atoms: 2, clauses: vec![vec![(0, true), (1, true)]] };
    let mut f = fixture(&s);
    assert_eq!(f.main.check_status().unwrap(), SatStatus::Sat);
    let empty = Cnf { atoms: 2, clauses: vec![] };
    assert_eq!(fixture(&empty).main.check_status().unwrap(), SatStatus::Sat);
    assert!(Problem::parse("(assert (or p").is_err());

    let (p, q) = (lit(0, true), lit(1, true));
    f.main.assert_scoped(&[p]).unwrap();
    f.main.assert_scoped(&[!p]).unwrap();
    assert_eq!(f.main.check_status().unwrap(), SatStatus::Unsat);
    f.main.retract_scope().unwrap();
    f.main.retract_scope().unwrap();
    assert!(f.main.retract_scope().is_err());

    let s = Cnf { atoms: 2, clauses: vec![vec![(0, true), (1, true)], vec![(0, false)]] };
    let mut f = fixture(&s);
    f.main.set_model_atoms(&[p.atom(), q.atom()]).unwrap();
    let res = f.main.check_sat().unwrap();
    assert_eq!(res.status, SatStatus::Sat);
    assert!(res.model.unwrap().contains(&q));
}

#[test]
fn internal_entailment() {
    let atoms = vec!["p0".into(), "p1".into(), "(= p0 p0)".into()];
    let mut f = fixture_from_text("(declare-const p0 Bool)(declare-const p1 Bool)", &atoms);
    let (p, q, refl) = (lit(0, true), lit(1, true), lit(2, true));
    assert_eq!(entails(&mut f.bare, &[p], &Clause::new([p, q])).unwrap(), Entailment::Yes);
    assert_eq!(entails(&mut f.bare, &[], &Clause::new([refl])).unwrap(), Entailment::Yes);
    assert_eq!(entails(&mut f.bare, &[], &Clause::new([p])).unwrap(), Entailment::No);
}

#[test]
fn tautology_detection_matches_truth_tables() {
    let mut rng = rng(30);
    for _ in 0..10 {
        let mut pool = CompoundPool::random(&mut rng, 3, 6);
        let lits = pool.literals();
        for _ in 0..50 {
            let c = random_clause(&mut rng, &lits, 3);
            let got = entails(&mut pool.fixture.bare, &[], &c).unwrap();
            let want = pool.clause_table(&c) == pool.all();
            assert_eq!(got == Entailment::Yes, want, "{c:?}");
        }
    }
}

#[test]
fn push_pop_restores_behavior() {
    let mut rng = rng(31);
    for _ in 0..20 {
        let s = Cnf::random(&mut rng, 6, 10);
        let lits = all_literals(s.atoms);
        let mut f = fixture(&s);
        let mut fresh = fixture(&s);
        let mut pushed = Vec::new();
        let depth = rng.gen_range(1..=50);
        for _ in 0..depth {
            let l = lits[rng.gen_range(0..lits.len())];
            f.main.assert_scoped(&[l]).unwrap();
            pushed.push(l);
            if rng.gen_bool(0.3) {
                let got = f.main.check_status().unwrap();
                let want = check_with(&mut fresh.main, &pushed).unwrap();
                assert_eq!(got, want);
            }
        }
        for _ in 0..depth {
            f.main.retract_scope().unwrap();
        }
        for _ in 0..100 {
            let q: Vec<_> = (0..rng.gen_range(0..4)).map(|_| lits[rng.gen_range(0..lits.len())]).collect();
            assert_eq!(check_with(&mut f.main, &q).unwrap(), check_with(&mut fresh.main, &q).unwrap());
        }
    }
}

#[test]
fn unsupported_terms_are_reported() {
    let problem = Problem::parse("(set-logic QF_LIA)(declare-const x Int)(assert (> x 0))").unwrap();
    let table = interned(&problem, &["(> x 0)"]);
    assert!(PropositionalSession::open(&problem, table, true).is_err());
}

#[test]
fn z3_arithmetic() {
    let Some(cmd) = z3() else { return };
    let problem = Problem::parse("(set-logic QF_LIA)(declare-const x Int)(assert (= x 0))").unwrap();
    let table = interned(&problem, &["(= x 1)", "(<= x 0)", "(<= x 1)"]);
    let backend = Backend::External(cmd);
    let mut main = open_session(&problem, table.clone(), &backend, true).unwrap();
    let mut bare = open_session(&problem, table.clone(), &backend, false).unwrap();
    let x1 = table.lookup_text("(= x 1)").unwrap();
    let le0 = table.lookup_text("(<= x 0)").unwrap();
    let le1 = table.lookup_text("(<= x 1)").unwrap();
    assert_eq!(check_with(main.as_mut(), &[x1]).unwrap(), SatStatus::Unsat);
    assert_eq!(entails(bare.as_mut(), &[le0], &Clause::new([le1])).unwrap(), Entailment::Yes);
    assert_eq!(entails(bare.as_mut(), &[le1], &Clause::new([le0])).unwrap(), Entailment::No);

    let mut t = ATree::empty();
    t.insert(&Clause::new([le0]), &LitOrder::by_id());
    assert!(t.forward_subsumed(&Clause::new([le1]), bare.as_mut()).unwrap());
}

#[test]
fn z3_equality_minimization() {
    let Some(cmd) = z3() else { return };
    let text = "(set-logic QF_UF)(declare-sort U 0)\
                (declare-const a U)(declare-const b U)(declare-const c U)(declare-const d U)";
    let problem = Problem::parse(text).unwrap();
    let table = interned(&problem, &["(= a b)", "(= c d)", "(= b a)", "(= a a)"]);
    let mut bare = open_session(&problem, table.clone(), &Backend::External(cmd), false).unwrap();
    let ab = table.lookup_text("(= a b)").unwrap();
    let cd = table.lookup_text("(= c d)").unwrap();
    let ba = table.lookup_text("(= b a)").unwrap();
    let aa = table.lookup_text("(= a a)").unwrap();
    let m = submin([Clause::new([ab, cd]), Clause::new([ba])], bare.as_mut()).unwrap();
    assert_eq!(m.clauses, vec![Clause::new([ba])]);
    let m = submin([Clause::new([aa]), Clause::new([ab])], bare.as_mut()).unwrap();
    assert_eq!(m.clauses, vec![Clause::new([ab])]);
}

#[test]
fn z3_rejects_unsatisfiable_abducibles() {
    let Some(cmd) = z3() else { return };
    let text = "(set-logic QF_UF)(declare-sort U 0)(declare-const a U)(declare-const b U)";
    let problem = Problem::parse(text).unwrap();
    let mut table = LiteralTable::new();
    let loaded = load_file("(= a b)\n(distinct a a)\n", &problem.signature, &mut table).unwrap();
    let table = Arc::new(table);
    let mut bare = open_session(&problem, table.clone(), &Backend::External(cmd), false).unwrap();
    match loaded.check_satisfiable(bare.as_mut(), &table) {
        Err(AbducibleError::Unsatisfiable { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected rejection, got {other:?}"),
    }
}

#[test]
fn z3_agrees_with_internal_backend() {
    let Some(cmd) = z3() else { return };
    let mut rng = rng(32);
    let backend = Backend::External(cmd);
    for _ in 0..500 {
        let atoms = rng.gen_range(1..=8);
        let clauses = (0..rng.gen_range(1..=4 * atoms))
            .map(|_| (0..3).map(|_| (rng.gen_range(0..atoms), rng.gen_bool(0.5))).collect())
            .collect();
        let s = Cnf { atoms, clauses };
        let mut f = fixture(&s);
        let mut ext = open_session(&f.problem, f.table.clone(), &backend, true).unwrap();
        let want = if s.models().is_empty() { SatStatus::Unsat } else { SatStatus::Sat };
        assert_eq!(f.main.check_status().unwrap(), want);
        assert_eq!(ext.check_status().unwrap(), want);
    }
}

#[test]
fn z3_deep_scopes_match_fresh_sessions() {
    let Some(cmd) = z3() else { return };
    let backend = Backend::External(cmd);
    let mut rng = rng(33);
    let s = Cnf::random(&mut rng, 8, 12);
    let f = fixture(&s);
    let lits = all_literals(s.atoms);
    let mut deep = open_session(&f.problem, f.table.clone(), &backend, true).unwrap();
    let mut pushed = Vec::new();
    for _ in 0..50 {
        let l = lits[rng.gen_range(0..lits.len())];
        deep.assert_scoped(&[l]).unwrap();
        pushed.push(l);
        let mut fresh = open_session(&f.problem, f.table.clone(), &backend, true).unwrap();
        fresh.assert_scoped(&pushed).unwrap();
        assert_eq!(deep.check_status().unwrap(), fresh.check_status().unwrap());
    }
    for _ in 0..50 {
        deep.retract_scope().unwrap();
    }
    let mut fresh = open_session(&f.problem, f.table.clone(), &backend, true).unwrap();
    assert_eq!(deep.check_status().unwrap(), fresh.check_status().unwrap());
}

#[test]
fn z3_command_sequence() {
    let Some(cmd) = z3() else { return };
    let text = "(set-logic QF_UF)(declare-const p Bool)(declare-const q Bool)(assert (or p q))";
    let problem = Problem::parse(text).unwrap();
    let table = interned(&problem, &["p", "q"]);
    let mut s = SmtSession::open_recorded(&cmd, &problem, table.clone(), true).unwrap();
    let p = table.lookup_text("p").unwrap();
    s.set_model_atoms(&[p.atom()]).unwrap();
    s.assert_scoped(&[!p]).unwrap();
    let res = s.check_sat().unwrap();
    assert_eq!(res.status, SatStatus::Sat);
    assert_eq!(res.model, Some(vec![!p]));
    s.retract_scope().unwrap();
    let want = [
        "(set-option :produce-models true)",
        "(set-logic QF_UF)",
        "(declare-const p Bool)",
        "(declare-const q Bool)",
        "(assert (or p q))",
        "(push 1)",
        "(assert (not p))",
        "(check-sat)",
        "(get-value (p))",
        "(pop 1)",
    ];
    assert_eq!(s.transcript(), want);
}

#[test]
fn z3_reports_solver_errors() {
    let Some(cmd) = z3() else { return };
    let problem = Problem::parse("(set-logic QF_UF)(declare-const p Bool)").unwrap();
    let mut table = LiteralTable::new();
    table.intern(&SExpr::parse("(undeclared_thing)").unwrap());
    let mut s = SmtSession::open(&cmd, &problem, Arc::new(table), true).unwrap();
    s.assert_scoped(&[pimt_core::Lit::from_index(0)]).unwrap();
    assert!(s.check_status().is_err());
}
