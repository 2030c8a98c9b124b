mod common;

use std::collections::BTreeSet;

use common::*;
use pimt_core::engine::{
    self, compatible_from_model, fix, search, submin, Algorithm, EngineConfig, FixMode,
    ResultPredicate, TraceEvent, UnitMode,
};
use pimt_core::oracle::{check_with, Oracle, SatStatus};
use pimt_core::store::{ImplicateStore, LitOrder};
use pimt_core::Clause;
use rand::seq::SliceRandom;

fn set(v: Vec<Clause>) -> BTreeSet<Clause> {
    v.into_iter().collect()
}

fn cnf(atoms: usize, clauses: &[&[(usize, bool)]]) -> Cnf {
    Cnf { atoms, clauses: clauses.iter().map(|c| c.to_vec()).collect() }
}

#[test]
fn bp_small_cases() {
    let s = cnf(1, &[&[(0, true)], &[(0, false)]]);
    let mut f = fixture(&s);
    let a = abducibles(all_literals(1));
    assert_eq!(engine::bp(&mut f.main, &mut f.bare, &a).unwrap(), vec![Clause::empty()]);

    let s = cnf(2, &[&[(0, true), (1, true)]]);
    let mut f = fixture(&s);
    let a = abducibles(vec![lit(0, false), lit(1, false)]);
    let want = vec![Clause::new([lit(0, true), lit(1, true)])];
    assert_eq!(engine::bp(&mut f.main, &mut f.bare, &a).unwrap(), want);

    let s = cnf(1, &[]);
    let mut f = fixture(&s);
    let a = abducibles(vec![lit(0, false)]);
    assert!(engine::bp(&mut f.main, &mut f.bare, &a).unwrap().is_empty());
}

#[test]
fn fix_examples() {
    let (p, q, r) = (lit(0, true), lit(1, true), lit(2, true));
    let s = cnf(3, &[&[(0, false), (1, true)]]);
    let mut f = fixture(&s);
    let got = fix(&[!p, q], &[p], FixMode::Complement, &mut f.main, &mut f.bare).unwrap();
    assert_eq!(got, vec![q]);
    let got = fix(&[q, r], &[p], FixMode::Complement, &mut f.main, &mut f.bare).unwrap();
    assert_eq!(got, vec![q, r]);

    f.main.assert_scoped(&[p]).unwrap();
    let got = fix(&[q, r], &[p], FixMode::Entailment, &mut f.main, &mut f.bare).unwrap();
    f.main.retract_scope().unwrap();
    assert_eq!(got, vec![r]);
}

#[test]
fn submin_examples() {
    let (p, q) = (lit(0, true), lit(1, true));
    let atoms = vec!["p0".to_string(), "p1".to_string(), "(= p0 p0)".to_string()];
    let text = "(declare-const p0 Bool)(declare-const p1 Bool)";
    let mut f = fixture_from_text(text, &atoms);
    let m = submin([Clause::new([p]), Clause::new([p, q])], &mut f.bare).unwrap();
    assert_eq!(m.clauses, vec![Clause::new([p])]);
    let refl = lit(2, true);
    let m = submin([Clause::new([refl, p])], &mut f.bare).unwrap();
    assert!(m.clauses.is_empty());
    assert_eq!(m.unresolved, 0);
}

#[test]
fn submin_keeps_the_smaller_of_equivalent_clauses() {
    let atoms = vec!["x0".into(), "(and x0 x0)".into(), "x1".into()];
    let mut f = fixture_from_text("(declare-const x0 Bool)(declare-const x1 Bool)", &atoms);
    let (a, aa, b) = (lit(0, true), lit(1, true), lit(2, true));
    let m = submin([Clause::new([aa]), Clause::new([a, b]), Clause::new([a])], &mut f.bare)
        .unwrap();
    assert_eq!(m.clauses, vec![Clause::new([a])]);
}

#[test]
fn predicate_examples() {
    let mut f = fixture(&cnf(4, &[]));
    let m: Vec<_> = (0..3).map(|i| lit(i, true)).collect();
    assert!(!ResultPredicate::SizeLimit(2).holds(&m, &mut f.bare).unwrap());
    assert!(ResultPredicate::True.holds(&m, &mut f.bare).unwrap());

    let both = ResultPredicate::And(vec![ResultPredicate::SizeLimit(2), ResultPredicate::SizeLimit(3)]);
    let lits = all_literals(4);
    for mask in 0u32..1 << lits.len() {
        let m: Vec<_> = (0..lits.len()).filter(|i| mask >> i & 1 == 1).map(|i| lits[i]).collect();
        if m.len() > 4 {
            continue;
        }
        assert_eq!(
            both.holds(&m, &mut f.bare).unwrap(),
            ResultPredicate::SizeLimit(2).holds(&m, &mut f.bare).unwrap()
        );
    }

    let phi = vec![lit(0, true), lit(1, false)];
    let p = ResultPredicate::Implicant(phi);
    assert!(p.holds(&[lit(0, true)], &mut f.bare).unwrap());
    assert!(p.holds(&[lit(0, true), lit(1, false)], &mut f.bare).unwrap());
    assert!(!p.holds(&[lit(2, true)], &mut f.bare).unwrap());
}

#[test]
fn implicant_predicate_restricts_output() {
    let mut rng = rng(7);
    for _ in 0..40 {
        let s = Cnf::random(&mut rng, 4, 6);
        let mut f = fixture(&s);
        let lits = all_literals(s.atoms);
        let a = abducibles(lits.clone());
        let phi: Vec<_> = lits.iter().copied().filter(|l| l.is_positive()).collect();
        let got = engine::imp(&mut f.main, &mut f.bare, &a, ResultPredicate::Implicant(phi))
            .unwrap();
        let want: BTreeSet<Clause> = brute_force_primes(&s, &lits)
            .into_iter()
            .filter(|c| c.lits().iter().all(|l| !l.is_positive()))
            .collect();
        assert_eq!(set(got), want, "{s:?}");
    }
}

#[test]
fn imp_matches_brute_force() {
    let mut rng = rng(1);
    for _ in 0..60 {
        let s = Cnf::random(&mut rng, 5, 8);
        let lits = all_literals(s.atoms);
        let want = brute_force_primes(&s, &lits);
        let mut f = fixture(&s);
        let a = abducibles(lits.clone());
        let got = engine::imp(&mut f.main, &mut f.bare, &a, ResultPredicate::True).unwrap();
        assert_eq!(audit(&s, &got), 0);
        assert_eq!(set(got), want, "{s:?}");
    }
}

#[test]
fn restricted_abducibles() {
    let mut rng = rng(2);
    for _ in 0..60 {
        let s = Cnf::random(&mut rng, 4, 7);
        let mut lits = all_literals(s.atoms);
        lits.shuffle(&mut rng);
        lits.truncate(lits.len() / 2 + 1);
        let want = brute_force_primes(&s, &lits);
        let mut f = fixture(&s);
        let a = abducibles(lits);
        let got = engine::imp(&mut f.main, &mut f.bare, &a, ResultPredicate::True).unwrap();
        assert_eq!(set(got), want.clone(), "{s:?}");
        let got = engine::bp(&mut f.main, &mut f.bare, &a).unwrap();
        assert_eq!(set(got), want, "{s:?}");
    }
}

#[test]
fn branch_order_does_not_change_the_result() {
    let mut rng = rng(3);
    for _ in 0..30 {
        let s = Cnf::random(&mut rng, 4, 6);
        let mut f = fixture(&s);
        let mut lits = all_literals(s.atoms);
        let reference = set(
            engine::imp(&mut f.main, &mut f.bare, &abducibles(lits.clone()), ResultPredicate::True)
                .unwrap(),
        );
        for _ in 0..3 {
            lits.shuffle(&mut rng);
            let got = engine::imp(&mut f.main, &mut f.bare, &abducibles(lits.clone()), ResultPredicate::True)
                .unwrap();
            assert_eq!(set(got), reference);
        }
    }
}

#[test]
fn unit_propagation_is_neutral() {
    let mut rng = rng(4);
    for _ in 0..40 {
        let s = Cnf::random(&mut rng, 5, 8);
        let mut f = fixture(&s);
        let a = abducibles(all_literals(s.atoms));
        let plain = EngineConfig::imp().eager();
        let units = EngineConfig { units: UnitMode::Propagate(s.clause_view()), ..plain.clone() };
        let x = search(&mut f.main, &mut f.bare, &a, &plain, None).unwrap();
        let y = search(&mut f.main, &mut f.bare, &a, &units, None).unwrap();
        assert_eq!(set(x.implicates), set(y.implicates), "{s:?}");
    }
}

#[test]
fn entailment_fix_and_no_model_pruning_are_neutral() {
    let mut rng = rng(5);
    for _ in 0..40 {
        let s = Cnf::random(&mut rng, 4, 7);
        let mut f = fixture(&s);
        let a = abducibles(all_literals(s.atoms));
        let want = brute_force_primes(&s, a.members());
        for config in [
            EngineConfig { fix: FixMode::Entailment, ..EngineConfig::imp().eager() },
            EngineConfig { model_pruning: false, ..EngineConfig::imp().eager() },
            EngineConfig { fix: FixMode::Entailment, ..EngineConfig::bp().eager() },
        ] {
            let got = search(&mut f.main, &mut f.bare, &a, &config, None).unwrap();
            assert_eq!(set(got.implicates), want, "{config:?} {s:?}");
            assert_eq!(f.main.depth(), 0);
        }
    }
}

#[test]
fn trace_properties() {
    let mut rng = rng(6);
    for _ in 0..40 {
        let s = Cnf::random(&mut rng, 5, 8);
        let mut f = fixture(&s);
        let a = abducibles(all_literals(s.atoms));
        for algorithm in [Algorithm::Imp, Algorithm::Bp] {
            let config = EngineConfig {
                algorithm,
                model_pruning: true,
                record_trace: true,
                ..EngineConfig::default()
            };
            let out = search(&mut f.main, &mut f.bare, &a, &config, None).unwrap();
            for ev in &out.trace {
                match ev {
                    TraceEvent::HypothesesUnsat(m) => {
                        assert_eq!(check_with(&mut f.bare, m).unwrap(), SatStatus::Unsat);
                    }
                    TraceEvent::Implicate(m) => {
                        let c = Clause::new(m.iter().map(|l| l.complement()));
                        assert_eq!(audit(&s, &[c]), 0);
                    }
                    TraceEvent::Expand(m) | TraceEvent::PredicateFails(m) => {
                        let distinct: BTreeSet<_> = m.iter().collect();
                        assert_eq!(distinct.len(), m.len());
                        assert!(m.len() <= a.len());
                        assert!(m.iter().all(|l| a.contains(*l)));
                    }
                }
            }
            assert!(out.stats.max_depth <= a.len());
        }
    }
}

#[test]
fn models_give_compatible_sets() {
    let mut rng = rng(8);
    let mut checked = 0;
    while checked < 100 {
        let s = Cnf::random(&mut rng, 5, 8);
        let lits = all_literals(s.atoms);
        let mut f = fixture(&s);
        let a = abducibles(lits.clone());
        f.main.set_model_atoms(&a.atoms()).unwrap();
        let res = f.main.check_sat().unwrap();
        if res.status != SatStatus::Sat {
            continue;
        }
        checked += 1;
        let i = compatible_from_model(&res, &a);
        for c in brute_force_primes(&s, &lits) {
            assert!(c.lits().iter().any(|&l| i.contains(l)), "{s:?} {c:?}");
        }
    }
}

#[test]
fn streaming_store_matches_eager() {
    let mut rng = rng(9);
    for _ in 0..40 {
        let s = Cnf::random(&mut rng, 5, 8);
        let mut f = fixture(&s);
        let a = abducibles(all_literals(s.atoms));
        let eager = search(&mut f.main, &mut f.bare, &a, &EngineConfig::imp().eager(), None).unwrap();
        let mut store = ImplicateStore::new(LitOrder::from_abducibles(&a));
        let streamed = search(&mut f.main, &mut f.bare, &a, &EngineConfig::imp(), Some(&mut store)).unwrap();
        assert!(streamed.implicates.is_empty());
        assert_eq!(set(store.clauses()), set(eager.implicates));
    }
}

#[test]
fn count_budget_truncates() {
    let s = cnf(4, &[&[(0, true), (1, true)], &[(2, true), (3, true)], &[(0, false), (2, false)]]);
    let mut f = fixture(&s);
    let a = abducibles(all_literals(4));
    let mut sink: Vec<Clause> = Vec::new();
    let config = EngineConfig { max_implicates: Some(1), ..EngineConfig::imp() };
    let out = search(&mut f.main, &mut f.bare, &a, &config, Some(&mut sink)).unwrap();
    assert_eq!(out.completion, engine::Completion::Budget);
    assert_eq!(sink.len(), 1);
    assert_eq!(f.main.depth(), 0);
    assert_eq!(audit(&s, &sink), 0);
}
