mod common;

use std::collections::HashSet;

use common::*;
use fuzzy_kripke::algebra::{Algebra, TruthValue};
use fuzzy_kripke::bisim::greatest_pre;
use fuzzy_kripke::fuzzrel::FuzzyVec;
use fuzzy_kripke::hm::{hm_check, simulation_noninvariance_demo, weak_by_depth, HmOptions, Levels, Verdict};
use fuzzy_kripke::model::KripkeModel;
use fuzzy_kripke::par::Exec;
use fuzzy_kripke::syntax::{enumerate, EnumConfig, Fragment, Modalities};
use fuzzy_kripke::weak::greatest_weak;

const FRAGMENTS: [Fragment; 3] = [Fragment::Plus, Fragment::Minus, Fragment::Full];

fn class_set(levels: &Levels, depth: usize) -> HashSet<(FuzzyVec, FuzzyVec)> {
    let mut c = levels.level(None);
    for _ in 0..depth {
        c = levels.level(Some(&c));
    }
    assert!(!c.truncated);
    levels.decode(&c).into_iter().collect()
}

#[test]
fn formula_enumeration_and_class_closure_agree() {
    let mut r = rng(11);
    for i in 0..12 {
        let algebra = if i % 2 == 0 { Algebra::Chain(3) } else { Algebra::Boolean };
        let values = palette(algebra);
        let (m, m2) = random_pair(&mut r, algebra, 2, &values);
        for fragment in [Fragment::Propositional, Fragment::Plus, Fragment::Minus, Fragment::Full] {
            for depth in 0..=2 {
                let config = EnumConfig { exec: Exec::Sequential, ..EnumConfig::for_models(&m, &m2, fragment, depth) };
                let e = enumerate(&config, &m, &m2).unwrap();
                assert!(!e.truncated);
                let naive: HashSet<(FuzzyVec, FuzzyVec)> = e.vectors.iter().cloned().collect();
                let levels = Levels::new(&m, &m2, fragment, &HmOptions::default()).unwrap();
                assert_eq!(naive, class_set(&levels, depth), "model {i} {fragment} depth {depth}");
                // every representative evaluates to its recorded vectors
                for (a, (v, v2)) in e.formulas.iter().zip(&e.vectors).step_by(97) {
                    assert_eq!(&m.eval_vec(a).unwrap(), v);
                    assert_eq!(&m2.eval_vec(a).unwrap(), v2);
                }
            }
        }
    }
}

#[test]
fn class_matrix_equals_the_explicit_closed_form() {
    let (m, m2) = pair("ex72");
    let config = EnumConfig::for_models(&m, &m2, Fragment::Full, 1);
    let e = enumerate(&config, &m, &m2).unwrap();
    let explicit = greatest_weak(&m, &m2, &e.formulas, Exec::default()).unwrap();
    let d = weak_by_depth(&m, &m2, Fragment::Full, 1, &HmOptions::default()).unwrap();
    assert_eq!(explicit.prebisim, d.matrix);
}

#[test]
fn bundled_examples_match_for_every_fragment() {
    for ex in ["ex41", "ex71", "ex72", "ex74"] {
        let (m, m2) = pair(ex);
        for f in FRAGMENTS {
            let r = hm_check(&m, &m2, f, &HmOptions::default()).unwrap();
            assert_eq!(r.verdict, Verdict::Match, "{ex} {f}");
            assert!(r.strong_below_weak && r.antitone, "{ex} {f}");
        }
    }
}

#[test]
fn box_constructions_alone_suffice() {
    let mut r = rng(12);
    let options = HmOptions { modalities: Modalities::BOXES, ..HmOptions::default() };
    let mut cases: Vec<(KripkeModel, KripkeModel)> = vec![pair("ex71"), pair("ex72"), pair("ex74")];
    for _ in 0..10 {
        cases.push(random_pair(&mut r, Algebra::Chain(3), 3, &palette(Algebra::Chain(3))));
    }
    for (n, (m, m2)) in cases.iter().enumerate() {
        for f in FRAGMENTS {
            let rep = hm_check(m, m2, f, &options).unwrap();
            assert_eq!(rep.modalities, "box");
            assert_eq!(rep.verdict, Verdict::Match, "case {n} {f}");
        }
    }
}

#[test]
fn boolean_models_follow_the_classical_theorems() {
    let mut r = rng(13);
    for n in 0..15 {
        let (m, m2) = random_pair(&mut r, Algebra::Boolean, 4, &palette(Algebra::Boolean));
        for f in FRAGMENTS {
            let rep = hm_check(&m, &m2, f, &HmOptions::default()).unwrap();
            assert_eq!(rep.verdict, Verdict::Match, "case {n} {f}");
            assert!(rep.strong.iter().flatten().all(|t| t.is_zero() || t.is_one()));
        }
    }
}

#[test]
fn weak_matrices_decrease_with_depth() {
    let mut r = rng(14);
    for _ in 0..10 {
        let (m, m2) = random_pair(&mut r, Algebra::Chain(4), 3, &palette(Algebra::Chain(4)));
        for f in FRAGMENTS {
            let strong = greatest_pre(&m, &m2, fuzzy_kripke::hm::matched_type(f).unwrap(), Exec::default()).unwrap().relation;
            let mut prev = None;
            for d in 0..=3 {
                let e = weak_by_depth(&m, &m2, f, d, &HmOptions::default()).unwrap();
                assert!(strong.leq(&e.matrix).unwrap());
                if let Some(p) = &prev {
                    assert!(e.matrix.leq(p).unwrap());
                }
                prev = Some(e.matrix);
            }
        }
    }
}

#[test]
fn budget_exhaustion_is_inconclusive() {
    let (m, m2) = pair("ex71");
    let r = hm_check(&m, &m2, Fragment::Full, &HmOptions { budget: 100, ..HmOptions::default() }).unwrap();
    assert!(r.truncated);
    assert_eq!(r.verdict, Verdict::Inconclusive);
}

#[test]
fn parallel_and_sequential_reports_agree() {
    let (m, m2) = pair("ex71");
    for f in FRAGMENTS {
        let a = hm_check(&m, &m2, f, &HmOptions { exec: Exec::Sequential, ..HmOptions::default() }).unwrap();
        let b = hm_check(&m, &m2, f, &HmOptions { exec: Exec::Parallel, ..HmOptions::default() }).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn presimulations_are_not_invariant() {
    let d = simulation_noninvariance_demo(Algebra::Godel);
    let w = d.witness.unwrap();
    let m = KripkeModel::from_json(&w.model).unwrap();
    let m2 = KripkeModel::from_json(&w.model_prime).unwrap();
    let a = w.formula.parse().unwrap();
    assert_eq!(m.eval(0, &a).unwrap(), w.value);
    assert_eq!(m2.eval(0, &a).unwrap(), w.value_prime);
    let phi = greatest_pre(&m, &m2, fuzzy_kripke::bisim::SimType::Fs, Exec::Sequential).unwrap().relation;
    assert!(phi.get(0, 0) > &w.value.residuum(&w.value_prime));
    let f = d.inequality.unwrap();
    assert!(f.lhs > f.rhs);
    for t in [&f.x1, &f.y1, &f.x2, &f.y2] {
        assert!(d.palette.contains(t));
    }
}

#[test]
fn finite_chains_have_demo_witnesses() {
    for algebra in [Algebra::Chain(3), Algebra::Chain(5)] {
        let d = simulation_noninvariance_demo(algebra);
        assert!(d.inequality.is_some() && d.witness.is_some(), "{algebra}");
        assert_eq!(d.palette.len(), algebra.levels().unwrap() as usize);
        assert!(d.palette.iter().all(|t: &TruthValue| algebra.contains(t)));
    }
}
