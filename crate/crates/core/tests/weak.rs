mod common;

use common::*;
use fuzzy_kripke::algebra::Algebra;
use fuzzy_kripke::bisim::{greatest_pre, SimType};
use fuzzy_kripke::fuzzrel::FuzzyMat;
use fuzzy_kripke::par::Exec;
use fuzzy_kripke::syntax::{enumerate, parse, EnumConfig, Formula, Fragment};
use fuzzy_kripke::weak::{
    check_weak, composition_closed, duality_transfer, duality_transfer_fragment, greatest_weak, join_closed, WeakError, WeakKind,
};

fn psi(xs: &[&str]) -> Vec<Formula> {
    xs.iter().map(|s| parse(s).unwrap()).collect()
}

#[test]
fn backward_bisimulation_is_weak_for_a_minus_formula() {
    let (m, m2) = pair("ex71");
    let bb = greatest_pre(&m, &m2, SimType::Bb, Exec::default()).unwrap().relation;
    let c = check_weak(&m, &m2, &bb, &psi(&["<>-_1 p"]), WeakKind::Bisimulation).unwrap();
    assert!(c.is_full(), "{:?}", c.conditions);
}

#[test]
fn closed_forms_characterise_the_second_condition() {
    let mut r = rng(21);
    let values = palette(Algebra::Chain(4));
    let formulas = psi(&["p", "<>_1 p", "[]-_1 (p -> q)", "q & 1/3", "<>_1 <>-_1 q -> p"]);
    for _ in 0..60 {
        let (m, m2) = random_pair(&mut r, Algebra::Chain(4), 3, &values);
        let set: Vec<Formula> = formulas.iter().filter(|a| m.check_formula(a).is_ok()).cloned().collect();
        let best = greatest_weak(&m, &m2, &set, Exec::Sequential).unwrap();
        for _ in 0..10 {
            let phi = random_mat(&mut r, m.len(), m2.len(), &values);
            let sim = check_weak(&m, &m2, &phi, &set, WeakKind::Simulation).unwrap();
            assert_eq!(sim.is_pre(), phi.leq(&best.presim).unwrap());
            let bis = check_weak(&m, &m2, &phi, &set, WeakKind::Bisimulation).unwrap();
            assert_eq!(bis.is_pre(), phi.leq(&best.prebisim).unwrap());
        }
        assert!(check_weak(&m, &m2, &best.prebisim, &set, WeakKind::Bisimulation).unwrap().is_pre());
    }
}

#[test]
fn larger_sets_give_smaller_relations() {
    let mut r = rng(22);
    let values = palette(Algebra::Godel);
    for _ in 0..30 {
        let (m, m2) = random_pair(&mut r, Algebra::Godel, 3, &values);
        let small = psi(&["p", "<>_1 p"]);
        let mut large = small.clone();
        large.extend(psi(&["[]_1 p", "p -> <>-_1 p"]));
        let a = greatest_weak(&m, &m2, &small, Exec::default()).unwrap();
        let b = greatest_weak(&m, &m2, &large, Exec::default()).unwrap();
        assert!(b.presim.leq(&a.presim).unwrap());
        assert!(b.prebisim.leq(&a.prebisim).unwrap());
    }
}

#[test]
fn sub_relations_are_join_closed() {
    let (m, m2) = pair("ex72");
    let set = enumerate(&EnumConfig::for_models(&m, &m2, Fragment::Full, 1), &m, &m2).unwrap().formulas;
    let best = greatest_weak(&m, &m2, &set, Exec::default()).unwrap().prebisim;
    assert!(join_closed(&m, &m2, &best, &best, &set, WeakKind::Bisimulation).unwrap());
    let mut r = rng(23);
    let values = palette(Algebra::Godel);
    for _ in 0..40 {
        let a = best.meet(&random_mat(&mut r, 3, 2, &values)).unwrap();
        let b = best.meet(&random_mat(&mut r, 3, 2, &values)).unwrap();
        assert!(join_closed(&m, &m2, &a, &b, &set, WeakKind::Bisimulation).unwrap());
        assert!(join_closed(&m, &m2, &a, &b, &set, WeakKind::Simulation).unwrap());
    }
}

#[test]
fn compositions_stay_weak() {
    let mut r = rng(24);
    let values = palette(Algebra::Chain(3));
    let set = psi(&["p", "<>_1 p", "[]_1 (p -> <>_1 p)"]);
    for _ in 0..30 {
        let (m, m2) = random_pair(&mut r, Algebra::Chain(3), 3, &values);
        let shape = Shape { worlds: 2, indices: m.indices().len() as u32, variables: m.variables().count() };
        let m3 = random_model(&mut r, Algebra::Chain(3), "c", &shape, &values);
        for kind in [WeakKind::Simulation, WeakKind::Bisimulation] {
            let pick = |x: &fuzzy_kripke::weak::WeakReport| {
                if kind == WeakKind::Simulation {
                    x.presim.clone()
                } else {
                    x.prebisim.clone()
                }
            };
            let p1 = pick(&greatest_weak(&m, &m2, &set, Exec::default()).unwrap());
            let p2 = pick(&greatest_weak(&m2, &m3, &set, Exec::default()).unwrap());
            assert!(composition_closed([&m, &m2, &m3], &p1, &p2, &set, kind).unwrap());
        }
    }
}

#[test]
fn precondition_violations_are_reported() {
    let (m, m2) = pair("ex72");
    let set = psi(&["p"]);
    let ones = FuzzyMat::ones(3, 2);
    assert!(matches!(join_closed(&m, &m2, &ones, &ones, &set, WeakKind::Bisimulation), Err(WeakError::Precondition(_))));
    assert!(matches!(greatest_weak(&m, &m2, &[], Exec::default()), Err(WeakError::EmptyPsi)));
}

#[test]
fn reversal_transfers_through_the_dual_set() {
    let mut r = rng(25);
    let values = palette(Algebra::Chain(3));
    for _ in 0..15 {
        let (m, m2) = random_pair(&mut r, Algebra::Chain(3), 2, &values);
        for f in [Fragment::Plus, Fragment::Minus, Fragment::Full] {
            assert!(duality_transfer_fragment(&m, &m2, f, 1, Exec::default()).unwrap().holds());
        }
    }
    let (m, m2) = pair("ex71");
    assert!(duality_transfer(&m, &m2, &psi(&["<>_2 q -> []-_1 p", "q"]), Exec::default()).unwrap().holds());
}

#[test]
fn plus_formulas_of_depth_two_recover_the_forward_bisimulation() {
    let (m, m2) = pair("ex72");
    let set = enumerate(&EnumConfig::for_models(&m, &m2, Fragment::Plus, 2), &m, &m2).unwrap().formulas;
    let w = greatest_weak(&m, &m2, &set, Exec::default()).unwrap();
    let fb = greatest_pre(&m, &m2, SimType::Fb, Exec::default()).unwrap().relation;
    assert_eq!(w.prebisim, fb);
    assert!(w.wb1 && w.psi_equivalent);
    assert!(w.prebisim.leq(&w.presim).unwrap());
}
