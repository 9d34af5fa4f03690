use num_rational::BigRational;
use num_traits::Zero;

use super::*;
use crate::geometry::{Letter, ReducedWord, TreePath, VertexSet};
use crate::rational::parse_rational;

fn w(s: &str) -> ReducedWord {
    s.parse().unwrap()
}

fn q(s: &str) -> BigRational {
    parse_rational(s).unwrap()
}

fn zeros_of(base: &str, steps: &str) -> VertexSet {
    TreePath::from_steps_str(&w(base), steps).unwrap().vertex_set()
}

fn desk() -> RuleParams {
    RuleParams::desk()
}

#[test]
fn params_validate() {
    assert!(RuleParams::paper().validate().is_ok());
    let mut p = RuleParams::desk();
    p.bad_weight = q("1");
    assert!(p.validate().is_err());
    let mut p = RuleParams::desk();
    p.dogleg_bound = 4;
    assert!(p.validate().is_err());
    assert_eq!(RuleParams::paper().dogleg_bound, 9);
    assert_eq!(RuleParams::paper().classification_horizon(), 120);
}

#[test]
fn locally_good_examples() {
    let p = desk();
    let ones = Configuration::all_ones();
    assert!(!RuleEngine::new(&ones, &p).is_locally_good(&w("e")).unwrap());

    let run = Configuration::padded(zeros_of("BB", "bbbb"));
    assert!(RuleEngine::new(&run, &p).is_locally_good(&w("e")).unwrap());

    let turn = Configuration::padded(zeros_of("BB", "bbabb"));
    assert!(!RuleEngine::new(&turn, &p).is_locally_good(&w("e")).unwrap());
}

#[test]
fn locally_good_needs_domain() {
    let p = desk();
    let cfg = Configuration::on_ball(w("e"), 3, zeros_of("B", "bb")).unwrap();
    let err = RuleEngine::new(&cfg, &p).is_locally_good(&w("e")).unwrap_err();
    assert!(matches!(err, crate::error::RuleError::InsufficientDomain { .. }));
}

#[test]
fn f_circ_examples() {
    let p = desk();
    let ones = Configuration::all_ones();
    let eng = RuleEngine::new(&ones, &p);
    for s in Letter::ALL {
        assert!(eng.f_circ(s, &w("e")).unwrap().is_zero());
    }
    let run = Configuration::padded(zeros_of("BB", "bbbb"));
    let eng = RuleEngine::new(&run, &p);
    assert_eq!(eng.f_circ(Letter::B, &w("e")).unwrap(), q("1"));
    assert_eq!(eng.f_circ(Letter::A, &w("e")).unwrap(), q("2"));
    assert_eq!(eng.f_circ(Letter::AInv, &w("e")).unwrap(), q("2"));
}

#[test]
fn good_end_quirk() {
    // e is the end of the zero run, path continuing upwards
    let p = desk();
    let cfg = Configuration::padded(zeros_of("e", "bbbbbb"));
    let eng = RuleEngine::new(&cfg, &p);
    assert!(eng.is_locally_good(&w("e")).unwrap());
    assert!(eng.f_s(Letter::B, &w("e")).unwrap().is_zero());
    assert!(eng.f_s(Letter::BInv, &w("e")).unwrap().is_zero());
    assert_eq!(eng.f_s(Letter::A, &w("e")).unwrap(), q("2"));
    assert_eq!(eng.g_s(Letter::B, &w("b")).unwrap(), q("2"));
}

#[test]
fn w_threshold() {
    let p = desk();
    let four = Configuration::padded(zeros_of("e", "bbb"));
    let eng = RuleEngine::new(&four, &p);
    assert!(eng.in_e(&w("b")).unwrap());
    assert!(!eng.in_w(&w("b")).unwrap());
    for s in Letter::ALL {
        assert!(eng.f_s(s, &w("b")).unwrap().is_zero());
    }
    let nine = Configuration::padded(zeros_of("e", "bbbbbbbb"));
    assert!(RuleEngine::new(&nine, &p).in_w(&w("bbbb")).unwrap());
}

#[test]
fn edge_weights_on_a_run() {
    let p = desk();
    let cfg = Configuration::padded(zeros_of("e", "bbbbbb"));
    let eng = RuleEngine::new(&cfg, &p);
    assert_eq!(eng.edge_weight(&w("bbb"), Letter::A).unwrap(), q("2"));
    assert_eq!(eng.edge_weight(&w("bbb"), Letter::B).unwrap(), q("2"));
    assert!(eng.edge_weight(&w("e"), Letter::BInv).unwrap().is_zero());
    assert_eq!(eng.edge_weight(&w("e"), Letter::AInv).unwrap(), q("2"));
    for g in [w("e"), w("bb"), w("bbba")] {
        for s in Letter::ALL {
            assert_eq!(eng.edge_weight(&g, s).unwrap(), eng.edge_weight(&g.mul_letter(s), s.inverse()).unwrap());
        }
    }
}

#[test]
fn single_component() {
    let p = desk();
    let cfg = Configuration::padded(zeros_of("e", "bbbbbb"));
    let comps = RuleEngine::new(&cfg, &p).components_e().unwrap();
    assert_eq!(comps.len(), 1);
    assert_eq!(comps[0].central.vertex_count(), 7);
    let t: Vec<String> = comps[0].excluded.iter().map(|v| v.to_string()).collect();
    assert_eq!(t, vec!["bbbbbbb", "B"]);
    assert_eq!(comps[0].vertices.len(), 3 * 7 + 2 - 2);
    assert!(RuleEngine::new(&Configuration::all_ones(), &p).components_e().unwrap().is_empty());
}

#[test]
fn nearby_paths_spoil_goodness_only_near_each_other() {
    let p = desk();
    // two vertical runs joined at distance 2 (through a^2) and 3 (through a^3)
    let mut close = zeros_of("BBBBBBBB", "bbbbbbbbbbbbbbbb");
    close.extend(zeros_of("aaBBBBBBBB", "bbbbbbbbbbbbbbbb"));
    let cfg = Configuration::padded(close);
    let eng = RuleEngine::new(&cfg, &p);
    assert!(!eng.is_locally_good(&w("e")).unwrap());
    assert!(!eng.is_locally_good(&w("aa")).unwrap());
    assert!(eng.is_locally_good(&w("bbbbb")).unwrap());
    let comps = eng.components_e().unwrap();
    assert_eq!(comps.len(), 4);

    let mut far = zeros_of("BBBBBBBB", "bbbbbbbbbbbbbbbb");
    far.extend(zeros_of("aaaBBBBBBBB", "bbbbbbbbbbbbbbbb"));
    let cfg = Configuration::padded(far);
    let eng = RuleEngine::new(&cfg, &p);
    assert!(eng.is_locally_good(&w("e")).unwrap());
    let comps = eng.components_e().unwrap();
    assert_eq!(comps.len(), 2);
    let (a, b) = (&comps[0].vertices, &comps[1].vertices);
    assert!(a.iter().all(|x| b.iter().all(|y| x.distance(y) >= 1)));
    assert!(a.iter().any(|x| b.iter().any(|y| x.distance(y) == 1)));
    for s in Letter::ALL {
        assert!(eng.edge_weight(&w("a"), s).unwrap().is_zero() || s == Letter::AInv);
    }
}

#[test]
fn short_bridge_has_two_witnesses() {
    let p = desk();
    let cfg = Configuration::padded(zeros_of("B", "bb"));
    let eng = RuleEngine::new(&cfg, &p);
    assert_eq!(eng.bad_weight_witnesses(&w("e")).unwrap().len(), 2);
    assert_eq!(eng.f_circ(Letter::B, &w("e")).unwrap(), q("1/100"));
    assert!(eng.is_inert(&w("e")).unwrap());
}

#[test]
fn classify_inert_and_run() {
    let p = desk();
    let h = p.classification_horizon();
    let ones = Configuration::on_ball(w("e"), h, VertexSet::new()).unwrap();
    assert_eq!(classify(&ones, &p).unwrap().label, ClassLabel::Inert);

    let cfg = Configuration::on_ball(w("e"), h, zeros_of("BBB", "bbbbbb")).unwrap();
    let c = classify(&cfg, &p).unwrap();
    assert_eq!(c.label, ClassLabel::OneOne);
    let inner = c.inner.unwrap();
    assert_eq!(inner.vertex_set(), zeros_of("BBB", "bbbbbb"));
    assert_eq!(c.outer.unwrap(), inner);
    assert!(c.exterior_zeros.unwrap().is_empty());
}

#[test]
fn classify_fork() {
    let p = desk();
    let mut zeros = zeros_of("BBBBBBBBBB", "bbbbbbbbbbbb");
    zeros.insert(w("bba"));
    zeros.insert(w("bbb"));
    let cfg = Configuration::on_ball(w("e"), 40, zeros).unwrap();
    let eng = RuleEngine::new(&cfg, &p);
    let c = classify_at(&eng, &w("BBBBB")).unwrap();
    assert_eq!(c.label, ClassLabel::OneTwo);
    let inner = c.inner.clone().unwrap();
    assert_eq!(inner.base(), &w("BBBBBBBBBB"));
    assert_eq!(inner.last(), w("BB"));
    assert_eq!(c.bad_neighbours, vec![w("B")]);
    let outer = c.outer.clone().unwrap();
    assert_eq!(outer.last(), w("b"));
    assert_eq!(outer.vertex_count(), inner.vertex_count() + 3);
    assert!(eng.edge_weight(&w("BB"), Letter::B).unwrap() == q("101/100"));
}

#[test]
fn undetermined_when_window_too_small() {
    let p = desk();
    let zeros = zeros_of("BBBBBBBBBBBBBBBBBBBB", &"b".repeat(40)).into_iter().filter(|z| z.len() <= 12).collect();
    let cfg = Configuration::on_ball(w("e"), 12, zeros).unwrap();
    assert_eq!(classify(&cfg, &p).unwrap().label, ClassLabel::Undetermined);
}

#[test]
fn shift_equivariance() {
    let p = desk();
    let mut zeros = zeros_of("BBBBBBBB", "bbbbbbbbbb");
    zeros.insert(w("bbba"));
    let cfg = Configuration::padded(zeros);
    let eng = RuleEngine::new(&cfg, &p);
    for g in ["BBBB", "BBBBBa", "BBBBBBBB", "B", "BBBBBBBBB"] {
        let g = w(g);
        let direct = classify_at(&eng, &g).unwrap();
        let moved = classify(&cfg.shifted(&g), &p).unwrap();
        assert_eq!(direct.label, moved.label);
        let back = moved.inner.map(|p| p.translate(&g));
        assert_eq!(direct.inner, back);
    }
}
