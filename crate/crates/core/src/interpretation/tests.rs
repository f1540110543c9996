use proptest::prelude::*;

use super::*;
use crate::setca::DEFAULT_CARRIER_CAP;
use crate::witness::{build_a, p_region, ColorFamily};

fn toy() -> (BlockedBase, SetCA, ProductBA) {
    let bb = BlockedBase::new(2, 2).unwrap();
    let cf = ColorFamily::cyclic(&bb, 2).unwrap();
    let a = build_a(&bb, &cf, DEFAULT_CARRIER_CAP).unwrap();
    let p = ProductBA::new(&a, &bb).unwrap();
    (bb, a, p)
}

fn v_index(p: &ProductBA, u: &[usize]) -> usize {
    p.index_set().iter().position(|w| w == u).unwrap()
}

#[test]
fn f_of_constants_and_generators() {
    let (bb, a, p) = toy();
    assert_eq!(p.f_map(&a, &a.zero()).unwrap(), p.zero());
    assert_eq!(p.f_map(&a, &a.unit()).unwrap(), p.one());
    let cf = ColorFamily::cyclic(&bb, 2).unwrap();
    let g = p_region(&[0, 1], 1, &cf, &bb).unwrap();
    let fg = p.f_map(&a, &g).unwrap();
    let id = v_index(&p, &[0, 1]);
    assert_eq!(p.support(&fg), 1 << id);
    assert!(p.f_map(&a, &Region::from_tuples(4, 2, [[0, 2]]).unwrap()).is_err());
}

#[test]
fn f_from_regions_matches_atom_table() {
    let (_, a, p) = toy();
    for m in 0..a.carrier_size().unwrap() as u64 {
        assert_eq!(p.f_map(&a, &a.element(m)).unwrap(), p.f_mask(m));
    }
}

#[test]
fn t_s_examples() {
    let (_, _, p) = toy();
    assert_eq!(t_s(&[], 0, &p).unwrap(), p.zero());
    let s = v_index(&p, &[0, 1]);
    let expected = p.join(&p.unit_at(s), &p.unit_at(v_index(&p, &[1, 1])));
    assert_eq!(t_s(&[s], 0, &p).unwrap(), expected);
    let all: Vec<usize> = (0..4).collect();
    assert_eq!(t_s(&all, 1, &p).unwrap(), p.one());
    assert!(t_s(&[0], 2, &p).is_err());
    assert!(t_s(&[9], 0, &p).is_err());
}

proptest! {
    #[test]
    fn t_s_is_monotone(s in 0u64..16, extra in 0u64..16, i in 0usize..2) {
        let (_, _, p) = toy();
        let small = p.t_s(s, i);
        let big = p.t_s(s | extra, i);
        prop_assert_eq!(p.meet(&small, &big), small);
    }
}

#[test]
fn evaluation_examples() {
    let (_, a, p) = toy();
    let mut asg = Assignment::new();
    let fd = p.f_map(&a, &a.diagonal(0, 1).unwrap()).unwrap();
    asg.insert("x".into(), fd.clone());
    let x = Term::var("x");
    assert!(eval_formula(&p, &QFFormula::Eq(x.clone(), x.clone()), &asg).unwrap());
    assert!(eval_formula(&p, &QFFormula::Eq(x.clone(), Term::Diag(0, 1)), &asg).unwrap());
    asg.insert("x".into(), p.one());
    assert!(!eval_formula(&p, &QFFormula::Eq(x.clone(), Term::Diag(0, 1)), &asg).unwrap());
    let unbound = QFFormula::Eq(Term::var("z"), Term::Zero);
    assert!(matches!(eval_formula(&p, &unbound, &asg), Err(Error::UnboundVariable(v)) if v == "z"));
    assert!(eval_formula(&p, &QFFormula::And(vec![]), &asg).unwrap());
    assert!(!eval_formula(&p, &QFFormula::Or(vec![]), &asg).unwrap());
}

#[test]
fn expanded_eta_agrees_with_lazy_eta() {
    let (_, a, p) = toy();
    let image: Vec<ProductElem> = (0..a.carrier_size().unwrap() as u64).map(|m| p.f_mask(m)).collect();
    for i in 0..2 {
        let full = eta_formula(i, &p, "x", "y", DEFAULT_V_CAP).unwrap();
        let QFFormula::And(conj) = &full else { panic!() };
        assert_eq!(conj.len(), 16);
        let lazy = QFFormula::Eta {
            i,
            x: Term::var("x"),
            y: Term::var("y"),
        };
        for x in &image {
            let mut asg = Assignment::new();
            asg.insert("x".into(), x.clone());
            asg.insert("y".into(), p.zero());
            let true_antecedents = conj
                .iter()
                .filter(|c| {
                    let QFFormula::Or(parts) = c else { panic!() };
                    !eval_formula(&p, &parts[0], &asg).unwrap()
                })
                .count();
            assert_eq!(true_antecedents, 1);
            for y in &image {
                asg.insert("y".into(), y.clone());
                assert_eq!(eval_formula(&p, &full, &asg).unwrap(), eval_formula(&p, &lazy, &asg).unwrap());
            }
        }
    }
    assert!(matches!(eta_formula(0, &p, "x", "y", 3), Err(Error::IndexSetCap { size: 4, cap: 3 })));
}

#[test]
fn eta_at_zero_and_one() {
    let (_, _, p) = toy();
    let phi = QFFormula::Eta {
        i: 0,
        x: Term::var("x"),
        y: Term::var("y"),
    };
    let mut asg = Assignment::new();
    asg.insert("x".into(), p.zero());
    asg.insert("y".into(), p.zero());
    assert!(eval_formula(&p, &phi, &asg).unwrap());
    asg.insert("y".into(), p.one());
    assert!(!eval_formula(&p, &phi, &asg).unwrap());
    asg.insert("x".into(), p.one());
    assert!(eval_formula(&p, &phi, &asg).unwrap());
}

#[test]
fn toy_interpretation_passes() {
    let (_, a, p) = toy();
    let cert = verify_interpretation(&a, &p, DEFAULT_CARRIER_CAP).unwrap();
    assert!(cert.passed(), "{cert:?}");
    assert_eq!(cert.eta.len(), 2);
    assert_eq!(cert.carrier_size, a.carrier_size().unwrap());
}

#[test]
fn minimal_algebra_interpretation_passes() {
    let bb = BlockedBase::new(2, 2).unwrap();
    let cf = ColorFamily::empty(&bb, 2).unwrap();
    let a = build_a(&bb, &cf, DEFAULT_CARRIER_CAP).unwrap();
    let p = ProductBA::new(&a, &bb).unwrap();
    assert!(verify_interpretation(&a, &p, DEFAULT_CARRIER_CAP).unwrap().passed());
}

#[test]
fn wrong_diagonal_constant_is_caught() {
    let (_, a, mut p) = toy();
    let one = p.one();
    p.set_diag(0, 1, one);
    let cert = verify_interpretation(&a, &p, DEFAULT_CARRIER_CAP).unwrap();
    assert!(!cert.passed());
    assert!(!cert.diagonal_definable.passed);
    assert!(cert.diagonal_definable.counterexample.is_some());
}

#[test]
fn index_set_cap() {
    let (bb, a, _) = toy();
    assert!(matches!(ProductBA::with_cap(&a, &bb, 3), Err(Error::IndexSetCap { size: 4, cap: 3 })));
}
