use super::*;
use crate::axioms::check_set_algebra;
use crate::error::Error;
use crate::region::Region;
use crate::setca::{neat_reduct, DEFAULT_CARRIER_CAP};

fn params(depth: usize) -> SaturationParams {
    SaturationParams::new(1, depth, 2).unwrap()
}

#[test]
fn depth_zero_is_vacuous() {
    let (bb, cf) = build_colored_structure(2, params(0), 3, 0).unwrap();
    assert_eq!(bb.len(), 4);
    assert!(cf.is_empty());
    let cert = check_conditions(&bb, &cf, &params(0));
    assert!(cert.passed());
    assert_eq!(cert.saturation.verdict, Verdict::Vacuous);
    assert_eq!(cert.closure.verdict, Verdict::Vacuous);
}

#[test]
fn one_color_is_exhausted() {
    let err = build_colored_structure(2, params(1), 1, 0).unwrap_err();
    assert!(matches!(err, Error::Exhausted { .. }), "{err}");
}

#[test]
fn two_colors_are_exhausted_at_n2() {
    let err = build_colored_structure(2, params(1), 2, 0).unwrap_err();
    let Error::Exhausted { demand } = err else { panic!("{err}") };
    assert!(demand.contains("cosmall"), "{demand}");
}

#[test]
fn rejects_n_below_two() {
    assert!(build_colored_structure(1, params(1), 3, 0).is_err());
}

#[test]
fn three_colors_build_and_check() {
    let out = build_with_budget(2, params(1), 3, 0, DEFAULT_POINT_BUDGET).unwrap();
    let cert = check_conditions(&out.base, &out.colors, &params(1));
    assert!(cert.passed(), "{cert:?}");
    assert_eq!(cert.saturation.verdict, Verdict::Pass);
    assert_eq!(cert.closure.verdict, Verdict::Pass);
    assert!(cert.saturation.checked > 0);
    assert_eq!(out.report.points, out.base.len());
    assert!(all_transversal(&out.colors, &out.base));
}

#[test]
fn builder_is_deterministic() {
    let a = build_colored_structure(2, params(1), 3, 7).unwrap();
    let b = build_colored_structure(2, params(1), 3, 7).unwrap();
    assert_eq!(serde_json::to_string(&a.1).unwrap(), serde_json::to_string(&b.1).unwrap());
    assert_eq!(a.0, b.0);
}

#[test]
fn injected_faults_are_caught() {
    let bb = BlockedBase::new(2, 2).unwrap();
    let good = ColorFamily::cyclic(&bb, 2).unwrap();
    assert!(check_conditions(&bb, &good, &params(0)).passed());

    let mut overlap = good.colors().to_vec();
    overlap[1].insert(&[0, 2]);
    let cf = ColorFamily::from_regions(&bb, overlap).unwrap();
    let cert = check_conditions(&bb, &cf, &params(0));
    assert_eq!(cert.disjoint.verdict, Verdict::Fail);
    assert!(cert.disjoint.counterexample.is_some());

    let mut off = good.colors().to_vec();
    off[0].insert(&[0, 1]);
    let cf = ColorFamily::from_regions(&bb, off).unwrap();
    let cert = check_conditions(&bb, &cf, &params(0));
    assert_eq!(cert.transversal.verdict, Verdict::Fail);

    let mut half = good.colors().to_vec();
    half[0].remove(&[2, 0]);
    let cf = ColorFamily::from_regions(&bb, half).unwrap();
    assert_eq!(check_conditions(&bb, &cf, &params(0)).permutation_closed.verdict, Verdict::Fail);
}

#[test]
fn uncolored_witnesses_fail_saturation() {
    let (bb, cf) = build_colored_structure(2, params(1), 3, 0).unwrap();
    let blank = ColorFamily::empty(&bb, 3).unwrap();
    assert!(check_conditions(&bb, &cf, &params(1)).passed());
    let cert = check_conditions(&bb, &blank, &params(1));
    assert_eq!(cert.saturation.verdict, Verdict::Fail);
    assert!(cert.saturation.counterexample.is_some());
}

#[test]
fn empty_colors_give_minimal_algebras() {
    let bb = BlockedBase::new(2, 2).unwrap();
    let cf = ColorFamily::empty(&bb, 2).unwrap();
    let a = build_a(&bb, &cf, DEFAULT_CARRIER_CAP).unwrap();
    assert_eq!(a.atom_count(), 2);
    for k in 0..3 {
        let d = build_dilation(&bb, &cf, k, DEFAULT_ATOM_CAP).unwrap();
        assert_eq!(neat_reduct(&d, 2).unwrap(), a);
    }
}

#[test]
fn toy_family_algebra_and_dilation() {
    let bb = BlockedBase::new(2, 2).unwrap();
    let cf = ColorFamily::cyclic(&bb, 2).unwrap();
    let a = build_a(&bb, &cf, DEFAULT_CARRIER_CAP).unwrap();
    assert!(check_set_algebra(&a, DEFAULT_CARRIER_CAP).unwrap().passed());
    for g in generators(&bb, &cf).unwrap() {
        assert!(a.contains(&g));
    }
    let d = build_dilation(&bb, &cf, 1, DEFAULT_ATOM_CAP).unwrap();
    assert_eq!(d.dim(), 3);
    assert_eq!(neat_reduct(&d, 2).unwrap(), a);
    assert_eq!(build_dilation(&bb, &cf, 0, DEFAULT_ATOM_CAP).unwrap(), a);
}

#[test]
fn built_algebra_has_the_expected_shape() {
    let (bb, cf) = build_colored_structure(2, params(1), 3, 0).unwrap();
    let a = build_a(&bb, &cf, DEFAULT_CARRIER_CAP).unwrap();
    assert!(a.atom_count() <= 12);
    let full = Region::full(bb.len(), 2).unwrap();
    assert_eq!(a.unit(), full);
    let d = build_dilation(&bb, &cf, 1, DEFAULT_ATOM_CAP).unwrap();
    assert_eq!(neat_reduct(&d, 2).unwrap(), a);
}
