use super::*;
use crate::region::Base;
use crate::setca::{generate_subalgebra, DEFAULT_CARRIER_CAP};
use crate::witness::{build_a, build_dilation, BlockedBase, ColorFamily};

fn powerset(base: usize, dim: usize) -> SetCA {
    let u = Region::full(base, dim).unwrap();
    let gens: Vec<Region> = u.indices().map(|t| Region::from_tuples(base, dim, [u.decode(t)]).unwrap()).collect();
    generate_subalgebra(&Base::numbered(base).unwrap(), dim, &gens).unwrap()
}

fn expect_witness(o: NeatOutcome) -> DilationWitness {
    match o {
        NeatOutcome::Witness(w) => w,
        other => panic!("expected a witness, got {other:?}"),
    }
}

fn toy() -> (BlockedBase, ColorFamily, SetCA) {
    let bb = BlockedBase::new(2, 2).unwrap();
    let cf = ColorFamily::cyclic(&bb, 2).unwrap();
    let a = build_a(&bb, &cf, DEFAULT_CARRIER_CAP).unwrap();
    (bb, cf, a)
}

#[test]
fn full_powerset_has_a_dilation() {
    let b = powerset(2, 2).abstractize(DEFAULT_CARRIER_CAP).unwrap();
    let w = expect_witness(dilation_search(&b, 2, 1, 2, DEFAULT_NODE_BUDGET).unwrap());
    assert_eq!(w.base.len(), 2);
    assert_eq!(w.source, WitnessSource::Search);
    // the full three-dimensional powerset over two points
    assert_eq!(w.dilation_atoms, 8);
    assert!(verify_dilation_witness(&b, &w).unwrap());
}

#[test]
fn degenerate_algebra_uses_the_empty_base() {
    let b = generate_subalgebra(&Base::empty(), 2, &[]).unwrap().abstractize(4).unwrap();
    let w = expect_witness(dilation_search(&b, 2, 1, 3, 10).unwrap());
    assert!(w.base.is_empty());
    assert!(verify_dilation_witness(&b, &w).unwrap());
}

#[test]
fn toy_algebra_found_by_search_and_by_hint() {
    let (bb, cf, a) = toy();
    let b = a.abstractize(DEFAULT_CARRIER_CAP).unwrap();
    let w = expect_witness(dilation_search(&b, 2, 1, bb.len(), DEFAULT_NODE_BUDGET).unwrap());
    assert!(w.base.len() <= bb.len());
    assert!(verify_dilation_witness(&b, &w).unwrap());

    let hint = Hint {
        base: a.base().clone(),
        atom_images: a.atoms().to_vec(),
    };
    let w = expect_witness(dilation_search_with_hints(&b, 2, 1, 0, 0, &[hint]).unwrap());
    assert_eq!(w.source, WitnessSource::Hint);
    let d = build_dilation(&bb, &cf, 1, DILATION_ATOM_CAP).unwrap();
    assert_eq!(w.dilation, d);
    assert!(verify_dilation_witness(&b, &w).unwrap());
}

#[test]
fn bases_too_small_are_refuted() {
    let b = powerset(3, 2).abstractize(DEFAULT_CARRIER_CAP).unwrap();
    match dilation_search(&b, 2, 1, 2, DEFAULT_NODE_BUDGET).unwrap() {
        NeatOutcome::Refutation(r) => {
            assert!(r.exhausted);
            assert_eq!(r.max_base, 2);
            assert_eq!(r.stats.bases_exhausted, vec![0, 1, 2]);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn budget_gives_inconclusive() {
    let b = powerset(3, 2).abstractize(DEFAULT_CARRIER_CAP).unwrap();
    match dilation_search(&b, 2, 1, 3, 2).unwrap() {
        NeatOutcome::Inconclusive(i) => {
            assert_eq!(i.stopped_at_base, 3);
            assert_eq!(i.budget, 2);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn permuted_map_is_rejected() {
    let (bb, _, a) = toy();
    let b = a.abstractize(DEFAULT_CARRIER_CAP).unwrap();
    let w = expect_witness(dilation_search(&b, 2, 1, bb.len(), DEFAULT_NODE_BUDGET).unwrap());
    let diag_atom = (0..w.atom_images.len())
        .find(|&x| w.atom_images[x].is_subset(&Region::diagonal(w.base.len(), 2, 0, 1).unwrap()))
        .unwrap();
    let off_atom = (0..w.atom_images.len())
        .find(|&x| w.atom_images[x].is_disjoint(&Region::diagonal(w.base.len(), 2, 0, 1).unwrap()))
        .unwrap();
    let mut bad = w.clone();
    bad.atom_images.swap(diag_atom, off_atom);
    assert!(!verify_dilation_witness(&b, &bad).unwrap());
    let defect = dilation_witness_defect(&b, &bad).unwrap().unwrap();
    assert_eq!(defect.check, "diagonal");
    assert!(defect.detail["tuple"].is_array());
}

#[test]
fn invalid_dilation_is_rejected() {
    let b = powerset(2, 2).abstractize(DEFAULT_CARRIER_CAP).unwrap();
    let w = expect_witness(dilation_search(&b, 2, 1, 2, DEFAULT_NODE_BUDGET).unwrap());
    // one atom for the whole space: not closed under the diagonals
    let mut bad = w.clone();
    bad.dilation = SetCA::from_atoms(w.base.clone(), 3, vec![Region::full(2, 3).unwrap()]).unwrap();
    bad.dilation_digest = json::digest(&bad.dilation);
    assert!(!verify_dilation_witness(&b, &bad).unwrap());
}

#[test]
fn dimension_mismatch_is_an_error() {
    let b = powerset(2, 2).abstractize(DEFAULT_CARRIER_CAP).unwrap();
    assert!(dilation_search(&b, 3, 1, 2, 10).is_err());
}
