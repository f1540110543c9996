use proptest::prelude::*;
use proptest::strategy::Strategy as _;

use super::*;
use super::Strategy;
use crate::error::Error;
use crate::interpretation::ProductBA;
use crate::setca::DEFAULT_CARRIER_CAP;
use crate::witness::{build_a, BlockedBase, ColorFamily};

/// Plays the game directly, with no types or tables.
fn naive(m1: &RelStructure, m2: &RelStructure, t1: &mut Vec<u32>, t2: &mut Vec<u32>, r: usize) -> bool {
    if !partial_iso(m1, m2, t1, t2) {
        return false;
    }
    if r == 0 {
        return true;
    }
    let step = |x1: u32, x2: u32, t1: &mut Vec<u32>, t2: &mut Vec<u32>| {
        t1.push(x1);
        t2.push(x2);
        let ok = naive(m1, m2, t1, t2, r - 1);
        t1.pop();
        t2.pop();
        ok
    };
    (0..m1.size as u32).all(|a| (0..m2.size as u32).any(|b| step(a, b, t1, t2)))
        && (0..m2.size as u32).all(|b| (0..m1.size as u32).any(|a| step(a, b, t1, t2)))
}

fn naive_winner(m1: &RelStructure, m2: &RelStructure, q: usize) -> Winner {
    let (mut t1, mut t2) = (m1.constant_values(), m2.constant_values());
    if naive(m1, m2, &mut t1, &mut t2, q) {
        Winner::Duplicator
    } else {
        Winner::Spoiler
    }
}

fn ba(atoms: usize) -> RelStructure {
    RelStructure::boolean_algebra(atoms, &[]).unwrap()
}

fn play(m1: &RelStructure, m2: &RelStructure, q: usize) -> GameCertificate {
    let g = ef_winner(m1, m2, q, &[], DEFAULT_GAME_BUDGET).unwrap();
    assert!(replay(m1, m2, &g).unwrap(), "certificate does not replay");
    g
}

#[test]
fn identical_structures() {
    let m = ba(2);
    let g = play(&m, &m, 3);
    assert_eq!(g.winner, Winner::Duplicator);
    assert_eq!(g.strategy, Strategy::Identity);
    assert!(theory_compare(&m, &m, 3).unwrap().equivalent);
}

#[test]
fn two_versus_four_element_algebras() {
    let (m2, m4) = (ba(1), ba(2));
    assert_eq!(play(&m2, &m4, 0).winner, Winner::Duplicator);
    for q in 1..=2 {
        let g = play(&m2, &m4, q);
        assert_eq!(g.winner, Winner::Spoiler);
        assert_eq!(naive_winner(&m2, &m4, q), Winner::Spoiler);
        assert!(!theory_compare(&m2, &m4, q).unwrap().equivalent);
    }
}

#[test]
fn four_versus_eight_needs_more_rounds() {
    let (m4, m8) = (ba(2), ba(3));
    for q in 0..=3 {
        let g = play(&m4, &m8, q);
        assert_eq!(g.winner, naive_winner(&m4, &m8, q), "q = {q}");
        assert_eq!(g.winner == Winner::Duplicator, theory_compare(&m4, &m8, q).unwrap().equivalent);
    }
}

#[test]
fn constants_separate_at_rank_zero() {
    let m = |v| RelStructure::boolean_algebra(2, &[("c".to_string(), v)]).unwrap();
    let g = play(&m(1), &m(3), 0);
    assert_eq!(g.winner, Winner::Spoiler);
    assert_eq!(g.strategy, Strategy::Spoiler(SpoilerNode::Violation));
    assert!(!theory_compare(&m(1), &m(3), 0).unwrap().equivalent);
    // the two atoms are indistinguishable without parameters
    assert_eq!(play(&m(1), &m(2), 3).winner, Winner::Duplicator);
}

#[test]
fn permuted_copy_and_tampering() {
    let m = ba(2);
    let swapped = m.permuted(&[3, 1, 2, 0]).unwrap();
    let g = play(&m, &swapped, 2);
    assert_eq!(g.winner, Winner::Duplicator);
    let Strategy::Duplicator(node) = &g.strategy else { panic!("expected a table") };
    assert_eq!((node.forth[0], node.forth[3]), (3, 0));
    let mut bad = g.clone();
    if let Strategy::Duplicator(n) = &mut bad.strategy {
        n.forth[0] = 1;
    }
    assert!(!replay(&m, &swapped, &bad).unwrap());
    let mut liar = g.clone();
    liar.winner = Winner::Spoiler;
    assert!(!replay(&m, &swapped, &liar).unwrap());
    let json = serde_json::to_string(&g).unwrap();
    let back: GameCertificate = serde_json::from_str(&json).unwrap();
    assert!(replay(&m, &swapped, &back).unwrap());
}

#[test]
fn start_map_that_is_not_partial_iso() {
    let m = ba(2);
    let g = ef_winner(&m, &m, 1, &[(1, 3)], DEFAULT_GAME_BUDGET).unwrap();
    assert_eq!(g.winner, Winner::Spoiler);
    assert!(replay(&m, &m, &g).unwrap());
}

#[test]
fn budget_is_enforced() {
    let err = ef_winner(&ba(3), &ba(4), 2, &[], 10).unwrap_err();
    assert!(matches!(err, Error::Budget { budget: 10, .. }));
}

#[test]
fn theory_limits() {
    assert!(theory_compare(&ba(4), &ba(4), 1).is_err());
    assert!(theory_compare(&ba(1), &ba(1), 4).is_err());
}

#[test]
fn closure_of_constants() {
    let m = RelStructure::boolean_algebra(3, &[("c".to_string(), 1)]).unwrap();
    assert_eq!(closure(&m, []), vec![0, 1, 6, 7]);
    assert_eq!(closure(&m, [2]), vec![0, 1, 2, 3, 4, 5, 6, 7]);
}

#[test]
fn subalgebra_at_rank_zero_is_minimal() {
    let c = find_q_subalgebra(&ba(2), 0, 1, 1000).unwrap();
    assert!(!c.improper);
    assert_eq!(c.elements, vec![0, 3]);
}

#[test]
fn subalgebra_of_four_element_algebra() {
    let m = ba(2);
    let c = find_q_subalgebra(&m, 1, 1, 1000).unwrap();
    // only {0, 1} is proper, and the parameter 1 is then an atom on one side only
    assert!(c.improper);
    assert_eq!(c.elements, vec![0, 1, 2, 3]);
    let (ok, games) = q_elementary(&m, &[0, 3], 1, 1, DEFAULT_GAME_BUDGET).unwrap();
    assert!(!ok);
    let last = games.last().unwrap();
    assert_eq!(last.winner, Winner::Spoiler);
    assert!(replay(&m.substructure(&[0, 3]).unwrap(), &m, last).unwrap());
}

#[test]
fn subalgebra_found_in_larger_algebra() {
    // with a parameter, `0 < x < b` fails in a proper subalgebra at any of its
    // atoms that is not an atom of the whole algebra
    let m = ba(4);
    assert!(find_q_subalgebra(&m, 1, 1, 1000).unwrap().improper);
    let c = find_q_subalgebra(&m, 1, 0, 1000).unwrap();
    assert_eq!(c.elements, vec![0, 1, 14, 15]);
    let sub = m.substructure(&c.elements).unwrap();
    assert!(c.games.iter().all(|g| replay(&sub, &m, g).unwrap()));
    assert!(c.games.iter().all(|g| g.winner == Winner::Duplicator));
    assert!(!c.improper);
    assert!(c.elements.len() < 16);
}

#[test]
fn named_elements_force_improper() {
    let extras: Vec<(String, u32)> = (0..4).map(|v| (format!("e{v}"), v)).collect();
    let m = RelStructure::boolean_algebra(2, &extras).unwrap();
    let c = find_q_subalgebra(&m, 2, 1, 1000).unwrap();
    assert!(c.improper);
    assert_eq!(c.candidates_examined, 0);
}

fn toy() -> (crate::setca::SetCA, ProductBA) {
    let bb = BlockedBase::new(2, 2).unwrap();
    let cf = ColorFamily::cyclic(&bb, 2).unwrap();
    let a = build_a(&bb, &cf, DEFAULT_CARRIER_CAP).unwrap();
    let p = ProductBA::new(&a, &bb).unwrap();
    (a, p)
}

#[test]
fn interpreting_p_gives_back_a() {
    let (a, p) = toy();
    let id = identity_index(&p).unwrap();
    let full: Vec<u64> = (0..1u64 << p.factor_atoms(id).len()).collect();
    let (elements, q) = build_q(&full, &p).unwrap();
    assert_eq!(elements.len(), a.carrier_size().unwrap());
    assert_eq!(q.size, elements.len());
    let b = apply_interpretation(&elements, &p).unwrap();
    assert!(is_f_isomorphism(&a, &b, &elements, &p).unwrap());
    assert!(crate::axioms::check_ca_axioms(&b).unwrap().passed());
    let g = check_equiv(&b, &a.abstractize(DEFAULT_CARRIER_CAP).unwrap(), 2, DEFAULT_GAME_BUDGET).unwrap();
    assert_eq!(g.winner, Winner::Duplicator);
}

#[test]
fn minimal_id_component() {
    let (a, p) = toy();
    let factor = id_factor(&p).unwrap();
    let b_id: Vec<u64> = closure(&factor, []).into_iter().map(u64::from).collect();
    let (elements, q) = build_q(&b_id, &p).unwrap();
    let (_, full) = build_q(&(0..factor.size as u64).collect::<Vec<_>>(), &p).unwrap();
    assert!(q.size < full.size);
    // the inclusion is a substructure embedding
    let idx: Vec<u32> = elements.iter().map(|e| flat_index(&p, e) as u32).collect();
    assert_eq!(full.substructure(&idx).unwrap(), q);
    let b = apply_interpretation(&elements, &p).unwrap();
    assert!(crate::axioms::check_ca_axioms(&b).unwrap().passed());
    assert!(b.size() < a.carrier_size().unwrap());
}

#[test]
fn missing_cylinder_value_is_a_closure_failure() {
    let (_, p) = toy();
    let size = product_size(&p, DEFAULT_CARRIER_CAP).unwrap();
    let t = p.t_s(1, 0);
    let elements: Vec<_> = (0..size).map(|k| from_flat(&p, k)).filter(|e| *e != t).collect();
    assert!(matches!(apply_interpretation(&elements, &p), Err(Error::ClosureFailure { .. })));
}

#[test]
fn flipped_diagonal_is_seen_at_rank_zero() {
    let (a, _) = toy();
    let abs = a.abstractize(DEFAULT_CARRIER_CAP).unwrap();
    let mut diag = abs.diagonal_table().to_vec();
    diag[1] = abs.complement(diag[1]);
    let b = crate::AbstractCA::from_tables(
        2,
        abs.size(),
        abs.meet_table().to_vec(),
        abs.complement_table().to_vec(),
        vec![abs.cyl_table(0).to_vec(), abs.cyl_table(1).to_vec()],
        abs.zero(),
        abs.one(),
        diag,
    )
    .unwrap();
    assert_eq!(check_equiv(&b, &abs, 0, DEFAULT_GAME_BUDGET).unwrap().winner, Winner::Spoiler);
    assert_eq!(check_equiv(&abs, &abs, 3, DEFAULT_GAME_BUDGET).unwrap().strategy, Strategy::Identity);
}

fn small_structure() -> impl proptest::strategy::Strategy<Value = RelStructure> {
    (1usize..=4).prop_flat_map(|n| {
        (
            proptest::collection::vec(0..n as u32, n),
            proptest::collection::btree_set((0..n as u32, 0..n as u32), 0..=n * n),
            0..n as u32,
        )
            .prop_map(move |(f, r, c)| {
                RelStructure::new(n)
                    .with_function("f", 1, f)
                    .unwrap()
                    .with_relation("r", 2, r.into_iter().map(|(a, b)| vec![a, b]))
                    .unwrap()
                    .with_constant("c", c)
                    .unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn three_oracles_agree(m1 in small_structure(), m2 in small_structure(), q in 0usize..=2) {
        let g = ef_winner(&m1, &m2, q, &[], DEFAULT_GAME_BUDGET).unwrap();
        prop_assert!(replay(&m1, &m2, &g).unwrap());
        prop_assert_eq!(g.winner, naive_winner(&m1, &m2, q));
        prop_assert_eq!(g.winner == Winner::Duplicator, theory_compare(&m1, &m2, q).unwrap().equivalent);
    }

    #[test]
    fn symmetric_and_monotone(m1 in small_structure(), m2 in small_structure(), q in 1usize..=3) {
        let w = ef_winner(&m1, &m2, q, &[], DEFAULT_GAME_BUDGET).unwrap().winner;
        prop_assert_eq!(w, ef_winner(&m2, &m1, q, &[], DEFAULT_GAME_BUDGET).unwrap().winner);
        if w == Winner::Duplicator {
            for r in 0..q {
                prop_assert_eq!(ef_winner(&m1, &m2, r, &[], DEFAULT_GAME_BUDGET).unwrap().winner, Winner::Duplicator);
            }
        }
    }

    #[test]
    fn permuted_copies_are_equivalent(m in small_structure(), q in 0usize..=3, seed in any::<u64>()) {
        use rand::{seq::SliceRandom, SeedableRng};
        let mut perm: Vec<u32> = (0..m.size as u32).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let p = m.permuted(&perm).unwrap();
        let g = ef_winner(&m, &p, q, &[], DEFAULT_GAME_BUDGET).unwrap();
        prop_assert_eq!(g.winner, Winner::Duplicator);
        prop_assert!(replay(&m, &p, &g).unwrap());
    }
}
