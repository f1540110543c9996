use std::collections::HashMap;

use serde::Serialize;
use serde_json::{json, Value};

use super::formula::{eval_formula, Assignment, QFFormula, Term};
use super::{ProductBA, ProductElem};
use crate::error::Result;
use crate::region::Region;
use crate::setca::SetCA;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub passed: bool,
    pub checked: u64,
    pub counterexample: Option<Value>,
}

impl Check {
    fn new() -> Self {
        Check {
            passed: true,
            checked: 0,
            counterexample: None,
        }
    }

    fn expect(&mut self, ok: bool, why: impl FnOnce() -> Value) {
        self.checked += 1;
        if !ok && self.passed {
            self.passed = false;
            self.counterexample = Some(why());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpretationCertificate {
    pub n: usize,
    pub index_set: Vec<Vec<usize>>,
    pub carrier_size: usize,
    /// (1) `f` is one-to-one.
    pub injective: Check,
    /// (2) `f` preserves `.`, `+`, `-`, `0`, `1`.
    pub homomorphism: Check,
    /// `Rng(f)` is defined by `x = x`.
    pub range_definable: Check,
    /// `f(d_ij)` is defined by `x = d_ij`.
    pub diagonal_definable: Check,
    /// (3) per `i`: `P |= eta_i(f(a), b)` iff `b = f(c_i a)`, `b` over the image of `f`.
    pub eta: Vec<Check>,
    /// (4) `a` is the sum of its components `a . 1_u`, which lie below `1_u`.
    pub decomposition: Check,
    /// (5) the `1_u` partition the unit, `c_i 1_u = sum { 1_v : v =_i u }`, and
    /// every nonzero `a . 1_u` has the same `c_i` as `1_u`.
    pub chi_lemmas: Check,
}

impl InterpretationCertificate {
    pub fn passed(&self) -> bool {
        [
            &self.injective,
            &self.homomorphism,
            &self.range_definable,
            &self.diagonal_definable,
            &self.decomposition,
            &self.chi_lemmas,
        ]
        .iter()
        .all(|c| c.passed)
            && self.eta.iter().all(|c| c.passed)
    }
}

/// Runs every check exhaustively over the carrier of `a`, enumerated under `cap`.
pub fn verify_interpretation(a: &SetCA, p: &ProductBA, cap: usize) -> Result<InterpretationCertificate> {
    let carrier = a.carrier(cap)?;
    let unit = a.unit();
    let index = |r: &Region| a.mask_of(r).map(|m| m as usize);
    let fs: Vec<ProductElem> = carrier.iter().map(|x| p.f_map(a, x)).collect::<Result<_>>()?;

    let mut injective = Check::new();
    let mut seen: HashMap<&ProductElem, usize> = HashMap::new();
    for (m, e) in fs.iter().enumerate() {
        let prev = seen.insert(e, m);
        injective.expect(prev.is_none(), || json!({"elements": [prev, m]}));
    }

    let mut hom = Check::new();
    hom.expect(fs[0] == p.zero(), || json!({"constant": "0"}));
    hom.expect(*fs.last().expect("carrier is nonempty") == p.one(), || json!({"constant": "1"}));
    for (m, x) in carrier.iter().enumerate() {
        let c = index(&unit.minus(x));
        hom.expect(c.is_some_and(|c| fs[c] == p.complement(&fs[m])), || json!({"op": "-", "a": m}));
        for (k, y) in carrier.iter().enumerate().skip(m) {
            let meet = index(&x.meet(y));
            hom.expect(meet.is_some_and(|c| fs[c] == p.meet(&fs[m], &fs[k])), || json!({"op": ".", "a": m, "b": k}));
            let join = index(&x.join(y));
            hom.expect(join.is_some_and(|c| fs[c] == p.join(&fs[m], &fs[k])), || json!({"op": "+", "a": m, "b": k}));
        }
    }

    let mut asg = Assignment::new();
    let mut range = Check::new();
    let x_eq_x = QFFormula::Eq(Term::var("x"), Term::var("x"));
    for (m, e) in fs.iter().enumerate() {
        asg.insert("x".into(), e.clone());
        range.expect(eval_formula(p, &x_eq_x, &asg)?, || json!({"a": m}));
    }

    let n = a.dim();
    let mut diag = Check::new();
    for i in 0..n {
        for j in 0..n {
            let d = a.diagonal(i, j)?;
            let phi = QFFormula::Eq(Term::var("x"), Term::Diag(i, j));
            for (m, (x, e)) in carrier.iter().zip(&fs).enumerate() {
                asg.insert("x".into(), e.clone());
                let holds = eval_formula(p, &phi, &asg)?;
                diag.expect(holds == (*x == d), || json!({"i": i, "j": j, "a": m, "holds": holds}));
            }
        }
    }

    let mut eta = Vec::with_capacity(n);
    for i in 0..n {
        let mut check = Check::new();
        let phi = QFFormula::Eta {
            i,
            x: Term::var("x"),
            y: Term::var("y"),
        };
        for (m, x) in carrier.iter().enumerate() {
            let Some(target) = index(&x.cylindrify(i)?) else {
                check.expect(false, || json!({"a": m, "reason": "c_i a is not in A"}));
                continue;
            };
            asg.insert("x".into(), fs[m].clone());
            for (k, b) in fs.iter().enumerate() {
                asg.insert("y".into(), b.clone());
                let holds = eval_formula(p, &phi, &asg)?;
                check.expect(holds == (k == target), || {
                    json!({"a": m, "b": k, "c_i_a": target, "holds": holds})
                });
            }
        }
        eta.push(check);
    }

    let size = p.index_set().len();
    let mut decomposition = Check::new();
    for (m, (x, e)) in carrier.iter().zip(&fs).enumerate() {
        let parts: Vec<Region> = (0..size).map(|u| p.component(e, u)).collect();
        let below = parts.iter().enumerate().all(|(u, r)| r.is_subset(p.chi(u)) && *r == x.meet(p.chi(u)));
        let disjoint = (0..size).all(|u| (u + 1..size).all(|w| parts[u].is_disjoint(&parts[w])));
        decomposition.expect(below && disjoint && p.flatten(e) == *x, || json!({"a": m}));
    }

    let mut chi = Check::new();
    let mut union = a.zero();
    for u in 0..size {
        for w in u + 1..size {
            chi.expect(p.chi(u).is_disjoint(p.chi(w)), || json!({"overlap": [u, w]}));
        }
        union.join_assign(p.chi(u));
    }
    chi.expect(union == unit, || json!({"reason": "the 1_u do not cover the unit"}));
    for i in 0..n {
        for u in 0..size {
            let cyl = p.chi(u).cylindrify(i)?;
            let mut expected = a.zero();
            for w in (0..size).filter(|&w| p.equiv(i, u, w)) {
                expected.join_assign(p.chi(w));
            }
            chi.expect(cyl == expected, || json!({"i": i, "u": u, "reason": "c_i 1_u"}));
            for (k, z) in p.factor_atoms(u).iter().enumerate() {
                chi.expect(z.cylindrify(i)? == cyl, || json!({"i": i, "u": u, "factor_atom": k}));
            }
        }
    }

    Ok(InterpretationCertificate {
        n,
        index_set: p.index_set().to_vec(),
        carrier_size: carrier.len(),
        injective,
        homomorphism: hom,
        range_definable: range,
        diagonal_definable: diag,
        eta,
        decomposition,
        chi_lemmas: chi,
    })
}
