//! Exhaustive evaluation of the cylindric algebra axiom schemata.

use std::collections::HashSet;
use std::hash::Hash;

use serde::Serialize;

use crate::abstract_ca::AbstractCA;
use crate::error::Result;
use crate::region::Region;
use crate::setca::SetCA;

/// The operations the axiom checker needs.
pub trait CylindricOps {
    type Elem: Clone + Eq + Hash;

    fn dimension(&self) -> usize;
    fn elements(&self) -> Result<Vec<Self::Elem>>;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn meet(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn complement(&self, a: &Self::Elem) -> Self::Elem;
    fn cyl(&self, i: usize, a: &Self::Elem) -> Self::Elem;
    fn diag(&self, i: usize, j: usize) -> Self::Elem;
    fn witness(&self, a: &Self::Elem) -> serde_json::Value;
}

impl CylindricOps for AbstractCA {
    type Elem = u32;

    fn dimension(&self) -> usize {
        self.dim()
    }
    fn elements(&self) -> Result<Vec<u32>> {
        Ok((0..self.size() as u32).collect())
    }
    fn zero(&self) -> u32 {
        AbstractCA::zero(self)
    }
    fn one(&self) -> u32 {
        AbstractCA::one(self)
    }
    fn meet(&self, a: &u32, b: &u32) -> u32 {
        AbstractCA::meet(self, *a, *b)
    }
    fn complement(&self, a: &u32) -> u32 {
        AbstractCA::complement(self, *a)
    }
    fn cyl(&self, i: usize, a: &u32) -> u32 {
        AbstractCA::cyl(self, i, *a)
    }
    fn diag(&self, i: usize, j: usize) -> u32 {
        AbstractCA::diag(self, i, j)
    }
    fn witness(&self, a: &u32) -> serde_json::Value {
        serde_json::json!(a)
    }
}

/// Set algebras are checked with the set operations themselves, not tables.
pub struct SetAlgebraView<'a> {
    pub algebra: &'a SetCA,
    pub cap: usize,
}

impl CylindricOps for SetAlgebraView<'_> {
    type Elem = Region;

    fn dimension(&self) -> usize {
        self.algebra.dim()
    }
    fn elements(&self) -> Result<Vec<Region>> {
        self.algebra.carrier(self.cap)
    }
    fn zero(&self) -> Region {
        self.algebra.zero()
    }
    fn one(&self) -> Region {
        self.algebra.unit()
    }
    fn meet(&self, a: &Region, b: &Region) -> Region {
        a.meet(b)
    }
    fn complement(&self, a: &Region) -> Region {
        a.complement()
    }
    fn cyl(&self, i: usize, a: &Region) -> Region {
        a.cylindrify(i).expect("index checked by caller")
    }
    fn diag(&self, i: usize, j: usize) -> Region {
        self.algebra.diagonal(i, j).expect("index checked by caller")
    }
    fn witness(&self, a: &Region) -> serde_json::Value {
        serde_json::to_value(a).expect("regions serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Hash, PartialOrd, Ord)]
pub enum Axiom {
    /// `c_i 0 = 0`
    Normality,
    /// `x <= c_i x`
    Extensivity,
    /// `c_i(x . c_i y) = c_i x . c_i y`
    QuasiMultiplicativity,
    /// `c_i c_j x = c_j c_i x`
    Commutativity,
    /// `d_ii = 1`
    ReflexiveDiagonal,
    /// `d_ij = c_k(d_ik . d_kj)`, `k` not in `{i, j}`
    DiagonalComposition,
    /// `c_i(d_ij . x) . c_i(d_ij . -x) = 0`, `i != j`
    Substitution,
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub indices: Vec<usize>,
    pub witnesses: Vec<serde_json::Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub dim: usize,
    pub elements: usize,
    pub instances_checked: u64,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluates the seven schemata over every element and index combination.
///
/// In the quasi-multiplicativity schema `y` only occurs under `c_i`, so it is
/// quantified over the image `{ c_i y }`, which is the same set of instances.
pub fn check_ca_axioms<A: CylindricOps>(a: &A) -> Result<AxiomReport> {
    let elems = a.elements()?;
    let dim = a.dimension();
    let zero = a.zero();
    let one = a.one();
    let mut violations = Vec::new();
    let mut checked = 0u64;
    let mut fail = |axiom: Axiom, indices: Vec<usize>, w: Vec<&A::Elem>| {
        violations.push(Violation {
            axiom,
            indices,
            witnesses: w.into_iter().map(|e| a.witness(e)).collect(),
        });
    };

    for i in 0..dim {
        checked += 1;
        if a.cyl(i, &zero) != zero {
            fail(Axiom::Normality, vec![i], vec![]);
        }
        checked += 1;
        if a.diag(i, i) != one {
            fail(Axiom::ReflexiveDiagonal, vec![i, i], vec![]);
        }
    }

    let cyls: Vec<Vec<A::Elem>> = (0..dim).map(|i| elems.iter().map(|x| a.cyl(i, x)).collect()).collect();

    for i in 0..dim {
        for (x, cx) in elems.iter().zip(&cyls[i]) {
            checked += 1;
            if a.meet(x, cx) != *x {
                fail(Axiom::Extensivity, vec![i], vec![x]);
            }
        }
        let mut image: Vec<A::Elem> = Vec::new();
        let mut seen = HashSet::new();
        for c in &cyls[i] {
            if seen.insert(c.clone()) {
                image.push(c.clone());
            }
        }
        for (x, cx) in elems.iter().zip(&cyls[i]) {
            for cy in &image {
                checked += 1;
                if a.cyl(i, &a.meet(x, cy)) != a.meet(cx, cy) {
                    fail(Axiom::QuasiMultiplicativity, vec![i], vec![x, cy]);
                }
            }
        }
    }

    for i in 0..dim {
        for j in i + 1..dim {
            for (k, x) in elems.iter().enumerate() {
                checked += 1;
                if a.cyl(i, &cyls[j][k]) != a.cyl(j, &cyls[i][k]) {
                    fail(Axiom::Commutativity, vec![i, j], vec![x]);
                }
            }
        }
    }

    for i in 0..dim {
        for j in 0..dim {
            for k in (0..dim).filter(|&k| k != i && k != j) {
                checked += 1;
                let rhs = a.cyl(k, &a.meet(&a.diag(i, k), &a.diag(k, j)));
                if a.diag(i, j) != rhs {
                    fail(Axiom::DiagonalComposition, vec![i, j, k], vec![]);
                }
            }
        }
    }

    for i in 0..dim {
        for j in (0..dim).filter(|&j| j != i) {
            let d = a.diag(i, j);
            for x in &elems {
                checked += 1;
                let lhs = a.meet(&a.cyl(i, &a.meet(&d, x)), &a.cyl(i, &a.meet(&d, &a.complement(x))));
                if lhs != zero {
                    fail(Axiom::Substitution, vec![i, j], vec![x]);
                }
            }
        }
    }

    Ok(AxiomReport {
        dim,
        elements: elems.len(),
        instances_checked: checked,
        violations,
    })
}

/// Axiom check for a set algebra with its carrier enumerated under `cap`.
pub fn check_set_algebra(a: &SetCA, cap: usize) -> Result<AxiomReport> {
    check_ca_axioms(&SetAlgebraView { algebra: a, cap })
}
