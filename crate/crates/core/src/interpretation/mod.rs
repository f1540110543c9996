//! The product `P` of the relativizations `A_u`, the map `f`, quantifier-free
//! formulas over `P`, and the verifier for the interpretation of `A` in `P`.

mod formula;
mod verify;

pub use formula::{eta_formula, eval_formula, eval_term, Assignment, QFFormula, Term};
pub use verify::{verify_interpretation, Check, InterpretationCertificate};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::region::Region;
use crate::setca::{AtomMask, SetCA};
use crate::witness::{all_maps, one_u, BlockedBase};

/// Largest index set `V` accepted by default.
pub const DEFAULT_V_CAP: usize = 27;

/// An element of `P`: for each `u` in `V`, the factor atoms below the
/// component, as a bit mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProductElem(pub Vec<u64>);

/// `P = prod_u A_u` with the constants `1_u` and `d_ij`.
///
/// The factor `A_u` is `{ x . 1_u : x in A }`; its atoms are the nonempty
/// `atom . 1_u` for atoms of `A`.
#[derive(Debug, Clone)]
pub struct ProductBA {
    n: usize,
    v: Vec<Vec<usize>>,
    chis: Vec<Region>,
    factors: Vec<Vec<Region>>,
    /// `lookup[u][k]`: the factor atom that atom `k` of `A` meets at `u`.
    lookup: Vec<Vec<Option<usize>>>,
    diag: Vec<ProductElem>,
}

impl ProductBA {
    /// `V` is every map `n -> n` and `chi_u = 1_u`.
    pub fn new(a: &SetCA, bb: &BlockedBase) -> Result<Self> {
        Self::with_cap(a, bb, DEFAULT_V_CAP)
    }

    pub fn with_cap(a: &SetCA, bb: &BlockedBase, cap: usize) -> Result<Self> {
        let n = bb.n();
        let size = n.checked_pow(n as u32).unwrap_or(usize::MAX);
        if size > cap.min(64) {
            return Err(Error::IndexSetCap { size, cap });
        }
        let v = all_maps(n);
        let chis = v.iter().map(|u| one_u(u, bb)).collect::<Result<Vec<_>>>()?;
        Self::from_partition(a, v, chis)
    }

    /// General form: `v` names the components and `chis` gives the region
    /// each component relativizes to.
    pub fn from_partition(a: &SetCA, v: Vec<Vec<usize>>, chis: Vec<Region>) -> Result<Self> {
        if v.len() != chis.len() {
            return Err(Error::InvalidParameter("one region per index is needed".into()));
        }
        if v.len() > 64 {
            return Err(Error::IndexSetCap { size: v.len(), cap: 64 });
        }
        if a.atom_count() > 64 {
            return Err(Error::AtomCap {
                atoms: a.atom_count(),
                cap: 64,
            });
        }
        let unit = a.unit();
        for c in &chis {
            unit.check_shape(c)?;
        }
        let mut factors = Vec::with_capacity(v.len());
        let mut lookup = Vec::with_capacity(v.len());
        for chi in &chis {
            let mut atoms = Vec::new();
            let mut look = Vec::with_capacity(a.atom_count());
            for atom in a.atoms() {
                let piece = atom.meet(chi);
                if piece.is_empty() {
                    look.push(None);
                } else {
                    look.push(Some(atoms.len()));
                    atoms.push(piece);
                }
            }
            factors.push(atoms);
            lookup.push(look);
        }
        let mut p = ProductBA {
            n: a.dim(),
            v,
            chis,
            factors,
            lookup,
            diag: Vec::new(),
        };
        for i in 0..p.n {
            for j in 0..p.n {
                let d = p.f_map(a, &a.diagonal(i, j)?)?;
                p.diag.push(d);
            }
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// The index set `V`.
    pub fn index_set(&self) -> &[Vec<usize>] {
        &self.v
    }

    pub fn chi(&self, u: usize) -> &Region {
        &self.chis[u]
    }

    pub fn factor_atoms(&self, u: usize) -> &[Region] {
        &self.factors[u]
    }

    pub fn zero(&self) -> ProductElem {
        ProductElem(vec![0; self.v.len()])
    }

    pub fn one(&self) -> ProductElem {
        ProductElem(self.factors.iter().map(|f| full_mask(f.len())).collect())
    }

    /// `1_u`: the unit of `A_u` at `u`, zero elsewhere.
    pub fn unit_at(&self, u: usize) -> ProductElem {
        let mut e = self.zero();
        e.0[u] = full_mask(self.factors[u].len());
        e
    }

    pub fn diag(&self, i: usize, j: usize) -> &ProductElem {
        &self.diag[i * self.n + j]
    }

    /// Replaces the constant `d_ij`.
    pub fn set_diag(&mut self, i: usize, j: usize, e: ProductElem) {
        self.diag[i * self.n + j] = e;
    }

    pub fn meet(&self, a: &ProductElem, b: &ProductElem) -> ProductElem {
        ProductElem(a.0.iter().zip(&b.0).map(|(x, y)| x & y).collect())
    }

    pub fn join(&self, a: &ProductElem, b: &ProductElem) -> ProductElem {
        ProductElem(a.0.iter().zip(&b.0).map(|(x, y)| x | y).collect())
    }

    pub fn complement(&self, a: &ProductElem) -> ProductElem {
        ProductElem(
            a.0.iter()
                .zip(&self.factors)
                .map(|(x, f)| !x & full_mask(f.len()))
                .collect(),
        )
    }

    /// `f(a) = < a . 1_u >_u`, computed from the region `a`.
    pub fn f_map(&self, a: &SetCA, x: &Region) -> Result<ProductElem> {
        if !a.contains(x) {
            return Err(Error::NotInCarrier);
        }
        let mut out = self.zero();
        for (u, chi) in self.chis.iter().enumerate() {
            let part = x.meet(chi);
            for (k, atom) in self.factors[u].iter().enumerate() {
                if atom.is_subset(&part) {
                    out.0[u] |= 1 << k;
                }
            }
        }
        Ok(out)
    }

    /// `f` on the element of `A` with atom mask `mask`, through the atom table.
    pub fn f_mask(&self, mask: AtomMask) -> ProductElem {
        let mut out = self.zero();
        for (u, look) in self.lookup.iter().enumerate() {
            for (k, l) in look.iter().enumerate() {
                if let Some(l) = l {
                    if mask >> k & 1 == 1 {
                        out.0[u] |= 1 << l;
                    }
                }
            }
        }
        out
    }

    /// The component of `e` at `u` as a region.
    pub fn component(&self, e: &ProductElem, u: usize) -> Region {
        let mut r = Region::empty(self.chis[u].base_size(), self.chis[u].dim()).expect("shape of chi");
        for (k, atom) in self.factors[u].iter().enumerate() {
            if e.0[u] >> k & 1 == 1 {
                r.join_assign(atom);
            }
        }
        r
    }

    /// The union of all components of `e`.
    pub fn flatten(&self, e: &ProductElem) -> Region {
        let mut r = Region::empty(self.chis[0].base_size(), self.chis[0].dim()).expect("shape of chi");
        for u in 0..self.v.len() {
            r.join_assign(&self.component(e, u));
        }
        r
    }

    /// Components of `x` that are nonzero, as a bit set over `V`.
    pub fn support(&self, x: &ProductElem) -> u64 {
        x.0.iter().enumerate().filter(|(_, m)| **m != 0).fold(0, |acc, (u, _)| acc | 1 << u)
    }

    /// `v =_i u`: the maps agree off coordinate `i`.
    pub fn equiv(&self, i: usize, u: usize, w: usize) -> bool {
        (0..self.n).all(|k| k == i || self.v[u][k] == self.v[w][k])
    }

    /// `t_S = sum { 1_v : v =_i u for some u in S }`, with `S` a bit set over `V`.
    pub fn t_s(&self, s: u64, i: usize) -> ProductElem {
        let mut out = self.zero();
        for w in 0..self.v.len() {
            if (0..self.v.len()).any(|u| s >> u & 1 == 1 && self.equiv(i, u, w)) {
                out.0[w] = full_mask(self.factors[w].len());
            }
        }
        out
    }
}

fn full_mask(k: usize) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

/// [`ProductBA::t_s`] with `S` given as a list of indices into `V`.
pub fn t_s(s: &[usize], i: usize, p: &ProductBA) -> Result<ProductElem> {
    if i >= p.dim() {
        return Err(Error::IndexOutOfRange { index: i, dim: p.dim() });
    }
    if p.index_set().len() > 64 || s.iter().any(|&u| u >= p.index_set().len()) {
        return Err(Error::InvalidParameter("S is not a subset of V".into()));
    }
    Ok(p.t_s(s.iter().fold(0, |acc, &u| acc | 1 << u), i))
}

#[cfg(test)]
mod tests;
