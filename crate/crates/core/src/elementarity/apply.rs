use std::collections::HashMap;

use super::game::{ef_winner, GameCertificate};
use super::structure::RelStructure;
use crate::abstract_ca::AbstractCA;
use crate::error::{Error, Result};
use crate::interpretation::{ProductBA, ProductElem};
use crate::setca::{SetCA, DEFAULT_CARRIER_CAP};

fn offsets(p: &ProductBA) -> Vec<usize> {
    let mut out = Vec::with_capacity(p.index_set().len() + 1);
    let mut acc = 0;
    out.push(0);
    for u in 0..p.index_set().len() {
        acc += p.factor_atoms(u).len();
        out.push(acc);
    }
    out
}

/// Number of elements of `P`, refused above `cap`.
pub fn product_size(p: &ProductBA, cap: usize) -> Result<usize> {
    let bits = *offsets(p).last().unwrap();
    if bits >= 63 || (1usize << bits) > cap {
        return Err(Error::CarrierCap { atoms: bits, cap });
    }
    Ok(1 << bits)
}

/// Elements of `P` are numbered by concatenating their component masks.
pub fn flat_index(p: &ProductBA, e: &ProductElem) -> usize {
    let off = offsets(p);
    e.0.iter().enumerate().fold(0, |acc, (u, &m)| acc | (m as usize) << off[u])
}

pub fn from_flat(p: &ProductBA, idx: usize) -> ProductElem {
    let off = offsets(p);
    ProductElem((0..p.index_set().len()).map(|u| ((idx >> off[u]) & ((1 << (off[u + 1] - off[u])) - 1)) as u64).collect())
}

/// Position of the identity map in `V`.
pub fn identity_index(p: &ProductBA) -> Result<usize> {
    p.index_set()
        .iter()
        .position(|u| u.iter().enumerate().all(|(k, &v)| k == v))
        .ok_or_else(|| Error::InvalidParameter("the index set has no identity map".into()))
}

fn unit_name(u: &[usize]) -> String {
    let digits: String = u.iter().map(|d| d.to_string()).collect();
    format!("1_{digits}")
}

/// `bool(A_Id)` with the `Id`-components of the diagonals as constants.
/// Elements are masks over the factor atoms.
pub fn id_factor(p: &ProductBA) -> Result<RelStructure> {
    let id = identity_index(p)?;
    let mut extras = Vec::new();
    for i in 0..p.dim() {
        for j in 0..p.dim() {
            extras.push((format!("d{i}{j}"), p.diag(i, j).0[id] as u32));
        }
    }
    RelStructure::boolean_algebra(p.factor_atoms(id).len(), &extras)
}

/// `Q`: the elements of `P` whose `Id`-component lies in `b_id`, with the
/// Boolean operations and the constants `0`, `1`, `1_u`, `d_ij`. Elements are
/// listed by ascending flat index.
pub fn build_q(b_id: &[u64], p: &ProductBA) -> Result<(Vec<ProductElem>, RelStructure)> {
    let id = identity_index(p)?;
    let size = product_size(p, DEFAULT_CARRIER_CAP)?;
    let full = (1u64 << p.factor_atoms(id).len()) - 1;
    let allowed: std::collections::HashSet<u64> = b_id.iter().copied().collect();
    let closed = allowed.contains(&0)
        && allowed.iter().all(|&x| allowed.contains(&(full & !x)) && allowed.iter().all(|&y| allowed.contains(&(x & y))))
        && (0..p.dim()).all(|i| (0..p.dim()).all(|j| allowed.contains(&p.diag(i, j).0[id])));
    if !closed {
        return Err(Error::InvalidParameter("B_Id is not a subalgebra of the Id-factor with its constants".into()));
    }
    let elements: Vec<ProductElem> = (0..size).map(|k| from_flat(p, k)).filter(|e| allowed.contains(&e.0[id])).collect();
    let structure = product_structure(p, &elements)?;
    Ok((elements, structure))
}

fn positions(p: &ProductBA, elements: &[ProductElem]) -> HashMap<usize, u32> {
    elements.iter().enumerate().map(|(k, e)| (flat_index(p, e), k as u32)).collect()
}

fn product_structure(p: &ProductBA, elements: &[ProductElem]) -> Result<RelStructure> {
    let pos = positions(p, elements);
    let at = |e: &ProductElem| pos.get(&flat_index(p, e)).copied().ok_or(Error::NotInCarrier);
    let n = elements.len();
    let mut meet = Vec::with_capacity(n * n);
    let mut join = Vec::with_capacity(n * n);
    for a in elements {
        for b in elements {
            meet.push(at(&p.meet(a, b))?);
            join.push(at(&p.join(a, b))?);
        }
    }
    let complement = elements.iter().map(|a| at(&p.complement(a))).collect::<Result<Vec<_>>>()?;
    let mut s = RelStructure::new(n)
        .with_function("meet", 2, meet)?
        .with_function("join", 2, join)?
        .with_function("complement", 1, complement)?
        .with_constant("0", at(&p.zero())?)?
        .with_constant("1", at(&p.one())?)?;
    for (u, map) in p.index_set().iter().enumerate() {
        s = s.with_constant(&unit_name(map), at(&p.unit_at(u))?)?;
    }
    for i in 0..p.dim() {
        for j in 0..p.dim() {
            s = s.with_constant(&format!("d{i}{j}"), at(p.diag(i, j))?)?;
        }
    }
    Ok(s)
}

/// Reads the cylindric operations off `elements` (a subuniverse of `P`):
/// Boolean operations are inherited, `d_ij` are the constants, and `c_i x` is
/// the `y` forced by the single conjunct of `eta_i` whose antecedent `x`
/// satisfies.
pub fn apply_interpretation(elements: &[ProductElem], p: &ProductBA) -> Result<AbstractCA> {
    if elements.is_empty() {
        return Err(Error::Malformed("empty universe".into()));
    }
    let pos = positions(p, elements);
    let v = p.index_set().len();
    let mut cyl = Vec::with_capacity(p.dim());
    for i in 0..p.dim() {
        let mut table = Vec::with_capacity(elements.len());
        for x in elements {
            let support = p.support(x);
            let live: Vec<u64> = (0..1u64 << v)
                .filter(|s| (0..v).all(|u| (s >> u & 1 == 1) == (x.0[u] != 0)))
                .collect();
            debug_assert_eq!(live, vec![support]);
            let y = p.t_s(live[0], i);
            match pos.get(&flat_index(p, &y)) {
                Some(&k) => table.push(k),
                None => {
                    return Err(Error::ClosureFailure {
                        index: i,
                        subset: (0..v).filter(|u| support >> u & 1 == 1).collect(),
                    })
                }
            }
        }
        cyl.push(table);
    }
    let rel = product_structure(p, elements)?;
    let consts = rel.constant_values();
    let zero = consts[0];
    let one = consts[1];
    let diag = consts[2 + v..].to_vec();
    AbstractCA::from_tables(
        p.dim(),
        elements.len(),
        rel.functions[0].table.clone(),
        rel.functions[2].table.clone(),
        cyl,
        zero,
        one,
        diag,
    )
}

/// Whether `x -> f(x)` maps `A` (numbered by atom masks) isomorphically onto
/// `b`, whose universe is `elements`.
pub fn is_f_isomorphism(a: &SetCA, b: &AbstractCA, elements: &[ProductElem], p: &ProductBA) -> Result<bool> {
    let abs = a.abstractize(DEFAULT_CARRIER_CAP)?;
    if abs.size() != b.size() || abs.dim() != b.dim() {
        return Ok(false);
    }
    let pos = positions(p, elements);
    let mut map = Vec::with_capacity(abs.size());
    for m in 0..abs.size() as u64 {
        match pos.get(&flat_index(p, &p.f_mask(m))) {
            Some(&k) => map.push(k),
            None => return Ok(false),
        }
    }
    let mut hit = vec![false; b.size()];
    if map.iter().any(|&k| std::mem::replace(&mut hit[k as usize], true)) {
        return Ok(false);
    }
    let n = abs.size() as u32;
    let f = |x: u32| map[x as usize];
    let ok = (0..n).all(|x| {
        f(abs.complement(x)) == b.complement(f(x))
            && (0..abs.dim()).all(|i| f(abs.cyl(i, x)) == b.cyl(i, f(x)))
            && (0..n).all(|y| f(abs.meet(x, y)) == b.meet(f(x), f(y)))
    }) && f(abs.zero()) == b.zero()
        && f(abs.one()) == b.one()
        && (0..abs.dim()).all(|i| (0..abs.dim()).all(|j| f(abs.diag(i, j)) == b.diag(i, j)));
    Ok(ok)
}

/// `q`-round game between `b` and `a` in the cylindric signature.
pub fn check_equiv(b: &AbstractCA, a: &AbstractCA, q: usize, budget: u64) -> Result<GameCertificate> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidParameter("dimensions differ".into()));
    }
    ef_winner(&RelStructure::from_ca(b)?, &RelStructure::from_ca(a)?, q, &[], budget)
}
