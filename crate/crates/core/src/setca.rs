//! Finite cylindric set algebras.
//!
//! A finite Boolean set algebra is determined by its atoms, so a [`SetCA`] keeps
//! the atom partition of the unit and treats the carrier as the set of all unions
//! of atoms. The carrier is only enumerated on request and under a cap.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::abstract_ca::AbstractCA;
use crate::error::{Error, Result};
use crate::region::{Base, Region};

/// Default bound on enumerated carriers.
pub const DEFAULT_CARRIER_CAP: usize = 4096;

/// Bitmask over the atoms of an algebra with at most 64 atoms.
pub type AtomMask = u64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SetCaRepr", into = "SetCaRepr")]
pub struct SetCA {
    dim: usize,
    base: Base,
    atoms: Vec<Region>,
}

#[derive(Serialize, Deserialize)]
struct SetCaRepr {
    dim: usize,
    base: Base,
    atoms: Vec<Region>,
    carrier_size_log2: usize,
}

impl From<SetCA> for SetCaRepr {
    fn from(a: SetCA) -> Self {
        SetCaRepr {
            carrier_size_log2: a.atoms.len(),
            dim: a.dim,
            base: a.base,
            atoms: a.atoms,
        }
    }
}

impl TryFrom<SetCaRepr> for SetCA {
    type Error = Error;
    fn try_from(r: SetCaRepr) -> Result<Self> {
        let a = SetCA::from_atoms(r.base, r.dim, r.atoms)?;
        a.validate().map_err(Error::Malformed)?;
        Ok(a)
    }
}

fn sort_atoms(atoms: &mut [Region]) {
    atoms.sort_by_key(|a| a.first_index());
}

impl SetCA {
    /// Builds an algebra from a claimed atom list. Only shapes and the partition
    /// property are checked here; [`SetCA::validate`] checks closure.
    pub fn from_atoms(base: Base, dim: usize, mut atoms: Vec<Region>) -> Result<Self> {
        let unit = Region::full(base.len(), dim)?;
        let mut seen = Region::empty(base.len(), dim)?;
        for a in &atoms {
            unit.check_shape(a)?;
            if a.is_empty() || !a.is_disjoint(&seen) {
                return Err(Error::Malformed("atoms must be nonempty and pairwise disjoint".into()));
            }
            seen.join_assign(a);
        }
        if seen != unit {
            return Err(Error::Malformed("atoms do not cover the unit".into()));
        }
        sort_atoms(&mut atoms);
        Ok(SetCA { dim, base, atoms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn atoms(&self) -> &[Region] {
        &self.atoms
    }

    /// `log2 |carrier|`.
    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn carrier_size(&self) -> Option<usize> {
        1usize.checked_shl(self.atoms.len() as u32)
    }

    pub fn zero(&self) -> Region {
        Region::empty(self.base.len(), self.dim).expect("shape validated at construction")
    }

    pub fn unit(&self) -> Region {
        Region::full(self.base.len(), self.dim).expect("shape validated at construction")
    }

    pub fn diagonal(&self, i: usize, j: usize) -> Result<Region> {
        Region::diagonal(self.base.len(), self.dim, i, j)
    }

    /// Atom index of each tuple of the unit.
    pub(crate) fn labels(&self) -> Vec<u32> {
        let mut labels = vec![u32::MAX; self.unit().space_size()];
        for (k, a) in self.atoms.iter().enumerate() {
            for t in a.indices() {
                labels[t] = k as u32;
            }
        }
        labels
    }

    /// The atoms below `x`, or `None` when `x` is not a union of atoms.
    pub fn mask_of(&self, x: &Region) -> Option<AtomMask> {
        if self.atoms.len() > 64 || !x.same_shape(&self.zero()) {
            return None;
        }
        let mut mask = 0;
        for (k, a) in self.atoms.iter().enumerate() {
            if a.is_subset(x) {
                mask |= 1 << k;
            } else if !a.is_disjoint(x) {
                return None;
            }
        }
        Some(mask)
    }

    pub fn contains(&self, x: &Region) -> bool {
        if !x.same_shape(&self.zero()) {
            return false;
        }
        self.atoms.iter().all(|a| a.is_subset(x) || a.is_disjoint(x))
    }

    pub fn element(&self, mask: AtomMask) -> Region {
        let mut r = self.zero();
        for (k, a) in self.atoms.iter().enumerate() {
            if mask >> k & 1 == 1 {
                r.join_assign(a);
            }
        }
        r
    }

    fn check_enumerable(&self, cap: usize) -> Result<()> {
        match self.carrier_size() {
            Some(n) if self.atoms.len() < 64 && n <= cap => Ok(()),
            _ => Err(Error::CarrierCap {
                atoms: self.atoms.len(),
                cap,
            }),
        }
    }

    /// Every carrier element, indexed by its atom mask.
    pub fn carrier(&self, cap: usize) -> Result<Vec<Region>> {
        self.check_enumerable(cap)?;
        Ok((0..self.carrier_size().unwrap() as u64).map(|m| self.element(m)).collect())
    }

    /// `c_i` of each atom as a mask.
    pub fn atom_cylinders(&self, i: usize) -> Result<Vec<AtomMask>> {
        if i >= self.dim {
            return Err(Error::IndexOutOfRange { index: i, dim: self.dim });
        }
        if self.atoms.len() > 64 {
            return Err(Error::AtomCap {
                atoms: self.atoms.len(),
                cap: 64,
            });
        }
        self.atoms
            .iter()
            .map(|a| self.mask_of(&a.cylindrify_unchecked(i)).ok_or(Error::NotInCarrier))
            .collect()
    }

    /// Checks that the atom partition is closed under every `c_i` and that every
    /// diagonal is a union of atoms.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let labels = self.labels();
        let is_union = |r: &Region| -> bool {
            let mut inside = vec![0usize; self.atoms.len()];
            for t in r.indices() {
                inside[labels[t] as usize] += 1;
            }
            inside.iter().zip(&self.atoms).all(|(&c, a)| c == 0 || c == a.len())
        };
        for i in 0..self.dim {
            for j in 0..self.dim {
                let d = self.diagonal(i, j).map_err(|e| e.to_string())?;
                if !is_union(&d) {
                    return Err(format!("d_{i}{j} is not a union of atoms"));
                }
            }
        }
        for (k, a) in self.atoms.iter().enumerate() {
            for i in 0..self.dim {
                if !is_union(&a.cylindrify_unchecked(i)) {
                    return Err(format!("c_{i} of atom {k} is not a union of atoms"));
                }
            }
        }
        Ok(())
    }

    /// Table form; the element with index `m` is the union of the atoms in mask `m`.
    pub fn abstractize(&self, cap: usize) -> Result<AbstractCA> {
        self.check_enumerable(cap)?;
        let n = self.carrier_size().unwrap();
        let full = (n - 1) as u32;
        let mut meet = Vec::with_capacity(n * n);
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                meet.push(a & b);
            }
        }
        let complement = (0..n as u32).map(|a| full ^ a).collect();
        let mut cyl = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let per_atom = self.atom_cylinders(i)?;
            cyl.push(
                (0..n as u64)
                    .map(|m| {
                        per_atom
                            .iter()
                            .enumerate()
                            .filter(|(k, _)| m >> k & 1 == 1)
                            .fold(0, |acc, (_, c)| acc | c) as u32
                    })
                    .collect(),
            );
        }
        let mut diag = Vec::with_capacity(self.dim * self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                diag.push(self.mask_of(&self.diagonal(i, j)?).ok_or(Error::NotInCarrier)? as u32);
            }
        }
        AbstractCA::from_tables(self.dim, n, meet, complement, cyl, 0, full, diag)
    }
}

/// Least subalgebra of the full set algebra over `base^dim` containing `generators`.
///
/// Works on the atom partition: the partition starts from the unit, is refined
/// by every generator and diagonal, and then by `c_i` of every class until no
/// class splits. Closure under Boolean operations is implicit in the partition.
pub fn generate_subalgebra(base: &Base, dim: usize, generators: &[Region]) -> Result<SetCA> {
    generate_subalgebra_capped(base, dim, generators, usize::MAX)
}

/// As [`generate_subalgebra`], aborting once the partition has more than
/// `atom_cap` classes.
pub fn generate_subalgebra_capped(base: &Base, dim: usize, generators: &[Region], atom_cap: usize) -> Result<SetCA> {
    let unit = Region::full(base.len(), dim)?;
    for g in generators {
        unit.check_shape(g)?;
    }
    let mut p = Partition::new(&unit);
    for g in generators {
        p.refine(g);
    }
    for i in 0..dim {
        for j in i + 1..dim {
            p.refine(&Region::diagonal(base.len(), dim, i, j)?);
        }
    }
    let mut queue: VecDeque<u32> = (0..p.members.len() as u32).collect();
    let mut queued: Vec<bool> = vec![true; p.members.len()];
    while let Some(c) = queue.pop_front() {
        queued[c as usize] = false;
        let class = p.region(c, &unit);
        for i in 0..dim {
            let cyl = class.cylindrify_unchecked(i);
            let touched = p.refine(&cyl);
            if p.members.len() > atom_cap {
                return Err(Error::AtomCap {
                    atoms: p.members.len(),
                    cap: atom_cap,
                });
            }
            for touched in touched {
                if queued.len() <= touched as usize {
                    queued.resize(touched as usize + 1, false);
                }
                if !queued[touched as usize] {
                    queued[touched as usize] = true;
                    queue.push_back(touched);
                }
            }
        }
    }
    let atoms = (0..p.members.len() as u32)
        .filter(|&c| !p.members[c as usize].is_empty())
        .map(|c| p.region(c, &unit))
        .collect();
    SetCA::from_atoms(base.clone(), dim, atoms)
}

struct Partition {
    label: Vec<u32>,
    members: Vec<Vec<u32>>,
}

impl Partition {
    fn new(unit: &Region) -> Self {
        let size = unit.space_size();
        if size == 0 {
            return Partition {
                label: Vec::new(),
                members: Vec::new(),
            };
        }
        Partition {
            label: vec![0; size],
            members: vec![(0..size as u32).collect()],
        }
    }

    fn region(&self, c: u32, unit: &Region) -> Region {
        let mut r = Region::empty(unit.base_size(), unit.dim()).expect("unit shape");
        for &t in &self.members[c as usize] {
            r.set(t as usize);
        }
        r
    }

    /// Splits every class that `s` cuts. Returns the ids of both halves of each split.
    fn refine(&mut self, s: &Region) -> Vec<u32> {
        let mut count: Vec<(u32, usize)> = Vec::new();
        let mut slot: std::collections::HashMap<u32, usize> = std::collections::HashMap::new();
        for t in s.indices() {
            let l = self.label[t];
            let k = *slot.entry(l).or_insert_with(|| {
                count.push((l, 0));
                count.len() - 1
            });
            count[k].1 += 1;
        }
        let mut touched = Vec::new();
        for (l, inside) in count {
            if inside == self.members[l as usize].len() {
                continue;
            }
            let new = self.members.len() as u32;
            let (ins, outs): (Vec<u32>, Vec<u32>) = self.members[l as usize]
                .iter()
                .partition(|&&t| s.contains_index(t as usize));
            for &t in &ins {
                self.label[t as usize] = new;
            }
            self.members[l as usize] = outs;
            self.members.push(ins);
            touched.push(l);
            touched.push(new);
        }
        touched
    }
}

/// The Boolean algebra `{ x in a : x <= e }` with complement relative to `e`.
/// Element `m` of the result is the union of the `m`-th subset of atoms below `e`.
pub fn relativize(a: &SetCA, e: &Region) -> Result<AbstractCA> {
    let mask = a.mask_of(e).ok_or(Error::NotInCarrier)?;
    let k = mask.count_ones() as usize;
    if k > 12 {
        return Err(Error::CarrierCap { atoms: k, cap: 4096 });
    }
    let n = 1usize << k;
    let full = (n - 1) as u32;
    let meet = (0..n as u32).flat_map(|x| (0..n as u32).map(move |y| x & y)).collect();
    let complement = (0..n as u32).map(|x| full ^ x).collect();
    AbstractCA::from_tables(0, n, meet, complement, Vec::new(), 0, full, Vec::new())
}

/// Regions of the relativization of `a` to `e`, in the index order of [`relativize`].
pub fn relativized_elements(a: &SetCA, e: &Region) -> Result<Vec<Region>> {
    let mask = a.mask_of(e).ok_or(Error::NotInCarrier)?;
    let below: Vec<usize> = (0..a.atom_count()).filter(|k| mask >> k & 1 == 1).collect();
    Ok((0..1u64 << below.len())
        .map(|m| {
            let mut r = a.zero();
            for (bit, &k) in below.iter().enumerate() {
                if m >> bit & 1 == 1 {
                    r.join_assign(&a.atoms()[k]);
                }
            }
            r
        })
        .collect())
}

/// `Nr_n`: elements fixed by every `c_i` with `n <= i < dim`, projected to dimension `n`.
///
/// The fixed elements form a Boolean subalgebra whose atoms are the distinct
/// `c_n .. c_{dim-1}` images of the atoms of `c`.
pub fn neat_reduct(c: &SetCA, n: usize) -> Result<SetCA> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    if n > c.dim() {
        return Err(Error::IndexOutOfRange { index: n, dim: c.dim() });
    }
    let mut fixed: BTreeSet<Region> = BTreeSet::new();
    for a in c.atoms() {
        let mut x = a.clone();
        for i in n..c.dim() {
            x = x.cylindrify_unchecked(i);
        }
        fixed.insert(x.project(n)?);
    }
    SetCA::from_atoms(c.base().clone(), n, fixed.into_iter().collect())
}

/// Number of carrier elements of `c` fixed by every `c_i`, `i >= n`, counted by
/// brute force over an enumerated carrier.
pub fn count_fixed_elements(c: &SetCA, n: usize, cap: usize) -> Result<usize> {
    let carrier = c.carrier(cap)?;
    Ok(carrier
        .iter()
        .filter(|x| (n..c.dim()).all(|i| &x.cylindrify_unchecked(i) == *x))
        .count())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use std::collections::HashSet;

    /// Pairwise closure under meet, complement and cylindrifications.
    pub(crate) fn naive_closure(base: &Base, dim: usize, generators: &[Region]) -> HashSet<Region> {
        let unit = Region::full(base.len(), dim).unwrap();
        let mut set: HashSet<Region> = HashSet::new();
        let mut work: Vec<Region> = vec![Region::empty(base.len(), dim).unwrap(), unit];
        for i in 0..dim {
            for j in 0..dim {
                work.push(Region::diagonal(base.len(), dim, i, j).unwrap());
            }
        }
        work.extend(generators.iter().cloned());
        while let Some(x) = work.pop() {
            if !set.insert(x.clone()) {
                continue;
            }
            work.push(x.complement());
            for i in 0..dim {
                work.push(x.cylindrify(i).unwrap());
            }
            let existing: Vec<Region> = set.iter().cloned().collect();
            for y in existing {
                work.push(x.meet(&y));
            }
        }
        set
    }

    fn carrier_set(a: &SetCA) -> HashSet<Region> {
        a.carrier(1 << 16).unwrap().into_iter().collect()
    }

    #[test]
    fn minimal_algebra_dim2() {
        let ab = Base::new(["a", "b"]).unwrap();
        let a = generate_subalgebra(&ab, 2, &[]).unwrap();
        let d = Region::diagonal(2, 2, 0, 1).unwrap();
        let expected: HashSet<Region> =
            [a.zero(), d.clone(), d.complement(), a.unit()].into_iter().collect();
        assert_eq!(carrier_set(&a), expected);
        let with_unit = generate_subalgebra(&ab, 2, &[a.unit()]).unwrap();
        assert_eq!(with_unit, a);
    }

    #[test]
    fn singletons_generate_powerset() {
        let ab = Base::new(["a", "b"]).unwrap();
        let gens: Vec<Region> = (0..4)
            .map(|t| {
                let u = Region::full(2, 2).unwrap();
                Region::from_tuples(2, 2, [u.decode(t)]).unwrap()
            })
            .collect();
        let a = generate_subalgebra(&ab, 2, &gens).unwrap();
        assert_eq!(a.carrier_size(), Some(16));
    }

    #[test]
    fn matches_naive_closure() {
        let base = Base::numbered(3).unwrap();
        let g = Region::from_tuples(3, 2, [[0, 1], [1, 2]]).unwrap();
        let a = generate_subalgebra(&base, 2, &[g.clone()]).unwrap();
        assert_eq!(carrier_set(&a), naive_closure(&base, 2, &[g]));
    }

    #[test]
    fn rejects_mixed_shapes() {
        let base = Base::numbered(2).unwrap();
        let g = Region::full(3, 2).unwrap();
        assert!(matches!(
            generate_subalgebra(&base, 2, &[g]),
            Err(Error::ShapeMismatch { .. })
        ));
        assert_eq!(generate_subalgebra(&base, 0, &[]), Err(Error::ZeroDimension));
    }

    #[test]
    fn relativize_examples() {
        let ab = Base::new(["a", "b"]).unwrap();
        let a = generate_subalgebra(&ab, 2, &[]).unwrap();
        let unit_rel = relativize(&a, &a.unit()).unwrap();
        assert_eq!(unit_rel.size(), 4);
        assert_eq!(relativize(&a, &a.zero()).unwrap().size(), 1);
        let d = Region::diagonal(2, 2, 0, 1).unwrap();
        let rel = relativize(&a, &d).unwrap();
        assert_eq!(rel.size(), 2);
        assert_eq!(relativized_elements(&a, &d).unwrap(), vec![a.zero(), d.clone()]);
        let stray = Region::from_tuples(2, 2, [[0, 1]]).unwrap();
        assert_eq!(relativize(&a, &stray), Err(Error::NotInCarrier));
    }

    #[test]
    fn neat_reduct_of_powerset() {
        let ab = Base::new(["a", "b"]).unwrap();
        let gens: Vec<Region> = (0..8)
            .map(|t| {
                let u = Region::full(2, 3).unwrap();
                Region::from_tuples(2, 3, [u.decode(t)]).unwrap()
            })
            .collect();
        let full3 = generate_subalgebra(&ab, 3, &gens).unwrap();
        let nr = neat_reduct(&full3, 2).unwrap();
        assert_eq!(nr.carrier_size(), Some(16));
        assert_eq!(count_fixed_elements(&full3, 2, 1 << 8).unwrap(), 16);
        assert_eq!(neat_reduct(&full3, 3).unwrap(), full3);
        assert!(neat_reduct(&full3, 4).is_err());

        let min3 = generate_subalgebra(&ab, 3, &[]).unwrap();
        let min2 = generate_subalgebra(&ab, 2, &[]).unwrap();
        assert_eq!(neat_reduct(&min3, 2).unwrap(), min2);
    }

    #[test]
    fn abstractize_agrees_with_sets() {
        let base = Base::numbered(3).unwrap();
        let g = Region::from_tuples(3, 2, [[0, 1], [1, 2], [2, 2]]).unwrap();
        let a = generate_subalgebra(&base, 2, &[g]).unwrap();
        let t = a.abstractize(DEFAULT_CARRIER_CAP).unwrap();
        let carrier = a.carrier(DEFAULT_CARRIER_CAP).unwrap();
        for (x, rx) in carrier.iter().enumerate() {
            assert_eq!(carrier[t.complement(x as u32) as usize], rx.complement());
            for i in 0..2 {
                assert_eq!(carrier[t.cyl(i, x as u32) as usize], rx.cylindrify(i).unwrap());
            }
            for (y, ry) in carrier.iter().enumerate() {
                assert_eq!(carrier[t.meet(x as u32, y as u32) as usize], rx.meet(ry));
            }
        }
        assert_eq!(carrier[t.diag(0, 1) as usize], a.diagonal(0, 1).unwrap());
    }

    #[test]
    fn from_atoms_validation() {
        let base = Base::numbered(2).unwrap();
        let u = Region::full(2, 2).unwrap();
        let x = Region::from_tuples(2, 2, [[0, 1]]).unwrap();
        let bad = SetCA::from_atoms(base.clone(), 2, vec![x.clone(), u.minus(&x)]).unwrap();
        assert!(bad.validate().is_err());
        assert!(SetCA::from_atoms(base, 2, vec![x]).is_err());
    }
}
