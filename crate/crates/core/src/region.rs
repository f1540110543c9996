//! Bases, tuples and regions: extensional sets of `dim`-tuples over a finite base.
//!
//! A region is stored as a dense indicator over a fixed enumeration of the
//! assignment space `base^dim`. The tuple `(s_0, .., s_{dim-1})` has index
//! `sum s_j * |base|^(dim-1-j)`, so index order is lexicographic tuple order.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest assignment space a region may range over.
pub const MAX_SPACE: usize = 1 << 26;

/// A finite ordered set of named points.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Base {
    elements: Vec<String>,
}

impl Base {
    /// Builds a base from distinct names. An empty list is accepted only through
    /// [`Base::empty`].
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let elements: Vec<String> = names.into_iter().map(Into::into).collect();
        if elements.is_empty() {
            return Err(Error::InvalidParameter("a base needs at least one point".into()));
        }
        let mut sorted = elements.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != elements.len() {
            return Err(Error::InvalidParameter("base point names must be distinct".into()));
        }
        Ok(Base { elements })
    }

    /// Points named `p0, p1, ..`.
    pub fn numbered(size: usize) -> Result<Self> {
        Base::new((0..size).map(|i| format!("p{i}")))
    }

    /// The empty base. Its only region of any dimension is the empty set, which
    /// makes it the carrier of the one-element algebra.
    pub fn empty() -> Self {
        Base { elements: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn names(&self) -> &[String] {
        &self.elements
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }
}

pub(crate) fn space_size(base: usize, dim: usize) -> Result<usize> {
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut size: usize = 1;
    for _ in 0..dim {
        size = size
            .checked_mul(base)
            .filter(|&s| s <= MAX_SPACE)
            .ok_or(Error::SpaceTooLarge { base, dim })?;
    }
    Ok(size)
}

/// Extensional set of tuples.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Region {
    dim: usize,
    base_size: usize,
    bits: Vec<u64>,
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Region")
            .field("dim", &self.dim)
            .field("base_size", &self.base_size)
            .field("tuples", &self.tuples().collect::<Vec<_>>())
            .finish()
    }
}

impl Region {
    pub fn empty(base_size: usize, dim: usize) -> Result<Self> {
        let size = space_size(base_size, dim)?;
        Ok(Region {
            dim,
            base_size,
            bits: vec![0; size.div_ceil(64)],
        })
    }

    /// The unit: every `dim`-tuple over the base.
    pub fn full(base_size: usize, dim: usize) -> Result<Self> {
        let mut r = Region::empty(base_size, dim)?;
        for w in r.bits.iter_mut() {
            *w = !0;
        }
        r.trim();
        Ok(r)
    }

    /// `{ s : s(i) = s(j) }`.
    pub fn diagonal(base_size: usize, dim: usize, i: usize, j: usize) -> Result<Self> {
        for idx in [i, j] {
            if idx >= dim {
                return Err(Error::IndexOutOfRange { index: idx, dim });
            }
        }
        let mut r = Region::empty(base_size, dim)?;
        let si = r.stride(i);
        let sj = r.stride(j);
        for t in 0..r.space_size() {
            if (t / si) % base_size == (t / sj) % base_size {
                r.set(t);
            }
        }
        Ok(r)
    }

    pub fn from_tuples<I, T>(base_size: usize, dim: usize, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[usize]>,
    {
        let mut r = Region::empty(base_size, dim)?;
        for t in tuples {
            let t = t.as_ref();
            if t.len() != dim {
                return Err(Error::Malformed(format!("tuple of length {} in dimension {dim}", t.len())));
            }
            if let Some(&bad) = t.iter().find(|&&e| e >= base_size) {
                return Err(Error::Malformed(format!("point {bad} outside a base of {base_size}")));
            }
            let idx = r.index_of(t);
            r.set(idx);
        }
        Ok(r)
    }

    pub fn from_predicate(base_size: usize, dim: usize, mut keep: impl FnMut(&[usize]) -> bool) -> Result<Self> {
        let mut r = Region::empty(base_size, dim)?;
        let mut buf = vec![0; dim];
        for t in 0..r.space_size() {
            r.decode_into(t, &mut buf);
            if keep(&buf) {
                r.set(t);
            }
        }
        Ok(r)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn base_size(&self) -> usize {
        self.base_size
    }

    pub fn space_size(&self) -> usize {
        // dim >= 1 is enforced by every constructor
        self.base_size.pow(self.dim as u32)
    }

    /// `|base|^(dim-1-i)`: distance between tuples differing by one in coordinate `i`.
    pub fn stride(&self, i: usize) -> usize {
        self.base_size.pow((self.dim - 1 - i) as u32)
    }

    pub fn index_of(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &e| acc * self.base_size + e)
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim];
        for slot in out.iter_mut().rev() {
            *slot = index % self.base_size;
            index /= self.base_size;
        }
        out
    }

    pub fn decode_into(&self, mut index: usize, out: &mut [usize]) {
        for slot in out.iter_mut().rev() {
            *slot = index % self.base_size;
            index /= self.base_size;
        }
    }

    #[inline]
    pub fn contains_index(&self, t: usize) -> bool {
        self.bits[t / 64] >> (t % 64) & 1 == 1
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        tuple.len() == self.dim
            && tuple.iter().all(|&e| e < self.base_size)
            && self.contains_index(self.index_of(tuple))
    }

    #[inline]
    pub(crate) fn set(&mut self, t: usize) {
        self.bits[t / 64] |= 1 << (t % 64);
    }

    pub fn insert(&mut self, tuple: &[usize]) {
        let t = self.index_of(tuple);
        self.set(t);
    }

    pub fn remove(&mut self, tuple: &[usize]) {
        let t = self.index_of(tuple);
        self.bits[t / 64] &= !(1 << (t % 64));
    }

    fn trim(&mut self) {
        let size = self.space_size();
        if size % 64 != 0 {
            if let Some(last) = self.bits.last_mut() {
                *last &= (1u64 << (size % 64)) - 1;
            }
        }
        if size == 0 {
            self.bits.clear();
        }
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn same_shape(&self, other: &Region) -> bool {
        self.dim == other.dim && self.base_size == other.base_size
    }

    pub fn check_shape(&self, other: &Region) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected_dim: self.dim,
                expected_base: self.base_size,
                dim: other.dim,
                base: other.base_size,
            })
        }
    }

    fn zip(&self, other: &Region, f: impl Fn(u64, u64) -> u64) -> Region {
        debug_assert!(self.same_shape(other));
        Region {
            dim: self.dim,
            base_size: self.base_size,
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn meet(&self, other: &Region) -> Region {
        self.zip(other, |a, b| a & b)
    }

    pub fn join(&self, other: &Region) -> Region {
        self.zip(other, |a, b| a | b)
    }

    pub fn minus(&self, other: &Region) -> Region {
        self.zip(other, |a, b| a & !b)
    }

    pub fn join_assign(&mut self, other: &Region) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
    }

    pub fn complement(&self) -> Region {
        let mut r = Region {
            dim: self.dim,
            base_size: self.base_size,
            bits: self.bits.iter().map(|w| !w).collect(),
        };
        r.trim();
        r
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Region) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| a & b == 0)
    }

    /// Indices of member tuples, ascending.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    /// Member tuples in lexicographic order.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.indices().map(|t| self.decode(t))
    }

    pub fn first_index(&self) -> Option<usize> {
        self.indices().next()
    }

    /// `{ s : exists t in self with s(j) = t(j) for all j != i }`.
    pub fn cylindrify(&self, i: usize) -> Result<Region> {
        if i >= self.dim {
            return Err(Error::IndexOutOfRange { index: i, dim: self.dim });
        }
        Ok(self.cylindrify_unchecked(i))
    }

    pub(crate) fn cylindrify_unchecked(&self, i: usize) -> Region {
        let stride = self.stride(i);
        let b = self.base_size;
        let mut out = Region {
            dim: self.dim,
            base_size: b,
            bits: vec![0; self.bits.len()],
        };
        if stride == 1 {
            // Lines are contiguous runs of `b` tuples.
            let mut last_line = usize::MAX;
            for t in self.indices() {
                let line = t - t % b;
                if line != last_line {
                    last_line = line;
                    for k in line..line + b {
                        out.set(k);
                    }
                }
            }
            return out;
        }
        let block = stride * b;
        for t in self.indices() {
            let line = t - ((t / stride) % b) * stride;
            if out.contains_index(line) {
                continue;
            }
            let mut k = line;
            while k < (line / block + 1) * block {
                out.set(k);
                k += stride;
            }
        }
        out
    }

    /// `{ s|n : s in self }` for `n <= dim`.
    pub fn project(&self, n: usize) -> Result<Region> {
        if n == 0 || n > self.dim {
            return Err(Error::IndexOutOfRange { index: n, dim: self.dim });
        }
        let shift = self.base_size.pow((self.dim - n) as u32);
        let mut out = Region::empty(self.base_size, n)?;
        for t in self.indices() {
            out.set(t / shift);
        }
        Ok(out)
    }

    /// `{ s : s|dim in self }` as a region of dimension `dim + k`.
    pub fn lift(&self, k: usize) -> Result<Region> {
        let mut out = Region::empty(self.base_size, self.dim + k)?;
        let shift = self.base_size.pow(k as u32);
        for t in self.indices() {
            for e in 0..shift {
                out.set(t * shift + e);
            }
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct RegionRepr {
    dim: usize,
    base_size: usize,
    tuples: Vec<Vec<usize>>,
}

impl Serialize for Region {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RegionRepr {
            dim: self.dim,
            base_size: self.base_size,
            tuples: self.tuples().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Region {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = RegionRepr::deserialize(d)?;
        Region::from_tuples(repr.base_size, repr.dim, &repr.tuples).map_err(serde::de::Error::custom)
    }
}

/// The unit region of `base^dim`.
pub fn full_space(base: &Base, dim: usize) -> Result<Region> {
    Region::full(base.len(), dim)
}

pub fn diagonal(base: &Base, dim: usize, i: usize, j: usize) -> Result<Region> {
    Region::diagonal(base.len(), dim, i, j)
}

pub fn cylindrify(x: &Region, i: usize) -> Result<Region> {
    x.cylindrify(i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_cyl(x: &Region, i: usize) -> Region {
        let all = Region::full(x.base_size(), x.dim()).unwrap();
        let members: Vec<Vec<usize>> = x.tuples().collect();
        Region::from_predicate(x.base_size(), x.dim(), |s| {
            members
                .iter()
                .any(|t| (0..s.len()).all(|j| j == i || s[j] == t[j]))
        })
        .unwrap()
        .meet(&all)
    }

    #[test]
    fn full_space_counts() {
        let ab = Base::new(["a", "b"]).unwrap();
        assert_eq!(full_space(&ab, 2).unwrap().len(), 4);
        let a = Base::new(["a"]).unwrap();
        let r = full_space(&a, 3).unwrap();
        assert_eq!(r.tuples().collect::<Vec<_>>(), vec![vec![0, 0, 0]]);
        let four = Base::numbered(4).unwrap();
        assert_eq!(full_space(&four, 2).unwrap().len(), 16);
        assert_eq!(full_space(&four, 0), Err(Error::ZeroDimension));
    }

    #[test]
    fn diagonal_examples() {
        let ab = Base::new(["a", "b"]).unwrap();
        let d = diagonal(&ab, 2, 0, 1).unwrap();
        assert_eq!(d.tuples().collect::<Vec<_>>(), vec![vec![0, 0], vec![1, 1]]);
        assert_eq!(diagonal(&ab, 3, 1, 1).unwrap(), full_space(&ab, 3).unwrap());
        assert_eq!(diagonal(&Base::numbered(4).unwrap(), 2, 0, 1).unwrap().len(), 4);
        assert!(matches!(diagonal(&ab, 2, 0, 2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn cylindrify_examples() {
        let b = Base::new(["a0", "a1", "b0", "b1"]).unwrap();
        let empty = Region::empty(4, 2).unwrap();
        assert!(cylindrify(&empty, 0).unwrap().is_empty());
        let x = Region::from_tuples(4, 2, [[0, 2]]).unwrap();
        let c = cylindrify(&x, 0).unwrap();
        assert_eq!(c.tuples().collect::<Vec<_>>(), vec![vec![0, 2], vec![1, 2], vec![2, 2], vec![3, 2]]);
        let full = full_space(&b, 2).unwrap();
        assert_eq!(cylindrify(&full, 1).unwrap(), full);
        assert!(cylindrify(&x, 2).is_err());
    }

    #[test]
    fn project_and_lift() {
        let x = Region::from_tuples(3, 2, [[0, 1], [2, 2]]).unwrap();
        let up = x.lift(1).unwrap();
        assert_eq!(up.len(), 6);
        assert_eq!(up.project(2).unwrap(), x);
        assert_eq!(up.cylindrify(2).unwrap(), up);
    }

    #[test]
    fn serde_round_trip() {
        let x = Region::from_tuples(3, 2, [[2, 1], [0, 2]]).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"dim":2,"base_size":3,"tuples":[[0,2],[2,1]]}"#);
        let y: Region = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }

    fn arb_region() -> impl Strategy<Value = Region> {
        (1usize..=4, 1usize..=3).prop_flat_map(|(b, d)| {
            let size = b.pow(d as u32);
            (Just(b), Just(d), proptest::collection::vec(any::<bool>(), size))
        })
        .prop_map(|(b, d, mask)| {
            let mut r = Region::empty(b, d).unwrap();
            for (t, keep) in mask.into_iter().enumerate() {
                if keep {
                    r.set(t);
                }
            }
            r
        })
    }

    proptest! {
        #[test]
        fn cylindrify_matches_definition(x in arb_region(), i in 0usize..3) {
            prop_assume!(i < x.dim());
            prop_assert_eq!(x.cylindrify(i).unwrap(), brute_cyl(&x, i));
        }

        #[test]
        fn cylindrify_idempotent(x in arb_region(), i in 0usize..3) {
            prop_assume!(i < x.dim());
            let c = x.cylindrify(i).unwrap();
            prop_assert_eq!(c.cylindrify(i).unwrap(), c);
        }

        #[test]
        fn cylindrify_additive(x in arb_region(), seed in any::<u64>(), i in 0usize..3) {
            prop_assume!(i < x.dim());
            let mut y = Region::empty(x.base_size(), x.dim()).unwrap();
            for t in 0..x.space_size() {
                if (seed >> (t % 64)) & 1 == 1 { y.set(t); }
            }
            let lhs = x.join(&y).cylindrify(i).unwrap();
            let rhs = x.cylindrify(i).unwrap().join(&y.cylindrify(i).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn complement_involutive(x in arb_region()) {
            prop_assert_eq!(x.complement().complement(), x.clone());
            prop_assert_eq!(x.len() + x.complement().len(), x.space_size());
        }
    }
}
