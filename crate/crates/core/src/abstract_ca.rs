//! Cylindric algebras given by operation tables over `0..size`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite algebra in the cylindric signature, stored as tables.
///
/// `dim == 0` is allowed here and means a plain Boolean algebra (no
/// cylindrifications, no diagonals); relativizations are returned in that form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "AbstractCaRepr", into = "AbstractCaRepr")]
pub struct AbstractCA {
    dim: usize,
    size: usize,
    meet: Vec<u32>,
    complement: Vec<u32>,
    cyl: Vec<Vec<u32>>,
    zero: u32,
    one: u32,
    diag: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct AbstractCaRepr {
    dim: usize,
    size: usize,
    meet: Vec<Vec<u32>>,
    complement: Vec<u32>,
    cylindrifications: Vec<Vec<u32>>,
    zero: u32,
    one: u32,
    diagonals: Vec<Vec<u32>>,
}

impl From<AbstractCA> for AbstractCaRepr {
    fn from(a: AbstractCA) -> Self {
        AbstractCaRepr {
            dim: a.dim,
            size: a.size,
            meet: a.meet.chunks(a.size.max(1)).map(|c| c.to_vec()).collect(),
            complement: a.complement,
            cylindrifications: a.cyl,
            zero: a.zero,
            one: a.one,
            diagonals: a.diag.chunks(a.dim.max(1)).map(|c| c.to_vec()).collect(),
        }
    }
}

impl TryFrom<AbstractCaRepr> for AbstractCA {
    type Error = Error;
    fn try_from(r: AbstractCaRepr) -> Result<Self> {
        AbstractCA::from_tables(
            r.dim,
            r.size,
            r.meet.concat(),
            r.complement,
            r.cylindrifications,
            r.zero,
            r.one,
            r.diagonals.concat(),
        )
    }
}

impl AbstractCA {
    /// Validates that every table is total on the universe. `meet` is row-major
    /// `size * size`, `diag` row-major `dim * dim`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_tables(
        dim: usize,
        size: usize,
        meet: Vec<u32>,
        complement: Vec<u32>,
        cyl: Vec<Vec<u32>>,
        zero: u32,
        one: u32,
        diag: Vec<u32>,
    ) -> Result<Self> {
        if size == 0 {
            return Err(Error::Malformed("empty universe".into()));
        }
        let in_range = |v: &u32| (*v as usize) < size;
        if meet.len() != size * size || !meet.iter().all(in_range) {
            return Err(Error::Malformed("meet table is not total".into()));
        }
        if complement.len() != size || !complement.iter().all(in_range) {
            return Err(Error::Malformed("complement table is not total".into()));
        }
        if cyl.len() != dim || cyl.iter().any(|t| t.len() != size || !t.iter().all(in_range)) {
            return Err(Error::Malformed("cylindrification tables are not total".into()));
        }
        if diag.len() != dim * dim || !diag.iter().all(in_range) {
            return Err(Error::Malformed("diagonal constants out of range".into()));
        }
        if !in_range(&zero) || !in_range(&one) {
            return Err(Error::Malformed("constants out of range".into()));
        }
        Ok(AbstractCA {
            dim,
            size,
            meet,
            complement,
            cyl,
            zero,
            one,
            diag,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn meet(&self, a: u32, b: u32) -> u32 {
        self.meet[a as usize * self.size + b as usize]
    }

    #[inline]
    pub fn complement(&self, a: u32) -> u32 {
        self.complement[a as usize]
    }

    pub fn join(&self, a: u32, b: u32) -> u32 {
        self.complement(self.meet(self.complement(a), self.complement(b)))
    }

    #[inline]
    pub fn cyl(&self, i: usize, a: u32) -> u32 {
        self.cyl[i][a as usize]
    }

    pub fn diag(&self, i: usize, j: usize) -> u32 {
        self.diag[i * self.dim + j]
    }

    pub fn zero(&self) -> u32 {
        self.zero
    }

    pub fn one(&self) -> u32 {
        self.one
    }

    pub fn leq(&self, a: u32, b: u32) -> bool {
        self.meet(a, b) == a
    }

    pub fn meet_table(&self) -> &[u32] {
        &self.meet
    }

    pub fn complement_table(&self) -> &[u32] {
        &self.complement
    }

    pub fn cyl_table(&self, i: usize) -> &[u32] {
        &self.cyl[i]
    }

    pub fn diagonal_table(&self) -> &[u32] {
        &self.diag
    }

    /// Nonzero elements with nothing strictly between them and zero.
    pub fn atoms(&self) -> Vec<u32> {
        (0..self.size as u32)
            .filter(|&a| a != self.zero)
            .filter(|&a| {
                (0..self.size as u32).all(|b| {
                    let m = self.meet(a, b);
                    m == self.zero || m == a
                })
            })
            .collect()
    }

    /// The same algebra with its universe renamed by `perm` (old index -> new index).
    pub fn permuted(&self, perm: &[u32]) -> Result<AbstractCA> {
        if perm.len() != self.size {
            return Err(Error::Malformed("permutation has the wrong length".into()));
        }
        let mut inv = vec![u32::MAX; self.size];
        for (old, &new) in perm.iter().enumerate() {
            if new as usize >= self.size || inv[new as usize] != u32::MAX {
                return Err(Error::Malformed("not a permutation".into()));
            }
            inv[new as usize] = old as u32;
        }
        let n = self.size;
        let mut meet = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                meet[a * n + b] = perm[self.meet(inv[a], inv[b]) as usize];
            }
        }
        let complement = (0..n).map(|a| perm[self.complement(inv[a]) as usize]).collect();
        let cyl = (0..self.dim)
            .map(|i| (0..n).map(|a| perm[self.cyl(i, inv[a]) as usize]).collect())
            .collect();
        let diag = self.diag.iter().map(|&d| perm[d as usize]).collect();
        AbstractCA::from_tables(
            self.dim,
            n,
            meet,
            complement,
            cyl,
            perm[self.zero as usize],
            perm[self.one as usize],
            diag,
        )
    }
}
