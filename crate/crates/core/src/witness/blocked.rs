use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::region::{Base, Region};

/// A base partitioned into `n` disjoint blocks `W_0 .. W_{n-1}`, with the
/// construction layer each point was added in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BlockedBaseRepr", into = "BlockedBaseRepr")]
pub struct BlockedBase {
    n: usize,
    base: Base,
    block_of: Vec<usize>,
    layer_of: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct BlockedBaseRepr {
    n: usize,
    points: Vec<PointRepr>,
}

#[derive(Serialize, Deserialize)]
struct PointRepr {
    name: String,
    block: usize,
    layer: usize,
}

impl From<BlockedBase> for BlockedBaseRepr {
    fn from(b: BlockedBase) -> Self {
        BlockedBaseRepr {
            n: b.n,
            points: (0..b.len())
                .map(|p| PointRepr {
                    name: b.base.name(p).to_string(),
                    block: b.block_of[p],
                    layer: b.layer_of[p],
                })
                .collect(),
        }
    }
}

impl TryFrom<BlockedBaseRepr> for BlockedBase {
    type Error = Error;
    fn try_from(r: BlockedBaseRepr) -> Result<Self> {
        let base = Base::new(r.points.iter().map(|p| p.name.clone()))?;
        let bb = BlockedBase {
            n: r.n,
            base,
            block_of: r.points.iter().map(|p| p.block).collect(),
            layer_of: r.points.iter().map(|p| p.layer).collect(),
        };
        bb.validate()?;
        Ok(bb)
    }
}

impl BlockedBase {
    /// `n` blocks of `m` points each, all in layer 0. Point `i * m + j` is the
    /// `j`-th point of block `i`.
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        if m == 0 {
            return Err(Error::InvalidParameter("blocks need at least one point".into()));
        }
        let mut bb = BlockedBase {
            n,
            base: Base::empty(),
            block_of: Vec::new(),
            layer_of: Vec::new(),
        };
        for i in 0..n {
            for _ in 0..m {
                bb.push_point(i, 0);
            }
        }
        Ok(bb)
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::ZeroDimension);
        }
        if self.block_of.iter().any(|&b| b >= self.n) {
            return Err(Error::Malformed("block index out of range".into()));
        }
        if (0..self.n).any(|i| !self.block_of.contains(&i)) {
            return Err(Error::Malformed("every block needs at least one point".into()));
        }
        Ok(())
    }

    pub(crate) fn push_point(&mut self, block: usize, layer: usize) -> usize {
        let id = self.block_of.len();
        let k = self.block_of.iter().filter(|&&b| b == block).count();
        let mut names: Vec<String> = self.base.names().to_vec();
        names.push(format!("w{block}_{k}"));
        self.base = Base::new(names).expect("generated names are distinct");
        self.block_of.push(block);
        self.layer_of.push(layer);
        id
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn block_of(&self, p: usize) -> usize {
        self.block_of[p]
    }

    pub fn layer_of(&self, p: usize) -> usize {
        self.layer_of[p]
    }

    pub fn block(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&p| self.block_of[p] == i).collect()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.block(i).len()).collect()
    }

    pub fn max_layer(&self) -> usize {
        self.layer_of.iter().copied().max().unwrap_or(0)
    }

    /// Points added in layer `<= layer`, ascending.
    pub fn points_up_to_layer(&self, layer: usize) -> Vec<usize> {
        (0..self.len()).filter(|&p| self.layer_of[p] <= layer).collect()
    }

    /// Every block transversal, as tuples whose `i`-th entry lies in `W_i`,
    /// in lexicographic order.
    pub fn literal_transversals(&self) -> Vec<Vec<usize>> {
        let blocks: Vec<Vec<usize>> = (0..self.n).map(|i| self.block(i)).collect();
        let mut out = vec![Vec::new()];
        for b in &blocks {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<usize>| {
                    b.iter().map(move |&p| {
                        let mut t = prefix.clone();
                        t.push(p);
                        t
                    })
                })
                .collect();
        }
        out
    }
}

/// `D(s)`: the blocks of the entries of `s` form a permutation of `0..n`.
pub fn d_predicate(s: &[usize], bb: &BlockedBase) -> bool {
    if s.len() != bb.n() {
        return false;
    }
    let mut hit = vec![false; bb.n()];
    for &p in s {
        let b = bb.block_of(p);
        if hit[b] {
            return false;
        }
        hit[b] = true;
    }
    true
}

/// `1_u = W_{u(0)} x .. x W_{u(n-1)}`.
pub fn one_u(u: &[usize], bb: &BlockedBase) -> Result<Region> {
    if u.len() != bb.n() || u.iter().any(|&b| b >= bb.n()) {
        return Err(Error::InvalidParameter(format!("{u:?} is not a map from {0} to {0}", bb.n())));
    }
    Region::from_predicate(bb.len(), bb.n(), |s| {
        s.iter().zip(u).all(|(&p, &b)| bb.block_of(p) == b)
    })
}

/// All maps `0..n -> 0..n`, lexicographic.
pub fn all_maps(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<usize>| {
                (0..n).map(move |v| {
                    let mut t = prefix.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

/// All permutations of `0..n`, lexicographic.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    all_maps(n)
        .into_iter()
        .filter(|m| {
            let mut seen = vec![false; n];
            m.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
        })
        .collect()
}
