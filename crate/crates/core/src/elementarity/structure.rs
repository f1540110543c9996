use std::collections::BTreeSet;

use serde::Serialize;

use crate::abstract_ca::AbstractCA;
use crate::error::{Error, Result};
use crate::json;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Function {
    pub name: String,
    pub arity: usize,
    /// Values indexed by `sum args[j] * size^(arity - 1 - j)`.
    pub table: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub name: String,
    pub arity: usize,
    pub tuples: BTreeSet<Vec<u32>>,
}

/// A finite structure over `0..size`. Functions are read as their graphs:
/// atomic formulas are `x = y`, `R(x..)` and `f(x..) = y` with variables and
/// constants only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelStructure {
    pub size: usize,
    pub functions: Vec<Function>,
    pub relations: Vec<Relation>,
    pub constants: Vec<(String, u32)>,
}

impl RelStructure {
    pub fn new(size: usize) -> Self {
        RelStructure {
            size,
            functions: Vec::new(),
            relations: Vec::new(),
            constants: Vec::new(),
        }
    }

    pub fn with_function(mut self, name: &str, arity: usize, table: Vec<u32>) -> Result<Self> {
        let expected = self.size.checked_pow(arity as u32).ok_or(Error::InvalidParameter("function table too large".into()))?;
        if table.len() != expected || table.iter().any(|&v| v as usize >= self.size) {
            return Err(Error::Malformed(format!("function {name} is not total")));
        }
        self.functions.push(Function {
            name: name.to_string(),
            arity,
            table,
        });
        Ok(self)
    }

    pub fn with_relation(mut self, name: &str, arity: usize, tuples: impl IntoIterator<Item = Vec<u32>>) -> Result<Self> {
        let tuples: BTreeSet<Vec<u32>> = tuples.into_iter().collect();
        if tuples.iter().any(|t| t.len() != arity || t.iter().any(|&v| v as usize >= self.size)) {
            return Err(Error::Malformed(format!("relation {name} has a bad tuple")));
        }
        self.relations.push(Relation {
            name: name.to_string(),
            arity,
            tuples,
        });
        Ok(self)
    }

    pub fn with_constant(mut self, name: &str, value: u32) -> Result<Self> {
        if value as usize >= self.size {
            return Err(Error::Malformed(format!("constant {name} is outside the universe")));
        }
        self.constants.push((name.to_string(), value));
        Ok(self)
    }

    pub fn apply(&self, f: usize, args: &[u32]) -> u32 {
        let func = &self.functions[f];
        let idx = args.iter().fold(0usize, |acc, &a| acc * self.size + a as usize);
        func.table[idx]
    }

    pub fn holds(&self, r: usize, args: &[u32]) -> bool {
        self.relations[r].tuples.contains(args)
    }

    pub fn constant_values(&self) -> Vec<u32> {
        self.constants.iter().map(|c| c.1).collect()
    }

    /// Same symbols with the same arities, in the same order.
    pub fn same_signature(&self, other: &RelStructure) -> bool {
        self.functions.len() == other.functions.len()
            && self.relations.len() == other.relations.len()
            && self.constants.len() == other.constants.len()
            && self.functions.iter().zip(&other.functions).all(|(a, b)| a.name == b.name && a.arity == b.arity)
            && self.relations.iter().zip(&other.relations).all(|(a, b)| a.name == b.name && a.arity == b.arity)
            && self.constants.iter().zip(&other.constants).all(|(a, b)| a.0 == b.0)
    }

    pub fn digest(&self) -> String {
        json::digest(self)
    }

    /// The substructure on `elements`, renumbered in the given order. Fails
    /// when `elements` is not closed under the functions or misses a constant.
    pub fn substructure(&self, elements: &[u32]) -> Result<RelStructure> {
        let mut index = vec![u32::MAX; self.size];
        for (k, &e) in elements.iter().enumerate() {
            index[e as usize] = k as u32;
        }
        let mut sub = RelStructure::new(elements.len());
        for (fi, f) in self.functions.iter().enumerate() {
            let mut table = Vec::with_capacity(elements.len().pow(f.arity as u32));
            for idx in 0..elements.len().pow(f.arity as u32) {
                let args = decode(idx, elements.len(), f.arity).into_iter().map(|k| elements[k]).collect::<Vec<_>>();
                let v = index[self.apply(fi, &args) as usize];
                if v == u32::MAX {
                    return Err(Error::Malformed(format!("not closed under {}", f.name)));
                }
                table.push(v);
            }
            sub = sub.with_function(&f.name, f.arity, table)?;
        }
        for r in &self.relations {
            let tuples = r
                .tuples
                .iter()
                .filter(|t| t.iter().all(|&v| index[v as usize] != u32::MAX))
                .map(|t| t.iter().map(|&v| index[v as usize]).collect())
                .collect::<Vec<_>>();
            sub = sub.with_relation(&r.name, r.arity, tuples)?;
        }
        for (name, v) in &self.constants {
            if index[*v as usize] == u32::MAX {
                return Err(Error::Malformed(format!("constant {name} is missing")));
            }
            sub = sub.with_constant(name, index[*v as usize])?;
        }
        Ok(sub)
    }

    /// The same structure with `perm[x]` in place of `x`.
    pub fn permuted(&self, perm: &[u32]) -> Result<RelStructure> {
        let mut inv = vec![u32::MAX; self.size];
        for (x, &y) in perm.iter().enumerate() {
            if y as usize >= self.size || inv[y as usize] != u32::MAX {
                return Err(Error::Malformed("not a permutation".into()));
            }
            inv[y as usize] = x as u32;
        }
        let mut out = RelStructure::new(self.size);
        for (fi, f) in self.functions.iter().enumerate() {
            let table = (0..self.size.pow(f.arity as u32))
                .map(|idx| {
                    let args: Vec<u32> = decode(idx, self.size, f.arity).into_iter().map(|k| inv[k]).collect();
                    perm[self.apply(fi, &args) as usize]
                })
                .collect();
            out = out.with_function(&f.name, f.arity, table)?;
        }
        for r in &self.relations {
            out = out.with_relation(&r.name, r.arity, r.tuples.iter().map(|t| t.iter().map(|&v| perm[v as usize]).collect()))?;
        }
        for (name, v) in &self.constants {
            out = out.with_constant(name, perm[*v as usize])?;
        }
        Ok(out)
    }

    /// The Boolean algebra of subsets of `0..atoms` (elements are bit masks)
    /// with `meet`, `join`, `complement`, `0`, `1` and the named extras.
    pub fn boolean_algebra(atoms: usize, extras: &[(String, u32)]) -> Result<RelStructure> {
        if atoms > 10 {
            return Err(Error::InvalidParameter("at most 10 atoms".into()));
        }
        let size = 1usize << atoms;
        let full = (size - 1) as u32;
        let pairs = |op: fn(u32, u32) -> u32| -> Vec<u32> {
            (0..size * size).map(|i| op((i / size) as u32, (i % size) as u32)).collect()
        };
        let mut s = RelStructure::new(size)
            .with_function("meet", 2, pairs(|a, b| a & b))?
            .with_function("join", 2, pairs(|a, b| a | b))?
            .with_function("complement", 1, (0..size as u32).map(|a| !a & full).collect())?
            .with_constant("0", 0)?
            .with_constant("1", full)?;
        for (name, v) in extras {
            s = s.with_constant(name, *v)?;
        }
        Ok(s)
    }

    /// The cylindric signature: `meet`, `complement`, `c_i`, constants `0`,
    /// `1`, `d_ij`.
    pub fn from_ca(a: &AbstractCA) -> Result<RelStructure> {
        let n = a.size();
        let mut s = RelStructure::new(n)
            .with_function("meet", 2, a.meet_table().to_vec())?
            .with_function("complement", 1, a.complement_table().to_vec())?;
        for i in 0..a.dim() {
            s = s.with_function(&format!("c{i}"), 1, a.cyl_table(i).to_vec())?;
        }
        s = s.with_constant("0", a.zero())?.with_constant("1", a.one())?;
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                s = s.with_constant(&format!("d{i}{j}"), a.diag(i, j))?;
            }
        }
        Ok(s)
    }
}

pub(crate) fn decode(mut idx: usize, size: usize, arity: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for j in (0..arity).rev() {
        out[j] = idx % size.max(1);
        idx /= size.max(1);
    }
    out
}
