//! Bounded search for set-algebra dilations: is a finite `b` of dimension `n`
//! isomorphic to `Nr_n D` for a set algebra `D` of dimension `n + k` over a
//! small base?
//!
//! A dilation restricted to `c_{n..}`-fixed elements is a representation of
//! `b` over the same base, and `Nr_n` of the algebra generated by that
//! representation is the smallest possible. So the search enumerates
//! representations (atom colorings of `base^n`) and tests each generated
//! algebra.

use serde::Serialize;

use crate::abstract_ca::AbstractCA;
use crate::error::{Error, Result};
use crate::json;
use crate::region::{Base, Region};
use crate::setca::{generate_subalgebra_capped, neat_reduct, SetCA};

pub const DEFAULT_NODE_BUDGET: u64 = 2_000_000;
pub const DILATION_ATOM_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessSource {
    Search,
    Hint,
}

/// A representation of `b` whose generated `(n + k)`-dimensional algebra has
/// exactly the image of `b` as its neat reduct.
#[derive(Debug, Clone, Serialize)]
pub struct DilationWitness {
    pub n: usize,
    pub k: usize,
    pub source: WitnessSource,
    pub base: Base,
    /// `h(a)` for the atoms of `b`, in the order of [`AbstractCA::atoms`].
    pub atom_images: Vec<Region>,
    pub dilation_atoms: usize,
    pub dilation_digest: String,
    pub stats: SearchStats,
    #[serde(skip)]
    pub dilation: SetCA,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub representations: u64,
    pub hints_tried: usize,
    /// Base sizes whose search space was exhausted without a witness.
    pub bases_exhausted: Vec<usize>,
}

/// No set-algebra dilation over a base of size `<= max_base`.
#[derive(Debug, Clone, Serialize)]
pub struct RefutationCertificate {
    pub candidate: String,
    pub n: usize,
    pub k: usize,
    pub max_base: usize,
    pub stats: SearchStats,
    pub exhausted: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Inconclusive {
    pub candidate: String,
    pub n: usize,
    pub k: usize,
    pub max_base: usize,
    pub budget: u64,
    pub stopped_at_base: usize,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "result", rename_all = "lowercase")]
pub enum NeatOutcome {
    Witness(DilationWitness),
    Refutation(RefutationCertificate),
    Inconclusive(Inconclusive),
}

/// A candidate representation to try before or beside the search.
#[derive(Debug, Clone)]
pub struct Hint {
    pub base: Base,
    pub atom_images: Vec<Region>,
}

/// Atom-level view of `b`.
struct Shape {
    n: usize,
    atoms: usize,
    /// `cls[i][a]`: atoms below `c_i a`.
    cls: Vec<Vec<u64>>,
    /// `diag[i * n + j]`: atoms below `d_ij`.
    diag: Vec<u64>,
}

impl Shape {
    fn new(b: &AbstractCA, n: usize) -> Result<Self> {
        if b.dim() != n {
            return Err(Error::InvalidParameter(format!("candidate has dimension {}, not {n}", b.dim())));
        }
        let atoms = b.atoms();
        if atoms.len() > 64 {
            return Err(Error::InvalidParameter("at most 64 atoms".into()));
        }
        let below = |x: u32| -> u64 {
            atoms
                .iter()
                .enumerate()
                .filter(|(_, &a)| b.meet(a, x) == a)
                .fold(0, |m, (k, _)| m | 1 << k)
        };
        Ok(Shape {
            n,
            atoms: atoms.len(),
            cls: (0..n).map(|i| atoms.iter().map(|&a| below(b.cyl(i, a))).collect()).collect(),
            diag: (0..n * n).map(|d| below(b.diag(d / n, d % n))).collect(),
        })
    }

    fn union(&self, images: &[Region], mask: u64, s: usize) -> Result<Region> {
        let mut r = Region::empty(s, self.n)?;
        for (k, img) in images.iter().enumerate() {
            if mask >> k & 1 == 1 {
                r.join_assign(img);
            }
        }
        Ok(r)
    }

    /// Images partition the unit and commute with `c_i` and `d_ij`.
    fn is_representation(&self, images: &[Region], s: usize) -> Result<bool> {
        Ok(self.representation_defect(images, s)?.is_none())
    }

    fn representation_defect(&self, images: &[Region], s: usize) -> Result<Option<Defect>> {
        let defect = |check: &str, detail: serde_json::Value| Ok(Some(Defect { check: check.into(), detail }));
        if images.len() != self.atoms || images.iter().any(|r| r.dim() != self.n || r.base_size() != s) {
            return defect("shape", serde_json::json!({ "atoms": self.atoms, "images": images.len() }));
        }
        let mut seen = Region::empty(s, self.n)?;
        for (a, r) in images.iter().enumerate() {
            if r.is_empty() || !r.is_disjoint(&seen) {
                return defect("partition", serde_json::json!({ "atom": a }));
            }
            seen.join_assign(r);
        }
        if seen != Region::full(s, self.n)? {
            return defect("partition", serde_json::json!({ "uncovered": seen.complement().tuples().next() }));
        }
        for i in 0..self.n {
            for j in 0..self.n {
                let want = Region::diagonal(s, self.n, i, j)?;
                let got = self.union(images, self.diag[i * self.n + j], s)?;
                if got != want {
                    let t = got.meet(&want.complement()).join(&want.meet(&got.complement())).tuples().next();
                    return defect("diagonal", serde_json::json!({ "i": i, "j": j, "tuple": t }));
                }
            }
            for (a, img) in images.iter().enumerate() {
                let got = img.cylindrify(i)?;
                let want = self.union(images, self.cls[i][a], s)?;
                if got != want {
                    let t = got.meet(&want.complement()).join(&want.meet(&got.complement())).tuples().next();
                    return defect("cylindrification", serde_json::json!({ "i": i, "atom": a, "tuple": t }));
                }
            }
        }
        Ok(None)
    }
}

/// `Sg` of the lifted images, if its neat reduct is exactly the image of `b`.
fn dilation_for(base: &Base, n: usize, k: usize, images: &[Region]) -> Result<Option<SetCA>> {
    let lifted = images.iter().map(|r| r.lift(k)).collect::<Result<Vec<_>>>()?;
    let d = match generate_subalgebra_capped(base, n + k, &lifted, DILATION_ATOM_CAP) {
        Ok(d) => d,
        Err(Error::AtomCap { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let nr = if n + k == n { d.clone() } else { neat_reduct(&d, n)? };
    Ok((nr.atom_count() == images.len()).then_some(d))
}

fn witness(n: usize, k: usize, source: WitnessSource, base: Base, atom_images: Vec<Region>, d: SetCA) -> DilationWitness {
    DilationWitness {
        n,
        k,
        source,
        base,
        atom_images,
        dilation_atoms: d.atom_count(),
        dilation_digest: json::digest(&d),
        stats: SearchStats::default(),
        dilation: d,
    }
}

fn digits(mut idx: usize, s: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for j in (0..n).rev() {
        out[j] = idx % s;
        idx /= s;
    }
    out
}

/// Backtracking over colorings of `s^n` by atoms, in lexicographic tuple order.
struct Search<'a> {
    shape: &'a Shape,
    s: usize,
    tuples: Vec<Vec<usize>>,
    /// `lines[t][i]`: tuples differing from `t` only at `i`, `t` included.
    lines: Vec<Vec<Vec<usize>>>,
    diagonal_points: Vec<Option<usize>>,
    nodes: &'a mut u64,
    budget: u64,
    representations: u64,
}

enum Step {
    Found(Vec<Region>, SetCA),
    Exhausted,
    Budget,
}

impl<'a> Search<'a> {
    fn new(shape: &'a Shape, s: usize, nodes: &'a mut u64, budget: u64) -> Self {
        let n = shape.n;
        let space = s.pow(n as u32);
        let tuples: Vec<Vec<usize>> = (0..space).map(|t| digits(t, s, n)).collect();
        let stride = |i: usize| s.pow((n - 1 - i) as u32);
        let lines = (0..space)
            .map(|t| {
                (0..n)
                    .map(|i| (0..s).map(|v| t - tuples[t][i] * stride(i) + v * stride(i)).collect())
                    .collect()
            })
            .collect();
        let diagonal_points = tuples
            .iter()
            .map(|t| t.iter().all(|&x| x == t[0]).then(|| t.first().copied().unwrap_or(0)))
            .collect();
        Search {
            shape,
            s,
            tuples,
            lines,
            diagonal_points,
            nodes,
            budget,
            representations: 0,
        }
    }

    fn initial_domains(&self) -> Vec<u64> {
        let all = if self.shape.atoms == 64 { u64::MAX } else { (1u64 << self.shape.atoms) - 1 };
        let n = self.shape.n;
        self.tuples
            .iter()
            .map(|t| {
                let mut d = all;
                for i in 0..n {
                    for j in 0..n {
                        let m = self.shape.diag[i * n + j];
                        d &= if t[i] == t[j] { m } else { all & !m };
                    }
                }
                d
            })
            .collect()
    }

    fn run(&mut self, k: usize, base: &Base) -> Result<Step> {
        let mut dom = self.initial_domains();
        let mut color = vec![usize::MAX; self.tuples.len()];
        self.descend(0, &mut dom, &mut color, k, base)
    }

    fn consistent(&self, t: usize, dom: &[u64], color: &[usize]) -> bool {
        for (i, line) in self.lines[t].iter().enumerate() {
            let a = color[t];
            let mut need = self.shape.cls[i][a];
            let mut free = 0u64;
            let mut open = 0u32;
            for &x in line {
                if color[x] == usize::MAX {
                    free |= dom[x];
                    open += 1;
                } else {
                    need &= !(1 << color[x]);
                }
            }
            if need.count_ones() > open || need & !free != 0 {
                return false;
            }
        }
        let mut used = 0u64;
        let mut free = 0u64;
        let mut open = 0u32;
        for (x, &c) in color.iter().enumerate() {
            if c == usize::MAX {
                free |= dom[x];
                open += 1;
            } else {
                used |= 1 << c;
            }
        }
        let all = if self.shape.atoms == 64 { u64::MAX } else { (1u64 << self.shape.atoms) - 1 };
        let missing = all & !used;
        missing.count_ones() <= open && missing & !free == 0
    }

    fn descend(&mut self, t: usize, dom: &mut Vec<u64>, color: &mut Vec<usize>, k: usize, base: &Base) -> Result<Step> {
        if t == self.tuples.len() {
            self.representations += 1;
            let images: Vec<Region> = (0..self.shape.atoms)
                .map(|a| {
                    Region::from_predicate(self.s, self.shape.n, |tup| {
                        color[tup.iter().fold(0, |acc, &x| acc * self.s + x)] == a
                    })
                })
                .collect::<Result<_>>()?;
            debug_assert!(self.shape.is_representation(&images, self.s)?);
            return Ok(match dilation_for(base, self.shape.n, k, &images)? {
                Some(d) => Step::Found(images, d),
                None => Step::Exhausted,
            });
        }
        // diagonal points get non-decreasing colors: renaming points sorts them
        let floor = match self.diagonal_points[t] {
            Some(p) if p > 0 => {
                let prev = self.tuples.iter().position(|x| x.iter().all(|&v| v == p - 1)).unwrap();
                color[prev]
            }
            _ => 0,
        };
        let mut options = dom[t];
        while options != 0 {
            let a = options.trailing_zeros() as usize;
            options &= options - 1;
            if a < floor {
                continue;
            }
            *self.nodes += 1;
            if *self.nodes > self.budget {
                return Ok(Step::Budget);
            }
            let saved = dom.clone();
            color[t] = a;
            dom[t] = 1 << a;
            let mut ok = true;
            for i in 0..self.shape.n {
                for &x in &self.lines[t][i] {
                    if x != t {
                        dom[x] &= self.shape.cls[i][a];
                        ok &= dom[x] != 0;
                    }
                }
            }
            if ok && self.consistent(t, dom, color) {
                match self.descend(t + 1, dom, color, k, base)? {
                    Step::Exhausted => {}
                    found => return Ok(found),
                }
            }
            color[t] = usize::MAX;
            *dom = saved;
        }
        Ok(Step::Exhausted)
    }
}

/// [`dilation_search_with_hints`] without hints.
pub fn dilation_search(b: &AbstractCA, n: usize, k: usize, max_base: usize, budget: u64) -> Result<NeatOutcome> {
    dilation_search_with_hints(b, n, k, max_base, budget, &[])
}

/// Searches base sizes `0..=max_base` in order; a hint is tried when the
/// search reaches its base size, or after the search if it is larger. The
/// node budget is shared by all base sizes; once it runs out only hints are
/// still tried.
pub fn dilation_search_with_hints(b: &AbstractCA, n: usize, k: usize, max_base: usize, budget: u64, hints: &[Hint]) -> Result<NeatOutcome> {
    let shape = Shape::new(b, n)?;
    let mut stats = SearchStats::default();
    let mut nodes = 0u64;
    let mut stopped = None;
    let done = |mut w: DilationWitness, stats: &SearchStats, nodes: u64| {
        w.stats = stats.clone();
        w.stats.nodes = nodes;
        NeatOutcome::Witness(w)
    };
    let try_hints = |size: Option<usize>, stats: &mut SearchStats| -> Result<Option<DilationWitness>> {
        for h in hints.iter().filter(|h| size.is_none_or(|s| h.base.len() == s)) {
            if size.is_none() && h.base.len() <= max_base {
                continue;
            }
            stats.hints_tried += 1;
            if shape.is_representation(&h.atom_images, h.base.len())? {
                if let Some(d) = dilation_for(&h.base, n, k, &h.atom_images)? {
                    return Ok(Some(witness(n, k, WitnessSource::Hint, h.base.clone(), h.atom_images.clone(), d)));
                }
            }
        }
        Ok(None)
    };
    for s in 0..=max_base {
        if let Some(w) = try_hints(Some(s), &mut stats)? {
            return Ok(done(w, &stats, nodes));
        }
        if stopped.is_some() {
            continue;
        }
        let base = if s == 0 { Base::empty() } else { Base::numbered(s)? };
        if s.pow(n as u32) < shape.atoms || (s == 0) != (shape.atoms == 0) {
            stats.bases_exhausted.push(s);
            continue;
        }
        if shape.atoms == 0 {
            let d = dilation_for(&base, n, k, &[])?.expect("the one-element algebra is its own reduct");
            return Ok(done(witness(n, k, WitnessSource::Search, base, Vec::new(), d), &stats, nodes));
        }
        let mut search = Search::new(&shape, s, &mut nodes, budget);
        let step = search.run(k, &base)?;
        stats.representations += search.representations;
        match step {
            Step::Found(images, d) => {
                return Ok(done(witness(n, k, WitnessSource::Search, base, images, d), &stats, nodes));
            }
            Step::Exhausted => stats.bases_exhausted.push(s),
            Step::Budget => stopped = Some(s),
        }
    }
    if let Some(w) = try_hints(None, &mut stats)? {
        return Ok(done(w, &stats, nodes));
    }
    stats.nodes = nodes;
    let candidate = json::digest(b);
    Ok(match stopped {
        Some(s) => NeatOutcome::Inconclusive(Inconclusive {
            candidate,
            n,
            k,
            max_base,
            budget,
            stopped_at_base: s,
            stats,
        }),
        None => NeatOutcome::Refutation(RefutationCertificate {
            candidate,
            n,
            k,
            max_base,
            stats,
            exhausted: true,
        }),
    })
}

/// The first failed check of a dilation witness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Defect {
    pub check: String,
    pub detail: serde_json::Value,
}

/// Checks a witness from scratch: `D` is closed, the images are a
/// representation of `b`, and they are exactly the atoms of `Nr_n D`.
pub fn dilation_witness_defect(b: &AbstractCA, w: &DilationWitness) -> Result<Option<Defect>> {
    let shape = Shape::new(b, w.n)?;
    let d = &w.dilation;
    let defect = |check: &str, detail: serde_json::Value| Ok(Some(Defect { check: check.into(), detail }));
    if d.dim() != w.n + w.k || d.base() != &w.base {
        return defect("shape", serde_json::json!({ "dim": d.dim(), "base": d.base().len() }));
    }
    if let Err(why) = d.validate() {
        return defect("dilation_closed", serde_json::json!(why));
    }
    if json::digest(d) != w.dilation_digest {
        return defect("digest", serde_json::json!(w.dilation_digest));
    }
    if let Some(x) = shape.representation_defect(&w.atom_images, w.base.len())? {
        return Ok(Some(x));
    }
    let nr = if w.k == 0 { d.clone() } else { neat_reduct(d, w.n)? };
    if let Some(a) = w.atom_images.iter().position(|r| !nr.atoms().contains(r)) {
        return defect("neat_reduct", serde_json::json!({ "atom_not_in_reduct": a }));
    }
    if nr.atom_count() != w.atom_images.len() {
        return defect("neat_reduct", serde_json::json!({ "reduct_atoms": nr.atom_count(), "images": w.atom_images.len() }));
    }
    Ok(None)
}

pub fn verify_dilation_witness(b: &AbstractCA, w: &DilationWitness) -> Result<bool> {
    Ok(dilation_witness_defect(b, w)?.is_none())
}

#[cfg(test)]
mod tests;
