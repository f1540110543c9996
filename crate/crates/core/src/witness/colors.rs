use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::blocked::{d_predicate, permutations, BlockedBase};
use crate::error::{Error, Result};
use crate::region::Region;

/// The relations `C_r`, one region of dimension `n` per color `r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorFamily {
    n: usize,
    colors: Vec<Region>,
}

impl ColorFamily {
    /// `rcount` empty colors.
    pub fn empty(bb: &BlockedBase, rcount: usize) -> Result<Self> {
        if rcount == 0 {
            return Err(Error::InvalidParameter("at least one color is needed".into()));
        }
        let blank = Region::empty(bb.len(), bb.n())?;
        Ok(ColorFamily {
            n: bb.n(),
            colors: vec![blank; rcount],
        })
    }

    pub fn from_regions(bb: &BlockedBase, colors: Vec<Region>) -> Result<Self> {
        if colors.is_empty() {
            return Err(Error::InvalidParameter("at least one color is needed".into()));
        }
        let blank = Region::empty(bb.len(), bb.n())?;
        for c in &colors {
            blank.check_shape(c)?;
        }
        Ok(ColorFamily { n: bb.n(), colors })
    }

    /// Colors each transversal by the sum of its points' positions inside their
    /// blocks, modulo `rcount`. The sum is symmetric, so the family is closed
    /// under coordinate permutations.
    pub fn cyclic(bb: &BlockedBase, rcount: usize) -> Result<Self> {
        let blocks: Vec<Vec<usize>> = (0..bb.n()).map(|i| bb.block(i)).collect();
        let pos = |p: usize| blocks[bb.block_of(p)].iter().position(|&q| q == p).unwrap();
        let mut cf = ColorFamily::empty(bb, rcount)?;
        for t in bb.literal_transversals() {
            let r = t.iter().map(|&p| pos(p)).sum::<usize>() % rcount;
            for pi in permutations(bb.n()) {
                let s: Vec<usize> = pi.iter().map(|&k| t[k]).collect();
                cf.colors[r].insert(&s);
            }
        }
        Ok(cf)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rcount(&self) -> usize {
        self.colors.len()
    }

    pub fn color(&self, r: usize) -> &Region {
        &self.colors[r]
    }

    pub fn colors(&self) -> &[Region] {
        &self.colors
    }

    pub(crate) fn color_mut(&mut self, r: usize) -> &mut Region {
        &mut self.colors[r]
    }

    /// Colors whose relation contains `s`.
    pub fn colors_of(&self, s: &[usize]) -> Vec<usize> {
        (0..self.colors.len()).filter(|&r| self.colors[r].contains(s)).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.iter().all(Region::is_empty)
    }

    fn check_colors(&self, x: &BTreeSet<usize>) -> Result<()> {
        match x.iter().find(|&&r| r >= self.colors.len()) {
            Some(r) => Err(Error::InvalidParameter(format!("color {r} is not in R"))),
            None => Ok(()),
        }
    }

    fn blank(&self) -> Region {
        Region::empty(self.colors[0].base_size(), self.n).expect("shape already validated")
    }
}

/// `eta(X)`: the union of `C_r` for `r` in `X`.
pub fn eta_pos(x: &BTreeSet<usize>, cf: &ColorFamily) -> Result<Region> {
    cf.check_colors(x)?;
    let mut out = cf.blank();
    for &r in x {
        out.join_assign(cf.color(r));
    }
    Ok(out)
}

/// `eta(R ~ X)`: the intersection of the complements of `C_r` for `r` in `X`.
pub fn eta_neg(x: &BTreeSet<usize>, cf: &ColorFamily) -> Result<Region> {
    cf.check_colors(x)?;
    let mut out = cf.blank().complement();
    for &r in x {
        out = out.minus(cf.color(r));
    }
    Ok(out)
}

/// `p(u, r)`: the members of `C_r` whose `i`-th entry lies in `W_{u(i)}`.
pub fn p_region(u: &[usize], r: usize, cf: &ColorFamily, bb: &BlockedBase) -> Result<Region> {
    if r >= cf.rcount() {
        return Err(Error::InvalidParameter(format!("color {r} is not in R")));
    }
    let slice = super::blocked::one_u(u, bb)?;
    Ok(cf.color(r).meet(&slice))
}

/// Transversal tuples of `cf` that are not literal (`s_i in W_i`) are still
/// allowed; this reports whether every member of every color is a transversal.
pub fn all_transversal(cf: &ColorFamily, bb: &BlockedBase) -> bool {
    cf.colors().iter().all(|c| c.tuples().all(|t| d_predicate(&t, bb)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::blocked::permutations;

    #[test]
    fn cyclic_family_is_a_latin_square() {
        let bb = BlockedBase::new(2, 2).unwrap();
        let cf = ColorFamily::cyclic(&bb, 2).unwrap();
        assert_eq!(cf.color(0).tuples().collect::<Vec<_>>(), vec![vec![0, 2], vec![1, 3], vec![2, 0], vec![3, 1]]);
        assert_eq!(cf.color(1).len(), 4);
        assert!(all_transversal(&cf, &bb));
    }

    #[test]
    fn eta_examples() {
        let bb = BlockedBase::new(2, 2).unwrap();
        let cf = ColorFamily::cyclic(&bb, 2).unwrap();
        let none = BTreeSet::new();
        let all: BTreeSet<usize> = [0, 1].into();
        assert!(eta_pos(&none, &cf).unwrap().is_empty());
        assert_eq!(eta_neg(&none, &cf).unwrap(), Region::full(4, 2).unwrap());
        assert_eq!(eta_pos(&[0].into(), &cf).unwrap(), *cf.color(0));
        assert_eq!(eta_neg(&all, &cf).unwrap(), eta_pos(&all, &cf).unwrap().complement());
        assert_eq!(eta_neg(&[0].into(), &cf).unwrap(), cf.color(0).complement());
        assert!(eta_pos(&[5].into(), &cf).is_err());
    }

    #[test]
    fn p_regions_partition_each_color() {
        let bb = BlockedBase::new(2, 3).unwrap();
        let cf = ColorFamily::cyclic(&bb, 3).unwrap();
        for r in 0..3 {
            let mut union = Region::empty(6, 2).unwrap();
            for u in permutations(2) {
                let p = p_region(&u, r, &cf, &bb).unwrap();
                assert!(p.is_disjoint(&union));
                union.join_assign(&p);
            }
            assert_eq!(union, *cf.color(r));
        }
        let id = p_region(&[0, 1], 0, &cf, &bb).unwrap();
        assert!(id.tuples().all(|t| bb.block_of(t[0]) == 0 && bb.block_of(t[1]) == 1));
        let empty = ColorFamily::empty(&bb, 2).unwrap();
        assert!(p_region(&[1, 0], 1, &empty, &bb).unwrap().is_empty());
    }
}
