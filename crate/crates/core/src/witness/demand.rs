use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SaturationParams {
    pub k: usize,
    pub depth: usize,
    pub m0: usize,
}

impl SaturationParams {
    pub fn new(k: usize, depth: usize, m0: usize) -> Result<Self> {
        if k == 0 || m0 == 0 {
            return Err(Error::InvalidParameter("k and m0 must be at least 1".into()));
        }
        Ok(SaturationParams { k, depth, m0 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    /// `eta(X)`: the tuple carries one of the colors in `X`.
    Small,
    /// `eta(R ~ X)`: the tuple carries none of the colors in `X`.
    Cosmall,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Demand {
    pub slot: Vec<usize>,
    pub colorset: BTreeSet<usize>,
    pub polarity: Polarity,
}

impl Demand {
    pub fn new(slot: Vec<usize>, colorset: BTreeSet<usize>, polarity: Polarity) -> Result<Self> {
        if polarity == Polarity::Small && colorset.is_empty() {
            return Err(Error::InvalidParameter("a small demand needs a color".into()));
        }
        Ok(Demand { slot, colorset, polarity })
    }

    /// Whether a tuple carrying `color` (or no color) meets the demand.
    pub fn admits(&self, color: Option<usize>) -> bool {
        let inside = color.is_some_and(|c| self.colorset.contains(&c));
        match self.polarity {
            Polarity::Small => inside,
            Polarity::Cosmall => !inside,
        }
    }
}

/// `S(n, k)`: maps `0..n -> 0..n+k` whose range contains `n+k-1`, lexicographic.
pub fn s_indices(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return Vec::new();
    }
    let top = n + k;
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..top).map(move |v| {
                    let mut t = p.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out.retain(|m| m.contains(&(top - 1)));
    out
}

/// One-to-one tuples of length `len` over `points`, lexicographic in the order of `points`.
pub fn injective_tuples(points: &[usize], len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    let mut used = vec![false; points.len()];
    fn go(points: &[usize], len: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in 0..points.len() {
            if !used[i] {
                used[i] = true;
                cur.push(points[i]);
                go(points, len, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    go(points, len, &mut cur, &mut used, &mut out);
    out
}

/// Slots of `S(n, j)` whose instance over `v` extended by a point of block
/// `target` is a block transversal. Only block membership matters.
pub fn transversal_slots(n: usize, j: usize, v_blocks: &[usize], target: usize) -> Vec<Vec<usize>> {
    let mut ext = v_blocks.to_vec();
    ext.push(target);
    s_indices(n, j)
        .into_iter()
        .filter(|slot| {
            let mut hit = vec![false; n];
            slot.iter().all(|&c| !std::mem::replace(&mut hit[ext[c]], true))
        })
        .collect()
}

/// Instances of a slot that are permutations of each other must share a color;
/// the orbit of a transversal slot is its sorted range.
pub fn orbit_key(slot: &[usize]) -> Vec<usize> {
    let mut k = slot.to_vec();
    k.sort_unstable();
    k
}

/// Per orbit: the demands landing in it.
pub fn orbits(family: &[Demand]) -> BTreeMap<Vec<usize>, Vec<&Demand>> {
    let mut m: BTreeMap<Vec<usize>, Vec<&Demand>> = BTreeMap::new();
    for d in family {
        m.entry(orbit_key(&d.slot)).or_default().push(d);
    }
    m
}

/// Whether the demands of one orbit can be met by a single color when the
/// color set is unbounded: all small sets must share a color outside every
/// cosmall set. With no small demand a fresh color always works.
pub fn orbit_admissible(demands: &[&Demand]) -> bool {
    let (small, cos): (Vec<&&Demand>, Vec<&&Demand>) = demands.iter().partition(|d| d.polarity == Polarity::Small);
    let Some(first) = small.first() else {
        return true;
    };
    first
        .colorset
        .iter()
        .any(|c| small.iter().all(|d| d.colorset.contains(c)) && cos.iter().all(|d| !d.colorset.contains(c)))
}

pub fn family_admissible(family: &[Demand]) -> bool {
    orbits(family).values().all(|ds| orbit_admissible(ds))
}

/// Colors in `0..rcount` that meet every demand of the orbit.
pub fn allowed_colors(demands: &[&Demand], rcount: usize) -> BTreeSet<usize> {
    (0..rcount).filter(|&c| demands.iter().all(|d| d.admits(Some(c)))).collect()
}

/// Per orbit of a family: the positions of `v` it involves besides the
/// witness, and the colors its witness set may carry.
pub type Requirement = Vec<(Vec<usize>, BTreeSet<usize>)>;

/// The distinct requirements of all admissible families for a tuple with
/// blocks `v_blocks` and a witness in block `target`, in order of first
/// occurrence, with the number of families enumerated. A family admissible for
/// unbounded `R` that no color in `0..rcount` can meet is returned as the error.
pub fn requirement_shapes(
    n: usize,
    j: usize,
    v_blocks: &[usize],
    target: usize,
    rcount: usize,
) -> std::result::Result<(Vec<Requirement>, u64), Vec<Demand>> {
    let fresh = n + j - 1;
    let mut out: Vec<Requirement> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut count = 0;
    for fam in Families::new(transversal_slots(n, j, v_blocks, target), rcount) {
        count += 1;
        let req: Requirement = orbits(&fam)
            .into_iter()
            .map(|(key, ds)| (key.into_iter().filter(|&c| c != fresh).collect(), allowed_colors(&ds, rcount)))
            .collect();
        if req.iter().any(|(_, allowed)| allowed.is_empty()) {
            return Err(fam);
        }
        if seen.insert(req.clone()) {
            out.push(req);
        }
    }
    Ok((out, count))
}

/// Admissible demand families over `slots`, each slot carrying a demand of the
/// form `{r}` small or `{r}` cosmall. Lexicographic in the per-slot choice
/// `small 0 < .. < small R-1 < cosmall 0 < .. < cosmall R-1`.
pub struct Families {
    slots: Vec<Vec<usize>>,
    rcount: usize,
    digits: Option<Vec<usize>>,
}

impl Families {
    pub fn new(slots: Vec<Vec<usize>>, rcount: usize) -> Self {
        let digits = (rcount > 0).then(|| vec![0; slots.len()]);
        Families { slots, rcount, digits }
    }

    fn build(&self, digits: &[usize]) -> Vec<Demand> {
        self.slots
            .iter()
            .zip(digits)
            .map(|(s, &o)| {
                let (pol, c) = if o < self.rcount {
                    (Polarity::Small, o)
                } else {
                    (Polarity::Cosmall, o - self.rcount)
                };
                Demand {
                    slot: s.clone(),
                    colorset: [c].into(),
                    polarity: pol,
                }
            })
            .collect()
    }

    fn advance(&mut self) {
        let Some(d) = self.digits.as_mut() else { return };
        for i in (0..d.len()).rev() {
            d[i] += 1;
            if d[i] < 2 * self.rcount {
                return;
            }
            d[i] = 0;
        }
        self.digits = None;
    }
}

impl Iterator for Families {
    type Item = Vec<Demand>;

    fn next(&mut self) -> Option<Vec<Demand>> {
        loop {
            let digits = self.digits.clone()?;
            let fam = self.build(&digits);
            self.advance();
            if family_admissible(&fam) {
                return Some(fam);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s_index_counts() {
        assert_eq!(s_indices(1, 1), vec![vec![1]]);
        assert_eq!(s_indices(2, 1), vec![vec![0, 2], vec![1, 2], vec![2, 0], vec![2, 1], vec![2, 2]]);
        assert_eq!(s_indices(2, 2).len(), 7);
        assert!(s_indices(2, 0).is_empty());
    }

    #[test]
    fn s_index_count_matches_inclusion_exclusion() {
        for n in 1usize..4 {
            for k in 1..4 {
                let expected = (n + k).pow(n as u32) - (n + k - 1).pow(n as u32);
                assert_eq!(s_indices(n, k).len(), expected);
            }
        }
    }

    #[test]
    fn small_demand_needs_colors() {
        assert!(Demand::new(vec![0], BTreeSet::new(), Polarity::Small).is_err());
        let d = Demand::new(vec![0], BTreeSet::new(), Polarity::Cosmall).unwrap();
        assert!(d.admits(None) && d.admits(Some(3)));
    }

    #[test]
    fn injective_tuple_count() {
        assert_eq!(injective_tuples(&[5, 6, 7, 8], 2).len(), 12);
        assert_eq!(injective_tuples(&[5, 6], 2), vec![vec![5, 6], vec![6, 5]]);
        assert_eq!(injective_tuples(&[5], 2).len(), 0);
    }

    #[test]
    fn transversal_slots_for_mixed_and_same_block() {
        assert_eq!(transversal_slots(2, 1, &[0, 1], 0), vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(
            transversal_slots(2, 1, &[0, 0], 1),
            vec![vec![0, 2], vec![1, 2], vec![2, 0], vec![2, 1]]
        );
    }

    #[test]
    fn admissibility_within_an_orbit() {
        let d = |slot: Vec<usize>, c: usize, p| Demand::new(slot, [c].into(), p).unwrap();
        let clash = vec![d(vec![1, 2], 0, Polarity::Small), d(vec![2, 1], 1, Polarity::Small)];
        assert!(!family_admissible(&clash));
        let mixed = vec![d(vec![1, 2], 0, Polarity::Small), d(vec![2, 1], 0, Polarity::Cosmall)];
        assert!(!family_admissible(&mixed));
        let ok = vec![d(vec![1, 2], 0, Polarity::Cosmall), d(vec![2, 1], 1, Polarity::Cosmall)];
        assert!(family_admissible(&ok));
        let o = orbits(&ok);
        assert_eq!(allowed_colors(&o[&vec![1, 2]], 2), BTreeSet::new());
        assert_eq!(allowed_colors(&o[&vec![1, 2]], 3), [2].into());
    }

    #[test]
    fn family_enumeration_matches_brute_force() {
        let slots = vec![vec![1, 2], vec![2, 1]];
        let fams: Vec<_> = Families::new(slots, 3).collect();
        // same orbit: 3 agreeing small pairs, 12 small/cosmall pairs on different colors, 9 cosmall pairs
        assert_eq!(fams.len(), 3 + 12 + 9);
        assert!(fams[0].iter().all(|d| d.polarity == Polarity::Small && d.colorset == [0].into()));
        assert!(Families::new(vec![vec![0]], 0).next().is_none());
    }
}
