use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::blocked::{permutations, BlockedBase};
use super::colors::ColorFamily;
use super::demand::{injective_tuples, requirement_shapes, Demand, Requirement, SaturationParams};
use crate::error::{Error, Result};

/// Points the builder may add before giving up.
pub const DEFAULT_POINT_BUDGET: usize = 4096;

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct LayerStats {
    pub layer: usize,
    pub families: u64,
    pub requirements: u64,
    pub witnesses_added: usize,
    pub free_colored: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct BuildReport {
    pub n: usize,
    pub params: SaturationParams,
    pub rcount: usize,
    pub seed: u64,
    pub points: usize,
    pub layers: Vec<LayerStats>,
    /// One entry per round of the closing phase.
    pub closure: Vec<LayerStats>,
}

#[derive(Debug, Clone)]
pub struct BuildOutcome {
    pub base: BlockedBase,
    pub colors: ColorFamily,
    pub report: BuildReport,
}

/// Runs the layered construction followed by the closing phase and returns
/// the blocked base with its colors.
pub fn build_colored_structure(n: usize, sp: SaturationParams, rcount: usize, seed: u64) -> Result<(BlockedBase, ColorFamily)> {
    let out = build_with_budget(n, sp, rcount, seed, DEFAULT_POINT_BUDGET)?;
    Ok((out.base, out.colors))
}

type ShapeKey = (usize, Vec<usize>, usize);

struct Game {
    bb: BlockedBase,
    rcount: usize,
    k: usize,
    colors: HashMap<Vec<usize>, usize>,
    shapes: HashMap<ShapeKey, std::result::Result<(Vec<Requirement>, u64), Vec<Demand>>>,
    budget: usize,
}

impl Game {
    fn key(&self, pts: &[usize], w: usize) -> Vec<usize> {
        let mut key = vec![usize::MAX; self.bb.n()];
        for &p in pts.iter().chain([&w]) {
            key[self.bb.block_of(p)] = p;
        }
        key
    }

    fn fits(&self, req: &Requirement, v: &[usize], w: usize) -> bool {
        req.iter().all(|(pos, allowed)| {
            let pts: Vec<usize> = pos.iter().map(|&c| v[c]).collect();
            match self.colors.get(&self.key(&pts, w)) {
                Some(c) => allowed.contains(c),
                None => true,
            }
        })
    }

    fn commit(&mut self, req: &Requirement, v: &[usize], w: usize) {
        for (pos, allowed) in req {
            let pts: Vec<usize> = pos.iter().map(|&c| v[c]).collect();
            let key = self.key(&pts, w);
            let first = *allowed.iter().next().expect("requirements are satisfiable");
            self.colors.entry(key).or_insert(first);
        }
    }

    fn fresh(&mut self, block: usize, layer: usize) -> Result<usize> {
        if self.bb.len() >= self.budget {
            return Err(Error::Budget {
                stage: "witness construction".into(),
                budget: self.budget as u64,
            });
        }
        Ok(self.bb.push_point(block, layer))
    }

    fn shapes(&mut self, j: usize, v: &[usize], m: usize, layer: usize) -> Result<(Vec<Requirement>, u64)> {
        let v_blocks: Vec<usize> = v.iter().map(|&p| self.bb.block_of(p)).collect();
        let (n, rcount) = (self.bb.n(), self.rcount);
        let entry = self
            .shapes
            .entry((j, v_blocks.clone(), m))
            .or_insert_with(|| requirement_shapes(n, j, &v_blocks, m, rcount));
        match entry {
            Ok(s) => Ok(s.clone()),
            Err(fam) => {
                let names: Vec<&str> = v.iter().map(|&p| self.bb.base().name(p)).collect();
                Err(Error::Exhausted {
                    demand: format!(
                        "layer {layer}, v = {names:?}, block {m}, family {}",
                        serde_json::to_string(fam).expect("demands serialize")
                    ),
                })
            }
        }
    }

    /// Meets every demand over tuples from `pts`. Witnesses are drawn from
    /// `pool` (per block) when one fits, otherwise added in `new_layer`.
    fn meet_demands(
        &mut self,
        pts: &[usize],
        pool: &mut [Vec<usize>],
        new_layer: usize,
        stats: &mut LayerStats,
    ) -> Result<()> {
        let n = self.bb.n();
        for j in 1..=self.k {
            for v in injective_tuples(pts, n + j - 1) {
                for m in 0..n {
                    let (reqs, families) = self.shapes(j, &v, m, new_layer - 1)?;
                    stats.families += families;
                    for req in reqs {
                        stats.requirements += 1;
                        let found = pool[m].iter().copied().find(|&w| !v.contains(&w) && self.fits(&req, &v, w));
                        let w = match found {
                            Some(w) => w,
                            None => {
                                let w = self.fresh(m, new_layer)?;
                                pool[m].push(w);
                                stats.witnesses_added += 1;
                                w
                            }
                        };
                        self.commit(&req, &v, w);
                    }
                }
            }
        }
        Ok(())
    }

    /// Colors every transversal still uncolored uniformly at random.
    fn fill(&mut self, rng: &mut ChaCha8Rng) -> usize {
        let mut added = 0;
        for t in self.bb.literal_transversals() {
            if let std::collections::hash_map::Entry::Vacant(e) = self.colors.entry(t) {
                e.insert(rng.gen_range(0..self.rcount));
                added += 1;
            }
        }
        added
    }
}

/// As [`build_colored_structure`], with a cap on the number of points and the
/// per-layer statistics returned.
///
/// Layer `l + 1` holds fresh witnesses for demands over layers `0..=l`. After
/// the last layer a closing phase alternates two steps until nothing is added:
/// every uncolored transversal gets a random color, then every demand over the
/// whole base is met by a point outside the tuple whose sets allow it, or by a
/// new point in layer `depth + 1`.
pub fn build_with_budget(n: usize, sp: SaturationParams, rcount: usize, seed: u64, budget: usize) -> Result<BuildOutcome> {
    if n < 2 {
        return Err(Error::InvalidParameter("the construction needs n >= 2".into()));
    }
    let bb = BlockedBase::new(n, sp.m0)?;
    let blank = ColorFamily::empty(&bb, rcount)?;
    let mut game = Game {
        bb,
        rcount,
        k: sp.k,
        colors: HashMap::new(),
        shapes: HashMap::new(),
        budget,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layers = Vec::new();
    for layer in 0..sp.depth {
        let mut stats = LayerStats {
            layer,
            families: 0,
            requirements: 0,
            witnesses_added: 0,
            free_colored: 0,
        };
        let pts = game.bb.points_up_to_layer(layer);
        let mut pool = vec![Vec::new(); n];
        game.meet_demands(&pts, &mut pool, layer + 1, &mut stats)?;
        layers.push(stats);
    }
    let mut closure = Vec::new();
    if sp.depth > 0 {
        loop {
            let filled = game.fill(&mut rng);
            let mut stats = LayerStats {
                layer: sp.depth + 1,
                families: 0,
                requirements: 0,
                witnesses_added: 0,
                free_colored: filled,
            };
            let pts: Vec<usize> = (0..game.bb.len()).collect();
            let mut pool: Vec<Vec<usize>> = (0..n).map(|i| game.bb.block(i)).collect();
            game.meet_demands(&pts, &mut pool, sp.depth + 1, &mut stats)?;
            let done = stats.witnesses_added == 0;
            closure.push(stats);
            if done {
                break;
            }
        }
    }
    let colors = if sp.depth == 0 {
        blank
    } else {
        let mut cf = ColorFamily::empty(&game.bb, rcount)?;
        let perms = permutations(n);
        for (t, &c) in &game.colors {
            for pi in &perms {
                let s: Vec<usize> = pi.iter().map(|&i| t[i]).collect();
                cf.color_mut(c).insert(&s);
            }
        }
        cf
    };
    let report = BuildReport {
        n,
        params: sp,
        rcount,
        seed,
        points: game.bb.len(),
        layers,
        closure,
    };
    Ok(BuildOutcome {
        base: game.bb,
        colors,
        report,
    })
}
