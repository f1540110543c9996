use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use super::game::{ef_winner, GameCertificate, Winner};
use super::structure::{decode, RelStructure};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct SubalgebraChoice {
    pub rounds: usize,
    pub params: usize,
    /// Elements of the chosen subalgebra, ascending.
    pub elements: Vec<u32>,
    /// No proper subalgebra passed, so the whole structure was returned.
    pub improper: bool,
    pub candidates_examined: usize,
    /// One game per parameter tuple, for the chosen subalgebra.
    pub games: Vec<GameCertificate>,
}

/// Smallest set containing `seed` and closed under every function.
pub fn closure(m: &RelStructure, seed: impl IntoIterator<Item = u32>) -> Vec<u32> {
    let mut inside = vec![false; m.size];
    let mut members: Vec<u32> = Vec::new();
    for x in seed.into_iter().chain(m.constant_values()) {
        if !std::mem::replace(&mut inside[x as usize], true) {
            members.push(x);
        }
    }
    loop {
        let mut fresh = Vec::new();
        for (fi, f) in m.functions.iter().enumerate() {
            let k = members.len();
            for idx in 0..k.pow(f.arity as u32) {
                let args: Vec<u32> = decode(idx, k, f.arity).into_iter().map(|p| members[p]).collect();
                let v = m.apply(fi, &args);
                if !std::mem::replace(&mut inside[v as usize], true) {
                    fresh.push(v);
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        members.extend(fresh);
    }
    members.sort_unstable();
    members
}

/// Parameter tuples over `elements` of length at most `l`.
fn tuples_up_to(elements: &[u32], l: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..l {
        layer = layer
            .iter()
            .flat_map(|t: &Vec<u32>| {
                elements.iter().map(move |&e| {
                    let mut t = t.clone();
                    t.push(e);
                    t
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Plays the `q`-round game between `sub` (on `elements` of `m`) and `m` from
/// every parameter tuple of length `<= l`. `elements` must be ascending.
/// Stops at the first Spoiler win.
pub fn q_elementary(m: &RelStructure, elements: &[u32], q: usize, l: usize, budget: u64) -> Result<(bool, Vec<GameCertificate>)> {
    if elements.len() == m.size {
        // the substructure is `m` itself and every start map is the identity
        return Ok((true, vec![ef_winner(m, m, q, &[], budget)?]));
    }
    let sub = m.substructure(elements)?;
    let mut games = Vec::new();
    for t in tuples_up_to(elements, l) {
        let start: Vec<(u32, u32)> = t
            .iter()
            .map(|&x| (elements.binary_search(&x).expect("parameter in subalgebra") as u32, x))
            .collect();
        let g = ef_winner(&sub, m, q, &start, budget)?;
        let won = g.winner == Winner::Duplicator;
        games.push(g);
        if !won {
            return Ok((false, games));
        }
    }
    Ok((true, games))
}

/// Breadth-first search through subalgebras by size for a proper one that is
/// `q`-elementary from parameter tuples of length `<= l`. `budget` bounds the
/// number of candidates examined and, per game, the extension count.
pub fn find_q_subalgebra(m: &RelStructure, q: usize, l: usize, budget: u64) -> Result<SubalgebraChoice> {
    if m.size == 0 {
        return Err(Error::InvalidParameter("empty universe".into()));
    }
    let everything: Vec<u32> = (0..m.size as u32).collect();
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut frontier: BTreeSet<(usize, Vec<u32>)> = BTreeSet::new();
    let start = closure(m, []);
    seen.insert(start.clone());
    frontier.insert((start.len(), start));
    let mut examined = 0usize;
    while let Some((_, s)) = frontier.pop_first() {
        if s.len() == m.size {
            continue;
        }
        examined += 1;
        if examined as u64 > budget {
            return Err(Error::Budget {
                stage: "subalgebra search".into(),
                budget,
            });
        }
        let (ok, games) = q_elementary(m, &s, q, l, budget)?;
        if ok {
            return Ok(SubalgebraChoice {
                rounds: q,
                params: l,
                elements: s,
                improper: false,
                candidates_examined: examined,
                games,
            });
        }
        for x in (0..m.size as u32).filter(|x| s.binary_search(x).is_err()) {
            let c = closure(m, s.iter().copied().chain([x]));
            if seen.insert(c.clone()) {
                frontier.insert((c.len(), c));
            }
        }
    }
    let (_, games) = q_elementary(m, &everything, q, l, budget)?;
    Ok(SubalgebraChoice {
        rounds: q,
        params: l,
        elements: everything,
        improper: true,
        candidates_examined: examined,
        games,
    })
}
