use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::structure::{decode, RelStructure};
use crate::error::{Error, Result};

/// Extension steps a game may take before giving up.
pub const DEFAULT_GAME_BUDGET: u64 = 50_000_000;

/// Strategy trees larger than this are replaced by [`Strategy::Truncated`].
pub const STRATEGY_CAP: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Winner {
    Duplicator,
    Spoiler,
}

/// Duplicator's replies while more than one round remains: `forth[e1]` answers
/// a move `e1` in the first structure, `back[e2]` a move in the second. The
/// last round is checked by comparing the atomic extensions of both sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DupNode {
    pub forth: Vec<u32>,
    pub back: Vec<u32>,
    pub forth_next: Vec<DupNode>,
    pub back_next: Vec<DupNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpoilerNode {
    /// The position already fails an atomic formula.
    Violation,
    /// Spoiler plays `element` in structure `side` (1 or 2); one subtree per
    /// reply in the other structure.
    Move {
        side: u8,
        element: u32,
        replies: Vec<(u32, SpoilerNode)>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Both structures are equal and the start map is the identity.
    Identity,
    Duplicator(DupNode),
    Spoiler(SpoilerNode),
    /// The verdict stands but the tree exceeded the size cap.
    Truncated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameCertificate {
    pub digests: [String; 2],
    pub rounds: usize,
    pub start: Vec<(u32, u32)>,
    pub winner: Winner,
    pub extensions: u64,
    pub strategy: Strategy,
}

const NONE: u16 = u16::MAX;

/// Per-tuple data shared by all one-point extensions of `t`: function values
/// on old arguments, and the argument patterns that mention the new position.
struct Frame {
    old_values: Vec<u32>,
    fn_new: Vec<Vec<Vec<usize>>>,
    rel_new: Vec<Vec<Vec<usize>>>,
}

fn patterns_with_new(l: usize, arity: usize) -> Vec<Vec<usize>> {
    (0..(l + 1).pow(arity as u32))
        .map(|idx| decode(idx, l + 1, arity))
        .filter(|ps| ps.contains(&l))
        .collect()
}

fn frame(s: &RelStructure, t: &[u32]) -> Frame {
    let l = t.len();
    let mut old_values = Vec::new();
    let mut args = Vec::new();
    for (fi, f) in s.functions.iter().enumerate() {
        for idx in 0..l.pow(f.arity as u32) {
            args.clear();
            args.extend(decode(idx, l, f.arity).into_iter().map(|p| t[p]));
            old_values.push(s.apply(fi, &args));
        }
    }
    Frame {
        old_values,
        fn_new: s.functions.iter().map(|f| patterns_with_new(l, f.arity)).collect(),
        rel_new: s.relations.iter().map(|r| patterns_with_new(l, r.arity)).collect(),
    }
}

/// The atomic facts that mention the new last position of `t + [e]`.
fn ext_sig(s: &RelStructure, t: &[u32], fr: &Frame, e: u32) -> Vec<u16> {
    let l = t.len();
    let pos = |v: u32| -> u16 {
        match t.iter().position(|&x| x == v) {
            Some(p) => p as u16,
            None if v == e => l as u16,
            None => NONE,
        }
    };
    let at = |p: usize| if p == l { e } else { t[p] };
    let mut sig = Vec::with_capacity(1 + fr.old_values.len() + fr.fn_new.iter().map(Vec::len).sum::<usize>());
    sig.push(t.iter().position(|&x| x == e).map(|p| p as u16).unwrap_or(NONE));
    let mut args = Vec::with_capacity(4);
    for (fi, pats) in fr.fn_new.iter().enumerate() {
        for ps in pats {
            args.clear();
            args.extend(ps.iter().map(|&p| at(p)));
            sig.push(pos(s.apply(fi, &args)));
        }
    }
    sig.extend(fr.old_values.iter().map(|&v| u16::from(v == e)));
    for (ri, pats) in fr.rel_new.iter().enumerate() {
        for ps in pats {
            args.clear();
            args.extend(ps.iter().map(|&p| at(p)));
            sig.push(u16::from(s.holds(ri, &args)));
        }
    }
    sig
}

/// Whether `t1 -> t2` preserves every atomic formula, by direct enumeration.
pub fn partial_iso(m1: &RelStructure, m2: &RelStructure, t1: &[u32], t2: &[u32]) -> bool {
    let l = t1.len();
    if t2.len() != l {
        return false;
    }
    for i in 0..l {
        for j in 0..l {
            if (t1[i] == t1[j]) != (t2[i] == t2[j]) {
                return false;
            }
        }
    }
    for fi in 0..m1.functions.len() {
        let k = m1.functions[fi].arity;
        for idx in 0..l.pow(k as u32) {
            let ps = decode(idx, l, k);
            let a1: Vec<u32> = ps.iter().map(|&p| t1[p]).collect();
            let a2: Vec<u32> = ps.iter().map(|&p| t2[p]).collect();
            let (v1, v2) = (m1.apply(fi, &a1), m2.apply(fi, &a2));
            for y in 0..l {
                if (v1 == t1[y]) != (v2 == t2[y]) {
                    return false;
                }
            }
        }
    }
    for ri in 0..m1.relations.len() {
        let k = m1.relations[ri].arity;
        for idx in 0..l.pow(k as u32) {
            let ps = decode(idx, l, k);
            let a1: Vec<u32> = ps.iter().map(|&p| t1[p]).collect();
            let a2: Vec<u32> = ps.iter().map(|&p| t2[p]).collect();
            if m1.holds(ri, &a1) != m2.holds(ri, &a2) {
                return false;
            }
        }
    }
    true
}

/// Rank-`r` types of tuples in either structure, interned in one table so
/// that ids are comparable across structures.
pub(crate) struct Types<'a> {
    ms: [&'a RelStructure; 2],
    atomic: HashMap<(u32, Vec<u16>), u32>,
    rank: HashMap<(usize, u32, Vec<u32>), u32>,
    pub(crate) extensions: u64,
    budget: u64,
}

impl<'a> Types<'a> {
    pub(crate) fn new(m1: &'a RelStructure, m2: &'a RelStructure, budget: u64) -> Self {
        Types {
            ms: [m1, m2],
            atomic: HashMap::new(),
            rank: HashMap::new(),
            extensions: 0,
            budget,
        }
    }

    fn intern_atomic(&mut self, parent: u32, sig: Vec<u16>) -> u32 {
        let next = self.atomic.len() as u32 + 1;
        *self.atomic.entry((parent, sig)).or_insert(next)
    }

    /// Atomic type id of `t`, built one position at a time from the root 0.
    pub(crate) fn atomic_of(&mut self, side: usize, t: &[u32]) -> u32 {
        let m = self.ms[side];
        let mut id = 0;
        for k in 0..t.len() {
            let fr = frame(m, &t[..k]);
            let sig = ext_sig(m, &t[..k], &fr, t[k]);
            id = self.intern_atomic(id, sig);
        }
        id
    }

    fn tick(&mut self) -> Result<()> {
        self.extensions += 1;
        if self.extensions > self.budget {
            return Err(Error::Budget {
                stage: "ef game".into(),
                budget: self.budget,
            });
        }
        Ok(())
    }

    /// For each `e`, the rank-`r` type of `t + [e]`.
    pub(crate) fn children(&mut self, side: usize, t: &mut Vec<u32>, aid: u32, r: usize) -> Result<Vec<u32>> {
        let m = self.ms[side];
        let fr = frame(m, t);
        let mut out = Vec::with_capacity(m.size);
        for e in 0..m.size as u32 {
            self.tick()?;
            let sig = ext_sig(m, t, &fr, e);
            let child = self.intern_atomic(aid, sig);
            t.push(e);
            let ty = self.type_of(side, t, child, r);
            t.pop();
            out.push(ty?);
        }
        Ok(out)
    }

    /// Rank-`r` type of `t`, whose atomic type is `aid`.
    pub(crate) fn type_of(&mut self, side: usize, t: &mut Vec<u32>, aid: u32, r: usize) -> Result<u32> {
        let kids = if r == 0 {
            Vec::new()
        } else {
            let mut k = self.children(side, t, aid, r - 1)?;
            k.sort_unstable();
            k.dedup();
            k
        };
        let next = self.rank.len() as u32;
        Ok(*self.rank.entry((r, aid, kids)).or_insert(next))
    }
}

fn check_inputs(m1: &RelStructure, m2: &RelStructure, start: &[(u32, u32)]) -> Result<()> {
    if !m1.same_signature(m2) {
        return Err(Error::InvalidParameter("structures have different signatures".into()));
    }
    if start.iter().any(|&(a, b)| a as usize >= m1.size || b as usize >= m2.size) {
        return Err(Error::InvalidParameter("start map leaves the universe".into()));
    }
    if m1.size == 0 || m2.size == 0 {
        return Err(Error::InvalidParameter("empty universe".into()));
    }
    Ok(())
}

fn tuples(m1: &RelStructure, m2: &RelStructure, start: &[(u32, u32)]) -> (Vec<u32>, Vec<u32>) {
    let mut t1 = m1.constant_values();
    let mut t2 = m2.constant_values();
    t1.extend(start.iter().map(|p| p.0));
    t2.extend(start.iter().map(|p| p.1));
    (t1, t2)
}

/// Solves the `q`-round game on `(m1, m2)` from `start` exactly.
pub fn ef_winner(m1: &RelStructure, m2: &RelStructure, q: usize, start: &[(u32, u32)], budget: u64) -> Result<GameCertificate> {
    check_inputs(m1, m2, start)?;
    let digests = [m1.digest(), m2.digest()];
    let (mut t1, mut t2) = tuples(m1, m2, start);
    let cert = |winner, extensions, strategy| GameCertificate {
        digests: digests.clone(),
        rounds: q,
        start: start.to_vec(),
        winner,
        extensions,
        strategy,
    };
    if m1 == m2 && start.iter().all(|(a, b)| a == b) {
        return Ok(cert(Winner::Duplicator, 0, Strategy::Identity));
    }
    let mut ty = Types::new(m1, m2, budget);
    let a1 = ty.atomic_of(0, &t1);
    let a2 = ty.atomic_of(1, &t2);
    let top = if q == 0 {
        None
    } else {
        Some((ty.children(0, &mut t1, a1, q - 1)?, ty.children(1, &mut t2, a2, q - 1)?))
    };
    let same = a1 == a2 && top.as_ref().is_none_or(|(c1, c2)| as_set(c1) == as_set(c2));
    let mut size = 0usize;
    let (winner, strategy) = if same {
        let node = dup_tree(&mut ty, &mut t1, &mut t2, q, &mut size, top)?;
        (Winner::Duplicator, node.map(Strategy::Duplicator))
    } else {
        let node = spoiler_tree(&mut ty, &mut t1, &mut t2, q, &mut size, top)?;
        (Winner::Spoiler, node.map(Strategy::Spoiler))
    };
    Ok(cert(winner, ty.extensions, strategy.unwrap_or(Strategy::Truncated)))
}

fn as_set(c: &[u32]) -> BTreeSet<u32> {
    c.iter().copied().collect()
}

type Kids = (Vec<u32>, Vec<u32>);

/// Rank-`r - 1` types of every one-point extension, on both sides.
fn kids(ty: &mut Types, t1: &mut Vec<u32>, t2: &mut Vec<u32>, r: usize, known: Option<Kids>) -> Result<Kids> {
    if let Some(k) = known {
        return Ok(k);
    }
    let a1 = ty.atomic_of(0, t1);
    let a2 = ty.atomic_of(1, t2);
    Ok((ty.children(0, t1, a1, r - 1)?, ty.children(1, t2, a2, r - 1)?))
}

fn dup_tree(ty: &mut Types, t1: &mut Vec<u32>, t2: &mut Vec<u32>, r: usize, size: &mut usize, known: Option<Kids>) -> Result<Option<DupNode>> {
    let mut node = DupNode {
        forth: Vec::new(),
        back: Vec::new(),
        forth_next: Vec::new(),
        back_next: Vec::new(),
    };
    if r <= 1 {
        return Ok(Some(node));
    }
    let (c1, c2) = kids(ty, t1, t2, r, known)?;
    *size += c1.len() + c2.len();
    if *size > STRATEGY_CAP {
        return Ok(None);
    }
    let first = |c: &[u32], k: u32| c.iter().position(|&x| x == k).expect("types match") as u32;
    node.forth = c1.iter().map(|&k| first(&c2, k)).collect();
    node.back = c2.iter().map(|&k| first(&c1, k)).collect();
    if r > 2 {
        for (e1, &e2) in node.forth.clone().iter().enumerate() {
            t1.push(e1 as u32);
            t2.push(e2);
            let child = dup_tree(ty, t1, t2, r - 1, size, None);
            t1.pop();
            t2.pop();
            match child? {
                Some(c) => node.forth_next.push(c),
                None => return Ok(None),
            }
        }
        for (e2, &e1) in node.back.clone().iter().enumerate() {
            t1.push(e1);
            t2.push(e2 as u32);
            let child = dup_tree(ty, t1, t2, r - 1, size, None);
            t1.pop();
            t2.pop();
            match child? {
                Some(c) => node.back_next.push(c),
                None => return Ok(None),
            }
        }
    }
    Ok(Some(node))
}

fn spoiler_tree(ty: &mut Types, t1: &mut Vec<u32>, t2: &mut Vec<u32>, r: usize, size: &mut usize, known: Option<Kids>) -> Result<Option<SpoilerNode>> {
    *size += 1;
    if *size > STRATEGY_CAP {
        return Ok(None);
    }
    if ty.atomic_of(0, t1) != ty.atomic_of(1, t2) {
        return Ok(Some(SpoilerNode::Violation));
    }
    let (c1, c2) = kids(ty, t1, t2, r, known)?;
    let (s1, s2) = (as_set(&c1), as_set(&c2));
    let (side, element) = match c1.iter().position(|k| !s2.contains(k)) {
        Some(e) => (1u8, e as u32),
        None => (2u8, c2.iter().position(|k| !s1.contains(k)).expect("types differ") as u32),
    };
    let others = if side == 1 { c2.len() } else { c1.len() };
    let mut replies = Vec::with_capacity(others);
    for reply in 0..others as u32 {
        let (x1, x2) = if side == 1 { (element, reply) } else { (reply, element) };
        t1.push(x1);
        t2.push(x2);
        let sub = spoiler_tree(ty, t1, t2, r - 1, size, None);
        t1.pop();
        t2.pop();
        match sub? {
            Some(s) => replies.push((reply, s)),
            None => return Ok(None),
        }
    }
    Ok(Some(SpoilerNode::Move { side, element, replies }))
}

/// Replays a certificate against the structures. Leaves and positions are
/// checked with [`partial_iso`]; Duplicator's last round compares the sets of
/// atomic extensions on both sides.
pub fn replay(m1: &RelStructure, m2: &RelStructure, cert: &GameCertificate) -> Result<bool> {
    check_inputs(m1, m2, &cert.start)?;
    if cert.digests != [m1.digest(), m2.digest()] {
        return Ok(false);
    }
    let (mut t1, mut t2) = tuples(m1, m2, &cert.start);
    Ok(match (&cert.winner, &cert.strategy) {
        (Winner::Duplicator, Strategy::Identity) => m1 == m2 && cert.start.iter().all(|(a, b)| a == b),
        (Winner::Duplicator, Strategy::Duplicator(node)) => replay_dup(m1, m2, &mut t1, &mut t2, node, cert.rounds),
        (Winner::Spoiler, Strategy::Spoiler(node)) => replay_spoiler(m1, m2, &mut t1, &mut t2, node, cert.rounds),
        _ => false,
    })
}

fn replay_dup(m1: &RelStructure, m2: &RelStructure, t1: &mut Vec<u32>, t2: &mut Vec<u32>, node: &DupNode, r: usize) -> bool {
    if !partial_iso(m1, m2, t1, t2) {
        return false;
    }
    if r == 0 {
        return true;
    }
    if r == 1 {
        let f1 = frame(m1, t1);
        let f2 = frame(m2, t2);
        let s1: HashSet<Vec<u16>> = (0..m1.size as u32).map(|e| ext_sig(m1, t1, &f1, e)).collect();
        let s2: HashSet<Vec<u16>> = (0..m2.size as u32).map(|e| ext_sig(m2, t2, &f2, e)).collect();
        return s1 == s2;
    }
    if node.forth.len() != m1.size || node.back.len() != m2.size {
        return false;
    }
    let deep = r > 2;
    if deep && (node.forth_next.len() != m1.size || node.back_next.len() != m2.size) {
        return false;
    }
    let leaf = DupNode {
        forth: Vec::new(),
        back: Vec::new(),
        forth_next: Vec::new(),
        back_next: Vec::new(),
    };
    let mut step = |x1: u32, x2: u32, child: &DupNode| -> bool {
        if x1 as usize >= m1.size || x2 as usize >= m2.size {
            return false;
        }
        t1.push(x1);
        t2.push(x2);
        let ok = replay_dup(m1, m2, t1, t2, child, r - 1);
        t1.pop();
        t2.pop();
        ok
    };
    for (e1, &e2) in node.forth.iter().enumerate() {
        if !step(e1 as u32, e2, if deep { &node.forth_next[e1] } else { &leaf }) {
            return false;
        }
    }
    for (e2, &e1) in node.back.iter().enumerate() {
        if !step(e1, e2 as u32, if deep { &node.back_next[e2] } else { &leaf }) {
            return false;
        }
    }
    true
}

fn replay_spoiler(m1: &RelStructure, m2: &RelStructure, t1: &mut Vec<u32>, t2: &mut Vec<u32>, node: &SpoilerNode, r: usize) -> bool {
    match node {
        SpoilerNode::Violation => !partial_iso(m1, m2, t1, t2),
        SpoilerNode::Move { side, element, replies } => {
            if r == 0 {
                return false;
            }
            let (own, other) = match side {
                1 => (m1.size, m2.size),
                2 => (m2.size, m1.size),
                _ => return false,
            };
            let covered: BTreeSet<u32> = replies.iter().map(|x| x.0).collect();
            if *element as usize >= own || covered.len() != other || covered.iter().any(|&x| x as usize >= other) {
                return false;
            }
            replies.iter().all(|(reply, sub)| {
                let (x1, x2) = if *side == 1 { (*element, *reply) } else { (*reply, *element) };
                t1.push(x1);
                t2.push(x2);
                let ok = replay_spoiler(m1, m2, t1, t2, sub, r - 1);
                t1.pop();
                t2.pop();
                ok
            })
        }
    }
}
