//! Hintikka formulas and a direct evaluator, used as a second check on the
//! game solver for small structures.

use std::collections::HashMap;

use serde::Serialize;

use super::structure::{decode, RelStructure};
use crate::error::{Error, Result};

pub const THEORY_MAX_SIZE: usize = 8;
pub const THEORY_MAX_ROUNDS: usize = 3;

/// Variables are positions; position `k` is bound by the quantifier at depth `k`
/// above the tuple the formula starts from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    Eq(usize, usize),
    Graph { f: usize, args: Vec<usize>, value: usize },
    Rel { r: usize, args: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Atom(Atom),
    Not(u32),
    And(Vec<u32>),
    Or(Vec<u32>),
    Exists(u32),
    Forall(u32),
}

/// Hash-consed formula store.
#[derive(Debug, Default)]
pub struct Formulas {
    nodes: Vec<Node>,
    ids: HashMap<Node, u32>,
}

impl Formulas {
    pub fn add(&mut self, n: Node) -> u32 {
        if let Some(&id) = self.ids.get(&n) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(n.clone());
        self.ids.insert(n, id);
        id
    }

    pub fn node(&self, id: u32) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn literal(&mut self, atom: Atom, holds: bool) -> u32 {
        let a = self.add(Node::Atom(atom));
        if holds {
            a
        } else {
            self.add(Node::Not(a))
        }
    }

    /// Rank-`r` Hintikka formula of `t` in `m`.
    pub fn hintikka(&mut self, m: &RelStructure, t: &mut Vec<u32>, r: usize) -> u32 {
        let l = t.len();
        let mut lits = Vec::new();
        for i in 0..l {
            for j in i + 1..l {
                lits.push(self.literal(Atom::Eq(i, j), t[i] == t[j]));
            }
        }
        for (fi, f) in m.functions.iter().enumerate() {
            for idx in 0..l.pow(f.arity as u32) {
                let args = decode(idx, l, f.arity);
                let v = m.apply(fi, &args.iter().map(|&p| t[p]).collect::<Vec<_>>());
                for y in 0..l {
                    lits.push(self.literal(Atom::Graph { f: fi, args: args.clone(), value: y }, v == t[y]));
                }
            }
        }
        for (ri, rel) in m.relations.iter().enumerate() {
            for idx in 0..l.pow(rel.arity as u32) {
                let args = decode(idx, l, rel.arity);
                let h = m.holds(ri, &args.iter().map(|&p| t[p]).collect::<Vec<_>>());
                lits.push(self.literal(Atom::Rel { r: ri, args }, h));
            }
        }
        let diagram = self.add(Node::And(lits));
        if r == 0 {
            return diagram;
        }
        let mut kids = Vec::new();
        for e in 0..m.size as u32 {
            t.push(e);
            kids.push(self.hintikka(m, t, r - 1));
            t.pop();
        }
        kids.sort_unstable();
        kids.dedup();
        let mut parts = vec![diagram];
        for &k in &kids {
            parts.push(self.add(Node::Exists(k)));
        }
        let any = self.add(Node::Or(kids));
        parts.push(self.add(Node::Forall(any)));
        self.add(Node::And(parts))
    }
}

/// Tarskian evaluation with memoization on `(formula, assignment)`.
pub struct Evaluator<'a> {
    m: &'a RelStructure,
    f: &'a Formulas,
    memo: HashMap<(u32, Vec<u32>), bool>,
}

impl<'a> Evaluator<'a> {
    pub fn new(m: &'a RelStructure, f: &'a Formulas) -> Self {
        Evaluator { m, f, memo: HashMap::new() }
    }

    pub fn eval(&mut self, id: u32, env: &mut Vec<u32>) -> bool {
        if let Some(&v) = self.memo.get(&(id, env.clone())) {
            return v;
        }
        let v = match self.f.node(id) {
            Node::Atom(Atom::Eq(i, j)) => env[*i] == env[*j],
            Node::Atom(Atom::Graph { f, args, value }) => {
                let a: Vec<u32> = args.iter().map(|&p| env[p]).collect();
                self.m.apply(*f, &a) == env[*value]
            }
            Node::Atom(Atom::Rel { r, args }) => {
                let a: Vec<u32> = args.iter().map(|&p| env[p]).collect();
                self.m.holds(*r, &a)
            }
            Node::Not(x) => !self.eval(*x, env),
            Node::And(xs) => xs.clone().into_iter().all(|x| self.eval(x, env)),
            Node::Or(xs) => xs.clone().into_iter().any(|x| self.eval(x, env)),
            Node::Exists(x) | Node::Forall(x) => {
                let exists = matches!(self.f.node(id), Node::Exists(_));
                let x = *x;
                let mut out = !exists;
                for e in 0..self.m.size as u32 {
                    env.push(e);
                    let v = self.eval(x, env);
                    env.pop();
                    if v == exists {
                        out = exists;
                        break;
                    }
                }
                out
            }
        };
        self.memo.insert((id, env.clone()), v);
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoryReport {
    pub rounds: usize,
    pub formulas: usize,
    /// The second structure satisfies the Hintikka sentence of the first.
    pub second_satisfies_first: bool,
    pub first_satisfies_second: bool,
    pub equivalent: bool,
}

/// Compares the rank-`q` theories of `m1` and `m2`.
pub fn theory_compare(m1: &RelStructure, m2: &RelStructure, q: usize) -> Result<TheoryReport> {
    theory_compare_from(m1, m2, q, &[])
}

/// Compares rank-`q` theories of `(m1, start.0)` and `(m2, start.1)` by
/// evaluating each side's Hintikka formula in the other structure. Every
/// rank-`q` formula is equivalent to a disjunction of Hintikka formulas, so
/// these two evaluations decide agreement on all of them.
pub fn theory_compare_from(m1: &RelStructure, m2: &RelStructure, q: usize, start: &[(u32, u32)]) -> Result<TheoryReport> {
    if m1.size > THEORY_MAX_SIZE || m2.size > THEORY_MAX_SIZE || q > THEORY_MAX_ROUNDS {
        return Err(Error::InvalidParameter(format!(
            "theory comparison is limited to {THEORY_MAX_SIZE} elements and {THEORY_MAX_ROUNDS} rounds"
        )));
    }
    if !m1.same_signature(m2) {
        return Err(Error::InvalidParameter("structures have different signatures".into()));
    }
    if start.iter().any(|&(a, b)| a as usize >= m1.size || b as usize >= m2.size) {
        return Err(Error::InvalidParameter("start map leaves the universe".into()));
    }
    let mut t1 = m1.constant_values();
    let mut t2 = m2.constant_values();
    t1.extend(start.iter().map(|p| p.0));
    t2.extend(start.iter().map(|p| p.1));
    let mut fs = Formulas::default();
    let h1 = fs.hintikka(m1, &mut t1.clone(), q);
    let h2 = fs.hintikka(m2, &mut t2.clone(), q);
    let a = Evaluator::new(m2, &fs).eval(h1, &mut t2);
    let b = Evaluator::new(m1, &fs).eval(h2, &mut t1);
    Ok(TheoryReport {
        rounds: q,
        formulas: fs.len(),
        second_satisfies_first: a,
        first_satisfies_second: b,
        equivalent: a && b,
    })
}
