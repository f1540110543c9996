use std::collections::BTreeMap;

use serde::Serialize;

use super::{ProductBA, ProductElem};
use crate::error::{Error, Result};

/// Terms over `{0, 1, ., +, -, 1_u, d_ij}` and variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Term {
    Var(String),
    Zero,
    One,
    /// `1_u` for the `u`-th member of `V`.
    Unit(usize),
    Diag(usize, usize),
    Meet(Box<Term>, Box<Term>),
    Join(Box<Term>, Box<Term>),
    Complement(Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn meet(a: Term, b: Term) -> Term {
        Term::Meet(Box::new(a), Box::new(b))
    }

    /// The join of `terms`; `0` when empty.
    pub fn sum(terms: Vec<Term>) -> Term {
        terms
            .into_iter()
            .reduce(|a, b| Term::Join(Box::new(a), Box::new(b)))
            .unwrap_or(Term::Zero)
    }
}

/// Quantifier-free formulas with finite set-indexed connectives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum QFFormula {
    Eq(Term, Term),
    Not(Box<QFFormula>),
    And(Vec<QFFormula>),
    Or(Vec<QFFormula>),
    /// `eta_i(x, y)` kept unexpanded; each of its `2^|V|` conjuncts is
    /// evaluated on demand.
    Eta { i: usize, x: Term, y: Term },
}

impl QFFormula {
    pub fn not(f: QFFormula) -> QFFormula {
        QFFormula::Not(Box::new(f))
    }

    pub fn implies(a: QFFormula, b: QFFormula) -> QFFormula {
        QFFormula::Or(vec![QFFormula::not(a), b])
    }

    pub fn nonzero(t: Term) -> QFFormula {
        QFFormula::not(QFFormula::Eq(t, Term::Zero))
    }
}

pub type Assignment = BTreeMap<String, ProductElem>;

pub fn eval_term(p: &ProductBA, t: &Term, asg: &Assignment) -> Result<ProductElem> {
    Ok(match t {
        Term::Var(x) => asg.get(x).cloned().ok_or_else(|| Error::UnboundVariable(x.clone()))?,
        Term::Zero => p.zero(),
        Term::One => p.one(),
        Term::Unit(u) => {
            if *u >= p.index_set().len() {
                return Err(Error::InvalidParameter(format!("1_{u} is not a constant of P")));
            }
            p.unit_at(*u)
        }
        Term::Diag(i, j) => {
            let n = p.dim();
            if *i >= n || *j >= n {
                return Err(Error::IndexOutOfRange { index: (*i).max(*j), dim: n });
            }
            p.diag(*i, *j).clone()
        }
        Term::Meet(a, b) => p.meet(&eval_term(p, a, asg)?, &eval_term(p, b, asg)?),
        Term::Join(a, b) => p.join(&eval_term(p, a, asg)?, &eval_term(p, b, asg)?),
        Term::Complement(a) => p.complement(&eval_term(p, a, asg)?),
    })
}

pub fn eval_formula(p: &ProductBA, phi: &QFFormula, asg: &Assignment) -> Result<bool> {
    Ok(match phi {
        QFFormula::Eq(a, b) => eval_term(p, a, asg)? == eval_term(p, b, asg)?,
        QFFormula::Not(f) => !eval_formula(p, f, asg)?,
        QFFormula::And(fs) => {
            for f in fs {
                if !eval_formula(p, f, asg)? {
                    return Ok(false);
                }
            }
            true
        }
        QFFormula::Or(fs) => {
            for f in fs {
                if eval_formula(p, f, asg)? {
                    return Ok(true);
                }
            }
            false
        }
        QFFormula::Eta { i, x, y } => {
            if *i >= p.dim() {
                return Err(Error::IndexOutOfRange { index: *i, dim: p.dim() });
            }
            let x = eval_term(p, x, asg)?;
            let y = eval_term(p, y, asg)?;
            eval_eta(p, *i, &x, &y)
        }
    })
}

/// Conjunct `S`: `x . 1_u != 0` exactly for `u` in `S` implies `y = t_S`.
fn eval_eta(p: &ProductBA, i: usize, x: &ProductElem, y: &ProductElem) -> bool {
    let size = p.index_set().len();
    let support = p.support(x);
    (0..1u64 << size).all(|s| {
        let antecedent = (0..size).all(|u| (s >> u & 1 == 1) == (support >> u & 1 == 1));
        !antecedent || *y == p.t_s(s, i)
    })
}

/// `eta_i(x, y)` expanded into its `2^|V|` conjuncts. `cap` bounds `|V|`.
pub fn eta_formula(i: usize, p: &ProductBA, x: &str, y: &str, cap: usize) -> Result<QFFormula> {
    if i >= p.dim() {
        return Err(Error::IndexOutOfRange { index: i, dim: p.dim() });
    }
    let size = p.index_set().len();
    if size > cap {
        return Err(Error::IndexSetCap { size, cap });
    }
    let xt = Term::var(x);
    let mut conj = Vec::with_capacity(1 << size);
    for s in 0..1u64 << size {
        let antecedent = (0..size)
            .map(|u| {
                let part = Term::meet(xt.clone(), Term::Unit(u));
                if s >> u & 1 == 1 {
                    QFFormula::nonzero(part)
                } else {
                    QFFormula::Eq(part, Term::Zero)
                }
            })
            .collect();
        let ts: Vec<Term> = (0..size)
            .filter(|&w| (0..size).any(|u| s >> u & 1 == 1 && p.equiv(i, u, w)))
            .map(Term::Unit)
            .collect();
        conj.push(QFFormula::implies(
            QFFormula::And(antecedent),
            QFFormula::Eq(Term::var(y), Term::sum(ts)),
        ));
    }
    Ok(QFFormula::And(conj))
}
