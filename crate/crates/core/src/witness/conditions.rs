use serde::Serialize;
use serde_json::{json, Value};

use super::blocked::{d_predicate, permutations, BlockedBase};
use super::colors::ColorFamily;
use super::demand::{injective_tuples, requirement_shapes, transversal_slots, Demand, Families, Polarity, SaturationParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionResult {
    pub verdict: Verdict,
    pub checked: u64,
    pub counterexample: Option<Value>,
}

impl ConditionResult {
    fn new() -> Self {
        ConditionResult {
            verdict: Verdict::Pass,
            checked: 0,
            counterexample: None,
        }
    }

    fn fail(&mut self, why: Value) {
        if self.verdict != Verdict::Fail {
            self.verdict = Verdict::Fail;
            self.counterexample = Some(why);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCertificate {
    pub n: usize,
    pub rcount: usize,
    pub params: SaturationParams,
    pub points: usize,
    pub transversal: ConditionResult,
    pub permutation_closed: ConditionResult,
    pub saturation: ConditionResult,
    pub disjoint: ConditionResult,
    /// Saturation over the whole base: every demand over any one-to-one tuple
    /// has a witness anywhere outside the tuple.
    pub closure: ConditionResult,
}

impl ConditionCertificate {
    pub fn passed(&self) -> bool {
        [&self.transversal, &self.permutation_closed, &self.saturation, &self.disjoint, &self.closure]
            .iter()
            .all(|c| c.verdict != Verdict::Fail)
    }
}

fn names(bb: &BlockedBase, t: &[usize]) -> Vec<String> {
    t.iter().map(|&p| bb.base().name(p).to_string()).collect()
}

fn demand_met(d: &Demand, s: &[usize], cf: &ColorFamily) -> bool {
    let hit = d.colorset.iter().any(|&r| cf.color(r).contains(s));
    match d.polarity {
        Polarity::Small => hit,
        Polarity::Cosmall => !hit,
    }
}

/// Checks conditions (i)-(iv). Saturation is checked layer by layer: demands
/// over points of layer at most `l` must be met by a witness of layer `l + 1`,
/// for every `l < depth`.
pub fn check_conditions(bb: &BlockedBase, cf: &ColorFamily, sp: &SaturationParams) -> ConditionCertificate {
    let n = bb.n();
    let mut transversal = ConditionResult::new();
    let mut closed = ConditionResult::new();
    let mut disjoint = ConditionResult::new();
    let perms = permutations(n);

    for (r, c) in cf.colors().iter().enumerate() {
        for t in c.tuples() {
            transversal.checked += 1;
            if !d_predicate(&t, bb) {
                transversal.fail(json!({"color": r, "tuple": names(bb, &t)}));
            }
            for pi in &perms {
                closed.checked += 1;
                let s: Vec<usize> = pi.iter().map(|&i| t[i]).collect();
                if !c.contains(&s) {
                    closed.fail(json!({"color": r, "tuple": names(bb, &t), "permuted": names(bb, &s)}));
                }
            }
        }
    }
    for r in 0..cf.rcount() {
        for q in r + 1..cf.rcount() {
            disjoint.checked += 1;
            if let Some(t) = cf.color(r).meet(cf.color(q)).tuples().next() {
                disjoint.fail(json!({"colors": [r, q], "tuple": names(bb, &t)}));
            }
        }
    }

    ConditionCertificate {
        n,
        rcount: cf.rcount(),
        params: *sp,
        points: bb.len(),
        transversal,
        permutation_closed: closed,
        saturation: check_saturation(bb, cf, sp),
        disjoint,
        closure: check_closure(bb, cf, sp),
    }
}

fn check_saturation(bb: &BlockedBase, cf: &ColorFamily, sp: &SaturationParams) -> ConditionResult {
    let mut res = ConditionResult::new();
    if sp.depth == 0 {
        res.verdict = Verdict::Vacuous;
        return res;
    }
    let n = bb.n();
    for layer in 0..sp.depth {
        let pts = bb.points_up_to_layer(layer);
        let witnesses: Vec<Vec<usize>> = (0..n)
            .map(|m| bb.block(m).into_iter().filter(|&p| bb.layer_of(p) == layer + 1).collect())
            .collect();
        for j in 1..=sp.k {
            for v in injective_tuples(&pts, n + j - 1) {
                let v_blocks: Vec<usize> = v.iter().map(|&p| bb.block_of(p)).collect();
                let mut ext = v.clone();
                ext.push(usize::MAX);
                for (m, cands) in witnesses.iter().enumerate() {
                    let slots = transversal_slots(n, j, &v_blocks, m);
                    for fam in Families::new(slots, cf.rcount()) {
                        res.checked += 1;
                        let ok = cands.iter().any(|&w| {
                            ext[n + j - 1] = w;
                            fam.iter().all(|d| {
                                let s: Vec<usize> = d.slot.iter().map(|&c| ext[c]).collect();
                                !d_predicate(&s, bb) || demand_met(d, &s, cf)
                            })
                        });
                        if !ok {
                            res.fail(json!({
                                "layer": layer,
                                "j": j,
                                "v": names(bb, &v),
                                "block": m,
                                "family": fam,
                            }));
                            return res;
                        }
                    }
                }
            }
        }
    }
    res
}

/// Demands are grouped by the colors their witness sets may carry; each group
/// is checked against the color vectors the candidates realize.
fn check_closure(bb: &BlockedBase, cf: &ColorFamily, sp: &SaturationParams) -> ConditionResult {
    let mut res = ConditionResult::new();
    if sp.depth == 0 {
        res.verdict = Verdict::Vacuous;
        return res;
    }
    let n = bb.n();
    let all: Vec<usize> = (0..bb.len()).collect();
    let colors_of = |s: &[usize]| -> Vec<usize> { cf.colors_of(s) };
    let mut shapes = std::collections::HashMap::new();
    for j in 1..=sp.k {
        for v in injective_tuples(&all, n + j - 1) {
            let v_blocks: Vec<usize> = v.iter().map(|&p| bb.block_of(p)).collect();
            for m in 0..n {
                let shape = shapes
                    .entry((j, v_blocks.clone(), m))
                    .or_insert_with(|| requirement_shapes(n, j, &v_blocks, m, cf.rcount()));
                let reqs = match shape {
                    Ok((reqs, _)) => reqs.clone(),
                    Err(fam) => {
                        res.fail(json!({"v": names(bb, &v), "block": m, "unsatisfiable": fam.clone()}));
                        return res;
                    }
                };
                let cands: Vec<usize> = bb.block(m).into_iter().filter(|w| !v.contains(w)).collect();
                let mut keys: Vec<&Vec<usize>> = reqs.iter().flat_map(|r| r.iter().map(|(pos, _)| pos)).collect();
                keys.sort();
                keys.dedup();
                let seen: Vec<Vec<Option<usize>>> = cands
                    .iter()
                    .map(|&w| {
                        keys.iter()
                            .map(|pos| {
                                let mut s: Vec<usize> = pos.iter().map(|&c| v[c]).collect();
                                s.push(w);
                                match colors_of(&s)[..] {
                                    [c] => Some(c),
                                    _ => None,
                                }
                            })
                            .collect()
                    })
                    .collect();
                for req in &reqs {
                    res.checked += 1;
                    let ok = seen.iter().any(|got| {
                        req.iter().all(|(pos, allowed)| {
                            let i = keys.binary_search(&pos).expect("key collected above");
                            got[i].is_some_and(|c| allowed.contains(&c))
                        })
                    });
                    if !ok {
                        res.fail(json!({"v": names(bb, &v), "block": m, "requirement": req}));
                        return res;
                    }
                }
            }
        }
    }
    res
}
