use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use cylneat::elementarity::{
    apply_interpretation, build_q, check_equiv, find_q_subalgebra, id_factor, identity_index, is_f_isomorphism,
    product_size, q_elementary, replay, GameCertificate, RelStructure, Winner,
};
use cylneat::json::{to_canonical_string, FORMAT_VERSION};
use cylneat::neat::{dilation_search_with_hints, verify_dilation_witness, Hint, NeatOutcome};
use cylneat::witness::{build_a, build_dilation, build_with_budget, check_conditions, BlockedBase, BuildReport, ColorFamily, SaturationParams};
use cylneat::{check_ca_axioms, check_set_algebra, neat_reduct, AbstractCA, Error, ProductBA, SetCA};

use crate::config::PipelineConfig;

/// Overall verdict of a command, ordered by severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Negative,
    Inconclusive,
}

impl Status {
    pub fn of(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Negative
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Negative => 1,
            Status::Inconclusive => 2,
        }
    }
}

/// A core error that should end the command with a document, not a crash.
pub fn error_status(e: &anyhow::Error) -> i32 {
    match e.downcast_ref::<Error>() {
        Some(Error::Budget { .. } | Error::CarrierCap { .. } | Error::AtomCap { .. } | Error::IndexSetCap { .. } | Error::SpaceTooLarge { .. }) => 2,
        Some(Error::InvalidParameter(_)) => 3,
        Some(_) => 1,
        None if e.downcast_ref::<std::io::Error>().is_some() => 3,
        None => 1,
    }
}

pub struct Ctx {
    pub cfg: PipelineConfig,
    pub out: PathBuf,
    pub timing: bool,
}

impl Ctx {
    pub fn write(&self, name: &str, command: &str, status: Status, body: Value) -> anyhow::Result<()> {
        std::fs::create_dir_all(&self.out).with_context(|| format!("creating {}", self.out.display()))?;
        let doc = json!({
            "format_version": FORMAT_VERSION,
            "command": command,
            "config": self.cfg,
            "status": status,
            "result": body,
        });
        let path = self.out.join(name);
        std::fs::write(&path, to_canonical_string(&doc)).with_context(|| format!("writing {}", path.display()))
    }

    /// Adds `elapsed_ms` to `v` when timing is on.
    pub fn timed(&self, mut v: Value, start: Instant) -> Value {
        if self.timing {
            v["elapsed_ms"] = json!(start.elapsed().as_millis() as u64);
        }
        v
    }

    fn sp(&self) -> anyhow::Result<SaturationParams> {
        Ok(SaturationParams::new(self.cfg.k, self.cfg.depth, self.cfg.m0)?)
    }
}

#[derive(Serialize, Deserialize)]
pub struct Family {
    pub base: BlockedBase,
    pub colors: ColorFamily,
}

pub const FAMILY_FILE: &str = "family.json";

pub fn load_family(out: &Path) -> anyhow::Result<Family> {
    let path = out.join(FAMILY_FILE);
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {} (run `cylneat build` first)", path.display()))?;
    let doc: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(serde_json::from_value(doc["result"]["family"].clone()).context("family document is malformed")?)
}

pub struct Built {
    pub family: Family,
    pub report: BuildReport,
}

/// Runs the builder. Exhaustion comes back as the report to write.
pub fn build(ctx: &Ctx) -> anyhow::Result<Result<Built, Value>> {
    let c = &ctx.cfg;
    match build_with_budget(c.n, ctx.sp()?, c.rcount, c.seed, c.point_budget) {
        Ok(o) => Ok(Ok(Built {
            family: Family {
                base: o.base,
                colors: o.colors,
            },
            report: o.report,
        })),
        Err(Error::Exhausted { demand }) => Ok(Err(json!({ "exhausted": true, "demand": demand }))),
        Err(e) => Err(e.into()),
    }
}

pub fn conditions_and_axioms(ctx: &Ctx, f: &Family) -> anyhow::Result<(Status, Value, SetCA)> {
    let cert = check_conditions(&f.base, &f.colors, &ctx.sp()?);
    let a = build_a(&f.base, &f.colors, ctx.cfg.carrier_cap)?;
    let axioms = check_set_algebra(&a, ctx.cfg.carrier_cap)?;
    let status = Status::of(cert.passed() && axioms.passed());
    let body = json!({
        "conditions": cert,
        "conditions_passed": cert.passed(),
        "algebra": {
            "atoms": a.atom_count(),
            "carrier_size": a.carrier_size(),
            "axioms_passed": axioms.passed(),
            "axiom_instances": axioms.instances_checked,
            "axiom_violations": axioms.violations,
        },
    });
    Ok((status, body, a))
}

pub fn dilation(ctx: &Ctx, f: &Family, a: &SetCA) -> anyhow::Result<(Status, Value)> {
    let d = build_dilation(&f.base, &f.colors, ctx.cfg.k, ctx.cfg.dilation_atom_cap)?;
    let same = neat_reduct(&d, f.base.n())? == *a;
    Ok((
        Status::of(same),
        json!({
            "dimension": d.dim(),
            "atoms": d.atom_count(),
            "digest": cylneat::json::digest(&d),
            "neat_reduct_equals_a": same,
        }),
    ))
}

pub fn interpretation(ctx: &Ctx, f: &Family, a: &SetCA) -> anyhow::Result<(Status, Value, ProductBA)> {
    let p = ProductBA::with_cap(a, &f.base, ctx.cfg.v_cap)?;
    let cert = cylneat::verify_interpretation(a, &p, ctx.cfg.carrier_cap)?;
    Ok((Status::of(cert.passed()), json!({ "passed": cert.passed(), "certificate": cert }), p))
}

pub struct Elementarity {
    pub status: Status,
    pub summary: Value,
    pub game: GameCertificate,
    pub b: AbstractCA,
    pub hint: Hint,
}

/// `B_Id`, `Q`, `B` and the game between `B` and `A`.
pub fn elementarity(ctx: &Ctx, a: &SetCA, p: &ProductBA) -> anyhow::Result<Elementarity> {
    let c = &ctx.cfg;
    let factor = id_factor(p)?;
    let choice = find_q_subalgebra(&factor, c.q, c.params, c.game_budget)?;
    let sub = factor.substructure(&choice.elements)?;
    let sub_replayed = choice.games.iter().map(|g| replay(&sub, &factor, g)).collect::<cylneat::Result<Vec<_>>>()?;
    let sub_ok = sub_replayed.iter().all(|&r| r) && choice.games.iter().all(|g| g.winner == Winner::Duplicator);

    let id = identity_index(p)?;
    let full_id: Vec<u64> = (0..factor.size as u64).collect();
    let b_id: Vec<u64> = choice.elements.iter().map(|&x| x as u64).collect();
    let (all, p_struct) = build_q(&full_id, p)?;
    let (elements, q_struct) = build_q(&b_id, p)?;
    let flat: Vec<u32> = elements.iter().map(|e| cylneat::elementarity::flat_index(p, e) as u32).collect();
    let (q_in_p, q_games) = q_elementary(&p_struct, &flat, c.q, c.params, c.game_budget)?;

    let b_from_p = apply_interpretation(&all, p)?;
    let iso = is_f_isomorphism(a, &b_from_p, &all, p)?;
    let b = apply_interpretation(&elements, p)?;
    let axioms = check_ca_axioms(&b)?;
    let a_abs = a.abstractize(c.carrier_cap)?;
    let game = check_equiv(&b, &a_abs, c.q, c.game_budget)?;
    let replayed = replay(&RelStructure::from_ca(&b)?, &RelStructure::from_ca(&a_abs)?, &game)?;

    let hint = Hint {
        base: a.base().clone(),
        atom_images: b.atoms().iter().map(|&x| p.flatten(&elements[x as usize])).collect(),
    };
    let ok = sub_ok && q_in_p && iso && axioms.passed() && replayed && game.winner == Winner::Duplicator;
    let summary = json!({
        "rounds": c.q,
        "params": c.params,
        "id_factor": { "index": id, "size": factor.size },
        "subalgebra": {
            "elements": choice.elements,
            "improper": choice.improper,
            "candidates_examined": choice.candidates_examined,
            "games": choice.games.len(),
            "games_replayed": sub_replayed.iter().all(|&r| r),
            "elementary": sub_ok,
        },
        "q_structure": {
            "size": q_struct.size,
            "p_size": product_size(p, c.carrier_cap)?,
            "elementary_in_p": q_in_p,
            "games": q_games.len(),
        },
        "interpretation_of_p": { "size": b_from_p.size(), "isomorphic_to_a_via_f": iso },
        "b": {
            "size": b.size(),
            "axioms_passed": axioms.passed(),
            "digest": cylneat::json::digest(&b),
        },
        "equivalence": {
            "winner": game.winner,
            "extensions": game.extensions,
            "replayed": replayed,
            "certificate_digest": cylneat::json::digest(&game),
        },
    });
    Ok(Elementarity {
        status: Status::of(ok),
        summary,
        game,
        b,
        hint,
    })
}

pub fn neat(ctx: &Ctx, b: &AbstractCA, hints: &[Hint]) -> anyhow::Result<(Status, Value)> {
    let c = &ctx.cfg;
    let outcome = dilation_search_with_hints(b, c.n, c.k, c.max_base, c.node_budget, hints)?;
    let (status, verified) = match &outcome {
        NeatOutcome::Witness(w) => {
            let v = verify_dilation_witness(b, w)?;
            (Status::of(v), Some(v))
        }
        NeatOutcome::Refutation(_) => (Status::Negative, None),
        NeatOutcome::Inconclusive(_) => (Status::Inconclusive, None),
    };
    let mut body = serde_json::to_value(&outcome)?;
    if let NeatOutcome::Witness(w) = &outcome {
        // the images are large; the digest identifies them
        body["atom_images"] = json!(cylneat::json::digest(&w.atom_images));
        body["base"] = json!(w.base.len());
    }
    body["verified"] = json!(verified);
    Ok((status, body))
}
