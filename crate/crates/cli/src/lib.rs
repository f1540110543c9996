//! Configuration, stages and the pipeline behind the `cylneat` binary.

pub mod config;
pub mod stages;

use std::path::Path;
use std::time::Instant;

use serde_json::json;

use config::PipelineConfig;
use stages::{Ctx, Status};

pub fn say(stage: &str, s: Status) {
    println!("{stage}: {}", json!(s).as_str().unwrap_or_default());
}

/// Runs the pipeline with `cfg`, writing `pipeline.json` and `game.json`
/// into `out`.
pub fn run_pipeline(cfg: PipelineConfig, out: &Path, timing: bool) -> anyhow::Result<Status> {
    cfg.validate()?;
    pipeline(&Ctx {
        cfg,
        out: out.to_path_buf(),
        timing,
    })
}

/// Every stage in order. Stage errors end the run; verdicts do not.
pub fn pipeline(ctx: &Ctx) -> anyhow::Result<Status> {
    let mut stages_doc = serde_json::Map::new();
    let mut status = Status::Pass;
    let mut record = |name: &str, s: Status, mut body: serde_json::Value, t: Instant| {
        body["verdict"] = json!(s);
        stages_doc.insert(name.to_string(), ctx.timed(body, t));
        say(name, s);
    };

    let t = Instant::now();
    let built = match stages::build(ctx)? {
        Ok(b) => b,
        Err(report) => {
            record("build", Status::Negative, report, t);
            ctx.write("pipeline.json", "pipeline", Status::Negative, json!({ "halted_at": "build", "stages": stages_doc }))?;
            return Ok(Status::Negative);
        }
    };
    let f = &built.family;
    record("build", Status::Pass, json!({ "points": f.base.len(), "report": built.report }), t);

    let t = Instant::now();
    let (s, body, a) = stages::conditions_and_axioms(ctx, f)?;
    status = status.max(s);
    record("check", s, body, t);

    let t = Instant::now();
    let (s, body) = stages::dilation(ctx, f, &a)?;
    status = status.max(s);
    record("dilation", s, body, t);

    let t = Instant::now();
    let (s, body, p) = stages::interpretation(ctx, f, &a)?;
    status = status.max(s);
    record("interpretation", s, json!({ "passed": body["passed"], "checks": summarize(&body["certificate"]) }), t);

    let t = Instant::now();
    let e = stages::elementarity(ctx, &a, &p)?;
    status = status.max(e.status);
    ctx.write("game.json", "pipeline", e.status, json!(e.game))?;
    record("elementarity", e.status, e.summary, t);

    // evidence only: a witness, a refutation or an inconclusive search all
    // leave the pipeline verdict alone
    let t = Instant::now();
    let (s, body) = stages::neat(ctx, &e.b, &[e.hint])?;
    record("neat", s, body, t);

    ctx.write("pipeline.json", "pipeline", status, json!({ "halted_at": null, "stages": stages_doc }))?;
    Ok(status)
}

/// Pass flags of each check in an interpretation certificate.
fn summarize(cert: &serde_json::Value) -> serde_json::Value {
    let mut out = serde_json::Map::new();
    if let Some(obj) = cert.as_object() {
        for (k, v) in obj {
            if let Some(p) = v.get("passed") {
                out.insert(k.clone(), p.clone());
            } else if let Some(list) = v.as_array() {
                out.insert(k.clone(), json!(list.iter().map(|c| c.get("passed").cloned()).collect::<Vec<_>>()));
            }
        }
    }
    json!(out)
}

