//! `cylneat`: builds the colored blocked model, checks it, interprets the
//! algebra into the product, plays the equivalence games and searches for
//! dilations. Every command writes canonical JSON into `--out-dir`.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;

use cylneat::neat::Hint;
use cylneat_cli::config::{Overrides, PipelineConfig};
use cylneat_cli::stages::{self, Ctx, Status};
use cylneat_cli::{pipeline, say};

#[derive(Parser)]
#[command(name = "cylneat", version, about = "Finite cylindric algebras, interpretations and neat-reduct searches")]
struct Cli {
    /// JSON config file; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output documents
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Record wall-clock times in the outputs
    #[arg(long, global = true)]
    timing: bool,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the colored structure, A and its dilation
    Build,
    /// Re-check conditions and axioms on built artifacts
    Check,
    /// Verify the interpretation of A in the product
    Interpret,
    /// Choose B_Id, build Q and B, and play B against A
    Elementarity,
    /// Search for a dilation of A
    Neatcheck {
        /// Also try A's own representation as a candidate
        #[arg(long)]
        hint: bool,
    },
    /// Run every stage and write one summary
    Pipeline,
}

fn run(cli: &Cli) -> anyhow::Result<Status> {
    let cfg = PipelineConfig::load(cli.config.as_deref(), &cli.overrides)?;
    let ctx = Ctx {
        cfg,
        out: cli.out_dir.clone(),
        timing: cli.timing,
    };
    match &cli.cmd {
        Cmd::Build => {
            let t = Instant::now();
            let built = match stages::build(&ctx)? {
                Ok(b) => b,
                Err(report) => {
                    ctx.write("build.json", "build", Status::Negative, report)?;
                    eprintln!("builder exhausted; see build.json");
                    return Ok(Status::Negative);
                }
            };
            let (s1, checks, a) = stages::conditions_and_axioms(&ctx, &built.family)?;
            let (s2, dil) = stages::dilation(&ctx, &built.family, &a)?;
            let status = s1.max(s2);
            ctx.write(stages::FAMILY_FILE, "build", status, json!({ "family": built.family, "report": built.report }))?;
            ctx.write("algebra.json", "build", status, json!(a))?;
            ctx.write("conditions.json", "build", s1, checks)?;
            let body = ctx.timed(json!({ "points": built.family.base.len(), "atoms": a.atom_count(), "dilation": dil }), t);
            ctx.write("build.json", "build", status, body)?;
            say("build", status);
            Ok(status)
        }
        Cmd::Check => {
            let f = stages::load_family(&ctx.out)?;
            let t = Instant::now();
            let (s, body, _) = stages::conditions_and_axioms(&ctx, &f)?;
            ctx.write("check.json", "check", s, ctx.timed(body, t))?;
            say("check", s);
            Ok(s)
        }
        Cmd::Interpret => {
            let f = stages::load_family(&ctx.out)?;
            let t = Instant::now();
            let a = cylneat::witness::build_a(&f.base, &f.colors, ctx.cfg.carrier_cap)?;
            let (s, body, _) = stages::interpretation(&ctx, &f, &a)?;
            ctx.write("interpretation.json", "interpret", s, ctx.timed(body, t))?;
            say("interpret", s);
            Ok(s)
        }
        Cmd::Elementarity => {
            let f = stages::load_family(&ctx.out)?;
            let t = Instant::now();
            let a = cylneat::witness::build_a(&f.base, &f.colors, ctx.cfg.carrier_cap)?;
            let p = cylneat::ProductBA::with_cap(&a, &f.base, ctx.cfg.v_cap)?;
            let e = stages::elementarity(&ctx, &a, &p)?;
            ctx.write("game.json", "elementarity", e.status, json!(e.game))?;
            ctx.write("elementarity.json", "elementarity", e.status, ctx.timed(e.summary, t))?;
            say("elementarity", e.status);
            Ok(e.status)
        }
        Cmd::Neatcheck { hint } => {
            let f = stages::load_family(&ctx.out)?;
            let t = Instant::now();
            let a = cylneat::witness::build_a(&f.base, &f.colors, ctx.cfg.carrier_cap)?;
            let b = a.abstractize(ctx.cfg.carrier_cap)?;
            let hints: Vec<Hint> = if *hint {
                vec![Hint {
                    base: a.base().clone(),
                    atom_images: a.atoms().to_vec(),
                }]
            } else {
                Vec::new()
            };
            let (s, body) = stages::neat(&ctx, &b, &hints)?;
            ctx.write("neat.json", "neatcheck", s, ctx.timed(body, t))?;
            say("neatcheck", s);
            Ok(s)
        }
        Cmd::Pipeline => pipeline(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(s) => ExitCode::from(s.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = if e.downcast_ref::<cylneat::Error>().is_none() && e.downcast_ref::<std::io::Error>().is_none() {
                // config validation and artifact problems
                3
            } else {
                stages::error_status(&e)
            };
            ExitCode::from(code as u8)
        }
    }
}
