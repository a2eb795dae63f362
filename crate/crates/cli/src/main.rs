use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use skdist::common::{self, CommonPartition};
use skdist::corpus;
use skdist::distill::{self, LeakageMode, SimConfig};
use skdist::format;
use skdist::rates::{self, Direction, OptimizerOptions};
use skdist::report;
use skdist::structure::{self, RESIDUAL_TOL};
use skdist::TripartiteDistribution;

mod render;

/// Secret-key distillation analysis of tripartite distributions.
#[derive(Parser)]
#[command(name = "skdist", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Global {
    /// Residual below which a Markov chain counts as exact.
    #[arg(long, global = true, default_value_t = RESIDUAL_TOL)]
    tol: f64,
    /// Random restarts for the numerical optimizers.
    #[arg(long, global = true, default_value_t = 32)]
    restarts: usize,
    /// Iteration cap per optimizer run.
    #[arg(long, global = true, default_value_t = 2000)]
    iters: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Sample count for the mixing curve.
    #[arg(long, global = true, default_value_t = 100)]
    grid: usize,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
}

impl Global {
    fn optimizer(&self) -> OptimizerOptions {
        OptimizerOptions {
            restarts: self.restarts,
            iterations: self.iters,
            seed: self.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Every analysis in one report.
    Analyze { file: String },
    /// Common partition of p_XY and of every slice p_XY|Z=z.
    Partition { file: String },
    /// Uniform-block and UBI classification.
    Classify { file: String },
    /// One-way conditions: cross-block check, lower bounds, certificate scan.
    CheckOneway { file: String },
    /// Two-way condition: dominance witnesses and reducing channels.
    CheckTwoway { file: String },
    /// Upper bound on the intrinsic information.
    Intrinsic { file: String },
    /// Numerical maximization of the one-way rate expression.
    OnewayOpt {
        file: String,
        #[arg(long, value_enum, default_value_t = Dir::AliceToBob)]
        direction: Dir,
    },
    /// Privacy amplification on the common variable.
    SimulatePa {
        file: String,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long)]
        rate: f64,
        #[arg(long, default_value_t = 64)]
        trials: usize,
        /// Estimate leakage from this many sampled z^n instead of enumerating.
        #[arg(long)]
        sampled: Option<usize>,
    },
    /// Built-in example distributions.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    List,
    Show { name: String },
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dir {
    AliceToBob,
    BobToAlice,
}

impl From<Dir> for Direction {
    fn from(d: Dir) -> Self {
        match d {
            Dir::AliceToBob => Direction::AliceToBob,
            Dir::BobToAlice => Direction::BobToAlice,
        }
    }
}

struct Loaded {
    name: String,
    dist: TripartiteDistribution,
}

/// A path to a `.dist` file, or the name of a corpus entry.
fn load(arg: &str) -> Result<Loaded> {
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
        let f = format::parse(&text).with_context(|| format!("parsing {arg}"))?;
        let name = f.name.unwrap_or_else(|| arg.to_string());
        return Ok(Loaded { name, dist: f.dist });
    }
    match corpus::find(arg) {
        Some(e) => Ok(Loaded {
            name: e.name.to_string(),
            dist: e.distribution().with_context(|| format!("loading corpus entry {}", e.name))?,
        }),
        None => bail!("{arg}: no such file or corpus entry"),
    }
}

fn alphabets(d: &TripartiteDistribution) -> Value {
    json!({ "x": d.x(), "y": d.y(), "z": d.z() })
}

fn emit(g: &Global, value: Value, text: String) -> Result<()> {
    if g.json {
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        print!("{text}");
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn partition_json(p: &CommonPartition) -> Value {
    json!({ "blocks": p.blocks(), "null_x": p.null_x(), "null_y": p.null_y() })
}

fn run(cli: Cli) -> Result<()> {
    let g = cli.global;
    if let Some(n) = g.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let opts = g.optimizer();
    match cli.command {
        Command::Analyze { file } => {
            let l = load(&file)?;
            let r = report::analyze(&l.dist, &opts);
            let text = render::analysis(&l.name, &l.dist, &r);
            emit(&g, json!({ "name": l.name, "alphabets": alphabets(&l.dist), "report": r }), text)
        }
        Command::Partition { file } => {
            let l = load(&file)?;
            let global = common::global_partition(&l.dist);
            let cond = common::conditional_common_partition(&l.dist);
            let slices: Vec<Value> = cond
                .slices
                .iter()
                .map(|s| json!({ "z": s.z, "weight": s.weight, "partition": partition_json(&s.partition) }))
                .collect();
            let value = json!({
                "name": l.name,
                "alphabets": alphabets(&l.dist),
                "global": partition_json(&global),
                "common_information": global.entropy(),
                "slices": slices,
            });
            emit(&g, value, render::partitions(&l.name, &l.dist, &global, &cond))
        }
        Command::Classify { file } => {
            let l = load(&file)?;
            let s = report::structure_report(&l.dist);
            let value = json!({
                "name": l.name,
                "cmi": s.cmi,
                "no_comm_key_rate": s.no_comm_key_rate,
                "helper_key_rate": s.helper_key_rate,
                "cmi_given_common": s.cmi_given_common,
                "ubi": s.ubi,
            });
            emit(&g, value, render::classification(&l.name, &s))
        }
        Command::CheckOneway { file } => {
            let l = load(&file)?;
            let violations = structure::check_theorem3(&l.dist);
            let bounds = rates::oneway_lower_bounds(&l.dist);
            let scans: Vec<_> = [Direction::AliceToBob, Direction::BobToAlice]
                .into_iter()
                .map(|dir| rates::lemma4_deterministic_scan(&l.dist, dir, g.tol))
                .collect();
            let scan_json: Vec<Value> = scans
                .iter()
                .map(|s| match s {
                    Ok(s) => to_json(s),
                    Err(e) => json!({ "skipped": e.to_string() }),
                })
                .collect();
            let value = json!({
                "name": l.name,
                "alphabets": alphabets(&l.dist),
                "cmi": l.dist.conditional_mutual_information(),
                "theorem3_violations": violations,
                "lower_bounds": bounds,
                "certificate_scans": scan_json,
            });
            emit(&g, value, render::oneway(&l.name, &l.dist, &violations, &bounds, &scans))
        }
        Command::CheckTwoway { file } => {
            let l = load(&file)?;
            let check = structure::check_theorem4(&l.dist);
            let mut details = Vec::new();
            for w in &check.witnesses {
                let channel = structure::construct_reducing_channel(&l.dist, w.z0, w.z1);
                let curve = structure::mixing_curve(&l.dist, w.z0, w.z1, g.grid)?;
                details.push((w.clone(), channel, curve));
            }
            let value = json!({
                "name": l.name,
                "alphabets": alphabets(&l.dist),
                "cmi": l.dist.conditional_mutual_information(),
                "strict_gap": check.strict_gap,
                "witnesses": details.iter().map(|(w, c, curve)| json!({
                    "witness": w,
                    "reducing_channel": match c {
                        Ok(c) => to_json(c),
                        Err(e) => json!({ "error": e.to_string() }),
                    },
                    "chord_gap": curve.chord_gap,
                    "chord_gap_at": curve.chord_gap_at,
                })).collect::<Vec<_>>(),
            });
            emit(&g, value, render::twoway(&l.name, &l.dist, &details))
        }
        Command::Intrinsic { file } => {
            let l = load(&file)?;
            let cmi = l.dist.conditional_mutual_information();
            let b = rates::intrinsic_information_upper(&l.dist, &opts);
            let text = render::intrinsic(&l.name, cmi, &b);
            emit(&g, json!({ "name": l.name, "cmi": cmi, "intrinsic_upper": b }), text)
        }
        Command::OnewayOpt { file, direction } => {
            let l = load(&file)?;
            let dir: Direction = direction.into();
            let b = rates::ac_rate_optimize(&dir.orient(&l.dist), &opts);
            let lb = rates::oneway_lower_bounds(&l.dist);
            let simple = match dir {
                Direction::AliceToBob => lb.alice_to_bob,
                Direction::BobToAlice => lb.bob_to_alice,
            };
            let cmi = l.dist.conditional_mutual_information();
            let text = render::oneway_opt(&l.name, dir, cmi, simple, &b);
            emit(
                &g,
                json!({ "name": l.name, "direction": dir, "cmi": cmi, "simple_bound": simple, "optimized": b }),
                text,
            )
        }
        Command::SimulatePa {
            file,
            n,
            rate,
            trials,
            sampled,
        } => {
            let l = load(&file)?;
            let cfg = SimConfig {
                n,
                rate,
                trials,
                seed: g.seed,
                mode: sampled.map_or(LeakageMode::Exact, |z_samples| LeakageMode::Sampled { z_samples }),
            };
            let r = distill::simulate_privacy_amplification(&l.dist, &cfg)?;
            let h = common::no_comm_key_rate(&l.dist);
            let text = render::simulation(&l.name, &cfg, h, &r);
            emit(&g, json!({ "name": l.name, "config": cfg, "h_j_given_z": h, "result": r }), text)
        }
        Command::Corpus { action } => corpus_command(&g, action),
    }
}

fn corpus_command(g: &Global, action: CorpusAction) -> Result<()> {
    match action {
        CorpusAction::List => {
            let list: Vec<Value> = corpus::ENTRIES
                .iter()
                .map(|e| json!({ "name": e.name, "summary": e.summary }))
                .collect();
            let text: String = corpus::ENTRIES
                .iter()
                .map(|e| format!("{:<18} {}\n", e.name, e.summary))
                .collect();
            emit(g, Value::Array(list), text)
        }
        CorpusAction::Show { name } => {
            let e = corpus::find(&name).with_context(|| format!("no corpus entry named {name}"))?;
            let text = e.text()?;
            let d = format::parse(&text)?.dist;
            emit(g, json!({ "name": e.name, "alphabets": alphabets(&d), "text": text }), text)
        }
        CorpusAction::Verify => {
            let reports = corpus::verify_all()?;
            let mut text = String::new();
            for r in &reports {
                for p in &r.results {
                    text.push_str(&format!(
                        "{} {}: {}\n",
                        if p.passed { "ok  " } else { "FAIL" },
                        r.name,
                        p.description
                    ));
                }
            }
            let failed = reports.iter().filter(|r| !r.passed()).count();
            text.push_str(&format!("{} entries, {failed} failing\n", reports.len()));
            emit(g, to_json(&reports), text)?;
            if failed > 0 {
                bail!("{failed} corpus entries fail their predicates");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
