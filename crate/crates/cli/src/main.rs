//! Command-line front end: classify, solve, reduce, generate and verify
//! abduction instances. Results go to standard output as one JSON object.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use abdkit::dispatch::{solve, verify, EngineChoice};
use abdkit::lattice::closure_flags;
use abdkit::reductions::{
    gen_indset_eq, gen_vertexcover_le, reduce_essneg_eq_to_wsat, reduce_im_eq_to_wsat, reduce_is10_eq_to_wsat,
    reduce_iv2_eq_to_wsat, Graph, WsatInstance,
};
use abdkit::{classify, parse_instance, serialize_instance, AbductionInstance, Param, Variant};
use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "abdkit", version, about = "Parameterised propositional abduction over constraint languages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report the parameterised complexity of the instance's language.
    Classify {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, value_parser = parse_variant)]
        variant: Variant,
        #[arg(long, value_parser = parse_param)]
        param: Param,
    },
    /// Decide the instance and print a witness when there is one.
    Solve {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, value_parser = parse_variant)]
        variant: Variant,
        /// Engine name, `oracle`, or `auto`.
        #[arg(long, default_value = "auto")]
        engine: String,
        /// Parameter for the verdict reported alongside the answer.
        #[arg(long, value_parser = parse_param, default_value = "H")]
        param: Param,
    },
    /// Translate an exact-size instance into weighted satisfiability.
    Reduce {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Target::Wsat)]
        target: Target,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Build a hardness instance from a graph.
    Generate {
        #[arg(value_enum)]
        kind: GraphProblem,
        /// Edges as `a-b,b-c`.
        #[arg(long, conflicts_with = "graph")]
        edges: Option<String>,
        /// File with whitespace-separated edge pairs.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(short)]
        k: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run every applicable engine against the oracle.
    Verify {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, value_parser = parse_variant)]
        variant: Variant,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Wsat,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphProblem {
    Indset,
    Vcover,
}

fn parse_variant(s: &str) -> std::result::Result<Variant, String> {
    s.parse()
}

fn parse_param(s: &str) -> std::result::Result<Param, String> {
    s.parse()
}

fn read_instance(path: &Path) -> Result<AbductionInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn answer(yes: bool) -> &'static str {
    if yes {
        "yes"
    } else {
        "no"
    }
}

type Reduction = fn(&AbductionInstance) -> abdkit::Result<WsatInstance>;

/// The reduction matching the language's region, most specific first.
fn pick_reduction(inst: &AbductionInstance) -> Result<(&'static str, Reduction)> {
    let f = closure_flags(&inst.language);
    Ok(if f.horn && f.dual_horn {
        ("reduce_im_eq_to_wsat", reduce_im_eq_to_wsat)
    } else if f.dual_horn {
        ("reduce_iv2_eq_to_wsat", reduce_iv2_eq_to_wsat)
    } else if f.ess_negative {
        ("reduce_essneg_eq_to_wsat", reduce_essneg_eq_to_wsat)
    } else if f.and_or {
        ("reduce_is10_eq_to_wsat", reduce_is10_eq_to_wsat)
    } else {
        bail!("no weighted-satisfiability reduction covers this language")
    })
}

/// Runs a command; `Ok(false)` means a verification disagreement.
fn run(cli: Cli) -> Result<(Value, bool)> {
    match cli.command {
        Command::Classify { input, variant, param } => {
            let inst = read_instance(&input)?;
            let v = classify(&inst.language, variant, param)?;
            let coclone = abdkit::identify_coclone(&inst.language);
            Ok((json!({ "verdict": v.label, "citation": v.source, "coclone": coclone }), true))
        }
        Command::Solve { input, variant, engine, param } => {
            let inst = read_instance(&input)?;
            let choice = match engine.as_str() {
                "auto" => EngineChoice::Auto,
                name => EngineChoice::Named(name),
            };
            let r = solve(&inst, variant, choice, param)?;
            let (verdict, citation) = match r.verdict {
                Some(v) => (json!(v.label), json!(v.source)),
                None => (Value::Null, Value::Null),
            };
            Ok((
                json!({
                    "answer": answer(r.answer),
                    "witness": r.witness,
                    "verdict": verdict,
                    "engine": r.engine,
                    "citation": citation,
                    "coclone": r.coclone,
                }),
                true,
            ))
        }
        Command::Reduce { input, target: Target::Wsat, output } => {
            let inst = read_instance(&input)?;
            let (name, reduce) = pick_reduction(&inst)?;
            let w = reduce(&inst)?;
            write(&output, &w.to_string())?;
            Ok((json!({ "reduction": name, "k": w.k, "mode": w.mode.label(), "output": output }), true))
        }
        Command::Generate { kind, edges, graph, k, output } => {
            let text = match (edges, graph) {
                (Some(e), None) => e,
                (None, Some(p)) => fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?,
                _ => bail!("give the graph with --edges or --graph"),
            };
            let g = Graph::parse_edges(&text)?;
            let (inst, variant) = match kind {
                GraphProblem::Indset => (gen_indset_eq(&g, k)?, Variant::Exact),
                GraphProblem::Vcover => (gen_vertexcover_le(&g, k)?, Variant::AtMost),
            };
            write(&output, &serialize_instance(&inst))?;
            Ok((json!({ "variant": variant.label(), "size": inst.size, "output": output }), true))
        }
        Command::Verify { input, variant } => {
            let inst = read_instance(&input)?;
            let report = verify(&inst, variant)?;
            let ok = report.all_agree;
            let mut v = serde_json::to_value(&report)?;
            v["answer"] = json!(answer(report.oracle));
            Ok((v, ok))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok((out, agreed)) => {
            println!("{out}");
            if agreed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
