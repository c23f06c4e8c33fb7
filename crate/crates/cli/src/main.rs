//! Command-line front end. Every subcommand reads instance documents (file
//! path or `-` for stdin), prints results on stdout, and uses the exit code
//! as the machine answer: 0 success, 1 negative decision (invalid plan,
//! bound unmet, execution refused), 2 usage or input error, 3 size or node
//! budget exceeded. `--json` swaps the plain output for a one-line
//! `{command, answer, witness?, stats}` envelope. Output is byte-identical
//! across runs of the same invocation.

use clap::{Parser, Subcommand, ValueEnum};
use planorder::doc::{ExecutionDocument, InstanceDocument, LoadError};
use planorder::generators::{
    gen_3sat, gen_coloring, gen_gap, gen_min_cover, gen_toy_car, CertifiedInstance, ColoringError,
    CoverError, GapError, SatError, SatLiteral, SatOptions, SimpleGraph, ToyCarError,
};
use planorder::oracles::{
    mmcd_exact, mmcr_exact, mmpd_exact, mmpr_bounded_witness, mmpr_sweep, ppl_exact, OracleAnswer,
    OracleBudget, OracleError,
};
use planorder::parallel::{dppl, prf_strict, PrfError};
use planorder::refalgs::{goal_chain_primaries, kk, vpc};
use planorder::render::render_schedule;
use planorder::semantics::{make_self_contained, strip_self_contained, Validator};
use planorder::{ActionId, Atom, Execution, ParallelPlan, Ppi};
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "planorder", version, about = "Validate, deorder, schedule, and generate partially ordered plans")]
struct Cli {
    /// Emit a one-line JSON result envelope instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check plan validity (exit 0 valid, 1 invalid).
    Validate {
        /// Instance document; `-` reads stdin.
        #[arg(default_value = "-")]
        file: String,
        /// Check every linearization instead of the polynomial criterion.
        #[arg(long)]
        brute: bool,
    },
    /// Remove ordering constraints; prints the resulting document.
    Deorder {
        #[arg(default_value = "-")]
        file: String,
        #[arg(long, value_enum)]
        algo: DeorderAlgo,
    },
    /// Earliest-release schedule of a definite plan.
    Schedule {
        #[arg(default_value = "-")]
        file: String,
    },
    /// Exact optimum (or bound decision) for an optimization problem.
    Exact {
        #[arg(default_value = "-")]
        file: String,
        #[arg(long, value_enum)]
        problem: ProblemKind,
        /// Decide `optimum <= bound` instead of computing the optimum.
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long)]
        max_actions: Option<usize>,
        #[arg(long)]
        max_nodes: Option<u64>,
    },
    /// Run a published reordering/deordering procedure.
    Refalg {
        #[arg(default_value = "-")]
        file: String,
        #[arg(long, value_enum)]
        algo: RefAlgo,
    },
    /// Generate a certified instance family member.
    #[command(subcommand)]
    Gen(GenCmd),
    /// Draw a schedule as a text chart.
    Render {
        #[arg(default_value = "-")]
        file: String,
        /// Execution document with the release times.
        #[arg(long)]
        exec: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DeorderAlgo {
    Mld,
    Prf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemKind {
    Mmcd,
    Mmcr,
    Ppl,
    Mmpd,
    Mmpr,
}

#[derive(Clone, Copy, ValueEnum)]
enum RefAlgo {
    Vpc,
    Kk,
}

#[derive(Subcommand)]
enum GenCmd {
    /// Minimum-cover instance: one action per subset, one consumer.
    Cover {
        /// Ground set, comma-separated atom names.
        #[arg(long)]
        ground: String,
        /// One subset per flag, comma-separated atom names.
        #[arg(long = "subset")]
        subsets: Vec<String>,
        #[arg(short, long)]
        output: Option<String>,
    },
    /// Coloring instance: optimal makespan = chromatic number.
    Coloring {
        /// complete:N, cycle:N, edgeless:N, petersen, or kN/cN shorthand.
        #[arg(long)]
        graph: String,
        /// Chain the actions so the claim becomes a deordering optimum.
        #[arg(long)]
        totalize: bool,
        #[arg(short, long)]
        output: Option<String>,
    },
    /// Clause-set instance: reorderable to 8 time units iff satisfiable.
    #[command(name = "3sat")]
    ThreeSat {
        /// Number of propositional atoms.
        #[arg(long)]
        atoms: usize,
        /// One clause per flag: three comma-separated signed indices, e.g. 1,-2,3.
        #[arg(long = "clause", allow_hyphen_values = true)]
        clauses: Vec<String>,
        #[arg(long)]
        allow_repeats: bool,
        /// Reproduce the published table verbatim, typo included.
        #[arg(long)]
        strict_text: bool,
        #[arg(short, long)]
        output: Option<String>,
    },
    /// Layered family with an exponential deorder/reorder gap.
    Gap {
        #[arg(long)]
        levels: u32,
        #[arg(long)]
        fanout: u32,
        #[arg(short, long)]
        output: Option<String>,
    },
    /// The toy assembly model with its reference numbers.
    Toycar {
        /// Override durations, e.g. --duration PAC=2 (repeatable).
        #[arg(long = "duration")]
        durations: Vec<String>,
        #[arg(short, long)]
        output: Option<String>,
    },
}

/// An error destined for the exit-code table: 2 usage, 3 budget.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn budget(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::TooManyActions { .. } | OracleError::BudgetExceeded { .. } => {
                Failure::budget(e.to_string())
            }
            OracleError::InvalidInput(_) => Failure::usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = command_name(&cli.cmd);
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            if cli.json {
                println!("{}", json!({ "command": command, "error": f.message }));
            } else {
                println!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Validate { .. } => "validate",
        Cmd::Deorder { .. } => "deorder",
        Cmd::Schedule { .. } => "schedule",
        Cmd::Exact { .. } => "exact",
        Cmd::Refalg { .. } => "refalg",
        Cmd::Gen(_) => "gen",
        Cmd::Render { .. } => "render",
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::usage(format!("reading stdin: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{path}: {e}")))
    }
}

fn load_instance(path: &str) -> Result<(Ppi, ParallelPlan), Failure> {
    let text = read_input(path)?;
    let doc = InstanceDocument::parse(&text).map_err(|e| Failure::usage(e.to_string()))?;
    doc.to_parts().map_err(|e| Failure::usage(e.to_string()))
}

fn stats(pp: &ParallelPlan) -> Value {
    json!({
        "actions": pp.plan.len(),
        "order_pairs": pp.plan.order.len(),
        "nonconc_pairs": pp.nonconc.pairs().len(),
    })
}

fn write_document(doc: &InstanceDocument, output: Option<&str>) -> Result<(), Failure> {
    let text = doc.canonical_json();
    match output {
        None | Some("-") => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::usage(format!("{path}: {e}"))),
    }
}

fn order_witness(order: &planorder::OrderRelation) -> Value {
    let pairs: Vec<[String; 2]> = order
        .reduction()
        .into_iter()
        .map(|(a, b)| [a.0, b.0])
        .collect();
    json!(pairs)
}

fn release_witness(exec: &Execution) -> Value {
    let map: BTreeMap<&str, u32> =
        exec.release.iter().map(|(a, r)| (a.0.as_str(), *r)).collect();
    json!(map)
}

/// Require a valid plan before running a transformation or oracle; exit 1
/// (not an error) when the check decides "invalid".
fn require_valid(problem: &Ppi, pp: &ParallelPlan, json: bool, command: &str) -> Result<Option<u8>, Failure> {
    let valid = planorder::semantics::mtc_valid(problem, &pp.plan)
        .map_err(|e| Failure::usage(e.to_string()))?;
    if valid {
        return Ok(None);
    }
    if json {
        println!(
            "{}",
            json!({ "command": command, "answer": "input plan is not valid", "stats": stats(pp) })
        );
    } else {
        println!("input plan is not valid");
    }
    Ok(Some(1))
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.cmd {
        Cmd::Validate { file, brute } => {
            let (problem, pp) = load_instance(file)?;
            let validator = if *brute {
                Validator::BruteForce { max_actions: OracleBudget::default().max_actions }
            } else {
                Validator::Mtc
            };
            let valid = validator.check(&problem, &pp.plan).map_err(|e| match e {
                planorder::semantics::ValidateError::TooLarge(t) => Failure::budget(t.to_string()),
                other => Failure::usage(other.to_string()),
            })?;
            if cli.json {
                println!(
                    "{}",
                    json!({ "command": "validate", "answer": valid, "stats": stats(&pp) })
                );
            } else {
                println!("{}", if valid { "valid" } else { "invalid" });
            }
            Ok(if valid { 0 } else { 1 })
        }
        Cmd::Deorder { file, algo } => {
            let (problem, pp) = load_instance(file)?;
            if let Some(code) = require_valid(&problem, &pp, cli.json, "deorder")? {
                return Ok(code);
            }
            let out = match algo {
                DeorderAlgo::Mld => {
                    let plan = planorder::deorder::mld(&problem, &pp.plan, Validator::Mtc)
                        .map_err(|e| Failure::usage(e.to_string()))?;
                    pp.with_order(plan.order).expect("same action set")
                }
                DeorderAlgo::Prf => prf_strict(&pp, &problem).map_err(|e| match e {
                    PrfError::NotDefinite(d) => Failure::usage(d.to_string()),
                    other => Failure::usage(other.to_string()),
                })?,
            };
            let doc = InstanceDocument::from_parts(&problem, &out);
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "command": "deorder",
                        "answer": out.plan.order.len(),
                        "witness": { "document": serde_json::to_value(&doc).expect("docs serialize") },
                        "stats": stats(&pp),
                    })
                );
                Ok(0)
            } else {
                write_document(&doc, None)?;
                Ok(0)
            }
        }
        Cmd::Schedule { file } => {
            let (_, pp) = load_instance(file)?;
            let (exec, makespan) = dppl(&pp).map_err(|e| Failure::usage(e.to_string()))?;
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "command": "schedule",
                        "answer": makespan,
                        "witness": { "release": release_witness(&exec) },
                        "stats": stats(&pp),
                    })
                );
            } else {
                println!("makespan={makespan}");
            }
            Ok(0)
        }
        Cmd::Exact { file, problem: kind, bound, max_actions, max_nodes } => {
            let (problem, pp) = load_instance(file)?;
            if let Some(code) = require_valid(&problem, &pp, cli.json, "exact")? {
                return Ok(code);
            }
            let defaults = OracleBudget::default();
            let budget = OracleBudget {
                max_actions: max_actions.unwrap_or(defaults.max_actions),
                max_nodes: max_nodes.unwrap_or(defaults.max_nodes),
            };
            if let Some(limit) = bound {
                let (achievable, answer) = decide_bound(*kind, &problem, &pp, *limit, &budget)?;
                if cli.json {
                    let mut envelope = json!({
                        "command": "exact",
                        "answer": achievable,
                        "stats": stats(&pp),
                    });
                    if let Some(w) = answer {
                        envelope["witness"] = w;
                    }
                    println!("{envelope}");
                } else {
                    println!("{achievable}");
                }
                Ok(if achievable { 0 } else { 1 })
            } else {
                let answer = compute_exact(*kind, &problem, &pp, &budget)?;
                if cli.json {
                    let mut witness = serde_json::Map::new();
                    if let Some(o) = &answer.witness_order {
                        witness.insert("order".into(), order_witness(o));
                    }
                    if let Some(e) = &answer.witness_execution {
                        witness.insert("release".into(), release_witness(e));
                    }
                    let mut envelope = json!({
                        "command": "exact",
                        "answer": answer.optimum,
                        "stats": stats(&pp),
                    });
                    envelope["stats"]["nodes"] = json!(answer.nodes);
                    if !witness.is_empty() {
                        envelope["witness"] = Value::Object(witness);
                    }
                    println!("{envelope}");
                } else {
                    println!("optimum={}", answer.optimum);
                }
                Ok(0)
            }
        }
        Cmd::Refalg { file, algo } => {
            let (problem, pp) = load_instance(file)?;
            if let Some(code) = require_valid(&problem, &pp, cli.json, "refalg")? {
                return Ok(code);
            }
            let sc = make_self_contained(&problem, &pp.plan)
                .map_err(|e| Failure::usage(e.to_string()))?;
            let out_sc = match algo {
                RefAlgo::Vpc => {
                    let primaries =
                        goal_chain_primaries(&sc).map_err(|e| Failure::usage(e.to_string()))?;
                    vpc(&sc, &primaries).map_err(|e| Failure::usage(e.to_string()))?
                }
                RefAlgo::Kk => kk(&sc).map_err(|e| Failure::usage(e.to_string()))?,
            };
            let (out_problem, out_plan) = strip_self_contained(&out_sc);
            let out = pp.with_order(out_plan.order).expect("same action set");
            let doc = InstanceDocument::from_parts(&out_problem, &out);
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "command": "refalg",
                        "answer": out.plan.order.len(),
                        "witness": { "document": serde_json::to_value(&doc).expect("docs serialize") },
                        "stats": stats(&pp),
                    })
                );
                Ok(0)
            } else {
                write_document(&doc, None)?;
                Ok(0)
            }
        }
        Cmd::Gen(gen) => {
            let (instance, output) = generate(gen)?;
            let doc = InstanceDocument::from_parts(&instance.problem, &instance.plan)
                .with_certificate(&instance.certificate);
            if cli.json {
                let mut envelope = json!({
                    "command": "gen",
                    "answer": instance.plan.plan.len(),
                    "stats": stats(&instance.plan),
                });
                match output.as_deref() {
                    None | Some("-") => {
                        envelope["witness"] =
                            json!({ "document": serde_json::to_value(&doc).expect("docs serialize") });
                    }
                    Some(path) => {
                        std::fs::write(path, doc.canonical_json())
                            .map_err(|e| Failure::usage(format!("{path}: {e}")))?;
                    }
                }
                println!("{envelope}");
            } else {
                write_document(&doc, output.as_deref())?;
            }
            Ok(0)
        }
        Cmd::Render { file, exec } => {
            let (_, pp) = load_instance(file)?;
            let text = read_input(exec)?;
            let edoc = ExecutionDocument::parse(&text).map_err(|e| Failure::usage(e.to_string()))?;
            let execution = edoc.to_execution().map_err(|e| Failure::usage(e.to_string()))?;
            match render_schedule(&pp, &execution) {
                Ok(chart) => {
                    if cli.json {
                        let makespan = chart
                            .lines()
                            .last()
                            .and_then(|l| l.strip_prefix("makespan="))
                            .and_then(|n| n.parse::<u64>().ok())
                            .expect("chart ends with the makespan line");
                        println!(
                            "{}",
                            json!({
                                "command": "render",
                                "answer": makespan,
                                "witness": { "chart": chart },
                                "stats": stats(&pp),
                            })
                        );
                    } else {
                        print!("{chart}");
                    }
                    Ok(0)
                }
                Err(violation) => {
                    if cli.json {
                        println!(
                            "{}",
                            json!({
                                "command": "render",
                                "answer": violation.to_string(),
                                "stats": stats(&pp),
                            })
                        );
                    } else {
                        println!("invalid execution: {violation}");
                    }
                    Ok(1)
                }
            }
        }
    }
}

fn compute_exact(
    kind: ProblemKind,
    problem: &Ppi,
    pp: &ParallelPlan,
    budget: &OracleBudget,
) -> Result<OracleAnswer, Failure> {
    let answer = match kind {
        ProblemKind::Mmcd => mmcd_exact(problem, &pp.plan, budget)?,
        ProblemKind::Mmcr => mmcr_exact(problem, &pp.plan, budget)?,
        ProblemKind::Ppl => ppl_exact(pp, budget)?,
        ProblemKind::Mmpd => mmpd_exact(pp, problem, budget)?,
        ProblemKind::Mmpr => mmpr_sweep(pp, problem, budget)?,
    };
    Ok(answer)
}

fn decide_bound(
    kind: ProblemKind,
    problem: &Ppi,
    pp: &ParallelPlan,
    limit: u64,
    budget: &OracleBudget,
) -> Result<(bool, Option<Value>), Failure> {
    if let ProblemKind::Mmpr = kind {
        match mmpr_bounded_witness(pp, problem, limit, budget)? {
            Some((order, exec)) => {
                let witness = json!({
                    "order": order_witness(&order),
                    "release": release_witness(&exec),
                });
                return Ok((true, Some(witness)));
            }
            None => return Ok((false, None)),
        }
    }
    let answer = compute_exact(kind, problem, pp, budget)?;
    if answer.optimum > limit {
        return Ok((false, None));
    }
    let mut witness = serde_json::Map::new();
    if let Some(o) = &answer.witness_order {
        witness.insert("order".into(), order_witness(o));
    }
    if let Some(e) = &answer.witness_execution {
        witness.insert("release".into(), release_witness(e));
    }
    let witness = if witness.is_empty() { None } else { Some(Value::Object(witness)) };
    Ok((true, witness))
}

fn parse_atom_list(text: &str) -> Result<Vec<Atom>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            if s.starts_with('!') {
                Err(Failure::usage(format!("atom name {s:?} may not start with '!'")))
            } else {
                Ok(Atom::new(s))
            }
        })
        .collect()
}

fn parse_graph(text: &str) -> Result<SimpleGraph, Failure> {
    let lower = text.to_ascii_lowercase();
    if lower == "petersen" {
        return Ok(SimpleGraph::petersen());
    }
    let (kind, n) = match lower.split_once(':') {
        Some((kind, n)) => (kind.to_string(), n.to_string()),
        None => {
            // kN / cN shorthand.
            let (head, tail) = lower.split_at(1);
            let kind = match head {
                "k" => "complete",
                "c" => "cycle",
                _ => return Err(Failure::usage(format!("unknown graph {text:?}"))),
            };
            (kind.to_string(), tail.to_string())
        }
    };
    let n: usize = n
        .parse()
        .map_err(|_| Failure::usage(format!("bad vertex count in graph {text:?}")))?;
    match kind.as_str() {
        "complete" => Ok(SimpleGraph::complete(n)),
        "cycle" if n >= 3 => Ok(SimpleGraph::cycle(n)),
        "cycle" => Err(Failure::usage("a cycle needs at least three vertices")),
        "edgeless" => Ok(SimpleGraph::edgeless(n)),
        _ => Err(Failure::usage(format!("unknown graph {text:?}"))),
    }
}

fn parse_clause(text: &str) -> Result<[SatLiteral; 3], Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Failure::usage(format!(
            "clause {text:?} must have exactly three comma-separated literals"
        )));
    }
    let mut lits = [SatLiteral::pos(1); 3];
    for (slot, part) in parts.iter().enumerate() {
        let value: i64 = part
            .parse()
            .map_err(|_| Failure::usage(format!("clause literal {part:?} is not an integer")))?;
        if value == 0 {
            return Err(Failure::usage("clause literals are 1-based, 0 is not valid"));
        }
        lits[slot] = SatLiteral { atom: value.unsigned_abs() as usize, positive: value > 0 };
    }
    Ok(lits)
}

fn generate(gen: &GenCmd) -> Result<(CertifiedInstance, Option<String>), Failure> {
    match gen {
        GenCmd::Cover { ground, subsets, output } => {
            let ground: BTreeSet<Atom> = parse_atom_list(ground)?.into_iter().collect();
            let subsets: Vec<BTreeSet<Atom>> = subsets
                .iter()
                .map(|s| Ok(parse_atom_list(s)?.into_iter().collect()))
                .collect::<Result<_, Failure>>()?;
            if subsets.is_empty() {
                return Err(Failure::usage("at least one --subset is required"));
            }
            let instance = gen_min_cover(&ground, &subsets).map_err(|e| match e {
                CoverError::TooManySubsets { .. } => Failure::budget(e.to_string()),
                other => Failure::usage(other.to_string()),
            })?;
            Ok((instance, output.clone()))
        }
        GenCmd::Coloring { graph, totalize, output } => {
            let g = parse_graph(graph)?;
            let instance = gen_coloring(&g, *totalize).map_err(|e| match e {
                ColoringError::TooManyVertices { .. } => Failure::budget(e.to_string()),
            })?;
            Ok((instance, output.clone()))
        }
        GenCmd::ThreeSat { atoms, clauses, allow_repeats, strict_text, output } => {
            let clauses: Vec<[SatLiteral; 3]> =
                clauses.iter().map(|c| parse_clause(c)).collect::<Result<_, Failure>>()?;
            let opts = SatOptions { allow_repeats: *allow_repeats, strict_text: *strict_text };
            let instance = gen_3sat(*atoms, &clauses, opts).map_err(|e| match e {
                SatError::TooManyAtoms { .. } => Failure::budget(e.to_string()),
                other => Failure::usage(other.to_string()),
            })?;
            Ok((instance, output.clone()))
        }
        GenCmd::Gap { levels, fanout, output } => {
            if *levels == 0 || *fanout == 0 {
                return Err(Failure::usage("--levels and --fanout must be positive"));
            }
            let instance = gen_gap(*levels, *fanout).map_err(|e| match e {
                GapError::BudgetExceeded { .. } => Failure::budget(e.to_string()),
            })?;
            Ok((instance, output.clone()))
        }
        GenCmd::Toycar { durations, output } => {
            let mut overrides: BTreeMap<ActionId, u32> = BTreeMap::new();
            for entry in durations {
                let (name, value) = entry.split_once('=').ok_or_else(|| {
                    Failure::usage(format!("--duration {entry:?} is not NAME=UNITS"))
                })?;
                let value: u32 = value.trim().parse().map_err(|_| {
                    Failure::usage(format!("--duration {entry:?}: bad unit count"))
                })?;
                overrides.insert(ActionId::new(name.trim()), value);
            }
            let instance = gen_toy_car(&overrides).map_err(|e| match e {
                ToyCarError::UnknownActionName(_) => Failure::usage(e.to_string()),
            })?;
            Ok((instance, output.clone()))
        }
    }
}
