//! Command-line front end for the relevance engine.
//!
//! Every subcommand reads models and constraint sets from files, prints a
//! deterministic report (one JSON document under `--json`) and exits 0
//! for a positive answer, 1 for a negative one and 2 on usage or input
//! errors. Output is canonicalized, so identical inputs give
//! byte-identical stdout regardless of `--jobs`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num::rational::Ratio;
use serde_json::{json, Value};

use relcalc::fragments::{find_fragment, is_fragment, witness_model, Fragment, FragmentError};
use relcalc::generate::{generate_model, GenParams, ModelKind};
use relcalc::identify::{
    identified_graph, path_obligations, rank_options, recursiveness_test, InfoOption, RecVerdict,
    DEFAULT_MAX_EXTENSIONS,
};
use relcalc::language::{
    parse_formula, parse_formula_set, parse_formula_set_with_sig, Literal,
};
use relcalc::scm::{model_from_json, model_to_json, Assignment, Digraph};
use relcalc::semantics::{theory_literals, Evaluator};
use relcalc::{AxiomSystem, Calculus, CausalModel, Formula, Signature, VarId, VarSet};

const VERSION_LINE: &str =
    concat!(env!("CARGO_PKG_VERSION"), " (model format 1, options format 1, fragment format 1)");

#[derive(Parser)]
#[command(
    name = "relcalc",
    version = VERSION_LINE,
    about = "Deductive engine for irrelevance claims over functional causal models"
)]
struct Cli {
    /// Print one JSON document instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for parallel evaluation (defaults to all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

/// Constraint-set input shared by the calculus-facing subcommands.
#[derive(Args)]
struct GammaArgs {
    /// Constraint-set file: one formula per line, `#` starts a comment.
    #[arg(long)]
    gamma: PathBuf,
    /// Comma-separated variable universe (default: the names appearing in
    /// the inputs, naturally sorted).
    #[arg(long)]
    vars: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a formula against a model's semantics.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
    },
    /// Print every literal of the model's theory, one per line.
    Theory {
        #[arg(long)]
        model: PathBuf,
    },
    /// Compute a potential response under an intervention.
    Respond {
        #[arg(long)]
        model: PathBuf,
        /// Intervention, e.g. "X1=0,X2=1" (may be empty).
        #[arg(long, default_value = "")]
        r#do: String,
        /// Context name (defaults to the model's only context).
        #[arg(long)]
        ctx: Option<String>,
        /// Comma-separated variables to report (default: all others).
        #[arg(long)]
        target: Option<String>,
    },
    /// Classify a model: NotUniq, UniqOnly, Recursive or StrongRecursive.
    Classify {
        #[arg(long)]
        model: PathBuf,
    },
    /// Decide whether a constraint set has an extension.
    Consistent {
        #[command(flatten)]
        gamma: GammaArgs,
        #[arg(long, value_parser = AxiomSystem::from_str)]
        system: AxiomSystem,
        /// Also print the witnessing extension's literals.
        #[arg(long)]
        emit_extension: bool,
    },
    /// Decide whether a constraint set entails a formula.
    Derive {
        #[command(flatten)]
        gamma: GammaArgs,
        #[arg(long, value_parser = AxiomSystem::from_str)]
        system: AxiomSystem,
        #[arg(long)]
        formula: String,
        /// On failure, also print a counterexample extension.
        #[arg(long)]
        emit_extension: bool,
    },
    /// Print a semantic graph (of a model) or a syntactic graph (of the
    /// canonical first extension of a constraint set).
    Graph {
        #[arg(long, conflicts_with = "gamma")]
        model: Option<PathBuf>,
        #[arg(long, requires = "system")]
        gamma: Option<PathBuf>,
        #[arg(long)]
        vars: Option<String>,
        #[arg(long, value_parser = AxiomSystem::from_str)]
        system: Option<AxiomSystem>,
        /// Restrict a semantic graph to one context (default: union).
        #[arg(long)]
        ctx: Option<String>,
        /// Emit Graphviz syntax instead of plain edge lines.
        #[arg(long)]
        dot: bool,
    },
    /// Construct a model satisfying a consistent constraint set.
    Witness {
        #[command(flatten)]
        gamma: GammaArgs,
        #[arg(long, value_parser = AxiomSystem::from_str)]
        system: AxiomSystem,
    },
    /// Find or check a graph certificate for one negative literal.
    Fragment {
        #[command(subcommand)]
        cmd: FragmentCmd,
    },
    /// Intersect the syntactic graphs of every extension.
    Identify {
        #[command(flatten)]
        gamma: GammaArgs,
        #[arg(long, value_parser = AxiomSystem::from_str)]
        system: AxiomSystem,
        /// Abort (exit 2) past this many extensions instead of truncating.
        #[arg(long, default_value_t = DEFAULT_MAX_EXTENSIONS)]
        max_extensions: usize,
        #[arg(long)]
        dot: bool,
        /// Print the route obligations of the negative literals instead.
        #[arg(long)]
        obligations: bool,
    },
    /// Rank information options by cost per newly identified edge.
    Rank {
        #[command(flatten)]
        gamma: GammaArgs,
        /// JSON file: [{"formulas": ["..."], "cost": number}, ...].
        #[arg(long)]
        options: PathBuf,
        #[arg(long, value_parser = AxiomSystem::from_str)]
        system: AxiomSystem,
        #[arg(long, default_value_t = DEFAULT_MAX_EXTENSIONS)]
        max_extensions: usize,
    },
    /// Necessary recursiveness test for a constraint set.
    Rectest {
        #[command(flatten)]
        gamma: GammaArgs,
    },
    /// Generate a seeded random model and print it as JSON.
    Gen {
        #[arg(long, value_parser = ModelKind::from_str)]
        kind: ModelKind,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        domain: usize,
        #[arg(long, default_value_t = 1)]
        contexts: usize,
        #[arg(long, default_value_t = 2)]
        max_parents: usize,
    },
}

#[derive(Subcommand)]
enum FragmentCmd {
    /// Search the canonical first extension for a certificate.
    Find {
        #[command(flatten)]
        gamma: GammaArgs,
        #[arg(long, value_parser = AxiomSystem::from_str, default_value = "srec")]
        system: AxiomSystem,
        /// Anchor atom, e.g. "irr(X1; X4; )".
        #[arg(long)]
        atom: String,
    },
    /// Validate a certificate file against the first extension.
    Check {
        #[command(flatten)]
        gamma: GammaArgs,
        #[arg(long, value_parser = AxiomSystem::from_str, default_value = "srec")]
        system: AxiomSystem,
        /// Certificate file as printed by `fragment find`.
        #[arg(long)]
        fragment: PathBuf,
    },
}

/// What a subcommand wants printed, in both output modes.
struct Report {
    no: bool,
    text: String,
    json: Value,
}

impl Report {
    fn yes(text: impl Into<String>, json: Value) -> Report {
        Report { no: false, text: text.into(), json }
    }

    fn no(text: impl Into<String>, json: Value) -> Report {
        Report { no: true, text: text.into(), json }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // results are merged in canonical order, so the pool size never
        // changes output
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
    }
    match run(cli.cmd) {
        Ok(report) => {
            let payload =
                if cli.json { format!("{:#}", report.json) } else { report.text.clone() };
            if !payload.is_empty() && !emit(&payload) {
                return ExitCode::from(2);
            }
            if report.no {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Prints one line-terminated payload. A closed pipe is the reader's
/// choice, not a failure, so it keeps the report's own exit code.
fn emit(payload: &str) -> bool {
    use std::io::Write;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match writeln!(out, "{payload}").and_then(|()| out.flush()) {
        Ok(()) => true,
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => true,
        Err(e) => {
            eprintln!("error: cannot write output: {e}");
            false
        }
    }
}

fn run(cmd: Cmd) -> Result<Report, String> {
    match cmd {
        Cmd::Eval { model, formula } => {
            let m = load_model(&model)?;
            let f = parse_formula(&formula, m.sig()).map_err(|e| e.to_string())?;
            let value = Evaluator::new(&m).satisfies(&f).map_err(|e| e.to_string())?;
            let doc = json!({ "value": value });
            Ok(if value { Report::yes("true", doc) } else { Report::no("false", doc) })
        }
        Cmd::Theory { model } => {
            let m = load_model(&model)?;
            let th = theory_literals(&m).map_err(|e| e.to_string())?;
            let lines: Vec<String> = th.literals().map(|l| l.render(m.sig())).collect();
            Ok(Report::yes(lines.join("\n"), json!({ "literals": lines })))
        }
        Cmd::Respond { model, r#do, ctx, target } => {
            let m = load_model(&model)?;
            let x = parse_point(&r#do, m.sig())?;
            let ctx = match ctx {
                Some(c) => c,
                None if m.contexts().len() == 1 => m.contexts()[0].clone(),
                None => return Err("the model has several contexts; pass --ctx".into()),
            };
            let targets = match target {
                Some(list) => parse_var_list(&list, m.sig())?,
                None => VarSet::from_iter(m.sig().vars().filter(|&v| x.get(v).is_none())),
            };
            let resp = m.potential_response(&x, targets, &ctx).map_err(|e| e.to_string())?;
            let mut lines = Vec::new();
            let mut map = serde_json::Map::new();
            for (v, val) in resp.iter() {
                let value = m.sig().domain_value(v, val);
                lines.push(format!("{}={}", m.sig().name(v), value));
                map.insert(m.sig().name(v).to_string(), Value::String(value.to_string()));
            }
            Ok(Report::yes(lines.join("\n"), json!({ "response": map })))
        }
        Cmd::Classify { model } => {
            let m = load_model(&model)?;
            let class = m.classify().map_err(|e| e.to_string())?;
            Ok(Report::yes(class.to_string(), json!({ "class": class.to_string() })))
        }
        Cmd::Consistent { gamma, system, emit_extension } => {
            let (calc, formulas) = load_gamma(&gamma, &[])?;
            match calc.consistent(&formulas, system).map_err(|e| e.to_string())? {
                Some(e) => {
                    let mut text = String::from("consistent");
                    let mut doc = json!({ "consistent": true });
                    if emit_extension {
                        let lines = literal_lines(e.literals(), calc.space().sig());
                        text.push('\n');
                        text.push_str(&lines.join("\n"));
                        doc["extension"] = json!(lines);
                    }
                    Ok(Report::yes(text, doc))
                }
                None => Ok(Report::no("inconsistent", json!({ "consistent": false }))),
            }
        }
        Cmd::Derive { gamma, system, formula, emit_extension } => {
            let (calc, formulas) = load_gamma(&gamma, &[&formula])?;
            let phi = parse_formula(&formula, calc.space().sig()).map_err(|e| e.to_string())?;
            if calc.derives(&formulas, &phi, system).map_err(|e| e.to_string())? {
                Ok(Report::yes("derivable", json!({ "derivable": true })))
            } else {
                let mut text = String::from("not derivable");
                let mut doc = json!({ "derivable": false });
                if emit_extension {
                    if let Some(e) =
                        calc.counterexample(&formulas, &phi, system).map_err(|e| e.to_string())?
                    {
                        let lines = literal_lines(e.literals(), calc.space().sig());
                        text.push('\n');
                        text.push_str(&lines.join("\n"));
                        doc["counterexample"] = json!(lines);
                    }
                }
                Ok(Report::no(text, doc))
            }
        }
        Cmd::Graph { model, gamma, vars, system, ctx, dot } => match (model, gamma) {
            (Some(path), None) => {
                let m = load_model(&path)?;
                let g = m.semantic_graph(ctx.as_deref()).map_err(|e| e.to_string())?;
                Ok(graph_report(&g, m.sig(), dot))
            }
            (None, Some(path)) => {
                let args = GammaArgs { gamma: path, vars };
                let (calc, formulas) = load_gamma(&args, &[])?;
                let sys = system.expect("clap enforces --system with --gamma");
                match calc.consistent(&formulas, sys).map_err(|e| e.to_string())? {
                    Some(e) => Ok(graph_report(&e.syntactic_graph(), calc.space().sig(), dot)),
                    None => Ok(Report::no("inconsistent", json!({ "consistent": false }))),
                }
            }
            _ => Err("pass exactly one of --model or --gamma".into()),
        },
        Cmd::Witness { gamma, system } => {
            let (calc, formulas) = load_gamma(&gamma, &[])?;
            match witness_model(&calc, &formulas, system) {
                Ok(m) => {
                    let text = model_to_json(&m);
                    let doc: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
                    Ok(Report::yes(text, doc))
                }
                Err(FragmentError::Inconsistent(_)) => {
                    Ok(Report::no("inconsistent", json!({ "consistent": false })))
                }
                Err(e) => Err(e.to_string()),
            }
        }
        Cmd::Fragment { cmd } => run_fragment(cmd),
        Cmd::Identify { gamma, system, max_extensions, dot, obligations } => {
            let (calc, formulas) = load_gamma(&gamma, &[])?;
            let sig = calc.space().sig();
            if obligations {
                let obs = path_obligations(&formulas);
                let lines: Vec<String> = obs
                    .iter()
                    .map(|o| {
                        format!(
                            "path from {{{}}} to {{{}}} avoiding {{{}}}",
                            sig.render_set(o.sources),
                            sig.render_set(o.targets),
                            sig.render_set(o.avoid)
                        )
                    })
                    .collect();
                let docs: Vec<Value> = obs
                    .iter()
                    .map(|o| {
                        json!({
                            "sources": set_names(o.sources, sig),
                            "targets": set_names(o.targets, sig),
                            "avoid": set_names(o.avoid, sig),
                        })
                    })
                    .collect();
                return Ok(Report::yes(lines.join("\n"), json!({ "obligations": docs })));
            }
            let g = identified_graph(&calc, &formulas, system, max_extensions)
                .map_err(|e| e.to_string())?;
            Ok(graph_report(&g, sig, dot))
        }
        Cmd::Rank { gamma, options, system, max_extensions } => {
            let options_text = read_file(&options)?;
            let raw = parse_options_doc(&options_text)?;
            let formula_texts: Vec<&str> =
                raw.iter().flat_map(|(fs, _)| fs.iter().map(String::as_str)).collect();
            let (calc, formulas) = load_gamma(&gamma, &formula_texts)?;
            let sig = calc.space().sig();
            let opts = raw
                .iter()
                .map(|(fs, cost)| {
                    let parsed = fs
                        .iter()
                        .map(|s| parse_formula(s, sig))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| e.to_string())?;
                    Ok(InfoOption { formulas: parsed, cost: *cost })
                })
                .collect::<Result<Vec<_>, String>>()?;
            let ranked = rank_options(&calc, &formulas, &opts, system, max_extensions)
                .map_err(|e| e.to_string())?;
            let lines: Vec<String> =
                ranked.iter().map(|(i, c)| format!("option {}: {}", i + 1, c)).collect();
            let docs: Vec<Value> = ranked
                .iter()
                .map(|(i, c)| json!({ "option": i + 1, "cost": c.to_string() }))
                .collect();
            Ok(Report::yes(lines.join("\n"), json!({ "ranking": docs })))
        }
        Cmd::Rectest { gamma } => {
            let (calc, formulas) = load_gamma(&gamma, &[])?;
            let verdict = recursiveness_test(&calc, &formulas).map_err(|e| e.to_string())?;
            let doc = json!({ "verdict": verdict.to_string() });
            Ok(match verdict {
                RecVerdict::PossiblyRecursive => Report::yes(verdict.to_string(), doc),
                RecVerdict::NonRecursive => Report::no(verdict.to_string(), doc),
            })
        }
        Cmd::Gen { kind, seed, n, domain, contexts, max_parents } => {
            let params = GenParams { kind, n, domain, contexts, max_parents };
            let m = generate_model(&params, seed).map_err(|e| e.to_string())?;
            let text = model_to_json(&m);
            let doc: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            Ok(Report::yes(text, doc))
        }
    }
}

fn run_fragment(cmd: FragmentCmd) -> Result<Report, String> {
    match cmd {
        FragmentCmd::Find { gamma, system, atom } => {
            let (calc, formulas) = load_gamma(&gamma, &[&atom])?;
            let sig = calc.space().sig().clone();
            let (x, y, z) = parse_anchor(&atom, &sig)?;
            let Some(e) = calc.consistent(&formulas, system).map_err(|e| e.to_string())? else {
                return Ok(Report::no("inconsistent", json!({ "consistent": false })));
            };
            match find_fragment(&e, x, y, z) {
                Some(f) => {
                    let doc = json!({
                        "anchor": f.anchor_atom().render(&sig),
                        "edges": f.graph().edges().iter()
                            .map(|&(a, b)| json!([sig.name(a), sig.name(b)]))
                            .collect::<Vec<_>>(),
                        "path": f.path().iter().map(|&v| sig.name(v)).collect::<Vec<_>>(),
                    });
                    Ok(Report::yes(f.render().trim_end().to_string(), doc))
                }
                None => Ok(Report::no("no fragment", json!({ "fragment": Value::Null }))),
            }
        }
        FragmentCmd::Check { gamma, system, fragment } => {
            let fragment_text = read_file(&fragment)?;
            let (calc, formulas) = load_gamma(&gamma, &[])?;
            let sig = calc.space().sig();
            let f = Fragment::parse(&fragment_text, sig).map_err(|e| e.to_string())?;
            let Some(e) = calc.consistent(&formulas, system).map_err(|e| e.to_string())? else {
                return Ok(Report::no("inconsistent", json!({ "consistent": false })));
            };
            let (x, y, z) = f.anchor();
            let valid = is_fragment(f.graph(), &e, x, y, z);
            let doc = json!({ "valid": valid });
            Ok(if valid { Report::yes("valid", doc) } else { Report::no("invalid", doc) })
        }
    }
}

fn read_file(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn load_model(path: &Path) -> Result<CausalModel, String> {
    model_from_json(&read_file(path)?).map_err(|e| e.to_string())
}

/// Loads a constraint set, fixing the variable universe either from
/// `--vars` or by naturally sorting every name in the inputs, so that
/// canonical orderings do not depend on order of first appearance.
fn load_gamma(args: &GammaArgs, extra_texts: &[&str]) -> Result<(Calculus, Vec<Formula>), String> {
    let text = read_file(&args.gamma)?;
    let names: Vec<String> = match &args.vars {
        Some(list) => list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect(),
        None => {
            let mut combined = text.clone();
            for t in extra_texts {
                combined.push('\n');
                combined.push_str(t);
            }
            let parsed = parse_formula_set(&combined).map_err(|e| e.to_string())?;
            let mut names: Vec<String> =
                parsed.sig.vars().map(|v| parsed.sig.name(v).to_string()).collect();
            names.sort_by_key(|n| natural_key(n));
            names
        }
    };
    let sig = Signature::new(names.into_iter().map(|n| (n, vec!["0".into(), "1".into()])).collect())
        .map_err(|e| e.to_string())?;
    let formulas = parse_formula_set_with_sig(&text, &sig).map_err(|e| e.to_string())?;
    Ok((Calculus::new(sig), formulas))
}

/// Sort key putting "X2" before "X10": the non-digit stem, then the
/// numeric suffix, then the raw name as a tie-breaker.
fn natural_key(s: &str) -> (String, u64, String) {
    let stem = s.trim_end_matches(|c: char| c.is_ascii_digit());
    let num = s[stem.len()..].parse().unwrap_or(0);
    (stem.to_string(), num, s.to_string())
}

fn parse_point(text: &str, sig: &Signature) -> Result<Assignment, String> {
    let mut pairs = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| format!("bad assignment `{part}` (expected Name=value)"))?;
        let v = var_named(name.trim(), sig)?;
        let value = value.trim();
        let idx = sig
            .domain(v)
            .iter()
            .position(|d| d == value)
            .ok_or_else(|| format!("value `{value}` is not in {}'s domain", sig.name(v)))?;
        pairs.push((v, idx as u8));
    }
    Ok(Assignment::new(pairs))
}

fn parse_var_list(text: &str, sig: &Signature) -> Result<VarSet, String> {
    let mut set = VarSet::EMPTY;
    for name in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        set.insert(var_named(name, sig)?);
    }
    Ok(set)
}

fn var_named(name: &str, sig: &Signature) -> Result<VarId, String> {
    sig.var_id(name).ok_or_else(|| format!("unknown variable `{name}`"))
}

/// The anchor flag must be one positive atom with singleton end sets.
fn parse_anchor(text: &str, sig: &Signature) -> Result<(VarId, VarId, VarSet), String> {
    let f = parse_formula(text, sig).map_err(|e| e.to_string())?;
    let lit = f
        .as_literal()
        .filter(|l| l.positive)
        .ok_or("the anchor must be a plain atom, e.g. \"irr(X1; X4; )\"")?;
    let a = lit.atom;
    if a.x().len() != 1 || a.y().len() != 1 {
        return Err("the anchor's first two sets must be single variables".into());
    }
    let x = a.x().iter().next().expect("nonempty");
    let y = a.y().iter().next().expect("nonempty");
    Ok((x, y, a.z()))
}

fn literal_lines(lits: impl Iterator<Item = Literal>, sig: &Signature) -> Vec<String> {
    lits.map(|l| l.render(sig)).collect()
}

fn set_names(s: VarSet, sig: &Signature) -> Vec<String> {
    s.iter().map(|v| sig.name(v).to_string()).collect()
}

fn graph_report(g: &Digraph, sig: &Signature, dot: bool) -> Report {
    let text = if dot { dot_format(g, sig) } else { g.render_edges(sig) };
    let edges: Vec<Value> =
        g.edges().iter().map(|&(a, b)| json!([sig.name(a), sig.name(b)])).collect();
    Report::yes(text, json!({ "edges": edges }))
}

fn dot_format(g: &Digraph, sig: &Signature) -> String {
    let mut out = String::from("digraph g {\n");
    for v in sig.vars() {
        let _ = writeln!(out, "  {};", sig.name(v));
    }
    for (a, b) in g.edges() {
        let _ = writeln!(out, "  {} -> {};", sig.name(a), sig.name(b));
    }
    out.push('}');
    out
}

/// Options file: a JSON array of {"formulas": [string], "cost": number}.
fn parse_options_doc(text: &str) -> Result<Vec<(Vec<String>, Ratio<i64>)>, String> {
    let doc: Value = serde_json::from_str(text).map_err(|e| format!("bad options file: {e}"))?;
    let arr = doc.as_array().ok_or("the options file must be a JSON array")?;
    let mut out = Vec::with_capacity(arr.len());
    for (i, item) in arr.iter().enumerate() {
        let formulas = item
            .get("formulas")
            .and_then(Value::as_array)
            .ok_or(format!("option {}: missing \"formulas\" array", i + 1))?
            .iter()
            .map(|v| {
                v.as_str()
                    .map(str::to_string)
                    .ok_or(format!("option {}: formulas must be strings", i + 1))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let cost = item.get("cost").ok_or(format!("option {}: missing \"cost\"", i + 1))?;
        out.push((formulas, parse_cost(cost, i)?));
    }
    Ok(out)
}

fn parse_cost(v: &Value, i: usize) -> Result<Ratio<i64>, String> {
    let cost = if let Some(n) = v.as_i64() {
        Ratio::from_integer(n)
    } else if let Some(f) = v.as_f64() {
        Ratio::approximate_float(f)
            .ok_or(format!("option {}: cost {f} is not representable", i + 1))?
    } else {
        return Err(format!("option {}: cost must be a number", i + 1));
    };
    if cost < Ratio::from_integer(0) {
        return Err(format!("option {}: cost must be non-negative", i + 1));
    }
    Ok(cost)
}
