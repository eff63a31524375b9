//! Command-line front end: load models and formulas, evaluate, enumerate
//! solutions, apply model surgery, run axiom sweeps, and compute exact
//! counterfactual probabilities.
//!
//! Exit status: 0 on success (a formula evaluating to `false` is a result,
//! not an error), 2 on usage or input-syntax errors, 3 on model validation
//! errors, 4 on semantic precondition errors (e.g. a world that is not a
//! solution of the model).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{ArgAction, Args, Parser, Subcommand};
use serde_json::json;

use nsem::axioms::{self, AxiomId, Budget, Mode, SweepConfig};
use nsem::format::{
    self, compile_cbn, compile_model, compile_pmodel, parse_assignment_text, ModelFile, PModelFile,
};
use nsem::formula::Intervention;
use nsem::model::{Model, PartialWorld, World};
use nsem::parse;
use nsem::prob::{induce_cbn, Cbn, PModel};
use nsem::semantics::{actualized_refinement, intervene, satisfies, Setting};
use nsem::signature::Signature;

#[derive(Parser)]
#[command(name = "nsem", version, about = "Exact reasoning over nondeterministic structural equation models")]
struct Cli {
    /// Emit structured JSON instead of text
    #[arg(long, global = true, action = ArgAction::SetTrue)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file for structural well-formedness
    Validate { model: PathBuf },
    /// Enumerate solutions, optionally restricted to a context
    Solutions {
        model: PathBuf,
        /// Context as `U=0,W=1` (must assign every exogenous variable)
        #[arg(long)]
        context: Option<String>,
    },
    /// Evaluate a causal formula at a world, context, state, or the model
    Eval {
        model: PathBuf,
        #[arg(long)]
        formula: String,
        /// Full world `X=0,Y=1` (must be a solution)
        #[arg(long, conflicts_with_all = ["context", "state"])]
        world: Option<String>,
        /// Context `U=0` (quantifies over the solutions extending it)
        #[arg(long, conflicts_with = "state")]
        context: Option<String>,
        /// State `X=0,Y=1` (quantifies over the contexts completing it)
        #[arg(long)]
        state: Option<String>,
    },
    /// Print the actualized refinement of a model at a solution world
    Refine {
        model: PathBuf,
        #[arg(long)]
        world: String,
    },
    /// Print the intervened model
    Intervene {
        model: PathBuf,
        /// Intervention as `Y=1,X=0`
        #[arg(long = "do")]
        intervention: String,
    },
    /// Check axiom schemas against a model or a seeded random corpus
    Axioms(AxiomsArgs),
    /// Exact counterfactual probability in a probabilistic model
    Prob {
        pmodel: PathBuf,
        /// Observed world (must have positive probability)
        #[arg(long)]
        world: String,
        /// Intervention as `T=1`; empty means none
        #[arg(long = "do", default_value = "")]
        intervention: String,
        /// Basic formula whose counterfactual probability is computed
        #[arg(long)]
        phi: String,
    },
    /// Counterfactual distribution in a causal Bayesian network
    Cbn {
        /// Probabilistic model file; exogenous-free unless --induce is given
        pmodel: PathBuf,
        /// Marginalize exogenous variables out first
        #[arg(long, action = ArgAction::SetTrue)]
        induce: bool,
        /// Observed state as `T=0,H=0` (must be in the support)
        #[arg(long)]
        state: String,
        /// Intervention as `T=1`; empty means none
        #[arg(long = "do", default_value = "")]
        intervention: String,
    },
}

#[derive(Args)]
struct AxiomsArgs {
    /// Model file to check; omit to sweep the reference + random corpus
    model: Option<PathBuf>,
    /// Number of random models to generate
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// cf (counterfactual), iv (interventionist), or both
    #[arg(long, default_value = "both")]
    mode: String,
    /// Comma-separated axiom ids; default is all of D0..D10c
    #[arg(long)]
    axioms: Option<String>,
    #[arg(long, default_value_t = 1)]
    max_exogenous: usize,
    #[arg(long, default_value_t = 3)]
    max_endogenous: usize,
    #[arg(long, default_value_t = 3)]
    max_range: usize,
    #[arg(long, default_value_t = 2)]
    max_parents: usize,
    #[arg(long, default_value_t = 0.5)]
    nondeterminism: f64,
    /// Cap on instances per axiom per model
    #[arg(long, default_value_t = Budget::default().max_instances)]
    max_instances: usize,
}

enum CliError {
    Usage(String),
    Validation(String),
    Precondition(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Precondition(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Precondition(m) => m,
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { model } => {
            let file = read_model_file(&model)?;
            let report = format::validate_model_file(&file);
            if cli.json {
                let violations: Vec<String> =
                    report.violations().iter().map(|v| v.to_string()).collect();
                println!(
                    "{}",
                    pretty(&json!({"valid": report.is_empty(), "violations": violations}))
                );
            } else {
                println!("{report}");
            }
            if report.is_empty() {
                Ok(())
            } else {
                Err(CliError::Validation(format!(
                    "{} violation(s) found",
                    report.violations().len()
                )))
            }
        }
        Command::Solutions { model, context } => {
            let m = load_model(&model)?;
            let sig = m.signature();
            let ctx = context.map(|text| parse_context(sig, &text)).transpose()?;
            let worlds = m.solutions_matching(ctx.as_ref());
            if cli.json {
                let list: Vec<serde_json::Value> =
                    worlds.iter().map(|w| format::world_to_json(sig, w)).collect();
                println!("{}", pretty(&json!({"worlds": list})));
            } else {
                for w in &worlds {
                    println!("{}", w.display(sig));
                }
            }
            Ok(())
        }
        Command::Eval { model, formula, world, context, state } => {
            let m = load_model(&model)?;
            let sig = m.signature();
            let parsed = parse::parse(&formula, sig).map_err(usage)?;
            let f = match parsed {
                parse::Parsed::Causal(f) => f,
                parse::Parsed::Prob(_) => {
                    return Err(CliError::Usage(
                        "eval takes a plain causal formula; use `prob` for probability queries"
                            .to_string(),
                    ))
                }
            };
            let (setting, level_desc, setting_json) = build_setting(&m, world, context, state)?;
            let result = satisfies(&setting, &f);
            if cli.json {
                println!(
                    "{}",
                    pretty(&json!({
                        "result": result,
                        "level": setting_json,
                        "formula": f.print(sig),
                    }))
                );
            } else {
                println!("{result}");
                println!("level: {level_desc}");
            }
            Ok(())
        }
        Command::Refine { model, world } => {
            let m = load_model(&model)?;
            let w = parse_world(m.signature(), &world)?;
            let refined = actualized_refinement(&m, &w)
                .map_err(|e| CliError::Precondition(e.to_string()))?;
            print_model(&refined);
            Ok(())
        }
        Command::Intervene { model, intervention } => {
            let m = load_model(&model)?;
            let iv = parse_intervention(m.signature(), &intervention)?;
            print_model(&intervene(&m, &iv));
            Ok(())
        }
        Command::Axioms(args) => run_axioms(args, cli.json),
        Command::Prob { pmodel, world, intervention, phi } => {
            let pm = load_pmodel(&pmodel)?;
            let sig = pm.signature();
            let w = parse_world(sig, &world)?;
            let iv = parse_intervention(sig, &intervention)?;
            let phi = parse::parse_basic(&phi, sig).map_err(usage)?;
            let p = pm
                .counterfactual_probability(&w, &iv, &phi)
                .map_err(|e| CliError::Precondition(e.to_string()))?;
            let decimal = rational_to_f64(&p);
            if cli.json {
                println!(
                    "{}",
                    pretty(&json!({"probability": p.to_string(), "decimal": decimal}))
                );
            } else {
                println!("{p} ({decimal})");
            }
            Ok(())
        }
        Command::Cbn { pmodel, induce, state, intervention } => {
            let cbn = load_cbn(&pmodel, induce)?;
            let sig = cbn.signature();
            let observed = parse_world(sig, &state)?;
            let iv = parse_intervention(sig, &intervention)?;
            let dist = cbn
                .counterfactual(&observed, &iv)
                .map_err(|e| CliError::Precondition(e.to_string()))?;
            if cli.json {
                let endo = sig.endogenous();
                let entries: Vec<serde_json::Value> = dist
                    .entries()
                    .map(|(key, p)| {
                        let mut state = serde_json::Map::new();
                        for (&v, &ix) in endo.iter().zip(key.iter()) {
                            state.insert(
                                sig.name(v).to_string(),
                                serde_json::to_value(sig.value(v, ix)).expect("values serialize"),
                            );
                        }
                        json!({"state": state, "prob": p.to_string()})
                    })
                    .collect();
                println!("{}", pretty(&json!({"distribution": entries})));
            } else {
                print!("{}", dist.display(sig));
            }
            Ok(())
        }
    }
}

fn run_axioms(args: AxiomsArgs, as_json: bool) -> Result<(), CliError> {
    let modes = match args.mode.as_str() {
        "both" => vec![Mode::Counterfactual, Mode::Interventionist],
        other => vec![Mode::from_str(other).map_err(CliError::Usage)?],
    };
    let axiom_ids = match &args.axioms {
        None => AxiomId::ALL.to_vec(),
        Some(list) => list
            .split(',')
            .map(|s| AxiomId::from_str(s).map_err(CliError::Usage))
            .collect::<Result<Vec<_>, _>>()?,
    };
    let budget = Budget { max_instances: args.max_instances, ..Budget::default() };

    let summary = match &args.model {
        Some(path) => {
            let m = load_model(path)?;
            let label = path.file_name().map_or_else(
                || "model".to_string(),
                |n| n.to_string_lossy().to_string(),
            );
            let mut corpus = vec![(label, m)];
            if let Some(n) = args.random {
                corpus.extend(random_corpus(n, &args));
            }
            axioms::sweep_models(&corpus, &axiom_ids, &modes, &budget, args.seed)
        }
        None => {
            let cfg = SweepConfig {
                axioms: axiom_ids,
                modes,
                models: args.random.unwrap_or(200),
                seed: args.seed,
                max_exogenous: args.max_exogenous,
                max_endogenous: args.max_endogenous,
                max_range: args.max_range,
                max_parents: args.max_parents,
                nondeterminism: args.nondeterminism,
                include_reference_models: true,
                budget,
            };
            axioms::soundness_sweep(&cfg)
        }
    };
    if as_json {
        println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    } else {
        print!("{}", summary.render_text());
    }
    Ok(())
}

fn random_corpus(n: usize, args: &AxiomsArgs) -> Vec<(String, Model)> {
    let cfg = SweepConfig {
        models: n,
        seed: args.seed,
        max_exogenous: args.max_exogenous,
        max_endogenous: args.max_endogenous,
        max_range: args.max_range,
        max_parents: args.max_parents,
        nondeterminism: args.nondeterminism,
        include_reference_models: false,
        ..SweepConfig::default()
    };
    axioms::sweep_corpus(&cfg)
}

// ---------------------------------------------------------------------------
// Loading and parsing helpers
// ---------------------------------------------------------------------------

fn read_to_string(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn read_model_file(path: &PathBuf) -> Result<ModelFile, CliError> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn load_model(path: &PathBuf) -> Result<Model, CliError> {
    let file = read_model_file(path)?;
    compile_model(&file).map_err(|report| {
        CliError::Validation(format!("{} is not a valid model:\n{report}", path.display()))
    })
}

fn read_pmodel_file(path: &PathBuf) -> Result<PModelFile, CliError> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn load_pmodel(path: &PathBuf) -> Result<PModel, CliError> {
    let file = read_pmodel_file(path)?;
    compile_pmodel(&file).map_err(|report| {
        CliError::Validation(format!("{} is not a valid model:\n{report}", path.display()))
    })
}

fn load_cbn(path: &PathBuf, induce: bool) -> Result<Cbn, CliError> {
    if induce {
        let pm = load_pmodel(path)?;
        induce_cbn(&pm).map_err(|e| CliError::Validation(e.to_string()))
    } else {
        let file = read_pmodel_file(path)?;
        compile_cbn(&file).map_err(|report| {
            CliError::Validation(format!("{} is not a usable network:\n{report}", path.display()))
        })
    }
}

fn parse_world(sig: &Signature, text: &str) -> Result<World, CliError> {
    let pairs = parse_assignment_text(text).map_err(CliError::Usage)?;
    World::from_named(sig, pairs.iter().map(|(n, v)| (n.as_str(), v))).map_err(usage)
}

fn parse_context(sig: &Signature, text: &str) -> Result<PartialWorld, CliError> {
    let pairs = parse_assignment_text(text).map_err(CliError::Usage)?;
    PartialWorld::context_from_named(sig, pairs.iter().map(|(n, v)| (n.as_str(), v)))
        .map_err(usage)
}

fn parse_state(sig: &Signature, text: &str) -> Result<PartialWorld, CliError> {
    let pairs = parse_assignment_text(text).map_err(CliError::Usage)?;
    PartialWorld::state_from_named(sig, pairs.iter().map(|(n, v)| (n.as_str(), v))).map_err(usage)
}

fn parse_intervention(sig: &Signature, text: &str) -> Result<Intervention, CliError> {
    let pairs = parse_assignment_text(text).map_err(CliError::Usage)?;
    Intervention::from_named(sig, pairs.iter().map(|(n, v)| (n.as_str(), v))).map_err(usage)
}

fn build_setting<'m>(
    m: &'m Model,
    world: Option<String>,
    context: Option<String>,
    state: Option<String>,
) -> Result<(Setting<'m>, String, serde_json::Value), CliError> {
    let sig = m.signature();
    if let Some(text) = world {
        let w = parse_world(sig, &text)?;
        let desc = format!("world ({})", w.display(sig));
        let js = json!({"world": format::world_to_json(sig, &w)});
        let setting =
            Setting::world(m, w).map_err(|e| CliError::Precondition(e.to_string()))?;
        return Ok((setting, desc, js));
    }
    if let Some(text) = context {
        let ctx = parse_context(sig, &text)?;
        let desc = if sig.exogenous().is_empty() {
            "context (empty)".to_string()
        } else {
            format!("context ({})", ctx.display(sig))
        };
        let js = json!({"context": ctx.display(sig)});
        return Ok((Setting::context(m, ctx), desc, js));
    }
    if let Some(text) = state {
        let st = parse_state(sig, &text)?;
        let desc = format!("state ({})", st.display(sig));
        let js = json!({"state": st.display(sig)});
        return Ok((Setting::state(m, st), desc, js));
    }
    Ok((Setting::model_only(m), "model".to_string(), json!("model")))
}

fn print_model(m: &Model) {
    println!(
        "{}",
        serde_json::to_string_pretty(&format::model_to_file(m)).expect("models serialize")
    );
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON output")
}

fn rational_to_f64(p: &nsem::prob::Rational) -> f64 {
    use num_traits::ToPrimitive;
    p.to_f64().unwrap_or(f64::NAN)
}
