use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use repairshop::budget::BudgetSpec;
use repairshop::io::read_instance;
use repairshop::lbbd::PlannedOp;
use repairshop::model::Time;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::{FileConfig, Resolver};
use crate::error::{exit, CliError};
use crate::output::{json, write_with_sidecar};
use crate::solver::{self, Solver};

pub const SOLUTION_VERSION: &str = "repairshop-solution/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Lbbd,
    Oracle,
    Dispatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Basic,
    Tight,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Instance document.
    instance: PathBuf,
    #[arg(long, value_enum)]
    solver: Option<Kind>,
    /// Master relaxation of the decomposition.
    #[arg(long, value_enum)]
    variant: Option<Variant>,
    /// Seed the decomposition with the dispatch objective.
    #[arg(long, num_args = 0..=1, require_equals = true, default_missing_value = "true")]
    hybrid: Option<bool>,
    /// Place operations as late as their due dates allow.
    #[arg(long, num_args = 0..=1, require_equals = true, default_missing_value = "true")]
    late: Option<bool>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    budget: Option<f64>,
    /// Solution file [default: <instance>.solution.json].
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct SolutionDoc {
    version: &'static str,
    instance_id: String,
    solver: String,
    status: &'static str,
    objective: Option<u32>,
    iterations: Option<u32>,
    cuts_added: Option<u32>,
    /// Per job: due-date index, the last one meaning no wave in the horizon.
    due_index: Option<Vec<usize>>,
    /// Per job: due date, or null for no wave in the horizon.
    due_date: Option<Vec<Option<Time>>>,
    /// Aircraft flown per type and wave.
    flown: Option<Vec<Vec<u32>>>,
    ops: Vec<PlannedOp>,
    ready: Vec<Time>,
    config: Map<String, Value>,
}

pub fn instance_id(path: &Path) -> String {
    path.file_stem().and_then(|s| s.to_str()).unwrap_or("instance").to_string()
}

pub fn run(args: SolveArgs, file: &FileConfig) -> Result<u8, CliError> {
    let mut r = Resolver::new(file, "solve");
    r.pick("instance", Some(args.instance.clone()), PathBuf::new())?;
    let kind = r.pick("solver", args.solver, Kind::Lbbd)?;
    let variant = r.pick("variant", args.variant, Variant::Tight)?;
    let hybrid = r.pick("hybrid", args.hybrid, false)?;
    let late = r.pick("late", args.late, false)?;
    let budget = r.pick("budget", args.budget, 600.0)?;
    let seed = r.seed(args.seed)?;
    let default_out = args.instance.with_extension("solution.json");
    let out = r.pick("out", args.out, default_out)?;
    let config = r.finish();
    if !(budget > 0.0) {
        return Err(CliError::Usage("`budget` must be positive".into()));
    }

    let mut label = match (kind, variant) {
        (Kind::Lbbd, Variant::Tight) => "lbbd-tight".to_string(),
        (Kind::Lbbd, Variant::Basic) => "lbbd-basic".to_string(),
        (Kind::Oracle, _) => "oracle".to_string(),
        (Kind::Dispatch, _) => "dispatch".to_string(),
    };
    if hybrid && kind == Kind::Lbbd {
        label.push_str("+hybrid");
    }
    if late && kind != Kind::Dispatch {
        label.push_str("-late");
    }
    let solver = Solver::parse(&label)?;
    let instance = read_instance(&args.instance).map_err(|e| CliError::Invalid(format!("{}: {e}", args.instance.display())))?;
    let outcome = solver::run(&instance, &solver, &BudgetSpec::seconds(budget))?;

    let dates = instance.due_dates();
    let plan = outcome.plan.clone();
    let doc = SolutionDoc {
        version: SOLUTION_VERSION,
        instance_id: instance_id(&args.instance),
        solver: solver.label(),
        status: outcome.status,
        objective: outcome.objective,
        iterations: outcome.iterations,
        cuts_added: outcome.cuts,
        due_index: outcome.assignment.as_ref().map(|a| a.due_index.clone()),
        due_date: outcome
            .assignment
            .as_ref()
            .map(|a| a.due_index.iter().map(|&i| (!dates.is_b(i)).then(|| dates.date(i))).collect()),
        flown: outcome.flown.clone(),
        ops: plan.as_ref().map(|p| p.ops.clone()).unwrap_or_default(),
        ready: plan.map(|p| p.ready).unwrap_or_default(),
        config: config.clone(),
    };
    write_with_sidecar(&out, &json(&doc), seed, None, &config)?;

    println!("solver: {}", doc.solver);
    println!("status: {}", doc.status);
    match doc.objective {
        Some(v) => println!("objective: {v}"),
        None => println!("objective: none"),
    }
    if let Some(i) = doc.iterations {
        println!("iterations: {i}");
    }
    if let Some(c) = doc.cuts_added {
        println!("cuts: {c}");
    }
    match outcome.split {
        Some((m, s)) => println!("time: {:.3} ms (master {m:.1}%, sub {s:.1}%)", outcome.runtime_ms),
        None => println!("time: {:.3} ms", outcome.runtime_ms),
    }
    println!("solution: {}", out.display());

    Ok(match outcome.status {
        "timeout" => exit::TIMEOUT,
        "infeasible" => exit::USAGE,
        _ => exit::OK,
    })
}
