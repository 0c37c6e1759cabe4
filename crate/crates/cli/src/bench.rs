use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use repairshop::budget::BudgetSpec;
use repairshop::io::read_instance;
use repairshop::metrics::mean;
use repairshop::par::par_map;

use crate::config::{FileConfig, Resolver};
use crate::error::CliError;
use crate::output::{ms, num, write_with_sidecar, CsvDoc};
use crate::solve::instance_id;
use crate::solver::{self, Solver};

pub const BENCH_SCHEMA: &str = "repairshop-bench/1";
pub const BENCH_SUMMARY_SCHEMA: &str = "repairshop-bench-summary/1";

const HEADER: &[&str] =
    &["instanceId", "solver", "status", "objective", "iterations", "cutsAdded", "runtimeMs", "masterPct", "subPct", "error"];

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Instance files or directories of them.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Comma-separated solver labels.
    #[arg(long)]
    solvers: Option<String>,
    /// Wall-clock budget per solve in seconds.
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write per-solver means next to the output.
    #[arg(long, num_args = 0..=1, require_equals = true, default_missing_value = "true")]
    summarize: Option<bool>,
    #[arg(long)]
    seed: Option<u64>,
}

/// JSON documents under `inputs`, sorted, without sidecars or solutions.
pub fn collect_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let keep = |p: &Path| {
        let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
        name.ends_with(".json") && !name.ends_with(".provenance.json") && !name.ends_with(".solution.json")
    };
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let entries = std::fs::read_dir(input).map_err(|e| CliError::Usage(format!("cannot list {}: {e}", input.display())))?;
            let mut found: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| keep(p)).collect();
            found.sort();
            files.extend(found);
        } else if input.is_file() {
            files.push(input.clone());
        } else {
            return Err(CliError::Usage(format!("no such input {}", input.display())));
        }
    }
    if files.is_empty() {
        return Err(CliError::Usage("no input documents found".into()));
    }
    Ok(files)
}

struct Row {
    instance: String,
    solver: String,
    status: String,
    objective: Option<u32>,
    iterations: Option<u32>,
    cuts: Option<u32>,
    runtime_ms: f64,
    split: Option<(f64, f64)>,
    error: String,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn run(args: BenchArgs, file: &FileConfig) -> Result<(), CliError> {
    let mut r = Resolver::new(file, "bench");
    let labels = r.pick_list("solvers", args.solvers, "lbbd-tight,oracle,dispatch")?;
    let budget = r.pick("budget", args.budget, 600.0)?;
    let out = r.pick("out", args.out, PathBuf::from("bench.csv"))?;
    let summarize = r.pick("summarize", args.summarize, false)?;
    let seed = r.seed(args.seed)?;
    let files = collect_inputs(&args.inputs)?;
    r.pick("inputs", Some(files.clone()), Vec::new())?;
    let config = r.finish();
    if !(budget > 0.0) {
        return Err(CliError::Usage("`budget` must be positive".into()));
    }
    let solvers: Vec<Solver> = labels.iter().map(|l| Solver::parse(l)).collect::<Result<_, _>>()?;

    let items: Vec<(PathBuf, Solver)> = files.iter().flat_map(|f| solvers.iter().map(move |s| (f.clone(), *s))).collect();
    let spec = BudgetSpec::seconds(budget);
    let rows = par_map(&items, |(path, s)| {
        let base = |status: &str, error: String| Row {
            instance: instance_id(path),
            solver: s.label(),
            status: status.into(),
            objective: None,
            iterations: None,
            cuts: None,
            runtime_ms: 0.0,
            split: None,
            error,
        };
        let instance = match read_instance(path) {
            Ok(i) => i,
            Err(e) => return base("error", e.to_string()),
        };
        match solver::run(&instance, s, &spec) {
            Ok(o) => Row {
                status: o.status.into(),
                objective: o.objective,
                iterations: o.iterations,
                cuts: o.cuts,
                runtime_ms: o.runtime_ms,
                split: o.split,
                ..base("", String::new())
            },
            Err(e) => base("error", e.to_string().replace('\n', "; ")),
        }
    });

    let mut doc = CsvDoc::new(BENCH_SCHEMA, &config, HEADER);
    for row in &rows {
        if !row.error.is_empty() {
            eprintln!("{} {}: {}", row.instance, row.solver, row.error);
        }
        doc.row([
            row.instance.clone(),
            row.solver.clone(),
            row.status.clone(),
            opt(row.objective),
            opt(row.iterations),
            opt(row.cuts),
            ms(row.runtime_ms),
            opt(row.split.map(|s| format!("{:.1}", s.0))),
            opt(row.split.map(|s| format!("{:.1}", s.1))),
            row.error.clone(),
        ]);
    }
    write_with_sidecar(&out, &doc.finish(), seed, None, &config)?;
    println!("{}", out.display());

    if summarize {
        let mut by_solver: BTreeMap<String, Vec<&Row>> = BTreeMap::new();
        for row in &rows {
            by_solver.entry(row.solver.clone()).or_default().push(row);
        }
        let mut sum = CsvDoc::new(
            BENCH_SUMMARY_SCHEMA,
            &config,
            &["solver", "runs", "optimal", "timeouts", "errors", "meanObjective", "meanIterations", "medianIterations", "meanRuntimeMs"],
        );
        for label in &labels {
            let label = Solver::parse(label)?.label();
            let Some(rs) = by_solver.get(&label) else { continue };
            let objectives: Vec<f64> = rs.iter().filter_map(|r| r.objective).map(f64::from).collect();
            let mut iters: Vec<f64> = rs.iter().filter_map(|r| r.iterations).map(f64::from).collect();
            iters.sort_by(f64::total_cmp);
            let median = match iters.len() {
                0 => f64::NAN,
                n if n % 2 == 1 => iters[n / 2],
                n => (iters[n / 2 - 1] + iters[n / 2]) / 2.0,
            };
            let count = |s: &str| rs.iter().filter(|r| r.status == s).count().to_string();
            sum.row([
                label.clone(),
                rs.len().to_string(),
                count("optimal"),
                count("timeout"),
                count("error"),
                num(if objectives.is_empty() { f64::NAN } else { mean(&objectives) }),
                num(if iters.is_empty() { f64::NAN } else { mean(&iters) }),
                num(median),
                ms(mean(&rs.iter().map(|r| r.runtime_ms).collect::<Vec<_>>())),
            ]);
        }
        let path = out.with_extension("summary.csv");
        write_with_sidecar(&path, &sum.finish(), seed, None, &config)?;
        println!("{}", path.display());
    }
    Ok(())
}
