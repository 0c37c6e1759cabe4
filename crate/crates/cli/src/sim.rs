use std::path::PathBuf;

use clap::{Args, ValueEnum};
use repairshop::budget::BudgetSpec;
use repairshop::dynasim::{run_simulation, CoverageMode, Policy, Scheduler, SimConfig, SimTrace};
use repairshop::io::read_scenario;
use repairshop::metrics::{summarize, CDF_POINTS};
use repairshop::par::par_map;
use repairshop::rng::derive_key;
use serde::{Deserialize, Serialize};

use crate::bench::collect_inputs;
use crate::config::{FileConfig, Resolver};
use crate::error::CliError;
use crate::output::{ms, num, write_with_sidecar, CsvDoc};
use crate::solve::instance_id;

pub const TRACE_SCHEMA: &str = "repairshop-trace/1";
pub const SUMMARY_SCHEMA: &str = "repairshop-summary/1";

pub const TRACE_HEADER: &[&str] =
    &["instanceId", "replication", "policy", "scheduler", "wave", "nu", "O_w", "epochRho", "decisionTimeMs"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coverage {
    /// Flown aircraft over the total requirement of the wave.
    Pooled,
    /// Mean of per-type shares over types with a requirement.
    PerType,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// Scenario files or directories of them.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Comma-separated policies such as P11,P31,P33.
    #[arg(long)]
    policies: Option<String>,
    /// Comma-separated schedulers: lbbd-tight, lbbd-basic, dispatch, oracle,
    /// oracle-late, relaxed.
    #[arg(long)]
    schedulers: Option<String>,
    /// Replications per scenario and cell.
    #[arg(long)]
    reps: Option<u64>,
    /// Wall-clock budget per scheduling decision, in seconds.
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    coverage: Option<Coverage>,
    /// Added to every aircraft's failure rate at load.
    #[arg(long, allow_hyphen_values = true)]
    lambda_shift: Option<f64>,
    /// One-based wave at which the summary reads the running mean.
    #[arg(long)]
    wave: Option<usize>,
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    summary: Option<PathBuf>,
}

/// Failure draws of a scenario depend on the master seed and its id only.
pub fn scenario_seed(master: u64, instance_id: &str) -> u64 {
    derive_key(master, instance_id, &[])
}

pub fn run(args: SimArgs, file: &FileConfig) -> Result<(), CliError> {
    let mut r = Resolver::new(file, "sim");
    let policy_labels = r.pick_list("policies", args.policies, "P11,P31,P33")?;
    let scheduler_labels = r.pick_list("schedulers", args.schedulers, "lbbd-tight")?;
    let reps = r.pick("reps", args.reps, 20)?;
    let budget = r.pick("budget", args.budget, 600.0)?;
    let seed = r.seed(args.seed)?;
    let coverage = r.pick("coverage", args.coverage, Coverage::Pooled)?;
    let lambda_shift = r.pick("lambda-shift", args.lambda_shift, 0.0)?;
    let wave = r.pick("wave", args.wave, 28)?;
    let trace_path = r.pick("trace", args.trace, PathBuf::from("trace.csv"))?;
    let summary_path = r.pick("summary", args.summary, PathBuf::from("summary.csv"))?;
    let files = collect_inputs(&args.inputs)?;
    r.pick("inputs", Some(files.clone()), Vec::new())?;
    let config = r.finish();

    if !(budget > 0.0) {
        return Err(CliError::Usage("`budget` must be positive".into()));
    }
    if reps == 0 || wave == 0 {
        return Err(CliError::Usage("`reps` and `wave` must be at least 1".into()));
    }
    let policies: Vec<Policy> = policy_labels
        .iter()
        .map(|p| Policy::parse(p).map_err(|e| CliError::Usage(format!("policy `{p}`: {e}"))))
        .collect::<Result<_, _>>()?;
    let schedulers: Vec<Scheduler> = scheduler_labels
        .iter()
        .map(|s| Scheduler::parse(s).ok_or_else(|| CliError::Usage(format!("unknown scheduler `{s}`"))))
        .collect::<Result<_, _>>()?;
    let scenarios = files
        .iter()
        .map(|f| read_scenario(f).map(|s| (instance_id(f), s)).map_err(|e| CliError::Invalid(format!("{}: {e}", f.display()))))
        .collect::<Result<Vec<_>, _>>()?;

    let mut cells = Vec::new();
    for scheduler in &schedulers {
        for &policy in &policies {
            let mut c = SimConfig::new(policy, *scheduler, BudgetSpec::seconds(budget));
            c.coverage = match coverage {
                Coverage::Pooled => CoverageMode::Pooled,
                Coverage::PerType => CoverageMode::PerTypeMean,
            };
            c.lambda_shift = lambda_shift;
            cells.push(c);
        }
    }
    let items: Vec<(usize, usize, u64)> = (0..cells.len())
        .flat_map(|c| (0..scenarios.len()).flat_map(move |s| (0..reps).map(move |rep| (c, s, rep))))
        .collect();
    let runs: Vec<Result<SimTrace, String>> = par_map(&items, |&(c, s, rep)| {
        let (id, scenario) = &scenarios[s];
        run_simulation(scenario, &cells[c], scenario_seed(seed, id), rep).map_err(|e| e.to_string())
    });

    let mut trace = CsvDoc::new(TRACE_SCHEMA, &config, TRACE_HEADER);
    let o_col = format!("O_{wave}");
    let mut header: Vec<String> = ["scheduler", "policy", "runs", "failures", "wave", o_col.as_str(), "variance", "rho"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(CDF_POINTS.iter().map(|w| format!("cdf_{w:.1}")));
    header.extend(["meanDecisionMs", "timeouts", "fallbacks"].map(String::from));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut summary = CsvDoc::new(SUMMARY_SCHEMA, &config, &header_refs);

    let per_cell = scenarios.len() * reps as usize;
    for (c, cell) in cells.iter().enumerate() {
        let mut ok = Vec::new();
        let mut failures = 0;
        for (i, run) in runs[c * per_cell..(c + 1) * per_cell].iter().enumerate() {
            let (_, s, rep) = items[c * per_cell + i];
            let id = &scenarios[s].0;
            match run {
                Ok(t) => {
                    for w in 0..t.nu.len() {
                        let rho = t.epoch_rho[w];
                        trace.row([
                            id.clone(),
                            rep.to_string(),
                            t.policy.clone(),
                            t.scheduler.clone(),
                            (w + 1).to_string(),
                            num(t.nu[w]),
                            num(t.running[w]),
                            rho.map(num).unwrap_or_default(),
                            rho.map(|_| ms(t.decision_ms[w])).unwrap_or_default(),
                        ]);
                    }
                    ok.push(t.clone());
                }
                Err(e) => {
                    failures += 1;
                    eprintln!("{id} rep {rep} {} {}: {e}", cell.scheduler.label(), cell.policy.label());
                }
            }
        }
        let s = summarize(&ok, wave);
        let mut row = vec![
            cell.scheduler.label(),
            cell.policy.label(),
            s.runs.to_string(),
            failures.to_string(),
            wave.to_string(),
            num(s.o_mean),
            num(s.o_variance),
            num(s.rho),
        ];
        row.extend(s.cdf.iter().map(|&p| num(p)));
        row.push(ms(s.mean_decision_ms));
        row.push(s.timeouts.to_string());
        row.push(ok.iter().map(|t| t.fallbacks).sum::<u32>().to_string());
        summary.row(row);
    }
    write_with_sidecar(&trace_path, &trace.finish(), seed, None, &config)?;
    write_with_sidecar(&summary_path, &summary.finish(), seed, None, &config)?;
    println!("{}", trace_path.display());
    println!("{}", summary_path.display());
    Ok(())
}
