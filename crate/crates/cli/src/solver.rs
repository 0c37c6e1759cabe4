//! Static solver selection shared by `solve` and `bench`.

use std::time::Instant;

use repairshop::budget::BudgetSpec;
use repairshop::dispatch::{dispatch, DispatchConfig};
use repairshop::expectation::DueDateAssignment;
use repairshop::lbbd::{extract_executable_schedule, solve_lbbd, ExecutableSchedule, LbbdConfig, SolveStatus};
use repairshop::master::Relaxation;
use repairshop::model::{validate_instance, StaticInstance};
use repairshop::oracle::{solve_global, OracleConfig};
use repairshop::rssp::Placement;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Solver {
    Lbbd(LbbdConfig),
    Oracle(OracleConfig),
    Dispatch,
}

impl Solver {
    /// `lbbd-tight`, `lbbd-basic+hybrid`, `lbbd-tight-late`, `oracle`,
    /// `oracle-late`, `dispatch`.
    pub fn parse(label: &str) -> Result<Self, CliError> {
        let bad = || CliError::Usage(format!("unknown solver `{label}`"));
        let (body, late) = match label.strip_suffix("-late").or_else(|| label.strip_suffix("-lateMode")) {
            Some(b) => (b, true),
            None => (label, false),
        };
        let placement = if late { Placement::Latest } else { Placement::Earliest };
        Ok(match body {
            "dispatch" if !late => Solver::Dispatch,
            "oracle" => Solver::Oracle(OracleConfig { placement, ..OracleConfig::default() }),
            _ => {
                let rest = body.strip_prefix("lbbd").ok_or_else(bad)?;
                let (rest, hybrid) = match rest.strip_suffix("+hybrid") {
                    Some(r) => (r, true),
                    None => (rest, false),
                };
                let relaxation = match rest {
                    "" | "-tight" => Relaxation::Tight,
                    "-basic" => Relaxation::Basic,
                    _ => return Err(bad()),
                };
                Solver::Lbbd(LbbdConfig { placement, ..LbbdConfig::new(relaxation, hybrid) })
            }
        })
    }

    pub fn label(&self) -> String {
        let late = |p: Placement| if p == Placement::Latest { "-late" } else { "" };
        match self {
            Solver::Lbbd(c) => format!("lbbd-{}{}", c.label(), late(c.placement)),
            Solver::Oracle(c) => format!("oracle{}", late(c.placement)),
            Solver::Dispatch => "dispatch".into(),
        }
    }
}

/// What a solve produced. Heuristic results carry status `heuristic`.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: &'static str,
    pub objective: Option<u32>,
    pub iterations: Option<u32>,
    pub cuts: Option<u32>,
    /// Percent of time in the master and in the sub-problems.
    pub split: Option<(f64, f64)>,
    pub assignment: Option<DueDateAssignment>,
    pub flown: Option<Vec<Vec<u32>>>,
    pub plan: Option<ExecutableSchedule>,
    pub runtime_ms: f64,
}

pub fn check_instance(instance: &StaticInstance) -> Result<(), CliError> {
    let report = validate_instance(instance);
    if report.is_ok() {
        Ok(())
    } else {
        Err(CliError::Invalid(format!("instance failed validation:\n{report}")))
    }
}

pub fn run(instance: &StaticInstance, solver: &Solver, budget: &BudgetSpec) -> Result<Outcome, CliError> {
    check_instance(instance)?;
    let invalid = |e: repairshop::error::SolveError| CliError::Invalid(e.to_string());
    let start = Instant::now();
    let mut out = match solver {
        Solver::Lbbd(config) => {
            let r = solve_lbbd(instance, config, budget).map_err(invalid)?;
            let plan = r.assignment.as_ref().filter(|_| r.status == SolveStatus::Optimal).map(|a| extract_executable_schedule(instance, a, &r.schedules));
            let master = r.master_share();
            Outcome {
                status: r.status.as_str(),
                objective: r.objective,
                iterations: Some(r.iterations),
                cuts: Some(r.cuts_added),
                split: Some((master, 100.0 - master)),
                assignment: r.assignment,
                flown: r.flow.map(|f| f.flown),
                plan,
                runtime_ms: 0.0,
            }
        }
        Solver::Oracle(config) => {
            let r = solve_global(instance, config, budget).map_err(invalid)?;
            let plan = (r.status != SolveStatus::Infeasible).then(|| extract_executable_schedule(instance, &r.assignment, &r.schedules));
            Outcome {
                status: r.status.as_str(),
                objective: Some(r.objective),
                iterations: None,
                cuts: None,
                split: None,
                assignment: Some(r.assignment),
                flown: Some(r.flow.flown),
                plan,
                runtime_ms: 0.0,
            }
        }
        Solver::Dispatch => {
            let r = dispatch(instance, &DispatchConfig::default());
            Outcome {
                status: "heuristic",
                objective: Some(r.objective),
                iterations: None,
                cuts: None,
                split: None,
                assignment: Some(r.assignment),
                flown: Some(r.flow.flown),
                plan: Some(r.executable),
                runtime_ms: 0.0,
            }
        }
    };
    out.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(out)
}
