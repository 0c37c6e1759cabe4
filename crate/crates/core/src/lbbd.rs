//! Logic-based Benders driver: master, then one feasibility check per trade,
//! then cuts, until the master's choice can be scheduled.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::budget::{Budget, BudgetSpec, Exhausted};
use crate::dispatch::{dispatch, DispatchConfig};
use crate::error::SolveError;
use crate::expectation::{DueDateAssignment, FlowPlan};
use crate::master::{solve_master_capped, BendersCut, MasterOutcome, Relaxation};
use crate::model::{validate_instance, StaticInstance, Time};
use crate::profile::CapacityProfile;
use crate::rssp::{solve_rssp_with, trade_subproblem, FeasibilityResult, Placement, TradeSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SolveStatus {
    Optimal,
    Timeout,
    Infeasible,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Timeout => "timeout",
            SolveStatus::Infeasible => "infeasible",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LbbdConfig {
    pub relaxation: Relaxation,
    /// Seed the master with the dispatch objective as a lower bound.
    pub hybrid: bool,
    pub placement: Placement,
    pub max_iterations: u32,
    /// Shrink each cut to jobs that keep the trade infeasible and raise their
    /// ceilings as far as infeasibility allows.
    pub strengthen_cuts: bool,
}

impl Default for LbbdConfig {
    fn default() -> Self {
        Self {
            relaxation: Relaxation::Tight,
            hybrid: false,
            placement: Placement::Earliest,
            max_iterations: 10_000,
            strengthen_cuts: true,
        }
    }
}

impl LbbdConfig {
    pub fn new(relaxation: Relaxation, hybrid: bool) -> Self {
        Self { relaxation, hybrid, ..Self::default() }
    }

    /// Label such as `tight` or `basic+hybrid`.
    pub fn label(&self) -> String {
        let mut s = self.relaxation.as_str().to_string();
        if self.hybrid {
            s.push_str("+hybrid");
        }
        s
    }
}

/// A cut together with the master assignment that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CutRecord {
    pub cut: BendersCut,
    pub iteration: u32,
    pub generated_by: DueDateAssignment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LbbdReport {
    pub status: SolveStatus,
    pub assignment: Option<DueDateAssignment>,
    /// One witness per trade when optimal, empty otherwise.
    pub schedules: Vec<TradeSchedule>,
    pub flow: Option<FlowPlan>,
    pub objective: Option<u32>,
    pub iterations: u32,
    pub cuts_added: u32,
    pub cut_log: Vec<CutRecord>,
    /// Master objective per iteration; non-increasing.
    pub master_objectives: Vec<u32>,
    /// Lower bound handed to the master in hybrid mode.
    pub hybrid_bound: Option<u32>,
    pub time_master: Duration,
    pub time_sub: Duration,
}

impl LbbdReport {
    fn empty() -> Self {
        Self {
            status: SolveStatus::Timeout,
            assignment: None,
            schedules: Vec::new(),
            flow: None,
            objective: None,
            iterations: 0,
            cuts_added: 0,
            cut_log: Vec::new(),
            master_objectives: Vec::new(),
            hybrid_bound: None,
            time_master: Duration::ZERO,
            time_sub: Duration::ZERO,
        }
    }

    /// Share of solve time spent in the master, in percent.
    pub fn master_share(&self) -> f64 {
        let total = (self.time_master + self.time_sub).as_secs_f64();
        if total > 0.0 {
            100.0 * self.time_master.as_secs_f64() / total
        } else {
            0.0
        }
    }
}

/// Runs the decomposition under `budget`. On timeout no executable schedule is
/// returned; callers fall back to a heuristic.
pub fn solve_lbbd(
    instance: &StaticInstance,
    config: &LbbdConfig,
    budget: &BudgetSpec,
) -> Result<LbbdReport, SolveError> {
    let report = validate_instance(instance);
    if !report.is_ok() {
        return Err(SolveError::InvalidInstance(report));
    }
    let budget = budget.start();
    Ok(run(instance, config, &budget))
}

type SubKey = (usize, Vec<usize>);

struct Checker<'a> {
    instance: &'a StaticInstance,
    placement: Placement,
    budget: &'a Budget,
    verdicts: HashMap<SubKey, Option<TradeSchedule>>,
}

impl Checker<'_> {
    /// Witness schedule for `trade` under `assignment`, or `None` when the
    /// trade cannot meet its due dates. Verdicts are cached on the indices of
    /// the trade's jobs.
    fn check(&mut self, trade: usize, assignment: &DueDateAssignment) -> Result<Option<TradeSchedule>, Exhausted> {
        let key: SubKey = (
            trade,
            self.instance
                .trade_members(trade)
                .iter()
                .map(|&(j, _)| assignment.due_index[j])
                .collect(),
        );
        if let Some(v) = self.verdicts.get(&key) {
            return Ok(v.clone());
        }
        let (tasks, blocks) = trade_subproblem(self.instance, assignment, trade);
        let horizon = self.instance.due_dates().horizon_end();
        let res = solve_rssp_with(&self.instance.trades[trade], &tasks, &blocks, horizon, self.placement, self.budget)?;
        let v = match res {
            FeasibilityResult::Feasible(s) => Some(s),
            FeasibilityResult::Infeasible => None,
        };
        self.verdicts.insert(key, v.clone());
        Ok(v)
    }

    /// Starting from an assignment that is infeasible on `trade`, moves jobs to
    /// `B` and then to later due dates for as long as the trade stays
    /// infeasible. Earlier dates only tighten the check, so the cut read off
    /// the result forbids every assignment the plain cut forbids.
    fn strengthen(&mut self, trade: usize, assignment: &DueDateAssignment) -> Result<BendersCut, Exhausted> {
        let dates = self.instance.due_dates();
        let b = dates.b_index();
        let mut a = assignment.clone();
        let mut members: Vec<usize> = self
            .instance
            .trade_members(trade)
            .iter()
            .map(|&(j, _)| j)
            .filter(|&j| a.due_index[j] != b)
            .collect();
        // Late jobs first: they are the likeliest to be irrelevant.
        members.sort_by_key(|&j| (std::cmp::Reverse(a.due_index[j]), j));
        for &j in &members {
            let old = a.due_index[j];
            a.due_index[j] = b;
            if self.check(trade, &a)?.is_some() {
                a.due_index[j] = old;
            }
        }
        for &j in &members {
            while a.due_index[j] + 1 < b {
                a.due_index[j] += 1;
                if self.check(trade, &a)?.is_some() {
                    a.due_index[j] -= 1;
                    break;
                }
            }
        }
        Ok(BendersCut::from_assignment(self.instance, trade, &a))
    }
}

fn run(instance: &StaticInstance, config: &LbbdConfig, budget: &Budget) -> LbbdReport {
    let mut rep = LbbdReport::empty();
    let lower_bound = if config.hybrid {
        let start = Instant::now();
        let h = dispatch(instance, &DispatchConfig::default()).objective;
        rep.time_master += start.elapsed();
        rep.hybrid_bound = Some(h);
        h
    } else {
        0
    };

    let mut cuts: Vec<BendersCut> = Vec::new();
    let mut checker = Checker { instance, placement: config.placement, budget, verdicts: HashMap::new() };
    while rep.iterations < config.max_iterations {
        rep.iterations += 1;
        let start = Instant::now();
        let previous = rep.master_objectives.last().copied();
        let outcome =
            solve_master_capped(instance, &cuts, config.relaxation, lower_bound, previous, budget);
        rep.time_master += start.elapsed();
        let sol = match outcome {
            MasterOutcome::Optimal(s) => s,
            MasterOutcome::Infeasible => {
                rep.status = SolveStatus::Infeasible;
                return rep;
            }
            MasterOutcome::Timeout(_) => return rep,
        };
        rep.master_objectives.push(sol.objective);

        let start = Instant::now();
        let mut schedules = Vec::with_capacity(instance.trades.len());
        let mut new_cuts = Vec::new();
        for trade in 0..instance.trades.len() {
            let verdict = checker.check(trade, &sol.assignment).and_then(|v| match v {
                Some(s) => Ok(Ok(s)),
                None if config.strengthen_cuts => checker.strengthen(trade, &sol.assignment).map(Err),
                None => Ok(Err(BendersCut::from_assignment(instance, trade, &sol.assignment))),
            });
            match verdict {
                Ok(Ok(s)) => schedules.push(s),
                Ok(Err(cut)) => new_cuts.push(cut),
                Err(Exhausted) => {
                    rep.time_sub += start.elapsed();
                    return rep;
                }
            }
        }
        rep.time_sub += start.elapsed();

        if new_cuts.is_empty() {
            rep.status = SolveStatus::Optimal;
            rep.objective = Some(sol.objective);
            rep.flow = Some(sol.flow);
            rep.assignment = Some(sol.assignment);
            rep.schedules = schedules;
            return rep;
        }
        for cut in new_cuts {
            rep.cut_log.push(CutRecord {
                cut: cut.clone(),
                iteration: rep.iterations,
                generated_by: sol.assignment.clone(),
            });
            cuts.push(cut);
            rep.cuts_added += 1;
        }
    }
    rep
}

/// An operation placed on the time axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlannedOp {
    pub job: usize,
    pub trade_id: usize,
    pub start: Time,
    pub end: Time,
    pub demand: u32,
}

/// Every operation of every job with concrete times, plus when each aircraft
/// leaves the shop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExecutableSchedule {
    pub ops: Vec<PlannedOp>,
    /// Per job: the latest end over its operations.
    pub ready: Vec<Time>,
}

/// Completes per-trade witnesses into a full plan. Jobs due on `B` are not in
/// the witnesses except for committed operations; their other operations are
/// placed greedily from the last wave start on, in job order.
pub fn extract_executable_schedule(
    instance: &StaticInstance,
    assignment: &DueDateAssignment,
    schedules: &[TradeSchedule],
) -> ExecutableSchedule {
    let dates = instance.due_dates();
    let horizon = dates.horizon_end();
    let mut ops = Vec::new();
    let mut profiles = vec![CapacityProfile::new(); instance.trades.len()];
    let mut placed = vec![vec![false; instance.trades.len()]; instance.job_count()];
    for s in schedules {
        for o in &s.ops {
            profiles[s.trade_id].add(o.start, o.end, o.demand);
            placed[o.job][s.trade_id] = true;
            ops.push(PlannedOp {
                job: o.job,
                trade_id: s.trade_id,
                start: o.start,
                end: o.end,
                demand: o.demand,
            });
        }
    }
    for (j, job) in instance.jobs.iter().enumerate() {
        for op in &job.operations {
            if placed[j][op.trade_id] {
                continue;
            }
            let r = op.trade_id;
            let start = match op.fixed_start {
                Some(s) => s,
                None => {
                    debug_assert!(dates.is_b(assignment.due_index[j]));
                    profiles[r].earliest_fit(
                        horizon,
                        op.processing_time,
                        op.capacity_demand,
                        instance.trades[r].capacity,
                    )
                }
            };
            profiles[r].add(start, start + op.processing_time, op.capacity_demand);
            placed[j][r] = true;
            ops.push(PlannedOp {
                job: j,
                trade_id: r,
                start,
                end: start + op.processing_time,
                demand: op.capacity_demand,
            });
        }
    }
    ops.sort_by_key(|o| (o.job, o.trade_id));
    let mut ready = vec![0; instance.job_count()];
    for o in &ops {
        ready[o.job] = ready[o.job].max(o.end);
    }
    ExecutableSchedule { ops, ready }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::single_trade;

    #[test]
    fn ample_capacity_needs_one_iteration() {
        let inst = single_trade(10, &[6, 12], &[(2, 3), (3, 3)]);
        let rep = solve_lbbd(&inst, &LbbdConfig::default(), &BudgetSpec::unlimited()).unwrap();
        assert_eq!(rep.status, SolveStatus::Optimal);
        assert_eq!(rep.iterations, 1);
        assert_eq!(rep.cuts_added, 0);
        assert_eq!(rep.schedules.len(), 1);
    }

    #[test]
    fn basic_relaxation_needs_a_cut() {
        // Two wide jobs cannot both finish by 3, but their area fits by 6.
        let mut inst = single_trade(10, &[3, 6], &[(2, 6), (2, 6)]);
        inst.waves[0].requirement = vec![2];
        inst.types[0].ready_count = 0;
        inst.types[0].member_count = 2;
        let inst = StaticInstance::new(inst.types, inst.aircraft, inst.trades, inst.waves, inst.jobs)
            .unwrap();
        let rep = solve_lbbd(&inst, &LbbdConfig::new(Relaxation::Basic, false), &BudgetSpec::unlimited())
            .unwrap();
        assert_eq!(rep.status, SolveStatus::Optimal);
        assert!(rep.cuts_added >= 1);
        for rec in &rep.cut_log {
            assert!(crate::master::cut_violated(&rec.generated_by, &rec.cut));
        }
        let w = rep.master_objectives.windows(2).all(|w| w[0] >= w[1]);
        assert!(w);
    }

    #[test]
    fn executable_schedule_ready_times() {
        let inst = single_trade(10, &[14, 20], &[(12, 5), (4, 5)]);
        let a = DueDateAssignment::new(vec![0, 2]);
        let sched = TradeSchedule {
            trade_id: 0,
            ops: vec![crate::rssp::ScheduledOp { job: 0, start: 0, end: 12, demand: 5, fixed: false }],
        };
        let ex = extract_executable_schedule(&inst, &a, &[sched]);
        assert_eq!(ex.ready[0], 12);
        // The job on B starts no earlier than the last wave start.
        assert_eq!(ex.ready[1], 24);
    }

    #[test]
    fn invalid_instance_is_rejected() {
        let inst = single_trade(10, &[5], &[(3, 11)]);
        assert!(matches!(
            solve_lbbd(&inst, &LbbdConfig::default(), &BudgetSpec::unlimited()),
            Err(SolveError::InvalidInstance(_))
        ));
    }
}
