//! Exhaustive reference solver.
//!
//! Enumerates due-date assignments depth first and checks capacity directly
//! with the trade feasibility solver, so no relaxation or cut is involved in
//! its answer. Unlike the decomposition it always carries a complete feasible
//! incumbent, which makes a timed-out run still executable.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::budget::{Budget, BudgetSpec, Exhausted};
use crate::dispatch::{dispatch, DispatchConfig};
use crate::error::SolveError;
use crate::expectation::{objective_of, DueDateAssignment, FlowPlan};
use crate::lbbd::SolveStatus;
use crate::model::{validate_instance, StaticInstance};
use crate::rssp::{check_assignment, solve_rssp_with, trade_subproblem, FeasibilityResult, Placement, TradeSchedule};
use crate::search::{AreaLedger, BranchAndBound, Pruner};

/// Refusal threshold of [`enumerate_assignments`].
pub const ENUMERATION_CAP: u128 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleConfig {
    /// Witness placement; `Latest` pushes operations toward their deadlines.
    pub placement: Placement,
    /// Prune with the optimistic objective bound.
    pub use_bound: bool,
    /// Prune with the prefix-area test before calling the feasibility solver.
    /// It only discards assignments that solver would reject.
    pub area_filter: bool,
    /// Check a trade before all its jobs are assigned, with the unassigned
    /// ones left out. Any completion only adds work, so this is exact too.
    pub partial_checks: bool,
    /// Start from the dispatch assignment when it beats all-`B`.
    pub warm_start: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { placement: Placement::Earliest, use_bound: true, area_filter: true, partial_checks: true, warm_start: true }
    }
}

impl OracleConfig {
    pub fn late_mode() -> Self {
        Self { placement: Placement::Latest, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleReport {
    /// `Optimal` or `Timeout`; the incumbent is complete either way.
    pub status: SolveStatus,
    pub assignment: DueDateAssignment,
    pub schedules: Vec<TradeSchedule>,
    pub flow: FlowPlan,
    pub objective: u32,
    pub nodes: u64,
}

struct OraclePruner<'b> {
    area_filter: bool,
    partial_checks: bool,
    ledger: AreaLedger,
    verdicts: HashMap<(usize, Vec<usize>), bool>,
    budget: &'b Budget,
}

impl OraclePruner<'_> {
    fn trade_feasible(
        &mut self,
        instance: &StaticInstance,
        assign: &[usize],
        trade: usize,
    ) -> Result<bool, Exhausted> {
        // Unassigned jobs count as `B`: only their committed blocks remain.
        let b = instance.due_dates().b_index();
        let key = (
            trade,
            instance.trade_members(trade).iter().map(|&(j, _)| assign[j].min(b)).collect::<Vec<_>>(),
        );
        if let Some(&v) = self.verdicts.get(&key) {
            return Ok(v);
        }
        let a = DueDateAssignment::new(assign.iter().map(|&i| i.min(b)).collect());
        let (tasks, blocks) = trade_subproblem(instance, &a, trade);
        let horizon = instance.due_dates().horizon_end();
        let trade_ref = &instance.trades[trade];
        let res = solve_rssp_with(trade_ref, &tasks, &blocks, horizon, Placement::Earliest, self.budget)?;
        let ok = res.is_feasible();
        self.verdicts.insert(key, ok);
        Ok(ok)
    }
}

impl Pruner for OraclePruner<'_> {
    fn extend(
        &mut self,
        instance: &StaticInstance,
        assign: &[usize],
        job: usize,
        index: usize,
    ) -> Result<bool, Exhausted> {
        self.ledger.apply(instance, job, index, 1);
        for op in &instance.jobs[job].operations {
            let r = op.trade_id;
            if self.area_filter && !self.ledger.tight_ok(instance, r) {
                return Ok(false);
            }
            let check = self.ledger.unassigned(r) == 0 || (self.partial_checks && index != instance.due_dates().b_index());
            if check && !self.trade_feasible(instance, assign, r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn retract(&mut self, instance: &StaticInstance, job: usize, index: usize) {
        self.ledger.apply(instance, job, index, -1);
    }
}

/// Best feasible assignment by exhaustive search.
///
/// Starts from every job on `B`, or from the dispatch assignment when that is
/// better and passes the feasibility check. If even all-`B` is infeasible (committed
/// operations alone overload a trade) the report is `Infeasible`.
pub fn solve_global(
    instance: &StaticInstance,
    config: &OracleConfig,
    budget: &BudgetSpec,
) -> Result<OracleReport, SolveError> {
    let report = validate_instance(instance);
    if !report.is_ok() {
        return Err(SolveError::InvalidInstance(report));
    }
    let budget = budget.start();
    let all_b = DueDateAssignment::all_b(instance);
    let base = check_assignment(instance, &all_b, config.placement, &Budget::unlimited())
        .expect("unlimited budget");
    if base.iter().any(Option::is_none) {
        return Ok(infeasible_report(instance, all_b));
    }
    let mut start = (objective_of(&all_b, instance).objective, all_b.due_index.clone());
    if config.warm_start {
        let d = dispatch(instance, &DispatchConfig::default());
        if d.objective > start.0 {
            let ok = check_assignment(instance, &d.assignment, Placement::Earliest, &budget)
                .is_ok_and(|v| v.iter().all(Option::is_some));
            if ok {
                start = (d.objective, d.assignment.due_index);
            }
        }
    }

    let pruner = OraclePruner {
        area_filter: config.area_filter,
        partial_checks: config.partial_checks,
        ledger: AreaLedger::new(instance),
        verdicts: HashMap::new(),
        budget: &budget,
    };
    let outcome = BranchAndBound::new(instance, pruner, &budget)
        .use_bound(config.use_bound)
        .incumbent(start.0, start.1)
        .run();
    let (objective, due_index) = outcome.best.expect("all-B incumbent");
    let assignment = DueDateAssignment::new(due_index);
    let schedules: Vec<TradeSchedule> =
        check_assignment(instance, &assignment, config.placement, &Budget::unlimited())
            .expect("unlimited budget")
            .into_iter()
            .map(|s| s.expect("incumbent is feasible"))
            .collect();
    let flow = objective_of(&assignment, instance);
    debug_assert_eq!(flow.objective, objective);
    Ok(OracleReport {
        status: if outcome.exhausted { SolveStatus::Timeout } else { SolveStatus::Optimal },
        assignment,
        schedules,
        objective,
        flow,
        nodes: budget.nodes(),
    })
}

fn infeasible_report(instance: &StaticInstance, all_b: DueDateAssignment) -> OracleReport {
    let flow = objective_of(&all_b, instance);
    OracleReport {
        status: SolveStatus::Infeasible,
        assignment: all_b,
        schedules: Vec::new(),
        objective: flow.objective,
        flow,
        nodes: 0,
    }
}

/// Visits every assignment over the full index range, `(|W| + 1)^|J|` in all,
/// in lexicographic order. Returns the number visited.
pub fn enumerate_assignments<F: FnMut(&DueDateAssignment)>(
    instance: &StaticInstance,
    cap: u128,
    mut visit: F,
) -> Result<u128, SolveError> {
    let base = instance.due_dates().b_index() + 1;
    let n = instance.job_count();
    let size = (0..n).try_fold(1u128, |acc, _| acc.checked_mul(base as u128)).unwrap_or(u128::MAX);
    if size > cap {
        return Err(SolveError::SearchSpaceTooLarge { size, cap });
    }
    let mut a = DueDateAssignment::new(vec![0; n]);
    for _ in 0..size {
        visit(&a);
        for d in a.due_index.iter_mut().rev() {
            *d += 1;
            if *d < base {
                break;
            }
            *d = 0;
        }
    }
    Ok(size)
}

/// Feasibility of one assignment on every trade, by the chronological solver.
pub fn assignment_feasible(instance: &StaticInstance, assignment: &DueDateAssignment) -> bool {
    instance.trades.iter().all(|t| {
        let (tasks, blocks) = trade_subproblem(instance, assignment, t.id);
        matches!(
            crate::rssp::solve_rssp(t, &tasks, &blocks, instance.due_dates().horizon_end()),
            FeasibilityResult::Feasible(_)
        )
    })
}
