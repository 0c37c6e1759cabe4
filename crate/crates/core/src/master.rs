//! Due-date assignment master problem.
//!
//! The master picks a due-date index for every job to maximize expected
//! coverage. It sees capacity only through an area relaxation per trade and
//! through the Benders cuts collected so far.

use serde::{Deserialize, Serialize};

use crate::budget::{Budget, Exhausted};
use crate::expectation::{objective_of, DueDateAssignment, FlowPlan};
use crate::model::StaticInstance;
use crate::search::{AreaLedger, BranchAndBound, Pruner, UNASSIGNED};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Relaxation {
    /// Total area on a trade fits before its latest due date.
    Basic,
    /// Area due by every wave start fits before that start.
    #[default]
    Tight,
}

impl Relaxation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relaxation::Basic => "basic",
            Relaxation::Tight => "tight",
        }
    }
}

/// Forbids every assignment in which each listed job keeps an index no later
/// than its ceiling. Jobs on `B` are left out: they can never move later, so
/// they never help satisfy the cut.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BendersCut {
    pub trade_id: usize,
    /// `(job, ceiling index)` pairs.
    pub ceiling: Vec<(usize, usize)>,
}

impl BendersCut {
    /// Cut generated by an assignment that is infeasible on `trade`.
    pub fn from_assignment(
        instance: &StaticInstance,
        trade: usize,
        assignment: &DueDateAssignment,
    ) -> Self {
        let b = instance.due_dates().b_index();
        let mut ceiling: Vec<(usize, usize)> = instance
            .trade_members(trade)
            .iter()
            .map(|&(j, _)| (j, assignment.due_index[j]))
            .filter(|&(_, i)| i != b)
            .collect();
        ceiling.sort_unstable();
        Self { trade_id: trade, ceiling }
    }
}

/// True when `assignment` lies in the region `cut` forbids.
pub fn cut_violated(assignment: &DueDateAssignment, cut: &BendersCut) -> bool {
    cut.ceiling.iter().all(|&(j, c)| assignment.due_index[j] <= c)
}

fn ledger_for(instance: &StaticInstance, assignment: &DueDateAssignment) -> AreaLedger {
    let mut ledger = AreaLedger::new(instance);
    for (j, &i) in assignment.due_index.iter().enumerate() {
        ledger.apply(instance, j, i, 1);
    }
    ledger
}

/// Area of the trade's jobs with a real due date is at most the capacity
/// times the latest such date.
pub fn relaxation_holds_basic(
    instance: &StaticInstance,
    assignment: &DueDateAssignment,
    trade: usize,
) -> bool {
    ledger_for(instance, assignment).basic_ok(instance, trade)
}

/// For every wave start `t`, area of the trade's jobs due by `t` is at most
/// the capacity times `t`.
pub fn relaxation_holds_tight(
    instance: &StaticInstance,
    assignment: &DueDateAssignment,
    trade: usize,
) -> bool {
    ledger_for(instance, assignment).tight_ok(instance, trade)
}

pub fn relaxation_holds(
    instance: &StaticInstance,
    assignment: &DueDateAssignment,
    trade: usize,
    relaxation: Relaxation,
) -> bool {
    match relaxation {
        Relaxation::Basic => relaxation_holds_basic(instance, assignment, trade),
        Relaxation::Tight => relaxation_holds_tight(instance, assignment, trade),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MasterSolution {
    pub assignment: DueDateAssignment,
    pub flow: FlowPlan,
    pub objective: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MasterOutcome {
    Optimal(MasterSolution),
    /// No assignment reaches the lower bound.
    Infeasible,
    /// Budget ran out; carries the best assignment found, if any.
    Timeout(Option<MasterSolution>),
}

struct MasterPruner<'c> {
    relaxation: Relaxation,
    ledger: AreaLedger,
    cuts: &'c [BendersCut],
    cuts_by_job: Vec<Vec<usize>>,
}

impl Pruner for MasterPruner<'_> {
    fn extend(
        &mut self,
        instance: &StaticInstance,
        assign: &[usize],
        job: usize,
        index: usize,
    ) -> Result<bool, Exhausted> {
        self.ledger.apply(instance, job, index, 1);
        for op in &instance.jobs[job].operations {
            let ok = match self.relaxation {
                Relaxation::Basic => self.ledger.basic_ok(instance, op.trade_id),
                Relaxation::Tight => self.ledger.tight_ok(instance, op.trade_id),
            };
            if !ok {
                return Ok(false);
            }
        }
        for &c in &self.cuts_by_job[job] {
            let cut = &self.cuts[c];
            let violated = cut
                .ceiling
                .iter()
                .all(|&(j, ceil)| assign[j] != UNASSIGNED && assign[j] <= ceil);
            if violated {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn retract(&mut self, instance: &StaticInstance, job: usize, index: usize) {
        self.ledger.apply(instance, job, index, -1);
    }
}

/// Exact master solve: the best assignment satisfying `relaxation` on every
/// trade and every cut, among those worth at least `lower_bound`.
pub fn solve_master(
    instance: &StaticInstance,
    cuts: &[BendersCut],
    relaxation: Relaxation,
    lower_bound: u32,
    budget: &Budget,
) -> MasterOutcome {
    solve_master_capped(instance, cuts, relaxation, lower_bound, None, budget)
}

/// [`solve_master`] given a known upper bound on the optimum, such as the
/// previous master objective once more cuts have been added. The search
/// stops at the first assignment that reaches it.
pub fn solve_master_capped(
    instance: &StaticInstance,
    cuts: &[BendersCut],
    relaxation: Relaxation,
    lower_bound: u32,
    upper_bound: Option<u32>,
    budget: &Budget,
) -> MasterOutcome {
    let mut cuts_by_job = vec![Vec::new(); instance.job_count()];
    for (c, cut) in cuts.iter().enumerate() {
        for &(j, _) in &cut.ceiling {
            cuts_by_job[j].push(c);
        }
    }
    let pruner = MasterPruner {
        relaxation,
        ledger: AreaLedger::new(instance),
        cuts,
        cuts_by_job,
    };
    let mut search = BranchAndBound::new(instance, pruner, budget).min_value(lower_bound);
    if let Some(ub) = upper_bound {
        search = search.ceiling(ub);
    }
    let outcome = search.run();
    let solution = outcome.best.map(|(objective, due_index)| {
        let assignment = DueDateAssignment::new(due_index);
        let flow = objective_of(&assignment, instance);
        debug_assert_eq!(flow.objective, objective);
        MasterSolution { assignment, flow, objective }
    });
    match (outcome.exhausted, solution) {
        (true, s) => MasterOutcome::Timeout(s),
        (false, Some(s)) => MasterOutcome::Optimal(s),
        (false, None) => MasterOutcome::Infeasible,
    }
}
