//! Repair scheduling sub-problem: can one trade meet a set of deadlines?
//!
//! [`solve_rssp`] is a complete chronological search with timetable propagation.
//! It only considers left-justified schedules, where every operation starts at
//! its release or at the end of another operation; any feasible schedule can be
//! shifted left into that form without breaking a deadline.

use std::cell::RefCell;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::budget::{Budget, Exhausted};
use crate::error::SolveError;
use crate::expectation::DueDateAssignment;
use crate::model::{StaticInstance, Time, Trade};
use crate::profile::CapacityProfile;

/// One operation to place on the trade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RsspTask {
    pub job: usize,
    pub duration: Time,
    pub demand: u32,
    pub release: Time,
    pub deadline: Time,
    pub fixed_start: Option<Time>,
}

impl RsspTask {
    pub fn new(job: usize, duration: Time, demand: u32, deadline: Time) -> Self {
        Self { job, duration, demand, release: 0, deadline, fixed_start: None }
    }
}

/// Committed operation with no deadline of its own: pure capacity usage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FixedBlock {
    pub job: usize,
    pub start: Time,
    pub duration: Time,
    pub demand: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScheduledOp {
    pub job: usize,
    pub start: Time,
    pub end: Time,
    pub demand: u32,
    pub fixed: bool,
}

/// Operation times on one trade: the tasks in input order, then fixed blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TradeSchedule {
    pub trade_id: usize,
    pub ops: Vec<ScheduledOp>,
}

impl TradeSchedule {
    pub fn start_of(&self, job: usize) -> Option<Time> {
        self.ops.iter().find(|o| o.job == job).map(|o| o.start)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeasibilityResult {
    Feasible(TradeSchedule),
    Infeasible,
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityResult::Feasible(_))
    }

    pub fn schedule(&self) -> Option<&TradeSchedule> {
        match self {
            FeasibilityResult::Feasible(s) => Some(s),
            FeasibilityResult::Infeasible => None,
        }
    }
}

/// Where the witness places operations inside their windows.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Placement {
    /// Left-justified witness from the chronological search.
    #[default]
    Earliest,
    /// The same witness with every operation then pushed as late as its
    /// deadline and the other operations allow.
    Latest,
}

/// Start-time domain `[est, lst]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub est: Time,
    pub lst: Time,
}

impl Window {
    pub fn new(est: Time, lst: Time) -> Self {
        Self { est, lst }
    }

    pub fn is_fixed(&self) -> bool {
        self.est == self.lst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimetableTask {
    pub duration: Time,
    pub demand: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Wipeout;

/// Timetable filtering for a cumulative resource enforced on `[0, horizon_end)`.
///
/// Builds the profile of compulsory parts (`[lst, est + p)` whenever non-empty),
/// fails if it overloads the capacity, and moves each window bound past every
/// profile segment the task cannot overlap. Runs to a fixpoint. Returns whether
/// any domain changed.
pub fn timetable_propagate(
    capacity: u32,
    tasks: &[TimetableTask],
    domains: &mut [Window],
    horizon_end: Time,
) -> Result<bool, Wipeout> {
    propagate_in(capacity, tasks, domains, 0, horizon_end)
}

fn propagate_in(
    capacity: u32,
    tasks: &[TimetableTask],
    domains: &mut [Window],
    lo: Time,
    hi: Time,
) -> Result<bool, Wipeout> {
    let cap = i64::from(capacity);
    let mut changed_any = false;
    loop {
        let parts: Vec<Option<(Time, Time, u32)>> = tasks
            .iter()
            .zip(domains.iter())
            .map(|(t, d)| {
                let a = d.lst.max(lo);
                let b = (d.est + t.duration).min(hi);
                (a < b).then_some((a, b, t.demand))
            })
            .collect();
        let mut all = CapacityProfile::new();
        for &(a, b, c) in parts.iter().flatten() {
            all.add(a, b, c);
        }
        if all.peak() > cap {
            return Err(Wipeout);
        }
        if all.is_empty() {
            return Ok(changed_any);
        }
        let mut changed = false;
        for i in 0..tasks.len() {
            if domains[i].is_fixed() {
                continue;
            }
            let mut others = CapacityProfile::new();
            for (j, part) in parts.iter().enumerate() {
                if let (true, Some((a, b, c))) = (j != i, part) {
                    others.add(*a, *b, *c);
                }
            }
            let limit = cap - i64::from(tasks[i].demand);
            let segs: Vec<_> = others.segments().into_iter().filter(|s| s.2 > limit).collect();
            if segs.is_empty() {
                continue;
            }
            let p = tasks[i].duration;
            let Window { mut est, mut lst } = domains[i];
            while let Some(&(_, b, _)) = segs.iter().find(|&&(a, b, _)| a < est + p && b > est) {
                est = b;
            }
            while let Some(&(a, _, _)) =
                segs.iter().rev().find(|&&(a, b, _)| a < lst + p && b > lst)
            {
                lst = a - p;
            }
            if est > lst {
                return Err(Wipeout);
            }
            if est != domains[i].est || lst != domains[i].lst {
                domains[i] = Window { est, lst };
                changed = true;
            }
        }
        if !changed {
            return Ok(changed_any);
        }
        changed_any = true;
    }
}

/// Energetic reasoning: on every interval bounded by an earliest start and a
/// latest end, the work that must fall inside it fits the capacity.
fn energy_ok(capacity: u32, tasks: &[TimetableTask], domains: &[Window], lo: Time, hi: Time) -> bool {
    let mut left: Vec<Time> = domains.iter().map(|d| d.est.clamp(lo, hi)).collect();
    let mut right: Vec<Time> =
        tasks.iter().zip(domains).map(|(t, d)| (d.lst + t.duration).clamp(lo, hi)).collect();
    left.sort_unstable();
    left.dedup();
    right.sort_unstable();
    right.dedup();
    let cap = i64::from(capacity);
    for &a in &left {
        for &b in right.iter().filter(|&&b| b > a) {
            let need: i64 = tasks
                .iter()
                .zip(domains)
                .map(|(t, d)| {
                    let inside = (b - a).min(t.duration).min(d.est + t.duration - a).min(b - d.lst);
                    inside.max(0) * i64::from(t.demand)
                })
                .sum();
            if need > cap * (b - a) {
                return false;
            }
        }
    }
    true
}

/// Searcher over a normalized problem: tasks first, blocks after, capacity on `[lo, hi)`.
struct Chronological<'a> {
    capacity: u32,
    items: Vec<TimetableTask>,
    /// Static branching rank of each movable item (smaller = tried first).
    rank: Vec<usize>,
    lo: Time,
    hi: Time,
    budget: &'a Budget,
    /// Node states already refuted.
    failed: RefCell<HashSet<Vec<Time>>>,
}

/// Bound on remembered failures, to keep memory flat on long searches.
const FAILED_CAP: usize = 1 << 20;

impl Chronological<'_> {
    /// Everything the subtree below a node depends on: the clock, the rank
    /// floor, the windows of unstarted items and what still runs after `t`.
    fn state_key(&self, t: Time, min_rank: usize, domains: &[Window], started: &[bool]) -> Vec<Time> {
        let mut key = vec![t, min_rank as Time];
        let mut running = Vec::new();
        for (i, d) in domains.iter().enumerate() {
            if !started[i] {
                key.extend([i as Time, d.est, d.lst]);
            } else if d.est + self.items[i].duration > t {
                running.push((d.est + self.items[i].duration, self.items[i].demand));
            }
        }
        running.sort_unstable();
        key.push(-1);
        for (e, c) in running {
            key.extend([e, Time::from(c)]);
        }
        key
    }

    fn run(&self, domains: Vec<Window>) -> Result<Option<Vec<Time>>, Exhausted> {
        let started: Vec<bool> = domains.iter().map(Window::is_fixed).collect();
        let t0 = domains
            .iter()
            .zip(&started)
            .filter(|(_, &s)| !s)
            .map(|(d, _)| d.est)
            .min();
        match t0 {
            None => {
                let mut domains = domains;
                let ok = propagate_in(self.capacity, &self.items, &mut domains, self.lo, self.hi);
                Ok(ok.is_ok().then(|| domains.iter().map(|d| d.est).collect()))
            }
            Some(t0) => self.dfs(t0, 0, domains, started),
        }
    }

    fn dfs(
        &self,
        t: Time,
        min_rank: usize,
        mut domains: Vec<Window>,
        started: Vec<bool>,
    ) -> Result<Option<Vec<Time>>, Exhausted> {
        self.budget.tick()?;
        if propagate_in(self.capacity, &self.items, &mut domains, self.lo, self.hi).is_err()
            || !energy_ok(self.capacity, &self.items, &domains, self.lo, self.hi)
        {
            return Ok(None);
        }
        if started.iter().all(|&s| s) {
            return Ok(Some(domains.iter().map(|d| d.est).collect()));
        }
        if domains.iter().zip(&started).any(|(d, &s)| !s && d.lst < t) {
            return Ok(None);
        }
        let key = self.state_key(t, min_rank, &domains, &started);
        if self.failed.borrow().contains(&key) {
            return Ok(None);
        }
        let found = self.expand(t, min_rank, domains, started)?;
        if found.is_none() {
            let mut failed = self.failed.borrow_mut();
            if failed.len() < FAILED_CAP {
                failed.insert(key);
            }
        }
        Ok(found)
    }

    fn expand(
        &self,
        t: Time,
        min_rank: usize,
        domains: Vec<Window>,
        started: Vec<bool>,
    ) -> Result<Option<Vec<Time>>, Exhausted> {
        let mut running = CapacityProfile::new();
        for (i, d) in domains.iter().enumerate() {
            if started[i] {
                running.add(d.est.max(self.lo), (d.est + self.items[i].duration).min(self.hi), self.items[i].demand);
            }
        }
        let mut eligible: Vec<usize> = (0..self.items.len())
            .filter(|&i| !started[i] && self.rank[i] >= min_rank)
            .filter(|&i| domains[i].est <= t && t <= domains[i].lst)
            .collect();
        eligible.sort_by_key(|&i| self.rank[i]);
        for i in eligible {
            let item = self.items[i];
            let usage = running.max_usage_in(t.max(self.lo), (t + item.duration).min(self.hi));
            if usage + i64::from(item.demand) > i64::from(self.capacity) {
                continue;
            }
            let mut d = domains.clone();
            d[i] = Window::new(t, t);
            let mut s = started.clone();
            s[i] = true;
            if let Some(sol) = self.dfs(t, self.rank[i] + 1, d, s)? {
                return Ok(Some(sol));
            }
        }

        let next_end = domains
            .iter()
            .enumerate()
            .filter(|&(i, _)| started[i])
            .map(|(i, d)| d.est + self.items[i].duration)
            .filter(|&e| e > t);
        let next_release = domains
            .iter()
            .zip(&started)
            .filter(|(_, &s)| !s)
            .map(|(d, _)| d.est)
            .filter(|&e| e > t);
        let Some(next) = next_end.chain(next_release).min() else {
            return Ok(None);
        };
        if domains.iter().zip(&started).any(|(d, &s)| !s && d.lst < next) {
            return Ok(None);
        }
        self.dfs(next, 0, domains, started)
    }
}

/// Moves every movable item, latest first, to the latest start up to
/// `latest[i]` that keeps usage within capacity on `[lo, hi)`.
fn right_shift(
    capacity: u32,
    items: &[TimetableTask],
    movable: &[bool],
    latest: &[Time],
    starts: &mut [Time],
    lo: Time,
    hi: Time,
) {
    let len = (hi - lo).max(0) as usize;
    let mut usage = vec![0i64; len];
    let span = |s: Time, p: Time| ((s.max(lo) - lo) as usize)..((s + p).clamp(lo, hi) - lo) as usize;
    for (i, item) in items.iter().enumerate() {
        for u in &mut usage[span(starts[i], item.duration)] {
            *u += i64::from(item.demand);
        }
    }
    let mut order: Vec<usize> = (0..items.len()).filter(|&i| movable[i]).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(starts[i]), std::cmp::Reverse(i)));
    let cap = i64::from(capacity);
    for i in order {
        let TimetableTask { duration: p, demand } = items[i];
        let c = i64::from(demand);
        for u in &mut usage[span(starts[i], p)] {
            *u -= c;
        }
        let s = (starts[i]..=latest[i].max(starts[i]))
            .rev()
            .find(|&s| usage[span(s, p)].iter().all(|&u| u + c <= cap))
            .unwrap_or(starts[i]);
        starts[i] = s;
        for u in &mut usage[span(s, p)] {
            *u += c;
        }
    }
}

/// Decides whether `demands` fit on `trade` around the committed `fixed`
/// blocks, with capacity enforced on `[0, horizon_end)`.
pub fn solve_rssp(
    trade: &Trade,
    demands: &[RsspTask],
    fixed: &[FixedBlock],
    horizon_end: Time,
) -> FeasibilityResult {
    solve_rssp_with(trade, demands, fixed, horizon_end, Placement::Earliest, &Budget::unlimited())
        .expect("unlimited budget")
}

/// [`solve_rssp`] with a witness placement mode and a work budget.
pub fn solve_rssp_with(
    trade: &Trade,
    demands: &[RsspTask],
    fixed: &[FixedBlock],
    horizon_end: Time,
    placement: Placement,
    budget: &Budget,
) -> Result<FeasibilityResult, Exhausted> {
    let (lo, hi) = (0, horizon_end);
    let mut items = Vec::with_capacity(demands.len() + fixed.len());
    let mut domains = Vec::with_capacity(demands.len() + fixed.len());
    for d in demands {
        let window = match d.fixed_start {
            Some(s) => {
                if s + d.duration > d.deadline || s < 0 {
                    return Ok(FeasibilityResult::Infeasible);
                }
                Window::new(s, s)
            }
            None => Window::new(d.release, d.deadline - d.duration),
        };
        if window.est > window.lst {
            return Ok(FeasibilityResult::Infeasible);
        }
        items.push(TimetableTask { duration: d.duration, demand: d.demand });
        domains.push(window);
    }
    for b in fixed {
        items.push(TimetableTask { duration: b.duration, demand: b.demand });
        domains.push(Window::new(b.start, b.start));
    }

    // Rank: smallest latest start, then larger demand, then smaller job id.
    let mut order: Vec<usize> = (0..demands.len()).collect();
    order.sort_by_key(|&i| (domains[i].lst, std::cmp::Reverse(items[i].demand), demands[i].job, i));
    let mut rank = vec![usize::MAX; items.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }

    let latest: Vec<Time> = domains.iter().map(|d| d.lst).collect();
    let search = Chronological { capacity: trade.capacity, items, rank, lo, hi, budget, failed: Default::default() };
    let Some(mut starts) = search.run(domains)? else {
        return Ok(FeasibilityResult::Infeasible);
    };
    if placement == Placement::Latest {
        let movable: Vec<bool> = (0..starts.len()).map(|i| i < demands.len() && demands[i].fixed_start.is_none()).collect();
        right_shift(trade.capacity, &search.items, &movable, &latest, &mut starts, lo, hi);
    }

    let mut ops = Vec::with_capacity(starts.len());
    for (i, d) in demands.iter().enumerate() {
        let start = starts[i];
        ops.push(ScheduledOp {
            job: d.job,
            start,
            end: start + d.duration,
            demand: d.demand,
            fixed: d.fixed_start.is_some(),
        });
    }
    for b in fixed {
        ops.push(ScheduledOp {
            job: b.job,
            start: b.start,
            end: b.start + b.duration,
            demand: b.demand,
            fixed: true,
        });
    }
    Ok(FeasibilityResult::Feasible(TradeSchedule { trade_id: trade.id, ops }))
}

/// Search-space cap of [`brute_force_rssp`].
pub const BRUTE_FORCE_CAP: u128 = 10_000_000;

/// Exhaustive reference solver: tries every start vector inside the windows,
/// checking capacity tick by tick. Refuses when the product of window sizes
/// exceeds `cap`.
pub fn brute_force_rssp(
    trade: &Trade,
    demands: &[RsspTask],
    fixed: &[FixedBlock],
    horizon_end: Time,
    cap: u128,
) -> Result<FeasibilityResult, SolveError> {
    let windows: Vec<(Time, Time)> = demands
        .iter()
        .map(|d| match d.fixed_start {
            Some(s) if s + d.duration <= d.deadline => (s, s),
            Some(_) => (1, 0),
            None => (d.release, d.deadline - d.duration),
        })
        .collect();
    let size = windows
        .iter()
        .map(|&(a, b)| if b >= a { (b - a + 1) as u128 } else { 0 })
        .try_fold(1u128, |acc, n| acc.checked_mul(n))
        .unwrap_or(u128::MAX);
    if size > cap {
        return Err(SolveError::SearchSpaceTooLarge { size, cap });
    }
    if size == 0 {
        return Ok(FeasibilityResult::Infeasible);
    }
    let len = horizon_end.max(0) as usize;
    let mut usage = vec![0i64; len];
    let cap_units = i64::from(trade.capacity);
    let mark = |usage: &mut [i64], s: Time, p: Time, c: i64| {
        for t in s.max(0)..(s + p).min(len as Time) {
            usage[t as usize] += c;
        }
    };
    for b in fixed {
        mark(&mut usage, b.start, b.duration, i64::from(b.demand));
    }
    if usage.iter().any(|&u| u > cap_units) {
        return Ok(FeasibilityResult::Infeasible);
    }

    fn place(
        i: usize,
        demands: &[RsspTask],
        windows: &[(Time, Time)],
        usage: &mut [i64],
        cap_units: i64,
        starts: &mut Vec<Time>,
    ) -> bool {
        if i == demands.len() {
            return true;
        }
        let d = demands[i];
        let len = usage.len() as Time;
        for s in windows[i].0..=windows[i].1 {
            let range = s.max(0)..(s + d.duration).min(len);
            let fits = range.clone().all(|t| usage[t as usize] + i64::from(d.demand) <= cap_units);
            if !fits {
                continue;
            }
            for t in range.clone() {
                usage[t as usize] += i64::from(d.demand);
            }
            starts.push(s);
            if place(i + 1, demands, windows, usage, cap_units, starts) {
                return true;
            }
            starts.pop();
            for t in range {
                usage[t as usize] -= i64::from(d.demand);
            }
        }
        false
    }

    let mut starts = Vec::with_capacity(demands.len());
    if !place(0, demands, &windows, &mut usage, cap_units, &mut starts) {
        return Ok(FeasibilityResult::Infeasible);
    }
    let mut ops: Vec<ScheduledOp> = demands
        .iter()
        .zip(&starts)
        .map(|(d, &s)| ScheduledOp {
            job: d.job,
            start: s,
            end: s + d.duration,
            demand: d.demand,
            fixed: d.fixed_start.is_some(),
        })
        .collect();
    ops.extend(fixed.iter().map(|b| ScheduledOp {
        job: b.job,
        start: b.start,
        end: b.start + b.duration,
        demand: b.demand,
        fixed: true,
    }));
    Ok(FeasibilityResult::Feasible(TradeSchedule { trade_id: trade.id, ops }))
}

/// Per-tick capacity check over `[from, to)`. Returns the first overloaded tick.
pub fn audit_capacity(capacity: u32, ops: &[ScheduledOp], from: Time, to: Time) -> Result<(), Time> {
    for t in from..to {
        let used: i64 = ops
            .iter()
            .filter(|o| o.start <= t && t < o.end)
            .map(|o| i64::from(o.demand))
            .sum();
        if used > i64::from(capacity) {
            return Err(t);
        }
    }
    Ok(())
}

/// Sub-problem of one trade under `assignment`: operations of jobs with a
/// real due date become tasks; committed operations of jobs on `B` become
/// blocks.
pub fn trade_subproblem(
    instance: &StaticInstance,
    assignment: &DueDateAssignment,
    trade: usize,
) -> (Vec<RsspTask>, Vec<FixedBlock>) {
    let dates = instance.due_dates();
    let mut tasks = Vec::new();
    let mut blocks = Vec::new();
    for &(j, o) in instance.trade_members(trade) {
        let op = &instance.jobs[j].operations[o];
        let idx = assignment.due_index[j];
        if dates.is_b(idx) {
            if let Some(s) = op.fixed_start {
                blocks.push(FixedBlock {
                    job: j,
                    start: s,
                    duration: op.processing_time,
                    demand: op.capacity_demand,
                });
            }
        } else {
            tasks.push(RsspTask {
                job: j,
                duration: op.processing_time,
                demand: op.capacity_demand,
                release: 0,
                deadline: dates.date(idx),
                fixed_start: op.fixed_start,
            });
        }
    }
    (tasks, blocks)
}

/// Runs the sub-problem of every trade; `None` entries are infeasible trades.
pub fn check_assignment(
    instance: &StaticInstance,
    assignment: &DueDateAssignment,
    placement: Placement,
    budget: &Budget,
) -> Result<Vec<Option<TradeSchedule>>, Exhausted> {
    let horizon = instance.due_dates().horizon_end();
    instance
        .trades
        .iter()
        .map(|trade| {
            let (tasks, blocks) = trade_subproblem(instance, assignment, trade.id);
            let res = solve_rssp_with(trade, &tasks, &blocks, horizon, placement, budget)?;
            Ok(match res {
                FeasibilityResult::Feasible(s) => Some(s),
                FeasibilityResult::Infeasible => None,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRADE: Trade = Trade { id: 0, capacity: 10 };

    fn verdicts(demands: &[RsspTask], horizon: Time) -> (bool, bool) {
        let fast = solve_rssp(&TRADE, demands, &[], horizon);
        let brute = brute_force_rssp(&TRADE, demands, &[], horizon, BRUTE_FORCE_CAP).unwrap();
        if let FeasibilityResult::Feasible(s) = &fast {
            audit_capacity(10, &s.ops, 0, horizon).unwrap();
        }
        (fast.is_feasible(), brute.is_feasible())
    }

    #[test]
    fn single_job_starts_at_zero() {
        let d = [RsspTask::new(0, 3, 5, 3)];
        let res = solve_rssp(&TRADE, &d, &[], 3);
        assert_eq!(res.schedule().unwrap().start_of(0), Some(0));
        assert_eq!(verdicts(&d, 3), (true, true));
    }

    #[test]
    fn two_wide_jobs_go_in_sequence() {
        let d = [RsspTask::new(0, 2, 6, 4), RsspTask::new(1, 2, 6, 4)];
        let res = solve_rssp(&TRADE, &d, &[], 4);
        let s = res.schedule().unwrap();
        let mut starts = vec![s.start_of(0).unwrap(), s.start_of(1).unwrap()];
        starts.sort();
        assert_eq!(starts, vec![0, 2]);
        assert_eq!(verdicts(&d, 4), (true, true));
    }

    #[test]
    fn two_wide_jobs_cannot_meet_three() {
        let d = [RsspTask::new(0, 2, 6, 3), RsspTask::new(1, 2, 6, 3)];
        assert_eq!(verdicts(&d, 3), (false, false));
    }

    #[test]
    fn fixed_blocks_are_respected() {
        let d = [RsspTask::new(0, 2, 6, 6)];
        let b = [FixedBlock { job: 1, start: 0, duration: 3, demand: 5 }];
        let res = solve_rssp(&TRADE, &d, &b, 6);
        let s = res.schedule().unwrap();
        assert_eq!(s.start_of(0), Some(3));
        assert!(s.ops.iter().any(|o| o.job == 1 && o.start == 0 && o.fixed));
    }

    #[test]
    fn overloaded_blocks_are_infeasible() {
        let b = [
            FixedBlock { job: 0, start: 0, duration: 3, demand: 6 },
            FixedBlock { job: 1, start: 1, duration: 3, demand: 6 },
        ];
        assert!(!solve_rssp(&TRADE, &[], &b, 5).is_feasible());
        // Past the horizon the overload does not count.
        assert!(solve_rssp(&TRADE, &[], &b, 1).is_feasible());
    }

    #[test]
    fn fixed_task_past_deadline_is_infeasible() {
        let mut t = RsspTask::new(0, 3, 2, 4);
        t.fixed_start = Some(2);
        assert!(!solve_rssp(&TRADE, &[t], &[], 10).is_feasible());
        t.fixed_start = Some(1);
        assert!(solve_rssp(&TRADE, &[t], &[], 10).is_feasible());
    }

    #[test]
    fn latest_placement_pushes_right() {
        let d = [RsspTask::new(0, 2, 4, 9), RsspTask::new(1, 3, 8, 6)];
        let early = solve_rssp(&TRADE, &d, &[], 10);
        let late = solve_rssp_with(&TRADE, &d, &[], 10, Placement::Latest, &Budget::unlimited()).unwrap();
        let (e, l) = (early.schedule().unwrap(), late.schedule().unwrap());
        assert_eq!((e.start_of(1), e.start_of(0)), (Some(0), Some(3)));
        assert_eq!(l.start_of(0), Some(7));
        assert_eq!(l.start_of(1), Some(3));
        audit_capacity(10, &l.ops, 0, 10).unwrap();
    }

    #[test]
    fn propagation_noop_on_empty() {
        let mut doms: Vec<Window> = Vec::new();
        assert_eq!(timetable_propagate(10, &[], &mut doms, 10), Ok(false));
    }

    #[test]
    fn propagation_pushes_past_compulsory_part() {
        // Task 0 pinned to [2, 5); task 1 (c = 6) cannot overlap it.
        let tasks = [TimetableTask { duration: 3, demand: 5 }, TimetableTask { duration: 2, demand: 6 }];
        let mut doms = vec![Window::new(2, 2), Window::new(1, 8)];
        assert_eq!(timetable_propagate(10, &tasks, &mut doms, 20), Ok(true));
        assert_eq!(doms[1], Window::new(5, 8));
        // Window that straddles from both sides loses the overlap on each end.
        let mut doms = vec![Window::new(2, 2), Window::new(1, 4)];
        assert_eq!(timetable_propagate(10, &tasks, &mut doms, 20), Err(Wipeout));
    }

    #[test]
    fn propagation_detects_overloaded_compulsory_parts() {
        let tasks = [TimetableTask { duration: 4, demand: 6 }, TimetableTask { duration: 4, demand: 6 }];
        let mut doms = vec![Window::new(0, 1), Window::new(1, 2)];
        assert_eq!(timetable_propagate(10, &tasks, &mut doms, 20), Err(Wipeout));
    }

    #[test]
    fn brute_force_refuses_large_spaces() {
        let d = [RsspTask::new(0, 1, 1, 1000), RsspTask::new(1, 1, 1, 1000), RsspTask::new(2, 1, 1, 1000)];
        assert!(matches!(
            brute_force_rssp(&TRADE, &d, &[], 1000, 1_000_000),
            Err(SolveError::SearchSpaceTooLarge { .. })
        ));
    }
}
