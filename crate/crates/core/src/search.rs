//! Depth-first branch and bound over due-date assignments, shared by the
//! master problem and the exhaustive oracle.

use std::collections::HashMap;

use crate::budget::{Budget, Exhausted};
use crate::expectation::FlowCache;
use crate::model::StaticInstance;

pub(crate) const UNASSIGNED: usize = usize::MAX;

/// Problem-specific feasibility filter. `extend` is called after a job takes
/// an index; `retract` is always called afterwards, even when `extend`
/// rejected the extension.
pub(crate) trait Pruner {
    fn extend(
        &mut self,
        instance: &StaticInstance,
        assign: &[usize],
        job: usize,
        index: usize,
    ) -> Result<bool, Exhausted>;

    fn retract(&mut self, instance: &StaticInstance, job: usize, index: usize);
}

/// Admissible domain of every job: from its earliest attainable index up to `B`.
pub(crate) fn job_domains(instance: &StaticInstance) -> Vec<Vec<usize>> {
    let b = instance.due_dates().b_index();
    (0..instance.job_count())
        .map(|j| (instance.earliest_due_index(j).min(b)..=b).collect())
        .collect()
}

/// Branching order: larger total area first, then smaller job id.
pub(crate) fn branching_order(instance: &StaticInstance) -> Vec<usize> {
    let mut order: Vec<usize> = (0..instance.job_count()).collect();
    order.sort_by_key(|&j| (std::cmp::Reverse(instance.jobs[j].total_area()), j));
    order
}

pub(crate) struct SearchOutcome {
    pub best: Option<(u32, Vec<usize>)>,
    pub exhausted: bool,
}

pub(crate) struct BranchAndBound<'a, P> {
    instance: &'a StaticInstance,
    pruner: P,
    budget: &'a Budget,
    use_bound: bool,
    min_value: u32,
    order: Vec<usize>,
    domains: Vec<Vec<usize>>,
    /// Search stops as soon as an accepted leaf reaches this value.
    ceiling: Option<u32>,
    cache: FlowCache,
    assign: Vec<usize>,
    /// Arrivals of assigned jobs.
    arrivals: Vec<Vec<u32>>,
    /// `pending[d][k]`: earliest real indices of type-`k` jobs at order
    /// positions `d..`, ascending. Jobs that can only go to `B` are left out.
    pending: Vec<Vec<Vec<usize>>>,
    completion: HashMap<(usize, usize, Vec<u32>), u32>,
    best: Option<(u32, Vec<usize>)>,
}

impl<'a, P: Pruner> BranchAndBound<'a, P> {
    pub fn new(instance: &'a StaticInstance, pruner: P, budget: &'a Budget) -> Self {
        let waves = instance.wave_count();
        let domains = job_domains(instance);
        let order = branching_order(instance);
        let mut pending = vec![vec![Vec::new(); instance.type_count()]; order.len() + 1];
        for d in (0..order.len()).rev() {
            pending[d] = pending[d + 1].clone();
            let j = order[d];
            if domains[j][0] < waves {
                let list = &mut pending[d][instance.jobs[j].type_id];
                list.push(domains[j][0]);
                list.sort_unstable();
            }
        }
        Self {
            instance,
            pruner,
            budget,
            use_bound: true,
            min_value: 0,
            order,
            domains,
            ceiling: None,
            cache: FlowCache::new(instance),
            assign: vec![UNASSIGNED; instance.job_count()],
            arrivals: vec![vec![0u32; waves]; instance.type_count()],
            pending,
            completion: HashMap::new(),
            best: None,
        }
    }

    pub fn use_bound(mut self, on: bool) -> Self {
        self.use_bound = on;
        self
    }

    /// Only assignments worth at least `value` are accepted.
    pub fn min_value(mut self, value: u32) -> Self {
        self.min_value = value;
        self
    }

    /// Starts from a known feasible assignment.
    pub fn incumbent(mut self, value: u32, assignment: Vec<usize>) -> Self {
        if value >= self.min_value {
            self.best = Some((value, assignment));
        }
        self
    }

    /// Known upper bound on the optimum; reaching it ends the search early.
    pub fn ceiling(mut self, value: u32) -> Self {
        self.ceiling = Some(value);
        self
    }

    pub fn run(mut self) -> SearchOutcome {
        if self.use_bound {
            let root = self.bound(0);
            self.ceiling = Some(self.ceiling.map_or(root, |c| c.min(root)));
        }
        let exhausted = match self.dfs(0) {
            Ok(()) | Err(Stop::Done) => false,
            Err(Stop::Exhausted) => true,
        };
        SearchOutcome { best: self.best, exhausted }
    }

    /// Best objective over all completions of the current node, ignoring
    /// capacity. Arrivals only ever help, so each pending job is placed on
    /// some real wave; for each type every such placement is tried.
    fn bound(&mut self, depth: usize) -> u32 {
        let mut total = 0;
        for k in 0..self.instance.type_count() {
            let key = (depth, k, self.arrivals[k].clone());
            if let Some(&v) = self.completion.get(&key) {
                total += v;
                continue;
            }
            let mut u = self.arrivals[k].clone();
            let jobs = self.pending[depth][k].clone();
            let v = self.best_completion(k, &jobs, 0, 0, &mut u);
            self.completion.insert(key, v);
            total += v;
        }
        total
    }

    fn best_completion(&mut self, k: usize, jobs: &[usize], i: usize, from: usize, u: &mut [u32]) -> u32 {
        if i == jobs.len() {
            return self.cache.type_value(self.instance, k, u);
        }
        // Equal earliest indices are interchangeable: keep choices non-decreasing.
        let lo = if i > 0 && jobs[i] == jobs[i - 1] { from } else { jobs[i] };
        let mut best = 0;
        for w in lo..u.len() {
            u[w] += 1;
            best = best.max(self.best_completion(k, jobs, i + 1, w, u));
            u[w] -= 1;
        }
        best
    }

    fn worth_exploring(&mut self, depth: usize) -> bool {
        if !self.use_bound {
            return true;
        }
        let b = self.bound(depth);
        b >= self.min_value && self.best.as_ref().is_none_or(|(v, _)| b > *v)
    }

    fn dfs(&mut self, depth: usize) -> Result<(), Stop> {
        self.budget.tick().map_err(|_| Stop::Exhausted)?;
        if depth == self.order.len() {
            let value = self.cache.value(self.instance, &self.arrivals);
            let improves = self.best.as_ref().is_none_or(|(v, _)| value > *v);
            if value >= self.min_value && improves {
                self.best = Some((value, self.assign.clone()));
                if self.ceiling.is_some_and(|c| value >= c) {
                    return Err(Stop::Done);
                }
            }
            return Ok(());
        }
        if !self.worth_exploring(depth) {
            return Ok(());
        }
        let job = self.order[depth];
        let k = self.instance.jobs[job].type_id;
        let waves = self.instance.wave_count();
        let mut result = Ok(());
        for vi in 0..self.domains[job].len() {
            let index = self.domains[job][vi];
            self.assign[job] = index;
            if index < waves {
                self.arrivals[k][index] += 1;
            }
            let ok = self.pruner.extend(self.instance, &self.assign, job, index);
            let step = match ok {
                Ok(true) => self.dfs(depth + 1),
                Ok(false) => Ok(()),
                Err(Exhausted) => Err(Stop::Exhausted),
            };
            self.pruner.retract(self.instance, job, index);
            if index < waves {
                self.arrivals[k][index] -= 1;
            }
            self.assign[job] = UNASSIGNED;
            if step.is_err() {
                result = step;
                break;
            }
        }
        result
    }
}

enum Stop {
    Done,
    Exhausted,
}

/// Incremental per-trade area bookkeeping for the relaxations.
#[derive(Debug, Clone)]
pub(crate) struct AreaLedger {
    /// `area[r][i]`: area of assigned jobs on trade `r` due at index `i < |W|`.
    area: Vec<Vec<i64>>,
    unassigned: Vec<usize>,
}

impl AreaLedger {
    pub fn new(instance: &StaticInstance) -> Self {
        let waves = instance.wave_count();
        Self {
            area: vec![vec![0; waves]; instance.trades.len()],
            unassigned: (0..instance.trades.len())
                .map(|r| instance.trade_members(r).len())
                .collect(),
        }
    }

    pub fn apply(&mut self, instance: &StaticInstance, job: usize, index: usize, sign: i64) {
        let waves = instance.wave_count();
        for op in &instance.jobs[job].operations {
            let r = op.trade_id;
            if sign > 0 {
                self.unassigned[r] -= 1;
            } else {
                self.unassigned[r] += 1;
            }
            if index < waves {
                self.area[r][index] += sign * op.area();
            }
        }
    }

    pub fn unassigned(&self, trade: usize) -> usize {
        self.unassigned[trade]
    }

    /// Every prefix of due dates carries no more area than it can hold.
    pub fn tight_ok(&self, instance: &StaticInstance, trade: usize) -> bool {
        let cap = i64::from(instance.trades[trade].capacity);
        let dates = instance.due_dates();
        let mut prefix = 0;
        for (i, a) in self.area[trade].iter().enumerate() {
            prefix += a;
            if prefix > cap * dates.date(i) {
                return false;
            }
        }
        true
    }

    /// Total area fits before the latest due date the trade can still end up with.
    pub fn basic_ok(&self, instance: &StaticInstance, trade: usize) -> bool {
        let cap = i64::from(instance.trades[trade].capacity);
        let dates = instance.due_dates();
        let total: i64 = self.area[trade].iter().sum();
        if total == 0 {
            return true;
        }
        let latest = if self.unassigned[trade] > 0 {
            dates.horizon_end()
        } else {
            let last = self.area[trade].iter().rposition(|&a| a > 0).expect("positive area");
            dates.date(last)
        };
        total <= cap * latest
    }
}
