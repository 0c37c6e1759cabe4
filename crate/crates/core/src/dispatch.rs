//! Dispatching heuristic: rank jobs by urgency, then place every operation at
//! the earliest time its trade has room.
//!
//! The rank index of job `j` is `ST * exp(-FN / FC)`, where `ST` is the start
//! of the first wave needing the job's type, `FN` the share of that type the
//! wave asks for, and `FC` the largest share of trade capacity the job would
//! need to finish by `ST`.

use serde::{Deserialize, Serialize};

use crate::expectation::{objective_of, DueDateAssignment, FlowPlan};
use crate::lbbd::{ExecutableSchedule, PlannedOp};
use crate::model::{StaticInstance, Time};
use crate::profile::CapacityProfile;
use crate::rssp::{ScheduledOp, TradeSchedule};

/// Denominator of `FN`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FnDenominator {
    /// Members of the type.
    #[default]
    Members,
    /// Requirement for the type summed over all waves.
    TotalRequirement,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DispatchConfig {
    pub fn_denominator: FnDenominator,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RankIndex {
    pub job_id: usize,
    pub st: Time,
    pub fn_share: f64,
    pub fc_share: f64,
    pub value: f64,
}

/// Rank index of one job.
pub fn rank_index(instance: &StaticInstance, job: usize, config: &DispatchConfig) -> RankIndex {
    let j = &instance.jobs[job];
    let k = j.type_id;
    let first = instance.waves.iter().find(|w| w.requirement[k] > 0);
    let st = first.map_or(instance.due_dates().b(), |w| w.start_time);
    let required = first.map_or(0, |w| w.requirement[k]);
    let denom = match config.fn_denominator {
        FnDenominator::Members => instance.types[k].member_count,
        FnDenominator::TotalRequirement => instance.waves.iter().map(|w| w.requirement[k]).sum(),
    };
    let fn_share = if denom == 0 { 0.0 } else { f64::from(required) / f64::from(denom) };
    if st <= 0 {
        return RankIndex { job_id: job, st, fn_share, fc_share: f64::INFINITY, value: 0.0 };
    }
    let fc_share = j
        .operations
        .iter()
        .map(|op| op.area() as f64 / (st as f64 * f64::from(instance.trades[op.trade_id].capacity)))
        .fold(0.0, f64::max);
    let value = if fc_share > 0.0 {
        st as f64 * (-fn_share / fc_share).exp()
    } else {
        st as f64
    };
    RankIndex { job_id: job, st, fn_share, fc_share, value }
}

/// Jobs in ascending rank index; ties go to the smaller job id.
pub fn rank_jobs(instance: &StaticInstance, config: &DispatchConfig) -> Vec<usize> {
    let mut idx: Vec<RankIndex> =
        (0..instance.job_count()).map(|j| rank_index(instance, j, config)).collect();
    idx.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.job_id.cmp(&b.job_id)));
    idx.into_iter().map(|r| r.job_id).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DispatchResult {
    pub order: Vec<usize>,
    pub schedules: Vec<TradeSchedule>,
    pub executable: ExecutableSchedule,
    pub assignment: DueDateAssignment,
    pub flow: FlowPlan,
    pub objective: u32,
}

/// Places jobs in `order`, each operation at its earliest fit on its own
/// trade. Committed operations are placed first and never move.
pub fn schedule_greedy(instance: &StaticInstance, order: &[usize]) -> DispatchResult {
    let n_trades = instance.trades.len();
    let mut profiles = vec![CapacityProfile::new(); n_trades];
    let mut per_trade: Vec<Vec<ScheduledOp>> = vec![Vec::new(); n_trades];
    let mut planned = Vec::new();
    for (j, job) in instance.jobs.iter().enumerate() {
        for op in &job.operations {
            if let Some(s) = op.fixed_start {
                let end = s + op.processing_time;
                profiles[op.trade_id].add(s, end, op.capacity_demand);
                per_trade[op.trade_id].push(ScheduledOp {
                    job: j,
                    start: s,
                    end,
                    demand: op.capacity_demand,
                    fixed: true,
                });
            }
        }
    }
    for &j in order {
        for op in instance.jobs[j].operations.iter().filter(|op| op.fixed_start.is_none()) {
            let r = op.trade_id;
            let s = profiles[r].earliest_fit(
                0,
                op.processing_time,
                op.capacity_demand,
                instance.trades[r].capacity,
            );
            let end = s + op.processing_time;
            profiles[r].add(s, end, op.capacity_demand);
            per_trade[r].push(ScheduledOp { job: j, start: s, end, demand: op.capacity_demand, fixed: false });
        }
    }
    let mut ready = vec![0; instance.job_count()];
    for (r, ops) in per_trade.iter().enumerate() {
        for o in ops {
            ready[o.job] = ready[o.job].max(o.end);
            planned.push(PlannedOp { job: o.job, trade_id: r, start: o.start, end: o.end, demand: o.demand });
        }
    }
    planned.sort_by_key(|o| (o.job, o.trade_id));
    let dates = instance.due_dates();
    let assignment =
        DueDateAssignment::new(ready.iter().map(|&t| dates.first_index_at_or_after(t)).collect());
    let flow = objective_of(&assignment, instance);
    let schedules = per_trade
        .into_iter()
        .enumerate()
        .map(|(trade_id, ops)| TradeSchedule { trade_id, ops })
        .collect();
    DispatchResult {
        order: order.to_vec(),
        schedules,
        executable: ExecutableSchedule { ops: planned, ready },
        assignment,
        objective: flow.objective,
        flow,
    }
}

/// Rank, then schedule.
pub fn dispatch(instance: &StaticInstance, config: &DispatchConfig) -> DispatchResult {
    schedule_greedy(instance, &rank_jobs(instance, config))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::single_trade;

    #[test]
    fn worked_rank_value() {
        // ST = 10, p c = 20, C = 10 gives FC = 0.2; FN = 1 / 2.
        let mut inst = single_trade(10, &[10], &[(4, 5)]);
        inst.types[0].member_count = 2;
        let r = rank_index(&inst, 0, &DispatchConfig::default());
        assert!((r.fc_share - 0.2).abs() < 1e-12);
        assert!((r.fn_share - 0.5).abs() < 1e-12);
        assert!((r.value - 10.0 * (-2.5f64).exp()).abs() < 1e-12);
        assert!((r.value - 0.8208).abs() < 1e-4);
    }

    #[test]
    fn earlier_need_ranks_first() {
        // Equal FN / FC ratios, so only ST separates the two jobs.
        let inst = single_trade(10, &[10, 20], &[(8, 5), (4, 5)]);
        let mut two = inst.clone();
        two.types.push(two.types[0].clone());
        two.types[1].id = 1;
        for w in &mut two.waves {
            w.requirement = vec![0, 1];
        }
        two.waves[0].requirement = vec![1, 0];
        two.jobs[0].type_id = 1;
        let two = StaticInstance::new(two.types, two.aircraft, two.trades, two.waves, two.jobs).unwrap();
        assert_eq!(rank_jobs(&two, &DispatchConfig::default()), vec![1, 0]);
    }

    #[test]
    fn greedy_places_after_fixed_ops() {
        let mut inst = single_trade(10, &[10], &[(4, 8), (3, 5)]);
        inst.jobs[1].operations[0].fixed_start = Some(0);
        let inst =
            StaticInstance::new(inst.types, inst.aircraft, inst.trades, inst.waves, inst.jobs).unwrap();
        let res = dispatch(&inst, &DispatchConfig::default());
        assert_eq!(res.executable.ready, vec![7, 3]);
        assert_eq!(res.assignment.due_index, vec![0, 0]);
        crate::rssp::audit_capacity(10, &res.schedules[0].ops, 0, 50).unwrap();
    }

    #[test]
    fn empty_shop_scores_ready_aircraft_only() {
        let inst = single_trade(10, &[10, 20], &[]);
        let res = dispatch(&inst, &DispatchConfig::default());
        assert_eq!(res.objective, 2);
        assert!(res.order.is_empty());
    }
}
