//! Small random instances for differential tests against brute force.

use rand::Rng;

use crate::expectation::failure_probabilities;
use crate::model::{
    validate_instance, Aircraft, AircraftType, Operation, RepairJob, StaticInstance, Time, Trade, Wave,
};
use crate::rng::{stream, StreamRng};
use crate::rssp::{FixedBlock, RsspTask};

pub struct MicroRssp {
    pub trade: Trade,
    pub tasks: Vec<RsspTask>,
    pub blocks: Vec<FixedBlock>,
    pub horizon: Time,
}

/// At most six operations on a horizon of at most 20.
pub fn micro_rssp(seed: u64) -> MicroRssp {
    let mut rng = stream(seed, "micro-rssp", &[]);
    let capacity = rng.gen_range(2..=6);
    let horizon = rng.gen_range(4..=20);
    let n = rng.gen_range(1..=6);
    let n_blocks = if n > 1 { rng.gen_range(0..=1) } else { 0 };
    let mut tasks = Vec::new();
    let mut blocks = Vec::new();
    for job in 0..n {
        let duration = rng.gen_range(1..=6.min(horizon));
        let demand = rng.gen_range(1..=capacity);
        if job < n_blocks {
            blocks.push(FixedBlock { job, start: rng.gen_range(0..horizon), duration, demand });
            continue;
        }
        let deadline = rng.gen_range(duration..=horizon);
        let mut t = RsspTask::new(job, duration, demand, deadline);
        if rng.gen_bool(0.1) {
            t.fixed_start = Some(rng.gen_range(0..=deadline - duration));
        }
        tasks.push(t);
    }
    MicroRssp { trade: Trade { id: 0, capacity }, tasks, blocks, horizon }
}

fn draw_type(rng: &mut StreamRng, id: usize, members: u32, ready: u32) -> AircraftType {
    let rate = rng.gen_range(0.0..0.5);
    let (pre, post) = failure_probabilities(rate).unwrap();
    AircraftType {
        id,
        member_count: members,
        ready_count: ready,
        mean_failure_rate: rate,
        pre_fail_prob: pre,
        post_fail_prob: post,
    }
}

/// Small static instance with every job on one or more trades.
///
/// Panics if the draw fails validation, which would be a generator bug.
pub fn micro_instance(seed: u64, jobs: usize, waves: usize, trades: usize, zero_failure: bool) -> StaticInstance {
    let mut rng = stream(seed, "micro-instance", &[]);
    let n_types = rng.gen_range(1..=2usize);
    let mut job_types: Vec<usize> = (0..jobs).map(|j| j % n_types).collect();
    job_types.sort_unstable();
    let mut types = Vec::new();
    let mut aircraft = Vec::new();
    for k in 0..n_types {
        let in_shop = job_types.iter().filter(|&&t| t == k).count() as u32;
        let ready = rng.gen_range(0..=2);
        let mut t = draw_type(&mut rng, k, in_shop + ready, ready);
        if zero_failure {
            t.mean_failure_rate = 0.0;
            t.pre_fail_prob = 0.0;
            t.post_fail_prob = 0.0;
        }
        for _ in 0..t.member_count {
            aircraft.push(Aircraft {
                id: aircraft.len(),
                type_id: k,
                failure_rate: t.mean_failure_rate,
                pre_failure_rate: t.mean_failure_rate,
            });
        }
        types.push(t);
    }
    let trade_list: Vec<Trade> = (0..trades).map(|id| Trade { id, capacity: rng.gen_range(3..=10) }).collect();
    let mut job_list = Vec::new();
    let mut next_aircraft = vec![0usize; n_types];
    for (j, &k) in job_types.iter().enumerate() {
        let members: Vec<usize> = aircraft.iter().filter(|a| a.type_id == k).map(|a| a.id).collect();
        let aircraft_id = members[next_aircraft[k]];
        next_aircraft[k] += 1;
        let mut ops = Vec::new();
        for r in 0..trades {
            if ops.is_empty() && r + 1 == trades || rng.gen_bool(0.5) {
                let cap = trade_list[r].capacity;
                ops.push(Operation::new(r, rng.gen_range(1..=8), rng.gen_range(1..=cap)));
            }
        }
        job_list.push(RepairJob { id: j, type_id: k, aircraft_id, operations: ops });
    }
    let mut wave_list = Vec::new();
    let mut t = rng.gen_range(3..=10);
    for id in 0..waves {
        let end = t + rng.gen_range(2..=4);
        let requirement = types.iter().map(|ty| rng.gen_range(0..=ty.member_count.max(1))).collect();
        wave_list.push(Wave { id, start_time: t, end_time: end, requirement });
        t = end + rng.gen_range(1..=8);
    }
    let inst = StaticInstance::new(types, aircraft, trade_list, wave_list, job_list).unwrap();
    assert!(validate_instance(&inst).is_ok(), "{}", validate_instance(&inst));
    inst
}
