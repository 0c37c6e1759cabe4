//! Seeded simulation of the repair shop over a sequence of waves.
//!
//! Each wave: finished repairs release their aircraft, every ready aircraft
//! takes a pre-flight check, flyers are drawn from those that pass, and flyers
//! take a post-flight check when the wave ends. After every `j`-th wave the
//! shop is rescheduled over the next `i` waves (policy `Pij`), with operations
//! already under way frozen in place.
//!
//! Failure draws come from counter-keyed streams indexed by aircraft, wave and
//! check, so the scheduler in use never shifts the random numbers another
//! aircraft sees.

use std::time::Instant;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::budget::BudgetSpec;
use crate::dispatch::{dispatch, DispatchConfig};
use crate::error::SimError;
use crate::expectation::failure_probabilities;
use crate::genlab::{gen_failure_job, DynamicScenario};
use crate::lbbd::{extract_executable_schedule, solve_lbbd, ExecutableSchedule, LbbdConfig, SolveStatus};
use crate::model::{
    validate_instance, Aircraft, AircraftType, Operation, RepairJob, StaticInstance, Time, Wave,
};
use crate::oracle::{solve_global, OracleConfig};
use crate::rng::{stream, uniform};

/// Reschedule over `horizon_waves` waves after every `every` waves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Policy {
    pub horizon_waves: usize,
    pub every: usize,
}

impl Policy {
    pub const P11: Policy = Policy { horizon_waves: 1, every: 1 };
    pub const P31: Policy = Policy { horizon_waves: 3, every: 1 };
    pub const P33: Policy = Policy { horizon_waves: 3, every: 3 };

    pub fn new(horizon_waves: usize, every: usize) -> Result<Self, SimError> {
        if every == 0 || every > horizon_waves {
            return Err(SimError::Policy { horizon: horizon_waves, every });
        }
        Ok(Self { horizon_waves, every })
    }

    pub fn label(&self) -> String {
        format!("P{}{}", self.horizon_waves, self.every)
    }

    /// Parses labels like `P31`; both numbers must be single digits.
    pub fn parse(s: &str) -> Result<Self, SimError> {
        let digits: Vec<u32> = s
            .strip_prefix(['P', 'p'])
            .unwrap_or(s)
            .chars()
            .map(|c| c.to_digit(10))
            .collect::<Option<_>>()
            .ok_or(SimError::Policy { horizon: 0, every: 0 })?;
        match digits[..] {
            [i, j] => Self::new(i as usize, j as usize),
            _ => Err(SimError::Policy { horizon: 0, every: 0 }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum Scheduler {
    Lbbd(LbbdConfig),
    Dispatch,
    Oracle(OracleConfig),
    /// Capacity-free reference: every repair takes its longest operation.
    Relaxed,
}

impl Scheduler {
    pub fn label(&self) -> String {
        match self {
            Scheduler::Lbbd(c) => format!("lbbd-{}", c.label()),
            Scheduler::Dispatch => "dispatch".into(),
            Scheduler::Oracle(c) if c.placement == crate::rssp::Placement::Latest => "oracle-late".into(),
            Scheduler::Oracle(_) => "oracle".into(),
            Scheduler::Relaxed => "relaxed".into(),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        use crate::master::Relaxation;
        Some(match s {
            "lbbd" | "lbbd-tight" => Scheduler::Lbbd(LbbdConfig::new(Relaxation::Tight, false)),
            "lbbd-basic" => Scheduler::Lbbd(LbbdConfig::new(Relaxation::Basic, false)),
            "lbbd-tight+hybrid" => Scheduler::Lbbd(LbbdConfig::new(Relaxation::Tight, true)),
            "lbbd-basic+hybrid" => Scheduler::Lbbd(LbbdConfig::new(Relaxation::Basic, true)),
            "dispatch" => Scheduler::Dispatch,
            "oracle" => Scheduler::Oracle(OracleConfig::default()),
            "oracle-late" | "oracle-lateMode" => Scheduler::Oracle(OracleConfig::late_mode()),
            "relaxed" => Scheduler::Relaxed,
            _ => return None,
        })
    }
}

/// How per-wave coverage is normalized.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum CoverageMode {
    /// Aircraft flown over aircraft required, all types pooled.
    #[default]
    Pooled,
    /// Mean over types with a positive requirement of flown over required.
    PerTypeMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimConfig {
    pub policy: Policy,
    pub scheduler: Scheduler,
    pub budget: BudgetSpec,
    pub coverage: CoverageMode,
    /// Added to every aircraft's failure rate when the scenario is loaded.
    pub lambda_shift: f64,
}

impl SimConfig {
    pub fn new(policy: Policy, scheduler: Scheduler, budget: BudgetSpec) -> Self {
        Self { policy, scheduler, budget, coverage: CoverageMode::Pooled, lambda_shift: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum AircraftStatus {
    Ready,
    InShop,
    Flying,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Check {
    Pre,
    Post,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct ShopOp {
    trade_id: usize,
    processing_time: Time,
    demand: u32,
    /// Absolute planned start; `None` until a schedule covers the op.
    planned: Option<Time>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct ShopJob {
    id: usize,
    aircraft: usize,
    type_id: usize,
    failed_at: Time,
    ops: Vec<ShopOp>,
}

impl ShopJob {
    fn finish_time(&self) -> Option<Time> {
        self.ops
            .iter()
            .map(|o| o.planned.map(|s| s + o.processing_time))
            .try_fold(self.failed_at, |acc, e| e.map(|e| acc.max(e)))
    }
}

/// An operation that ran in the shop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExecutedOp {
    pub job: usize,
    pub aircraft: usize,
    pub trade_id: usize,
    pub start: Time,
    pub end: Time,
    pub demand: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RepairEvent {
    pub aircraft: usize,
    pub failed_at: Time,
    pub check: Option<Check>,
    pub ready_at: Time,
    pub rate_at_failure: f64,
    pub rate_after_repair: f64,
}

/// Live state of one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimState {
    pub clock: Time,
    pub status: Vec<AircraftStatus>,
    pub failure_rate: Vec<f64>,
    pub pre_failure_rate: Vec<f64>,
    shop: Vec<ShopJob>,
    next_job_id: usize,
    failure_check: Vec<Option<Check>>,
}

impl SimState {
    pub fn ready_count(&self) -> usize {
        self.status.iter().filter(|&&s| s == AircraftStatus::Ready).count()
    }

    pub fn shop_size(&self) -> usize {
        self.shop.len()
    }
}

/// Everything recorded for one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimTrace {
    pub policy: String,
    pub scheduler: String,
    pub seed: u64,
    pub replication: u64,
    /// Per wave: coverage in `[0, 1]`.
    pub nu: Vec<f64>,
    /// Per wave: mean coverage so far.
    pub running: Vec<f64>,
    /// Per wave: ready share of the fleet, on the first wave of each schedule.
    pub epoch_rho: Vec<Option<f64>>,
    /// Per wave: solve time of the schedule that starts at this wave.
    pub decision_ms: Vec<f64>,
    pub epochs: u32,
    pub timeouts: u32,
    pub fallbacks: u32,
    pub executed: Vec<ExecutedOp>,
    pub repairs: Vec<RepairEvent>,
    /// Aircraft that flew, per wave.
    pub flights: Vec<Vec<usize>>,
}

impl SimTrace {
    /// Mean coverage over the first `w` waves (`w` is one-based).
    pub fn o_at(&self, w: usize) -> f64 {
        self.running[w.clamp(1, self.running.len()) - 1]
    }

    pub fn rho_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.epoch_rho.iter().flatten().copied()
    }
}

struct Runner<'a> {
    scenario: &'a DynamicScenario,
    config: &'a SimConfig,
    seed: u64,
    replication: u64,
    state: SimState,
    trace: SimTrace,
}

/// Runs one replication. Deterministic in `(scenario, config, seed,
/// replication)` as long as no solve hits a wall-clock limit.
pub fn run_simulation(
    scenario: &DynamicScenario,
    config: &SimConfig,
    seed: u64,
    replication: u64,
) -> Result<SimTrace, SimError> {
    Policy::new(config.policy.horizon_waves, config.policy.every)?;
    let mut state = initial_state(scenario);
    for (rate, pre) in state.failure_rate.iter_mut().zip(&mut state.pre_failure_rate) {
        *rate = (*rate + config.lambda_shift).max(0.0);
        *pre = *rate;
    }
    if matches!(config.scheduler, Scheduler::Relaxed) {
        for op in state.shop.iter_mut().flat_map(|j| j.ops.iter_mut()) {
            op.planned = Some(0);
        }
    }
    let waves = scenario.waves.len();
    let mut runner = Runner {
        scenario,
        config,
        seed,
        replication,
        state,
        trace: SimTrace {
            policy: config.policy.label(),
            scheduler: config.scheduler.label(),
            seed,
            replication,
            nu: Vec::with_capacity(waves),
            running: Vec::with_capacity(waves),
            epoch_rho: vec![None; waves],
            decision_ms: vec![0.0; waves],
            epochs: 0,
            timeouts: 0,
            fallbacks: 0,
            executed: Vec::new(),
            repairs: Vec::new(),
            flights: Vec::with_capacity(waves),
        },
    };
    runner.run()?;
    Ok(runner.trace)
}

impl Runner<'_> {
    fn relaxed(&self) -> bool {
        matches!(self.config.scheduler, Scheduler::Relaxed)
    }

    fn run(&mut self) -> Result<(), SimError> {
        let waves = self.scenario.waves.len();
        let policy = self.config.policy;
        self.reschedule(0, 0)?;
        let mut epoch_first = 0;
        let mut sum = 0.0;
        for w in 0..waves {
            let wave = self.scenario.waves[w].clone();
            self.state.clock = wave.start_time;
            self.complete_jobs(wave.start_time);
            if w == epoch_first {
                let rho = self.state.ready_count() as f64 / self.state.status.len() as f64;
                self.trace.epoch_rho[w] = Some(rho);
            }
            let flyers = self.fly_wave(w, &wave);
            let nu = self.coverage(&wave, &flyers);
            sum += nu;
            self.trace.nu.push(nu);
            self.trace.running.push(sum / (w + 1) as f64);

            self.state.clock = wave.end_time;
            self.land(w, &wave, &flyers);
            self.trace.flights.push(flyers);

            if (w + 1 - epoch_first) % policy.every == 0 && w + 1 < waves {
                epoch_first = w + 1;
                self.complete_jobs(wave.end_time);
                self.reschedule(wave.end_time, epoch_first)?;
            }
        }
        self.finish();
        Ok(())
    }

    /// Pre-flight checks of every ready aircraft, then flyer selection.
    fn fly_wave(&mut self, w: usize, wave: &Wave) -> Vec<usize> {
        let n_types = self.scenario.types.len();
        let mut passed = vec![Vec::new(); n_types];
        for a in 0..self.state.status.len() {
            if self.state.status[a] != AircraftStatus::Ready {
                continue;
            }
            if self.fails(a, w, Check::Pre) {
                self.fail(a, w, Check::Pre, wave.start_time);
            } else {
                passed[self.scenario.aircraft[a].type_id].push(a);
            }
        }
        let mut flyers = Vec::new();
        for (k, mut group) in passed.into_iter().enumerate() {
            let need = wave.requirement[k] as usize;
            if group.len() > need {
                let mut rng = stream(self.seed, "select", &[self.replication, w as u64, k as u64]);
                group.shuffle(&mut rng);
                group.truncate(need);
                group.sort_unstable();
            }
            flyers.extend(group);
        }
        for &a in &flyers {
            self.state.status[a] = AircraftStatus::Flying;
        }
        flyers
    }

    /// Deterioration and post-flight checks at the end of a wave.
    fn land(&mut self, w: usize, wave: &Wave, flyers: &[usize]) {
        let growth = 1.0 + 0.01 * self.scenario.deterioration_pct;
        for &a in flyers {
            self.state.failure_rate[a] *= growth;
            if self.fails(a, w, Check::Post) {
                self.fail(a, w, Check::Post, wave.end_time);
            } else {
                self.state.status[a] = AircraftStatus::Ready;
            }
        }
    }

    fn fails(&self, a: usize, w: usize, check: Check) -> bool {
        let (pre, post) = failure_probabilities(self.state.failure_rate[a]).expect("rates stay non-negative");
        let p = match check {
            Check::Pre => pre,
            Check::Post => post,
        };
        let tag = match check {
            Check::Pre => "pre",
            Check::Post => "post",
        };
        uniform(self.seed, tag, &[self.replication, a as u64, w as u64]) < p
    }

    fn fail(&mut self, a: usize, w: usize, check: Check, at: Time) {
        self.state.pre_failure_rate[a] = self.state.failure_rate[a];
        self.state.status[a] = AircraftStatus::InShop;
        self.state.failure_check[a] = Some(check);
        let c = match check {
            Check::Pre => 0,
            Check::Post => 1,
        };
        let mut rng = stream(self.seed, "job", &[self.replication, a as u64, w as u64, c]);
        let id = self.state.next_job_id;
        self.state.next_job_id += 1;
        let job = gen_failure_job(id, &self.scenario.aircraft[a], &self.scenario.trades, &mut rng);
        let relaxed = self.relaxed();
        let max_p = job.max_processing_time();
        self.state.shop.push(ShopJob {
            id,
            aircraft: a,
            type_id: job.type_id,
            failed_at: at,
            ops: job
                .operations
                .iter()
                .map(|op| ShopOp {
                    trade_id: op.trade_id,
                    processing_time: op.processing_time,
                    demand: op.capacity_demand,
                    // The relaxed shop starts every operation at once.
                    planned: relaxed.then_some(at),
                })
                .collect(),
        });
        debug_assert!(!relaxed || self.state.shop.last().unwrap().finish_time() == Some(at + max_p));
    }

    fn coverage(&self, wave: &Wave, flyers: &[usize]) -> f64 {
        let mut flown = vec![0u32; wave.requirement.len()];
        for &a in flyers {
            flown[self.scenario.aircraft[a].type_id] += 1;
        }
        match self.config.coverage {
            CoverageMode::Pooled => {
                let need: u32 = wave.requirement.iter().sum();
                if need == 0 {
                    1.0
                } else {
                    f64::from(flown.iter().sum::<u32>()) / f64::from(need)
                }
            }
            CoverageMode::PerTypeMean => {
                let shares: Vec<f64> = wave
                    .requirement
                    .iter()
                    .zip(&flown)
                    .filter(|(&a, _)| a > 0)
                    .map(|(&a, &f)| f64::from(f) / f64::from(a))
                    .collect();
                if shares.is_empty() {
                    1.0
                } else {
                    shares.iter().sum::<f64>() / shares.len() as f64
                }
            }
        }
    }

    /// Releases every aircraft whose repair is finished by `t`.
    fn complete_jobs(&mut self, t: Time) {
        let mut remaining = Vec::with_capacity(self.state.shop.len());
        for job in std::mem::take(&mut self.state.shop) {
            match job.finish_time() {
                Some(done) if done <= t => {
                    let a = job.aircraft;
                    let before = self.state.failure_rate[a];
                    self.state.failure_rate[a] = self.state.pre_failure_rate[a];
                    self.state.status[a] = AircraftStatus::Ready;
                    self.trace.repairs.push(RepairEvent {
                        aircraft: a,
                        failed_at: job.failed_at,
                        check: self.state.failure_check[a].take(),
                        ready_at: done,
                        rate_at_failure: before,
                        rate_after_repair: self.state.failure_rate[a],
                    });
                    if !self.relaxed() {
                        self.record_executed(&job);
                    }
                }
                _ => remaining.push(job),
            }
        }
        self.state.shop = remaining;
    }

    fn record_executed(&mut self, job: &ShopJob) {
        for op in &job.ops {
            let start = op.planned.expect("finished ops are planned");
            self.trace.executed.push(ExecutedOp {
                job: job.id,
                aircraft: job.aircraft,
                trade_id: op.trade_id,
                start,
                end: start + op.processing_time,
                demand: op.demand,
            });
        }
    }

    /// Operations of unfinished repairs that had started by the last clock.
    fn finish(&mut self) {
        if self.relaxed() {
            return;
        }
        let clock = self.state.clock;
        for job in &self.state.shop {
            for op in &job.ops {
                if let Some(start) = op.planned.filter(|&s| s < clock) {
                    self.trace.executed.push(ExecutedOp {
                        job: job.id,
                        aircraft: job.aircraft,
                        trade_id: op.trade_id,
                        start,
                        end: start + op.processing_time,
                        demand: op.demand,
                    });
                }
            }
        }
    }

    /// Solves the shop over waves `first..first + i` from clock `at` and
    /// commits the result.
    fn reschedule(&mut self, at: Time, first: usize) -> Result<(), SimError> {
        if self.relaxed() {
            return Ok(());
        }
        let (instance, job_map) = build_subproblem(&self.state, self.scenario, self.config.policy, at, first);
        let start = Instant::now();
        let plan = self.solve(&instance, at)?;
        self.trace.decision_ms[first] = start.elapsed().as_secs_f64() * 1e3;
        self.trace.epochs += 1;
        for op in &plan.ops {
            let job = &mut self.state.shop[job_map[op.job]];
            let shop_op = job
                .ops
                .iter_mut()
                .find(|o| o.trade_id == op.trade_id)
                .expect("planned op exists");
            if shop_op.planned.is_some_and(|s| s < at) {
                continue;
            }
            shop_op.planned = Some(at + op.start);
        }
        Ok(())
    }

    fn solve(&mut self, instance: &StaticInstance, at: Time) -> Result<ExecutableSchedule, SimError> {
        let wrap = |source| SimError::Solve { clock: at, source };
        let fallback = |inst: &StaticInstance| dispatch(inst, &DispatchConfig::default()).executable;
        Ok(match self.config.scheduler {
            Scheduler::Dispatch => fallback(instance),
            Scheduler::Lbbd(cfg) => {
                let rep = solve_lbbd(instance, &cfg, &self.config.budget).map_err(wrap)?;
                match (rep.status, &rep.assignment) {
                    (SolveStatus::Optimal, Some(a)) => extract_executable_schedule(instance, a, &rep.schedules),
                    _ => {
                        if rep.status == SolveStatus::Timeout {
                            self.trace.timeouts += 1;
                        }
                        self.trace.fallbacks += 1;
                        fallback(instance)
                    }
                }
            }
            Scheduler::Oracle(cfg) => {
                let rep = solve_global(instance, &cfg, &self.config.budget).map_err(wrap)?;
                match rep.status {
                    SolveStatus::Infeasible => {
                        self.trace.fallbacks += 1;
                        fallback(instance)
                    }
                    status => {
                        if status == SolveStatus::Timeout {
                            self.trace.timeouts += 1;
                        }
                        extract_executable_schedule(instance, &rep.assignment, &rep.schedules)
                    }
                }
            }
            Scheduler::Relaxed => unreachable!("relaxed runs never reschedule"),
        })
    }
}

/// Static instance for a reschedule at clock `at` covering up to `i` waves
/// from `first`, with times shifted so that `at` becomes 0. Finished
/// operations are dropped and operations under way are frozen at 0 with
/// their remaining duration. Returns the instance and, per instance job, the
/// index of the shop job it stands for.
fn build_subproblem(
    state: &SimState,
    scenario: &DynamicScenario,
    policy: Policy,
    at: Time,
    first: usize,
) -> (StaticInstance, Vec<usize>) {
    let last = (first + policy.horizon_waves).min(scenario.waves.len());
    let waves: Vec<Wave> = scenario.waves[first..last]
        .iter()
        .enumerate()
        .map(|(id, w)| Wave {
            id,
            start_time: w.start_time - at,
            end_time: w.end_time - at,
            requirement: w.requirement.clone(),
        })
        .collect();
    let aircraft: Vec<Aircraft> = scenario
        .aircraft
        .iter()
        .map(|a| Aircraft {
            id: a.id,
            type_id: a.type_id,
            failure_rate: state.failure_rate[a.id],
            pre_failure_rate: state.pre_failure_rate[a.id],
        })
        .collect();
    let mut jobs = Vec::new();
    let mut job_map = Vec::new();
    for (s, job) in state.shop.iter().enumerate() {
        let operations: Vec<Operation> = job
            .ops
            .iter()
            .filter_map(|op| match op.planned {
                Some(start) if start + op.processing_time <= at => None,
                Some(start) if start < at => Some(
                    Operation::new(op.trade_id, start + op.processing_time - at, op.demand).fixed_at(0),
                ),
                _ => Some(Operation::new(op.trade_id, op.processing_time, op.demand)),
            })
            .collect();
        if operations.is_empty() {
            continue;
        }
        job_map.push(s);
        jobs.push(RepairJob { id: jobs.len(), type_id: job.type_id, aircraft_id: job.aircraft, operations });
    }
    let types: Vec<AircraftType> = scenario
        .types
        .iter()
        .map(|t| {
            let members: Vec<&Aircraft> = aircraft.iter().filter(|a| a.type_id == t.id).collect();
            let mean = if members.is_empty() {
                0.0
            } else {
                members.iter().map(|a| a.failure_rate).sum::<f64>() / members.len() as f64
            };
            let (pre, post) = failure_probabilities(mean).expect("rates stay non-negative");
            let in_shop = jobs.iter().filter(|j| j.type_id == t.id).count() as u32;
            AircraftType {
                id: t.id,
                member_count: members.len() as u32,
                ready_count: members.len() as u32 - in_shop,
                mean_failure_rate: mean,
                pre_fail_prob: pre,
                post_fail_prob: post,
            }
        })
        .collect();
    let instance = StaticInstance::new(types, aircraft, scenario.trades.clone(), waves, jobs)
        .expect("at least one wave remains");
    debug_assert!(validate_instance(&instance).is_ok(), "{}", validate_instance(&instance));
    (instance, job_map)
}

/// The instance a reschedule at the current state would solve; exposed for
/// inspection and tests.
pub fn build_subproblem_at(
    state: &SimState,
    scenario: &DynamicScenario,
    policy: Policy,
    first_wave: usize,
) -> StaticInstance {
    build_subproblem(state, scenario, policy, state.clock, first_wave).0
}

/// Ready time of a repair under the capacity-free reference policy.
pub fn relaxed_ready_time(job: &RepairJob, failed_at: Time) -> Time {
    failed_at + job.max_processing_time()
}

/// Initial state of a scenario, before any wave.
pub fn initial_state(scenario: &DynamicScenario) -> SimState {
    let n = scenario.aircraft.len();
    let rates: Vec<f64> = scenario.aircraft.iter().map(|a| a.failure_rate).collect();
    let mut status = vec![AircraftStatus::Ready; n];
    let shop = scenario
        .jobs
        .iter()
        .enumerate()
        .map(|(id, job)| {
            status[job.aircraft_id] = AircraftStatus::InShop;
            ShopJob {
                id,
                aircraft: job.aircraft_id,
                type_id: job.type_id,
                failed_at: 0,
                ops: job
                    .operations
                    .iter()
                    .map(|op| ShopOp {
                        trade_id: op.trade_id,
                        processing_time: op.processing_time,
                        demand: op.capacity_demand,
                        planned: None,
                    })
                    .collect(),
            }
        })
        .collect();
    SimState {
        clock: 0,
        status,
        pre_failure_rate: rates.clone(),
        failure_rate: rates,
        next_job_id: scenario.jobs.len(),
        shop,
        failure_check: vec![None; n],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genlab::{gen_dynamic, GenParams};

    fn scenario() -> DynamicScenario {
        gen_dynamic(&GenParams::dynamic_suite(10, 4)).unwrap()
    }

    #[test]
    fn policy_labels_round_trip() {
        for p in [Policy::P11, Policy::P31, Policy::P33] {
            assert_eq!(Policy::parse(&p.label()).unwrap(), p);
        }
        assert!(Policy::parse("P13").is_err());
        assert!(Policy::new(2, 0).is_err());
    }

    #[test]
    fn zero_failure_gives_full_coverage() {
        let mut s = scenario();
        s.jobs.clear();
        for a in &mut s.aircraft {
            a.failure_rate = 0.0;
            a.pre_failure_rate = 0.0;
        }
        for t in &mut s.types {
            t.ready_count = t.member_count;
        }
        for sched in ["dispatch", "lbbd-tight", "oracle", "relaxed"] {
            for policy in [Policy::P11, Policy::P31, Policy::P33] {
                let cfg = SimConfig::new(policy, Scheduler::parse(sched).unwrap(), BudgetSpec::seconds(5.0));
                let t = run_simulation(&s, &cfg, 1, 0).unwrap();
                assert!(t.nu.iter().all(|&v| v == 1.0), "{sched} {policy:?}");
            }
        }
    }

    #[test]
    fn same_seed_same_trace() {
        let s = scenario();
        let cfg = SimConfig::new(Policy::P31, Scheduler::Dispatch, BudgetSpec::unlimited());
        let a = run_simulation(&s, &cfg, 9, 2).unwrap();
        let b = run_simulation(&s, &cfg, 9, 2).unwrap();
        assert_eq!(a.nu, b.nu);
        assert_eq!(a.executed, b.executed);
        assert_eq!(a.repairs, b.repairs);
    }

    #[test]
    fn relaxed_repairs_take_longest_operation() {
        let s = scenario();
        let cfg = SimConfig::new(Policy::P11, Scheduler::Relaxed, BudgetSpec::unlimited());
        let t = run_simulation(&s, &cfg, 3, 0).unwrap();
        assert!(!t.repairs.is_empty());
        let job = RepairJob {
            id: 0,
            type_id: 0,
            aircraft_id: 0,
            operations: vec![Operation::new(0, 4, 1), Operation::new(1, 9, 1)],
        };
        assert_eq!(relaxed_ready_time(&job, 50), 59);
    }

    #[test]
    fn subproblem_shifts_waves() {
        let s = scenario();
        let mut st = initial_state(&s);
        st.clock = s.waves[2].end_time;
        let inst = build_subproblem_at(&st, &s, Policy::P33, 3);
        assert_eq!(inst.waves.len(), 3);
        assert_eq!(inst.waves[0].start_time, s.waves[3].start_time - st.clock);
    }
}
