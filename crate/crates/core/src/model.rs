//! Domain types shared by the static solvers and the simulator.
//!
//! Every collection is indexed by position: `types[k].id == k`, `trades[r].id == r`
//! and so on. [`validate_instance`] reports any record whose id does not match its
//! position, together with every other invariant violation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Integer time axis. Starts, durations, due dates and wave bounds all live here.
pub type Time = i64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AircraftType {
    pub id: usize,
    pub member_count: u32,
    /// Aircraft of this type that are not in the shop at time 0.
    pub ready_count: u32,
    pub mean_failure_rate: f64,
    pub pre_fail_prob: f64,
    pub post_fail_prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Aircraft {
    pub id: usize,
    pub type_id: usize,
    pub failure_rate: f64,
    /// Rate recorded at the most recent failure; repair restores it.
    pub pre_failure_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Trade {
    pub id: usize,
    pub capacity: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Wave {
    pub id: usize,
    pub start_time: Time,
    pub end_time: Time,
    /// Aircraft required per type, indexed by type id.
    pub requirement: Vec<u32>,
}

/// One trade's share of a repair job.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Operation {
    pub trade_id: usize,
    pub processing_time: Time,
    pub capacity_demand: u32,
    /// Committed start of an operation already under way. Solvers treat it as
    /// an immovable block.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_start: Option<Time>,
}

impl Operation {
    pub fn new(trade_id: usize, processing_time: Time, capacity_demand: u32) -> Self {
        Self {
            trade_id,
            processing_time,
            capacity_demand,
            fixed_start: None,
        }
    }

    pub fn fixed_at(mut self, start: Time) -> Self {
        self.fixed_start = Some(start);
        self
    }

    pub fn area(&self) -> i64 {
        self.processing_time * i64::from(self.capacity_demand)
    }

    /// Earliest time this operation can be finished on its own.
    pub fn earliest_end(&self) -> Time {
        self.fixed_start.unwrap_or(0) + self.processing_time
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RepairJob {
    pub id: usize,
    pub type_id: usize,
    pub aircraft_id: usize,
    pub operations: Vec<Operation>,
}

impl RepairJob {
    pub fn total_area(&self) -> i64 {
        self.operations.iter().map(Operation::area).sum()
    }

    pub fn operation_on(&self, trade_id: usize) -> Option<&Operation> {
        self.operations.iter().find(|op| op.trade_id == trade_id)
    }

    pub fn max_processing_time(&self) -> Time {
        self.operations
            .iter()
            .map(|op| op.processing_time)
            .max()
            .unwrap_or(0)
    }
}

/// Wave start times in ascending order followed by the sentinel `B`.
///
/// Index `i < wave_count()` is the due date "ready for wave `i`"; index
/// `wave_count()` is `B`, meaning the job serves no wave of this horizon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DueDateSet {
    dates: Vec<Time>,
}

impl DueDateSet {
    pub fn dates(&self) -> &[Time] {
        &self.dates
    }

    pub fn wave_count(&self) -> usize {
        self.dates.len() - 1
    }

    /// Index of the sentinel date `B`.
    pub fn b_index(&self) -> usize {
        self.dates.len() - 1
    }

    pub fn b(&self) -> Time {
        self.dates[self.b_index()]
    }

    pub fn date(&self, index: usize) -> Time {
        self.dates[index]
    }

    pub fn is_b(&self, index: usize) -> bool {
        index == self.b_index()
    }

    /// Start of the last wave; capacity is only enforced before it.
    pub fn horizon_end(&self) -> Time {
        self.dates[self.wave_count() - 1]
    }

    /// Smallest due-date index whose date is at least `time`.
    pub fn first_index_at_or_after(&self, time: Time) -> usize {
        self.dates[..self.wave_count()]
            .iter()
            .position(|&d| d >= time)
            .unwrap_or(self.b_index())
    }
}

/// Builds the due-date set: wave starts in ascending order, then
/// `B = last start + max processing time`.
///
/// With no operations at all the maximum processing time is taken as 1 so the
/// set stays strictly ascending.
pub fn build_due_date_set(waves: &[Wave], jobs: &[RepairJob]) -> Result<DueDateSet, ModelError> {
    if waves.is_empty() {
        return Err(ModelError::NoWaves);
    }
    let mut dates: Vec<Time> = waves.iter().map(|w| w.start_time).collect();
    dates.sort_unstable();
    let max_p = jobs
        .iter()
        .map(RepairJob::max_processing_time)
        .max()
        .unwrap_or(0)
        .max(1);
    let last = *dates.last().expect("non-empty");
    dates.push(last + max_p);
    Ok(DueDateSet { dates })
}

/// The complete input of one static solve.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticInstance {
    pub types: Vec<AircraftType>,
    /// Per-aircraft records; static solvers only read the type aggregates.
    pub aircraft: Vec<Aircraft>,
    pub trades: Vec<Trade>,
    pub waves: Vec<Wave>,
    pub jobs: Vec<RepairJob>,
    due_dates: DueDateSet,
    /// `returns[w]`: waves whose flyers come back between the starts of `w - 1` and `w`.
    returns: Vec<Vec<usize>>,
    /// `(job, operation index)` pairs per trade.
    trade_members: Vec<Vec<(usize, usize)>>,
}

impl StaticInstance {
    pub fn new(
        types: Vec<AircraftType>,
        aircraft: Vec<Aircraft>,
        trades: Vec<Trade>,
        waves: Vec<Wave>,
        jobs: Vec<RepairJob>,
    ) -> Result<Self, ModelError> {
        let due_dates = build_due_date_set(&waves, &jobs)?;
        let returns = (0..waves.len())
            .map(|w| {
                if w == 0 {
                    return Vec::new();
                }
                let lo = waves[w - 1].start_time;
                let hi = waves[w].start_time;
                (0..waves.len())
                    .filter(|&v| lo < waves[v].end_time && waves[v].end_time <= hi)
                    .collect()
            })
            .collect();
        let mut trade_members = vec![Vec::new(); trades.len()];
        for (j, job) in jobs.iter().enumerate() {
            for (o, op) in job.operations.iter().enumerate() {
                if let Some(members) = trade_members.get_mut(op.trade_id) {
                    members.push((j, o));
                }
            }
        }
        Ok(Self {
            types,
            aircraft,
            trades,
            waves,
            jobs,
            due_dates,
            returns,
            trade_members,
        })
    }

    pub fn due_dates(&self) -> &DueDateSet {
        &self.due_dates
    }

    pub fn wave_count(&self) -> usize {
        self.waves.len()
    }

    pub fn type_count(&self) -> usize {
        self.types.len()
    }

    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    /// Waves whose flyers return in time for the pre-flight check of wave `w`.
    pub fn returning_waves(&self, w: usize) -> &[usize] {
        &self.returns[w]
    }

    /// Jobs with an operation on `trade`, as `(job, operation index)`.
    pub fn trade_members(&self, trade: usize) -> &[(usize, usize)] {
        &self.trade_members[trade]
    }

    /// Smallest due-date index each job can meet in isolation: every
    /// operation must fit between its release (or committed start) and the date.
    pub fn earliest_due_index(&self, job: usize) -> usize {
        let need = self.jobs[job]
            .operations
            .iter()
            .map(Operation::earliest_end)
            .max()
            .unwrap_or(0);
        self.due_dates.first_index_at_or_after(need)
    }
}

/// One broken invariant found by [`validate_instance`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    IdMismatch { collection: &'static str, position: usize, id: usize },
    DanglingType { job: usize, type_id: usize },
    DanglingAircraft { job: usize, aircraft_id: usize },
    DanglingTrade { job: usize, trade_id: usize },
    AircraftTypeDangling { aircraft: usize, type_id: usize },
    RequirementLength { wave: usize, len: usize, types: usize },
    ReadyExceedsMembers { type_id: usize },
    ReadyCountMismatch { type_id: usize, jobs: u32, expected: u32 },
    BadProbability { type_id: usize },
    PreExceedsPost { type_id: usize },
    NegativeRate { type_id: usize },
    ZeroCapacity { trade: usize },
    EmptyWaveList,
    EmptyWave { wave: usize },
    WavesUnsorted { wave: usize },
    WavesOverlap { wave: usize },
    NegativeWaveStart { wave: usize },
    NoOperations { job: usize },
    DuplicateTrade { job: usize, trade_id: usize },
    NonPositiveDuration { job: usize, trade_id: usize },
    ZeroDemand { job: usize, trade_id: usize },
    DemandExceedsCapacity { job: usize, trade_id: usize, demand: u32, capacity: u32 },
    NegativeFixedStart { job: usize, trade_id: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            IdMismatch { collection, position, id } => {
                write!(f, "{collection}[{position}] carries id {id}")
            }
            DanglingType { job, type_id } => write!(f, "job {job}: unknown type {type_id}"),
            DanglingAircraft { job, aircraft_id } => {
                write!(f, "job {job}: unknown aircraft {aircraft_id}")
            }
            DanglingTrade { job, trade_id } => write!(f, "job {job}: unknown trade {trade_id}"),
            AircraftTypeDangling { aircraft, type_id } => {
                write!(f, "aircraft {aircraft}: unknown type {type_id}")
            }
            RequirementLength { wave, len, types } => {
                write!(f, "wave {wave}: requirement has {len} entries for {types} types")
            }
            ReadyExceedsMembers { type_id } => {
                write!(f, "type {type_id}: ready count exceeds member count")
            }
            ReadyCountMismatch { type_id, jobs, expected } => write!(
                f,
                "type {type_id}: {jobs} jobs in shop but members minus ready is {expected}"
            ),
            BadProbability { type_id } => {
                write!(f, "type {type_id}: failure probability outside [0, 1]")
            }
            PreExceedsPost { type_id } => {
                write!(f, "type {type_id}: pre-check probability exceeds post-check probability")
            }
            NegativeRate { type_id } => write!(f, "type {type_id}: negative failure rate"),
            ZeroCapacity { trade } => write!(f, "trade {trade}: capacity must be at least 1"),
            EmptyWaveList => write!(f, "instance has no waves"),
            EmptyWave { wave } => write!(f, "wave {wave}: start must precede end"),
            WavesUnsorted { wave } => write!(f, "wave {wave}: waves not sorted by start time"),
            WavesOverlap { wave } => write!(f, "wave {wave}: waves overlap"),
            NegativeWaveStart { wave } => write!(f, "wave {wave}: negative start time"),
            NoOperations { job } => write!(f, "job {job}: no operations"),
            DuplicateTrade { job, trade_id } => {
                write!(f, "job {job}: more than one operation on trade {trade_id}")
            }
            NonPositiveDuration { job, trade_id } => {
                write!(f, "job {job}: processing time on trade {trade_id} must be at least 1")
            }
            ZeroDemand { job, trade_id } => {
                write!(f, "job {job}: capacity demand on trade {trade_id} must be at least 1")
            }
            DemandExceedsCapacity { job, trade_id, demand, capacity } => write!(
                f,
                "job {job}: demand exceeds capacity on trade {trade_id} ({demand} > {capacity})"
            ),
            NegativeFixedStart { job, trade_id } => {
                write!(f, "job {job}: negative committed start on trade {trade_id}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Collects every invariant violation of `instance`. An empty report means the
/// instance may be handed to any solver.
pub fn validate_instance(instance: &StaticInstance) -> ValidationReport {
    let mut out = Vec::new();
    let n_types = instance.types.len();

    for (pos, t) in instance.types.iter().enumerate() {
        if t.id != pos {
            out.push(Violation::IdMismatch { collection: "types", position: pos, id: t.id });
        }
        if t.ready_count > t.member_count {
            out.push(Violation::ReadyExceedsMembers { type_id: pos });
        }
        let prob_ok = |p: f64| (0.0..=1.0).contains(&p);
        if !prob_ok(t.pre_fail_prob) || !prob_ok(t.post_fail_prob) {
            out.push(Violation::BadProbability { type_id: pos });
        } else if t.pre_fail_prob > t.post_fail_prob {
            out.push(Violation::PreExceedsPost { type_id: pos });
        }
        if !(t.mean_failure_rate >= 0.0) {
            out.push(Violation::NegativeRate { type_id: pos });
        }
    }
    for (pos, a) in instance.aircraft.iter().enumerate() {
        if a.id != pos {
            out.push(Violation::IdMismatch { collection: "aircraft", position: pos, id: a.id });
        }
        if a.type_id >= n_types {
            out.push(Violation::AircraftTypeDangling { aircraft: pos, type_id: a.type_id });
        }
    }
    for (pos, r) in instance.trades.iter().enumerate() {
        if r.id != pos {
            out.push(Violation::IdMismatch { collection: "trades", position: pos, id: r.id });
        }
        if r.capacity == 0 {
            out.push(Violation::ZeroCapacity { trade: pos });
        }
    }

    if instance.waves.is_empty() {
        out.push(Violation::EmptyWaveList);
    }
    for (pos, w) in instance.waves.iter().enumerate() {
        if w.id != pos {
            out.push(Violation::IdMismatch { collection: "waves", position: pos, id: w.id });
        }
        if w.start_time >= w.end_time {
            out.push(Violation::EmptyWave { wave: pos });
        }
        if w.start_time < 0 {
            out.push(Violation::NegativeWaveStart { wave: pos });
        }
        if w.requirement.len() != n_types {
            out.push(Violation::RequirementLength {
                wave: pos,
                len: w.requirement.len(),
                types: n_types,
            });
        }
        if pos > 0 {
            let prev = &instance.waves[pos - 1];
            if w.start_time <= prev.start_time {
                out.push(Violation::WavesUnsorted { wave: pos });
            } else if w.start_time < prev.end_time {
                out.push(Violation::WavesOverlap { wave: pos });
            }
        }
    }

    let mut jobs_per_type = vec![0u32; n_types];
    for (pos, job) in instance.jobs.iter().enumerate() {
        if job.id != pos {
            out.push(Violation::IdMismatch { collection: "jobs", position: pos, id: job.id });
        }
        match jobs_per_type.get_mut(job.type_id) {
            Some(c) => *c += 1,
            None => out.push(Violation::DanglingType { job: pos, type_id: job.type_id }),
        }
        if !instance.aircraft.is_empty() && job.aircraft_id >= instance.aircraft.len() {
            out.push(Violation::DanglingAircraft { job: pos, aircraft_id: job.aircraft_id });
        }
        if job.operations.is_empty() {
            out.push(Violation::NoOperations { job: pos });
        }
        for (o, op) in job.operations.iter().enumerate() {
            if job.operations[..o].iter().any(|prev| prev.trade_id == op.trade_id) {
                out.push(Violation::DuplicateTrade { job: pos, trade_id: op.trade_id });
            }
            if op.processing_time < 1 {
                out.push(Violation::NonPositiveDuration { job: pos, trade_id: op.trade_id });
            }
            if op.capacity_demand == 0 {
                out.push(Violation::ZeroDemand { job: pos, trade_id: op.trade_id });
            }
            if op.fixed_start.is_some_and(|s| s < 0) {
                out.push(Violation::NegativeFixedStart { job: pos, trade_id: op.trade_id });
            }
            match instance.trades.get(op.trade_id) {
                None => out.push(Violation::DanglingTrade { job: pos, trade_id: op.trade_id }),
                Some(trade) if op.capacity_demand > trade.capacity => {
                    out.push(Violation::DemandExceedsCapacity {
                        job: pos,
                        trade_id: op.trade_id,
                        demand: op.capacity_demand,
                        capacity: trade.capacity,
                    })
                }
                Some(_) => {}
            }
        }
    }
    for (k, t) in instance.types.iter().enumerate() {
        if t.ready_count <= t.member_count {
            let expected = t.member_count - t.ready_count;
            if jobs_per_type[k] != expected {
                out.push(Violation::ReadyCountMismatch {
                    type_id: k,
                    jobs: jobs_per_type[k],
                    expected,
                });
            }
        }
    }

    ValidationReport { violations: out }
}


#[cfg(test)]
mod tests {
    use super::fixtures::single_trade;
    use super::*;

    fn wave(id: usize, s: Time, e: Time) -> Wave {
        Wave { id, start_time: s, end_time: e, requirement: vec![1] }
    }

    fn job(id: usize, ps: &[Time]) -> RepairJob {
        RepairJob {
            id,
            type_id: 0,
            aircraft_id: id,
            operations: ps.iter().enumerate().map(|(r, &p)| Operation::new(r, p, 1)).collect(),
        }
    }

    #[test]
    fn due_dates_from_worked_example() {
        let waves = [wave(0, 14, 16), wave(1, 17, 19), wave(2, 20, 22)];
        let jobs = [job(0, &[15]), job(1, &[3, 7])];
        let d = build_due_date_set(&waves, &jobs).unwrap();
        assert_eq!(d.dates(), &[14, 17, 20, 35]);
        assert_eq!(d.b_index(), 3);
        assert_eq!(d.horizon_end(), 20);
    }

    #[test]
    fn due_dates_minimal_and_derived() {
        let d = build_due_date_set(&[wave(0, 5, 6)], &[job(0, &[1])]).unwrap();
        assert_eq!(d.dates(), &[5, 6]);
        let d = build_due_date_set(
            &[wave(0, 10, 11), wave(1, 12, 13)],
            &[job(0, &[3]), job(1, &[7]), job(2, &[2])],
        )
        .unwrap();
        assert_eq!(d.dates(), &[10, 12, 19]);
    }

    #[test]
    fn due_dates_reject_empty_waves() {
        assert_eq!(build_due_date_set(&[], &[job(0, &[1])]), Err(ModelError::NoWaves));
    }

    #[test]
    fn due_dates_strictly_ascending_without_jobs() {
        let d = build_due_date_set(&[wave(0, 4, 5), wave(1, 9, 10)], &[]).unwrap();
        assert_eq!(d.dates().len(), 3);
        assert!(d.dates().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn well_formed_instance_validates() {
        let inst = single_trade(10, &[5, 10], &[(3, 4), (2, 10)]);
        assert!(validate_instance(&inst).is_ok(), "{}", validate_instance(&inst));
    }

    #[test]
    fn overload_is_reported() {
        let inst = single_trade(10, &[5], &[(3, 11)]);
        let report = validate_instance(&inst);
        assert!(report.violations.iter().any(|v| matches!(v, Violation::DemandExceedsCapacity { .. })));
        assert!(report.to_string().contains("demand exceeds capacity"));
    }

    #[test]
    fn overlapping_waves_are_reported() {
        let mut inst = single_trade(10, &[5, 10], &[(3, 4)]);
        inst.waves[0].end_time = 12;
        let report = validate_instance(&inst);
        assert!(report.to_string().contains("waves overlap"), "{report}");
    }

    #[test]
    fn tied_wave_starts_are_rejected() {
        let mut inst = single_trade(10, &[5, 8], &[(3, 4)]);
        inst.waves[1].start_time = 5;
        let report = validate_instance(&inst);
        assert!(report.violations.iter().any(|v| matches!(v, Violation::WavesUnsorted { wave: 1 })));
    }

    #[test]
    fn dangling_trade_is_reported() {
        let mut inst = single_trade(10, &[5], &[(3, 4)]);
        inst.jobs[0].operations[0].trade_id = 7;
        let report = validate_instance(&inst);
        assert!(report.violations.contains(&Violation::DanglingTrade { job: 0, trade_id: 7 }));
    }

    #[test]
    fn earliest_due_index_respects_fixed_ops() {
        let mut inst = single_trade(10, &[5, 10], &[(3, 4)]);
        assert_eq!(inst.earliest_due_index(0), 0);
        inst.jobs[0].operations[0].fixed_start = Some(4);
        let inst = StaticInstance::new(
            inst.types,
            inst.aircraft,
            inst.trades,
            inst.waves,
            inst.jobs,
        )
        .unwrap();
        assert_eq!(inst.earliest_due_index(0), 1);
    }
}
