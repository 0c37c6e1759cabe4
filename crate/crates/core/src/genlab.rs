//! Seeded instance generators for the static benchmark suite and the dynamic
//! simulation scenarios.
//!
//! All draws come from [`crate::rng`] streams keyed by the seed, so the same
//! parameters always give the same instance. Integer ranges are inclusive;
//! the open inter-wave gap `(0, 40)` is drawn from `[1, 39]`.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::GenError;
use crate::expectation::failure_probabilities;
use crate::model::{Aircraft, AircraftType, Operation, RepairJob, StaticInstance, Time, Trade, Wave};
use crate::rng::{stream, StreamRng};

pub const GENERATOR_VERSION: &str = "repairshop-genlab/1";

const WAVE_ATTEMPTS: u32 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum GenMode {
    Static,
    Dynamic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GenParams {
    pub aircraft_count: usize,
    pub trade_count: usize,
    /// Waves of a static instance, or the total of a dynamic scenario.
    pub wave_count: usize,
    pub seed: u64,
    pub mode: GenMode,
    /// Failure-rate increase per flight, in percent.
    pub deterioration_pct: f64,
    pub horizon_factor: f64,
    pub capacity: u32,
    /// Share of the fleet that starts in the shop.
    pub shop_fraction: f64,
}

impl GenParams {
    pub fn static_suite(aircraft: usize, trades: usize, waves: usize, seed: u64) -> Self {
        Self {
            aircraft_count: aircraft,
            trade_count: trades,
            wave_count: waves,
            seed,
            mode: GenMode::Static,
            deterioration_pct: 5.0,
            horizon_factor: 1.2,
            capacity: 10,
            shop_fraction: 0.8,
        }
    }

    pub fn dynamic_suite(aircraft: usize, seed: u64) -> Self {
        Self {
            aircraft_count: aircraft,
            trade_count: 4,
            wave_count: 30,
            mode: GenMode::Dynamic,
            ..Self::static_suite(aircraft, 4, 30, seed)
        }
    }

    pub fn check(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError::Params(m.to_string()));
        if self.aircraft_count == 0 || self.trade_count == 0 || self.wave_count == 0 {
            return bad("aircraft, trade and wave counts must be at least 1");
        }
        if !(self.horizon_factor > 1.0) {
            return bad("horizon factor must exceed 1");
        }
        if self.capacity < 10 {
            return bad("capacity must be at least 10 to hold every demand draw");
        }
        if !(0.0..=1.0).contains(&self.shop_fraction) {
            return bad("shop fraction must lie in [0, 1]");
        }
        if !(self.deterioration_pct >= 0.0) {
            return bad("deterioration must be non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LoadStats {
    /// Per trade: total area divided by capacity.
    pub per_trade_area: Vec<f64>,
    pub lb: f64,
    pub horizon: Time,
}

pub fn load_stats(jobs: &[RepairJob], trades: &[Trade], horizon_factor: f64) -> LoadStats {
    let mut per_trade_area = vec![0.0; trades.len()];
    for op in jobs.iter().flat_map(|j| &j.operations) {
        per_trade_area[op.trade_id] += op.area() as f64;
    }
    for (a, t) in per_trade_area.iter_mut().zip(trades) {
        *a /= f64::from(t.capacity);
    }
    let lb = per_trade_area.iter().copied().fold(0.0, f64::max);
    LoadStats { per_trade_area, lb, horizon: (horizon_factor * lb).ceil() as Time }
}

/// Draws one operation on trade `r` (zero-based): `p` in `[r + 1, 10 (r + 1)]`,
/// `c` in `[1, 10]`.
fn draw_operation(rng: &mut StreamRng, trade: &Trade) -> Operation {
    let scale = trade.id as Time + 1;
    let p = rng.gen_range(scale..=10 * scale);
    let c = rng.gen_range(1..=10u32.min(trade.capacity));
    Operation::new(trade.id, p, c)
}

/// Repair job for an aircraft that just failed: each trade is needed with
/// probability one half, redrawn until at least one is.
pub fn gen_failure_job(id: usize, aircraft: &Aircraft, trades: &[Trade], rng: &mut StreamRng) -> RepairJob {
    let chosen = loop {
        let pick: Vec<&Trade> = trades.iter().filter(|_| rng.gen_bool(0.5)).collect();
        if !pick.is_empty() {
            break pick;
        }
    };
    let operations = chosen.into_iter().map(|t| draw_operation(rng, t)).collect();
    RepairJob { id, type_id: aircraft.type_id, aircraft_id: aircraft.id, operations }
}

struct Fleet {
    types: Vec<AircraftType>,
    aircraft: Vec<Aircraft>,
    trades: Vec<Trade>,
    jobs: Vec<RepairJob>,
    stats: LoadStats,
}

fn gen_fleet(params: &GenParams) -> Fleet {
    let n = params.aircraft_count;
    let n_types = (n / 5).max(1);
    let mut rng = stream(params.seed, "fleet", &[]);
    let aircraft: Vec<Aircraft> = (0..n)
        .map(|i| {
            let type_id = if i < n_types { i } else { rng.gen_range(0..n_types) };
            let rate = rng.gen::<f64>() * 0.5;
            Aircraft { id: i, type_id, failure_rate: rate, pre_failure_rate: rate }
        })
        .collect();
    let trades: Vec<Trade> =
        (0..params.trade_count).map(|id| Trade { id, capacity: params.capacity }).collect();

    let mut rng = stream(params.seed, "jobs", &[]);
    let n_jobs = ((params.shop_fraction * n as f64).round() as usize).min(n);
    let mut in_shop: Vec<usize> = (0..n).collect();
    in_shop.shuffle(&mut rng);
    in_shop.truncate(n_jobs);
    in_shop.sort_unstable();

    let trades_of = job_trades(n_jobs, params.trade_count, &mut rng);
    let jobs: Vec<RepairJob> = in_shop
        .iter()
        .enumerate()
        .map(|(j, &a)| RepairJob {
            id: j,
            type_id: aircraft[a].type_id,
            aircraft_id: a,
            operations: trades_of[j].iter().map(|&r| draw_operation(&mut rng, &trades[r])).collect(),
        })
        .collect();

    let types = (0..n_types)
        .map(|k| {
            let members: Vec<&Aircraft> = aircraft.iter().filter(|a| a.type_id == k).collect();
            let mean = members.iter().map(|a| a.failure_rate).sum::<f64>() / members.len() as f64;
            let (pre, post) = failure_probabilities(mean).expect("rates are non-negative");
            let in_repair = jobs.iter().filter(|j| j.type_id == k).count() as u32;
            AircraftType {
                id: k,
                member_count: members.len() as u32,
                ready_count: members.len() as u32 - in_repair,
                mean_failure_rate: mean,
                pre_fail_prob: pre,
                post_fail_prob: post,
            }
        })
        .collect();
    let stats = load_stats(&jobs, &trades, params.horizon_factor);
    Fleet { types, aircraft, trades, jobs, stats }
}

/// Trades of each job. The operation count is `max(|R| |J| / 2, |J|)`, split
/// evenly over trades with the remainder going round-robin. Every job first
/// gets one trade round-robin; the remaining slots of each trade go to
/// distinct random jobs that lack it.
fn job_trades(n_jobs: usize, n_trades: usize, rng: &mut StreamRng) -> Vec<Vec<usize>> {
    let total = (n_trades * n_jobs / 2).max(n_jobs);
    let quota: Vec<usize> = (0..n_trades)
        .map(|r| (total / n_trades + usize::from(r < total % n_trades)).min(n_jobs))
        .collect();
    let mut has = vec![vec![false; n_trades]; n_jobs];
    let mut used = vec![0usize; n_trades];
    let mut order: Vec<usize> = (0..n_jobs).collect();
    order.shuffle(rng);
    for (i, &j) in order.iter().enumerate() {
        let r = i % n_trades;
        has[j][r] = true;
        used[r] += 1;
    }
    for r in 0..n_trades {
        let mut candidates: Vec<usize> = (0..n_jobs).filter(|&j| !has[j][r]).collect();
        candidates.shuffle(rng);
        for &j in candidates.iter().take(quota[r].saturating_sub(used[r])) {
            has[j][r] = true;
        }
    }
    has.into_iter()
        .map(|row| row.iter().enumerate().filter(|(_, &h)| h).map(|(r, _)| r).collect())
        .collect()
}

fn draw_requirements(rng: &mut StreamRng, types: &[AircraftType]) -> Vec<u32> {
    types.iter().map(|t| rng.gen_range(1..=t.member_count.max(1))).collect()
}

/// Static waves, laid out backwards from the horizon end.
fn static_waves(params: &GenParams, fleet: &Fleet) -> Result<Vec<Wave>, GenError> {
    let h = fleet.stats.horizon;
    let mut rng = stream(params.seed, "waves", &[]);
    for _ in 0..WAVE_ATTEMPTS {
        let mut spans = Vec::with_capacity(params.wave_count);
        let mut end = h - rng.gen_range(0..=3);
        let mut ok = true;
        for _ in 0..params.wave_count {
            let start = end - rng.gen_range(3..=5);
            if start <= 0 {
                ok = false;
                break;
            }
            spans.push((start, end));
            end = start - rng.gen_range(0..=3);
        }
        if ok {
            spans.reverse();
            return Ok(spans
                .into_iter()
                .enumerate()
                .map(|(id, (s, e))| Wave {
                    id,
                    start_time: s,
                    end_time: e,
                    requirement: draw_requirements(&mut rng, &fleet.types),
                })
                .collect());
        }
    }
    Err(GenError::WavePlacement {
        seed: params.seed,
        waves: params.wave_count,
        horizon: h,
        attempts: WAVE_ATTEMPTS,
    })
}

pub fn gen_static(params: &GenParams) -> Result<StaticInstance, GenError> {
    params.check()?;
    if params.mode != GenMode::Static {
        return Err(GenError::Params("static generation needs static mode".into()));
    }
    let fleet = gen_fleet(params);
    let waves = static_waves(params, &fleet)?;
    Ok(StaticInstance::new(fleet.types, fleet.aircraft, fleet.trades, waves, fleet.jobs)
        .expect("waves are non-empty"))
}

/// Starting point of a dynamic run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DynamicScenario {
    pub params: GenParams,
    pub horizon: Time,
    pub types: Vec<AircraftType>,
    pub aircraft: Vec<Aircraft>,
    pub trades: Vec<Trade>,
    pub waves: Vec<Wave>,
    /// Jobs in the shop at time 0.
    pub jobs: Vec<RepairJob>,
    pub deterioration_pct: f64,
}

impl DynamicScenario {
    /// The initial state as a static instance over all waves.
    pub fn initial_instance(&self) -> StaticInstance {
        StaticInstance::new(
            self.types.clone(),
            self.aircraft.clone(),
            self.trades.clone(),
            self.waves.clone(),
            self.jobs.clone(),
        )
        .expect("scenario has waves")
    }
}

pub fn gen_dynamic(params: &GenParams) -> Result<DynamicScenario, GenError> {
    params.check()?;
    if params.mode != GenMode::Dynamic {
        return Err(GenError::Params("dynamic generation needs dynamic mode".into()));
    }
    let fleet = gen_fleet(params);
    let h = fleet.stats.horizon;
    let mut rng = stream(params.seed, "waves", &[]);
    let lo = (h + 2) / 3;
    let hi = (h / 2).max(lo).max(1);
    let mut start = rng.gen_range(lo.max(1)..=hi);
    let mut waves = Vec::with_capacity(params.wave_count);
    for id in 0..params.wave_count {
        let end = start + rng.gen_range(3..=5);
        waves.push(Wave {
            id,
            start_time: start,
            end_time: end,
            requirement: draw_requirements(&mut rng, &fleet.types),
        });
        start = end + rng.gen_range(1..=39);
    }
    Ok(DynamicScenario {
        params: params.clone(),
        horizon: h,
        types: fleet.types,
        aircraft: fleet.aircraft,
        trades: fleet.trades,
        waves,
        jobs: fleet.jobs,
        deterioration_pct: params.deterioration_pct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_instance;

    #[test]
    fn static_parameter_rules() {
        let inst = gen_static(&GenParams::static_suite(10, 3, 3, 7)).unwrap();
        assert_eq!(inst.types.len(), 2);
        assert_eq!(inst.jobs.len(), 8);
        let ops: usize = inst.jobs.iter().map(|j| j.operations.len()).sum();
        assert_eq!(ops, 12);
        for r in 0..3 {
            assert_eq!(inst.trade_members(r).len(), 4);
        }
        assert!(inst.trades.iter().all(|t| t.capacity == 10));
        assert!(validate_instance(&inst).is_ok(), "{}", validate_instance(&inst));
    }

    #[test]
    fn static_is_deterministic() {
        let a = gen_static(&GenParams::static_suite(12, 4, 4, 99)).unwrap();
        let b = gen_static(&GenParams::static_suite(12, 4, 4, 99)).unwrap();
        assert_eq!(a, b);
        let c = gen_static(&GenParams::static_suite(12, 4, 4, 100)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn horizon_matches_load() {
        let p = GenParams::static_suite(15, 3, 3, 5);
        let inst = gen_static(&p).unwrap();
        let stats = load_stats(&inst.jobs, &inst.trades, 1.2);
        let last = inst.waves.last().unwrap();
        assert!(last.end_time <= stats.horizon && last.end_time >= stats.horizon - 3);
    }

    #[test]
    fn dynamic_wave_rules() {
        let s = gen_dynamic(&GenParams::dynamic_suite(15, 3)).unwrap();
        assert_eq!(s.waves.len(), 30);
        let h = s.horizon;
        let st1 = s.waves[0].start_time;
        assert!(st1 >= (h + 2) / 3 && st1 <= h / 2);
        for w in s.waves.windows(2) {
            let gap = w[1].start_time - w[0].end_time;
            assert!((1..=39).contains(&gap));
        }
        assert!(validate_instance(&s.initial_instance()).is_ok());
        assert_eq!(s.deterioration_pct, 5.0);
    }

    #[test]
    fn failure_job_ranges() {
        let trades: Vec<Trade> = (0..4).map(|id| Trade { id, capacity: 10 }).collect();
        let a = Aircraft { id: 3, type_id: 1, failure_rate: 0.2, pre_failure_rate: 0.2 };
        let mut rng = stream(1, "t", &[]);
        for _ in 0..500 {
            let j = gen_failure_job(0, &a, &trades, &mut rng);
            assert!(!j.operations.is_empty());
            for op in &j.operations {
                let r = op.trade_id as Time + 1;
                assert!((r..=10 * r).contains(&op.processing_time));
                assert!((1..=10).contains(&op.capacity_demand));
            }
        }
        let j1 = gen_failure_job(0, &a, &trades, &mut stream(2, "t", &[]));
        let j2 = gen_failure_job(0, &a, &trades, &mut stream(2, "t", &[]));
        assert_eq!(j1, j2);
    }

    #[test]
    fn bad_params_rejected() {
        let mut p = GenParams::static_suite(10, 3, 3, 1);
        p.horizon_factor = 1.0;
        assert!(matches!(gen_static(&p), Err(GenError::Params(_))));
        assert!(gen_static(&GenParams::static_suite(0, 3, 3, 1)).is_err());
    }
}
