//! Expected-availability coverage model.
//!
//! A due-date assignment fixes how many repaired aircraft of each type arrive
//! before each wave (`U`). From there the expected number available (`E`) follows
//! a per-type recursion driven by the number flown (`Z`), and the objective is
//! the largest total `Z` the recursion allows.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::ExpectationError;
use crate::model::StaticInstance;

/// Slack used when comparing an integer flight count with a real expectation.
pub const FLOW_EPSILON: f64 = 1e-9;

/// Pre- and post-flight failure probabilities for failure rate `rate`:
/// `1 - e^-rate` and `1 - e^-3 rate`.
pub fn failure_probabilities(rate: f64) -> Result<(f64, f64), ExpectationError> {
    if !(rate >= 0.0) {
        return Err(ExpectationError::NegativeRate(rate));
    }
    Ok((-(-rate).exp_m1(), -(-3.0 * rate).exp_m1()))
}

/// Due-date index per job. Index `wave_count()` is the sentinel `B`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DueDateAssignment {
    pub due_index: Vec<usize>,
}

impl DueDateAssignment {
    pub fn new(due_index: Vec<usize>) -> Self {
        Self { due_index }
    }

    /// Every job on the sentinel date.
    pub fn all_b(instance: &StaticInstance) -> Self {
        Self { due_index: vec![instance.due_dates().b_index(); instance.job_count()] }
    }

    pub fn len(&self) -> usize {
        self.due_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.due_index.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FlowPlan {
    /// `U[k][w]`
    pub arrivals: Vec<Vec<u32>>,
    /// `E[k][w]`
    pub expected_avail: Vec<Vec<f64>>,
    /// `Z[k][w]`
    pub flown: Vec<Vec<u32>>,
    pub objective: u32,
}

/// `U[k][w]`: jobs of type `k` due at wave `w`. Jobs on `B` count nowhere.
pub fn compute_arrivals(assignment: &DueDateAssignment, instance: &StaticInstance) -> Vec<Vec<u32>> {
    let waves = instance.wave_count();
    let mut u = vec![vec![0u32; waves]; instance.type_count()];
    for (job, &idx) in instance.jobs.iter().zip(&assignment.due_index) {
        if idx < waves {
            u[job.type_id][idx] += 1;
        }
    }
    u
}

/// Per-type constants of the availability recursion.
#[derive(Debug, Clone)]
pub(crate) struct TypeFlow {
    ready: f64,
    pass_pre: f64,
    /// Survives a post-flight check and the following pre-flight check.
    pass_post_pre: f64,
    requirement: Vec<u32>,
    /// `suffix_req[w]` = requirement summed over waves `w..`.
    suffix_req: Vec<u32>,
}

impl TypeFlow {
    fn new(instance: &StaticInstance, k: usize) -> Self {
        let t = &instance.types[k];
        let requirement: Vec<u32> = instance.waves.iter().map(|w| w.requirement[k]).collect();
        let mut suffix_req = vec![0u32; requirement.len() + 1];
        for w in (0..requirement.len()).rev() {
            suffix_req[w] = suffix_req[w + 1] + requirement[w];
        }
        Self {
            ready: f64::from(t.ready_count),
            pass_pre: 1.0 - t.pre_fail_prob,
            pass_post_pre: (1.0 - t.post_fail_prob) * (1.0 - t.pre_fail_prob),
            requirement,
            suffix_req,
        }
    }

    /// `E` for wave `w` given `E[w-1]` and the flights decided so far.
    fn next_expected(
        &self,
        instance: &StaticInstance,
        w: usize,
        prev_e: f64,
        arrivals: &[u32],
        flown: &[u32],
    ) -> f64 {
        if w == 0 {
            return (self.ready + f64::from(arrivals[0])) * self.pass_pre;
        }
        let carried = (prev_e - f64::from(flown[w - 1]) + f64::from(arrivals[w])) * self.pass_pre;
        let returned: f64 = instance
            .returning_waves(w)
            .iter()
            .map(|&v| f64::from(flown[v]) * self.pass_post_pre)
            .sum();
        carried + returned
    }

    /// Maximum total flown for this type, and one maximizing `Z` vector.
    fn best(&self, instance: &StaticInstance, arrivals: &[u32]) -> (u32, Vec<u32>) {
        let waves = self.requirement.len();
        let mut flown = vec![0u32; waves];
        let mut best = (0u32, vec![0u32; waves]);
        self.search(instance, arrivals, 0, 0.0, 0, &mut flown, &mut best);
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        &self,
        instance: &StaticInstance,
        arrivals: &[u32],
        w: usize,
        prev_e: f64,
        total: u32,
        flown: &mut Vec<u32>,
        best: &mut (u32, Vec<u32>),
    ) {
        if w == self.requirement.len() {
            if total > best.0 {
                *best = (total, flown.clone());
            }
            return;
        }
        if total + self.suffix_req[w] <= best.0 {
            return;
        }
        let e = self.next_expected(instance, w, prev_e, arrivals, flown);
        let cap = max_flyable(e).min(self.requirement[w]);
        // Larger flights first: finds the optimum early in the common case.
        for z in (0..=cap).rev() {
            flown[w] = z;
            self.search(instance, arrivals, w + 1, e, total + z, flown, best);
        }
        flown[w] = 0;
    }
}

fn max_flyable(expected: f64) -> u32 {
    let f = (expected + FLOW_EPSILON).floor();
    if f <= 0.0 {
        0
    } else {
        f as u32
    }
}

/// `E[k][w]` for given arrivals and flights.
///
/// Fails when some `Z[k][w]` exceeds `E[k][w]` by more than [`FLOW_EPSILON`].
pub fn expected_availability(
    arrivals: &[Vec<u32>],
    flown: &[Vec<u32>],
    instance: &StaticInstance,
) -> Result<Vec<Vec<f64>>, ExpectationError> {
    let waves = instance.wave_count();
    (0..instance.type_count())
        .map(|k| {
            let tf = TypeFlow::new(instance, k);
            let mut e = Vec::with_capacity(waves);
            let mut prev = 0.0;
            for w in 0..waves {
                let cur = tf.next_expected(instance, w, prev, &arrivals[k], &flown[k]);
                if f64::from(flown[k][w]) > cur + FLOW_EPSILON {
                    return Err(ExpectationError::InfeasibleFlow {
                        type_id: k,
                        wave: w,
                        flown: flown[k][w],
                        expected: cur,
                    });
                }
                e.push(cur);
                prev = cur;
            }
            Ok(e)
        })
        .collect()
}

/// Flights maximizing total coverage for the given arrivals. Types do not
/// interact, so each is optimized on its own by exhaustive enumeration.
pub fn optimal_flow(arrivals: &[Vec<u32>], instance: &StaticInstance) -> FlowPlan {
    let mut flown = Vec::with_capacity(instance.type_count());
    let mut objective = 0;
    for k in 0..instance.type_count() {
        let (value, z) = TypeFlow::new(instance, k).best(instance, &arrivals[k]);
        objective += value;
        flown.push(z);
    }
    let expected_avail = expected_availability(arrivals, &flown, instance)
        .expect("optimal flights respect the availability bound");
    FlowPlan { arrivals: arrivals.to_vec(), expected_avail, flown, objective }
}

/// Coverage plan and objective induced by a due-date assignment.
pub fn objective_of(assignment: &DueDateAssignment, instance: &StaticInstance) -> FlowPlan {
    optimal_flow(&compute_arrivals(assignment, instance), instance)
}

/// Memoized per-type optimum, keyed by the arrival vector. Search routines
/// evaluate the same arrival counts over and over.
#[derive(Debug)]
pub(crate) struct FlowCache {
    models: Vec<TypeFlow>,
    memo: Vec<HashMap<Vec<u32>, u32>>,
}

impl FlowCache {
    pub fn new(instance: &StaticInstance) -> Self {
        let models = (0..instance.type_count()).map(|k| TypeFlow::new(instance, k)).collect();
        Self { models, memo: vec![HashMap::new(); instance.type_count()] }
    }

    pub fn type_value(&mut self, instance: &StaticInstance, k: usize, arrivals: &[u32]) -> u32 {
        if let Some(&v) = self.memo[k].get(arrivals) {
            return v;
        }
        let v = self.models[k].best(instance, arrivals).0;
        self.memo[k].insert(arrivals.to_vec(), v);
        v
    }

    pub fn value(&mut self, instance: &StaticInstance, arrivals: &[Vec<u32>]) -> u32 {
        (0..arrivals.len()).map(|k| self.type_value(instance, k, &arrivals[k])).sum()
    }
}
