//! Summary statistics over simulation traces.

use serde::{Deserialize, Serialize};

use crate::dynasim::SimTrace;

/// Coverage thresholds reported in summaries.
pub const CDF_POINTS: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population variance.
pub fn variance(values: &[f64]) -> f64 {
    let m = mean(values);
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64
}

/// Share of values at or below each threshold.
pub fn empirical_cdf(values: &[f64], points: &[f64]) -> Vec<f64> {
    points
        .iter()
        .map(|&p| {
            if values.is_empty() {
                return f64::NAN;
            }
            // Tolerance so that 3 of 10 counts as coverage 0.3.
            values.iter().filter(|&&v| v <= p + 1e-12).count() as f64 / values.len() as f64
        })
        .collect()
}

/// Ranks starting at 1, ties sharing their average rank.
pub fn ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = r;
        }
        i = j + 1;
    }
    out
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return f64::NAN;
    }
    sxy / (sxx * syy).sqrt()
}

/// Spearman rank correlation; NaN when either side is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    pearson(&ranks(x), &ranks(y))
}

/// One (scheduler, policy) cell of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CellSummary {
    pub scheduler: String,
    pub policy: String,
    pub runs: usize,
    /// Wave at which the running mean is read.
    pub wave: usize,
    pub o_mean: f64,
    pub o_variance: f64,
    /// Mean ready share over all reschedules.
    pub rho: f64,
    /// Coverage CDF over every wave of every run, at [`CDF_POINTS`].
    pub cdf: Vec<f64>,
    pub mean_decision_ms: f64,
    pub timeouts: u32,
}

pub fn summarize(traces: &[SimTrace], wave: usize) -> CellSummary {
    let o: Vec<f64> = traces.iter().map(|t| t.o_at(wave)).collect();
    let rho: Vec<f64> = traces.iter().flat_map(|t| t.rho_values()).collect();
    let nus: Vec<f64> = traces.iter().flat_map(|t| t.nu.iter().copied()).collect();
    let ms: Vec<f64> = traces
        .iter()
        .flat_map(|t| t.decision_ms.iter().zip(&t.epoch_rho).filter(|(_, r)| r.is_some()).map(|(m, _)| *m))
        .collect();
    let first = traces.first();
    CellSummary {
        scheduler: first.map(|t| t.scheduler.clone()).unwrap_or_default(),
        policy: first.map(|t| t.policy.clone()).unwrap_or_default(),
        runs: traces.len(),
        wave,
        o_mean: mean(&o),
        o_variance: variance(&o),
        rho: mean(&rho),
        cdf: empirical_cdf(&nus, &CDF_POINTS),
        mean_decision_ms: if ms.is_empty() { 0.0 } else { mean(&ms) },
        timeouts: traces.iter().map(|t| t.timeouts).sum(),
    }
}
