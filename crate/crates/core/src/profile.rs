//! Piecewise-constant resource usage over time.

use crate::model::Time;

/// Usage profile of one trade, stored as the raw rectangles placed on it.
/// Queries sweep the rectangle boundaries, so cost grows with the number of
/// rectangles rather than the length of the horizon.
#[derive(Debug, Clone, Default)]
pub struct CapacityProfile {
    blocks: Vec<(Time, Time, i64)>,
}

impl CapacityProfile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, start: Time, end: Time, demand: u32) {
        if end > start {
            self.blocks.push((start, end, i64::from(demand)));
        }
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Maximal segments `(from, to, usage)` with positive usage, in time order.
    pub fn segments(&self) -> Vec<(Time, Time, i64)> {
        let mut events: Vec<(Time, i64)> = Vec::with_capacity(self.blocks.len() * 2);
        for &(s, e, c) in &self.blocks {
            events.push((s, c));
            events.push((e, -c));
        }
        events.sort_unstable();
        let mut out = Vec::new();
        let mut usage = 0i64;
        let mut i = 0;
        while i < events.len() {
            let t = events[i].0;
            while i < events.len() && events[i].0 == t {
                usage += events[i].1;
                i += 1;
            }
            if usage > 0 {
                if let Some(&(next, _)) = events.get(i) {
                    out.push((t, next, usage));
                }
            }
        }
        out
    }

    /// Peak usage over `[from, to)`.
    pub fn max_usage_in(&self, from: Time, to: Time) -> i64 {
        self.segments()
            .into_iter()
            .filter(|&(a, b, _)| a < to && b > from)
            .map(|(_, _, u)| u)
            .max()
            .unwrap_or(0)
    }

    pub fn peak(&self) -> i64 {
        self.segments().into_iter().map(|(_, _, u)| u).max().unwrap_or(0)
    }

    /// Earliest `s >= from` such that adding `demand` over `[s, s + duration)`
    /// keeps usage within `capacity`.
    pub fn earliest_fit(&self, from: Time, duration: Time, demand: u32, capacity: u32) -> Time {
        let limit = i64::from(capacity) - i64::from(demand);
        let segs = self.segments();
        let mut s = from;
        loop {
            let clash = segs
                .iter()
                .find(|&&(a, b, u)| u > limit && a < s + duration && b > s);
            match clash {
                Some(&(_, b, _)) => s = b,
                None => return s,
            }
        }
    }
}
