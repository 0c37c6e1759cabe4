use std::cell::Cell;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

/// Work limit for one solve: an optional wall-clock limit and an optional
/// search-node limit. The node limit is deterministic; the clock is not.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BudgetSpec {
    pub time_limit_secs: Option<f64>,
    pub node_limit: Option<u64>,
}

impl BudgetSpec {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn seconds(secs: f64) -> Self {
        Self { time_limit_secs: Some(secs), node_limit: None }
    }

    pub fn nodes(limit: u64) -> Self {
        Self { time_limit_secs: None, node_limit: Some(limit) }
    }

    pub fn start(&self) -> Budget {
        Budget {
            deadline: self
                .time_limit_secs
                .map(|s| Instant::now() + Duration::from_secs_f64(s.max(0.0))),
            node_limit: self.node_limit,
            nodes: Cell::new(0),
            exhausted: Cell::new(false),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exhausted;

/// A running budget. Not `Sync`: each solve owns its own.
#[derive(Debug)]
pub struct Budget {
    deadline: Option<Instant>,
    node_limit: Option<u64>,
    nodes: Cell<u64>,
    exhausted: Cell<bool>,
}

impl Budget {
    pub fn unlimited() -> Self {
        BudgetSpec::unlimited().start()
    }

    /// Counts one search node.
    pub fn tick(&self) -> Result<(), Exhausted> {
        if self.exhausted.get() {
            return Err(Exhausted);
        }
        let n = self.nodes.get() + 1;
        self.nodes.set(n);
        let over_nodes = self.node_limit.is_some_and(|limit| n > limit);
        let over_time = n.is_multiple_of(128) && self.deadline.is_some_and(|d| Instant::now() >= d);
        if over_nodes || over_time {
            self.exhausted.set(true);
            return Err(Exhausted);
        }
        Ok(())
    }

    pub fn nodes(&self) -> u64 {
        self.nodes.get()
    }

    pub fn is_exhausted(&self) -> bool {
        self.exhausted.get()
    }
}
