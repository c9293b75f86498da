use std::time::{Duration, Instant};

use crate::bdd::DEFAULT_NODE_CAP;

/// Resource bounds for symbolic runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub node_cap: usize,
    pub deadline: Option<Instant>,
    /// Maximum number of image steps; `None` uses `2^latches + 1`.
    pub step_cap: Option<usize>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            node_cap: DEFAULT_NODE_CAP,
            deadline: None,
            step_cap: None,
        }
    }
}

impl Limits {
    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.deadline = Some(Instant::now() + limit);
        self
    }

    pub fn with_node_cap(mut self, cap: usize) -> Self {
        self.node_cap = cap;
        self
    }

    pub fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}
