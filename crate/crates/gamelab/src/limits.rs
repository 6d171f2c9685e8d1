//! Search budgets and three-valued verdicts shared by the game solvers.

use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winner {
    Spoiler,
    Duplicator,
    Unknown,
}

impl Winner {
    pub fn is_unknown(&self) -> bool {
        matches!(self, Winner::Unknown)
    }
}

impl std::fmt::Display for Winner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Winner::Spoiler => write!(f, "SPOILER"),
            Winner::Duplicator => write!(f, "DUPLICATOR"),
            Winner::Unknown => write!(f, "UNKNOWN"),
        }
    }
}

/// Node and wall-clock budget; on exhaustion solvers return
/// [`Winner::Unknown`] rather than guessing.
#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    pub max_nodes: u64,
    pub max_seconds: f64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_nodes: 10_000_000,
            max_seconds: 60.0,
        }
    }
}

impl SearchLimits {
    pub fn nodes(max_nodes: u64) -> Self {
        SearchLimits {
            max_nodes,
            ..Default::default()
        }
    }

    pub fn generous(max_seconds: f64) -> Self {
        SearchLimits {
            max_nodes: u64::MAX,
            max_seconds,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchStats {
    pub nodes: u64,
    pub memo_hits: u64,
    pub wall_seconds: f64,
}

pub(crate) struct Ticker {
    pub limits: SearchLimits,
    pub nodes: u64,
    pub memo_hits: u64,
    pub start: Instant,
    pub exhausted: bool,
}

impl Ticker {
    pub fn new(limits: SearchLimits) -> Self {
        Ticker {
            limits,
            nodes: 0,
            memo_hits: 0,
            start: Instant::now(),
            exhausted: false,
        }
    }

    /// Count a node; false once the budget is gone.
    #[inline]
    pub fn tick(&mut self) -> bool {
        if self.exhausted {
            return false;
        }
        self.nodes += 1;
        if self.nodes > self.limits.max_nodes {
            self.exhausted = true;
        } else if self.nodes % 8192 == 0
            && self.start.elapsed().as_secs_f64() > self.limits.max_seconds
        {
            self.exhausted = true;
        }
        !self.exhausted
    }

    pub fn stats(&self) -> SearchStats {
        SearchStats {
            nodes: self.nodes,
            memo_hits: self.memo_hits,
            wall_seconds: self.start.elapsed().as_secs_f64(),
        }
    }
}
