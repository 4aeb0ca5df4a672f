//! Independent decision procedures used to cross-check the constructions.
//!
//! * [`search`]: exhaustive backtracking for group and classic distance
//!   magic labelings of small graphs.
//! * [`pair_sum`]: the exact reduction of classic distance magic labelings
//!   of `X[C4]` to per-copy pair sums plus a pairing of `1..=4|X|`, its
//!   solver, and the `K_{m,n}[C4]` scan built on it.
//! * [`windmill`]: a checkable infeasibility certificate for the Dutch
//!   windmill `D_4^t[C4]`.

pub mod pair_sum;
pub mod search;
pub mod windmill;

use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

pub use pair_sum::{
    reduce_c4_product, scan_kmn_c4, solve_pair_sum, PairSumReport, PairSumSystem, ScanEntry,
};
pub use search::{search_classic_dm, search_group_dm, SearchOptions};
pub use windmill::{windmill_certificate, Certificate};

/// Limits on a search. `None` means unlimited.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn nodes(max_nodes: u64) -> Self {
        Self {
            max_nodes: Some(max_nodes),
            max_time: None,
        }
    }

    pub fn time(max_time: Duration) -> Self {
        Self {
            max_nodes: None,
            max_time: Some(max_time),
        }
    }
}

/// How a search ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome<L, W> {
    /// A labeling that the verifier accepted, with its magic constant.
    Found { labeling: L, mu: W },
    /// The search space was fully explored without a solution.
    ExhaustedNone,
    /// The budget ran out first; nothing is claimed.
    BudgetExceeded,
}

#[derive(Clone, Debug)]
pub struct SearchReport<L, W> {
    pub outcome: SearchOutcome<L, W>,
    pub nodes_explored: u64,
    pub elapsed: Duration,
    /// Whether a `Found` outcome is the lexicographically least solution
    /// (always true for sequential searches).
    pub deterministic: bool,
    /// Why the search stopped without exploring, if it did.
    pub detail: Option<String>,
}

impl<L, W> SearchReport<L, W> {
    pub fn is_found(&self) -> bool {
        matches!(self.outcome, SearchOutcome::Found { .. })
    }

    pub fn is_none(&self) -> bool {
        matches!(self.outcome, SearchOutcome::ExhaustedNone)
    }

    pub fn mu(&self) -> Option<&W> {
        match &self.outcome {
            SearchOutcome::Found { mu, .. } => Some(mu),
            _ => None,
        }
    }

    pub fn labeling(&self) -> Option<&L> {
        match &self.outcome {
            SearchOutcome::Found { labeling, .. } => Some(labeling),
            _ => None,
        }
    }

    pub fn status(&self) -> &'static str {
        match self.outcome {
            SearchOutcome::Found { .. } => "FOUND",
            SearchOutcome::ExhaustedNone => "NONE",
            SearchOutcome::BudgetExceeded => "BUDGET-EXCEEDED",
        }
    }
}

impl<L, W: fmt::Display> fmt::Display for SearchReport<L, W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.status())?;
        if let Some(mu) = self.mu() {
            write!(f, " mu={mu}")?;
        }
        write!(f, " nodes={}", self.nodes_explored)
    }
}

/// Node and deadline accounting shared by all workers of one search.
pub(crate) struct Meter {
    budget: Budget,
    start: Instant,
    nodes: AtomicU64,
    exceeded: AtomicBool,
}

/// Nodes a worker counts locally before publishing to the shared meter.
const FLUSH_EVERY: u64 = 1024;

impl Meter {
    pub(crate) fn new(budget: Budget) -> Self {
        Self {
            budget,
            start: Instant::now(),
            nodes: AtomicU64::new(0),
            exceeded: AtomicBool::new(false),
        }
    }

    /// Publishes `local` nodes; returns false once the budget is spent.
    pub(crate) fn flush(&self, local: u64) -> bool {
        let total = self.nodes.fetch_add(local, Ordering::Relaxed) + local;
        let over_nodes = self.budget.max_nodes.is_some_and(|max| total > max);
        let over_time = self
            .budget
            .max_time
            .is_some_and(|max| self.start.elapsed() > max);
        if over_nodes || over_time {
            self.exceeded.store(true, Ordering::Relaxed);
        }
        !self.is_exceeded()
    }

    pub(crate) fn is_exceeded(&self) -> bool {
        self.exceeded.load(Ordering::Relaxed)
    }

    pub(crate) fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }

    pub(crate) fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }
}

/// Per-worker node counter that publishes to a [`Meter`] in batches.
pub(crate) struct LocalCounter<'m> {
    meter: &'m Meter,
    pending: u64,
}

impl<'m> LocalCounter<'m> {
    pub(crate) fn new(meter: &'m Meter) -> Self {
        Self { meter, pending: 0 }
    }

    /// Counts one node; returns false when the search must stop.
    #[inline]
    pub(crate) fn tick(&mut self) -> bool {
        self.pending += 1;
        if self.pending >= FLUSH_EVERY {
            let pending = std::mem::take(&mut self.pending);
            return self.meter.flush(pending);
        }
        true
    }

    pub(crate) fn finish(&mut self) {
        let pending = std::mem::take(&mut self.pending);
        self.meter.flush(pending);
    }
}
