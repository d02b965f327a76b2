use crate::vectorspace::Vector;

/// State after one round. Query counters are cumulative ledger totals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord {
    pub round: u64,
    pub duel_queries: u64,
    pub multiwise_queries: u64,
    /// Objective at the current iterate `w`.
    pub f_w: f64,
    /// Objective at the running minimum (the algorithm's output candidate).
    pub f_runmin: f64,
}

/// Convergence record of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    /// Round 0: the initial point before any query.
    pub start: TraceRecord,
    pub records: Vec<TraceRecord>,
    /// The returned point (running minimum after the last round).
    pub final_point: Vector,
    pub warnings: Vec<String>,
}

impl Trace {
    pub(crate) fn new(start: TraceRecord, final_point: Vector) -> Self {
        Trace {
            start,
            records: Vec::new(),
            final_point,
            warnings: Vec::new(),
        }
    }

    /// Number of completed rounds.
    pub fn rounds(&self) -> u64 {
        self.records.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// The initial record followed by every round.
    pub fn all(&self) -> impl Iterator<Item = &TraceRecord> {
        std::iter::once(&self.start).chain(&self.records)
    }

    pub fn last(&self) -> &TraceRecord {
        self.records.last().unwrap_or(&self.start)
    }

    /// First round whose running minimum is at or below `target`.
    pub fn first_round_reaching(&self, target: f64) -> Option<&TraceRecord> {
        self.all().find(|r| r.f_runmin <= target)
    }

    /// Appends `other`'s rounds, shifting round numbers to follow ours.
    pub(crate) fn extend_with(&mut self, other: Trace) {
        let offset = self.last().round;
        self.records.extend(other.records.into_iter().map(|mut r| {
            r.round += offset;
            r
        }));
        self.final_point = other.final_point;
        self.warnings.extend(other.warnings);
    }
}
