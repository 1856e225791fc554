//! Auditable edge-storage ledger enforcing the `n * k` cap.
//!
//! Every graph edge an algorithm stores — spanning-tree edges of pending
//! components, attach edges, buffered edges, retained back edges — is charged
//! to the ledger while held and released when dropped or moved to the final
//! output tree. Auxiliary bookkeeping (vertex maps, union-find state, the
//! output tree itself) is not charged; the model caps *graph edges held*, and
//! charging to exactly the capacity is legal.

use std::io::Write;

use thiserror::Error;

/// Errors raised by the ledger.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BudgetError {
    /// A charge would have pushed usage above capacity.
    #[error("budget exceeded: holding {current} of {capacity} edges, cannot charge {count} more")]
    Exceeded {
        /// Usage at the time of the attempted charge.
        current: usize,
        /// Immutable capacity (`n * k`).
        capacity: usize,
        /// Size of the rejected charge.
        count: usize,
    },
    /// A release exceeded the amount currently charged.
    #[error("double release: attempted to release {count} with only {current} charged")]
    DoubleRelease {
        /// Usage at the time of the attempted release.
        current: usize,
        /// Size of the rejected release.
        count: usize,
    },
}

/// One ledger mutation, recorded when tracing is enabled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEvent {
    /// Sequence number of the mutation (0-based, monotonically increasing).
    pub index: u64,
    /// Usage immediately after the mutation.
    pub current: usize,
}

/// Storage ledger with capacity `n * k`, peak tracking, and an optional
/// mutation trace.
#[derive(Debug, Clone)]
pub struct BudgetLedger {
    capacity: usize,
    current: usize,
    peak: usize,
    next_index: u64,
    trace: Option<Vec<TraceEvent>>,
}

impl BudgetLedger {
    /// Creates a ledger with capacity `n * k`.
    #[must_use]
    pub fn new(n: usize, k: u32) -> Self {
        Self::with_capacity(n.saturating_mul(k as usize))
    }

    /// Creates a ledger with an explicit capacity (tests, unbounded audits).
    #[must_use]
    pub fn with_capacity(capacity: usize) -> Self {
        Self {
            capacity,
            current: 0,
            peak: 0,
            next_index: 0,
            trace: None,
        }
    }

    /// Enables event tracing. Existing usage is not retroactively recorded.
    pub fn enable_trace(&mut self) {
        if self.trace.is_none() {
            self.trace = Some(Vec::new());
        }
    }

    /// Immutable capacity.
    #[must_use]
    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Edges currently charged.
    #[must_use]
    pub fn current(&self) -> usize {
        self.current
    }

    /// Maximum usage ever observed.
    #[must_use]
    pub fn peak_usage(&self) -> usize {
        self.peak
    }

    /// Charges `count` additional edges.
    ///
    /// # Errors
    ///
    /// Returns [`BudgetError::Exceeded`] when the charge would exceed
    /// capacity; usage is left unchanged.
    pub fn charge(&mut self, count: usize) -> Result<(), BudgetError> {
        if count == 0 {
            return Ok(());
        }
        let new = self.current + count;
        if new > self.capacity {
            return Err(BudgetError::Exceeded {
                current: self.current,
                capacity: self.capacity,
                count,
            });
        }
        self.current = new;
        self.peak = self.peak.max(new);
        self.record();
        Ok(())
    }

    /// Releases `count` previously charged edges.
    ///
    /// # Errors
    ///
    /// Returns [`BudgetError::DoubleRelease`] when `count` exceeds current
    /// usage; usage is left unchanged.
    pub fn release(&mut self, count: usize) -> Result<(), BudgetError> {
        if count == 0 {
            return Ok(());
        }
        if count > self.current {
            return Err(BudgetError::DoubleRelease {
                current: self.current,
                count,
            });
        }
        self.current -= count;
        self.record();
        Ok(())
    }

    /// Recorded mutation events (empty when tracing is disabled).
    #[must_use]
    pub fn trace_events(&self) -> &[TraceEvent] {
        self.trace.as_deref().unwrap_or(&[])
    }

    /// Writes the trace as CSV with header `event_index,current`.
    ///
    /// # Errors
    ///
    /// Propagates I/O errors from the writer.
    pub fn write_trace_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "event_index,current")?;
        for ev in self.trace_events() {
            writeln!(w, "{},{}", ev.index, ev.current)?;
        }
        Ok(())
    }

    fn record(&mut self) {
        let index = self.next_index;
        self.next_index += 1;
        if let Some(trace) = &mut self.trace {
            trace.push(TraceEvent {
                index,
                current: self.current,
            });
        }
    }
}
