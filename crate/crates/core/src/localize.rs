//! Turning a per-frame classification timeline into discrete pickup events.
//!
//! A pickup event is a maximal run of consecutive `Pickup` frames. Because
//! each frame covers 10 ms, an event spanning frames `[s, e]` (start
//! timestamps, inclusive) has a Time-of-Pickup of `e − s + 10` ms: even a
//! single flagged frame is a valid 10 ms event.

use crate::data::{ActivityClass, SAMPLE_PERIOD_MS};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default minimum Time-of-Pickup for [`duration_filter`], in milliseconds.
///
/// Genuine pickups take on the order of a second; sub-300 ms events are almost
/// always isolated false-positive frames. The filter is optional and headline
/// metrics are reported both with and without it.
pub const DEFAULT_MIN_TOP_MS: i64 = 300;

#[derive(Debug, Error, PartialEq)]
pub enum LocalizeError {
    /// Timeline timestamps are not strictly ascending on the 10 ms grid.
    #[error("invalid timeline: {0}")]
    InvalidTimeline(String),
    /// Time-of-Pickup is only defined for pickup events.
    #[error("event at [{start_ms}, {end_ms}] is not a pickup")]
    NotAPickup { start_ms: i64, end_ms: i64 },
}

/// A contiguous run of identically-classified frames.
///
/// `start_ms` and `end_ms` are the first and last member frames' window-start
/// timestamps (both inclusive), so `top_ms = end_ms − start_ms + 10`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalizedEvent {
    pub start_ms: i64,
    pub end_ms: i64,
    pub class: ActivityClass,
    /// Time-of-Pickup: the event's duration in milliseconds.
    pub top_ms: i64,
}

impl LocalizedEvent {
    pub fn new(start_ms: i64, end_ms: i64, class: ActivityClass) -> Self {
        Self { start_ms, end_ms, class, top_ms: end_ms - start_ms + SAMPLE_PERIOD_MS }
    }

    /// Half-open interval `[start_ms, end_ms + 10)` covered by the event.
    pub fn contains(&self, t_ms: i64) -> bool {
        t_ms >= self.start_ms && t_ms < self.end_ms + SAMPLE_PERIOD_MS
    }
}

/// Collapses a dense classification timeline into maximal pickup runs.
///
/// `timeline` pairs each frame's window-start timestamp with its class and
/// must be strictly ascending with exact 10 ms spacing (the shape
/// `predict_timeline` emits); anything else is an [`LocalizeError::InvalidTimeline`].
pub fn segment_events(timeline: &[(i64, ActivityClass)]) -> Result<Vec<LocalizedEvent>, LocalizeError> {
    for pair in timeline.windows(2) {
        let (prev, next) = (pair[0].0, pair[1].0);
        if next <= prev {
            return Err(LocalizeError::InvalidTimeline(format!(
                "timestamps not ascending: {prev} then {next}"
            )));
        }
        if next - prev != SAMPLE_PERIOD_MS {
            return Err(LocalizeError::InvalidTimeline(format!(
                "gap of {} ms between {prev} and {next}, expected {SAMPLE_PERIOD_MS}",
                next - prev
            )));
        }
    }
    let mut events = Vec::new();
    let mut run_start: Option<i64> = None;
    let mut run_end = 0i64;
    for &(t_ms, class) in timeline {
        match (class, run_start) {
            (ActivityClass::Pickup, None) => {
                run_start = Some(t_ms);
                run_end = t_ms;
            }
            (ActivityClass::Pickup, Some(_)) => run_end = t_ms,
            (ActivityClass::Background, Some(start)) => {
                events.push(LocalizedEvent::new(start, run_end, ActivityClass::Pickup));
                run_start = None;
            }
            (ActivityClass::Background, None) => {}
        }
    }
    if let Some(start) = run_start {
        events.push(LocalizedEvent::new(start, run_end, ActivityClass::Pickup));
    }
    Ok(events)
}

/// Drops events shorter than `min_top_ms`, preserving order.
pub fn duration_filter(events: &[LocalizedEvent], min_top_ms: i64) -> Vec<LocalizedEvent> {
    events.iter().copied().filter(|e| e.top_ms >= min_top_ms).collect()
}

/// Time-of-Pickup of a pickup event; background events have none.
pub fn measure_top(event: &LocalizedEvent) -> Result<i64, LocalizeError> {
    match event.class {
        ActivityClass::Pickup => Ok(event.top_ms),
        ActivityClass::Background => {
            Err(LocalizeError::NotAPickup { start_ms: event.start_ms, end_ms: event.end_ms })
        }
    }
}
