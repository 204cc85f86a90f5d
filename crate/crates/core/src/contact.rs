//! Contact-spike detection on the ground device.
//!
//! The device lying on the floor sees gravity (≈ 9.8 m/s²) on one axis and a
//! sharp acceleration spike the moment a hand knocks it on pickup. That spike
//! is the per-event ground-truth timestamp the evaluation matches against.

use crate::data::ImuSample;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default deviation threshold in m/s²; floor vibration stays well below it.
pub const DEFAULT_THRESHOLD: f64 = 3.0;
/// Default refractory period: excursions closer than this merge into one contact.
pub const DEFAULT_REFRACTORY_MS: i64 = 500;
/// Leading stretch used to estimate the resting baseline.
pub const BASELINE_WINDOW_MS: i64 = 500;

#[derive(Debug, Error, PartialEq)]
pub enum ContactError {
    /// Not enough leading samples to estimate a baseline.
    #[error("series too short: {ms} ms, need at least {BASELINE_WINDOW_MS} ms to estimate a baseline")]
    SeriesTooShort { ms: i64 },
}

/// One detected hand-to-device contact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactDetection {
    /// Timestamp of the first sample of the excursion.
    pub contact_ms: i64,
    /// Largest observed |value − baseline| within the merged excursion.
    pub peak_deviation: f64,
}

/// Detects contact spikes in a resting device's accelerometer series.
///
/// The vertical axis is the accelerometer channel whose median over the first
/// 500 ms is closest in magnitude to 9.8 m/s²; that median is the baseline.
/// Each maximal run of samples with `|value − baseline| > threshold` emits a
/// detection at its first sample, and excursions starting within
/// `refractory_ms` of the previous detection merge into it (keeping the
/// earliest timestamp and the largest deviation). Detections come out sorted.
pub fn detect_contacts(
    series: &[ImuSample],
    threshold: f64,
    refractory_ms: i64,
) -> Result<Vec<ContactDetection>, ContactError> {
    let baseline_samples = series
        .iter()
        .take_while(|s| s.t_ms - series.first().map_or(0, |f| f.t_ms) < BASELINE_WINDOW_MS)
        .count();
    let covered_ms = series.last().map_or(0, |l| l.t_ms - series[0].t_ms + 10);
    if covered_ms < BASELINE_WINDOW_MS {
        return Err(ContactError::SeriesTooShort { ms: covered_ms });
    }

    let (axis, baseline) = vertical_axis(&series[..baseline_samples]);

    let mut detections: Vec<ContactDetection> = Vec::new();
    let mut in_excursion = false;
    for sample in series {
        let deviation = (sample.accel[axis] - baseline).abs();
        if deviation > threshold {
            if !in_excursion {
                in_excursion = true;
                match detections.last_mut() {
                    Some(last) if sample.t_ms - last.contact_ms < refractory_ms => {
                        last.peak_deviation = last.peak_deviation.max(deviation);
                    }
                    _ => detections.push(ContactDetection { contact_ms: sample.t_ms, peak_deviation: deviation }),
                }
            } else if let Some(last) = detections.last_mut() {
                last.peak_deviation = last.peak_deviation.max(deviation);
            }
        } else {
            in_excursion = false;
        }
    }
    Ok(detections)
}

/// Convenience wrapper with the default threshold and refractory period.
pub fn detect_contacts_default(series: &[ImuSample]) -> Result<Vec<ContactDetection>, ContactError> {
    detect_contacts(series, DEFAULT_THRESHOLD, DEFAULT_REFRACTORY_MS)
}

/// Picks the gravity-bearing accelerometer axis and its resting value.
fn vertical_axis(baseline_window: &[ImuSample]) -> (usize, f64) {
    let mut best = (0usize, f64::INFINITY, 0.0f64);
    for axis in 0..3 {
        let med = median(baseline_window.iter().map(|s| s.accel[axis]));
        let score = (med.abs() - 9.8).abs();
        if score < best.1 {
            best = (axis, score, med);
        }
    }
    (best.0, best.2)
}

fn median(values: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite medians"));
    let n = v.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
