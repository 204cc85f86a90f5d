//! Core data types and the frame/timestamp contract.
//!
//! Recordings hold one 100 Hz time-series per device; every series shares a
//! `t_ms = 10·i` grid. A movie frame indexed `i` summarizes the 3-second
//! window starting at `t0 = 10·i` ms, so a recording with `N` samples yields
//! `N − 299` candidate frames and a classification attached to each window's
//! start timestamp.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Sampling period of every series, in milliseconds (100 Hz).
pub const SAMPLE_PERIOD_MS: i64 = 10;
/// Samples per rendered frame window (3 seconds at 100 Hz).
pub const WINDOW_SAMPLES: usize = 300;
/// Frame window length in milliseconds.
pub const WINDOW_MS: i64 = 3000;

/// One inertial sample: acceleration in m/s² and angular rate in deg/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImuSample {
    /// Timestamp in milliseconds from the start of the recording.
    pub t_ms: i64,
    /// Accelerometer x/y/z in m/s².
    pub accel: [f64; 3],
    /// Gyroscope x/y/z in deg/s.
    pub gyro: [f64; 3],
}

impl ImuSample {
    /// A sample with all axes zeroed, at the given timestamp.
    pub fn zero(t_ms: i64) -> Self {
        Self { t_ms, accel: [0.0; 3], gyro: [0.0; 3] }
    }

    /// True when every axis value is finite.
    pub fn is_finite(&self) -> bool {
        self.accel.iter().chain(self.gyro.iter()).all(|v| v.is_finite())
    }
}

/// Where a device was worn or placed during a recording.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviceRole {
    LeftAnkle,
    RightAnkle,
    Ground,
}

impl DeviceRole {
    pub const ALL: [DeviceRole; 3] = [DeviceRole::LeftAnkle, DeviceRole::RightAnkle, DeviceRole::Ground];

    /// Stable lowercase name, used in file names and manifests.
    pub fn as_str(self) -> &'static str {
        match self {
            DeviceRole::LeftAnkle => "left_ankle",
            DeviceRole::RightAnkle => "right_ankle",
            DeviceRole::Ground => "ground",
        }
    }
}

impl std::str::FromStr for DeviceRole {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left_ankle" => Ok(DeviceRole::LeftAnkle),
            "right_ankle" => Ok(DeviceRole::RightAnkle),
            "ground" => Ok(DeviceRole::Ground),
            other => Err(format!("unknown device role `{other}`")),
        }
    }
}

impl std::fmt::Display for DeviceRole {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Errors for recording construction, windowing, and frame labeling.
#[derive(Debug, Error, PartialEq)]
pub enum DataError {
    /// Fewer samples than one frame window needs.
    #[error("recording too short: {samples} samples, need at least {WINDOW_SAMPLES}")]
    RecordingTooShort { samples: usize },
    /// A required device series is absent.
    #[error("recording is missing the {role} series")]
    MissingSeries { role: DeviceRole },
    /// A series departs from the shared `t_ms = 10·i` grid.
    #[error("series {role} sample {index}: t_ms {found} != {expected}")]
    MisalignedSeries { role: DeviceRole, index: usize, found: i64, expected: i64 },
    /// Series lengths differ between devices.
    #[error("series lengths differ: {role} has {found} samples, expected {expected}")]
    LengthMismatch { role: DeviceRole, found: usize, expected: usize },
    /// A sample contains NaN or infinity.
    #[error("series {role} sample {index} has a non-finite value")]
    NonFiniteSample { role: DeviceRole, index: usize },
    /// Event labels overlap or are internally mis-ordered.
    #[error("invalid labels: {0}")]
    InvalidLabels(String),
}

/// A multi-device recording on a shared 100 Hz grid.
///
/// Both ankle series must be present (they feed the renderer); a ground
/// series is optional. All series have identical length (≥ 300 samples)
/// and identical `t_ms = 10·i` timestamps.
#[derive(Debug, Clone, PartialEq)]
pub struct ImuRecording {
    pub recording_id: String,
    pub subject_id: String,
    series: BTreeMap<DeviceRole, Vec<ImuSample>>,
}

impl ImuRecording {
    /// Validates and wraps a set of device series.
    pub fn new(
        recording_id: impl Into<String>,
        subject_id: impl Into<String>,
        series: BTreeMap<DeviceRole, Vec<ImuSample>>,
    ) -> Result<Self, DataError> {
        for role in [DeviceRole::LeftAnkle, DeviceRole::RightAnkle] {
            if !series.contains_key(&role) {
                return Err(DataError::MissingSeries { role });
            }
        }
        let expected_len = series[&DeviceRole::LeftAnkle].len();
        if expected_len < WINDOW_SAMPLES {
            return Err(DataError::RecordingTooShort { samples: expected_len });
        }
        for (&role, samples) in &series {
            if samples.len() != expected_len {
                return Err(DataError::LengthMismatch { role, found: samples.len(), expected: expected_len });
            }
            for (index, sample) in samples.iter().enumerate() {
                let expected = index as i64 * SAMPLE_PERIOD_MS;
                if sample.t_ms != expected {
                    return Err(DataError::MisalignedSeries { role, index, found: sample.t_ms, expected });
                }
                if !sample.is_finite() {
                    return Err(DataError::NonFiniteSample { role, index });
                }
            }
        }
        Ok(Self { recording_id: recording_id.into(), subject_id: subject_id.into(), series })
    }

    /// Samples per series.
    pub fn sample_count(&self) -> usize {
        self.series[&DeviceRole::LeftAnkle].len()
    }

    /// Total covered time in milliseconds.
    pub fn duration_ms(&self) -> i64 {
        self.sample_count() as i64 * SAMPLE_PERIOD_MS
    }

    /// The series for one device, if recorded.
    pub fn series(&self, role: DeviceRole) -> Option<&[ImuSample]> {
        self.series.get(&role).map(Vec::as_slice)
    }

    /// Device roles present, in stable order.
    pub fn roles(&self) -> impl Iterator<Item = DeviceRole> + '_ {
        self.series.keys().copied()
    }

    /// Number of classifiable frames, i.e. [`candidate_frame_count`] of this recording.
    pub fn candidate_frames(&self) -> usize {
        // The constructor guarantees >= WINDOW_SAMPLES.
        candidate_frame_count(self.sample_count()).expect("validated length")
    }
}

/// One annotated pickup: the reach begins at `start_ms`, the hand touches the
/// object at `contact_ms`, and the first step after standing back up ends the
/// action at `ffm_ms` (first-foot-movement).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventLabel {
    pub start_ms: i64,
    pub contact_ms: i64,
    pub ffm_ms: i64,
}

impl EventLabel {
    /// Builds a label, enforcing `start < contact < ffm`.
    pub fn new(start_ms: i64, contact_ms: i64, ffm_ms: i64) -> Result<Self, DataError> {
        if !(start_ms < contact_ms && contact_ms < ffm_ms) {
            return Err(DataError::InvalidLabels(format!(
                "label must order start < contact < ffm, got {start_ms} / {contact_ms} / {ffm_ms}"
            )));
        }
        Ok(Self { start_ms, contact_ms, ffm_ms })
    }

    /// Label span (closed interval) in milliseconds.
    pub fn span_ms(&self) -> i64 {
        self.ffm_ms - self.start_ms
    }
}

/// Per-frame class. `Background` is everything that is not a pickup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivityClass {
    Background = 0,
    Pickup = 1,
}

impl ActivityClass {
    /// Class index used by the classifier head (background 0, pickup 1).
    pub fn index(self) -> usize {
        self as usize
    }
}

/// Ground-truth class per candidate frame; index `i` covers the window
/// starting at `t0 = 10·i` ms.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameLabelTrack {
    classes: Vec<ActivityClass>,
}

impl FrameLabelTrack {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn get(&self, frame_idx: usize) -> Option<ActivityClass> {
        self.classes.get(frame_idx).copied()
    }

    pub fn as_slice(&self) -> &[ActivityClass] {
        &self.classes
    }

    /// (background, pickup) frame counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let pickups = self.classes.iter().filter(|c| **c == ActivityClass::Pickup).count();
        (self.classes.len() - pickups, pickups)
    }

    /// Track for the first `frames` candidate frames only.
    pub fn prefix(&self, frames: usize) -> FrameLabelTrack {
        FrameLabelTrack { classes: self.classes[..frames.min(self.classes.len())].to_vec() }
    }
}

impl From<Vec<ActivityClass>> for FrameLabelTrack {
    fn from(classes: Vec<ActivityClass>) -> Self {
        Self { classes }
    }
}

/// Half-open time window `[t0, t0 + 3000)` covered by a frame: `t0 = 10·frame_idx`.
pub fn frame_window(frame_idx: usize) -> (i64, i64) {
    let t0 = frame_idx as i64 * SAMPLE_PERIOD_MS;
    (t0, t0 + WINDOW_MS)
}

/// Number of frames a recording of `sample_count` samples can produce.
///
/// Each frame consumes a full 300-sample window, so the count is
/// `sample_count − 299`; shorter recordings produce none and error.
pub fn candidate_frame_count(sample_count: usize) -> Result<usize, DataError> {
    if sample_count < WINDOW_SAMPLES {
        return Err(DataError::RecordingTooShort { samples: sample_count });
    }
    Ok(sample_count - (WINDOW_SAMPLES - 1))
}

/// Ground-truth class for every candidate frame of `recording`.
///
/// A frame is `Pickup` exactly when its start timestamp falls inside a label's
/// closed `[start_ms, ffm_ms]` interval. Events may arrive in any order but
/// must not overlap.
pub fn label_frames(recording: &ImuRecording, events: &[EventLabel]) -> Result<FrameLabelTrack, DataError> {
    let mut sorted: Vec<EventLabel> = events.to_vec();
    sorted.sort_by_key(|e| e.start_ms);
    for pair in sorted.windows(2) {
        if pair[1].start_ms <= pair[0].ffm_ms {
            return Err(DataError::InvalidLabels(format!(
                "events overlap: [{}, {}] and [{}, {}]",
                pair[0].start_ms, pair[0].ffm_ms, pair[1].start_ms, pair[1].ffm_ms
            )));
        }
    }
    let frames = candidate_frame_count(recording.sample_count())?;
    let mut classes = vec![ActivityClass::Background; frames];
    for event in &sorted {
        // Frames whose t0 lies in [start, ffm]; both bounds on the 10 ms grid or not.
        let first = (event.start_ms + SAMPLE_PERIOD_MS - 1).div_euclid(SAMPLE_PERIOD_MS).max(0);
        let last = event.ffm_ms.div_euclid(SAMPLE_PERIOD_MS);
        for idx in first..=last {
            if idx >= 0 && (idx as usize) < frames {
                classes[idx as usize] = ActivityClass::Pickup;
            }
        }
    }
    Ok(FrameLabelTrack { classes })
}
