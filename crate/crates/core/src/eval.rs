//! Window- and event-level metrics plus the leave-one-subject-out
//! cross-validation harness.
//!
//! Two granularities, matching how the pipeline is consumed:
//!
//! * **Window level** — every classified 10 ms frame is scored against the
//!   ground-truth label track (pickup = positive). Ratios with a zero
//!   denominator are reported as *absent* (`None`), never coerced to 0.
//! * **Event level** — contiguous pickup runs from [`crate::localize`] are
//!   matched against ground-truth contact timestamps: a contact is detected
//!   iff some predicted event's interval contains it, and a predicted event
//!   containing no contact is a false-positive event.
//!
//! [`losocv`] ties the two together: one fold per subject (that subject's
//! recordings are the test set), a seeded sample of other subjects'
//! recordings for validation, the rest for training. Folds re-train from
//! scratch; multiple rounds re-draw the split and training seeds so the
//! aggregate can be reported as a mean with a min–max range.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::data::{
    label_frames, ActivityClass, DataError, EventLabel, FrameLabelTrack, ImuRecording,
    SAMPLE_PERIOD_MS,
};
use crate::localize::{
    duration_filter, segment_events, LocalizeError, LocalizedEvent, DEFAULT_MIN_TOP_MS,
};
use crate::model::{
    predict_timeline, train, LabeledSequence, ModelError, TimelinePrediction, TrainConfig,
    SEQUENCE_LEN,
};
use crate::render::{render_movie, FrameSpec, MovieFrame, RenderError};

#[derive(Debug, Error)]
pub enum EvalError {
    /// Predictions and truth don't describe the same timeline.
    #[error("prediction/truth misalignment: {0}")]
    Alignment(String),
    /// Leave-one-subject-out needs at least three subjects.
    #[error("need at least 3 subjects for cross-validation, found {found}")]
    InsufficientSubjects { found: usize },
    /// A fold's train/validation/test sets overlap; the harness refuses to run.
    #[error("fold {fold_id} leaks data across splits: {detail}")]
    Leakage { fold_id: usize, detail: String },
    #[error("invalid evaluation options: {0}")]
    InvalidOptions(String),
    #[error("dataset unfit for evaluation: {0}")]
    InvalidDataset(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Localize(#[from] LocalizeError),
}

/// Binary confusion counts over classified windows (pickup = positive).
///
/// The derived ratios return `None` when their denominator is zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowMetrics {
    pub true_positives: u64,
    pub false_positives: u64,
    pub true_negatives: u64,
    pub false_negatives: u64,
}

impl WindowMetrics {
    pub fn total(&self) -> u64 {
        self.true_positives + self.false_positives + self.true_negatives + self.false_negatives
    }

    pub fn accuracy(&self) -> Option<f64> {
        ratio(self.true_positives + self.true_negatives, self.total())
    }

    pub fn precision(&self) -> Option<f64> {
        ratio(self.true_positives, self.true_positives + self.false_positives)
    }

    pub fn recall(&self) -> Option<f64> {
        ratio(self.true_positives, self.true_positives + self.false_negatives)
    }

    /// False-positive rate fp/(fp+tn).
    pub fn false_positive_rate(&self) -> Option<f64> {
        ratio(self.false_positives, self.false_positives + self.true_negatives)
    }

    /// Harmonic mean of precision and recall; absent if either is, or both are 0.
    pub fn f1(&self) -> Option<f64> {
        let (p, r) = (self.precision()?, self.recall()?);
        if p + r == 0.0 {
            return None;
        }
        Some(2.0 * p * r / (p + r))
    }

    /// Adds another confusion table into this one.
    pub fn merge(&mut self, other: &WindowMetrics) {
        self.true_positives += other.true_positives;
        self.false_positives += other.false_positives;
        self.true_negatives += other.true_negatives;
        self.false_negatives += other.false_negatives;
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den != 0).then(|| num as f64 / den as f64)
}

/// Event-level tallies from matching predicted events against contacts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventMetrics {
    /// Ground-truth contacts offered for matching.
    pub events_total: u64,
    /// Contacts contained in at least one predicted event.
    pub events_detected: u64,
    /// Predicted events containing no contact.
    pub false_positive_events: u64,
}

impl EventMetrics {
    pub fn recall(&self) -> Option<f64> {
        ratio(self.events_detected, self.events_total)
    }

    pub fn merge(&mut self, other: &EventMetrics) {
        self.events_total += other.events_total;
        self.events_detected += other.events_detected;
        self.false_positive_events += other.false_positive_events;
    }
}

/// Scores a classified timeline against the ground-truth label track.
///
/// `predicted` must cover exactly `truth.len()` windows and each prediction's
/// `t0_ms` must name the matching candidate frame (`t0 = 10·index`); any
/// mismatch is an [`EvalError::Alignment`]. Counts satisfy
/// `tp + fp + tn + fn = predicted.len()`.
pub fn window_metrics(
    predicted: &[TimelinePrediction],
    truth: &FrameLabelTrack,
) -> Result<WindowMetrics, EvalError> {
    if predicted.len() != truth.len() {
        return Err(EvalError::Alignment(format!(
            "{} predictions vs {} truth frames",
            predicted.len(),
            truth.len()
        )));
    }
    let mut m = WindowMetrics::default();
    for (i, pred) in predicted.iter().enumerate() {
        let frame = frame_index(pred.t0_ms, truth.len())?;
        if frame != i {
            return Err(EvalError::Alignment(format!(
                "prediction {i} carries t0 {} ms but the track's frame {i} starts at {} ms",
                pred.t0_ms,
                i as i64 * SAMPLE_PERIOD_MS
            )));
        }
        let actual = truth.get(frame).expect("index checked above");
        match (pred.class, actual) {
            (ActivityClass::Pickup, ActivityClass::Pickup) => m.true_positives += 1,
            (ActivityClass::Pickup, ActivityClass::Background) => m.false_positives += 1,
            (ActivityClass::Background, ActivityClass::Background) => m.true_negatives += 1,
            (ActivityClass::Background, ActivityClass::Pickup) => m.false_negatives += 1,
        }
    }
    Ok(m)
}

fn frame_index(t0_ms: i64, frames: usize) -> Result<usize, EvalError> {
    if t0_ms < 0 || t0_ms % SAMPLE_PERIOD_MS != 0 {
        return Err(EvalError::Alignment(format!("timestamp {t0_ms} ms is off the 10 ms frame grid")));
    }
    let idx = (t0_ms / SAMPLE_PERIOD_MS) as usize;
    if idx >= frames {
        return Err(EvalError::Alignment(format!(
            "timestamp {t0_ms} ms names frame {idx} but the track has {frames} frames"
        )));
    }
    Ok(idx)
}

/// Matches predicted pickup events against ground-truth contact timestamps.
///
/// A contact is detected iff some event's interval `[start, end + 10)`
/// contains it; an event containing no contact counts as one false-positive
/// event. Neither list needs to be sorted — matching is pure containment.
pub fn event_match(predicted_events: &[LocalizedEvent], contacts: &[i64]) -> EventMetrics {
    let detected = contacts
        .iter()
        .filter(|&&c| predicted_events.iter().any(|e| e.contains(c)))
        .count() as u64;
    let false_positive_events = predicted_events
        .iter()
        .filter(|e| !contacts.iter().any(|&c| e.contains(c)))
        .count() as u64;
    EventMetrics { events_total: contacts.len() as u64, events_detected: detected, false_positive_events }
}

/// Pickup-predicted, background-labeled windows whose `t0` falls inside any of
/// the given half-open `[start, end)` spans.
///
/// Used to attribute window false positives to specific stretches of a
/// recording (e.g. injected turn segments).
pub fn window_false_positives_within(
    predictions: &[TimelinePrediction],
    truth: &FrameLabelTrack,
    spans_ms: &[(i64, i64)],
) -> Result<u64, EvalError> {
    let mut count = 0u64;
    for pred in predictions {
        let frame = frame_index(pred.t0_ms, truth.len())?;
        let actual = truth.get(frame).expect("index checked above");
        if pred.class == ActivityClass::Pickup
            && actual == ActivityClass::Background
            && spans_ms.iter().any(|&(s, e)| pred.t0_ms >= s && pred.t0_ms < e)
        {
            count += 1;
        }
    }
    Ok(count)
}

/// How one cross-validation fold partitions the dataset, by recording id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSpec {
    pub fold_id: usize,
    /// The held-out subject whose recordings form the test set.
    pub test_subject: String,
    pub test: Vec<String>,
    pub validation: Vec<String>,
    pub train: Vec<String>,
}

impl FoldSpec {
    /// Confirms no recording id appears in two splits (and none twice in one).
    pub fn verify_disjoint(&self) -> Result<(), EvalError> {
        let mut seen: BTreeMap<&str, &str> = BTreeMap::new();
        for (split, ids) in
            [("test", &self.test), ("validation", &self.validation), ("train", &self.train)]
        {
            for id in ids {
                if let Some(prev) = seen.insert(id.as_str(), split) {
                    return Err(EvalError::Leakage {
                        fold_id: self.fold_id,
                        detail: format!("recording {id:?} appears in both {prev} and {split}"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Knobs for [`losocv`]. `Default` matches the synthetic benchmark setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LosocvOptions {
    /// Independent repetitions with fresh splits and training seeds.
    pub rounds: usize,
    /// Recordings sampled from non-test subjects for early stopping.
    pub validation_recordings: usize,
    /// Per-fold cap on pickup training sequences (sampled, seeded).
    pub max_train_pos: usize,
    /// Per-fold cap on background training sequences.
    pub max_train_neg: usize,
    /// Per-fold cap on validation sequences (balanced where possible).
    pub max_val_sequences: usize,
    pub seed: u64,
    pub frame_spec: FrameSpec,
    pub train_config: TrainConfig,
    /// Time-of-Pickup threshold for the filtered event metrics.
    pub min_top_ms: i64,
}

impl Default for LosocvOptions {
    fn default() -> Self {
        Self {
            rounds: 1,
            validation_recordings: 2,
            max_train_pos: 40,
            max_train_neg: 40,
            max_val_sequences: 32,
            seed: 0,
            frame_spec: FrameSpec::default(),
            train_config: TrainConfig::default(),
            min_top_ms: DEFAULT_MIN_TOP_MS,
        }
    }
}

impl LosocvOptions {
    pub fn validate(&self) -> Result<(), EvalError> {
        if self.rounds == 0 {
            return Err(EvalError::InvalidOptions("rounds must be at least 1".into()));
        }
        if self.validation_recordings == 0 {
            return Err(EvalError::InvalidOptions("validation_recordings must be at least 1".into()));
        }
        if self.max_train_pos == 0 || self.max_train_neg == 0 {
            return Err(EvalError::InvalidOptions(
                "training needs at least one sequence of each class".into(),
            ));
        }
        if self.max_val_sequences == 0 {
            return Err(EvalError::InvalidOptions("max_val_sequences must be at least 1".into()));
        }
        self.train_config.validate()?;
        Ok(())
    }
}

/// Per-recording outcome on one fold's test set.
#[derive(Debug, Clone)]
pub struct RecordingEval {
    pub recording_id: String,
    pub subject_id: String,
    pub duration_minutes: f64,
    /// The dense classified timeline the metrics were computed from.
    pub predictions: Vec<TimelinePrediction>,
    pub window: WindowMetrics,
    /// Contiguous pickup runs straight out of segmentation.
    pub raw_events: Vec<LocalizedEvent>,
    /// The same runs after the Time-of-Pickup duration filter.
    pub filtered_events: Vec<LocalizedEvent>,
    pub events_raw: EventMetrics,
    pub events_filtered: EventMetrics,
}

/// One trained fold: its split, training trajectory, and test metrics.
#[derive(Debug, Clone)]
pub struct FoldReport {
    pub spec: FoldSpec,
    pub train_sequences: usize,
    pub validation_sequences: usize,
    pub best_epoch: usize,
    pub epochs_run: usize,
    pub stopped_early: bool,
    pub recordings: Vec<RecordingEval>,
    /// Counts pooled over this fold's test recordings.
    pub window: WindowMetrics,
    pub events_raw: EventMetrics,
    pub events_filtered: EventMetrics,
}

/// Fold-mean ratios and pooled counts for one round.
#[derive(Debug, Clone, Copy)]
pub struct RoundAggregate {
    /// Unweighted means over folds; absent if undefined in every fold.
    pub window_accuracy: Option<f64>,
    pub window_precision: Option<f64>,
    pub window_recall: Option<f64>,
    pub window_fpr: Option<f64>,
    pub window_f1: Option<f64>,
    pub event_recall_raw: Option<f64>,
    pub event_recall_filtered: Option<f64>,
    /// Counts pooled over all folds.
    pub window: WindowMetrics,
    pub events_raw: EventMetrics,
    pub events_filtered: EventMetrics,
    /// Total test audio-minutes backing the per-minute rates.
    pub minutes: f64,
    pub fp_events_per_minute_raw: Option<f64>,
    pub fp_events_per_minute_filtered: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RoundReport {
    pub round: usize,
    pub folds: Vec<FoldReport>,
    pub aggregate: RoundAggregate,
}

/// Everything [`losocv`] measured, with renderers for machine and human eyes.
#[derive(Debug, Clone)]
pub struct LosocvReport {
    pub rounds: Vec<RoundReport>,
}

/// Mean of the defined values, or `None` if every value is absent.
fn mean_opt(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let defined: Vec<f64> = values.flatten().collect();
    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}

fn range_opt(values: impl Iterator<Item = Option<f64>>) -> Option<(f64, f64)> {
    let defined: Vec<f64> = values.flatten().collect();
    let min = defined.iter().copied().fold(f64::INFINITY, f64::min);
    let max = defined.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (!defined.is_empty()).then_some((min, max))
}

impl LosocvReport {
    /// Line-delimited JSON: one record per fold (all rounds) plus one
    /// aggregate record carrying cross-round mean/min/max per metric.
    pub fn records(&self) -> Vec<String> {
        let mut lines = Vec::new();
        for round in &self.rounds {
            for fold in &round.folds {
                let w = &fold.window;
                lines.push(
                    json!({
                        "record": "fold",
                        "round": round.round,
                        "fold": fold.spec.fold_id,
                        "test_subject": fold.spec.test_subject,
                        "test_recordings": fold.spec.test,
                        "train_recordings": fold.spec.train.len(),
                        "validation_recordings": fold.spec.validation.len(),
                        "train_sequences": fold.train_sequences,
                        "validation_sequences": fold.validation_sequences,
                        "best_epoch": fold.best_epoch,
                        "epochs_run": fold.epochs_run,
                        "stopped_early": fold.stopped_early,
                        "window": {
                            "tp": w.true_positives,
                            "fp": w.false_positives,
                            "tn": w.true_negatives,
                            "fn": w.false_negatives,
                            "accuracy": w.accuracy(),
                            "precision": w.precision(),
                            "recall": w.recall(),
                            "fpr": w.false_positive_rate(),
                            "f1": w.f1(),
                        },
                        "events": event_json(&fold.events_raw),
                        "events_filtered": event_json(&fold.events_filtered),
                    })
                    .to_string(),
                );
            }
        }
        let aggs: Vec<&RoundAggregate> = self.rounds.iter().map(|r| &r.aggregate).collect();
        let events_total: u64 = aggs.iter().map(|a| a.events_raw.events_total).sum();
        lines.push(
            json!({
                "record": "aggregate",
                "rounds": self.rounds.len(),
                "folds_per_round": self.rounds.first().map_or(0, |r| r.folds.len()),
                "window_accuracy": stat_json(aggs.iter().map(|a| a.window_accuracy)),
                "window_precision": stat_json(aggs.iter().map(|a| a.window_precision)),
                "window_recall": stat_json(aggs.iter().map(|a| a.window_recall)),
                "window_fpr": stat_json(aggs.iter().map(|a| a.window_fpr)),
                "window_f1": stat_json(aggs.iter().map(|a| a.window_f1)),
                "event_recall": stat_json(aggs.iter().map(|a| a.event_recall_raw)),
                "event_recall_filtered": stat_json(aggs.iter().map(|a| a.event_recall_filtered)),
                "fp_events_per_minute": stat_json(aggs.iter().map(|a| a.fp_events_per_minute_raw)),
                "fp_events_per_minute_filtered":
                    stat_json(aggs.iter().map(|a| a.fp_events_per_minute_filtered)),
                "events_total": events_total,
                "events_detected": aggs.iter().map(|a| a.events_raw.events_detected).sum::<u64>(),
                "event_false_positives":
                    aggs.iter().map(|a| a.events_raw.false_positive_events).sum::<u64>(),
            })
            .to_string(),
        );
        lines
    }

    /// Fixed-width table for standard output.
    pub fn table(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<5} {:<4} {:<8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>7} {:>6}",
            "round", "fold", "subject", "acc", "prec", "rec", "fpr", "f1", "ev-rec", "ev-fp"
        );
        for round in &self.rounds {
            for fold in &round.folds {
                let w = &fold.window;
                let _ = writeln!(
                    out,
                    "{:<5} {:<4} {:<8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>7} {:>6}",
                    round.round,
                    fold.spec.fold_id,
                    fold.spec.test_subject,
                    fmt_opt(w.accuracy()),
                    fmt_opt(w.precision()),
                    fmt_opt(w.recall()),
                    fmt_opt(w.false_positive_rate()),
                    fmt_opt(w.f1()),
                    fmt_opt(fold.events_raw.recall()),
                    fold.events_raw.false_positive_events,
                );
            }
            let a = &round.aggregate;
            let _ = writeln!(
                out,
                "{:<5} {:<4} {:<8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>7} {:>6}",
                round.round,
                "mean",
                "-",
                fmt_opt(a.window_accuracy),
                fmt_opt(a.window_precision),
                fmt_opt(a.window_recall),
                fmt_opt(a.window_fpr),
                fmt_opt(a.window_f1),
                fmt_opt(a.event_recall_raw),
                a.events_raw.false_positive_events,
            );
        }
        if self.rounds.len() > 1 {
            let aggs: Vec<&RoundAggregate> = self.rounds.iter().map(|r| &r.aggregate).collect();
            let _ = writeln!(
                out,
                "over {} rounds: accuracy {}, event recall {}, fp events/min {}",
                self.rounds.len(),
                fmt_stat(aggs.iter().map(|a| a.window_accuracy)),
                fmt_stat(aggs.iter().map(|a| a.event_recall_raw)),
                fmt_stat(aggs.iter().map(|a| a.fp_events_per_minute_raw)),
            );
        }
        out
    }
}

fn event_json(e: &EventMetrics) -> serde_json::Value {
    json!({
        "total": e.events_total,
        "detected": e.events_detected,
        "false_positives": e.false_positive_events,
        "recall": e.recall(),
    })
}

fn stat_json<'a>(values: impl Iterator<Item = Option<f64>> + Clone + 'a) -> serde_json::Value {
    let mean = mean_opt(values.clone());
    let range = range_opt(values);
    json!({
        "mean": mean,
        "min": range.map(|r| r.0),
        "max": range.map(|r| r.1),
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.4}"))
}

fn fmt_stat<'a>(values: impl Iterator<Item = Option<f64>> + Clone + 'a) -> String {
    match (mean_opt(values.clone()), range_opt(values)) {
        (Some(mean), Some((min, max))) => format!("{mean:.4} [{min:.4}, {max:.4}]"),
        _ => "-".into(),
    }
}

/// Rendered movie, label track, and contact timestamps for one recording.
struct RecordingCache {
    subject_id: String,
    recording_id: String,
    movie: Vec<MovieFrame>,
    truth: FrameLabelTrack,
    contacts: Vec<i64>,
    duration_minutes: f64,
}

/// Leave-one-subject-out cross-validation over a labeled dataset.
///
/// Renders every recording once, then per round and per fold: holds out one
/// subject, samples `validation_recordings` of the remaining recordings
/// (seeded), trains a fresh model on a balanced sequence sample of the rest,
/// and scores the held-out subject's full timelines at window and event
/// level. Every fold's split is checked for leakage before any training
/// happens; a leaky split aborts the whole run.
pub fn losocv(
    dataset: &[(ImuRecording, Vec<EventLabel>)],
    options: &LosocvOptions,
) -> Result<LosocvReport, EvalError> {
    options.validate()?;

    let mut ids = BTreeSet::new();
    for (recording, _) in dataset {
        if !ids.insert(recording.recording_id.as_str()) {
            return Err(EvalError::InvalidDataset(format!(
                "recording id {:?} appears twice",
                recording.recording_id
            )));
        }
    }
    let mut by_subject: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (idx, (recording, _)) in dataset.iter().enumerate() {
        by_subject.entry(recording.subject_id.as_str()).or_default().push(idx);
    }
    if by_subject.len() < 3 {
        return Err(EvalError::InsufficientSubjects { found: by_subject.len() });
    }

    let cache: Vec<RecordingCache> = dataset
        .iter()
        .map(|(recording, events)| {
            let movie = render_movie(recording, &options.frame_spec)?;
            let truth = label_frames(recording, events)?;
            let mut contacts: Vec<i64> = events.iter().map(|e| e.contact_ms).collect();
            contacts.sort_unstable();
            Ok(RecordingCache {
                subject_id: recording.subject_id.clone(),
                recording_id: recording.recording_id.clone(),
                movie,
                truth,
                contacts,
                duration_minutes: recording.duration_ms() as f64 / 60_000.0,
            })
        })
        .collect::<Result<_, EvalError>>()?;

    let mut rounds = Vec::with_capacity(options.rounds);
    for round in 0..options.rounds {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        rng.set_stream(100 + round as u64);
        let mut folds = Vec::with_capacity(by_subject.len());
        for (fold_id, (&subject, test_indices)) in by_subject.iter().enumerate() {
            let rest: Vec<usize> =
                (0..dataset.len()).filter(|i| !test_indices.contains(i)).collect();
            if rest.len() <= options.validation_recordings {
                return Err(EvalError::InvalidDataset(format!(
                    "holding out subject {subject:?} leaves {} recordings, too few for \
                     {} validation recordings plus a training set",
                    rest.len(),
                    options.validation_recordings
                )));
            }
            let mut validation: Vec<usize> = rest
                .choose_multiple(&mut rng, options.validation_recordings)
                .copied()
                .collect();
            validation.sort_unstable();
            let train_recs: Vec<usize> =
                rest.iter().copied().filter(|i| !validation.contains(i)).collect();

            let spec = FoldSpec {
                fold_id,
                test_subject: subject.to_string(),
                test: test_indices.iter().map(|&i| cache[i].recording_id.clone()).collect(),
                validation: validation.iter().map(|&i| cache[i].recording_id.clone()).collect(),
                train: train_recs.iter().map(|&i| cache[i].recording_id.clone()).collect(),
            };
            spec.verify_disjoint()?;

            let train_set = sample_sequences(
                &cache,
                &train_recs,
                options.max_train_pos,
                options.max_train_neg,
                &mut rng,
            )?;
            let half = options.max_val_sequences / 2;
            let val_set = sample_sequences(
                &cache,
                &validation,
                half.max(1),
                (options.max_val_sequences - half).max(1),
                &mut rng,
            )?;
            if train_set.is_empty() || val_set.is_empty() {
                return Err(EvalError::InvalidDataset(format!(
                    "fold {fold_id}: no usable training or validation sequences"
                )));
            }

            let mut config = options.train_config.clone();
            config.seed = rng.random();
            let outcome = train(&train_set, &val_set, &config)?;

            let mut recordings = Vec::with_capacity(test_indices.len());
            let mut fold_window = WindowMetrics::default();
            let mut fold_raw = EventMetrics::default();
            let mut fold_filtered = EventMetrics::default();
            for &t in test_indices {
                let rec = &cache[t];
                let predictions = predict_timeline(&rec.movie, &outcome.params)?;
                let window = window_metrics(&predictions, &rec.truth.prefix(predictions.len()))?;
                let timeline: Vec<(i64, ActivityClass)> =
                    predictions.iter().map(|p| (p.t0_ms, p.class)).collect();
                let raw_events = segment_events(&timeline)?;
                let filtered_events = duration_filter(&raw_events, options.min_top_ms);
                let events_raw = event_match(&raw_events, &rec.contacts);
                let events_filtered = event_match(&filtered_events, &rec.contacts);
                fold_window.merge(&window);
                fold_raw.merge(&events_raw);
                fold_filtered.merge(&events_filtered);
                recordings.push(RecordingEval {
                    recording_id: rec.recording_id.clone(),
                    subject_id: rec.subject_id.clone(),
                    duration_minutes: rec.duration_minutes,
                    predictions,
                    window,
                    raw_events,
                    filtered_events,
                    events_raw,
                    events_filtered,
                });
            }

            folds.push(FoldReport {
                spec,
                train_sequences: train_set.len(),
                validation_sequences: val_set.len(),
                best_epoch: outcome.best_epoch,
                epochs_run: outcome.history.len(),
                stopped_early: outcome.stopped_early,
                recordings,
                window: fold_window,
                events_raw: fold_raw,
                events_filtered: fold_filtered,
            });
        }
        let aggregate = aggregate_round(&folds);
        rounds.push(RoundReport { round, folds, aggregate });
    }
    Ok(LosocvReport { rounds })
}

fn aggregate_round(folds: &[FoldReport]) -> RoundAggregate {
    let mut window = WindowMetrics::default();
    let mut events_raw = EventMetrics::default();
    let mut events_filtered = EventMetrics::default();
    let mut minutes = 0.0;
    for fold in folds {
        window.merge(&fold.window);
        events_raw.merge(&fold.events_raw);
        events_filtered.merge(&fold.events_filtered);
        minutes += fold.recordings.iter().map(|r| r.duration_minutes).sum::<f64>();
    }
    let per_minute = |fp: u64| (minutes > 0.0).then(|| fp as f64 / minutes);
    RoundAggregate {
        window_accuracy: mean_opt(folds.iter().map(|f| f.window.accuracy())),
        window_precision: mean_opt(folds.iter().map(|f| f.window.precision())),
        window_recall: mean_opt(folds.iter().map(|f| f.window.recall())),
        window_fpr: mean_opt(folds.iter().map(|f| f.window.false_positive_rate())),
        window_f1: mean_opt(folds.iter().map(|f| f.window.f1())),
        event_recall_raw: mean_opt(folds.iter().map(|f| f.events_raw.recall())),
        event_recall_filtered: mean_opt(folds.iter().map(|f| f.events_filtered.recall())),
        fp_events_per_minute_raw: per_minute(events_raw.false_positive_events),
        fp_events_per_minute_filtered: per_minute(events_filtered.false_positive_events),
        window,
        events_raw,
        events_filtered,
        minutes,
    }
}

/// Draws up to `max_pos` pickup and `max_neg` background sequences from the
/// window starts pooled across `recordings` (indices into `cache`).
fn sample_sequences(
    cache: &[RecordingCache],
    recordings: &[usize],
    max_pos: usize,
    max_neg: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<LabeledSequence>, EvalError> {
    let pool: Vec<(&[MovieFrame], &FrameLabelTrack)> =
        recordings.iter().map(|&r| (cache[r].movie.as_slice(), &cache[r].truth)).collect();
    sample_balanced_sequences(&pool, max_pos, max_neg, rng)
}

/// Draws a class-balanced seeded sample of 10-frame labeled sequences from
/// rendered movies and their label tracks.
///
/// Window starts from every movie are pooled, split by the label of their
/// first frame, and sampled without replacement (up to `max_pos` pickups and
/// `max_neg` backgrounds; smaller pools contribute everything they have). The
/// result is sorted by (movie, frame) so the material is identical regardless
/// of draw order; shuffling is the trainer's job.
pub fn sample_balanced_sequences<R: Rng + ?Sized>(
    pool: &[(&[MovieFrame], &FrameLabelTrack)],
    max_pos: usize,
    max_neg: usize,
    rng: &mut R,
) -> Result<Vec<LabeledSequence>, EvalError> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (m, (movie, truth)) in pool.iter().enumerate() {
        let windows = movie.len().saturating_sub(SEQUENCE_LEN - 1);
        for k in 0..windows {
            match truth.get(k).expect("label track covers every frame") {
                ActivityClass::Pickup => pos.push((m, k)),
                ActivityClass::Background => neg.push((m, k)),
            }
        }
    }
    let mut chosen: Vec<(usize, usize)> = pos.choose_multiple(rng, max_pos).copied().collect();
    chosen.extend(neg.choose_multiple(rng, max_neg).copied());
    chosen.sort_unstable();
    chosen
        .into_iter()
        .map(|(m, k)| {
            let (movie, truth) = &pool[m];
            let frames = movie[k..k + SEQUENCE_LEN].to_vec();
            let label = truth.get(k).expect("pooled from the same track");
            LabeledSequence::new(frames, label).map_err(EvalError::from)
        })
        .collect()
}
