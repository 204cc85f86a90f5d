//! Floor-pickup detection from dual-ankle inertial sensors.
//!
//! The pipeline turns a pair of ankle-worn IMU streams (100 Hz accelerometer +
//! gyroscope) into a 100 fps "movie" of small line-plot frames, classifies every
//! frame with a convolutional-recurrent network, and aggregates per-frame
//! classifications into localized pickup events with a Time-of-Pickup measure.
//!
//! Modules, in data-flow order:
//!
//! * [`data`] — samples, recordings, labels, and the frame/timestamp contract.
//! * [`synth`] — seeded synthetic walk/pickup/turn recordings for benchmarks.
//! * [`contact`] — ground-device contact-spike detection (event ground truth).
//! * [`render`] — recordings → 64×64×3 frames (plus a debug variant).
//! * [`model`] — the frame-sequence classifier, training, and checkpoints.
//! * [`localize`] — per-frame timeline → contiguous events + Time-of-Pickup.
//! * [`eval`] — window/event metrics and leave-one-subject-out cross-validation.

pub mod contact;
pub mod data;
pub mod eval;
pub mod localize;
pub mod model;
pub mod render;
pub mod synth;
