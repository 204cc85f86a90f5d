//! Seeded synthetic recordings: walking, floor pickups, and turn confusers.
//!
//! The protocol mirrors a desk-scale capture session: the subject walks,
//! stops to pick a small device off the floor (the ground device registers a
//! contact spike the moment the hand hits it), walks on, turns around, and
//! repeats. Pickups and turns look deliberately similar on the accelerometer
//! — both are a decelerate → pause → re-accelerate episode with a small
//! crouch/sway bump — while turns additionally carry a large sustained yaw
//! rate on the gyroscope. Telling them apart therefore requires the gyro
//! bands, which is exactly the ablation the evaluation probes.
//!
//! Determinism: every subject draws from its own ChaCha8 stream of the
//! configured seed, so datasets are bit-reproducible and subjects are
//! independent of each other. Per-device affine calibration (offset and
//! positive scale, mimicking unit and mounting differences between sensors)
//! is applied as the very last generation step, which keeps every stochastic
//! draw identical across calibration variants of the same subject.

use crate::data::{DataError, DeviceRole, EventLabel, ImuRecording, ImuSample, SAMPLE_PERIOD_MS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Milliseconds the gait envelope takes to ramp in or out of a pause.
const RAMP_MS: i64 = 400;
/// Turn pause duration bounds (drawn per turn), chosen to overlap pickup durations.
const TURN_MIN_MS: i64 = 1100;
const TURN_MAX_MS: i64 = 1600;
/// Walking stretch bounds between episodes.
const GAP_MIN_MS: i64 = 1500;
const GAP_MAX_MS: i64 = 2000;
/// How long a turn's yaw excursion takes to settle after walking resumes.
/// Must stay well under `GAP_MIN_MS` so the settle never reaches the next
/// episode.
const YAW_SETTLE_MS: i64 = 500;
/// Walking lead-in / tail-out around the episode schedule.
const EDGE_WALK_MS: i64 = 3200;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("injection at {at_ms} ms does not fit a {episode_ms} ms episode (plus ramps) into a {recording_ms} ms recording")]
    InjectionOutOfRange { at_ms: i64, episode_ms: i64, recording_ms: i64 },
    #[error("injection at {at_ms} ms overlaps an earlier episode")]
    InjectionOverlap { at_ms: i64 },
    #[error(transparent)]
    Data(#[from] DataError),
}

/// How a subject executes pickups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PickupStyle {
    Normal,
    /// Slower, lower-amplitude gait and longer pickups.
    Slow,
    /// Walker-assisted: much longer pickups and an asymmetric tremor on one
    /// foot while stooping.
    WalkerOutlier,
}

/// Affine sensor calibration for one channel: `reading = offset + scale · truth`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelCalibration {
    pub offset: f64,
    /// Strictly positive gain.
    pub scale: f64,
}

impl ChannelCalibration {
    pub fn identity() -> Self {
        Self { offset: 0.0, scale: 1.0 }
    }

    fn apply(&self, v: f64) -> f64 {
        self.offset + self.scale * v
    }
}

/// Calibration of one device's six channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceCalibration {
    pub accel: [ChannelCalibration; 3],
    pub gyro: [ChannelCalibration; 3],
}

impl DeviceCalibration {
    pub fn identity() -> Self {
        Self { accel: [ChannelCalibration::identity(); 3], gyro: [ChannelCalibration::identity(); 3] }
    }
}

/// Everything that characterizes one synthetic subject.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectProfile {
    pub subject_id: String,
    /// Full gait cycle period.
    pub gait_period_ms: i64,
    /// Peak walking acceleration oscillation, m/s².
    pub gait_amplitude: f64,
    /// Characteristic stance duration of a pickup (start → first foot movement).
    pub pickup_duration_ms: i64,
    pub style: PickupStyle,
    /// Per-device affine calibration, applied after synthesis.
    pub calibration: BTreeMap<DeviceRole, DeviceCalibration>,
}

impl SubjectProfile {
    /// Identity calibration for all three devices.
    pub fn identity_calibration() -> BTreeMap<DeviceRole, DeviceCalibration> {
        DeviceRole::ALL.iter().map(|&r| (r, DeviceCalibration::identity())).collect()
    }

    fn calibration_for(&self, role: DeviceRole) -> DeviceCalibration {
        self.calibration.get(&role).copied().unwrap_or_else(DeviceCalibration::identity)
    }
}

/// Dataset-level generation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthConfig {
    pub n_subjects: usize,
    pub pickups_per_recording: usize,
    pub turns_per_recording: usize,
    /// Accelerometer noise, m/s² (1σ).
    pub noise_sigma_accel: f64,
    /// Gyroscope noise, deg/s (1σ).
    pub noise_sigma_gyro: f64,
    /// Ground-device spike height at hand contact, m/s².
    pub contact_spike_amplitude: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_subjects: 8,
            pickups_per_recording: 4,
            turns_per_recording: 4,
            noise_sigma_accel: 0.05,
            noise_sigma_gyro: 1.0,
            contact_spike_amplitude: 8.0,
            seed: 7,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.n_subjects == 0 {
            return Err(SynthError::InvalidConfig("n_subjects must be at least 1".into()));
        }
        for (name, v) in [("noise_sigma_accel", self.noise_sigma_accel), ("noise_sigma_gyro", self.noise_sigma_gyro)] {
            if !v.is_finite() || v < 0.0 {
                return Err(SynthError::InvalidConfig(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        if !self.contact_spike_amplitude.is_finite() || self.contact_spike_amplitude <= 0.0 {
            return Err(SynthError::InvalidConfig(format!(
                "contact_spike_amplitude must be positive, got {}",
                self.contact_spike_amplitude
            )));
        }
        Ok(())
    }
}

/// One generated recording with full provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticRecording {
    pub profile: SubjectProfile,
    pub recording: ImuRecording,
    /// Pickup labels, sorted by start time.
    pub events: Vec<EventLabel>,
    /// Turn pause spans `(start_ms, end_ms)`, sorted; useful for ablation
    /// analysis and not recoverable from the labels.
    pub turns: Vec<(i64, i64)>,
}

/// Generates one recording per subject: `(recording, labels)` pairs.
pub fn generate_dataset(config: &SynthConfig) -> Result<Vec<(ImuRecording, Vec<EventLabel>)>, SynthError> {
    Ok(generate_dataset_detailed(config)?.into_iter().map(|r| (r.recording, r.events)).collect())
}

/// Like [`generate_dataset`] but keeps profiles and turn spans.
pub fn generate_dataset_detailed(config: &SynthConfig) -> Result<Vec<SyntheticRecording>, SynthError> {
    config.validate()?;
    (0..config.n_subjects).map(|idx| synthesize_subject(config, idx)).collect()
}

fn synthesize_subject(config: &SynthConfig, subject_idx: usize) -> Result<SyntheticRecording, SynthError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(subject_idx as u64 + 1);
    let profile = draw_profile(&mut rng, subject_idx);
    synthesize_recording(&profile, config, format!("{}-r0", profile.subject_id), rng)
}

fn draw_profile(rng: &mut ChaCha8Rng, subject_idx: usize) -> SubjectProfile {
    let style = match rng.random_range(0.0..1.0) {
        x if x < 0.70 => PickupStyle::Normal,
        x if x < 0.85 => PickupStyle::Slow,
        _ => PickupStyle::WalkerOutlier,
    };
    let (amplitude_scale, duration_range) = match style {
        PickupStyle::Normal => (1.0, 1000..=1500),
        PickupStyle::Slow => (0.75, 1400..=2000),
        PickupStyle::WalkerOutlier => (0.6, 1600..=2600),
    };
    let mut calibration = BTreeMap::new();
    for role in DeviceRole::ALL {
        let mut cal = DeviceCalibration::identity();
        for c in &mut cal.accel {
            *c = ChannelCalibration { offset: rng.random_range(-0.15..0.15), scale: rng.random_range(0.9..1.1) };
        }
        for c in &mut cal.gyro {
            *c = ChannelCalibration { offset: rng.random_range(-1.0..1.0), scale: rng.random_range(0.9..1.1) };
        }
        calibration.insert(role, cal);
    }
    SubjectProfile {
        subject_id: format!("S{subject_idx:02}"),
        gait_period_ms: round_to_grid(rng.random_range(900..=1300)),
        gait_amplitude: rng.random_range(2.0..3.5) * amplitude_scale,
        pickup_duration_ms: round_to_grid(rng.random_range(duration_range)),
        style,
        calibration,
    }
}

/// Builds one subject's full recording by scheduling alternating episodes.
fn synthesize_recording(
    profile: &SubjectProfile,
    config: &SynthConfig,
    recording_id: String,
    rng: ChaCha8Rng,
) -> Result<SyntheticRecording, SynthError> {
    let pickups = config.pickups_per_recording as i64;
    let turns = config.turns_per_recording as i64;
    // Generous plan: worst-case episode lengths; unused room becomes tail walking.
    let pickup_slot = profile.pickup_duration_ms * 11 / 10 + GAP_MAX_MS + 2 * RAMP_MS;
    let turn_slot = TURN_MAX_MS + GAP_MAX_MS + 2 * RAMP_MS;
    let duration_ms = 2 * EDGE_WALK_MS + pickups * pickup_slot + turns * turn_slot;

    let mut builder = TraceBuilder::new(profile, config, duration_ms, recording_id, rng)?;
    let mut at = EDGE_WALK_MS;
    for k in 0..pickups.max(turns) {
        if k < pickups {
            let label = builder.inject_pickup(at)?;
            at = label.ffm_ms + builder.draw_gap();
        }
        if k < turns {
            let (_, end) = builder.inject_turn(at)?;
            at = end + builder.draw_gap();
        }
    }
    builder.finish()
}

fn round_to_grid(ms: i64) -> i64 {
    (ms + SAMPLE_PERIOD_MS / 2).div_euclid(SAMPLE_PERIOD_MS) * SAMPLE_PERIOD_MS
}

/// Incremental builder for one recording: a walking base plus injected episodes.
///
/// Injections edit the gait envelope (walking fades out over 400 ms, pauses,
/// and fades back in) and queue episode-specific signal components; `finish`
/// synthesizes the actual samples, adds noise, and applies calibration last.
pub struct TraceBuilder {
    profile: SubjectProfile,
    noise_sigma_accel: f64,
    noise_sigma_gyro: f64,
    spike_amplitude: f64,
    recording_id: String,
    n_samples: usize,
    rng: ChaCha8Rng,
    /// Gait oscillation envelope per sample, 1 = full walking, 0 = standing.
    envelope: Vec<f64>,
    /// Additive components per foot (0 left, 1 right): accel xyz then gyro xyz.
    extra: [[Vec<f64>; 6]; 2],
    /// Occupied `[from, to]` spans including ramps, for overlap checks.
    occupied: Vec<(i64, i64)>,
    /// Ground spike onsets (pickup contacts).
    spikes: Vec<i64>,
    /// Pickup stance spans, for the walker-outlier tremor.
    stances: Vec<(i64, i64)>,
    events: Vec<EventLabel>,
    turns: Vec<(i64, i64)>,
    /// Which foot steps first out of a pause; alternates per episode.
    stepping_foot: usize,
    /// Foot carrying the walker tremor (outlier style only).
    tremor_foot: usize,
}

impl TraceBuilder {
    pub fn new(
        profile: &SubjectProfile,
        config: &SynthConfig,
        duration_ms: i64,
        recording_id: impl Into<String>,
        mut rng: ChaCha8Rng,
    ) -> Result<Self, SynthError> {
        config.validate()?;
        if duration_ms < 2 * EDGE_WALK_MS {
            return Err(SynthError::InvalidConfig(format!(
                "recording of {duration_ms} ms is shorter than lead-in plus tail ({} ms)",
                2 * EDGE_WALK_MS
            )));
        }
        if profile.gait_period_ms <= 0 || !profile.gait_amplitude.is_finite() || profile.gait_amplitude <= 0.0 {
            return Err(SynthError::InvalidConfig("gait period and amplitude must be positive".into()));
        }
        let n_samples = (duration_ms / SAMPLE_PERIOD_MS) as usize;
        let zeros = || std::array::from_fn(|_| vec![0.0f64; n_samples]);
        let tremor_foot = rng.random_range(0..2usize);
        Ok(Self {
            profile: profile.clone(),
            noise_sigma_accel: config.noise_sigma_accel,
            noise_sigma_gyro: config.noise_sigma_gyro,
            spike_amplitude: config.contact_spike_amplitude,
            recording_id: recording_id.into(),
            n_samples,
            rng,
            envelope: vec![1.0; n_samples],
            extra: [zeros(), zeros()],
            occupied: Vec::new(),
            spikes: Vec::new(),
            stances: Vec::new(),
            events: Vec::new(),
            turns: Vec::new(),
            stepping_foot: 0,
            tremor_foot,
        })
    }

    fn duration_ms(&self) -> i64 {
        self.n_samples as i64 * SAMPLE_PERIOD_MS
    }

    /// Draws the next walking-gap length.
    pub fn draw_gap(&mut self) -> i64 {
        round_to_grid(self.rng.random_range(GAP_MIN_MS..=GAP_MAX_MS))
    }

    /// Injects a pickup whose stance starts at `at_ms`; returns its label.
    ///
    /// The stance lasts the profile's characteristic duration ±10 %; hand
    /// contact (and the ground-device spike) lands mid-stance with ±50 ms of
    /// jitter, and the first-foot-movement burst closes the episode.
    pub fn inject_pickup(&mut self, at_ms: i64) -> Result<EventLabel, SynthError> {
        let base = self.profile.pickup_duration_ms;
        let duration = round_to_grid(self.rng.random_range(base * 9 / 10..=base * 11 / 10));
        self.claim(at_ms, duration)?;

        let start = at_ms;
        let ffm = at_ms + duration;
        let contact = round_to_grid(start + duration / 2 + self.rng.random_range(-5..=5) * SAMPLE_PERIOD_MS);
        self.pause_envelope(start, ffm);
        let bump = self.rng.random_range(0.9..1.3);
        self.add_crouch_bump(start, ffm, bump);
        let foot = self.stepping_foot;
        self.stepping_foot ^= 1;
        self.add_step_burst(ffm, foot);
        self.spikes.push(contact);
        self.stances.push((start, ffm));
        let label = EventLabel::new(start, contact, ffm).expect("mid-stance contact obeys ordering");
        self.events.push(label);
        Ok(label)
    }

    /// Injects a turn pause starting at `at_ms`; returns its `(start, end)` span.
    ///
    /// Accelerometer-wise a turn is a pickup look-alike (same fade-out, a
    /// similar crouch/sway bump, a step burst on exit); the giveaway is a
    /// sustained yaw-rate excursion on both feet while the body rotates.
    pub fn inject_turn(&mut self, at_ms: i64) -> Result<(i64, i64), SynthError> {
        let duration = round_to_grid(self.rng.random_range(TURN_MIN_MS..=TURN_MAX_MS));
        self.claim(at_ms, duration)?;

        let (start, end) = (at_ms, at_ms + duration);
        self.pause_envelope(start, end);
        // Same draw range as a pickup's crouch: on the accelerometer alone the
        // two episodes are meant to be near-indistinguishable.
        let bump = self.rng.random_range(0.9..1.3);
        self.add_crouch_bump(start, end, bump);
        let foot = self.stepping_foot;
        self.stepping_foot ^= 1;
        self.add_step_burst(end, foot);

        // The yaw excursion: both ankles rotate with the body. A smoothed
        // plateau rather than a sine: it ramps up over the first fifth of the
        // pause, holds near full strength through the end, and only settles
        // after walking resumes, so every window overlapping any part of the
        // turn — including its tail — sees a clear yaw displacement.
        let yaw_peak = self.rng.random_range(150.0..200.0) * if self.rng.random_range(0..2) == 0 { 1.0 } else { -1.0 };
        let (s_idx, e_idx) = (sample_at(start), sample_at(end));
        let settle_idx = sample_at(end + YAW_SETTLE_MS).min(self.n_samples);
        for i in s_idx..settle_idx {
            let strength = if i < e_idx {
                ((i - s_idx) as f64 / (e_idx - s_idx).max(1) as f64 * 5.0).min(1.0)
            } else {
                1.0 - (i - e_idx) as f64 / (settle_idx - e_idx).max(1) as f64
            };
            let hump = 0.5 - 0.5 * (std::f64::consts::PI * strength).cos();
            for foot in 0..2 {
                self.extra[foot][5][i] += yaw_peak * hump; // gyro z
                self.extra[foot][3][i] += 0.2 * yaw_peak * hump; // slight pitch coupling
            }
        }
        self.turns.push((start, end));
        Ok((start, end))
    }

    /// Reserves `[at − ramp, at + duration + ramp]`, validating fit and overlap.
    fn claim(&mut self, at_ms: i64, duration: i64) -> Result<(), SynthError> {
        let span = (at_ms - RAMP_MS, at_ms + duration + RAMP_MS);
        if span.0 < 0 || span.1 > self.duration_ms() {
            return Err(SynthError::InjectionOutOfRange {
                at_ms,
                episode_ms: duration,
                recording_ms: self.duration_ms(),
            });
        }
        if self.occupied.iter().any(|&(s, e)| span.0 <= e && s <= span.1) {
            return Err(SynthError::InjectionOverlap { at_ms });
        }
        self.occupied.push(span);
        Ok(())
    }

    /// Fades walking out over `[start − 400, start]`, holds zero during the
    /// pause, and fades back in over `[end, end + 400]`.
    fn pause_envelope(&mut self, start: i64, end: i64) {
        let (ramp_in, s, e, ramp_out) = (sample_at(start - RAMP_MS), sample_at(start), sample_at(end), sample_at(end + RAMP_MS));
        for i in ramp_in..s {
            let p = (i - ramp_in) as f64 / (s - ramp_in) as f64;
            self.envelope[i] = self.envelope[i].min(0.5 * (1.0 + (std::f64::consts::PI * p).cos()));
        }
        for i in s..e {
            self.envelope[i] = 0.0;
        }
        for i in e..ramp_out.min(self.n_samples) {
            let p = (i - e) as f64 / (ramp_out - e) as f64;
            self.envelope[i] = self.envelope[i].min(0.5 * (1.0 - (std::f64::consts::PI * p).cos()));
        }
    }

    /// The stoop-and-rise accelerometer hump shared by pickups and turns.
    fn add_crouch_bump(&mut self, start: i64, end: i64, amplitude: f64) {
        let (s, e) = (sample_at(start), sample_at(end).min(self.n_samples));
        for i in s..e {
            let p = (i - s) as f64 / (e - s).max(1) as f64;
            let hump = (std::f64::consts::PI * p).sin();
            for foot in 0..2 {
                self.extra[foot][1][i] += -amplitude * hump; // vertical dip while stooping
                self.extra[foot][0][i] += 0.3 * amplitude * (2.0 * std::f64::consts::PI * p).sin();
            }
        }
    }

    /// The emphatic first step out of a pause, on one foot.
    fn add_step_burst(&mut self, at_ms: i64, foot: usize) {
        let amp = 1.2 * self.profile.gait_amplitude;
        let center = sample_at(at_ms + 150) as f64;
        let sigma = 7.0; // samples
        let from = sample_at(at_ms);
        let to = (from + 60).min(self.n_samples);
        for i in from..to {
            let g = (-(i as f64 - center).powi(2) / (2.0 * sigma * sigma)).exp();
            self.extra[foot][0][i] += amp * g;
            self.extra[foot][4][i] += 25.0 * g; // a flick of swing rate
        }
    }

    /// Synthesizes samples, adds noise, applies calibration, and packages
    /// everything into a validated recording.
    pub fn finish(mut self) -> Result<SyntheticRecording, SynthError> {
        let n = self.n_samples;
        let profile = self.profile.clone();
        let accel_noise = Normal::new(0.0, self.noise_sigma_accel.max(f64::MIN_POSITIVE)).expect("validated sigma");
        let gyro_noise = Normal::new(0.0, self.noise_sigma_gyro.max(f64::MIN_POSITIVE)).expect("validated sigma");

        // The walker tremor: one foot can't keep fully still while stooping.
        // Strong enough to measure as a per-foot variance asymmetry, weak
        // enough that a stance still reads as a stance.
        if profile.style == PickupStyle::WalkerOutlier {
            let tremor = Normal::new(0.0, 0.12).expect("constant sigma");
            let foot = self.tremor_foot;
            let stances = self.stances.clone();
            for (start, end) in stances {
                for i in sample_at(start)..sample_at(end).min(n) {
                    for ch in 0..3 {
                        self.extra[foot][ch][i] += tremor.sample(&mut self.rng);
                    }
                }
            }
        }

        let mut series = BTreeMap::new();
        let omega = 2.0 * std::f64::consts::PI / profile.gait_period_ms as f64;
        for (foot, role, phase) in [(0usize, DeviceRole::LeftAnkle, 0.0), (1, DeviceRole::RightAnkle, std::f64::consts::PI)] {
            let a = profile.gait_amplitude;
            let g = 28.0 * a;
            let cal = profile.calibration_for(role);
            let mut samples = Vec::with_capacity(n);
            for i in 0..n {
                let t_ms = i as i64 * SAMPLE_PERIOD_MS;
                let phi = omega * t_ms as f64 + phase;
                let env = self.envelope[i];
                let extra = &self.extra[foot];
                let raw_accel = [
                    a * phi.sin() * env + extra[0][i] + accel_noise.sample(&mut self.rng),
                    9.8 + 0.45 * a * (2.0 * phi + 0.4).sin() * env + extra[1][i] + accel_noise.sample(&mut self.rng),
                    0.3 * a * phi.cos() * env + extra[2][i] + accel_noise.sample(&mut self.rng),
                ];
                let raw_gyro = [
                    g * (phi + 0.47).sin() * env + extra[3][i] + gyro_noise.sample(&mut self.rng),
                    0.35 * g * phi.cos() * env + extra[4][i] + gyro_noise.sample(&mut self.rng),
                    0.15 * g * (phi + 0.7).sin() * env + extra[5][i] + gyro_noise.sample(&mut self.rng),
                ];
                samples.push(ImuSample {
                    t_ms,
                    accel: std::array::from_fn(|c| cal.accel[c].apply(raw_accel[c])),
                    gyro: std::array::from_fn(|c| cal.gyro[c].apply(raw_gyro[c])),
                });
            }
            series.insert(role, samples);
        }

        // Ground device: gravity on a random axis, noise, and contact spikes.
        let gravity_axis = self.rng.random_range(0..3usize);
        let gravity = 9.8 * if self.rng.random_range(0..2) == 0 { 1.0 } else { -1.0 };
        let mut ground_accel = vec![[0.0f64; 3]; n];
        for row in &mut ground_accel {
            for (c, v) in row.iter_mut().enumerate() {
                *v = if c == gravity_axis { gravity } else { 0.0 } + accel_noise.sample(&mut self.rng);
            }
        }
        for &contact in &self.spikes {
            let onset = sample_at(contact);
            let kick = self.spike_amplitude * -gravity.signum();
            for (offset, fraction) in [(0usize, 0.7), (1, 1.0), (2, 0.4)] {
                if onset + offset < n {
                    ground_accel[onset + offset][gravity_axis] += kick * fraction;
                }
            }
        }
        let cal = profile.calibration_for(DeviceRole::Ground);
        let ground: Vec<ImuSample> = (0..n)
            .map(|i| ImuSample {
                t_ms: i as i64 * SAMPLE_PERIOD_MS,
                accel: std::array::from_fn(|c| cal.accel[c].apply(ground_accel[i][c])),
                gyro: std::array::from_fn(|c| cal.gyro[c].apply(0.1 * gyro_noise.sample(&mut self.rng))),
            })
            .collect();
        series.insert(DeviceRole::Ground, ground);

        let recording = ImuRecording::new(self.recording_id.clone(), profile.subject_id.clone(), series)?;
        let mut events = self.events.clone();
        events.sort_by_key(|e| e.start_ms);
        let mut turns = self.turns.clone();
        turns.sort();
        Ok(SyntheticRecording { profile, recording, events, turns })
    }
}

fn sample_at(t_ms: i64) -> usize {
    (t_ms.max(0) / SAMPLE_PERIOD_MS) as usize
}
