//! Rendering recordings into 100 fps line-plot movie frames.
//!
//! Every frame is a 64×64 RGB image of the 3-second window starting at the
//! frame's timestamp. The image is split into horizontal bands of 10 pixel
//! rows, one per sensor channel (accelerometer x/y/z, then gyroscope x/y/z),
//! and each band holds two single-channel polylines: the left ankle drawn
//! into the red channel and the right ankle into the green channel. Values
//! are normalized per device and channel against the whole recording's
//! min/max (the [`ScaleIndex`]), so a movie's frames are mutually comparable
//! and the rendering is invariant to affine sensor calibration.
//!
//! Production frames are binary-intensity Bresenham plots with no text and no
//! anti-aliasing; [`render_debug_frame`] produces a larger annotated variant
//! of the same window for eyeballing.

pub mod font;
pub mod format;
pub mod pixmap;

pub use pixmap::{rasterize_polyline, Pixmap};

use crate::data::{candidate_frame_count, DeviceRole, ImuRecording, ImuSample, SAMPLE_PERIOD_MS, WINDOW_SAMPLES};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Pixel rows per sensor band.
pub const BAND_HEIGHT: usize = 10;
/// Default frame edge length in pixels.
pub const FRAME_SIZE: usize = 64;
/// Channel names in band order (accelerometer x/y/z, gyroscope x/y/z).
pub const CHANNEL_NAMES: [&str; 6] = ["AX", "AY", "AZ", "GX", "GY", "GZ"];

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    #[error("frame {frame_idx} out of range: recording yields {frame_count} frames")]
    FrameOutOfRange { frame_idx: usize, frame_count: usize },
    #[error("invalid frame spec: {0}")]
    InvalidSpec(String),
}

/// Which sensors get bands in the frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensorSet {
    Both,
    AccelOnly,
    GyroOnly,
}

impl SensorSet {
    /// Global channel indices (0–2 accel, 3–5 gyro) in band order.
    pub fn channels(self) -> &'static [usize] {
        match self {
            SensorSet::Both => &[0, 1, 2, 3, 4, 5],
            SensorSet::AccelOnly => &[0, 1, 2],
            SensorSet::GyroOnly => &[3, 4, 5],
        }
    }
}

impl Default for SensorSet {
    fn default() -> Self {
        SensorSet::Both
    }
}

/// Production versus debug output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenderMode {
    Production,
    Debug,
}

/// Everything that determines a frame's pixels besides the data itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrameSpec {
    /// Frame edge length in pixels.
    pub size_px: usize,
    /// Samples per frame window (300 = 3 s at 100 Hz).
    pub window_samples: usize,
    /// Sensor bands to draw.
    pub sensors: SensorSet,
    /// Anti-alias the polylines (off in production: keeps the palette binary).
    pub anti_alias: bool,
    pub mode: RenderMode,
}

impl Default for FrameSpec {
    fn default() -> Self {
        Self {
            size_px: FRAME_SIZE,
            window_samples: WINDOW_SAMPLES,
            sensors: SensorSet::Both,
            anti_alias: false,
            mode: RenderMode::Production,
        }
    }
}

impl FrameSpec {
    /// Sensor bands drawn per frame.
    pub fn rows(&self) -> usize {
        self.sensors.channels().len()
    }

    /// Polylines drawn per frame (two devices per band).
    pub fn lines(&self) -> usize {
        self.rows() * 2
    }

    pub fn validate(&self) -> Result<(), RenderError> {
        if self.size_px < self.rows() * BAND_HEIGHT {
            return Err(RenderError::InvalidSpec(format!(
                "size_px {} cannot fit {} bands of {BAND_HEIGHT} rows",
                self.size_px,
                self.rows()
            )));
        }
        if self.size_px > u16::MAX as usize {
            return Err(RenderError::InvalidSpec(format!("size_px {} exceeds the frame container limit", self.size_px)));
        }
        if self.window_samples < 2 {
            return Err(RenderError::InvalidSpec(format!("window_samples {} too small", self.window_samples)));
        }
        Ok(())
    }
}

/// Per-device, per-channel value range over a whole recording.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelRange {
    pub min: f64,
    pub max: f64,
}

/// Normalization ranges for every device in one recording.
///
/// Stored alongside every rendered movie so frames can be reproduced or
/// inspected without re-scanning the source series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleIndex {
    ranges: BTreeMap<DeviceRole, [ChannelRange; 6]>,
}

impl ScaleIndex {
    pub fn from_ranges(ranges: BTreeMap<DeviceRole, [ChannelRange; 6]>) -> Self {
        Self { ranges }
    }

    pub fn range(&self, role: DeviceRole, channel: usize) -> Option<ChannelRange> {
        self.ranges.get(&role).map(|r| r[channel])
    }
}

/// Scans a recording once and records each channel's min/max per device.
pub fn compute_scale_index(recording: &ImuRecording) -> ScaleIndex {
    let mut ranges = BTreeMap::new();
    for role in recording.roles() {
        let series = recording.series(role).expect("role listed by the recording");
        let mut bounds = [ChannelRange { min: f64::INFINITY, max: f64::NEG_INFINITY }; 6];
        for sample in series {
            for channel in 0..6 {
                let v = channel_value(sample, channel);
                bounds[channel].min = bounds[channel].min.min(v);
                bounds[channel].max = bounds[channel].max.max(v);
            }
        }
        ranges.insert(role, bounds);
    }
    ScaleIndex { ranges }
}

/// Maps a raw value into [0, 1] against a channel range.
///
/// Out-of-range values clamp; a degenerate range (min == max) maps to 0.5.
pub fn normalize(value: f64, min: f64, max: f64) -> f64 {
    if min == max {
        return 0.5;
    }
    ((value - min) / (max - min)).clamp(0.0, 1.0)
}

/// One rendered movie frame: the classifier's input for timestamp `t0_ms`.
#[derive(Debug, Clone, PartialEq)]
pub struct MovieFrame {
    pub frame_idx: usize,
    pub t0_ms: i64,
    pub(crate) pixels: Pixmap,
}

impl MovieFrame {
    /// Reassembles a frame from its parts, e.g. after decoding from disk.
    /// The pixmap must be square.
    pub fn from_parts(frame_idx: usize, t0_ms: i64, pixels: Pixmap) -> Result<Self, RenderError> {
        if pixels.width() != pixels.height() {
            return Err(RenderError::InvalidSpec(format!(
                "movie frames are square, got {}×{}",
                pixels.width(),
                pixels.height()
            )));
        }
        Ok(Self { frame_idx, t0_ms, pixels })
    }

    pub fn size(&self) -> usize {
        self.pixels.width()
    }

    pub fn pixels(&self) -> &Pixmap {
        &self.pixels
    }
}

/// A square frame filled with seeded random pixels; for exercising the
/// classifier without rendering a recording.
#[cfg(test)]
pub(crate) fn test_frame(frame_idx: usize, t0_ms: i64, seed: u64) -> MovieFrame {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(
        seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(frame_idx as u64),
    );
    let mut pixels = Pixmap::new(64, 64);
    let data = pixels.data_mut();
    for byte in data.iter_mut() {
        *byte = rng.random();
    }
    MovieFrame { frame_idx, t0_ms, pixels }
}

/// Renders one frame of a recording.
pub fn render_frame(
    recording: &ImuRecording,
    scale_index: &ScaleIndex,
    spec: &FrameSpec,
    frame_idx: usize,
) -> Result<MovieFrame, RenderError> {
    spec.validate()?;
    render_frame_unchecked(recording, scale_index, spec, frame_idx)
}

/// Renders every candidate frame of a recording against one shared scale index.
pub fn render_movie(recording: &ImuRecording, spec: &FrameSpec) -> Result<Vec<MovieFrame>, RenderError> {
    spec.validate()?;
    let scale_index = compute_scale_index(recording);
    let frame_count = frames_in(recording, spec);
    let mut frames = Vec::with_capacity(frame_count);
    for frame_idx in 0..frame_count {
        frames.push(render_frame_unchecked(recording, &scale_index, spec, frame_idx)?);
    }
    Ok(frames)
}

fn frames_in(recording: &ImuRecording, spec: &FrameSpec) -> usize {
    let n = recording.sample_count();
    if spec.window_samples == WINDOW_SAMPLES {
        candidate_frame_count(n).expect("recordings hold at least one window")
    } else {
        n.saturating_sub(spec.window_samples.saturating_sub(1))
    }
}

fn render_frame_unchecked(
    recording: &ImuRecording,
    scale_index: &ScaleIndex,
    spec: &FrameSpec,
    frame_idx: usize,
) -> Result<MovieFrame, RenderError> {
    let frame_count = frames_in(recording, spec);
    if frame_idx >= frame_count {
        return Err(RenderError::FrameOutOfRange { frame_idx, frame_count });
    }
    let t0_ms = frame_idx as i64 * SAMPLE_PERIOD_MS;
    let mut pixels = Pixmap::new(spec.size_px, spec.size_px);
    let mut points: Vec<(i64, i64)> = Vec::with_capacity(spec.window_samples);

    for (band_idx, &channel) in spec.sensors.channels().iter().enumerate() {
        let band_top = (band_idx * BAND_HEIGHT) as i64;
        for (role, color) in [(DeviceRole::LeftAnkle, 0usize), (DeviceRole::RightAnkle, 1usize)] {
            let series = recording.series(role).expect("recordings always hold both ankles");
            let window = &series[frame_idx..frame_idx + spec.window_samples];
            let range = scale_index
                .range(role, channel)
                .ok_or_else(|| RenderError::InvalidSpec(format!("scale index lacks {role}")))?;
            points.clear();
            for (i, sample) in window.iter().enumerate() {
                let x = (i * spec.size_px / spec.window_samples) as i64;
                let v = normalize(channel_value(sample, channel), range.min, range.max);
                let y = band_top + ((1.0 - v) * (BAND_HEIGHT - 1) as f64).round() as i64;
                points.push((x, y));
            }
            if spec.anti_alias {
                for pair in points.windows(2) {
                    let mut rgb = [0u8; 3];
                    rgb[color] = 255;
                    pixels.draw_line_aa(pair[0].0 as f64, pair[0].1 as f64, pair[1].0 as f64, pair[1].1 as f64, rgb);
                }
            } else {
                rasterize_polyline(&points, color, &mut pixels);
            }
        }
    }
    Ok(MovieFrame { frame_idx, t0_ms, pixels })
}

/// Extra knobs for the annotated debug rendering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DebugOptions {
    pub anti_alias: bool,
    /// Draw one-second gridlines.
    pub markers: bool,
    pub sensors: SensorSet,
}

impl Default for DebugOptions {
    fn default() -> Self {
        Self { anti_alias: true, markers: true, sensors: SensorSet::Both }
    }
}

const DEBUG_WIDTH: usize = 640;
const DEBUG_HEIGHT: usize = 480;
const TEXT_DIM: [u8; 3] = [170, 170, 170];
const TEXT_BRIGHT: [u8; 3] = [235, 235, 235];
const GRID: [u8; 3] = [55, 55, 55];
const LEFT_COLOR: [u8; 3] = [255, 70, 70];
const RIGHT_COLOR: [u8; 3] = [70, 255, 70];

/// Renders a large annotated view of one frame window: axis and band labels,
/// per-channel ranges, a device legend, a title carrying the frame index and
/// timestamp, and optional second markers / anti-aliasing.
pub fn render_debug_frame(
    recording: &ImuRecording,
    scale_index: &ScaleIndex,
    frame_idx: usize,
    options: &DebugOptions,
) -> Result<Pixmap, RenderError> {
    let frame_count = candidate_frame_count(recording.sample_count()).expect("recordings hold at least one window");
    if frame_idx >= frame_count {
        return Err(RenderError::FrameOutOfRange { frame_idx, frame_count });
    }
    let t0_ms = frame_idx as i64 * SAMPLE_PERIOD_MS;
    let mut pm = Pixmap::new(DEBUG_WIDTH, DEBUG_HEIGHT);

    let title = format!("FRAME {frame_idx}  T0 {t0_ms} MS  SPAN 3000 MS");
    font::draw_text(&mut pm, 8, 5, &title, TEXT_BRIGHT);

    // Legend, top right.
    let legend_x = (DEBUG_WIDTH - 150) as i64;
    pm.draw_line_rgb(legend_x, 8, legend_x + 18, 8, LEFT_COLOR);
    font::draw_text(&mut pm, legend_x + 24, 5, "LEFT", TEXT_DIM);
    pm.draw_line_rgb(legend_x + 70, 8, legend_x + 88, 8, RIGHT_COLOR);
    font::draw_text(&mut pm, legend_x + 94, 5, "RIGHT", TEXT_DIM);

    let channels = options.sensors.channels();
    let (plot_x0, plot_x1) = (56i64, (DEBUG_WIDTH - 10) as i64);
    let (plot_y0, plot_y1) = (22i64, (DEBUG_HEIGHT - 22) as i64);
    let band_h = (plot_y1 - plot_y0) / channels.len() as i64;

    if options.markers {
        for second in 0..=3 {
            let x = plot_x0 + (plot_x1 - plot_x0) * second / 3;
            pm.draw_line_rgb(x, plot_y0, x, plot_y1, GRID);
            let label = format!("+{} MS", second * 1000);
            let lx = (x - font::text_width(&label) as i64 / 2).max(0);
            font::draw_text(&mut pm, lx, plot_y1 + 6, &label, TEXT_DIM);
        }
    }

    for (band_idx, &channel) in channels.iter().enumerate() {
        let band_top = plot_y0 + band_idx as i64 * band_h;
        let band_bottom = band_top + band_h - 1;
        pm.draw_line_rgb(plot_x0, band_top, plot_x1, band_top, GRID);
        font::draw_text(&mut pm, 8, band_top + 4, CHANNEL_NAMES[channel], TEXT_BRIGHT);

        for (role, color) in [(DeviceRole::LeftAnkle, LEFT_COLOR), (DeviceRole::RightAnkle, RIGHT_COLOR)] {
            let series = recording.series(role).expect("recordings always hold both ankles");
            let window = &series[frame_idx..frame_idx + WINDOW_SAMPLES];
            let range = scale_index
                .range(role, channel)
                .ok_or_else(|| RenderError::InvalidSpec(format!("scale index lacks {role}")))?;
            if role == DeviceRole::LeftAnkle {
                font::draw_text(&mut pm, 8, band_top + 14, &format!("{:+.1}", range.max), TEXT_DIM);
                font::draw_text(&mut pm, 8, band_bottom - 9, &format!("{:+.1}", range.min), TEXT_DIM);
            }
            let inner_top = (band_top + 3) as f64;
            let inner_bottom = (band_bottom - 3) as f64;
            let mut prev: Option<(f64, f64)> = None;
            for (i, sample) in window.iter().enumerate() {
                let x = plot_x0 as f64 + (plot_x1 - plot_x0 - 1) as f64 * i as f64 / (WINDOW_SAMPLES - 1) as f64;
                let v = normalize(channel_value(sample, channel), range.min, range.max);
                let y = inner_bottom - v * (inner_bottom - inner_top);
                if let Some((px, py)) = prev {
                    if options.anti_alias {
                        pm.draw_line_aa(px, py, x, y, color);
                    } else {
                        pm.draw_line_rgb(px.round() as i64, py.round() as i64, x.round() as i64, y.round() as i64, color);
                    }
                }
                prev = Some((x, y));
            }
        }
    }
    pm.draw_line_rgb(plot_x0, plot_y1, plot_x1, plot_y1, GRID);
    Ok(pm)
}

/// Raw value of a global channel index (0–2 accel x/y/z, 3–5 gyro x/y/z).
fn channel_value(sample: &ImuSample, channel: usize) -> f64 {
    if channel < 3 {
        sample.accel[channel]
    } else {
        sample.gyro[channel - 3]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ImuRecording;

    /// Both ankles carry a distinct deterministic waveform on every channel.
    fn waveform_recording(samples: usize) -> ImuRecording {
        let make = |phase: f64| -> Vec<ImuSample> {
            (0..samples)
                .map(|i| {
                    let t = i as f64 * 0.01;
                    ImuSample {
                        t_ms: i as i64 * 10,
                        accel: [
                            (t * 2.1 + phase).sin() * 3.0,
                            (t * 1.3 + phase).cos() * 2.0 + 9.8,
                            (t * 3.7 + phase).sin() * 1.5,
                        ],
                        gyro: [
                            (t * 0.9 + phase).cos() * 40.0,
                            (t * 2.9 + phase).sin() * 80.0,
                            (t * 1.7 + phase).cos() * 25.0,
                        ],
                    }
                })
                .collect()
        };
        let mut series = BTreeMap::new();
        series.insert(DeviceRole::LeftAnkle, make(0.0));
        series.insert(DeviceRole::RightAnkle, make(std::f64::consts::PI));
        ImuRecording::new("wave", "s0", series).unwrap()
    }

    fn flat_recording(samples: usize, value: f64) -> ImuRecording {
        let make = || -> Vec<ImuSample> {
            (0..samples)
                .map(|i| ImuSample { t_ms: i as i64 * 10, accel: [value; 3], gyro: [value; 3] })
                .collect()
        };
        let mut series = BTreeMap::new();
        series.insert(DeviceRole::LeftAnkle, make());
        series.insert(DeviceRole::RightAnkle, make());
        ImuRecording::new("flat", "s0", series).unwrap()
    }

    #[test]
    fn normalize_maps_and_clamps() {
        assert_eq!(normalize(5.0, 0.0, 10.0), 0.5);
        assert_eq!(normalize(-3.0, 0.0, 10.0), 0.0);
        assert_eq!(normalize(42.0, 0.0, 10.0), 1.0);
        assert_eq!(normalize(7.0, 7.0, 7.0), 0.5);
    }

    #[test]
    fn scale_index_captures_channel_extremes() {
        let rec = waveform_recording(400);
        let idx = compute_scale_index(&rec);
        let series = rec.series(DeviceRole::LeftAnkle).unwrap();
        let want_min = series.iter().map(|s| s.accel[0]).fold(f64::INFINITY, f64::min);
        let want_max = series.iter().map(|s| s.accel[0]).fold(f64::NEG_INFINITY, f64::max);
        let got = idx.range(DeviceRole::LeftAnkle, 0).unwrap();
        assert_eq!(got.min, want_min);
        assert_eq!(got.max, want_max);
        assert!(idx.range(DeviceRole::Ground, 0).is_none());
    }

    #[test]
    fn default_spec_has_six_bands_twelve_lines() {
        let spec = FrameSpec::default();
        assert_eq!(spec.rows(), 6);
        assert_eq!(spec.lines(), 12);
        assert_eq!(spec.size_px, 64);
        assert!(!spec.anti_alias);
        assert!(spec.validate().is_ok());
        let accel = FrameSpec { sensors: SensorSet::AccelOnly, ..FrameSpec::default() };
        assert_eq!(accel.rows(), 3);
        assert_eq!(accel.lines(), 6);
    }

    #[test]
    fn undersized_spec_is_rejected() {
        let spec = FrameSpec { size_px: 32, ..FrameSpec::default() };
        assert!(matches!(spec.validate(), Err(RenderError::InvalidSpec(_))));
        // Three bands fit into 32 pixels.
        let spec = FrameSpec { size_px: 32, sensors: SensorSet::AccelOnly, ..FrameSpec::default() };
        assert!(spec.validate().is_ok());
    }

    #[test]
    fn zero_normalized_input_draws_band_bottom_rows() {
        let rec = flat_recording(400, 0.0);
        // A scale index where 0.0 is the minimum of a non-degenerate range.
        let mut ranges = BTreeMap::new();
        ranges.insert(DeviceRole::LeftAnkle, [ChannelRange { min: 0.0, max: 1.0 }; 6]);
        ranges.insert(DeviceRole::RightAnkle, [ChannelRange { min: 0.0, max: 1.0 }; 6]);
        let idx = ScaleIndex::from_ranges(ranges);
        let frame = render_frame(&rec, &idx, &FrameSpec::default(), 0).unwrap();
        let bottom_rows: Vec<usize> = (0..6).map(|b| b * BAND_HEIGHT + BAND_HEIGHT - 1).collect();
        for y in 0..64 {
            for x in 0..64 {
                let expected = if bottom_rows.contains(&y) { 255 } else { 0 };
                assert_eq!(frame.pixels().get(x, y, 0), expected, "left at ({x},{y})");
                assert_eq!(frame.pixels().get(x, y, 1), expected, "right at ({x},{y})");
                assert_eq!(frame.pixels().get(x, y, 2), 0, "blue at ({x},{y})");
            }
        }
    }

    #[test]
    fn flat_recording_centers_every_line() {
        // Degenerate ranges normalize to 0.5 -> y = band_top + round(4.5) = band_top + 5.
        let rec = flat_recording(350, 9.8);
        let idx = compute_scale_index(&rec);
        let frame = render_frame(&rec, &idx, &FrameSpec::default(), 0).unwrap();
        for band in 0..6 {
            let y = band * BAND_HEIGHT + 5;
            for x in 0..64 {
                assert_eq!(frame.pixels().get(x, y, 0), 255);
            }
        }
        let lit: usize = frame.pixels().data().iter().filter(|&&v| v > 0).count();
        assert_eq!(lit, 6 * 64 * 2);
    }

    #[test]
    fn pixel_mapping_follows_the_column_and_row_formulas() {
        let rec = waveform_recording(400);
        let idx = compute_scale_index(&rec);
        let spec = FrameSpec::default();
        let frame = render_frame(&rec, &idx, &spec, 37).unwrap();

        // Re-derive the expected lit pixel for sample 0 of band 2 (accel z), left ankle:
        // polyline vertices are exact; the first vertex is always lit.
        let series = rec.series(DeviceRole::LeftAnkle).unwrap();
        let range = idx.range(DeviceRole::LeftAnkle, 2).unwrap();
        let v = normalize(series[37].accel[2], range.min, range.max);
        let y = 2 * BAND_HEIGHT + ((1.0 - v) * 9.0).round() as usize;
        assert_eq!(frame.pixels().get(0, y, 0), 255);

        // Last sample lands in the last column: floor(299 * 64 / 300) = 63.
        let v_last = normalize(series[37 + 299].accel[2], range.min, range.max);
        let y_last = 2 * BAND_HEIGHT + ((1.0 - v_last) * 9.0).round() as usize;
        assert_eq!(frame.pixels().get(63, y_last, 0), 255);
    }

    #[test]
    fn rendering_is_deterministic_and_binary() {
        let rec = waveform_recording(500);
        let spec = FrameSpec::default();
        let a = render_movie(&rec, &spec).unwrap();
        let b = render_movie(&rec, &spec).unwrap();
        assert_eq!(a.len(), 201);
        assert_eq!(a, b);
        for frame in &a {
            assert!(frame.pixels().data().iter().all(|&v| v == 0 || v == 255));
            // Blue channel is unused.
            assert!(frame.pixels().data().iter().skip(2).step_by(3).all(|&v| v == 0));
        }
        assert_eq!(a[137].t0_ms, 1370);
        assert_eq!(a[137].frame_idx, 137);
    }

    #[test]
    fn accel_only_frames_leave_gyro_bands_empty() {
        let rec = waveform_recording(400);
        let spec = FrameSpec { sensors: SensorSet::AccelOnly, ..FrameSpec::default() };
        let frame = render_frame(&rec, &compute_scale_index(&rec), &spec, 0).unwrap();
        for y in (3 * BAND_HEIGHT)..64 {
            for x in 0..64 {
                for c in 0..3 {
                    assert_eq!(frame.pixels().get(x, y, c), 0);
                }
            }
        }
    }

    #[test]
    fn out_of_range_frame_errors() {
        let rec = waveform_recording(400);
        let idx = compute_scale_index(&rec);
        let err = render_frame(&rec, &idx, &FrameSpec::default(), 101).unwrap_err();
        assert_eq!(err, RenderError::FrameOutOfRange { frame_idx: 101, frame_count: 101 });
        assert!(render_frame(&rec, &idx, &FrameSpec::default(), 100).is_ok());
    }

    #[test]
    fn production_frame_compresses_small() {
        let rec = waveform_recording(400);
        let frame = render_frame(&rec, &compute_scale_index(&rec), &FrameSpec::default(), 50).unwrap();
        let png = frame.pixels().encode_png();
        assert_eq!(&png[..8], &[0x89, b'P', b'N', b'G', 0x0D, 0x0A, 0x1A, 0x0A]);
        assert!(png.len() <= 4096, "64x64 production frame should stay in the low-KB range, got {}", png.len());
    }

    #[test]
    fn debug_frame_is_large_annotated_and_deterministic() {
        let rec = waveform_recording(400);
        let idx = compute_scale_index(&rec);
        let a = render_debug_frame(&rec, &idx, 42, &DebugOptions::default()).unwrap();
        let b = render_debug_frame(&rec, &idx, 42, &DebugOptions::default()).unwrap();
        assert_eq!(a, b);
        assert!(a.width() >= 480);
        // Annotations exist: some pixels are neither black nor pure line color.
        let has_text = a.data().chunks_exact(3).any(|px| px[0] == TEXT_BRIGHT[0] && px[1] == TEXT_BRIGHT[1]);
        assert!(has_text, "expected bright annotation text");
        // Anti-aliasing toggles actually change the raster.
        let no_aa =
            render_debug_frame(&rec, &idx, 42, &DebugOptions { anti_alias: false, ..DebugOptions::default() })
                .unwrap();
        assert_ne!(a, no_aa);
        assert!(render_debug_frame(&rec, &idx, 9999, &DebugOptions::default()).is_err());
    }
}
