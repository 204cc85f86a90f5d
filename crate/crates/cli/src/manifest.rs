//! On-disk dataset layout: a JSON manifest pointing at per-device sample CSVs
//! and per-recording label CSVs.
//!
//! ```text
//! out/
//!   manifest.json
//!   data/
//!     S01-r0.left_ankle.csv    t_ms,ax,ay,az,gx,gy,gz
//!     S01-r0.right_ankle.csv
//!     S01-r0.ground.csv
//!     S01-r0.labels.csv        start_ms,contact_ms,ffm_ms
//! ```
//!
//! Manifest paths are relative to the manifest file's directory, so a dataset
//! directory can be moved or archived wholesale. All writes go through a
//! temp-file-plus-rename so a crash never leaves a half-written file behind.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use imu_movie::data::{DeviceRole, EventLabel, ImuRecording, ImuSample};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const MANIFEST_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub version: u32,
    pub subjects: Vec<ManifestSubject>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestSubject {
    pub subject_id: String,
    pub recordings: Vec<ManifestRecording>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestRecording {
    pub recording_id: String,
    /// Device role name → sample CSV, relative to the manifest directory.
    pub data: BTreeMap<String, PathBuf>,
    /// Label CSV, relative to the manifest directory.
    pub labels: PathBuf,
}

#[derive(Debug, Serialize, Deserialize)]
struct SampleRow {
    t_ms: i64,
    ax: f64,
    ay: f64,
    az: f64,
    gx: f64,
    gy: f64,
    gz: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct LabelRow {
    start_ms: i64,
    contact_ms: i64,
    ffm_ms: i64,
}

/// Writes `bytes` to `path` atomically (temp file in the same directory, then
/// rename), so rereads never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)
        .map_err(|e| CliError::data(format!("cannot create temp file in {}: {e}", dir.display())))?;
    std::io::Write::write_all(&mut tmp, bytes)?;
    tmp.persist(path)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

fn sample_csv(samples: &[ImuSample]) -> Result<Vec<u8>, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for s in samples {
        writer
            .serialize(SampleRow {
                t_ms: s.t_ms,
                ax: s.accel[0],
                ay: s.accel[1],
                az: s.accel[2],
                gx: s.gyro[0],
                gy: s.gyro[1],
                gz: s.gyro[2],
            })
            .map_err(|e| CliError::data(format!("csv write: {e}")))?;
    }
    writer.into_inner().map_err(|e| CliError::data(format!("csv write: {e}")))
}

fn label_csv(events: &[EventLabel]) -> Result<Vec<u8>, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for e in events {
        writer
            .serialize(LabelRow { start_ms: e.start_ms, contact_ms: e.contact_ms, ffm_ms: e.ffm_ms })
            .map_err(|e| CliError::data(format!("csv write: {e}")))?;
    }
    // An empty label file still needs its header so it parses on the way back.
    if events.is_empty() {
        return Ok(b"start_ms,contact_ms,ffm_ms\n".to_vec());
    }
    writer.into_inner().map_err(|e| CliError::data(format!("csv write: {e}")))
}

/// Writes every recording's CSVs plus `manifest.json` under `out_dir` and
/// returns the manifest path.
pub fn write_dataset(
    out_dir: &Path,
    dataset: &[(ImuRecording, Vec<EventLabel>)],
) -> Result<PathBuf, CliError> {
    let data_dir = out_dir.join("data");
    std::fs::create_dir_all(&data_dir)
        .map_err(|e| CliError::data(format!("cannot create {}: {e}", data_dir.display())))?;

    let mut subjects: BTreeMap<&str, Vec<ManifestRecording>> = BTreeMap::new();
    for (recording, events) in dataset {
        let mut data = BTreeMap::new();
        for role in recording.roles() {
            let rel = PathBuf::from("data").join(format!("{}.{role}.csv", recording.recording_id));
            let samples = recording.series(role).expect("roles() yields present series");
            write_atomic(&out_dir.join(&rel), &sample_csv(samples)?)?;
            data.insert(role.to_string(), rel);
        }
        let labels = PathBuf::from("data").join(format!("{}.labels.csv", recording.recording_id));
        write_atomic(&out_dir.join(&labels), &label_csv(events)?)?;
        subjects.entry(recording.subject_id.as_str()).or_default().push(ManifestRecording {
            recording_id: recording.recording_id.clone(),
            data,
            labels,
        });
    }

    let manifest = DatasetManifest {
        version: MANIFEST_VERSION,
        subjects: subjects
            .into_iter()
            .map(|(subject_id, recordings)| ManifestSubject {
                subject_id: subject_id.to_string(),
                recordings,
            })
            .collect(),
    };
    let path = out_dir.join(MANIFEST_FILE);
    let json = serde_json::to_vec_pretty(&manifest)
        .map_err(|e| CliError::data(format!("manifest encode: {e}")))?;
    write_atomic(&path, &json)?;
    Ok(path)
}

fn read_samples(path: &Path) -> Result<Vec<ImuSample>, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    let mut samples = Vec::new();
    for row in reader.deserialize() {
        let row: SampleRow =
            row.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        samples.push(ImuSample {
            t_ms: row.t_ms,
            accel: [row.ax, row.ay, row.az],
            gyro: [row.gx, row.gy, row.gz],
        });
    }
    Ok(samples)
}

fn read_labels(path: &Path) -> Result<Vec<EventLabel>, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    let mut events = Vec::new();
    for row in reader.deserialize() {
        let row: LabelRow =
            row.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        events.push(
            EventLabel::new(row.start_ms, row.contact_ms, row.ffm_ms)
                .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?,
        );
    }
    Ok(events)
}

pub fn read_manifest(path: &Path) -> Result<DatasetManifest, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    let manifest: DatasetManifest = serde_json::from_str(&text)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    if manifest.version != MANIFEST_VERSION {
        return Err(CliError::data(format!(
            "{}: unsupported manifest version {}",
            path.display(),
            manifest.version
        )));
    }
    Ok(manifest)
}

/// Loads and validates every recording a manifest references.
pub fn load_dataset(
    manifest_path: &Path,
) -> Result<Vec<(ImuRecording, Vec<EventLabel>)>, CliError> {
    let manifest = read_manifest(manifest_path)?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let mut dataset = Vec::new();
    for subject in &manifest.subjects {
        for entry in &subject.recordings {
            let mut series = BTreeMap::new();
            for (role_name, rel) in &entry.data {
                let role = DeviceRole::from_str(role_name).map_err(|e| {
                    CliError::data(format!("{}: {e}", manifest_path.display()))
                })?;
                series.insert(role, read_samples(&base.join(rel))?);
            }
            let recording = ImuRecording::new(&entry.recording_id, &subject.subject_id, series)
                .map_err(|e| CliError::data(format!("{}: {e}", entry.recording_id)))?;
            let events = read_labels(&base.join(&entry.labels))?;
            dataset.push((recording, events));
        }
    }
    Ok(dataset)
}

/// Loads one recording (and its labels) by id.
pub fn load_recording(
    manifest_path: &Path,
    recording_id: &str,
) -> Result<(ImuRecording, Vec<EventLabel>), CliError> {
    let manifest = read_manifest(manifest_path)?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    for subject in &manifest.subjects {
        for entry in &subject.recordings {
            if entry.recording_id != recording_id {
                continue;
            }
            let mut series = BTreeMap::new();
            for (role_name, rel) in &entry.data {
                let role = DeviceRole::from_str(role_name).map_err(|e| {
                    CliError::data(format!("{}: {e}", manifest_path.display()))
                })?;
                series.insert(role, read_samples(&base.join(rel))?);
            }
            let recording = ImuRecording::new(&entry.recording_id, &subject.subject_id, series)
                .map_err(|e| CliError::data(format!("{recording_id}: {e}")))?;
            let events = read_labels(&base.join(&entry.labels))?;
            return Ok((recording, events));
        }
    }
    Err(CliError::data(format!(
        "recording {recording_id:?} is not in {}",
        manifest_path.display()
    )))
}
