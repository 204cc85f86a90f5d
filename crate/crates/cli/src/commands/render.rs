//! `imu-movie render` — write movie frames for one recording.
//!
//! Production mode emits the raw model-input containers (`.imuv`); debug mode
//! emits, per frame, both the annotated human view and the model input as
//! PNGs for side-by-side inspection. Either way a `movie.json` sidecar
//! records the frame spec, the recording's normalization ranges, and each
//! frame's timestamp, file name, and byte size.

use std::ops::Range;
use std::path::PathBuf;

use clap::Args;
use imu_movie::render::format::encode_frame;
use imu_movie::render::{
    compute_scale_index, render_debug_frame, render_frame, DebugOptions, RenderMode,
};
use serde_json::json;

use crate::error::CliError;
use crate::manifest::{load_recording, write_atomic};
use crate::Ctx;

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Dataset manifest path.
    #[arg(long, value_name = "PATH")]
    pub manifest: PathBuf,
    /// Recording id to render.
    #[arg(long, value_name = "ID")]
    pub recording: String,
    /// Frames to render: `all`, a single index, or `START..END` (half-open).
    #[arg(long, default_value = "all")]
    pub frames: String,
    /// Override the configured render mode.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeArg {
    Production,
    Debug,
}

fn parse_frame_range(text: &str, total: usize) -> Result<Range<usize>, CliError> {
    if text == "all" {
        return Ok(0..total);
    }
    let parsed = match text.split_once("..") {
        Some((a, b)) => a
            .parse::<usize>()
            .and_then(|start| b.parse::<usize>().map(|end| start..end)),
        None => text.parse::<usize>().map(|idx| idx..idx + 1),
    };
    let range =
        parsed.map_err(|_| CliError::usage(format!("bad frame range {text:?}: use `all`, `413`, or `400..420`")))?;
    if range.start >= range.end {
        return Err(CliError::usage(format!("empty frame range {text:?}")));
    }
    if range.end > total {
        return Err(CliError::data(format!(
            "frame range {text} exceeds the recording's {total} candidate frames"
        )));
    }
    Ok(range)
}

pub fn run(ctx: &Ctx, args: &RenderArgs) -> Result<(), CliError> {
    let (recording, _events) = load_recording(&args.manifest, &args.recording)?;
    let mut spec = ctx.config.frame_spec();
    if let Some(mode) = args.mode {
        spec.mode = match mode {
            ModeArg::Production => RenderMode::Production,
            ModeArg::Debug => RenderMode::Debug,
        };
    }
    spec.validate()?;

    let range = parse_frame_range(&args.frames, recording.candidate_frames())?;
    let scale_index = compute_scale_index(&recording);
    let dir = ctx.out.join("frames").join(&args.recording);
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::data(format!("cannot create {}: {e}", dir.display())))?;

    let mut entries = Vec::with_capacity(range.len());
    let mut total_bytes = 0usize;
    for idx in range {
        let frame = render_frame(&recording, &scale_index, &spec, idx)?;
        let (name, bytes) = match spec.mode {
            RenderMode::Production => {
                let name = format!("frame_{idx:06}.imuv");
                let bytes = encode_frame(&frame);
                write_atomic(&dir.join(&name), &bytes)?;
                (name, bytes.len())
            }
            RenderMode::Debug => {
                let debug = render_debug_frame(
                    &recording,
                    &scale_index,
                    idx,
                    &DebugOptions { sensors: spec.sensors, ..DebugOptions::default() },
                )?;
                let annotated = format!("frame_{idx:06}.debug.png");
                let annotated_bytes = debug.encode_png();
                write_atomic(&dir.join(&annotated), &annotated_bytes)?;

                let name = format!("frame_{idx:06}.input.png");
                let bytes = frame.pixels().encode_png();
                write_atomic(&dir.join(&name), &bytes)?;
                println!("{annotated}  {} bytes  t0={} ms", annotated_bytes.len(), frame.t0_ms);
                (name, bytes.len())
            }
        };
        println!("{name}  {bytes} bytes  t0={} ms", frame.t0_ms);
        total_bytes += bytes;
        entries.push(json!({
            "frame_idx": idx,
            "t0_ms": frame.t0_ms,
            "file": name,
            "bytes": bytes,
        }));
    }

    let sidecar = json!({
        "recording_id": args.recording,
        "frame_spec": spec,
        "scale_index": scale_index,
        "frames": entries,
    });
    let sidecar_bytes = serde_json::to_vec_pretty(&sidecar)
        .map_err(|e| CliError::data(format!("sidecar encode: {e}")))?;
    write_atomic(&dir.join("movie.json"), &sidecar_bytes)?;
    println!("{} frames, {} bytes total, sidecar {}", entries.len(), total_bytes, dir.join("movie.json").display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_ranges_parse_and_validate() {
        assert_eq!(parse_frame_range("all", 700).unwrap(), 0..700);
        assert_eq!(parse_frame_range("413", 700).unwrap(), 413..414);
        assert_eq!(parse_frame_range("400..420", 700).unwrap(), 400..420);
        assert_eq!(parse_frame_range("abc", 700).unwrap_err().exit_code(), 1);
        assert_eq!(parse_frame_range("9..5", 700).unwrap_err().exit_code(), 1);
        assert_eq!(parse_frame_range("0..701", 700).unwrap_err().exit_code(), 2);
    }
}
