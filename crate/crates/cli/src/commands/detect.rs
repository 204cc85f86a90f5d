//! `imu-movie detect` — run a trained checkpoint over one recording and
//! report localized pickup events with their Time-of-Pickup.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use clap::Args;
use imu_movie::data::ActivityClass;
use imu_movie::localize::{duration_filter, segment_events};
use imu_movie::model::{load_checkpoint, predict_timeline};
use imu_movie::render::render_movie;

use crate::commands::train::CHECKPOINT_FILE;
use crate::error::CliError;
use crate::manifest::{load_recording, write_atomic};
use crate::plot;
use crate::Ctx;

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Dataset manifest path.
    #[arg(long, value_name = "PATH")]
    pub manifest: PathBuf,
    /// Recording id to scan.
    #[arg(long, value_name = "ID")]
    pub recording: String,
    /// Trained checkpoint (default `<out>/model.ckpt`).
    #[arg(long, value_name = "PATH")]
    pub checkpoint: Option<PathBuf>,
    /// Drop events with a Time-of-Pickup below this many milliseconds.
    #[arg(long, default_value_t = 0)]
    pub min_top: i64,
}

pub fn run(ctx: &Ctx, args: &DetectArgs) -> Result<(), CliError> {
    let ckpt_path = args.checkpoint.clone().unwrap_or_else(|| ctx.out.join(CHECKPOINT_FILE));
    let file = File::open(&ckpt_path)
        .map_err(|e| CliError::data(format!("cannot open checkpoint {}: {e}", ckpt_path.display())))?;
    let checkpoint = load_checkpoint(&mut BufReader::new(file))?;

    // A config that asks for different rendering than the checkpoint was
    // trained with cannot be satisfied: the weights only fit their own spec.
    if let Some(requested) = &ctx.config.frame {
        if *requested != checkpoint.frame_spec {
            return Err(CliError::model(format!(
                "frame spec in {} does not match the requested [frame] config \
                 (checkpoint: {:?}; requested: {:?})",
                ckpt_path.display(),
                checkpoint.frame_spec,
                requested
            )));
        }
    }

    let (recording, labels) = load_recording(&args.manifest, &args.recording)?;
    let movie = render_movie(&recording, &checkpoint.frame_spec)?;
    let predictions = predict_timeline(&movie, &checkpoint.params)?;
    let timeline: Vec<(i64, ActivityClass)> =
        predictions.iter().map(|p| (p.t0_ms, p.class)).collect();
    let mut events = segment_events(&timeline)?;
    if args.min_top > 0 {
        events = duration_filter(&events, args.min_top);
    }

    println!("recording {}: {} pickup events", args.recording, events.len());
    println!("{:>10} {:>10} {:>8}", "start_ms", "end_ms", "top_ms");
    for e in &events {
        println!("{:>10} {:>10} {:>8}", e.start_ms, e.end_ms, e.top_ms);
    }
    if !labels.is_empty() {
        let contacts: Vec<i64> = labels.iter().map(|l| l.contact_ms).collect();
        let matched =
            contacts.iter().filter(|&&c| events.iter().any(|e| e.contains(c))).count();
        println!("matched {matched} of {} labeled contacts", contacts.len());
    }

    let truth_spans: Vec<(i64, i64)> = labels.iter().map(|l| (l.start_ms, l.ffm_ms)).collect();
    let contacts: Vec<i64> = labels.iter().map(|l| l.contact_ms).collect();
    let strip = plot::timeline_strip(
        recording.duration_ms(),
        &truth_spans,
        &predictions,
        &events,
        &contacts,
    );
    std::fs::create_dir_all(&ctx.out)
        .map_err(|e| CliError::data(format!("cannot create {}: {e}", ctx.out.display())))?;
    let plot_path = ctx.out.join(format!("{}.timeline.png", args.recording));
    write_atomic(&plot_path, &strip.encode_png())?;
    println!("wrote {}", plot_path.display());
    Ok(())
}
