//! `imu-movie synth` — generate a labeled synthetic dataset on disk.

use std::collections::BTreeSet;

use imu_movie::synth::generate_dataset;

use crate::error::CliError;
use crate::manifest::write_dataset;
use crate::Ctx;

pub fn run(ctx: &Ctx) -> Result<(), CliError> {
    let config = ctx.config.synth_config(ctx.seed);
    let dataset = generate_dataset(&config)?;
    let manifest_path = write_dataset(&ctx.out, &dataset)?;

    let subjects: BTreeSet<&str> = dataset.iter().map(|(r, _)| r.subject_id.as_str()).collect();
    let events: usize = dataset.iter().map(|(_, e)| e.len()).sum();
    let frames: usize = dataset.iter().map(|(r, _)| r.candidate_frames()).sum();
    println!("wrote {}", manifest_path.display());
    println!(
        "subjects: {}  recordings: {}  pickup events: {}  candidate frames: {}",
        subjects.len(),
        dataset.len(),
        events,
        frames
    );
    Ok(())
}
