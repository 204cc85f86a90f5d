//! `imu-movie train` — train a classifier on a dataset and write a
//! checkpoint plus a loss-curve plot.
//!
//! A few recordings are held out for early stopping (picked with the global
//! seed unless `--validation` names them); training sequences are a balanced
//! seeded sample of the remaining recordings' windows. Everything downstream
//! of the dataset is reproducible from the seed: rerunning with identical
//! inputs writes an identical checkpoint.

use std::path::PathBuf;

use clap::Args;
use imu_movie::data::label_frames;
use imu_movie::eval::sample_balanced_sequences;
use imu_movie::model::{save_checkpoint, train, ModelParams};
use imu_movie::render::render_movie;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;
use crate::manifest::{load_dataset, write_atomic};
use crate::plot;
use crate::Ctx;

pub const CHECKPOINT_FILE: &str = "model.ckpt";

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Dataset manifest path.
    #[arg(long, value_name = "PATH")]
    pub manifest: PathBuf,
    /// Validation recording ids (comma-separated); default: seeded sample.
    #[arg(long, value_delimiter = ',', value_name = "IDS")]
    pub validation: Vec<String>,
}

pub fn run(ctx: &Ctx, args: &TrainArgs) -> Result<(), CliError> {
    let dataset = load_dataset(&args.manifest)?;
    let spec = ctx.config.frame_spec();
    let train_config = ctx.config.train_config(ctx.seed);
    let sampling = ctx.config.losocv_options(ctx.seed, None);
    println!("model parameters: {}", ModelParams::<f32>::zeros().param_count());

    let mut movies = Vec::with_capacity(dataset.len());
    for (recording, events) in &dataset {
        let movie = render_movie(recording, &spec)?;
        let truth = label_frames(recording, events)?;
        movies.push((recording.recording_id.clone(), movie, truth));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(train_config.seed);
    let validation_ids: Vec<String> = if args.validation.is_empty() {
        let ids: Vec<&String> = movies.iter().map(|(id, ..)| id).collect();
        if ids.len() <= sampling.validation_recordings {
            return Err(CliError::data(format!(
                "{} recordings cannot spare {} for validation",
                ids.len(),
                sampling.validation_recordings
            )));
        }
        let mut chosen: Vec<String> = ids
            .choose_multiple(&mut rng, sampling.validation_recordings)
            .map(|s| s.to_string())
            .collect();
        chosen.sort();
        chosen
    } else {
        for id in &args.validation {
            if !movies.iter().any(|(m, ..)| m == id) {
                return Err(CliError::data(format!("validation recording {id:?} is not in the manifest")));
            }
        }
        args.validation.clone()
    };

    let train_pool: Vec<_> = movies
        .iter()
        .filter(|(id, ..)| !validation_ids.contains(id))
        .map(|(_, m, t)| (m.as_slice(), t))
        .collect();
    let val_pool: Vec<_> = movies
        .iter()
        .filter(|(id, ..)| validation_ids.contains(id))
        .map(|(_, m, t)| (m.as_slice(), t))
        .collect();
    if train_pool.is_empty() {
        return Err(CliError::data("no recordings left to train on".to_string()));
    }

    let train_set =
        sample_balanced_sequences(&train_pool, sampling.max_train_pos, sampling.max_train_neg, &mut rng)?;
    let half = sampling.max_val_sequences / 2;
    let val_set = sample_balanced_sequences(
        &val_pool,
        half.max(1),
        (sampling.max_val_sequences - half).max(1),
        &mut rng,
    )?;
    println!(
        "training on {} sequences, validating on {} (recordings: {})",
        train_set.len(),
        val_set.len(),
        validation_ids.join(", ")
    );

    let outcome = train(&train_set, &val_set, &train_config)?;
    for e in &outcome.history {
        println!(
            "epoch {:>2}: train loss {:.4}  val loss {:.4}  val accuracy {:.3}",
            e.epoch, e.train_loss, e.val_loss, e.val_accuracy
        );
    }
    println!(
        "kept epoch {} of {}{}",
        outcome.best_epoch,
        outcome.history.len(),
        if outcome.stopped_early { " (stopped early)" } else { "" }
    );

    std::fs::create_dir_all(&ctx.out)
        .map_err(|e| CliError::data(format!("cannot create {}: {e}", ctx.out.display())))?;
    let mut bytes = Vec::new();
    save_checkpoint(&mut bytes, &outcome.params, &spec, &train_config)?;
    let ckpt_path = ctx.out.join(CHECKPOINT_FILE);
    write_atomic(&ckpt_path, &bytes)?;

    let loss_png = plot::loss_curves(&outcome.history, outcome.best_epoch).encode_png();
    let plot_path = ctx.out.join("loss.png");
    write_atomic(&plot_path, &loss_png)?;
    println!("wrote {} and {}", ckpt_path.display(), plot_path.display());
    Ok(())
}
