//! Temporary timing probe for sizing the cross-validation defaults.

use std::time::Instant;

use imu_movie::data::ActivityClass;
use imu_movie::model::{predict_timeline, train, LabeledSequence, ModelParams, TrainConfig};
use imu_movie::render::{render_movie, FrameSpec};
use imu_movie::synth::{generate_dataset_detailed, SynthConfig};

fn main() {
    let config = SynthConfig::default();
    let t = Instant::now();
    let dataset = generate_dataset_detailed(&config).unwrap();
    println!("synth {} recordings: {:?}", dataset.len(), t.elapsed());
    for rec in &dataset {
        println!(
            "  {}: {} samples ({} ms), {} candidate frames, {} pickups, {} turns",
            rec.recording.recording_id,
            rec.recording.sample_count(),
            rec.recording.duration_ms(),
            rec.recording.candidate_frames(),
            rec.events.len(),
            rec.turns.len()
        );
    }

    let spec = FrameSpec::default();
    let t = Instant::now();
    let movie = render_movie(&dataset[0].recording, &spec).unwrap();
    println!("render_movie rec0 ({} frames): {:?}", movie.len(), t.elapsed());

    let params = ModelParams::init(0);
    let t = Instant::now();
    let preds = predict_timeline(&movie, &params).unwrap();
    println!("predict_timeline ({} windows): {:?}", preds.len(), t.elapsed());

    // Assemble a balanced training set from real frame labels.
    let truth = imu_movie::data::label_frames(&dataset[0].recording, &dataset[0].events).unwrap();
    let last_start = movie.len() - 10;
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for k in 0..=last_start {
        match truth.get(k).unwrap() {
            ActivityClass::Pickup => pos.push(k),
            ActivityClass::Background => neg.push(k),
        }
    }
    println!("rec0 frame labels: {} pickup, {} background starts", pos.len(), neg.len());
    let seq_at = |k: usize| LabeledSequence::new(movie[k..k + 10].to_vec(), truth.get(k).unwrap()).unwrap();
    let train_set: Vec<_> =
        pos.iter().step_by(pos.len() / 48 + 1).chain(neg.iter().step_by(neg.len() / 48 + 1)).map(|&k| seq_at(k)).collect();
    let val_set: Vec<_> = pos
        .iter()
        .skip(1)
        .step_by(pos.len() / 24 + 1)
        .chain(neg.iter().skip(7).step_by(neg.len() / 24 + 1))
        .map(|&k| seq_at(k))
        .collect();
    println!("train set {} sequences, val set {}", train_set.len(), val_set.len());

    let cfg = TrainConfig { epochs: 1, ..TrainConfig::default() };
    let t = Instant::now();
    let out = train(&train_set, &val_set, &cfg).unwrap();
    println!("1 epoch over {} sequences: {:?} (val acc {:.3})", train_set.len(), t.elapsed(), out.history[0].val_accuracy);

    let cfg = TrainConfig::default();
    let t = Instant::now();
    let out = train(&train_set, &val_set, &cfg).unwrap();
    println!(
        "full default train: {:?} ({} epochs, best {}, stopped_early {}, final val acc {:.3})",
        t.elapsed(),
        out.history.len(),
        out.best_epoch,
        out.stopped_early,
        out.history.last().unwrap().val_accuracy
    );

    let t = Instant::now();
    let preds2 = predict_timeline(&movie, &out.params).unwrap();
    let agree = preds2
        .iter()
        .enumerate()
        .filter(|(k, p)| p.class == truth.get(*k).unwrap())
        .count();
    println!("post-train timeline: {:?}, window agreement {:.3}", t.elapsed(), agree as f64 / preds2.len() as f64);
}
