//! TEMPORARY: benchmark-scale LOSOCV dry run (delete before release).

use std::time::Instant;

use imu_movie::eval::{losocv, window_false_positives_within, LosocvOptions};
use imu_movie::render::SensorSet;
use imu_movie::synth::{generate_dataset_detailed, SynthConfig};

fn main() {
    let config = SynthConfig::default();
    let detailed = generate_dataset_detailed(&config).unwrap();
    let dataset: Vec<_> =
        detailed.iter().map(|r| (r.recording.clone(), r.events.clone())).collect();

    let options = LosocvOptions { rounds: 1, ..LosocvOptions::default() };
    let t = Instant::now();
    let report = losocv(&dataset, &options).unwrap();
    let dt = t.elapsed();
    println!("=== default sensors, 1 round: {:.1} s ===", dt.as_secs_f64());
    print!("{}", report.table());

    let round = &report.rounds[0];
    let agg = &round.aggregate;
    println!(
        "mean window acc {:?}  event recall {:?} ({} / {})  fp/min {:?}",
        agg.window_accuracy,
        agg.event_recall_raw,
        agg.events_raw.events_detected,
        agg.events_raw.events_total,
        agg.fp_events_per_minute_raw
    );
    for fold in &round.folds {
        for rec in &fold.recordings {
            let turns = &detailed
                .iter()
                .find(|r| r.recording.recording_id == rec.recording_id)
                .unwrap()
                .turns;
            let truth = imu_movie::data::label_frames(
                &detailed
                    .iter()
                    .find(|r| r.recording.recording_id == rec.recording_id)
                    .unwrap()
                    .recording,
                &detailed
                    .iter()
                    .find(|r| r.recording.recording_id == rec.recording_id)
                    .unwrap()
                    .events,
            )
            .unwrap()
            .prefix(rec.predictions.len());
            let turn_fps = window_false_positives_within(&rec.predictions, &truth, turns).unwrap();
            println!(
                "  {}: fp_events={} raw_events={} detected={}/{} turn_fps={} best_epoch={} stopped_early={} epochs={}",
                rec.recording_id,
                rec.events_raw.false_positive_events,
                rec.raw_events.len(),
                rec.events_raw.events_detected,
                rec.events_raw.events_total,
                turn_fps,
                fold.best_epoch,
                fold.stopped_early,
                fold.epochs_run,
            );
        }
    }

    let accel_options = LosocvOptions {
        rounds: 1,
        frame_spec: imu_movie::render::FrameSpec {
            sensors: SensorSet::AccelOnly,
            ..Default::default()
        },
        ..LosocvOptions::default()
    };
    let t = Instant::now();
    let accel_report = losocv(&dataset, &accel_options).unwrap();
    let dt = t.elapsed();
    println!("=== accel-only, 1 round: {:.1} s ===", dt.as_secs_f64());
    print!("{}", accel_report.table());
    let mut both_turn_fps = 0u64;
    let mut accel_turn_fps = 0u64;
    for (rep, total) in [(&report, &mut both_turn_fps), (&accel_report, &mut accel_turn_fps)] {
        for fold in &rep.rounds[0].folds {
            for rec in &fold.recordings {
                let entry = detailed
                    .iter()
                    .find(|r| r.recording.recording_id == rec.recording_id)
                    .unwrap();
                let truth = imu_movie::data::label_frames(&entry.recording, &entry.events)
                    .unwrap()
                    .prefix(rec.predictions.len());
                *total +=
                    window_false_positives_within(&rec.predictions, &truth, &entry.turns).unwrap();
            }
        }
    }
    println!("turn-segment window FPs: both={both_turn_fps} accel_only={accel_turn_fps}");
}
