//! TEMPORARY: single-fold quality probe at several sampling sizes (delete).
//!
//! Args: pos neg val epochs patience subjects near_frac turn_frac
//!   near_frac: fraction of negatives drawn near label transitions (0 = uniform)
//!   turn_frac: fraction of negatives drawn from turn interiors

use std::time::Instant;

use imu_movie::data::{ActivityClass, FrameLabelTrack};
use imu_movie::eval::{event_match, window_metrics};
use imu_movie::localize::segment_events;
use imu_movie::model::{predict_timeline, train, LabeledSequence, TrainConfig};
use imu_movie::render::{render_movie, FrameSpec, MovieFrame};
use imu_movie::synth::{generate_dataset_detailed, SynthConfig};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEQ_LEN: usize = 10;
const NEAR_FRAMES: i64 = 300;

struct Rec {
    subject: String,
    movie: Vec<MovieFrame>,
    truth: FrameLabelTrack,
    contacts: Vec<i64>,
    events: Vec<(i64, i64)>,
    turns: Vec<(i64, i64)>,
}

fn transitions(truth: &FrameLabelTrack) -> Vec<i64> {
    let mut out = Vec::new();
    for k in 1..truth.len() {
        if truth.get(k) != truth.get(k - 1) {
            out.push(k as i64);
        }
    }
    out
}

fn sample_mixed<R: Rng + ?Sized>(
    pool: &[(&[MovieFrame], &FrameLabelTrack, &[(i64, i64)])],
    max_pos: usize,
    max_neg: usize,
    near_frac: f64,
    turn_frac: f64,
    rng: &mut R,
) -> Vec<LabeledSequence> {
    let mut pos = Vec::new();
    let mut near = Vec::new();
    let mut turn = Vec::new();
    let mut bg = Vec::new();
    for (m, (movie, truth, turns)) in pool.iter().enumerate() {
        let edges = transitions(truth);
        let windows = movie.len().saturating_sub(SEQ_LEN - 1);
        for k in 0..windows {
            match truth.get(k).unwrap() {
                ActivityClass::Pickup => pos.push((m, k)),
                ActivityClass::Background => {
                    let k_i = k as i64;
                    let t0 = 10 * k_i;
                    if turns.iter().any(|&(s, e)| t0 >= s && t0 <= e) {
                        turn.push((m, k));
                    } else if edges.iter().any(|&e| (k_i - e).abs() <= NEAR_FRAMES) {
                        near.push((m, k));
                    }
                    bg.push((m, k));
                }
            }
        }
    }
    // turn_frac of the negatives come from turn interiors, near_frac from the
    // boundary neighborhoods, the rest uniformly from all background (minus
    // what's already taken).
    let turn_target = (max_neg as f64 * turn_frac).round() as usize;
    let near_target = (max_neg as f64 * near_frac).round() as usize;
    let turn_take: Vec<(usize, usize)> = turn.choose_multiple(rng, turn_target).copied().collect();
    let near_take: Vec<(usize, usize)> = near.choose_multiple(rng, near_target).copied().collect();
    let mut taken: std::collections::HashSet<(usize, usize)> = turn_take.iter().copied().collect();
    taken.extend(near_take.iter().copied());
    let bg_rest: Vec<(usize, usize)> =
        bg.into_iter().filter(|idx| !taken.contains(idx)).collect();
    let rest_take: Vec<(usize, usize)> = bg_rest
        .choose_multiple(rng, max_neg.saturating_sub(turn_take.len() + near_take.len()))
        .copied()
        .collect();
    let mut chosen: Vec<(usize, usize)> = pos.choose_multiple(rng, max_pos).copied().collect();
    chosen.extend(turn_take);
    chosen.extend(near_take);
    chosen.extend(rest_take);
    chosen.sort_unstable();
    chosen
        .into_iter()
        .map(|(m, k)| {
            let (movie, truth, _) = &pool[m];
            LabeledSequence::new(movie[k..k + SEQ_LEN].to_vec(), truth.get(k).unwrap()).unwrap()
        })
        .collect()
}

fn overlaps(a: (i64, i64), b: (i64, i64)) -> bool {
    a.0 <= b.1 && b.0 <= a.1
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let pos: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let neg: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(100);
    let val: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(64);
    let epochs: usize = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(15);
    let patience: usize = args.get(5).and_then(|s| s.parse().ok()).unwrap_or(3);
    let subjects: String = args.get(6).cloned().unwrap_or_else(|| "S00,S04,S07".into());
    let near_frac: f64 = args.get(7).and_then(|s| s.parse().ok()).unwrap_or(0.0);
    let turn_frac: f64 = args.get(8).and_then(|s| s.parse().ok()).unwrap_or(0.0);

    let dataset = generate_dataset_detailed(&SynthConfig::default()).unwrap();
    let spec = FrameSpec::default();
    println!("rendering…");
    let cache: Vec<Rec> = dataset
        .iter()
        .map(|r| {
            let movie = render_movie(&r.recording, &spec).unwrap();
            let truth = imu_movie::data::label_frames(&r.recording, &r.events).unwrap();
            Rec {
                subject: r.recording.subject_id.clone(),
                movie,
                truth,
                contacts: r.events.iter().map(|e| e.contact_ms).collect(),
                events: r.events.iter().map(|e| (e.start_ms, e.ffm_ms)).collect(),
                turns: r.turns.clone(),
            }
        })
        .collect();

    for test_subject in subjects.split(',') {
        let t = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        let val_donor = if test_subject == "S01" { "S02" } else { "S01" };
        let train_pool: Vec<(&[MovieFrame], &FrameLabelTrack, &[(i64, i64)])> = cache
            .iter()
            .filter(|r| r.subject != test_subject && r.subject != val_donor)
            .map(|r| (r.movie.as_slice(), &r.truth, r.turns.as_slice()))
            .collect();
        let val_pool: Vec<(&[MovieFrame], &FrameLabelTrack, &[(i64, i64)])> = cache
            .iter()
            .filter(|r| r.subject == val_donor)
            .map(|r| (r.movie.as_slice(), &r.truth, r.turns.as_slice()))
            .collect();
        let train_set = sample_mixed(&train_pool, pos, neg, near_frac, turn_frac, &mut rng);
        // Validation stays uniform: it stands in for the test distribution.
        let val_set = sample_mixed(&val_pool, val / 2, val - val / 2, 0.0, 0.0, &mut rng);

        let config = TrainConfig { epochs, patience, seed: 42, ..TrainConfig::default() };
        let outcome = train(&train_set, &val_set, &config).unwrap();
        let t_train = t.elapsed().as_secs_f64();

        let rec = cache.iter().find(|r| r.subject == test_subject).unwrap();
        let predictions = predict_timeline(&rec.movie, &outcome.params).unwrap();
        let wm = window_metrics(&predictions, &rec.truth.prefix(predictions.len())).unwrap();
        let timeline: Vec<(i64, ActivityClass)> =
            predictions.iter().map(|p| (p.t0_ms, p.class)).collect();
        let events = segment_events(&timeline).unwrap();
        let em = event_match(&events, &rec.contacts);
        println!(
            "{test_subject}: acc={:.4} prec={:.4} rec={:.4} fpr={:.4} ev {}/{} fp_events={} best_epoch={} epochs={} early={} train={:.0}s total={:.0}s",
            wm.accuracy().unwrap(),
            wm.precision().unwrap_or(f64::NAN),
            wm.recall().unwrap_or(f64::NAN),
            wm.false_positive_rate().unwrap(),
            em.events_detected,
            em.events_total,
            em.false_positive_events,
            outcome.best_epoch,
            outcome.history.len(),
            outcome.stopped_early,
            t_train,
            t.elapsed().as_secs_f64(),
        );
        let hist: Vec<String> = outcome
            .history
            .iter()
            .map(|e| format!("{}:{:.3}/{:.3}/{:.2}", e.epoch, e.train_loss, e.val_loss, e.val_accuracy))
            .collect();
        println!("    epochs(tr/val/acc): {}", hist.join(" "));

        // Where do the false positives live?
        let zone = 1500;
        let mut fp_win = [0u64; 3]; // adj, turn, other
        for p in &predictions {
            let truth_class = rec.truth.get((p.t0_ms / 10) as usize).unwrap();
            if p.class == ActivityClass::Pickup && truth_class == ActivityClass::Background {
                let pt = (p.t0_ms, p.t0_ms);
                if rec.events.iter().any(|&(s, f)| overlaps(pt, (s - zone, f + zone))) {
                    fp_win[0] += 1;
                } else if rec.turns.iter().any(|&tspan| overlaps(pt, tspan)) {
                    fp_win[1] += 1;
                } else {
                    fp_win[2] += 1;
                }
            }
        }
        println!(
            "    fp windows: adj={} turn={} other={} sum={} | wm tp={} fp={} tn={} fn={} total={} truth_pos={}",
            fp_win[0],
            fp_win[1],
            fp_win[2],
            fp_win.iter().sum::<u64>(),
            wm.true_positives,
            wm.false_positives,
            wm.true_negatives,
            wm.false_negatives,
            predictions.len(),
            (0..predictions.len())
                .filter(|&k| rec.truth.get(k) == Some(ActivityClass::Pickup))
                .count(),
        );
        for ev in &events {
            let contains_contact = rec.contacts.iter().any(|&c| ev.contains(c));
            if contains_contact {
                continue;
            }
            let span = (ev.start_ms, ev.end_ms);
            let cat = if rec.events.iter().any(|&(s, f)| overlaps(span, (s - zone, f + zone))) {
                "adj"
            } else if rec.turns.iter().any(|&tspan| overlaps(span, tspan)) {
                "turn"
            } else {
                "other"
            };
            let probs: Vec<f64> = predictions
                .iter()
                .filter(|p| p.t0_ms >= ev.start_ms && p.t0_ms <= ev.end_ms)
                .map(|p| p.pickup_probability)
                .collect();
            let mean_p = probs.iter().sum::<f64>() / probs.len().max(1) as f64;
            println!(
                "    fp event [{}, {}] len={} top={}ms p={:.2} {}",
                ev.start_ms,
                ev.end_ms,
                probs.len(),
                ev.top_ms,
                mean_p,
                cat
            );
        }
    }
}
