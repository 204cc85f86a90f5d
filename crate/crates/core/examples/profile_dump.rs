//! TEMPORARY: print generated subject profiles (delete).
use imu_movie::synth::{generate_dataset_detailed, SynthConfig};

fn main() {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let ds = generate_dataset_detailed(&SynthConfig { seed, ..SynthConfig::default() }).unwrap();
    for r in &ds {
        let p = &r.profile;
        println!(
            "{}: style={:?} gait_period={} amp={:.2} pickup_dur={} events={:?} turns={:?} samples={}",
            p.subject_id,
            p.style,
            p.gait_period_ms,
            p.gait_amplitude,
            p.pickup_duration_ms,
            r.events.iter().map(|e| (e.start_ms, e.ffm_ms)).collect::<Vec<_>>(),
            r.turns,
            r.recording.sample_count(),
        );
    }
}
