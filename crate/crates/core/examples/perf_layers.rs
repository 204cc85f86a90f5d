//! Temporary per-layer timing probe for the spatial forward pass.

use std::time::Instant;

use imu_movie::model::{spatial_encode, ModelParams};
use imu_movie::render::{render_movie, FrameSpec};
use imu_movie::synth::{generate_dataset_detailed, SynthConfig};

fn main() {
    let dataset = generate_dataset_detailed(&SynthConfig::default()).unwrap();
    let movie = render_movie(&dataset[0].recording, &FrameSpec::default()).unwrap();
    let params = ModelParams::init(0);

    let reps = 200;
    let t = Instant::now();
    let mut sink = 0.0f32;
    for i in 0..reps {
        let emb = spatial_encode(&movie[i % movie.len()], &params, false).unwrap();
        sink += emb[0];
    }
    println!("spatial_encode: {:.3} ms/frame (sink {sink})", t.elapsed().as_secs_f64() * 1e3 / reps as f64);
}
