//! Adam optimizer over the model's trainable tensors.

use super::ModelParams;

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

/// First/second-moment accumulators, shaped like the trainable parameters.
pub(crate) struct AdamState {
    m: ModelParams<f32>,
    v: ModelParams<f32>,
    step: u64,
}

impl AdamState {
    pub(crate) fn new() -> Self {
        Self { m: ModelParams::zeros(), v: ModelParams::zeros(), step: 0 }
    }

    /// One update with bias-corrected moments: θ ← θ − lr·m̂/(√v̂ + ε).
    pub(crate) fn apply(&mut self, params: &mut ModelParams<f32>, grads: &ModelParams<f32>, lr: f64) {
        self.step += 1;
        let t = self.step as i32;
        let corr1 = 1.0 - BETA1.powi(t);
        let corr2 = 1.0 - BETA2.powi(t);
        let (b1, b2) = (BETA1 as f32, BETA2 as f32);

        let mut thetas = params.trainable_mut();
        let mut ms = self.m.trainable_mut();
        let mut vs = self.v.trainable_mut();
        let gs = grads.trainable();
        for i in 0..thetas.len() {
            let theta = &mut thetas[i].1;
            let m = &mut ms[i].1;
            let v = &mut vs[i].1;
            let g = &gs[i].1;
            ndarray::Zip::from(theta).and(m).and(v).and(g).for_each(|th, mi, vi, &gi| {
                *mi = b1 * *mi + (1.0 - b1) * gi;
                *vi = b2 * *vi + (1.0 - b2) * gi * gi;
                let mhat = *mi as f64 / corr1;
                let vhat = *vi as f64 / corr2;
                *th -= (lr * mhat / (vhat.sqrt() + ADAM_EPS)) as f32;
            });
        }
    }
}
