//! Forward/backward primitives for the spatial encoder and classifier head.
//!
//! Every forward returns the cache its backward needs; backwards accumulate
//! (`+=`) into caller-owned gradient tensors so one pass can serve a whole
//! batch. Convolutions run as im2col + GEMM, which is where nearly all of the
//! model's arithmetic lives.
//!
//! Images are channels-first `(c, h, w)` throughout: per-channel planes are
//! contiguous, the im2col patch matrix fills by whole-row `memcpy`, and the
//! GEMM runs in its fast orientation (few rows, thousands of columns).

use super::{c, Scalar};
use ndarray::linalg::general_mat_mul;
use ndarray::{Array1, Array2, Array3, Array4, Axis};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub(crate) const BN_EPS: f64 = 1e-5;

/// im2col patch matrix plus the input geometry, kept for the backward pass.
///
/// `cols` is `(cin·kh·kw, oh·ow)`: row `(ci, ky, kx)` holds the input value
/// each output position reads through that kernel tap.
pub(crate) struct ConvCache<F> {
    pub cols: Array2<F>,
    in_dims: (usize, usize, usize),
    kernel: (usize, usize),
}

/// Valid (no padding), stride-1 convolution of a channels-first image.
pub(crate) fn conv_forward<F: Scalar>(
    x: &Array3<F>,
    w: &Array4<F>,
    b: &Array1<F>,
) -> (Array3<F>, ConvCache<F>) {
    let (cin, h, wd) = x.dim();
    let (cout, _, kh, kw) = w.dim();
    let (oh, ow) = (h - kh + 1, wd - kw + 1);
    let k = cin * kh * kw;
    let positions = oh * ow;

    let mut cols = Array2::<F>::zeros((k, positions));
    {
        let xs = x.as_slice().expect("inputs are standard layout");
        let cs = cols.as_slice_mut().expect("freshly allocated");
        // For a fixed kernel tap, consecutive output columns read consecutive
        // input pixels, so each (tap, output row) pair is one contiguous copy.
        for ci in 0..cin {
            for ky in 0..kh {
                for kx in 0..kw {
                    let row = (ci * kh + ky) * kw + kx;
                    for oy in 0..oh {
                        let src = ci * h * wd + (oy + ky) * wd + kx;
                        let dst = row * positions + oy * ow;
                        cs[dst..dst + ow].copy_from_slice(&xs[src..src + ow]);
                    }
                }
            }
        }
    }

    let wmat = w.view().into_shape_with_order((cout, k)).expect("weights are standard layout");
    let mut out = Array2::<F>::zeros((cout, positions));
    general_mat_mul(F::one(), &wmat, &cols, F::zero(), &mut out);
    out += &b.view().insert_axis(Axis(1));
    let out3 = out.into_shape_with_order((cout, oh, ow)).expect("row-major reshape");
    (out3, ConvCache { cols, in_dims: (cin, h, wd), kernel: (kh, kw) })
}

/// Accumulates weight/bias gradients; when `w` is given, also propagates the
/// gradient back to the layer input (skippable for the bottom layer).
pub(crate) fn conv_backward<F: Scalar>(
    grad_out: &Array3<F>,
    cache: &ConvCache<F>,
    w: Option<&Array4<F>>,
    dw: &mut Array4<F>,
    db: &mut Array1<F>,
) -> Option<Array3<F>> {
    let (cout, oh, ow) = grad_out.dim();
    let (cin, h, wd) = cache.in_dims;
    let (kh, kw) = cache.kernel;
    let k = cin * kh * kw;
    let positions = oh * ow;
    let go = grad_out.view().into_shape_with_order((cout, positions)).expect("standard layout");

    {
        let mut dwmat = dw.view_mut().into_shape_with_order((cout, k)).expect("standard layout");
        general_mat_mul(F::one(), &go, &cache.cols.t(), F::one(), &mut dwmat);
    }
    *db += &go.sum_axis(Axis(1));

    let w = w?;
    let wmat = w.view().into_shape_with_order((cout, k)).expect("standard layout");
    let mut dcols = Array2::<F>::zeros((k, positions));
    general_mat_mul(F::one(), &wmat.t(), &go, F::zero(), &mut dcols);

    // col2im: scatter-add each tap row back onto the input grid.
    let mut dx = Array3::<F>::zeros((cin, h, wd));
    {
        let dxs = dx.as_slice_mut().expect("freshly allocated");
        let ds = dcols.as_slice().expect("standard layout");
        for ci in 0..cin {
            for ky in 0..kh {
                for kx in 0..kw {
                    let row = (ci * kh + ky) * kw + kx;
                    for oy in 0..oh {
                        let dst = ci * h * wd + (oy + ky) * wd + kx;
                        let src = row * positions + oy * ow;
                        for i in 0..ow {
                            dxs[dst + i] = dxs[dst + i] + ds[src + i];
                        }
                    }
                }
            }
        }
    }
    Some(dx)
}

pub(crate) fn relu_inplace<F: Scalar>(x: &mut Array3<F>) {
    x.mapv_inplace(|v| if v > F::zero() { v } else { F::zero() });
}

/// Masks the gradient by the forward activation (cached post-ReLU output).
pub(crate) fn relu_backward_inplace<F: Scalar>(grad: &mut Array3<F>, activated: &Array3<F>) {
    ndarray::Zip::from(grad).and(activated).for_each(|g, &y| {
        if y <= F::zero() {
            *g = F::zero();
        }
    });
}

pub(crate) struct BnCache<F> {
    xhat: Array3<F>,
    inv_std: Array1<F>,
    /// Per-channel batch moments, for the running-average update.
    pub mean: Array1<F>,
    pub var: Array1<F>,
}

/// Batch norm over the spatial grid of a single frame (per channel).
pub(crate) fn bn_forward_train<F: Scalar>(
    x: &Array3<F>,
    gamma: &Array1<F>,
    beta: &Array1<F>,
) -> (Array3<F>, BnCache<F>) {
    let (ch, h, w) = x.dim();
    let n = c::<F>((h * w) as f64);
    let mut mean = Array1::<F>::zeros(ch);
    let mut var = Array1::<F>::zeros(ch);
    for (i, plane) in x.axis_iter(Axis(0)).enumerate() {
        let m = plane.sum() / n;
        mean[i] = m;
        var[i] = plane.fold(F::zero(), |acc, &v| acc + (v - m) * (v - m)) / n;
    }
    let inv_std = var.mapv(|v| F::one() / (v + c::<F>(BN_EPS)).sqrt());
    let mut xhat = x.clone();
    for (i, mut plane) in xhat.axis_iter_mut(Axis(0)).enumerate() {
        let (m, is) = (mean[i], inv_std[i]);
        plane.mapv_inplace(|v| (v - m) * is);
    }
    let mut y = xhat.clone();
    for (i, mut plane) in y.axis_iter_mut(Axis(0)).enumerate() {
        let (g, b) = (gamma[i], beta[i]);
        plane.mapv_inplace(|v| g * v + b);
    }
    (y, BnCache { xhat, inv_std, mean, var })
}

/// Batch norm with frozen running statistics (inference).
pub(crate) fn bn_forward_infer<F: Scalar>(
    x: &Array3<F>,
    gamma: &Array1<F>,
    beta: &Array1<F>,
    running_mean: &Array1<F>,
    running_var: &Array1<F>,
) -> Array3<F> {
    let mut y = x.clone();
    for (i, mut plane) in y.axis_iter_mut(Axis(0)).enumerate() {
        let inv = F::one() / (running_var[i] + c::<F>(BN_EPS)).sqrt();
        let (m, g, b) = (running_mean[i], gamma[i], beta[i]);
        plane.mapv_inplace(|v| g * (v - m) * inv + b);
    }
    y
}

pub(crate) fn bn_backward<F: Scalar>(
    grad: &Array3<F>,
    cache: &BnCache<F>,
    gamma: &Array1<F>,
    dgamma: &mut Array1<F>,
    dbeta: &mut Array1<F>,
) -> Array3<F> {
    let (ch, h, w) = grad.dim();
    let n = c::<F>((h * w) as f64);
    let mut dx = Array3::<F>::zeros((ch, h, w));
    for i in 0..ch {
        let g = grad.index_axis(Axis(0), i);
        let xh = cache.xhat.index_axis(Axis(0), i);
        let sum_g = g.sum();
        let sum_gx = ndarray::Zip::from(&g).and(&xh).fold(F::zero(), |acc, &a, &b| acc + a * b);
        dgamma[i] = dgamma[i] + sum_gx;
        dbeta[i] = dbeta[i] + sum_g;
        let scale = gamma[i] * cache.inv_std[i] / n;
        let mut dxi = dx.index_axis_mut(Axis(0), i);
        ndarray::Zip::from(&mut dxi).and(&g).and(&xh).for_each(|d, &gi, &xi| {
            *d = scale * (n * gi - sum_g - xi * sum_gx);
        });
    }
    dx
}

pub(crate) struct PoolCache {
    argmax: Vec<u32>,
    in_dims: (usize, usize, usize),
}

/// 2×2 max pooling, stride 2; ties resolve to the first element scanned.
pub(crate) fn maxpool2_forward<F: Scalar>(x: &Array3<F>) -> (Array3<F>, PoolCache) {
    let (ch, h, w) = x.dim();
    let (oh, ow) = (h / 2, w / 2);
    let mut y = Array3::<F>::zeros((ch, oh, ow));
    let mut argmax = vec![0u32; ch * oh * ow];
    let xs = x.as_slice().expect("standard layout");
    for ci in 0..ch {
        for oy in 0..oh {
            for ox in 0..ow {
                let mut best = F::neg_infinity();
                let mut best_idx = 0usize;
                for dy in 0..2 {
                    for dx in 0..2 {
                        let idx = ci * h * w + (oy * 2 + dy) * w + ox * 2 + dx;
                        if xs[idx] > best {
                            best = xs[idx];
                            best_idx = idx;
                        }
                    }
                }
                y[(ci, oy, ox)] = best;
                argmax[(ci * oh + oy) * ow + ox] = best_idx as u32;
            }
        }
    }
    (y, PoolCache { argmax, in_dims: (ch, h, w) })
}

pub(crate) fn maxpool2_backward<F: Scalar>(grad: &Array3<F>, cache: &PoolCache) -> Array3<F> {
    let mut dx = Array3::<F>::zeros(cache.in_dims);
    let dxs = dx.as_slice_mut().expect("freshly allocated");
    let gs = grad.as_slice().expect("standard layout");
    for (i, &src) in cache.argmax.iter().enumerate() {
        dxs[src as usize] = dxs[src as usize] + gs[i];
    }
    dx
}

/// Inverted-dropout mask: entries are 0 with probability `p`, else `1/(1−p)`.
pub(crate) fn dropout_mask<F: Scalar>(dims: (usize, usize, usize), p: f64, rng: &mut ChaCha8Rng) -> Array3<F> {
    let keep = c::<F>(1.0 / (1.0 - p));
    Array3::from_shape_simple_fn(dims, || if rng.random::<f64>() < p { F::zero() } else { keep })
}

pub(crate) fn dense_forward<F: Scalar>(x: &Array1<F>, w: &Array2<F>, b: &Array1<F>) -> Array1<F> {
    x.dot(w) + b
}

/// Accumulates dW/db and returns dx.
pub(crate) fn dense_backward<F: Scalar>(
    x: &Array1<F>,
    w: &Array2<F>,
    grad_y: &Array1<F>,
    dw: &mut Array2<F>,
    db: &mut Array1<F>,
) -> Array1<F> {
    let x2 = x.view().insert_axis(Axis(1));
    let g2 = grad_y.view().insert_axis(Axis(0));
    general_mat_mul(F::one(), &x2, &g2, F::one(), dw);
    *db += grad_y;
    w.dot(grad_y)
}

/// Numerically-stable softmax.
pub(crate) fn softmax<F: Scalar>(logits: &Array1<F>) -> Array1<F> {
    let max = logits.fold(F::neg_infinity(), |a, &b| a.max(b));
    let mut e = logits.mapv(|v| (v - max).exp());
    let sum = e.sum();
    e.mapv_inplace(|v| v / sum);
    e
}

/// Class-weighted cross-entropy on softmax probabilities.
///
/// Returns the loss and the gradient w.r.t. the logits, `w · (p − onehot)`.
pub(crate) fn weighted_ce<F: Scalar>(probs: &Array1<F>, label: usize, weight: F) -> (F, Array1<F>) {
    let floor = c::<F>(1e-12);
    let loss = -weight * probs[label].max(floor).ln();
    let mut dlogits = probs * weight;
    dlogits[label] = dlogits[label] - weight;
    (loss, dlogits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{arr1, arr2, Array};
    use rand::SeedableRng;

    fn seeded_array3(dims: (usize, usize, usize), seed: u64) -> Array3<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array::from_shape_simple_fn(dims, || rng.random_range(-1.0..1.0))
    }

    /// Direct (nested-loop) convolution as an independent oracle.
    fn conv_oracle(x: &Array3<f64>, w: &Array4<f64>, b: &Array1<f64>) -> Array3<f64> {
        let (cin, h, wd) = x.dim();
        let (cout, _, kh, kw) = w.dim();
        let mut out = Array3::<f64>::zeros((cout, h - kh + 1, wd - kw + 1));
        for co in 0..cout {
            for oy in 0..h - kh + 1 {
                for ox in 0..wd - kw + 1 {
                    let mut acc = b[co];
                    for ci in 0..cin {
                        for ky in 0..kh {
                            for kx in 0..kw {
                                acc += x[(ci, oy + ky, ox + kx)] * w[(co, ci, ky, kx)];
                            }
                        }
                    }
                    out[(co, oy, ox)] = acc;
                }
            }
        }
        out
    }

    #[test]
    fn conv_matches_direct_computation() {
        let x = seeded_array3((3, 9, 9), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = Array4::from_shape_simple_fn((4, 3, 3, 3), || rng.random_range(-1.0..1.0));
        let b = arr1(&[0.1, -0.2, 0.3, 0.0]);
        let (got, _) = conv_forward(&x, &w, &b);
        let want = conv_oracle(&x, &w, &b);
        assert_eq!(got.dim(), (4, 7, 7));
        for (g, w_) in got.iter().zip(want.iter()) {
            assert!((g - w_).abs() < 1e-12);
        }
    }

    #[test]
    fn conv_handles_rectangular_kernels() {
        let x = seeded_array3((2, 7, 8), 12);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let w = Array4::from_shape_simple_fn((3, 2, 4, 2), || rng.random_range(-1.0..1.0));
        let b = arr1(&[0.0, 0.5, -0.5]);
        let (got, _) = conv_forward(&x, &w, &b);
        let want = conv_oracle(&x, &w, &b);
        assert_eq!(got.dim(), (3, 4, 7));
        for (g, w_) in got.iter().zip(want.iter()) {
            assert!((g - w_).abs() < 1e-12);
        }
    }

    #[test]
    fn conv_gradients_match_finite_differences() {
        let x = seeded_array3((2, 6, 6), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut w = Array4::from_shape_simple_fn((3, 2, 3, 3), || rng.random_range(-0.5..0.5));
        let b = arr1(&[0.0, 0.1, -0.1]);
        // Scalar objective: sum of outputs weighted by a fixed random tensor.
        let probe = Array3::from_shape_simple_fn((3, 4, 4), || rng.random_range(-1.0..1.0));
        let loss = |x: &Array3<f64>, w: &Array4<f64>| -> f64 {
            let (y, _) = conv_forward(x, w, &b);
            (&y * &probe).sum()
        };

        let (_, cache) = conv_forward(&x, &w, &b);
        let mut dw = Array4::<f64>::zeros(w.dim());
        let mut db = Array1::<f64>::zeros(3);
        let dx = conv_backward(&probe, &cache, Some(&w), &mut dw, &mut db).unwrap();

        let eps = 1e-6;
        let mut x2 = x.clone();
        for &(i, j, k) in &[(0usize, 0usize, 0usize), (1, 3, 2), (0, 5, 5)] {
            let orig = x2[(i, j, k)];
            x2[(i, j, k)] = orig + eps;
            let lp = loss(&x2, &w);
            x2[(i, j, k)] = orig - eps;
            let lm = loss(&x2, &w);
            x2[(i, j, k)] = orig;
            assert!((dx[(i, j, k)] - (lp - lm) / (2.0 * eps)).abs() < 1e-8);
        }
        for &(o, i, j, k) in &[(0usize, 0usize, 0usize, 0usize), (2, 1, 2, 1), (1, 1, 0, 2)] {
            let orig = w[(o, i, j, k)];
            w[(o, i, j, k)] = orig + eps;
            let lp = loss(&x, &w);
            w[(o, i, j, k)] = orig - eps;
            let lm = loss(&x, &w);
            w[(o, i, j, k)] = orig;
            assert!((dw[(o, i, j, k)] - (lp - lm) / (2.0 * eps)).abs() < 1e-8);
        }
    }

    #[test]
    fn batch_norm_normalizes_and_backprops() {
        let x = seeded_array3((3, 5, 4), 7);
        let gamma = arr1(&[1.0, 2.0, 0.5]);
        let beta = arr1(&[0.0, -1.0, 0.25]);
        let (y, cache) = bn_forward_train(&x, &gamma, &beta);
        // Per-channel: mean(y) = beta, var(y) ≈ gamma².
        for ci in 0..3 {
            let plane = y.index_axis(Axis(0), ci);
            let m = plane.mean().unwrap();
            assert!((m - beta[ci]).abs() < 1e-9, "channel {ci} mean {m}");
        }

        // Gradient check against finite differences through the full bn.
        let probe = seeded_array3((3, 5, 4), 8);
        let mut dgamma = Array1::<f64>::zeros(3);
        let mut dbeta = Array1::<f64>::zeros(3);
        let dx = bn_backward(&probe, &cache, &gamma, &mut dgamma, &mut dbeta);
        let eps = 1e-6;
        let mut x2 = x.clone();
        for &(i, j, k) in &[(0usize, 0usize, 0usize), (2, 4, 3), (1, 2, 1)] {
            let orig = x2[(i, j, k)];
            x2[(i, j, k)] = orig + eps;
            let lp = (&bn_forward_train(&x2, &gamma, &beta).0 * &probe).sum();
            x2[(i, j, k)] = orig - eps;
            let lm = (&bn_forward_train(&x2, &gamma, &beta).0 * &probe).sum();
            x2[(i, j, k)] = orig;
            let numeric = (lp - lm) / (2.0 * eps);
            assert!((dx[(i, j, k)] - numeric).abs() < 1e-7, "dx mismatch at {:?}", (i, j, k));
        }
    }

    #[test]
    fn inference_bn_uses_running_moments() {
        let x = seeded_array3((2, 4, 4), 9);
        let gamma = arr1(&[1.0, 1.0]);
        let beta = arr1(&[0.0, 0.0]);
        let rm = arr1(&[0.25, -0.5]);
        let rv = arr1(&[4.0, 1.0]);
        let y = bn_forward_infer(&x, &gamma, &beta, &rm, &rv);
        let want = (x[(0, 1, 2)] - 0.25) / (4.0 + BN_EPS).sqrt();
        assert!((y[(0, 1, 2)] - want).abs() < 1e-12);
    }

    #[test]
    fn maxpool_selects_maxima_and_routes_gradients() {
        let mut x = Array3::<f64>::zeros((1, 4, 4));
        for i in 0..4 {
            for j in 0..4 {
                x[(0, i, j)] = (i * 4 + j) as f64;
            }
        }
        let (y, cache) = maxpool2_forward(&x);
        assert_eq!(y.index_axis(Axis(0), 0), arr2(&[[5.0, 7.0], [13.0, 15.0]]));
        let mut grad = Array3::<f64>::zeros((1, 2, 2));
        grad[(0, 0, 1)] = 3.0;
        let dx = maxpool2_backward(&grad, &cache);
        assert_eq!(dx[(0, 1, 3)], 3.0);
        assert_eq!(dx.sum(), 3.0);
    }

    #[test]
    fn dropout_mask_is_seeded_and_scaled() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m: Array3<f64> = dropout_mask((4, 20, 20), 0.25, &mut rng);
        let zeros = m.iter().filter(|&&v| v == 0.0).count();
        let keep = 1.0 / 0.75;
        assert!(m.iter().all(|&v| v == 0.0 || (v - keep).abs() < 1e-12));
        // ~25% zeros, loosely.
        let rate = zeros as f64 / m.len() as f64;
        assert!((0.15..0.35).contains(&rate), "drop rate {rate}");
        let mut rng2 = ChaCha8Rng::seed_from_u64(5);
        let m2: Array3<f64> = dropout_mask((4, 20, 20), 0.25, &mut rng2);
        assert_eq!(m, m2);
    }

    #[test]
    fn dense_and_softmax_gradients_check_out() {
        let x = arr1(&[0.5, -1.0, 2.0]);
        let w = arr2(&[[0.1, -0.2], [0.3, 0.4], [-0.5, 0.6]]);
        let b = arr1(&[0.05, -0.05]);
        let weight = 1.7;
        let label = 1usize;
        let loss_of = |w: &Array2<f64>, x: &Array1<f64>| {
            let p = softmax(&dense_forward(x, w, &b));
            -weight * p[label].ln()
        };
        let logits = dense_forward(&x, &w, &b);
        let probs = softmax(&logits);
        assert!((probs.sum() - 1.0).abs() < 1e-12);
        let (_, dlogits) = weighted_ce(&probs, label, weight);
        let mut dw = Array2::<f64>::zeros(w.dim());
        let mut db = Array1::<f64>::zeros(2);
        let dx = dense_backward(&x, &w, &dlogits, &mut dw, &mut db);

        let eps = 1e-7;
        let mut w2 = w.clone();
        for i in 0..3 {
            for j in 0..2 {
                let orig = w2[(i, j)];
                w2[(i, j)] = orig + eps;
                let lp = loss_of(&w2, &x);
                w2[(i, j)] = orig - eps;
                let lm = loss_of(&w2, &x);
                w2[(i, j)] = orig;
                assert!((dw[(i, j)] - (lp - lm) / (2.0 * eps)).abs() < 1e-6);
            }
        }
        let mut x2 = x.clone();
        for i in 0..3 {
            let orig = x2[i];
            x2[i] = orig + eps;
            let lp = loss_of(&w, &x2);
            x2[i] = orig - eps;
            let lm = loss_of(&w, &x2);
            x2[i] = orig;
            assert!((dx[i] - (lp - lm) / (2.0 * eps)).abs() < 1e-6);
        }
    }
}
