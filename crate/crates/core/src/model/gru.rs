//! Gated recurrent unit over a fixed-length sequence of frame embeddings.
//!
//! Gate convention (update `z`, reset `r`, candidate `n`):
//!
//! ```text
//! z = σ(x·Wz + h·Uz + bz)
//! r = σ(x·Wr + h·Ur + br)
//! n = tanh(x·Wn + r ⊙ (h·Un) + bn)
//! h' = (1 − z) ⊙ n + z ⊙ h
//! ```
//!
//! The initial state is zero and the sequence is summarized by the final
//! hidden state, so backpropagation seeds only `dh_T` and unrolls in reverse.

use super::{GruParams, Scalar};
use ndarray::linalg::general_mat_mul;
use ndarray::{Array1, Array2, ArrayView2, Axis};

fn sigmoid<F: Scalar>(v: F) -> F {
    F::one() / (F::one() + (-v).exp())
}

pub(crate) struct GruCache<F> {
    /// Hidden states h_0..h_T (row 0 is the zero initial state).
    pub hs: Array2<F>,
    zs: Array2<F>,
    rs: Array2<F>,
    ns: Array2<F>,
    /// The pre-reset recurrent term h·Un, needed for the reset-gate gradient.
    huns: Array2<F>,
}

/// One recurrence step from pre-projected gate inputs `x·Wz`, `x·Wr`, `x·Wn`.
/// Returns `(z, r, n, h·Un, h_next)`.
fn gate_step<F: Scalar>(
    xz: Array1<F>,
    xr: Array1<F>,
    xn: Array1<F>,
    h: &Array1<F>,
    p: &GruParams<F>,
) -> (Array1<F>, Array1<F>, Array1<F>, Array1<F>, Array1<F>) {
    let one = F::one();
    let z = (xz + h.dot(&p.uz) + &p.bz).mapv_into(sigmoid);
    let r = (xr + h.dot(&p.ur) + &p.br).mapv_into(sigmoid);
    let hun = h.dot(&p.un);
    let n = (xn + &(&r * &hun) + &p.bn).mapv_into(F::tanh);
    let h_next = ndarray::Zip::from(&n).and(&z).and(h).map_collect(|&nn, &zz, &hh| (one - zz) * nn + zz * hh);
    (z, r, n, hun, h_next)
}

pub(crate) fn gru_forward<F: Scalar>(xs: ArrayView2<F>, p: &GruParams<F>) -> (Array1<F>, GruCache<F>) {
    let (t_len, _) = xs.dim();
    let hidden = p.bz.len();
    let mut hs = Array2::<F>::zeros((t_len + 1, hidden));
    let mut zs = Array2::<F>::zeros((t_len, hidden));
    let mut rs = Array2::<F>::zeros((t_len, hidden));
    let mut ns = Array2::<F>::zeros((t_len, hidden));
    let mut huns = Array2::<F>::zeros((t_len, hidden));

    let mut h = Array1::<F>::zeros(hidden);
    for t in 0..t_len {
        let x = xs.row(t);
        let (z, r, n, hun, h_next) = gate_step(x.dot(&p.wz), x.dot(&p.wr), x.dot(&p.wn), &h, p);
        zs.row_mut(t).assign(&z);
        rs.row_mut(t).assign(&r);
        ns.row_mut(t).assign(&n);
        huns.row_mut(t).assign(&hun);
        hs.row_mut(t + 1).assign(&h_next);
        h = h_next;
    }
    (h, GruCache { hs, zs, rs, ns, huns })
}

/// Final hidden state of every length-`window` slice of a pre-projected
/// sequence, each started from a zero state.
///
/// `pz`, `pr`, `pn` are the gate input projections `X·Wz`, `X·Wr`, `X·Wn` of
/// the full sequence, computed once by the caller as three large
/// matrix-matrix products; the sweep then only pays for the
/// hidden-by-hidden recurrence per window, which makes classifying every
/// overlapping window of a long recording linear in its length for the
/// expensive input projection.
pub(crate) fn gru_sweep<F: Scalar>(
    pz: &Array2<F>,
    pr: &Array2<F>,
    pn: &Array2<F>,
    window: usize,
    p: &GruParams<F>,
) -> Array2<F> {
    let (n_steps, hidden) = pz.dim();
    assert!(window >= 1 && n_steps >= window, "sweep needs at least one full window");
    assert_eq!(pz.dim(), pr.dim());
    assert_eq!(pz.dim(), pn.dim());

    let n_windows = n_steps - window + 1;
    let mut out = Array2::<F>::zeros((n_windows, hidden));
    for s in 0..n_windows {
        let mut h = Array1::<F>::zeros(hidden);
        for t in s..s + window {
            let (_, _, _, _, h_next) =
                gate_step(pz.row(t).to_owned(), pr.row(t).to_owned(), pn.row(t).to_owned(), &h, p);
            h = h_next;
        }
        out.row_mut(s).assign(&h);
    }
    out
}

/// Unrolls gradients from the final hidden state; accumulates parameter
/// gradients into `g` and returns gradients w.r.t. the input rows.
pub(crate) fn gru_backward<F: Scalar>(
    dh_last: &Array1<F>,
    xs: ArrayView2<F>,
    cache: &GruCache<F>,
    p: &GruParams<F>,
    g: &mut GruParams<F>,
) -> Array2<F> {
    let (t_len, in_dim) = xs.dim();
    let mut dxs = Array2::<F>::zeros((t_len, in_dim));
    let mut dh = dh_last.clone();
    let one = F::one();

    for t in (0..t_len).rev() {
        let x = xs.row(t);
        let h_prev = cache.hs.row(t);
        let z = cache.zs.row(t);
        let r = cache.rs.row(t);
        let n = cache.ns.row(t);
        let hun = cache.huns.row(t);

        // h' = (1−z)⊙n + z⊙h_prev
        let dz = ndarray::Zip::from(&dh).and(&h_prev).and(&n).map_collect(|&d, &hp, &nn| d * (hp - nn));
        let dn = ndarray::Zip::from(&dh).and(&z).map_collect(|&d, &zz| d * (one - zz));
        let mut dh_prev = ndarray::Zip::from(&dh).and(&z).map_collect(|&d, &zz| d * zz);

        let dn_pre = ndarray::Zip::from(&dn).and(&n).map_collect(|&d, &nn| d * (one - nn * nn));
        let dr = &dn_pre * &hun;
        let dhun = &dn_pre * &r;
        let dz_pre = ndarray::Zip::from(&dz).and(&z).map_collect(|&d, &zz| d * zz * (one - zz));
        let dr_pre = ndarray::Zip::from(&dr).and(&r).map_collect(|&d, &rr| d * rr * (one - rr));

        let x2 = x.insert_axis(Axis(1));
        let h2 = h_prev.insert_axis(Axis(1));
        general_mat_mul(one, &x2, &dz_pre.view().insert_axis(Axis(0)), one, &mut g.wz);
        general_mat_mul(one, &x2, &dr_pre.view().insert_axis(Axis(0)), one, &mut g.wr);
        general_mat_mul(one, &x2, &dn_pre.view().insert_axis(Axis(0)), one, &mut g.wn);
        general_mat_mul(one, &h2, &dz_pre.view().insert_axis(Axis(0)), one, &mut g.uz);
        general_mat_mul(one, &h2, &dr_pre.view().insert_axis(Axis(0)), one, &mut g.ur);
        general_mat_mul(one, &h2, &dhun.view().insert_axis(Axis(0)), one, &mut g.un);
        g.bz += &dz_pre;
        g.br += &dr_pre;
        g.bn += &dn_pre;

        let mut dx = p.wz.dot(&dz_pre);
        dx += &p.wr.dot(&dr_pre);
        dx += &p.wn.dot(&dn_pre);
        dxs.row_mut(t).assign(&dx);

        dh_prev += &p.uz.dot(&dz_pre);
        dh_prev += &p.ur.dot(&dr_pre);
        dh_prev += &p.un.dot(&dhun);
        dh = dh_prev;
    }
    dxs
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{arr1, arr2, Array};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small_params() -> GruParams<f64> {
        GruParams {
            wz: arr2(&[[0.1, 0.2], [0.3, 0.4]]),
            wr: arr2(&[[-0.2, 0.1], [0.2, -0.1]]),
            wn: arr2(&[[0.5, -0.3], [0.1, 0.2]]),
            uz: arr2(&[[0.5, -0.5], [0.25, 0.25]]),
            ur: arr2(&[[0.1, 0.0], [0.0, 0.1]]),
            un: arr2(&[[0.3, 0.2], [-0.1, 0.4]]),
            bz: arr1(&[0.0, 0.1]),
            br: arr1(&[0.05, -0.05]),
            bn: arr1(&[0.0, 0.0]),
        }
    }

    /// Scalar re-implementation of one step, written independently of the
    /// vectorized code, evaluated from a fresh zero state.
    fn step_oracle(p: &GruParams<f64>, x: [f64; 2], h: [f64; 2]) -> [f64; 2] {
        let sig = |v: f64| 1.0 / (1.0 + (-v).exp());
        let mut out = [0.0; 2];
        for j in 0..2 {
            let z = sig(x[0] * p.wz[(0, j)] + x[1] * p.wz[(1, j)] + h[0] * p.uz[(0, j)] + h[1] * p.uz[(1, j)] + p.bz[j]);
            let r = sig(x[0] * p.wr[(0, j)] + x[1] * p.wr[(1, j)] + h[0] * p.ur[(0, j)] + h[1] * p.ur[(1, j)] + p.br[j]);
            let hun = h[0] * p.un[(0, j)] + h[1] * p.un[(1, j)];
            let n = (x[0] * p.wn[(0, j)] + x[1] * p.wn[(1, j)] + r * hun + p.bn[j]).tanh();
            out[j] = (1.0 - z) * n + z * h[j];
        }
        out
    }

    #[test]
    fn single_step_matches_hand_computation() {
        let p = small_params();
        let xs = arr2(&[[1.0, 0.5]]);
        let (h, cache) = gru_forward(xs.view(), &p);

        // From zero state: z = σ(x·Wz + bz) = σ([0.25, 0.4] + [0.0, 0.1]),
        // n = tanh(x·Wn) (reset term vanishes), h = (1−z)⊙n.
        assert!((cache.zs[(0, 0)] - 0.5622).abs() < 1e-4);
        assert!((cache.zs[(0, 1)] - 0.6225).abs() < 1e-4);
        let n0 = (1.0f64 * 0.5 + 0.5 * 0.1).tanh(); // 0.5005
        let n1 = (1.0f64 * -0.3 + 0.5 * 0.2).tanh(); // -0.1974
        assert!((cache.ns[(0, 0)] - n0).abs() < 1e-12);
        assert!((cache.ns[(0, 1)] - n1).abs() < 1e-12);
        let want = step_oracle(&p, [1.0, 0.5], [0.0, 0.0]);
        assert!((h[0] - want[0]).abs() < 1e-12);
        assert!((h[1] - want[1]).abs() < 1e-12);
    }

    #[test]
    fn multi_step_matches_scalar_oracle() {
        let p = small_params();
        let xs = arr2(&[[1.0, 0.5], [-0.4, 0.2], [0.3, -0.8]]);
        let (h, _) = gru_forward(xs.view(), &p);
        let mut hh = [0.0, 0.0];
        for t in 0..3 {
            hh = step_oracle(&p, [xs[(t, 0)], xs[(t, 1)]], hh);
        }
        assert!((h[0] - hh[0]).abs() < 1e-12);
        assert!((h[1] - hh[1]).abs() < 1e-12);
    }

    #[test]
    fn sweep_matches_per_window_forward() {
        let p = small_params();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs = Array::from_shape_simple_fn((9, 2), || rng.random_range(-1.0..1.0));
        let pz = xs.dot(&p.wz);
        let pr = xs.dot(&p.wr);
        let pn = xs.dot(&p.wn);
        for window in [1usize, 4, 9] {
            let swept = gru_sweep(&pz, &pr, &pn, window, &p);
            assert_eq!(swept.dim(), (9 - window + 1, 2));
            for s in 0..swept.nrows() {
                let (h, _) = gru_forward(xs.slice(ndarray::s![s..s + window, ..]), &p);
                for j in 0..2 {
                    assert!((swept[(s, j)] - h[j]).abs() < 1e-12, "window {window} start {s}");
                }
            }
        }
    }

    #[test]
    fn backward_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut sample = |d: (usize, usize)| Array::from_shape_simple_fn(d, || rng.random_range(-0.5..0.5));
        let mut p = GruParams::<f64> {
            wz: sample((3, 2)),
            wr: sample((3, 2)),
            wn: sample((3, 2)),
            uz: sample((2, 2)),
            ur: sample((2, 2)),
            un: sample((2, 2)),
            bz: arr1(&[0.1, -0.1]),
            br: arr1(&[0.0, 0.2]),
            bn: arr1(&[-0.2, 0.0]),
        };
        let mut xs = Array::from_shape_simple_fn((4, 3), || rng.random_range(-1.0..1.0));
        let probe = arr1(&[0.7, -1.3]);
        let loss = |p: &GruParams<f64>, xs: &Array2<f64>| gru_forward(xs.view(), p).0.dot(&probe);

        let (_, cache) = gru_forward(xs.view(), &p);
        let mut g = GruParams::<f64>::zeros(3, 2);
        let dxs = gru_backward(&probe, xs.view(), &cache, &p, &mut g);

        let eps = 1e-6;
        // Inputs at every position.
        for t in 0..4 {
            for i in 0..3 {
                let orig = xs[(t, i)];
                xs[(t, i)] = orig + eps;
                let lp = loss(&p, &xs);
                xs[(t, i)] = orig - eps;
                let lm = loss(&p, &xs);
                xs[(t, i)] = orig;
                let numeric = (lp - lm) / (2.0 * eps);
                assert!((dxs[(t, i)] - numeric).abs() < 1e-8, "dx[{t},{i}]");
            }
        }
        // A few entries in every parameter tensor.
        macro_rules! check2 {
            ($field:ident) => {
                for idx in [(0usize, 0usize), (1, 1), (0, 1)] {
                    let orig = p.$field[idx];
                    p.$field[idx] = orig + eps;
                    let lp = loss(&p, &xs);
                    p.$field[idx] = orig - eps;
                    let lm = loss(&p, &xs);
                    p.$field[idx] = orig;
                    let numeric = (lp - lm) / (2.0 * eps);
                    assert!((g.$field[idx] - numeric).abs() < 1e-8, concat!(stringify!($field), " {:?}"), idx);
                }
            };
        }
        check2!(wz);
        check2!(wr);
        check2!(wn);
        check2!(uz);
        check2!(ur);
        check2!(un);
        for idx in [0usize, 1] {
            for field in 0..3 {
                let b = match field {
                    0 => &mut p.bz,
                    1 => &mut p.br,
                    _ => &mut p.bn,
                };
                let orig = b[idx];
                b[idx] = orig + eps;
                let lp = loss(&p, &xs);
                match field {
                    0 => p.bz[idx] = orig - eps,
                    1 => p.br[idx] = orig - eps,
                    _ => p.bn[idx] = orig - eps,
                }
                let lm = loss(&p, &xs);
                match field {
                    0 => p.bz[idx] = orig,
                    1 => p.br[idx] = orig,
                    _ => p.bn[idx] = orig,
                }
                let g_val = match field {
                    0 => g.bz[idx],
                    1 => g.br[idx],
                    _ => g.bn[idx],
                };
                assert!((g_val - (lp - lm) / (2.0 * eps)).abs() < 1e-8);
            }
        }
    }
}
