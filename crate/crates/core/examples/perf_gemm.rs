//! Temporary GEMM-shape probe: where do the spatial milliseconds go?

use std::time::Instant;

use ndarray::linalg::general_mat_mul;
use ndarray::Array2;

fn time_gemm(m: usize, k: usize, n: usize, reps: usize) {
    let a = Array2::<f32>::from_elem((m, k), 0.5);
    let b = Array2::<f32>::from_elem((k, n), 0.25);
    let mut c = Array2::<f32>::zeros((m, n));
    let t = Instant::now();
    for _ in 0..reps {
        general_mat_mul(1.0, &a, &b, 0.0, &mut c);
    }
    let secs = t.elapsed().as_secs_f64() / reps as f64;
    let flops = 2.0 * (m * k * n) as f64;
    println!("GEMM {m}x{k} * {k}x{n}: {:.3} ms  ({:.2} GFLOP/s)", secs * 1e3, flops / secs / 1e9);
}

fn main() {
    println!("-- conv1 orientation: positions x k --");
    time_gemm(3844, 27, 8, 200);
    println!("-- conv1 transposed: cout x positions --");
    time_gemm(8, 27, 3844, 200);
    println!("-- conv2 orientation --");
    time_gemm(484, 800, 16, 200);
    println!("-- conv2 transposed --");
    time_gemm(16, 800, 484, 200);
    println!("-- conv2 batched 10 frames --");
    time_gemm(4840, 800, 16, 40);
    println!("-- gru-ish: 1x1936 * 1936x32 --");
    time_gemm(1, 1936, 32, 2000);
}
