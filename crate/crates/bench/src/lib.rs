//! Benchmark-only crate; see `benches/core_paths.rs`.
//!
//! Small helpers shared by the benchmark targets live here so the bench
//! files stay declarative.

use nalgebra::DVector;

/// Orthonormal Bob vectors and the parallel Alice side used by the
/// witness-point benchmarks.
pub fn witness_vectors(m: usize) -> (Vec<DVector<f64>>, Vec<DVector<f64>>) {
    let b: Vec<DVector<f64>> =
        (0..m).map(|k| DVector::from_fn(m, |i, _| if i == k { 1.0 } else { 0.0 })).collect();
    let s: DVector<f64> = b.iter().sum();
    let a: Vec<DVector<f64>> = (0..m).map(|i| &s * (2.0 / m as f64) - &b[i]).collect();
    (a, b)
}
