//! Shared fixtures for the criterion benchmarks.
//!
//! The benchmark executables live in `benches/`; this library only
//! provides deterministic problem construction so every run measures
//! the same instances.

use ndarray::Array2;
use stiefel_log::probgen::{pair_with_distance, random_stiefel, GeneratorSpec};
use stiefel_log::rng::SplitMix64;
use stiefel_log::solver::{GeodesicProblem, SolverOptions};

pub use stiefel_log::ndarray;

/// Deterministic dense square matrix with entries of magnitude `scale`.
pub fn random_square(n: usize, scale: f64, seed: u64) -> Array2<f64> {
    let mut rng = SplitMix64::new(seed);
    let mut a = Array2::zeros((n, n));
    for v in a.iter_mut() {
        *v = scale * rng.next_normal();
    }
    a
}

/// Deterministic skew-symmetric matrix with Frobenius norm `norm`.
pub fn random_skew(n: usize, norm: f64, seed: u64) -> Array2<f64> {
    let g = random_square(n, 1.0, seed);
    let mut s = &g - &g.t();
    let f = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    if f > 0.0 {
        s *= norm / f;
    }
    s
}

/// Deterministic tall matrix for factorization benchmarks.
pub fn random_tall(n: usize, p: usize, seed: u64) -> Array2<f64> {
    let mut rng = SplitMix64::new(seed);
    let mut a = Array2::zeros((n, p));
    for v in a.iter_mut() {
        *v = rng.next_normal();
    }
    a
}

/// Deterministic orthonormal point on St(n, p).
pub fn stiefel_point(n: usize, p: usize, seed: u64) -> Array2<f64> {
    let mut rng = SplitMix64::new(seed);
    random_stiefel(n, p, &mut rng)
        .expect("random Stiefel point")
        .into_matrix()
}

/// A planted geodesic endpoint problem at canonical distance `d`.
pub fn planted_problem(
    n: usize,
    p: usize,
    d: f64,
    options: SolverOptions,
    seed: u64,
) -> GeodesicProblem {
    let spec = GeneratorSpec {
        n,
        p,
        seed,
        trials: 1,
    };
    pair_with_distance(&spec, 0, d, options)
        .expect("planted pair")
        .problem
}
