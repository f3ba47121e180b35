//! Seeded instance generators. All generators are deterministic given the
//! RNG state, so a recorded seed reproduces a whole run.

use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dense::DenseMatrix;
use crate::fubini_study::ChartPoint;
use crate::rank1::Rank1System;
use crate::scalar::Scalar;
use crate::text::rational;

/// Entries of the integer instance family lie in `[-ENTRY_BOUND, ENTRY_BOUND]`.
pub const ENTRY_BOUND: i64 = 9;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn int_vec<T: Scalar>(rng: &mut impl Rng, n: usize, nonzero: bool) -> Vec<T> {
    (0..n)
        .map(|_| loop {
            let v = rng.random_range(-ENTRY_BOUND..=ENTRY_BOUND);
            if !nonzero || v != 0 {
                break T::from_i64(v);
            }
        })
        .collect()
}

/// `x`, `a`, `b` uniform integers in `[-9, 9]`.
pub fn random_int_rank1<T: Scalar>(rng: &mut impl Rng, n: usize) -> Rank1System<T> {
    let x = int_vec(rng, n, false);
    let a = int_vec(rng, n, false);
    let b = int_vec(rng, n, false);
    Rank1System::new(x, a, b).expect("equal lengths")
}

/// Same family with every `x_k`, `a_k`, `b_k` nonzero.
pub fn random_int_rank1_nonzero<T: Scalar>(rng: &mut impl Rng, n: usize) -> Rank1System<T> {
    let x = int_vec(rng, n, true);
    let a = int_vec(rng, n, true);
    let b = int_vec(rng, n, true);
    Rank1System::new(x, a, b).expect("equal lengths")
}

pub fn random_int_dense<T: Scalar>(rng: &mut impl Rng, n: usize) -> DenseMatrix<T> {
    DenseMatrix::from_fn(n, |_, _| {
        T::from_i64(rng.random_range(-ENTRY_BOUND..=ENTRY_BOUND))
    })
}

/// Well-conditioned real system: `x_k` in `[1, 2]`, `a_k`, `b_k` in
/// `[-1, 1] / sqrt(n)`, so the dense matrix is a small perturbation of a
/// diagonal with entries at least 1.
pub fn random_well_conditioned(rng: &mut impl Rng, n: usize) -> Rank1System<f64> {
    let scale = 1.0 / (n.max(1) as f64).sqrt();
    let x = (0..n).map(|_| rng.random_range(1.0..=2.0)).collect();
    let a = (0..n)
        .map(|_| scale * rng.random_range(-1.0..=1.0))
        .collect();
    let b = (0..n)
        .map(|_| scale * rng.random_range(-1.0..=1.0))
        .collect();
    Rank1System::new(x, a, b).expect("equal lengths")
}

/// Uniform in the Euclidean ball `|z| <= radius` of `C^n`.
pub fn random_point_in_ball(rng: &mut impl Rng, n: usize, radius: f64) -> ChartPoint<f64> {
    let w: Vec<f64> = (0..2 * n).map(|_| StandardNormal.sample(rng)).collect();
    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    let r = radius * rng.random::<f64>().powf(1.0 / (2 * n) as f64);
    let z = w
        .chunks_exact(2)
        .map(|c| Complex64::new(c[0], c[1]) * (r / norm))
        .collect();
    ChartPoint::new(z)
}

/// Each coordinate uniform in the disk `|z_i| <= radius`.
pub fn random_point_in_polydisk(rng: &mut impl Rng, n: usize, radius: f64) -> ChartPoint<f64> {
    let z = (0..n)
        .map(|_| {
            let r = radius * rng.random::<f64>().sqrt();
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            Complex64::from_polar(r, theta)
        })
        .collect();
    ChartPoint::new(z)
}

/// Gaussian-rational point with parts `p/q`, `|p| <= 9`, `1 <= q <= 9`.
pub fn random_rational_point(rng: &mut impl Rng, n: usize) -> ChartPoint<BigRational> {
    let mut part = || rational(rng.random_range(-9..=9), rng.random_range(1..=9));
    let z = (0..n).map(|_| Complex::new(part(), part())).collect();
    ChartPoint::new(z)
}
