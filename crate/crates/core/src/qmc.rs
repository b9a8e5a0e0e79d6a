//! Randomly shifted Halton points for integrating over boxes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BASES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    r
}

/// The `i`-th Halton point in `[0, 1)^dim` (skipping the origin).
pub fn halton(i: u64, dim: usize) -> Vec<f64> {
    assert!(dim <= BASES.len(), "Halton points limited to {} dimensions", BASES.len());
    BASES[..dim].iter().map(|&b| radical_inverse(i + 1, b)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct QmcEstimate {
    pub mean: f64,
    /// Standard error across the independent shifts.
    pub err: f64,
}

/// Estimate `int_{[0,1)^dim} f` with `shifts` Cranley-Patterson rotations of
/// `points` Halton points each.
pub fn integrate(f: impl Fn(&[f64]) -> f64, dim: usize, points: u64, shifts: usize, seed: u64) -> QmcEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base: Vec<Vec<f64>> = (0..points).map(|i| halton(i, dim)).collect();
    let mut means = Vec::with_capacity(shifts);
    let mut x = vec![0.0; dim];
    for _ in 0..shifts {
        let shift: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
        let mut s = 0.0;
        for p in &base {
            for k in 0..dim {
                let v = p[k] + shift[k];
                x[k] = if v >= 1.0 { v - 1.0 } else { v };
            }
            s += f(&x);
        }
        means.push(s / points as f64);
    }
    let mean = means.iter().sum::<f64>() / shifts as f64;
    let err = if shifts > 1 {
        let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (shifts - 1) as f64;
        (var / shifts as f64).sqrt()
    } else {
        f64::NAN
    };
    QmcEstimate { mean, err }
}

/// Shift vectors for callers that drive the point loop themselves.
pub fn shifts(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect()).collect()
}
