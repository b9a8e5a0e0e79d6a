use num_complex::Complex64;

use super::MultFn;
use crate::error::{Error, Result};
use crate::sieve::smallest_prime_factors;

/// Exponent shifts `sigma` for the reported sums `sum |eta(n)| n^{-(1/2 + sigma)}`.
pub const INVERSION_SIGMAS: [f64; 2] = [0.1, 0.25];

/// `beta = beta_hat * eta` with `beta_hat` the completely multiplicative
/// function agreeing with `beta` on primes.
#[derive(Clone, Debug, PartialEq)]
pub struct Inversion {
    pub beta_hat: MultFn,
    pub eta: MultFn,
    pub max_abs_eta: f64,
    /// `(sigma, sum_{n <= X} |eta(n)| n^{-(1/2 + sigma)})`.
    pub sums: Vec<(f64, f64)>,
}

fn conv_exact(a: &[i64], b: &[i64]) -> Vec<i64> {
    let x = a.len() - 1;
    let mut out = vec![0i64; x + 1];
    for d in 1..=x {
        if a[d] == 0 {
            continue;
        }
        for (k, m) in (d..=x).step_by(d).enumerate() {
            out[m] += a[d] * b[k + 1];
        }
    }
    out
}

fn conv_complex(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let x = a.len() - 1;
    let mut out = vec![Complex64::new(0.0, 0.0); x + 1];
    for d in 1..=x {
        if a[d] == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (k, m) in (d..=x).step_by(d).enumerate() {
            out[m] += a[d] * b[k + 1];
        }
    }
    out
}

/// Tables of `beta_hat` and `eta = beta * (mu beta_hat)` on `[1, X]`.
///
/// `beta` must be multiplicative; the identity `beta = beta_hat * eta` is
/// then re-checked on the whole range (exactly for integer tables).
pub fn dirichlet_inversion(beta: &MultFn, x: u64) -> Result<Inversion> {
    beta.ensure_covers(x)?;
    let t = truncate(beta, x);
    t.check_multiplicative()?;
    let spf = smallest_prime_factors(x as usize);
    let xs = x as usize;

    let (beta_hat, eta) = if let Some(b) = t.exact_table() {
        let mut hat = vec![0i64; xs + 1];
        let mut mu_hat = vec![0i64; xs + 1];
        if xs >= 1 {
            hat[1] = 1;
            mu_hat[1] = 1;
        }
        for n in 2..=xs {
            let p = spf[n] as usize;
            hat[n] = hat[n / p] * b[p];
            mu_hat[n] = if (n / p) % p == 0 { 0 } else { -mu_hat[n / p] * b[p] };
        }
        let eta = conv_exact(b, &mu_hat);
        if conv_exact(&hat, &eta) != b {
            let bad = (1..=xs).find(|&n| conv_exact(&hat, &eta)[n] != b[n]).unwrap_or(0);
            return Err(Error::NotMultiplicative(bad as u64));
        }
        (MultFn::from_int_table(hat[1..].to_vec()), MultFn::from_int_table(eta[1..].to_vec()))
    } else {
        let b: Vec<Complex64> = (0..=x).map(|n| if n == 0 { Complex64::new(0.0, 0.0) } else { t.get(n) }).collect();
        let zero = Complex64::new(0.0, 0.0);
        let mut hat = vec![zero; xs + 1];
        let mut mu_hat = vec![zero; xs + 1];
        if xs >= 1 {
            hat[1] = Complex64::new(1.0, 0.0);
            mu_hat[1] = hat[1];
        }
        for n in 2..=xs {
            let p = spf[n] as usize;
            hat[n] = hat[n / p] * b[p];
            mu_hat[n] = if (n / p) % p == 0 { zero } else { -mu_hat[n / p] * b[p] };
        }
        let eta = conv_complex(&b, &mu_hat);
        let back = conv_complex(&hat, &eta);
        if let Some(n) = (1..=xs).find(|&n| (back[n] - b[n]).norm() > 1e-8) {
            return Err(Error::NotMultiplicative(n as u64));
        }
        (MultFn::from_table(hat[1..].to_vec()), MultFn::from_table(eta[1..].to_vec()))
    };

    let max_abs_eta = (1..=x).map(|n| eta.get(n).norm()).fold(0.0, f64::max);
    let sums = INVERSION_SIGMAS
        .iter()
        .map(|&s| (s, (1..=x).map(|n| eta.get(n).norm() * (n as f64).powf(-(0.5 + s))).sum()))
        .collect();
    Ok(Inversion { beta_hat, eta, max_abs_eta, sums })
}

fn truncate(beta: &MultFn, x: u64) -> MultFn {
    if beta.x() == x {
        return beta.clone();
    }
    match beta.exact_table() {
        Some(e) => MultFn::from_int_table(e[1..=x as usize].to_vec()),
        None => MultFn::from_table((1..=x).map(|n| beta.get(n)).collect()),
    }
}
