use bitvec::prelude::*;
use num_complex::Complex64;
use num_rational::Ratio;

use super::primes_up_to;
use crate::error::{Error, Result};

pub type Bits = BitVec<u64, Lsb0>;

/// `(log P_r, log Q_r)` with
/// `log P_r = r^{4r} (log Q_1)^{r-1} log P_1` and `log Q_r = r^{4r+2} (log Q_1)^r`.
///
/// Computed through the logarithms of the exponents, so the result is `+inf`
/// rather than NaN once it overflows.
pub fn pq_log(p1: f64, q1: f64, r: u32) -> (f64, f64) {
    if r == 1 {
        return (p1.ln(), q1.ln());
    }
    let r = r as f64;
    let (lp, lq) = (p1.ln(), q1.ln());
    let a = 4.0 * r * r.ln() + (r - 1.0) * lq.ln() + lp.ln();
    let b = (4.0 * r + 2.0) * r.ln() + r * lq.ln();
    (a.exp(), b.exp())
}

/// `(P_r, Q_r)`, saturating to `+inf`.
pub fn pq_sequence(p1: f64, q1: f64, r: u32) -> (f64, f64) {
    if r == 1 {
        return (p1, q1);
    }
    let (a, b) = pq_log(p1, q1, r);
    (a.exp(), b.exp())
}

/// Largest `r` with `Q_r <= exp(sqrt(log N) / 2)`, or 0 if there is none.
pub fn r_plus(p1: f64, q1: f64, n_len: u64) -> u32 {
    let cap = (n_len as f64).ln().sqrt() / 2.0;
    let mut r = 0;
    while r < 64 && pq_log(p1, q1, r + 1).1 <= cap {
        r += 1;
    }
    r
}

fn primes_in(lo: f64, hi: f64, all: &[u64]) -> Vec<u64> {
    all.iter().copied().filter(|&p| p as f64 >= lo && p as f64 <= hi).collect()
}

fn multiples_mask(primes: &[u64], n_len: u64) -> Bits {
    let mut bits = bitvec![u64, Lsb0; 0; n_len as usize + 1];
    for &p in primes {
        let mut k = p;
        while k <= n_len {
            bits.set(k as usize, true);
            k += p;
        }
    }
    bits
}

/// Integers `n <= N` having a prime factor in `[P_r, Q_r]` for every
/// `r <= r_+` (or the override).
#[derive(Clone, Debug)]
pub struct DenseSieveSet {
    pub n_len: u64,
    pub p1: f64,
    pub q1: f64,
    pub r_override: Option<u32>,
    /// Number of levels actually imposed.
    pub levels_used: u32,
    /// The natural `r_+` for these parameters, regardless of the override.
    pub r_plus: u32,
    pub levels: Vec<(f64, f64)>,
    /// Bit `n` set iff `n` is in the set; bit 0 unused.
    pub members: Bits,
    pub count: u64,
    /// `(N - #S) / N`.
    pub deficit: f64,
    /// `log P_1 / log Q_1`.
    pub bound: f64,
}

impl DenseSieveSet {
    pub fn contains(&self, n: u64) -> bool {
        n >= 1 && n <= self.n_len && self.members[n as usize]
    }
}

fn check_params(p1: f64, q1: f64, n_len: u64) -> Result<()> {
    if !(p1 >= 2.0 && p1 <= q1 && q1 <= n_len as f64) {
        return Err(Error::InvalidArgument(format!("need 2 <= P1 <= Q1 <= N, got P1 = {p1}, Q1 = {q1}, N = {n_len}")));
    }
    Ok(())
}

pub fn dense_set(p1: f64, q1: f64, n_len: u64, r_override: Option<u32>) -> Result<DenseSieveSet> {
    check_params(p1, q1, n_len)?;
    let rp = r_plus(p1, q1, n_len);
    let used = r_override.unwrap_or(rp);
    let levels: Vec<(f64, f64)> = (1..=used).map(|r| pq_sequence(p1, q1, r)).collect();
    let all = primes_up_to(n_len);
    let mut members = bitvec![u64, Lsb0; 1; n_len as usize + 1];
    members.set(0, false);
    for &(lo, hi) in &levels {
        members &= multiples_mask(&primes_in(lo, hi, &all), n_len);
    }
    let count = members.count_ones() as u64;
    Ok(DenseSieveSet {
        n_len,
        p1,
        q1,
        r_override,
        levels_used: used,
        r_plus: rp,
        levels,
        members,
        count,
        deficit: (n_len - count) as f64 / n_len as f64,
        bound: p1.ln() / q1.ln(),
    })
}

/// `S`: divisible by some prime of `P = primes in [P_1, Q_1]`;
/// `F`: not divisible by `p^2` for any `p` in `P`.
#[derive(Clone, Debug)]
pub struct MinorSets {
    pub primes: Vec<u64>,
    pub s: Bits,
    pub f: Bits,
}

pub fn minor_sets(p1: f64, q1: f64, n_len: u64) -> MinorSets {
    let primes = primes_in(p1, q1, &primes_up_to(q1.min(n_len as f64).max(0.0) as u64));
    let s = multiples_mask(&primes, n_len);
    let mut f = bitvec![u64, Lsb0; 1; n_len as usize + 1];
    f.set(0, false);
    for &p in &primes {
        let Some(p2) = p.checked_mul(p) else { continue };
        let mut k = p2;
        while k <= n_len {
            f.set(k as usize, false);
            k += p2;
        }
    }
    MinorSets { primes, s, f }
}

/// For each `m` in `[lo, hi)`, the pairs `(p, c)` with `p` in `primes`,
/// `p | m`, and `c = 1 + #{q in primes : q | m/p}`.
pub fn surrogate_terms(lo: u64, hi: u64, primes: &[u64]) -> Vec<Vec<(u64, u32)>> {
    let len = (hi - lo) as usize;
    let mut divs: Vec<Vec<u64>> = vec![Vec::new(); len];
    for &p in primes {
        let mut k = lo.div_ceil(p) * p;
        while k < hi {
            divs[(k - lo) as usize].push(p);
            k += p;
        }
    }
    divs.into_iter()
        .enumerate()
        .map(|(i, ps)| {
            let m = lo + i as u64;
            let cnt = ps.len() as u32;
            // q | m/p iff q | m, except q = p which needs p^2 | m
            ps.iter().map(|&p| (p, cnt + u32::from((m / p) % p == 0))).collect()
        })
        .collect()
}

/// Surrogate values at `m = n + h` for `h = 1..=H`, exactly.
pub fn sqfree_surrogate(beta: impl Fn(u64) -> i64, n: u64, h_len: u64, primes: &[u64]) -> Vec<Ratio<i64>> {
    surrogate_terms(n + 1, n + h_len + 1, primes)
        .into_iter()
        .enumerate()
        .map(|(i, ts)| {
            let m = n + 1 + i as u64;
            ts.iter().fold(Ratio::from_integer(0), |acc, &(p, c)| {
                acc + Ratio::new(beta(p) * beta(m / p), c as i64)
            })
        })
        .collect()
}

pub fn sqfree_surrogate_complex(beta: impl Fn(u64) -> Complex64, n: u64, h_len: u64, primes: &[u64]) -> Vec<Complex64> {
    surrogate_terms(n + 1, n + h_len + 1, primes)
        .into_iter()
        .enumerate()
        .map(|(i, ts)| {
            let m = n + 1 + i as u64;
            ts.iter().map(|&(p, c)| beta(p) * beta(m / p) / c as f64).sum()
        })
        .collect()
}

const TAIL_CUTOFF: u64 = 10_000_000;

/// Upper bound for `sum_{p >= P_1} p^{-2}`: the exact sum over primes up to
/// `10^7` plus `10^{-7}` for the rest.
pub fn prime_inverse_square_tail(p1: f64) -> f64 {
    if p1 > TAIL_CUTOFF as f64 {
        return 1.0 / (p1.floor() - 1.0);
    }
    let head: f64 = primes_up_to(TAIL_CUTOFF)
        .into_iter()
        .filter(|&p| p as f64 >= p1)
        .map(|p| 1.0 / (p as f64 * p as f64))
        .sum();
    head + 1.0 / TAIL_CUTOFF as f64
}

/// `2 H sum_{p >= P_1} p^{-2} + 2 #P`.
pub fn surrogate_error_bound(p1: f64, n_primes: usize, h_len: u64) -> f64 {
    2.0 * h_len as f64 * prime_inverse_square_tail(p1) + 2.0 * n_primes as f64
}
