//! Minimisation of `D(beta, n^{it}; X)^2` over `|t| <= X`, and its
//! character-twisted variants.

use rayon::prelude::*;

use super::{characters_mod, MultFn};
use crate::error::{Error, Result};
use crate::sieve::primes_up_to;

/// Grid points per chunk when scanning.
const CHUNK: usize = 1024;
/// Above this many (grid point, prime) pairs the grid is screened with small primes first.
const FULL_BUDGET: f64 = 2e9;
const SCREEN_PRIMES: u64 = 1000;
const SCREEN_KEEP: usize = 512;
const REFINE_KEEP: usize = 8;

/// `D(beta, n^{it}; X)^2 = sum_p 1/p - sum_p (Re beta(p) cos(t log p) + Im beta(p) sin(t log p)) / p`.
struct Twist {
    logp: Vec<f64>,
    wre: Vec<f64>,
    wim: Vec<f64>,
    base: f64,
}

impl Twist {
    fn new(beta: &MultFn, primes: &[u64]) -> Self {
        let mut t = Twist { logp: Vec::new(), wre: Vec::new(), wim: Vec::new(), base: 0.0 };
        for &p in primes {
            let b = beta.get(p);
            let w = 1.0 / p as f64;
            t.logp.push((p as f64).ln());
            t.wre.push(b.re * w);
            t.wim.push(b.im * w);
            t.base += w;
        }
        t
    }

    fn eval(&self, t: f64) -> f64 {
        let mut s = 0.0;
        for i in 0..self.logp.len() {
            let (sn, cs) = (t * self.logp[i]).sin_cos();
            s += self.wre[i] * cs + self.wim[i] * sn;
        }
        self.base - s
    }

    /// Minimum over `t0 + k res`, `k` in `[k0, k1)`, by the rotation recurrence
    /// seeded once at `k0`.
    fn scan_chunk(&self, t0: f64, res: f64, k0: usize, k1: usize) -> (usize, f64) {
        let np = self.logp.len();
        let start = t0 + k0 as f64 * res;
        let mut c = Vec::with_capacity(np);
        let mut s = Vec::with_capacity(np);
        let mut rc = Vec::with_capacity(np);
        let mut rs = Vec::with_capacity(np);
        for &l in &self.logp {
            let (a, b) = (start * l).sin_cos();
            s.push(a);
            c.push(b);
            let (a, b) = (res * l).sin_cos();
            rs.push(a);
            rc.push(b);
        }
        let mut best = (k0, f64::INFINITY);
        for k in k0..k1 {
            let mut acc = 0.0;
            for i in 0..np {
                acc += self.wre[i] * c[i] + self.wim[i] * s[i];
            }
            let v = self.base - acc;
            if v < best.1 {
                best = (k, v);
            }
            for i in 0..np {
                let (cc, ss) = (c[i], s[i]);
                c[i] = cc * rc[i] - ss * rs[i];
                s[i] = ss * rc[i] + cc * rs[i];
            }
        }
        best
    }

    /// Per-chunk minima over the grid `t0 + k res`, `k < count`.
    fn scan(&self, t0: f64, res: f64, count: usize) -> Vec<(usize, f64)> {
        let chunks = count.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|c| self.scan_chunk(t0, res, c * CHUNK, ((c + 1) * CHUNK).min(count)))
            .collect()
    }

    /// Golden-section search on `[a, b]`.
    fn golden(&self, mut a: f64, mut b: f64) -> (f64, f64) {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = b - g * (b - a);
        let mut x2 = a + g * (b - a);
        let (mut f1, mut f2) = (self.eval(x1), self.eval(x2));
        for _ in 0..200 {
            if b - a < 1e-12 * (1.0 + a.abs()) {
                break;
            }
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = self.eval(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = self.eval(x2);
            }
        }
        if f1 <= f2 {
            (x1, f1)
        } else {
            (x2, f2)
        }
    }
}

/// Default grid spacing `1 / (4 log X)`.
pub fn default_resolution(x: u64) -> f64 {
    1.0 / (4.0 * (x as f64).ln())
}

/// Result of minimising over `t`. The value is an upper bound for the true
/// infimum since only a grid plus local refinement is searched.
#[derive(Clone, Debug, PartialEq)]
pub struct MValue {
    pub t: f64,
    pub value: f64,
    pub resolution: f64,
    pub grid_points: usize,
    /// Whether the grid was screened with small primes before full evaluation.
    pub screened: bool,
}

/// `M(beta; X) = inf_{|t| <= X} D(beta, n^{it}; X)^2`, approximately.
///
/// For real-valued `beta` the objective is even in `t` and only `t >= 0` is scanned.
pub fn m_value(beta: &MultFn, x: u64, resolution: Option<f64>) -> Result<MValue> {
    if x < 2 {
        return Err(Error::InvalidArgument(format!("X = {x} must be at least 2")));
    }
    beta.ensure_covers(x)?;
    let res = resolution.unwrap_or_else(|| default_resolution(x));
    if !(res > 0.0) {
        return Err(Error::InvalidArgument(format!("resolution {res} must be positive")));
    }
    let primes = primes_up_to(x);
    let full = Twist::new(beta, &primes);
    let xf = x as f64;
    let real = primes.iter().all(|&p| beta.get(p).im == 0.0);
    let t0 = if real { 0.0 } else { -xf };
    let count = ((xf - t0) / res).floor() as usize + 1;

    let screened = count as f64 * primes.len() as f64 > FULL_BUDGET;
    let mut cand = if !screened {
        full.scan(t0, res, count)
    } else {
        let head: Vec<u64> = primes.iter().copied().take_while(|&p| p <= SCREEN_PRIMES).collect();
        let mut c = Twist::new(beta, &head).scan(t0, res, count);
        sort_candidates(&mut c);
        c.truncate(SCREEN_KEEP);
        c.par_iter().map(|&(k, _)| (k, full.eval(t0 + k as f64 * res))).collect()
    };
    sort_candidates(&mut cand);
    cand.truncate(REFINE_KEEP);

    let mut best = (t0 + cand[0].0 as f64 * res, cand[0].1);
    for &(k, _) in &cand {
        let c = t0 + k as f64 * res;
        let (t, v) = full.golden((c - res).max(t0), (c + res).min(xf));
        if v < best.1 {
            best = (t, v);
        }
    }
    Ok(MValue { t: best.0, value: best.1, resolution: res, grid_points: count, screened })
}

/// Ascending by value, ties to the smallest grid index.
fn sort_candidates(v: &mut [(usize, f64)]) {
    v.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwistMin {
    pub q: u64,
    /// Index into `characters_mod(q)`.
    pub character: usize,
    pub m: MValue,
}

/// `inf_{q <= Y, chi mod q} M(beta conj(chi); X)`. Ties go to the smallest
/// `q`, then the smallest character index.
pub fn m2_value(beta: &MultFn, x: u64, y: u64, resolution: Option<f64>) -> Result<TwistMin> {
    if y < 1 {
        return Err(Error::InvalidArgument("Y must be at least 1".into()));
    }
    beta.ensure_covers(x)?;
    let mut jobs = Vec::new();
    for q in 1..=y {
        for chi in characters_mod(q)? {
            jobs.push((q, chi));
        }
    }
    let results: Vec<Result<TwistMin>> = jobs
        .par_iter()
        .map(|(q, chi)| {
            let tw = beta.twist_conj(chi);
            Ok(TwistMin { q: *q, character: chi.index(), m: m_value(&tw, x, resolution)? })
        })
        .collect();
    let mut best: Option<TwistMin> = None;
    for r in results {
        let r = r?;
        if best.as_ref().map_or(true, |b| r.m.value < b.m.value) {
            best = Some(r);
        }
    }
    Ok(best.expect("q = 1 always contributes"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MTilde {
    pub value: f64,
    pub x_at_min: u64,
    /// `(X', M(beta; X', Y))` along the ladder `X, 2X, 4X, ... <= X_cap`.
    pub ladder: Vec<(u64, f64)>,
}

/// `inf_{X' >= X} M(beta; X', Y)`, truncated to a doubling ladder up to `X_cap`.
pub fn m_tilde(beta: &MultFn, x: u64, y: u64, x_cap: u64, resolution: Option<f64>) -> Result<MTilde> {
    if x_cap < x {
        return Err(Error::InvalidArgument(format!("X_cap = {x_cap} below X = {x}")));
    }
    beta.ensure_covers(x_cap)?;
    let mut ladder = Vec::new();
    let mut xp = x;
    while xp <= x_cap {
        ladder.push((xp, m2_value(beta, xp, y, resolution)?.m.value));
        match xp.checked_mul(2) {
            Some(n) => xp = n,
            None => break,
        }
    }
    let (x_at_min, value) = ladder
        .iter()
        .copied()
        .fold((x, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });
    Ok(MTilde { value, x_at_min, ladder })
}
