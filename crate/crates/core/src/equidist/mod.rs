//! Empirical equidistribution tests and the search for horizontal
//! characters obstructing equidistribution.

mod bank;
mod obstruction;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::nilgroup::MalcevPresentation;
use crate::polyseq::{PolySeq1, PolySeq2};
use crate::scalar::Scalar;

pub use bank::{Bank, TestFunction, TestKind, BUMP_WIDTH, QMC_POINTS, QMC_SEED};
pub use obstruction::{
    char_compose2, character_candidates, obstruction_search, obstruction_search_2p, obstruction_witness, Obstruction,
    Witness, DEFAULT_CANDIDATE_CAP,
};

/// Sub-progression endpoints lie on a `ceil(sqrt N)` grid above this length.
pub const FULL_SCAN_LIMIT: u64 = 10_000;

/// `start, start + step, ..., start + (len - 1) step`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Progression {
    pub start: i64,
    pub step: i64,
    pub len: u64,
}

impl Progression {
    pub fn new(start: i64, step: i64, len: u64) -> Self {
        Progression { start, step, len }
    }

    /// `1, 2, ..., n`.
    pub fn prefix(n: u64) -> Self {
        Progression { start: 1, step: 1, len: n }
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.len as i64).map(move |k| self.start + k * self.step)
    }
}

/// Point evaluator `n -> x(n)` with `x(n)` in the fundamental domain.
pub struct Sampler<'a> {
    pub name: String,
    f: Box<dyn Fn(i64) -> Vec<f64> + Sync + 'a>,
}

impl<'a> Sampler<'a> {
    pub fn from_fn(name: impl Into<String>, f: impl Fn(i64) -> Vec<f64> + Sync + 'a) -> Self {
        Sampler { name: name.into(), f: Box::new(f) }
    }

    /// `n -> g(n) Gamma`, reduced in the sequence's own scalar type.
    pub fn from_polyseq<S: Scalar>(name: impl Into<String>, g: &'a PolySeq1<S>) -> Self {
        let pres = g.presentation().clone();
        Sampler::from_fn(name, move |n| {
            let (p, _) = pres.reduce_mod_lattice(&g.eval(n)).expect("dimension checked at construction");
            p.coords.iter().map(Scalar::to_f64).collect()
        })
    }

    /// `n -> g(n, h) Gamma` for a fixed `h`.
    pub fn from_polyseq2<S: Scalar>(name: impl Into<String>, g: &'a PolySeq2<S>, h: i64) -> Self {
        let pres = g.presentation().clone();
        Sampler::from_fn(name, move |n| {
            let (p, _) = pres.reduce_mod_lattice(&g.eval2(n, h)).expect("dimension checked at construction");
            p.coords.iter().map(Scalar::to_f64).collect()
        })
    }

    pub fn eval(&self, n: i64) -> Vec<f64> {
        (self.f)(n)
    }

    fn sample(&self, prog: &Progression) -> Vec<Vec<f64>> {
        let pts: Vec<i64> = prog.iter().collect();
        pts.par_iter().map(|&n| self.eval(n)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscrepancyReport {
    pub sequence: String,
    pub bank_size: usize,
    /// `max_F |E F(x(n)) - int F| / |F|`.
    pub deviation: f64,
    pub worst: usize,
    pub worst_label: String,
    /// The progression realising the deviation.
    pub progression: Progression,
}

fn check_points(pres: &MalcevPresentation, pts: &[Vec<f64>]) -> Result<()> {
    match pts.iter().find(|p| p.len() != pres.m()) {
        Some(p) => Err(Error::DimensionMismatch { expected: pres.m(), got: p.len() }),
        None => Ok(()),
    }
}

/// Largest bank deviation over a single progression.
pub fn discrepancy(seq: &Sampler, prog: &Progression, bank: &Bank) -> Result<DiscrepancyReport> {
    if prog.len == 0 {
        return Err(Error::InvalidArgument("empty progression".into()));
    }
    let pts = seq.sample(prog);
    check_points(bank.presentation(), &pts)?;
    let devs: Vec<f64> = bank
        .functions()
        .par_iter()
        .map(|f| {
            let s: Complex64 = pts.iter().map(|x| f.eval(x)).sum();
            f.deviation(s / prog.len as f64)
        })
        .collect();
    let (worst, deviation) = argmax(&devs);
    Ok(DiscrepancyReport {
        sequence: seq.name.clone(),
        bank_size: bank.len(),
        deviation,
        worst,
        worst_label: bank.functions()[worst].label(),
        progression: *prog,
    })
}

/// First index of the maximum.
fn argmax(v: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &d) in v.iter().enumerate() {
        if d > best.1 {
            best = (i, d);
        }
    }
    best
}

/// Worst bank deviation over sub-progressions of `1..=N` of length at least `delta N`.
///
/// Steps run over `1..=ceil(1/delta)` with every residue; within each the
/// prefix and suffix windows are scanned. Window lengths are exhaustive for
/// `N <= 10^4` and otherwise restricted to multiples of `ceil(sqrt N)` plus the
/// minimal and full lengths, so the scan is not complete for large `N`.
/// `delta >= 1` tests only `1..=N`.
pub fn total_discrepancy(seq: &Sampler, n_len: u64, delta: f64, bank: &Bank) -> Result<DiscrepancyReport> {
    if n_len == 0 {
        return Err(Error::InvalidArgument("empty progression".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta = {delta} must be positive")));
    }
    if delta >= 1.0 {
        return discrepancy(seq, &Progression::prefix(n_len), bank);
    }
    let pts = seq.sample(&Progression::prefix(n_len));
    check_points(bank.presentation(), &pts)?;
    let min_len = ((delta * n_len as f64).ceil() as u64).max(1);
    let max_step = (1.0 / delta).ceil() as u64;
    let grid = if n_len <= FULL_SCAN_LIMIT { 1 } else { (n_len as f64).sqrt().ceil() as u64 };

    let per_fn: Vec<(f64, Progression)> = bank
        .functions()
        .par_iter()
        .map(|f| {
            let vals: Vec<Complex64> = pts.iter().map(|x| f.eval(x)).collect();
            let mut best = (f64::NEG_INFINITY, Progression::prefix(n_len));
            for step in 1..=max_step {
                for r in 0..step {
                    let sub: Vec<Complex64> = vals.iter().skip(r as usize).step_by(step as usize).copied().collect();
                    let count = sub.len() as u64;
                    if count < min_len {
                        continue;
                    }
                    let start = 1 + r as i64;
                    let last = start + (count as i64 - 1) * step as i64;
                    let mut prefix = Vec::with_capacity(sub.len() + 1);
                    prefix.push(Complex64::new(0.0, 0.0));
                    for v in &sub {
                        let p = *prefix.last().unwrap() + v;
                        prefix.push(p);
                    }
                    let total = prefix[sub.len()];
                    for len in window_lengths(min_len, count, grid) {
                        let head = f.deviation(prefix[len as usize] / len as f64);
                        if head > best.0 {
                            best = (head, Progression::new(start, step as i64, len));
                        }
                        let tail = f.deviation((total - prefix[(count - len) as usize]) / len as f64);
                        if tail > best.0 {
                            let s = last - (len as i64 - 1) * step as i64;
                            best = (tail, Progression::new(s, step as i64, len));
                        }
                    }
                }
            }
            best
        })
        .collect();
    let devs: Vec<f64> = per_fn.iter().map(|p| p.0).collect();
    let (worst, deviation) = argmax(&devs);
    Ok(DiscrepancyReport {
        sequence: seq.name.clone(),
        bank_size: bank.len(),
        deviation,
        worst,
        worst_label: bank.functions()[worst].label(),
        progression: per_fn[worst].1,
    })
}

fn window_lengths(min_len: u64, count: u64, grid: u64) -> Vec<u64> {
    if grid <= 1 {
        return (min_len..=count).collect();
    }
    let mut out = vec![min_len];
    let mut l = min_len.div_ceil(grid) * grid;
    while l < count {
        if l > min_len {
            out.push(l);
        }
        l += grid;
    }
    if count > min_len {
        out.push(count);
    }
    out
}
