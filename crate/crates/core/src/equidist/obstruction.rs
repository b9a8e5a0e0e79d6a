use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use super::Progression;
use crate::error::{Error, Result};
use crate::nilgroup::{HorizontalCharacter, MalcevPresentation};
use crate::polyseq::{PolySeq1, PolySeq2};
use crate::scalar::{binom, Scalar};

/// Default cap on the number of enumerated characters.
pub const DEFAULT_CANDIDATE_CAP: usize = 10_000;

/// Nonzero horizontal characters with `|a|_inf <= bound` and first nonzero
/// entry positive, ordered by `|a|_inf` and then lexicographically. The flag
/// reports whether `cap` cut the list short.
pub fn character_candidates(pres: &MalcevPresentation, bound: u64, cap: usize) -> (Vec<HorizontalCharacter>, bool) {
    let h = pres.horizontal_dim();
    let m = pres.m();
    let mut out = Vec::new();
    if h == 0 {
        return (out, false);
    }
    for s in 1..=bound as i64 {
        // odometer over [-s, s]^h in lexicographic order
        let mut a = vec![-s; h];
        loop {
            let first = a.iter().find(|&&x| x != 0).copied().unwrap_or(0);
            let shell = a.iter().map(|x| x.abs()).max().unwrap_or(0);
            if first > 0 && shell == s {
                if out.len() == cap {
                    return (out, true);
                }
                out.push(HorizontalCharacter::padded(&a, m));
            }
            if !advance(&mut a, s) {
                break;
            }
        }
    }
    (out, false)
}

/// Next vector of `[-s, s]^h` in lexicographic order; false after the last.
fn advance(a: &mut [i64], s: i64) -> bool {
    for i in (0..a.len()).rev() {
        if a[i] < s {
            a[i] += 1;
            for x in &mut a[i + 1..] {
                *x = -s;
            }
            return true;
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq)]
pub struct Obstruction<S> {
    pub eta: HorizontalCharacter,
    /// `||eta o g||_{C^inf[N]}`, or the two-parameter score.
    pub norm: S,
    pub bound: u64,
    pub candidates: usize,
    pub truncated: bool,
}

/// First minimum in candidate order, which is the documented tie-break.
fn argmin<S: Scalar>(scores: Vec<S>) -> Option<(usize, S)> {
    let mut best: Option<(usize, S)> = None;
    for (i, s) in scores.into_iter().enumerate() {
        if best.as_ref().map_or(true, |b| s < b.1) {
            best = Some((i, s));
        }
    }
    best
}

/// The character minimising `||eta o g||_{C^inf[N]}` among `|eta| <= bound`.
pub fn obstruction_search<S: Scalar>(g: &PolySeq1<S>, n_len: u64, bound: u64) -> Result<Option<Obstruction<S>>> {
    if bound == 0 {
        return Err(Error::InvalidArgument("modulus bound must be at least 1".into()));
    }
    let (cands, truncated) = character_candidates(g.presentation(), bound, DEFAULT_CANDIDATE_CAP);
    let scores: Vec<S> = cands
        .par_iter()
        .map(|eta| g.char_compose(eta).map(|f| f.cinf_norm(n_len)))
        .collect::<Result<_>>()?;
    let n = cands.len();
    Ok(argmin(scores).map(|(i, norm)| Obstruction { eta: cands[i].clone(), norm, bound, candidates: n, truncated }))
}

/// `((j, k), a . omega_jk)` for every coefficient of `g`.
pub fn char_compose2<S: Scalar>(g: &PolySeq2<S>, eta: &HorizontalCharacter) -> Result<Vec<((usize, usize), S)>> {
    g.presentation().check_character(eta)?;
    Ok(g.coeffs().map(|(jk, w)| (jk, eta.apply(w))).collect())
}

fn score_2p<S: Scalar>(g: &PolySeq2<S>, eta: &HorizontalCharacter, n_len: u64, h_len: u64) -> S {
    let n = S::from_i128(n_len as i128);
    let h = S::from_i128(h_len as i128);
    let mut best = S::zero();
    for ((j, k), w) in g.coeffs() {
        if j == 0 && k == 0 {
            continue;
        }
        let mut v = eta.apply(w).torus_norm();
        if v.is_zero() {
            continue;
        }
        for _ in 0..j {
            v = v * n.clone();
        }
        for _ in 0..k {
            v = v * h.clone();
        }
        if v > best {
            best = v;
        }
    }
    best
}

/// The character minimising `max_{(j,k) != (0,0)} N^j H^k ||eta(omega_jk)||`.
pub fn obstruction_search_2p<S: Scalar>(
    g: &PolySeq2<S>,
    n_len: u64,
    h_len: u64,
    bound: u64,
) -> Result<Option<Obstruction<S>>> {
    if bound == 0 {
        return Err(Error::InvalidArgument("modulus bound must be at least 1".into()));
    }
    let (cands, truncated) = character_candidates(g.presentation(), bound, DEFAULT_CANDIDATE_CAP);
    let scores: Vec<S> = cands.par_iter().map(|eta| score_2p(g, eta, n_len, h_len)).collect();
    let n = cands.len();
    Ok(argmin(scores).map(|(i, norm)| Obstruction { eta: cands[i].clone(), norm, bound, candidates: n, truncated }))
}

/// A prefix progression on which `e(eta o g)` has large mean.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub eta: HorizontalCharacter,
    pub progression: Progression,
    pub delta: f64,
    /// `2 pi sum_{i>=1} ||alpha_i|| C(L+1, i+1) / L`, bounding `|mean - e(eta(g(0)))|`.
    pub drift_bound: f64,
    pub mean: Complex64,
    pub abs_mean: f64,
}

fn drift_bound(alpha: &[f64], len: u64) -> f64 {
    let s: f64 = alpha
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, a)| a * binom(len as i64 + 1, i + 1) as f64 / len as f64)
        .sum();
    TAU * s
}

/// Longest prefix `1..=L`, `L <= N`, whose drift bound stays below `threshold`,
/// together with the achieved mean of `e(eta(g(n)))` on it.
///
/// Fails when no `L >= 2` qualifies. With `threshold = 1/2` the returned mean
/// has modulus above `1/2`.
pub fn obstruction_witness<S: Scalar>(
    eta: &HorizontalCharacter,
    g: &PolySeq1<S>,
    n_len: u64,
    threshold: f64,
) -> Result<Witness> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidArgument(format!("threshold {threshold} outside (0, 1]")));
    }
    let f = g.char_compose(eta)?;
    let alpha: Vec<f64> = f.alpha.iter().map(|a| a.torus_norm().to_f64()).collect();
    if !alpha.iter().all(|a| a.is_finite()) {
        return Err(Error::InvalidArgument("non-finite coefficients".into()));
    }
    // the bound is nondecreasing in L
    let (mut lo, mut hi) = (1u64, n_len.max(1));
    if drift_bound(&alpha, hi) < threshold {
        lo = hi;
    } else {
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if drift_bound(&alpha, mid) < threshold {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    if lo < 2 || drift_bound(&alpha, lo) >= threshold {
        return Err(Error::Degenerate(format!(
            "||eta o g|| too large for a witness: drift bound {:.3} already at length 2",
            drift_bound(&alpha, 2)
        )));
    }
    let len = lo;
    let sum: Complex64 = (1..=len as i64)
        .map(|n| Complex64::from_polar(1.0, TAU * f.eval_mod1(n).to_f64()))
        .sum();
    let mean = sum / len as f64;
    Ok(Witness {
        eta: eta.clone(),
        progression: Progression::prefix(len),
        delta: len as f64 / n_len as f64,
        drift_bound: drift_bound(&alpha, len),
        mean,
        abs_mean: mean.norm(),
    })
}
