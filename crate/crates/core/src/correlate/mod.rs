//! Short-interval correlation sums
//! `(1/HN) sum_{n<=N} |sum_{h<=H} w(n+h) F(g(n,h) Gamma)|`, the interval /
//! residue partition used to split them, and the major/minor trace built
//! from a factorization.

mod scan;
mod trace;
mod weight;

#[cfg(test)]
mod tests;

use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;

use crate::equidist::{Progression, TestFunction};
use crate::error::{Error, Result};
use crate::nilgroup::{GroupElement, MalcevPresentation};
use crate::polyseq::PolySeq2;

pub use scan::{csv_header, decay_scan, default_w, scan_params, ScanRow, ScanSpec};
pub use trace::{bilinear_trace, BilinearTrace, TraceCell, TraceRow, QMC_ERR_THRESHOLD, TRACE_QMC_POINTS};
pub use weight::Weight;

/// Outer-sum block length; fixed so results do not depend on the thread count.
pub const BLOCK: u64 = 1 << 16;
/// Rows of the two-variable form are grouped more finely since each costs `H` steps.
const POLY_BLOCK: u64 = 1 << 10;
/// Steps between direct re-evaluations of the difference tableau.
const RESEED: u64 = 256;

/// The sequence being correlated.
#[derive(Clone, Debug)]
pub enum Nilsequence {
    /// `g(n, h) = g0^{n+h} x`.
    Orbit { pres: Arc<MalcevPresentation>, g0: GroupElement<f64>, x: GroupElement<f64> },
    Poly(PolySeq2<f64>),
}

impl Nilsequence {
    pub fn orbit(pres: Arc<MalcevPresentation>, g0: GroupElement<f64>, x: GroupElement<f64>) -> Result<Self> {
        pres.element(g0.coords.clone())?;
        pres.element(x.coords.clone())?;
        Ok(Nilsequence::Orbit { pres, g0, x })
    }

    pub fn presentation(&self) -> &Arc<MalcevPresentation> {
        match self {
            Nilsequence::Orbit { pres, .. } => pres,
            Nilsequence::Poly(g) => g.presentation(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationReport {
    pub h_len: u64,
    pub n_len: u64,
    pub weight: String,
    pub function: String,
    pub value: f64,
    /// `sum |inner sum|` over each block of `n`, unnormalised.
    pub block_sums: Vec<f64>,
    pub seconds: f64,
}

/// Sum in a fixed binary-tree order.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

fn blocks(n_len: u64, size: u64) -> Vec<(u64, u64)> {
    (0..n_len.div_ceil(size)).map(|b| (b * size + 1, ((b + 1) * size).min(n_len))).collect()
}

fn check_sizes(w: &Weight, h_len: u64, n_len: u64) -> Result<()> {
    if h_len == 0 || n_len == 0 {
        return Err(Error::InvalidArgument("H and N must be positive".into()));
    }
    if h_len > n_len {
        return Err(Error::InvalidArgument(format!("H = {h_len} exceeds N = {n_len}")));
    }
    if w.limit() < n_len + h_len {
        return Err(Error::TableCoverage { needed: n_len + h_len, have: w.limit() });
    }
    Ok(())
}

/// `(1/HN) sum_{n=1}^N |sum_{h=1}^H w(n+h) F(g(n,h) Gamma)|`.
pub fn correlation(w: &Weight, f: &TestFunction, g: &Nilsequence, h_len: u64, n_len: u64) -> Result<CorrelationReport> {
    check_sizes(w, h_len, n_len)?;
    let start = Instant::now();
    let block_sums = match g {
        Nilsequence::Orbit { pres, g0, x } => orbit_blocks(pres, g0, x, w, f, h_len, n_len)?,
        Nilsequence::Poly(seq) => poly_blocks(seq, w, f, h_len, n_len)?,
    };
    let value = pairwise_sum(&block_sums) / (h_len as f64 * n_len as f64);
    Ok(CorrelationReport {
        h_len,
        n_len,
        weight: w.name().to_string(),
        function: f.label(),
        value,
        block_sums,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Orbit form: `a_t = w(t) F(g0^t x Gamma)` for `t <= N + H` by one group
/// multiplication per step, then sliding windows `S_n = sum_{t=n+1}^{n+H} a_t`.
fn orbit_blocks(
    pres: &MalcevPresentation,
    g0: &GroupElement<f64>,
    x: &GroupElement<f64>,
    w: &Weight,
    f: &TestFunction,
    h_len: u64,
    n_len: u64,
) -> Result<Vec<f64>> {
    let top = (n_len + h_len) as usize;
    let mut a = vec![Complex64::new(0.0, 0.0); top + 1];
    let mut p = pres.reduce_mod_lattice(x)?.0.coords;
    for (t, slot) in a.iter_mut().enumerate().skip(1) {
        p = pres.reduce_mod_lattice(&pres.mul_unchecked(&g0.coords, &p))?.0.coords;
        let wt = w.get(t as u64);
        if wt != 0.0 {
            *slot = f.eval(&p) * wt;
        }
    }
    let h = h_len as usize;
    Ok(blocks(n_len, BLOCK)
        .into_par_iter()
        .map(|(lo, hi)| {
            let lo = lo as usize;
            let mut s: Complex64 = a[lo + 1..=lo + h].iter().sum();
            let mut acc = 0.0;
            for n in lo..=hi as usize {
                acc += s.norm();
                if n < hi as usize {
                    s += a[n + h + 1] - a[n + 1];
                }
            }
            acc
        })
        .collect())
}

/// Forward-difference tableau for `h -> psi(g(n, h))`, one row per order.
struct Tableau {
    diffs: Vec<Vec<f64>>,
}

impl Tableau {
    fn at(row: &crate::polyseq::PolySeq1<f64>, h: i64) -> Self {
        let d = row.coeffs().len() - 1;
        let mut diffs: Vec<Vec<f64>> = (0..=d as i64).map(|i| row.eval(h + i).coords).collect();
        for order in 1..=d {
            for i in (order..=d).rev() {
                for c in 0..diffs[i].len() {
                    diffs[i][c] -= diffs[i - 1][c];
                }
            }
        }
        Tableau { diffs }
    }

    fn value(&self) -> &[f64] {
        &self.diffs[0]
    }

    fn step(&mut self) {
        for i in 0..self.diffs.len() - 1 {
            let (lo, hi) = self.diffs.split_at_mut(i + 1);
            for (x, y) in lo[i].iter_mut().zip(&hi[0]) {
                *x += y;
            }
        }
    }
}

fn poly_blocks(seq: &PolySeq2<f64>, w: &Weight, f: &TestFunction, h_len: u64, n_len: u64) -> Result<Vec<f64>> {
    let pres = seq.presentation();
    blocks(n_len, POLY_BLOCK)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut acc = 0.0;
            for n in lo..=hi {
                let row = seq.restrict_n(n as i64);
                let mut tab = Tableau::at(&row, 1);
                let mut s = Complex64::new(0.0, 0.0);
                for h in 1..=h_len {
                    if h > 1 && (h - 1) % RESEED == 0 {
                        tab = Tableau::at(&row, h as i64);
                    }
                    let wt = w.get(n + h);
                    if wt != 0.0 {
                        let p = pres.reduce_mod_lattice(&GroupElement::new(tab.value().to_vec()))?.0;
                        s += f.eval(&p.coords) * wt;
                    }
                    tab.step();
                }
                acc += s.norm();
            }
            Ok(acc)
        })
        .collect()
}

/// One cell `{h in I_k : n + h = j mod q}` of the partition of `(0, H]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionCell {
    pub n: i64,
    /// Interval index, `1..=W^2`.
    pub k: u64,
    /// Residue class of `n + h`, `0..q`.
    pub j: u64,
    pub cell: Progression,
}

/// Split `(0, H]` into `W^2` intervals `(floor((k-1)H/W^2), floor(kH/W^2)]`
/// and each interval by the residue of `n + h` mod `q`.
pub fn partition(h_len: u64, w: u64, q: u64, n: i64) -> Result<Vec<PartitionCell>> {
    if w == 0 || w.saturating_mul(w) > h_len {
        return Err(Error::Degenerate(format!("W^2 = {} exceeds H = {h_len}", w.saturating_mul(w))));
    }
    if q == 0 || q > w {
        return Err(Error::InvalidArgument(format!("need 1 <= q <= W, got q = {q}, W = {w}")));
    }
    let k_count = w * w;
    let mut out = Vec::with_capacity((k_count * q) as usize);
    for k in 1..=k_count {
        let lo = ((k - 1) as u128 * h_len as u128 / k_count as u128) as i64;
        let hi = (k as u128 * h_len as u128 / k_count as u128) as i64;
        for j in 0..q {
            let qi = q as i64;
            let first = lo + 1 + (j as i64 - n - (lo + 1)).rem_euclid(qi);
            let len = if first > hi { 0 } else { ((hi - first) / qi + 1) as u64 };
            out.push(PartitionCell { n, k, j, cell: Progression::new(first, qi, len) });
        }
    }
    Ok(out)
}

/// Exact intersection of two progressions with positive steps. An empty
/// result has `len = 0` and step `lcm` of the steps.
pub fn progression_intersection(a: &Progression, b: &Progression) -> Result<Progression> {
    if a.step < 1 || b.step < 1 {
        return Err(Error::InvalidArgument("progression steps must be positive".into()));
    }
    let (s1, s2) = (a.step as i128, b.step as i128);
    let l = s1.lcm(&s2);
    let empty = Progression::new(a.start.max(b.start), l as i64, 0);
    if a.len == 0 || b.len == 0 {
        return Ok(empty);
    }
    let (a0, b0) = (a.start as i128, b.start as i128);
    let eg = s1.extended_gcd(&s2);
    let g = eg.gcd;
    if (b0 - a0) % g != 0 {
        return Ok(empty);
    }
    // a0 + s1 t = b0 mod s2  <=>  t = ((b0 - a0)/g) * x mod s2/g
    let m2 = s2 / g;
    let t = ((b0 - a0) / g % m2 * (eg.x % m2)).rem_euclid(m2);
    let x0 = a0 + s1 * t;
    let lo = a0.max(b0);
    let hi = (a0 + (a.len as i128 - 1) * s1).min(b0 + (b.len as i128 - 1) * s2);
    let first = x0 + Integer::div_ceil(&(lo - x0), &l) * l;
    if first > hi {
        return Ok(empty);
    }
    Ok(Progression::new(first as i64, l as i64, ((hi - first) / l + 1) as u64))
}
