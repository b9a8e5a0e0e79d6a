//! Replace `g(n, h) = eps g' gamma` on each partition cell by
//! `eps_{n,j} g'(n, h) gamma_{n,j}` and split the cell sum into
//! `E_{n,j} sum w` plus the mean-zero remainder.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{partition, Weight};
use crate::equidist::{Progression, TestFunction};
use crate::error::{Error, Result};
use crate::factorize::FactorizationResult;
use crate::nilgroup::{GroupElement, MalcevPresentation, SubgroupChain};
use crate::polyseq::PolySeq2;
use crate::qmc::{halton, shifts};
use crate::scalar::Scalar;

/// `E_{n,j}` quadrature: 4 shifts of `2^12` Halton points.
pub const TRACE_QMC_POINTS: u64 = 1 << 14;
const TRACE_SHIFTS: usize = 4;
const TRACE_SEED: u64 = 0x7ace_e5ed;
/// Cells whose `E_{n,j}` error estimate exceeds this are flagged.
pub const QMC_ERR_THRESHOLD: f64 = 1e-2;
/// Largest denominator accepted for a coset representative.
const REP_DENOMINATOR_CAP: u64 = 1 << 20;
/// Multiples of the representative's denominator tried as lattice scale.
const SCALE_TRIES: u64 = 64;

#[derive(Clone, Debug)]
pub struct TraceCell {
    pub n: i64,
    pub k: u64,
    pub j: u64,
    pub cell: Progression,
    /// `eps(n, h0)` at the first `h0` of the cell.
    pub epsilon: Vec<f64>,
    /// Fundamental-domain representative of `gamma(n, h) Gamma` on the cell.
    pub gamma: Vec<f64>,
    /// Dimension of `G'`.
    pub subgroup_dim: usize,
    /// `D` with `exp(D X'_i)` in `gamma G' gamma^{-1}`-lattice for every generator.
    pub lattice_scale: u64,
    pub descriptor: String,
    pub e: Complex64,
    pub e_err: f64,
    pub weight_sum: f64,
    /// `sum_h w(n+h) F(eps_{n,j} g'(n,h) gamma_{n,j} Gamma)`.
    pub trace: Complex64,
    pub major: Complex64,
    pub minor: Complex64,
}

#[derive(Clone, Debug)]
pub struct TraceRow {
    pub n: i64,
    /// `sum_h w(n+h) F(g(n,h) Gamma)`.
    pub direct: Complex64,
    pub trace: Complex64,
    pub major: Complex64,
    pub minor: Complex64,
    /// `|direct - trace|`.
    pub defect: f64,
}

#[derive(Clone, Debug)]
pub struct BilinearTrace {
    pub w: u64,
    pub q: u64,
    pub h_len: u64,
    pub cells: Vec<TraceCell>,
    pub rows: Vec<TraceRow>,
    pub max_qmc_err: f64,
    /// `(n, k, j)` of cells over [`QMC_ERR_THRESHOLD`].
    pub flagged: Vec<(i64, u64, u64)>,
}

impl BilinearTrace {
    /// Mean of `|direct - trace| / H` over the sampled `n`.
    pub fn mean_defect(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        self.rows.iter().map(|r| r.defect).sum::<f64>() / (self.h_len as f64 * self.rows.len() as f64)
    }
}

/// Coset representative and lattice scale for one `(n mod q, j)`.
struct Rep {
    p: GroupElement<f64>,
    scale: u64,
}

fn representative<S: Scalar>(
    root: &MalcevPresentation,
    chain: &SubgroupChain,
    gamma: &PolySeq2<S>,
    n: i64,
    h: i64,
) -> Result<Rep> {
    let p = root.reduce_mod_lattice(&gamma.eval2(n, h))?.0.as_element();
    let mut den = 1u64;
    for c in &p.coords {
        let d = c.denominator_within(REP_DENOMINATOR_CAP).ok_or_else(|| {
            Error::Degenerate(format!("gamma({n}, {h}) is not rational with denominator <= {REP_DENOMINATOR_CAP}"))
        })?;
        den = crate::scalar::lcm_u64(den, d);
    }
    let level = chain.levels.len();
    let mp = chain.leaf().m();
    let pinv = root.inv_unchecked(&p.coords);
    'scale: for t in 1..=SCALE_TRIES {
        let scale = den * t;
        for i in 0..mp {
            let mut e = vec![S::zero(); mp];
            e[i] = S::from_i64(scale as i64);
            let s = chain.to_root(level, &GroupElement::new(e))?;
            let c = root.mul_unchecked(&root.mul_unchecked(&pinv.coords, &s.coords).coords, &p.coords);
            if !c.is_integral() {
                continue 'scale;
            }
        }
        return Ok(Rep { p: p.to_f64(), scale });
    }
    Err(Error::Degenerate(format!("no lattice scale up to {} for gamma({n}, {h})", den * SCALE_TRIES)))
}

/// `int F(eps y p Gamma) dy` over `G' / Lambda` with `Lambda` generated by
/// `exp(D X'_i)`; the box `[0, D)^{m'}` is a fundamental domain for it.
fn fiber_mean(
    root: &MalcevPresentation,
    chain: &SubgroupChain,
    f: &TestFunction,
    eps: &[f64],
    rep: &Rep,
    pts: &[Vec<f64>],
    shift: &[Vec<f64>],
) -> Result<(Complex64, f64)> {
    let level = chain.levels.len();
    let mp = chain.leaf().m();
    let eval = |y: &GroupElement<f64>| -> Result<Complex64> {
        let z = root.mul_unchecked(&root.mul_unchecked(eps, &y.coords).coords, &rep.p.coords);
        Ok(f.eval(&root.reduce_mod_lattice(&z)?.0.coords))
    };
    if mp == 0 {
        return Ok((eval(&root.identity())?, 0.0));
    }
    let d = rep.scale as f64;
    let mut means = Vec::with_capacity(shift.len());
    let mut s = vec![0.0; mp];
    for sh in shift {
        let mut acc = Complex64::new(0.0, 0.0);
        for u in pts {
            for k in 0..mp {
                let v = u[k] + sh[k];
                s[k] = d * if v >= 1.0 { v - 1.0 } else { v };
            }
            acc += eval(&chain.to_root(level, &GroupElement::new(s.clone()))?)?;
        }
        means.push(acc / pts.len() as f64);
    }
    let mean: Complex64 = means.iter().sum::<Complex64>() / means.len() as f64;
    let var = means.iter().map(|m| (m - mean).norm_sqr()).sum::<f64>() / (means.len() - 1) as f64;
    Ok((mean, (var / means.len() as f64).sqrt()))
}

/// Trace of `g = eps g' gamma` over the cells of [`partition`] at each
/// sampled `n`, with `W` defaulting to [`super::default_w`] of the period.
pub fn bilinear_trace<S: Scalar>(
    fr: &FactorizationResult<S>,
    g: &PolySeq2<S>,
    f: &TestFunction,
    weight: &Weight,
    h_len: u64,
    w: Option<u64>,
    sample_n: &[i64],
) -> Result<BilinearTrace> {
    let root = fr.root.as_ref();
    root.ensure_same(g.presentation())?;
    let w = w.unwrap_or_else(|| super::default_w(fr.q));
    if fr.q == 0 || fr.q > w {
        return Err(Error::InvalidArgument(format!("period q = {} does not fit W = {w}", fr.q)));
    }
    let q = fr.q * (w / fr.q);
    if let Some(&n) = sample_n.iter().find(|&&n| n < 0 || weight.limit() < n as u64 + h_len) {
        return Err(Error::TableCoverage { needed: n.max(0) as u64 + h_len, have: weight.limit() });
    }
    let chain = &fr.chain;
    let mp = chain.leaf().m();

    // gamma(n, h) Gamma depends only on (n mod q, n + h mod q)
    let mut reps = HashMap::new();
    for r in 0..q as i64 {
        for j in 0..q as i64 {
            let h = (j - r).rem_euclid(q as i64) + q as i64;
            reps.insert((r, j as u64), representative(root, chain, &fr.gamma, r, h)?);
        }
    }

    let pts: Vec<Vec<f64>> = (0..TRACE_QMC_POINTS / TRACE_SHIFTS as u64).map(|i| halton(i, mp)).collect();
    let shift = shifts(mp, TRACE_SHIFTS, TRACE_SEED);
    let (gf, ef, gpf) = (g.to_f64(), fr.epsilon.to_f64(), fr.g_prime.to_f64());
    let at = |x: &GroupElement<f64>| -> Result<Complex64> { Ok(f.eval(&root.reduce_mod_lattice(x)?.0.coords)) };

    let per_n: Vec<(TraceRow, Vec<TraceCell>)> = sample_n
        .par_iter()
        .map(|&n| -> Result<(TraceRow, Vec<TraceCell>)> {
            let mut direct = Complex64::new(0.0, 0.0);
            for h in 1..=h_len {
                let wt = weight.get(n as u64 + h);
                if wt != 0.0 {
                    direct += at(&gf.eval2(n, h as i64))? * wt;
                }
            }
            let mut cells = Vec::new();
            for pc in partition(h_len, w, q, n)? {
                let rep = &reps[&(n.rem_euclid(q as i64), pc.j)];
                let h0 = pc.cell.start;
                let eps = ef.eval2(n, h0).coords;
                let (e, e_err) = if pc.cell.len == 0 {
                    (Complex64::new(0.0, 0.0), 0.0)
                } else {
                    fiber_mean(root, chain, f, &eps, rep, &pts, &shift)?
                };
                let (mut trace, mut minor, mut wsum) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0);
                for h in pc.cell.iter() {
                    let wt = weight.get((n + h) as u64);
                    if wt == 0.0 {
                        continue;
                    }
                    let y = root.mul_unchecked(&root.mul_unchecked(&eps, &gpf.eval2(n, h).coords).coords, &rep.p.coords);
                    let v = at(&y)?;
                    trace += v * wt;
                    minor += (v - e) * wt;
                    wsum += wt;
                }
                cells.push(TraceCell {
                    n,
                    k: pc.k,
                    j: pc.j,
                    cell: pc.cell,
                    epsilon: eps,
                    gamma: rep.p.coords.clone(),
                    subgroup_dim: mp,
                    lattice_scale: rep.scale,
                    descriptor: format!(
                        "F(eps * gamma * (gamma^-1 g' gamma) Gamma) on a {mp}-dimensional subgroup, lattice scale {}",
                        rep.scale
                    ),
                    e,
                    e_err,
                    weight_sum: wsum,
                    trace,
                    major: e * wsum,
                    minor,
                });
            }
            let trace: Complex64 = cells.iter().map(|c| c.trace).sum();
            let row = TraceRow {
                n,
                direct,
                trace,
                major: cells.iter().map(|c| c.major).sum(),
                minor: cells.iter().map(|c| c.minor).sum(),
                defect: (direct - trace).norm(),
            };
            Ok((row, cells))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for (r, c) in per_n {
        rows.push(r);
        cells.extend(c);
    }
    let max_qmc_err = cells.iter().fold(0.0f64, |a, c| a.max(c.e_err));
    let flagged = cells.iter().filter(|c| c.e_err > QMC_ERR_THRESHOLD).map(|c| (c.n, c.k, c.j)).collect();
    Ok(BilinearTrace { w, q, h_len, cells, rows, max_qmc_err, flagged })
}
