//! Polynomial sequences in binomial form.
//!
//! A two-parameter sequence is stored through
//! `psi(g(n,h)) = sum_{j+k<=d} w_jk C(n,j) C(h,k)` with `(w_jk)_i = 0` whenever
//! coordinate `i` lies outside `G_{j+k}`.

mod one;
pub(crate) mod text;
mod torus;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::nilgroup::{GroupElement, MalcevPresentation};
use crate::scalar::{binom, Scalar};

pub use one::PolySeq1;
pub use text::ScalarText;
pub use torus::{best_denominator, concentration_witness, Concentration, TorusPoly};

/// `(j, k)` pairs with `j + k <= d`, ordered by total degree then `j`.
pub fn index_pairs(d: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for s in 0..=d {
        for j in (0..=s).rev() {
            out.push((j, s - j));
        }
    }
    out
}

#[derive(Clone, Debug, Copy, PartialEq, Eq)]
pub enum Direction {
    N,
    H,
}

#[derive(Clone, Debug)]
pub struct PolySeq2<S> {
    pres: Arc<MalcevPresentation>,
    pairs: Vec<(usize, usize)>,
    coeffs: Vec<Vec<S>>,
}

impl<S: Scalar + PartialEq> PartialEq for PolySeq2<S> {
    fn eq(&self, other: &Self) -> bool {
        *self.pres == *other.pres && self.coeffs == other.coeffs
    }
}

/// Check membership of a coefficient of total degree `s`.
pub(crate) fn check_membership<S: Scalar>(
    pres: &MalcevPresentation,
    j: usize,
    k: usize,
    w: &[S],
) -> Result<()> {
    if w.len() != pres.m() {
        return Err(Error::DimensionMismatch { expected: pres.m(), got: w.len() });
    }
    let start = pres.m() - pres.dim_level(j + k);
    for (i, x) in w.iter().enumerate().take(start) {
        if !x.near_zero() {
            return Err(Error::Membership { j, k, coord: i + 1 });
        }
    }
    Ok(())
}

impl<S: Scalar> PolySeq2<S> {
    /// The constant identity sequence.
    pub fn identity(pres: Arc<MalcevPresentation>) -> Self {
        let d = pres.degree();
        let pairs = index_pairs(d);
        let coeffs = vec![vec![S::zero(); pres.m()]; pairs.len()];
        PolySeq2 { pres, pairs, coeffs }
    }

    /// Build from explicit coefficients; unspecified ones are zero.
    pub fn from_coeffs(pres: Arc<MalcevPresentation>, given: Vec<((usize, usize), Vec<S>)>) -> Result<Self> {
        let mut s = Self::identity(pres);
        for ((j, k), w) in given {
            s.set_coeff(j, k, w)?;
        }
        Ok(s)
    }

    pub fn presentation(&self) -> &Arc<MalcevPresentation> {
        &self.pres
    }

    pub fn degree(&self) -> usize {
        self.pres.degree()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    fn slot(&self, j: usize, k: usize) -> Option<usize> {
        self.pairs.iter().position(|&p| p == (j, k))
    }

    pub fn coeff(&self, j: usize, k: usize) -> &[S] {
        match self.slot(j, k) {
            Some(i) => &self.coeffs[i],
            None => panic!("coefficient ({j}, {k}) beyond degree {}", self.degree()),
        }
    }

    pub fn coeffs(&self) -> impl Iterator<Item = ((usize, usize), &[S])> {
        self.pairs.iter().copied().zip(self.coeffs.iter().map(|c| c.as_slice()))
    }

    pub fn set_coeff(&mut self, j: usize, k: usize, w: Vec<S>) -> Result<()> {
        let i = self.slot(j, k).ok_or_else(|| {
            Error::InvalidArgument(format!("coefficient ({j}, {k}) beyond degree {}", self.degree()))
        })?;
        check_membership(&self.pres, j, k, &w)?;
        self.coeffs[i] = w;
        Ok(())
    }

    /// `g(n, h)` with exact binomial weights.
    pub fn eval2(&self, n: i64, h: i64) -> GroupElement<S> {
        let m = self.pres.m();
        let mut out = vec![S::zero(); m];
        for ((j, k), w) in self.pairs.iter().zip(&self.coeffs) {
            let b = binom(n, *j) * binom(h, *k);
            if b == 0 {
                continue;
            }
            let bs = S::from_i128(b);
            for (o, x) in out.iter_mut().zip(w) {
                if !x.is_zero() {
                    *o = o.clone() + bs.clone() * x.clone();
                }
            }
        }
        GroupElement::new(out)
    }

    /// Recover binomial coefficients of a polynomial map by finite differences
    /// on `[0, d]^2`, then confirm the fit at extra points.
    pub fn fit(pres: Arc<MalcevPresentation>, f: impl Fn(i64, i64) -> GroupElement<S>) -> Result<Self> {
        let d = pres.degree();
        let m = pres.m();
        let grid: Vec<Vec<GroupElement<S>>> =
            (0..=d as i64).map(|a| (0..=d as i64).map(|b| f(a, b)).collect()).collect();
        let diff = |j: usize, k: usize| -> Vec<S> {
            let mut acc = vec![S::zero(); m];
            for a in 0..=j {
                for b in 0..=k {
                    let sign = if (j - a + k - b) % 2 == 0 { 1 } else { -1 };
                    let c = S::from_i128(sign * binom(j as i64, a) * binom(k as i64, b));
                    for (o, x) in acc.iter_mut().zip(&grid[a][b].coords) {
                        *o = o.clone() + c.clone() * x.clone();
                    }
                }
            }
            acc
        };
        let scale = grid
            .iter()
            .flatten()
            .map(|g| crate::nilgroup::sup_norm(&g.coords))
            .fold(1.0, f64::max);
        let negligible = |x: &S| {
            if S::EXACT {
                x.is_zero()
            } else {
                x.to_f64().abs() <= 1e-9 * scale
            }
        };
        let pairs = index_pairs(d);
        let mut coeffs = Vec::with_capacity(pairs.len());
        for &(j, k) in &pairs {
            let mut w = diff(j, k);
            let start = m - pres.dim_level(j + k);
            for (i, x) in w.iter_mut().enumerate() {
                if i < start {
                    if !negligible(x) {
                        return Err(Error::Membership { j, k, coord: i + 1 });
                    }
                    *x = S::zero();
                }
            }
            coeffs.push(w);
        }
        // differences beyond total degree d must vanish
        for j in 0..=d {
            for k in 0..=d {
                if j + k > d && diff(j, k).iter().any(|x| !negligible(x)) {
                    return Err(Error::FitResidual { n: j as i64, h: k as i64, residual: f64::NAN });
                }
            }
        }
        let seq = PolySeq2 { pres, pairs, coeffs };
        let e = d as i64;
        for (n, h) in [(e + 1, 0), (0, e + 1), (e + 1, e + 2), (-1, 2), (e + 3, -2)] {
            let want = f(n, h);
            let got = seq.eval2(n, h);
            let res = want
                .coords
                .iter()
                .zip(&got.coords)
                .map(|(a, b)| (a.clone() - b.clone()).to_f64().abs())
                .fold(0.0, f64::max);
            let bad = if S::EXACT { want != got } else { res > 1e-7 * (1.0 + crate::nilgroup::sup_norm(&want.coords)) };
            if bad {
                return Err(Error::FitResidual { n, h, residual: res });
            }
        }
        Ok(seq)
    }

    /// The orbit `(n, h) -> g0^{n+h} x`.
    pub fn from_orbit(pres: Arc<MalcevPresentation>, g0: &GroupElement<S>, x: &GroupElement<S>) -> Result<Self> {
        let p = pres.clone();
        pres.multiply(g0, x)?;
        Self::fit(pres, move |n, h| {
            let gn = p.power(g0, n + h).expect("dimension checked");
            p.multiply(&gn, x).expect("dimension checked")
        })
    }

    /// Pointwise product.
    pub fn multiply_seqs(&self, other: &PolySeq2<S>) -> Result<Self> {
        self.pres.ensure_same(&other.pres)?;
        let p = self.pres.clone();
        Self::fit(p.clone(), |n, h| p.mul_unchecked(&self.eval2(n, h).coords, &other.eval2(n, h).coords))
    }

    /// Pointwise inverse.
    pub fn inverse_seq(&self) -> Result<Self> {
        let p = self.pres.clone();
        Self::fit(p.clone(), |n, h| p.inv_unchecked(&self.eval2(n, h).coords))
    }

    /// Discrete derivative `g(. + e) g(.)^{-1}` along `dir`.
    pub fn derivative(&self, dir: Direction) -> Result<Self> {
        let p = self.pres.clone();
        Self::fit(p.clone(), |n, h| {
            let (n1, h1) = match dir {
                Direction::N => (n + 1, h),
                Direction::H => (n, h + 1),
            };
            let a = self.eval2(n1, h1);
            let b = p.inv_unchecked(&self.eval2(n, h).coords);
            p.mul_unchecked(&a.coords, &b.coords)
        })
    }

    /// The one-parameter sequence `h -> g(n, h)` for fixed `n`.
    pub fn restrict_n(&self, n: i64) -> PolySeq1<S> {
        let d = self.degree();
        let m = self.pres.m();
        let mut coeffs = vec![vec![S::zero(); m]; d + 1];
        for ((j, k), w) in self.pairs.iter().zip(&self.coeffs) {
            let b = S::from_i128(binom(n, *j));
            for (o, x) in coeffs[*k].iter_mut().zip(w) {
                *o = o.clone() + b.clone() * x.clone();
            }
        }
        PolySeq1::new_unchecked(self.pres.clone(), coeffs)
    }

    /// The one-parameter sequence `n -> g(n, 0)`.
    pub fn restrict_h0(&self) -> PolySeq1<S> {
        let d = self.degree();
        let m = self.pres.m();
        let mut coeffs = vec![vec![S::zero(); m]; d + 1];
        for ((j, k), w) in self.pairs.iter().zip(&self.coeffs) {
            if *k == 0 {
                coeffs[*j] = w.clone();
            }
        }
        PolySeq1::new_unchecked(self.pres.clone(), coeffs)
    }

    pub fn to_f64(&self) -> PolySeq2<f64> {
        PolySeq2 {
            pres: self.pres.clone(),
            pairs: self.pairs.clone(),
            coeffs: self.coeffs.iter().map(|w| w.iter().map(Scalar::to_f64).collect()).collect(),
        }
    }

    /// Apply a coordinate map pointwise and refit in another presentation.
    pub fn map_refit<T: Scalar>(
        &self,
        target: Arc<MalcevPresentation>,
        f: impl Fn(&GroupElement<S>) -> Result<GroupElement<T>>,
    ) -> Result<PolySeq2<T>> {
        let err = std::cell::RefCell::new(None);
        let m = target.m();
        let fitted = PolySeq2::fit(target, |n, h| match f(&self.eval2(n, h)) {
            Ok(g) => g,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                GroupElement::new(vec![T::zero(); m])
            }
        });
        if let Some(e) = err.into_inner() {
            return Err(e);
        }
        fitted
    }

    /// Smoothness check on `[N] x [H]`, sampled when the grid is large.
    pub fn is_smooth(&self, w: f64, n_len: u64, h_len: u64) -> SmoothReport {
        let f = self.to_f64();
        is_smooth(&self.pres, |n, h| f.eval2(n, h), w, n_len, h_len)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoothReport {
    pub smooth: bool,
    pub max_dist: f64,
    /// `N * max d(g(n+1,h), g(n,h))`
    pub scaled_dn: f64,
    /// `H * max d(g(n,h+1), g(n,h))`
    pub scaled_dh: f64,
    pub samples: usize,
}

/// Sample points used for grid checks: the full grid when `N H <= 10^6`,
/// otherwise an evenly spaced deterministic sub-grid of about `10^6` points.
pub fn sample_grid(n_len: u64, h_len: u64, budget: u64) -> (Vec<i64>, Vec<i64>) {
    let axis = |len: u64, count: u64| -> Vec<i64> {
        if count >= len {
            (1..=len as i64).collect()
        } else {
            let mut v: Vec<i64> = (0..count).map(|i| 1 + (i * len / count) as i64).collect();
            v.push(len as i64);
            v.dedup();
            v
        }
    };
    if n_len.saturating_mul(h_len) <= budget {
        return (axis(n_len, n_len), axis(h_len, h_len));
    }
    let rows = n_len.min((budget as f64).sqrt() as u64).max(1);
    let cols = h_len.min(budget / rows).max(1);
    (axis(n_len, rows), axis(h_len, cols))
}

/// `(W, (N, H))`-smoothness of a sampled sequence.
pub fn is_smooth(
    pres: &MalcevPresentation,
    seq: impl Fn(i64, i64) -> GroupElement<f64>,
    w: f64,
    n_len: u64,
    h_len: u64,
) -> SmoothReport {
    let (ns, hs) = sample_grid(n_len, h_len, 1_000_000);
    let id = pres.identity::<f64>();
    let (mut md, mut mn, mut mh) = (0.0f64, 0.0f64, 0.0f64);
    for &n in &ns {
        for &h in &hs {
            let g = seq(n, h);
            md = md.max(pres.dist(&g, &id).unwrap_or(f64::INFINITY));
            mn = mn.max(pres.dist(&seq(n + 1, h), &g).unwrap_or(f64::INFINITY));
            mh = mh.max(pres.dist(&seq(n, h + 1), &g).unwrap_or(f64::INFINITY));
        }
    }
    let (sn, sh) = (mn * n_len as f64, mh * h_len as f64);
    SmoothReport {
        smooth: md <= w && sn <= w && sh <= w,
        max_dist: md,
        scaled_dn: sn,
        scaled_dh: sh,
        samples: ns.len() * hs.len(),
    }
}
