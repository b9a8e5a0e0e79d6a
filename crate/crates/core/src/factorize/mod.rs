//! Iterative factorization `g = epsilon g' gamma` of two-parameter polynomial
//! sequences into a smooth part, a part living on a subgroup, and a rational
//! periodic part.

mod text;
mod verify;

use std::sync::Arc;

use num_integer::Integer;

use crate::equidist::obstruction_search_2p;
use crate::error::{Error, Result};
use crate::linalg::bezout_vector;
use crate::nilgroup::{GroupElement, HorizontalCharacter, MalcevPresentation, Subgroup, SubgroupChain};
use crate::polyseq::PolySeq2;
use crate::scalar::{lcm_u64, q, Scalar, Q};

pub use verify::{verify_factorization, Check, VerifyReport};

/// Largest multiplier tried on top of the lcm of peeled denominators when
/// searching for the period of `gamma`.
pub const PERIOD_SEARCH: u64 = 256;
/// Axis length of the periodicity grid; longer axes are subsampled evenly.
pub const PERIOD_GRID: u64 = 96;

/// Output of one peeling step, all in the coordinates of `g`.
#[derive(Clone, Debug)]
pub struct Leibman<S> {
    pub epsilon: PolySeq2<S>,
    pub g_prime: PolySeq2<S>,
    pub gamma: PolySeq2<S>,
    /// Common denominator `D'` of the rational coefficients of `gamma`.
    pub denominator: u64,
}

/// Split `g = epsilon g' gamma` so that `eta o g' = 0` identically.
///
/// Each coefficient `w` moves along `a / |a|^2` to the nearest point `u` with
/// `eta(u)` integral (ties toward zero); `epsilon` carries `w - u` and
/// `gamma` carries `v = (eta(u) / gcd(a)) b` with `a . b = gcd(a)`.
pub fn leibman_decompose<S: Scalar>(g: &PolySeq2<S>, eta: &HorizontalCharacter, denom_cap: u64) -> Result<Leibman<S>> {
    let pres = g.presentation().clone();
    pres.check_character(eta)?;
    if eta.is_trivial() {
        return Err(Error::InvalidArgument("cannot peel the trivial character".into()));
    }
    let k = pres.horizontal_dim();
    let a = &eta.a;
    let norm2 = S::from_i128(a.iter().map(|&x| (x as i128) * (x as i128)).sum());
    let (gcd, bez) = bezout_vector(&a[..k]);

    let mut eps = Vec::new();
    let mut gam = Vec::new();
    let mut denominator = 1u64;
    for ((j, kk), w) in g.coeffs() {
        let e = eta.apply(w);
        let z = e.round_ties_zero();
        let delta = e - z.clone();
        if !delta.is_zero() {
            let c: Vec<S> = a.iter().map(|&ai| delta.clone() * S::from_i64(ai) / norm2.clone()).collect();
            eps.push(((j, kk), c));
        }
        let zi = z.to_f64().round() as i64;
        if zi != 0 {
            let d = (gcd / gcd.gcd(&zi.abs())) as u64;
            if d > denom_cap {
                return Err(Error::DenominatorCap { got: d, cap: denom_cap });
            }
            denominator = lcm_u64(denominator, d);
            let mut v: Vec<S> = bez.iter().map(|&b| S::from_q(&q(zi * b, gcd))).collect();
            v.resize(pres.m(), S::zero());
            gam.push(((j, kk), v));
        }
    }
    let epsilon = PolySeq2::from_coeffs(pres.clone(), eps)?;
    let gamma = PolySeq2::from_coeffs(pres.clone(), gam)?;
    let g_prime = epsilon.inverse_seq()?.multiply_seqs(g)?.multiply_seqs(&gamma.inverse_seq()?)?;

    let scale = g.coeffs().map(|(_, w)| crate::nilgroup::sup_norm(w)).fold(1.0, f64::max);
    for (jk, c) in crate::equidist::char_compose2(&g_prime, eta)? {
        let bad = if S::EXACT { !c.is_zero() } else { c.to_f64().abs() > 1e-7 * scale };
        if bad {
            return Err(Error::Degenerate(format!("eta o g' does not vanish at {jk:?}: {c}")));
        }
    }
    Ok(Leibman { epsilon, g_prime, gamma, denominator })
}

/// `ker(eta)` with an adapted rational basis.
pub fn kernel_presentation(pres: Arc<MalcevPresentation>, eta: &HorizontalCharacter) -> Result<Subgroup> {
    Subgroup::horizontal_kernel(pres, eta)
}

/// Per-iteration parameters; iteration `i` uses entry `min(i, len - 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    /// Bound `M` on `|eta|` in the obstruction search.
    pub modulus: Vec<u64>,
    /// An obstruction is peeled only if its score is at most this.
    pub smooth: Vec<f64>,
    pub denominator_cap: Vec<u64>,
}

impl Schedule {
    /// Every parameter doubles per iteration.
    pub fn doubling(modulus: u64, smooth: f64, denominator_cap: u64, steps: usize) -> Self {
        let steps = steps.max(1);
        Schedule {
            modulus: (0..steps).map(|i| modulus << i).collect(),
            smooth: (0..steps).map(|i| smooth * (1u64 << i) as f64).collect(),
            denominator_cap: (0..steps).map(|i| denominator_cap << i).collect(),
        }
    }

    fn at<T: Copy>(v: &[T], i: usize) -> T {
        v[i.min(v.len() - 1)]
    }

    fn validate(&self) -> Result<()> {
        if self.modulus.is_empty() || self.smooth.is_empty() || self.denominator_cap.is_empty() {
            return Err(Error::InvalidArgument("schedules must be nonempty".into()));
        }
        Ok(())
    }
}

/// One peeled character, in the coordinates of the group it was found in.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceStep {
    pub eta: HorizontalCharacter,
    pub score: f64,
    pub bound: u64,
    pub denominator: u64,
    /// Dimension of the kernel passed to the next iteration.
    pub dim: usize,
}

#[derive(Clone, Debug)]
pub struct FactorizationResult<S> {
    pub root: Arc<MalcevPresentation>,
    pub epsilon: PolySeq2<S>,
    /// `g'` in root coordinates.
    pub g_prime: PolySeq2<S>,
    /// `g'` in the coordinates of the final subgroup.
    pub g_prime_leaf: PolySeq2<S>,
    pub gamma: PolySeq2<S>,
    pub chain: SubgroupChain,
    pub trace: Vec<TraceStep>,
    /// Largest realised height, denominator, period or smoothness constant.
    pub w: u64,
    /// Smallest verified period of `gamma(n, h) Gamma`.
    pub q: u64,
    /// `q floor(W / q)`, a multiple of `q` in `(W/2, W]`.
    pub q_adjusted: u64,
    pub n_len: u64,
    pub h_len: u64,
}

impl<S: Scalar> FactorizationResult<S> {
    /// Basis of the final subgroup as rational combinations of the root basis.
    pub fn subgroup_basis(&self) -> Vec<Vec<Q>> {
        self.chain.basis_in_root()
    }

    pub fn subgroup(&self) -> &Arc<MalcevPresentation> {
        self.chain.leaf()
    }

    pub fn iterations(&self) -> usize {
        self.trace.len()
    }
}

/// Peel obstructions until none scores below the schedule's threshold.
pub fn factorize<S: Scalar>(g: &PolySeq2<S>, n_len: u64, h_len: u64, schedule: &Schedule) -> Result<FactorizationResult<S>> {
    schedule.validate()?;
    if n_len == 0 || h_len == 0 {
        return Err(Error::InvalidArgument("N and H must be positive".into()));
    }
    let root = g.presentation().clone();
    let mut chain = SubgroupChain::new(root.clone());
    let mut cur = g.clone();
    let mut eps = PolySeq2::identity(root.clone());
    let mut gam = PolySeq2::identity(root.clone());
    let mut trace = Vec::new();
    let mut w_parts: Vec<u64> = vec![root.r0()];

    loop {
        let it = trace.len();
        if it > root.m() {
            return Err(Error::IterationOverflow);
        }
        if chain.leaf().horizontal_dim() == 0 {
            break;
        }
        let bound = Schedule::at(&schedule.modulus, it);
        let threshold = Schedule::at(&schedule.smooth, it);
        let cap = Schedule::at(&schedule.denominator_cap, it);
        let Some(ob) = obstruction_search_2p(&cur, n_len, h_len, bound)? else {
            break;
        };
        let score = ob.norm.to_f64();
        if score > threshold {
            break;
        }
        let step = leibman_decompose(&cur, &ob.eta, cap)?;
        let level = chain.levels.len();
        let e_root = step.epsilon.map_refit(root.clone(), |x| chain.to_root(level, x))?;
        let g_root = step.gamma.map_refit(root.clone(), |x| chain.to_root(level, x))?;
        eps = eps.multiply_seqs(&e_root)?;
        gam = g_root.multiply_seqs(&gam)?;
        chain.push(&ob.eta)?;
        let sub = chain.levels.last().expect("just pushed");
        cur = step.g_prime.map_refit(sub.child.clone(), |x| sub.from_parent(x))?;
        w_parts.push(ob.eta.height() as u64);
        w_parts.push(step.denominator);
        trace.push(TraceStep { eta: ob.eta, score, bound, denominator: step.denominator, dim: sub.child.m() });
    }

    let level = chain.levels.len();
    let g_prime = cur.map_refit(root.clone(), |x| chain.to_root(level, x))?;
    let q0 = trace.iter().fold(1u64, |acc, t| lcm_u64(acc, t.denominator));
    let q = gamma_period(&root, &gam, q0)?;
    w_parts.push(q);
    let sm = eps.is_smooth(0.0, n_len, h_len);
    w_parts.push(sm.max_dist.max(sm.scaled_dn).max(sm.scaled_dh).ceil() as u64);
    w_parts.push(max_rational_height(&root, &gam, q)?);
    let w = w_parts.into_iter().max().unwrap_or(1).max(1);
    Ok(FactorizationResult {
        root,
        epsilon: eps,
        g_prime,
        g_prime_leaf: cur,
        gamma: gam,
        chain,
        trace,
        w,
        q,
        q_adjusted: q * (w / q),
        n_len,
        h_len,
    })
}

/// Grid `0..3q`, subsampled to `PERIOD_GRID` points per axis.
pub(crate) fn period_axis(q: u64) -> Vec<i64> {
    let len = 3 * q;
    if len <= PERIOD_GRID {
        (0..len as i64).collect()
    } else {
        (0..PERIOD_GRID).map(|i| (i * len / PERIOD_GRID) as i64).collect()
    }
}

fn in_lattice<S: Scalar>(pres: &MalcevPresentation, a: &GroupElement<S>, b: &GroupElement<S>) -> bool {
    let ainv = pres.inv_unchecked(&a.coords);
    pres.mul_unchecked(&ainv.coords, &b.coords).coords.iter().all(Scalar::is_integral)
}

/// Whether `gamma(n, h) Gamma` is unchanged by `n -> n + q` and `h -> h + q` on the grid.
pub(crate) fn is_periodic<S: Scalar>(pres: &MalcevPresentation, gamma: &PolySeq2<S>, q: u64) -> bool {
    let axis = period_axis(q);
    let qi = q as i64;
    axis.iter().all(|&n| {
        axis.iter().all(|&h| {
            let g = gamma.eval2(n, h);
            in_lattice(pres, &g, &gamma.eval2(n + qi, h)) && in_lattice(pres, &g, &gamma.eval2(n, h + qi))
        })
    })
}

/// Smallest `q0 t`, `t <= PERIOD_SEARCH`, that passes the periodicity grid.
fn gamma_period<S: Scalar>(pres: &MalcevPresentation, gamma: &PolySeq2<S>, q0: u64) -> Result<u64> {
    for t in 1..=PERIOD_SEARCH {
        if is_periodic(pres, gamma, q0 * t) {
            return Ok(q0 * t);
        }
    }
    Err(Error::DenominatorCap { got: q0 * (PERIOD_SEARCH + 1), cap: q0 * PERIOD_SEARCH })
}

/// Largest coordinate denominator of the reduced representatives of
/// `gamma(n, h)` over one period, searching denominators up to `2^20`.
pub(crate) fn max_rational_height<S: Scalar>(pres: &MalcevPresentation, gamma: &PolySeq2<S>, q: u64) -> Result<u64> {
    let axis: Vec<i64> = period_axis(q).into_iter().filter(|&x| x < q as i64).collect();
    let mut best = 1;
    for &n in &axis {
        for &h in &axis {
            let (p, _) = pres.reduce_mod_lattice(&gamma.eval2(n, h))?;
            for c in &p.coords {
                let d = c
                    .denominator_within(1 << 20)
                    .ok_or_else(|| Error::Degenerate(format!("gamma({n}, {h}) is not rational")))?;
                best = best.max(d);
            }
        }
    }
    Ok(best)
}
