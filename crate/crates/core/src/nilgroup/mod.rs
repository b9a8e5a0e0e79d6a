//! Filtered nilpotent Lie groups in Mal'cev coordinates of the second kind.
//!
//! A point `g = exp(w_1 V_1) ... exp(w_m V_m)` is stored as its coordinate
//! vector `(w_1, ..., w_m)`. The lattice is the set of integer vectors and the
//! fundamental domain is `[0, 1)^m`.

mod builtins;
mod element;
mod parse;
mod subgroup;

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::{bch, Brackets, CompiledPoly, Poly, PolyVec};
use crate::scalar::{height, Scalar, Q};

pub use element::{GroupElement, HorizontalCharacter, ManifoldPoint};
pub use parse::parse_rational;
pub use subgroup::{Subgroup, SubgroupChain};

/// Largest nilpotency step the truncated BCH series handles exactly.
pub const MAX_STEP: usize = 4;

/// A filtered nilpotent Lie algebra with an adapted basis, plus the derived
/// polynomial group law.
#[derive(Clone)]
pub struct MalcevPresentation {
    m: usize,
    d: usize,
    dims: Vec<usize>,
    brackets: Brackets,
    step: usize,
    r0: u64,
    mult_polys: Vec<Poly>,
    mult: Vec<CompiledPoly>,
    // mult_i - a_i - b_i; depends only on coordinates below i
    rest: Vec<CompiledPoly>,
    exp: Vec<CompiledPoly>,
    log: Vec<CompiledPoly>,
}

impl fmt::Debug for MalcevPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MalcevPresentation")
            .field("m", &self.m)
            .field("d", &self.d)
            .field("dims", &self.dims)
            .field("brackets", &self.brackets.entries.len())
            .field("step", &self.step)
            .finish()
    }
}

impl PartialEq for MalcevPresentation {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
            && self.d == other.d
            && self.dims == other.dims
            && self.brackets.entries == other.brackets.entries
    }
}

/// One structure constant `[V_i, V_j] ⊇ c V_k` with 0-based indices.
pub type StructureConstant = (usize, usize, usize, Q);

impl MalcevPresentation {
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn degree(&self) -> usize {
        self.d
    }
    pub fn filtration_dims(&self) -> &[usize] {
        &self.dims
    }
    /// `dim G_i` for any `i >= 0` (`G_0 = G_1 = G`).
    pub fn dim_level(&self, i: usize) -> usize {
        if i == 0 {
            self.m
        } else if i <= self.d {
            self.dims[i - 1]
        } else {
            0
        }
    }
    /// Number of leading coordinates a horizontal character may use.
    pub fn horizontal_dim(&self) -> usize {
        self.m - self.dim_level(2)
    }
    pub fn step(&self) -> usize {
        self.step
    }
    /// Whether integer coordinate vectors form a subgroup under the law.
    /// Generic bracket tables need not satisfy this in second-kind coordinates.
    pub fn lattice_is_closed(&self) -> bool {
        self.mult_polys.iter().all(Poly::is_integer_valued)
    }

    /// Maximal height of the structure constants (at least 1).
    pub fn r0(&self) -> u64 {
        self.r0
    }
    pub fn mult_polys(&self) -> &[Poly] {
        &self.mult_polys
    }
    /// Sparse structure constants, both orderings of every nonzero bracket.
    pub fn structure_constants(&self) -> &[StructureConstant] {
        &self.brackets.entries
    }
    pub fn brackets(&self) -> &Brackets {
        &self.brackets
    }

    /// Filtration level of 0-based coordinate `i`.
    pub fn level_of(&self, i: usize) -> usize {
        let mut l = 1;
        while l < self.d && i >= self.m - self.dims[l] {
            l += 1;
        }
        l
    }

    /// Validate the bracket table and derive the group law by BCH.
    pub fn build(m: usize, d: usize, dims: Vec<usize>, constants: &[StructureConstant]) -> Result<Self> {
        let brackets = validate(m, d, &dims, constants)?;
        let (mult_polys, exp, log) = derive_law(&brackets);
        Self::assemble(m, d, dims, brackets, mult_polys, exp, log)
    }

    /// Validate constants but take a hand-written group law.
    pub(crate) fn with_law(
        m: usize,
        d: usize,
        dims: Vec<usize>,
        constants: &[StructureConstant],
        mult_polys: Vec<Poly>,
    ) -> Result<Self> {
        let brackets = validate(m, d, &dims, constants)?;
        let (_, exp, log) = derive_law_maps(&brackets);
        Self::assemble(m, d, dims, brackets, mult_polys, exp, log)
    }

    fn assemble(
        m: usize,
        d: usize,
        dims: Vec<usize>,
        brackets: Brackets,
        mult_polys: Vec<Poly>,
        exp: Vec<Poly>,
        log: Vec<Poly>,
    ) -> Result<Self> {
        let nv = 2 * m;
        let mut rest = Vec::with_capacity(m);
        for (i, p) in mult_polys.iter().enumerate() {
            let r = p.sub(&Poly::var(nv, i)).sub(&Poly::var(nv, m + i));
            for v in (i..m).chain(m + i..2 * m) {
                if r.uses_var(v) {
                    return Err(Error::InvalidPresentation(format!(
                        "group law coordinate {} is not triangular",
                        i + 1
                    )));
                }
            }
            rest.push(r.compile());
        }
        let step = lower_central_step(&brackets);
        let r0 = brackets.entries.iter().map(|e| height(&e.3)).max().unwrap_or(1).max(1);
        Ok(MalcevPresentation {
            m,
            d,
            dims,
            step,
            r0,
            mult: mult_polys.iter().map(Poly::compile).collect(),
            rest,
            mult_polys,
            exp: exp.iter().map(Poly::compile).collect(),
            log: log.iter().map(Poly::compile).collect(),
            brackets,
        })
    }

    fn check_dim<S>(&self, g: &[S]) -> Result<()> {
        if g.len() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, got: g.len() });
        }
        Ok(())
    }

    pub fn identity<S: Scalar>(&self) -> GroupElement<S> {
        GroupElement::new(vec![S::zero(); self.m])
    }

    pub fn element<S: Scalar>(&self, coords: Vec<S>) -> Result<GroupElement<S>> {
        self.check_dim(&coords)?;
        Ok(GroupElement::new(coords))
    }

    pub fn multiply<S: Scalar>(&self, a: &GroupElement<S>, b: &GroupElement<S>) -> Result<GroupElement<S>> {
        self.check_dim(&a.coords)?;
        self.check_dim(&b.coords)?;
        Ok(self.mul_unchecked(&a.coords, &b.coords))
    }

    pub(crate) fn mul_unchecked<S: Scalar>(&self, a: &[S], b: &[S]) -> GroupElement<S> {
        let m = self.m;
        let out = self
            .mult
            .iter()
            .map(|p| p.eval(|v| if v < m { a[v].clone() } else { b[v - m].clone() }))
            .collect();
        GroupElement::new(out)
    }

    pub fn inverse<S: Scalar>(&self, g: &GroupElement<S>) -> Result<GroupElement<S>> {
        self.check_dim(&g.coords)?;
        Ok(self.inv_unchecked(&g.coords))
    }

    pub(crate) fn inv_unchecked<S: Scalar>(&self, g: &[S]) -> GroupElement<S> {
        // (g h)_i = g_i + h_i + rest_i(g_<i, h_<i) = 0 solved coordinate by coordinate
        let m = self.m;
        let mut h: Vec<S> = Vec::with_capacity(m);
        for i in 0..m {
            let r = self.rest[i].eval(|v| if v < m { g[v].clone() } else { h[v - m].clone() });
            h.push(-(g[i].clone() + r));
        }
        GroupElement::new(h)
    }

    /// `g^r` for any integer `r`.
    pub fn power<S: Scalar>(&self, g: &GroupElement<S>, r: i64) -> Result<GroupElement<S>> {
        self.check_dim(&g.coords)?;
        let mut base = if r < 0 { self.inv_unchecked(&g.coords) } else { g.clone() };
        let mut e = r.unsigned_abs();
        let mut acc = self.identity::<S>();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_unchecked(&acc.coords, &base.coords);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul_unchecked(&base.coords, &base.coords);
            }
        }
        Ok(acc)
    }

    /// `exp(X)` for a Lie algebra element in first-kind coordinates.
    pub fn exp_coords<S: Scalar>(&self, x: &[S]) -> Result<GroupElement<S>> {
        self.check_dim(x)?;
        Ok(GroupElement::new(self.exp.iter().map(|p| p.eval(|v| x[v].clone())).collect()))
    }

    /// First-kind coordinates of `log(g)`.
    pub fn log_coords<S: Scalar>(&self, g: &GroupElement<S>) -> Result<Vec<S>> {
        self.check_dim(&g.coords)?;
        Ok(self.log.iter().map(|p| p.eval(|v| g.coords[v].clone())).collect())
    }

    /// Write `g = p * gamma` with `p` in `[0,1)^m` and `gamma` in the lattice.
    ///
    /// Coordinates are normalised from the first to the last: right
    /// multiplication by `exp(t V_i)` leaves coordinates below `i` untouched.
    pub fn reduce_mod_lattice<S: Scalar>(&self, g: &GroupElement<S>) -> Result<(ManifoldPoint<S>, GroupElement<S>)> {
        self.check_dim(&g.coords)?;
        let mut cur = g.coords.clone();
        let mut shifts: Vec<S> = Vec::with_capacity(self.m);
        for i in 0..self.m {
            let mut t = cur[i].floor();
            let mut r = cur[i].clone() - t.clone();
            if r >= S::one() {
                // float rounding of a tiny negative coordinate
                t = t + S::one();
                r = r - S::one();
            }
            if r < S::zero() {
                r = S::zero();
            }
            if !t.is_zero() {
                let mut e = vec![S::zero(); self.m];
                e[i] = -t.clone();
                cur = self.mul_unchecked(&cur, &e).coords;
            }
            // coordinate i of the product is exactly cur_i - t
            cur[i] = r;
            shifts.push(t);
        }
        // g = p * exp(t_m V_m) ... exp(t_1 V_1)
        let mut gamma = self.identity::<S>();
        for i in (0..self.m).rev() {
            if shifts[i].is_zero() {
                continue;
            }
            let mut e = vec![S::zero(); self.m];
            e[i] = shifts[i].clone();
            gamma = self.mul_unchecked(&gamma.coords, &e);
        }
        if !S::EXACT {
            for c in gamma.coords.iter_mut() {
                *c = c.round_ties_zero();
            }
        }
        Ok((ManifoldPoint::new_unchecked(cur), gamma))
    }

    /// Right-invariant sup-norm distance `|psi(a b^{-1})|_inf`.
    pub fn dist<S: Scalar>(&self, a: &GroupElement<S>, b: &GroupElement<S>) -> Result<f64> {
        self.check_dim(&a.coords)?;
        self.check_dim(&b.coords)?;
        let binv = self.inv_unchecked(&b.coords);
        let c = self.mul_unchecked(&a.coords, &binv.coords);
        Ok(c.coords.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max))
    }

    /// Quotient distance, minimising over lattice translates in `{-1,0,1}^m`.
    pub fn manifold_dist(&self, x: &ManifoldPoint<f64>, y: &ManifoldPoint<f64>) -> Result<f64> {
        self.check_dim(&x.coords)?;
        self.check_dim(&y.coords)?;
        let m = self.m;
        let xe = x.as_element();
        let ye = y.as_element();
        let mut best = f64::INFINITY;
        let total = 3usize.pow(m as u32);
        for code in 0..total {
            let mut c = code;
            let gamma: Vec<f64> = (0..m)
                .map(|_| {
                    let v = (c % 3) as f64 - 1.0;
                    c /= 3;
                    v
                })
                .collect();
            let yg = self.mul_unchecked(&ye.coords, &gamma);
            best = best.min(self.dist(&xe, &yg)?);
        }
        Ok(best)
    }

    /// `eta(g) = a . psi(g) mod 1`.
    pub fn char_eval<S: Scalar>(&self, eta: &HorizontalCharacter, g: &GroupElement<S>) -> Result<S> {
        self.check_dim(&g.coords)?;
        self.check_character(eta)?;
        Ok(eta.apply(&g.coords).frac())
    }

    pub fn check_character(&self, eta: &HorizontalCharacter) -> Result<()> {
        if eta.a.len() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, got: eta.a.len() });
        }
        if eta.a[self.horizontal_dim()..].iter().any(|&x| x != 0) {
            return Err(Error::NotHorizontal(eta.a.clone()));
        }
        Ok(())
    }

    /// Smallest `r <= max_r` with `g^r` in the lattice.
    pub fn is_rational_element<S: Scalar>(&self, g: &GroupElement<S>, max_r: u64) -> Result<Option<u64>> {
        self.check_dim(&g.coords)?;
        let mut p = g.clone();
        for r in 1..=max_r {
            if p.coords.iter().all(Scalar::is_integral) {
                return Ok(Some(r));
            }
            p = self.mul_unchecked(&p.coords, &g.coords);
        }
        Ok(None)
    }

    /// Same-presentation guard used by sequence operations.
    pub fn ensure_same(&self, other: &MalcevPresentation) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::PresentationMismatch)
        }
    }
}

fn validate(m: usize, d: usize, dims: &[usize], constants: &[StructureConstant]) -> Result<Brackets> {
    if m > 0 && d == 0 {
        return Err(Error::InvalidPresentation("degree must be positive".into()));
    }
    if dims.len() != d {
        return Err(Error::InvalidPresentation(format!(
            "expected {d} filtration dimensions, got {}",
            dims.len()
        )));
    }
    if d > 0 && dims[0] != m {
        return Err(Error::InvalidPresentation("first filtration dimension must equal m".into()));
    }
    if dims.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InvalidPresentation("filtration dimensions must be nonincreasing".into()));
    }
    let mut table = vec![vec![vec![Q::zero(); m]; m]; m];
    let mut given = vec![vec![false; m]; m];
    for (i, j, k, c) in constants {
        let (i, j, k) = (*i, *j, *k);
        if i >= m || j >= m || k >= m {
            return Err(Error::InvalidPresentation(format!(
                "bracket index out of range: ({}, {}, {})",
                i + 1,
                j + 1,
                k + 1
            )));
        }
        if i == j {
            if !c.is_zero() {
                return Err(Error::Antisymmetry { i: i + 1, j: j + 1 });
            }
            continue;
        }
        table[i][j][k] += c;
        given[i][j] = true;
    }
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            if given[i][j] && given[j][i] {
                for k in 0..m {
                    if table[i][j][k] != -table[j][i][k].clone() {
                        return Err(Error::Antisymmetry { i: i + 1, j: j + 1 });
                    }
                }
            } else if given[i][j] {
                for k in 0..m {
                    table[j][i][k] = -table[i][j][k].clone();
                }
                given[j][i] = true;
            }
        }
    }
    let mut entries = Vec::new();
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                if !table[i][j][k].is_zero() {
                    entries.push((i, j, k, table[i][j][k].clone()));
                }
            }
        }
    }
    let br = Brackets { m, entries };
    let basis = |i: usize| -> Vec<Q> { (0..m).map(|t| if t == i { Q::one() } else { Q::zero() }).collect() };
    // Jacobi on basis triples
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let (x, y, z) = (basis(i), basis(j), basis(k));
                let a = br.bracket_q(&x, &br.bracket_q(&y, &z));
                let b = br.bracket_q(&y, &br.bracket_q(&z, &x));
                let c = br.bracket_q(&z, &br.bracket_q(&x, &y));
                if (0..m).any(|t| !(&a[t] + &b[t] + &c[t]).is_zero()) {
                    return Err(Error::JacobiViolation { i: i + 1, j: j + 1, k: k + 1 });
                }
            }
        }
    }
    let dim_level = |l: usize| -> usize {
        if l == 0 {
            m
        } else if l <= d {
            dims[l - 1]
        } else {
            0
        }
    };
    let level_of = |i: usize| -> usize {
        let mut l = 1;
        while l < d && i >= m - dims[l] {
            l += 1;
        }
        l
    };
    for (i, j, k, _) in &br.entries {
        let lev = level_of(*i) + level_of(*j);
        let start = m - dim_level(lev);
        if *k < start {
            return Err(Error::FiltrationViolation { i: i + 1, j: j + 1, level: lev });
        }
    }
    // Mal'cev condition: every tail span is an ideal
    for start in 1..m {
        for (i, j, k, _) in &br.entries {
            if *j >= start && *k < start {
                let _ = i;
                return Err(Error::NotAnIdeal { start: start + 1 });
            }
        }
    }
    let step = lower_central_step(&br);
    if step > MAX_STEP {
        return Err(Error::StepTooLarge { step });
    }
    Ok(br)
}

/// Nilpotency step from the lower central series (0 for the trivial algebra).
fn lower_central_step(br: &Brackets) -> usize {
    let m = br.m;
    if m == 0 {
        return 0;
    }
    let unit = |i: usize| -> Vec<Q> { (0..m).map(|t| if t == i { Q::one() } else { Q::zero() }).collect() };
    let mut cur: Vec<Vec<Q>> = (0..m).map(unit).collect();
    let mut step = 0;
    while linalg::rank(&cur) > 0 {
        step += 1;
        if step > m + 1 {
            break;
        }
        let mut next = Vec::new();
        for i in 0..m {
            for w in &cur {
                let b = br.bracket_q(&unit(i), w);
                if b.iter().any(|x| !x.is_zero()) {
                    next.push(b);
                }
            }
        }
        cur = next;
    }
    step
}

fn single(nvars: usize, m: usize, i: usize, coeff: Poly) -> PolyVec {
    let mut v = vec![Poly::zero(nvars); m];
    v[i] = coeff;
    v
}

/// `log(exp(x_0 V_1) ... exp(x_{m-1} V_m))` with variables starting at `offset`.
fn log_of_product(br: &Brackets, nvars: usize, offset: usize) -> PolyVec {
    let m = br.m;
    let mut z = vec![Poly::zero(nvars); m];
    for i in 0..m {
        let term = single(nvars, m, i, Poly::var(nvars, offset + i));
        z = bch(br, &z, &term);
    }
    z
}

/// Second-kind coordinates of `exp(X)`, peeling one basis direction at a time.
fn peel(br: &Brackets, mut x: PolyVec) -> Vec<Poly> {
    let m = br.m;
    let nvars = x.first().map(|p| p.nvars).unwrap_or(0);
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let p = x[i].clone();
        let neg = single(nvars, m, i, p.scale(&-Q::one()));
        x = bch(br, &neg, &x);
        debug_assert!(x[i].is_zero());
        out.push(p);
    }
    out
}

fn derive_law_maps(br: &Brackets) -> (usize, Vec<Poly>, Vec<Poly>) {
    let m = br.m;
    let exp_in: PolyVec = (0..m).map(|i| Poly::var(m, i)).collect();
    let exp = peel(br, exp_in);
    let log = log_of_product(br, m, 0);
    (m, exp, log)
}

fn derive_law(br: &Brackets) -> (Vec<Poly>, Vec<Poly>, Vec<Poly>) {
    let m = br.m;
    let nv = 2 * m;
    let la = log_of_product(br, nv, 0);
    let lb = log_of_product(br, nv, m);
    let prod = bch(br, &la, &lb);
    let mult = peel(br, prod);
    let (_, exp, log) = derive_law_maps(br);
    (mult, exp, log)
}

/// Convenience: `|x|_inf` of a coordinate vector as `f64`.
pub fn sup_norm<S: Scalar>(x: &[S]) -> f64 {
    x.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max)
}

/// Exact sup norm for rational vectors.
pub fn sup_norm_q(x: &[Q]) -> Q {
    x.iter().map(Signed::abs).fold(Q::zero(), |a, b| if b > a { b } else { a })
}

#[cfg(test)]
mod tests;
