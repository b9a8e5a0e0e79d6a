//! Sparse multivariate polynomials over the rationals.
//!
//! Used at presentation-build time to derive the group law symbolically, then
//! compiled into flat term lists for evaluation in either scalar flavor.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::scalar::{Coeff, Scalar, Q};

/// Exponent vector, one entry per variable.
pub type Monomial = Vec<u8>;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    pub nvars: usize,
    pub terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Poly::zero(nvars);
        p.terms.insert(e, Q::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, mono: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, s: &Q) -> Poly {
        let mut out = Poly::zero(self.nvars);
        if s.is_zero() {
            return out;
        }
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    /// Whether the polynomial maps `Z^nvars` into `Z`: every coefficient in the
    /// basis of products of `C(x_v, j_v)` must be an integer.
    pub fn is_integer_valued(&self) -> bool {
        // x^k = sum_j T(k, j) C(x, j) with T(k, j) = j! S(k, j) = j (T(k-1, j) + T(k-1, j-1))
        let max_deg = self.terms.keys().flat_map(|m| m.iter().copied()).max().unwrap_or(0) as usize;
        let mut conv = vec![vec![Q::zero(); max_deg + 1]; max_deg + 1];
        conv[0][0] = Q::one();
        for k in 1..=max_deg {
            for j in 1..=k {
                conv[k][j] = Q::from_integer((j as i64).into()) * (&conv[k - 1][j] + &conv[k - 1][j - 1]);
            }
        }
        let mut out: BTreeMap<Monomial, Q> = BTreeMap::new();
        for (mono, c) in &self.terms {
            let mut partial: Vec<(Monomial, Q)> = vec![(vec![0; self.nvars], c.clone())];
            for (v, &k) in mono.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let mut next = Vec::new();
                for (m, a) in &partial {
                    for j in 1..=k as usize {
                        let mut m2 = m.clone();
                        m2[v] = j as u8;
                        next.push((m2, a * &conv[k as usize][j]));
                    }
                }
                partial = next;
            }
            for (m, a) in partial {
                *out.entry(m).or_insert_with(Q::zero) += a;
            }
        }
        out.values().all(|c| c.is_integer())
    }

    /// Whether any term involves variable `v`.
    pub fn uses_var(&self, v: usize) -> bool {
        self.terms.keys().any(|m| m[v] > 0)
    }

    pub fn eval_q(&self, x: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    t *= &x[i];
                }
            }
            acc += t;
        }
        acc
    }

    pub fn compile(&self) -> CompiledPoly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let factors = m
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i as u16, e))
                    .collect();
                (Coeff::new(c.clone()), factors)
            })
            .collect();
        CompiledPoly { terms }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, &e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{i}")?,
                    _ => write!(f, "*x{i}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

/// Flat term list: `coeff * prod x[var]^pow`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompiledPoly {
    pub terms: Vec<(Coeff, Vec<(u16, u8)>)>,
}

impl CompiledPoly {
    /// Evaluate with variables supplied by `var(i)`.
    pub fn eval<S: Scalar>(&self, var: impl Fn(usize) -> S) -> S {
        let mut acc = S::zero();
        for (c, factors) in &self.terms {
            let mut t = S::from_coeff(c);
            for &(v, e) in factors {
                let x = var(v as usize);
                for _ in 0..e {
                    t = t * x.clone();
                }
            }
            acc = acc + t;
        }
        acc
    }
}

/// Lie-algebra element whose coordinates are polynomials.
pub type PolyVec = Vec<Poly>;

/// Structure constants in sparse form: `[V_i, V_j] = sum_k c * V_k`.
#[derive(Clone, Debug, Default)]
pub struct Brackets {
    pub m: usize,
    pub entries: Vec<(usize, usize, usize, Q)>,
}

impl Brackets {
    pub fn bracket(&self, x: &PolyVec, y: &PolyVec) -> PolyVec {
        let nvars = x.first().map(|p| p.nvars).unwrap_or(0);
        let mut out = vec![Poly::zero(nvars); self.m];
        for (i, j, k, c) in &self.entries {
            if x[*i].is_zero() || y[*j].is_zero() {
                continue;
            }
            let t = x[*i].mul(&y[*j]).scale(c);
            out[*k] = out[*k].add(&t);
        }
        out
    }

    /// Numeric bracket on rational vectors.
    pub fn bracket_q(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.m];
        for (i, j, k, c) in &self.entries {
            if x[*i].is_zero() || y[*j].is_zero() {
                continue;
            }
            out[*k] += &x[*i] * &y[*j] * c;
        }
        out
    }
}

fn vadd(a: &PolyVec, b: &PolyVec) -> PolyVec {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

fn vscale(a: &PolyVec, s: &Q) -> PolyVec {
    a.iter().map(|x| x.scale(s)).collect()
}

/// Baker-Campbell-Hausdorff product truncated after degree four, exact for
/// algebras of nilpotency step at most four.
pub fn bch(br: &Brackets, x: &PolyVec, y: &PolyVec) -> PolyVec {
    let xy = br.bracket(x, y);
    let x_xy = br.bracket(x, &xy);
    let y_xy = br.bracket(y, &xy);
    let y_x_xy = br.bracket(y, &x_xy);
    let mut z = vadd(x, y);
    z = vadd(&z, &vscale(&xy, &Q::new(1.into(), 2.into())));
    z = vadd(&z, &vscale(&x_xy, &Q::new(1.into(), 12.into())));
    z = vadd(&z, &vscale(&y_xy, &Q::new((-1).into(), 12.into())));
    z = vadd(&z, &vscale(&y_x_xy, &Q::new((-1).into(), 24.into())));
    z
}

/// Same truncated BCH on numeric rational vectors.
pub fn bch_q(br: &Brackets, x: &[Q], y: &[Q]) -> Vec<Q> {
    let xy = br.bracket_q(x, y);
    let x_xy = br.bracket_q(x, &xy);
    let y_xy = br.bracket_q(y, &xy);
    let y_x_xy = br.bracket_q(y, &x_xy);
    let c2 = Q::new(1.into(), 2.into());
    let c3 = Q::new(1.into(), 12.into());
    let c4 = Q::new(1.into(), 24.into());
    (0..br.m)
        .map(|k| {
            &x[k] + &y[k] + &xy[k] * &c2 + &x_xy[k] * &c3 - &y_xy[k] * &c3 - &y_x_xy[k] * &c4
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn arithmetic_cancels_terms() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let s = x.add(&y);
        let d = s.sub(&y);
        assert_eq!(d, x);
        let sq = s.mul(&s);
        assert_eq!(sq.terms.len(), 3);
        assert_eq!(sq.eval_q(&[q(1, 2), q(1, 3)]), q(25, 36));
    }

    #[test]
    fn compiled_matches_exact_eval() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = x.mul(&x).mul(&y).scale(&q(-3, 7)).add(&Poly::constant(2, q(1, 5)));
        let c = p.compile();
        let xs = [q(2, 3), q(-5, 4)];
        assert_eq!(c.eval::<Q>(|i| xs[i].clone()), p.eval_q(&xs));
        let f: f64 = c.eval(|i| [2.0 / 3.0, -1.25][i]);
        assert!((f - Scalar::to_f64(&p.eval_q(&xs))).abs() < 1e-12);
    }

    #[test]
    fn integer_valued_polynomials() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let one = Poly::constant(2, q(1, 1));
        // C(x, 2) C(y, 3)
        let cx2 = x.mul(&x.sub(&one)).scale(&q(1, 2));
        let cy3 = y.mul(&y.sub(&one)).mul(&y.sub(&one).sub(&one)).scale(&q(1, 6));
        assert!(cx2.mul(&cy3).is_integer_valued());
        assert!(!x.mul(&x).mul(&y).scale(&q(1, 2)).is_integer_valued());
        assert!(!cx2.add(&Poly::constant(2, q(1, 3))).is_integer_valued());
        for a in -4i64..=4 {
            for b in -4i64..=4 {
                assert!(cx2.mul(&cy3).eval_q(&[q(a, 1), q(b, 1)]).is_integer());
            }
        }
    }
}
