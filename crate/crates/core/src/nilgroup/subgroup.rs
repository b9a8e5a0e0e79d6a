//! Kernels of horizontal characters as presentations in their own right.

use std::sync::Arc;

use num_traits::{One, Zero};

use super::{HorizontalCharacter, GroupElement, MalcevPresentation, StructureConstant};
use crate::error::{Error, Result};
use crate::linalg::{integer_kernel, solve_columns};
use crate::scalar::{qi, Coeff, Scalar, Q};

/// `G' = ker(eta)` with an adapted basis.
///
/// The horizontal part of the basis is `log(gamma_a)` where `gamma_a` runs over
/// an integer basis of the kernel lattice, so integer child coordinates are
/// exactly the lattice points of `G'`. The remaining basis vectors are the
/// parent's tail `V_{k+1}, ..., V_m` unchanged.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub parent: Arc<MalcevPresentation>,
    pub child: Arc<MalcevPresentation>,
    pub eta: HorizontalCharacter,
    /// First-kind coordinates, in the parent algebra, of each child basis vector.
    pub basis: Vec<Vec<Q>>,
    /// Integer horizontal parts of the kernel lattice basis.
    pub horizontal: Vec<Vec<i64>>,
    basis_c: Vec<Vec<Coeff>>,
    left_inv: Vec<Vec<Coeff>>,
    k: usize,
}

impl Subgroup {
    pub fn horizontal_kernel(parent: Arc<MalcevPresentation>, eta: &HorizontalCharacter) -> Result<Self> {
        parent.check_character(eta)?;
        if eta.is_trivial() {
            return Err(Error::InvalidArgument("kernel of the trivial character".into()));
        }
        let m = parent.m();
        let k = parent.horizontal_dim();
        let horizontal = integer_kernel(&eta.a[..k]);
        let mut basis: Vec<Vec<Q>> = Vec::with_capacity(m - 1);
        for c in &horizontal {
            let mut coords: Vec<Q> = c.iter().map(|&x| qi(x)).collect();
            coords.resize(m, Q::zero());
            let g = GroupElement::new(coords);
            basis.push(parent.log_coords(&g)?);
        }
        for t in k..m {
            let mut v = vec![Q::zero(); m];
            v[t] = Q::one();
            basis.push(v);
        }
        let mp = m - 1;
        let mut constants: Vec<StructureConstant> = Vec::new();
        for p in 0..mp {
            for q in p + 1..mp {
                let br = parent.brackets().bracket_q(&basis[p], &basis[q]);
                if br[..k].iter().any(|x| !x.is_zero()) {
                    return Err(Error::InvalidPresentation("kernel is not closed under brackets".into()));
                }
                for (t, c) in br.iter().enumerate().skip(k) {
                    if !c.is_zero() {
                        constants.push((p, q, t - 1, c.clone()));
                    }
                }
            }
        }
        let d = parent.degree();
        let mut dims: Vec<usize> = (1..=d).map(|l| parent.dim_level(l)).collect();
        if d > 0 {
            dims[0] = mp;
        }
        let child = Arc::new(MalcevPresentation::build(mp, d, dims, &constants)?);

        // t = L x recovers kernel-lattice coordinates from horizontal parts
        let cols: Vec<Vec<Q>> = horizontal.iter().map(|c| c.iter().map(|&x| qi(x)).collect()).collect();
        let n = cols.len();
        let gram: Vec<Vec<Q>> = (0..n)
            .map(|a| (0..n).map(|b| dot(&cols[a], &cols[b])).collect())
            .collect();
        let mut gram_inv_cols: Vec<Vec<Q>> = Vec::with_capacity(n);
        for a in 0..n {
            let e: Vec<Q> = (0..n).map(|b| if a == b { Q::one() } else { Q::zero() }).collect();
            gram_inv_cols.push(solve_columns(&gram, &e).expect("kernel basis is independent"));
        }
        let left_inv: Vec<Vec<Coeff>> = (0..n)
            .map(|a| {
                (0..k)
                    .map(|r| {
                        let mut acc = Q::zero();
                        for (b, col) in cols.iter().enumerate() {
                            acc += &gram_inv_cols[b][a] * &col[r];
                        }
                        Coeff::new(acc)
                    })
                    .collect()
            })
            .collect();
        let basis_c = basis.iter().map(|v| v.iter().cloned().map(Coeff::new).collect()).collect();
        Ok(Subgroup {
            parent,
            child,
            eta: eta.clone(),
            basis,
            horizontal,
            basis_c,
            left_inv,
            k,
        })
    }

    fn horizontal_product<S: Scalar>(&self, t: &[S]) -> GroupElement<S> {
        let mut h = self.parent.identity::<S>();
        for (a, ta) in t.iter().enumerate() {
            if ta.is_zero() {
                continue;
            }
            let x: Vec<S> = self.basis_c[a].iter().map(|c| S::from_coeff(c) * ta.clone()).collect();
            let e = self.parent.exp_coords(&x).expect("dimension");
            h = self.parent.mul_unchecked(&h.coords, &e.coords);
        }
        h
    }

    /// Child coordinates to parent coordinates.
    pub fn to_parent<S: Scalar>(&self, y: &GroupElement<S>) -> Result<GroupElement<S>> {
        let mp = self.child.m();
        if y.coords.len() != mp {
            return Err(Error::DimensionMismatch { expected: mp, got: y.coords.len() });
        }
        let nh = self.horizontal.len();
        let h = self.horizontal_product(&y.coords[..nh]);
        let mut tail = vec![S::zero(); self.k];
        tail.extend(y.coords[nh..].iter().cloned());
        Ok(self.parent.mul_unchecked(&h.coords, &tail))
    }

    /// Parent coordinates of an element of `G'` to child coordinates.
    pub fn from_parent<S: Scalar>(&self, g: &GroupElement<S>) -> Result<GroupElement<S>> {
        let m = self.parent.m();
        if g.coords.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: g.coords.len() });
        }
        let scale = 1.0 + super::sup_norm(&g.coords);
        let outside = |x: &S| if S::EXACT { !x.is_zero() } else { x.to_f64().abs() > 1e-7 * scale };
        if outside(&self.eta.apply(&g.coords)) {
            return Err(Error::InvalidArgument("element is not in the kernel subgroup".into()));
        }
        let t: Vec<S> = self
            .left_inv
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&g.coords[..self.k])
                    .fold(S::zero(), |acc, (c, x)| acc + S::from_coeff(c) * x.clone())
            })
            .collect();
        let h = self.horizontal_product(&t);
        let hinv = self.parent.inv_unchecked(&h.coords);
        let r = self.parent.mul_unchecked(&hinv.coords, &g.coords);
        if r.coords[..self.k].iter().any(outside) {
            return Err(Error::InvalidArgument("element is not in the kernel subgroup".into()));
        }
        let mut out = t;
        out.extend(r.coords[self.k..].iter().cloned());
        Ok(GroupElement::new(out))
    }
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).fold(Q::zero(), |s, v| s + v)
}

/// Nested kernels `G = G_0 ⊇ G_1 ⊇ ... ⊇ G_k`.
#[derive(Clone, Debug)]
pub struct SubgroupChain {
    pub root: Arc<MalcevPresentation>,
    pub levels: Vec<Subgroup>,
}

impl SubgroupChain {
    pub fn new(root: Arc<MalcevPresentation>) -> Self {
        SubgroupChain { root, levels: Vec::new() }
    }

    pub fn leaf(&self) -> &Arc<MalcevPresentation> {
        self.levels.last().map(|s| &s.child).unwrap_or(&self.root)
    }

    pub fn push(&mut self, eta: &HorizontalCharacter) -> Result<()> {
        let parent = self.leaf().clone();
        self.levels.push(Subgroup::horizontal_kernel(parent, eta)?);
        Ok(())
    }

    /// Map an element of level `level` (0 = root) up to the root.
    pub fn to_root<S: Scalar>(&self, level: usize, y: &GroupElement<S>) -> Result<GroupElement<S>> {
        let mut cur = y.clone();
        for s in self.levels[..level].iter().rev() {
            cur = s.to_parent(&cur)?;
        }
        Ok(cur)
    }

    /// Map a root element lying in the leaf subgroup down to leaf coordinates.
    pub fn from_root<S: Scalar>(&self, g: &GroupElement<S>) -> Result<GroupElement<S>> {
        let mut cur = g.clone();
        for s in &self.levels {
            cur = s.from_parent(&cur)?;
        }
        Ok(cur)
    }

    /// Leaf basis vectors as rational combinations of the root basis
    /// (first-kind coordinates in the root algebra).
    pub fn basis_in_root(&self) -> Vec<Vec<Q>> {
        let m = self.root.m();
        let mut cur: Vec<Vec<Q>> = (0..m)
            .map(|i| (0..m).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
            .collect();
        for s in &self.levels {
            cur = s
                .basis
                .iter()
                .map(|v| {
                    let mut acc = vec![Q::zero(); m];
                    for (i, c) in v.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        for (slot, b) in acc.iter_mut().zip(&cur[i]) {
                            *slot += c * b;
                        }
                    }
                    acc
                })
                .collect();
        }
        cur
    }
}
