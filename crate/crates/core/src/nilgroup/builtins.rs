//! Hand-coded presentations. The generic BCH engine is checked against these
//! in the test suite.

use num_traits::One;

use super::{MalcevPresentation, StructureConstant};
use crate::poly::{Monomial, Poly};
use crate::scalar::Q;

impl MalcevPresentation {
    /// The abelian torus `R^m / Z^m` with the trivial degree-1 filtration.
    pub fn torus(m: usize) -> Self {
        let nv = 2 * m;
        let law = (0..m).map(|i| Poly::var(nv, i).add(&Poly::var(nv, m + i))).collect();
        let (d, dims) = if m == 0 { (0, vec![]) } else { (1, vec![m]) };
        Self::with_law(m, d, dims, &[], law).expect("torus is valid")
    }

    /// Heisenberg group with `[V_1, V_2] = V_3`.
    ///
    /// Law: `(x,y,z)(x',y',z') = (x+x', y+y', z+z'-x'y)`.
    pub fn heisenberg() -> Self {
        Self::heisenberg_n(1)
    }

    /// Five-dimensional Heisenberg group, basis `X_1, X_2, Y_1, Y_2, Z`.
    pub fn heisenberg5() -> Self {
        Self::heisenberg_n(2)
    }

    fn heisenberg_n(n: usize) -> Self {
        let m = 2 * n + 1;
        let nv = 2 * m;
        let z = m - 1;
        let constants: Vec<StructureConstant> = (0..n).map(|i| (i, n + i, z, Q::one())).collect();
        let mut law: Vec<Poly> = (0..m).map(|i| Poly::var(nv, i).add(&Poly::var(nv, m + i))).collect();
        for i in 0..n {
            // - x'_i y_i
            let t = Poly::var(nv, m + i).mul(&Poly::var(nv, n + i)).scale(&-Q::one());
            law[z] = law[z].add(&t);
        }
        Self::with_law(m, 2, vec![m, 1], &constants, law).expect("Heisenberg is valid")
    }

    /// Direct product, with bases merged layer by layer so tails stay ideals.
    pub fn direct_product(a: &MalcevPresentation, b: &MalcevPresentation) -> Self {
        let d = a.d.max(b.d);
        let m = a.m + b.m;
        // new index for every old coordinate, layer by layer
        let mut map_a = vec![0; a.m];
        let mut map_b = vec![0; b.m];
        let mut next = 0;
        for l in 1..=d {
            for (i, slot) in map_a.iter_mut().enumerate() {
                if a.level_of(i) == l {
                    *slot = next;
                    next += 1;
                }
            }
            for (i, slot) in map_b.iter_mut().enumerate() {
                if b.level_of(i) == l {
                    *slot = next;
                    next += 1;
                }
            }
        }
        debug_assert_eq!(next, m);
        let dims: Vec<usize> = (1..=d).map(|l| a.dim_level(l) + b.dim_level(l)).collect();
        let mut constants = Vec::new();
        for (i, j, k, c) in &a.brackets.entries {
            constants.push((map_a[*i], map_a[*j], map_a[*k], c.clone()));
        }
        for (i, j, k, c) in &b.brackets.entries {
            constants.push((map_b[*i], map_b[*j], map_b[*k], c.clone()));
        }
        let nv = 2 * m;
        let remap = |p: &Poly, map: &[usize], src_m: usize| -> Poly {
            let mut out = Poly::zero(nv);
            for (mono, c) in &p.terms {
                let mut e: Monomial = vec![0; nv];
                for (v, &pw) in mono.iter().enumerate() {
                    if pw == 0 {
                        continue;
                    }
                    let nvar = if v < src_m { map[v] } else { m + map[v - src_m] };
                    e[nvar] = pw;
                }
                out.terms.insert(e, c.clone());
            }
            out
        };
        let mut law = vec![Poly::zero(nv); m];
        for (i, p) in a.mult_polys.iter().enumerate() {
            law[map_a[i]] = remap(p, &map_a, a.m);
        }
        for (i, p) in b.mult_polys.iter().enumerate() {
            law[map_b[i]] = remap(p, &map_b, b.m);
        }
        Self::with_law(m, d, dims, &constants, law).expect("product of valid presentations")
    }
}
