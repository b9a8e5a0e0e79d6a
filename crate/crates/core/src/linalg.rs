//! Small exact linear algebra helpers (rational rank/solve, integer kernels).

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::scalar::Q;

/// Rank of a list of rational row vectors.
pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut a: Vec<Vec<Q>> = rows.to_vec();
    let ncols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let piv = a[r][c].clone();
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = &a[i][c] / &piv;
                for cc in c..ncols {
                    let t = &a[r][cc] * &f;
                    a[i][cc] -= t;
                }
            }
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    r
}

/// Solve `sum_i t_i * cols[i] = b` for `t`, assuming the columns are independent.
pub fn solve_columns(cols: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = cols.len();
    let rows = b.len();
    // augmented matrix rows x (n + 1)
    let mut a: Vec<Vec<Q>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Q> = cols.iter().map(|c| c[r].clone()).collect();
            row.push(b[r].clone());
            row
        })
        .collect();
    let mut piv_row = 0;
    let mut pivots = Vec::with_capacity(n);
    for c in 0..n {
        let p = (piv_row..rows).find(|&i| !a[i][c].is_zero())?;
        a.swap(piv_row, p);
        let piv = a[piv_row][c].clone();
        for cc in c..=n {
            let v = &a[piv_row][cc] / &piv;
            a[piv_row][cc] = v;
        }
        for i in 0..rows {
            if i != piv_row && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for cc in c..=n {
                    let t = &a[piv_row][cc] * &f;
                    a[i][cc] -= t;
                }
            }
        }
        pivots.push(piv_row);
        piv_row += 1;
    }
    // inconsistent system
    if (piv_row..rows).any(|i| !a[i][n].is_zero()) {
        return None;
    }
    Some(pivots.iter().map(|&r| a[r][n].clone()).collect())
}

/// Extended gcd: returns `(g, x, y)` with `a x + b y = g >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let e = (a as i128).extended_gcd(&(b as i128));
    let (mut g, mut x, mut y) = (e.gcd, e.x, e.y);
    if g < 0 {
        g = -g;
        x = -x;
        y = -y;
    }
    (g as i64, x as i64, y as i64)
}

/// Unimodular `U` with `a U = (g, 0, ..., 0)`; returned as columns.
fn unimodular_reduce(a: &[i64]) -> (i64, Vec<Vec<i64>>) {
    let k = a.len();
    let mut row: Vec<i64> = a.to_vec();
    let mut cols: Vec<Vec<i64>> = (0..k)
        .map(|i| (0..k).map(|j| i64::from(i == j)).collect())
        .collect();
    for j in 1..k {
        if row[j] == 0 {
            continue;
        }
        let (g, x, y) = ext_gcd(row[0], row[j]);
        let (p, q) = (row[0] / g, row[j] / g);
        // [c0 cj] <- [x c0 + y cj, -q c0 + p cj]
        let c0 = cols[0].clone();
        let cj = cols[j].clone();
        cols[0] = c0.iter().zip(&cj).map(|(u, v)| x * u + y * v).collect();
        cols[j] = c0.iter().zip(&cj).map(|(u, v)| -q * u + p * v).collect();
        row[0] = g;
        row[j] = 0;
    }
    (row[0], cols)
}

/// Basis of the saturated lattice `{x in Z^k : a . x = 0}`.
///
/// Vectors are size-reduced against each other and normalised so that the
/// first nonzero entry is positive.
pub fn integer_kernel(a: &[i64]) -> Vec<Vec<i64>> {
    let k = a.len();
    if a.iter().all(|&x| x == 0) {
        return (0..k)
            .map(|i| (0..k).map(|j| i64::from(i == j)).collect())
            .collect();
    }
    let (_, cols) = unimodular_reduce(a);
    let mut basis: Vec<Vec<i64>> = cols[1..].to_vec();
    // pairwise size reduction keeps entries small for the common cases
    for _ in 0..4 {
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                if i == j {
                    continue;
                }
                let nj: i128 = basis[j].iter().map(|&v| (v as i128) * (v as i128)).sum();
                if nj == 0 {
                    continue;
                }
                let dot: i128 = basis[i]
                    .iter()
                    .zip(&basis[j])
                    .map(|(&u, &v)| (u as i128) * (v as i128))
                    .sum();
                let mu = (2 * dot + nj).div_euclid(2 * nj);
                if mu != 0 {
                    let bj = basis[j].clone();
                    for (x, y) in basis[i].iter_mut().zip(&bj) {
                        *x -= (mu as i64) * y;
                    }
                }
            }
        }
    }
    for v in &mut basis {
        if let Some(f) = v.iter().find(|&&x| x != 0) {
            if *f < 0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
    }
    basis
}

/// An integer vector `x` with `a . x = gcd(a)`.
pub fn bezout_vector(a: &[i64]) -> (i64, Vec<i64>) {
    let (g, cols) = unimodular_reduce(a);
    if g < 0 {
        (-g, cols[0].iter().map(|v| -v).collect())
    } else {
        (g, cols[0].clone())
    }
}

pub fn max_abs(v: &[i64]) -> i64 {
    v.iter().map(|x| x.abs()).max().unwrap_or(0)
}

pub fn q_max_abs(v: &[Q]) -> Q {
    v.iter().map(|x| x.abs()).fold(Q::zero(), |a, b| if b > a { b } else { a })
}
