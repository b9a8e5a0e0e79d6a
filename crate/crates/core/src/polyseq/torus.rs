use crate::scalar::{binom, Scalar};

/// A polynomial `R -> R/Z` in the binomial basis: `f(n) = sum_i alpha_i C(n, i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoly<S> {
    pub alpha: Vec<S>,
}

fn pow_u64<S: Scalar>(base: u64, e: usize) -> S {
    let mut acc = S::one();
    let b = S::from_i128(base as i128);
    for _ in 0..e {
        acc = acc * b.clone();
    }
    acc
}

impl<S: Scalar> TorusPoly<S> {
    pub fn new(alpha: Vec<S>) -> Self {
        TorusPoly { alpha }
    }

    pub fn degree(&self) -> usize {
        self.alpha.len().saturating_sub(1)
    }

    /// Unreduced value at `n`.
    pub fn eval(&self, n: i64) -> S {
        self.alpha
            .iter()
            .enumerate()
            .fold(S::zero(), |acc, (i, a)| acc + S::from_i128(binom(n, i)) * a.clone())
    }

    pub fn eval_mod1(&self, n: i64) -> S {
        self.eval(n).frac()
    }

    /// `max_i N^i ||alpha_i||_{R/Z}` over all `i >= 0`.
    pub fn cinf_norm(&self, n_len: u64) -> S {
        self.norm_from(n_len, 0)
    }

    /// Same norm ignoring the constant term.
    pub fn nonconstant_norm(&self, n_len: u64) -> S {
        self.norm_from(n_len, 1)
    }

    fn norm_from(&self, n_len: u64, start: usize) -> S {
        let mut best = S::zero();
        for (i, a) in self.alpha.iter().enumerate().skip(start) {
            let v = pow_u64::<S>(n_len, i) * a.torus_norm();
            if v > best {
                best = v;
            }
        }
        best
    }

    pub fn scale(&self, d: i64) -> TorusPoly<S> {
        let s = S::from_i64(d);
        TorusPoly::new(self.alpha.iter().map(|a| a.clone() * s.clone()).collect())
    }

    /// Coefficients in the monomial basis `sum_i beta_i n^i`.
    pub fn to_monomial(&self) -> Vec<S> {
        let d = self.alpha.len();
        let mut beta = vec![S::zero(); d];
        for (j, a) in self.alpha.iter().enumerate() {
            // C(n, j) = (n)_j / j!, (n)_j = sum_i s(j, i) n^i
            let s = stirling1(j);
            let fact = (1..=j as i128).product::<i128>();
            for (i, c) in s.iter().enumerate() {
                if *c != 0 {
                    beta[i] = beta[i].clone() + a.clone() * S::from_i128(*c) / S::from_i128(fact);
                }
            }
        }
        beta
    }

    /// Inverse of [`TorusPoly::to_monomial`].
    pub fn from_monomial(beta: &[S]) -> TorusPoly<S> {
        let d = beta.len();
        let mut alpha = vec![S::zero(); d];
        for (i, b) in beta.iter().enumerate() {
            // n^i = sum_j S(i, j) j! C(n, j)
            for j in 0..=i {
                let c = stirling2(i, j) * (1..=j as i128).product::<i128>();
                if c != 0 {
                    alpha[j] = alpha[j].clone() + b.clone() * S::from_i128(c);
                }
            }
        }
        TorusPoly::new(alpha)
    }
}

/// Signed Stirling numbers of the first kind `s(j, i)`, `i = 0..=j`.
fn stirling1(j: usize) -> Vec<i128> {
    let mut row = vec![1i128];
    for t in 0..j {
        // (n)_{t+1} = (n)_t (n - t)
        let mut next = vec![0i128; row.len() + 1];
        for (i, &c) in row.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * t as i128;
        }
        row = next;
    }
    row
}

fn stirling2(i: usize, j: usize) -> i128 {
    let mut tab = vec![vec![0i128; i + 1]; i + 1];
    tab[0][0] = 1;
    for a in 1..=i {
        for b in 1..=a {
            tab[a][b] = b as i128 * tab[a - 1][b] + tab[a - 1][b - 1];
        }
    }
    tab[i][j]
}

/// Smallest `D <= d_max` minimising `||D f||_{C^inf[N]}`.
pub fn best_denominator<S: Scalar>(f: &TorusPoly<S>, n_len: u64, d_max: u64) -> (u64, S) {
    let mut best = (1, f.cinf_norm(n_len));
    for d in 2..=d_max.max(1) {
        let v = f.scale(d as i64).cinf_norm(n_len);
        if v < best.1 {
            best = (d, v);
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub struct Concentration {
    pub denominator: u64,
    /// `max_{i>=1} N^i ||D alpha_i||`.
    pub norm: f64,
    /// Largest number of points of `f([N])` in an arc of length `eps`.
    pub count: usize,
}

/// If at least `delta N` of the values `f(1..=N)` fall in one arc of length
/// `eps`, search `D <= d_cap` for a small `||D f||` (constant term ignored).
///
/// The returned `D` minimises `max(D, ||D f|| / eps)`, smallest `D` on ties.
pub fn concentration_witness<S: Scalar>(
    f: &TorusPoly<S>,
    n_len: u64,
    delta: f64,
    eps: f64,
    d_cap: u64,
) -> Option<Concentration> {
    let mut pts: Vec<f64> = (1..=n_len as i64).map(|n| f.eval_mod1(n).to_f64()).collect();
    pts.sort_by(f64::total_cmp);
    let len = pts.len();
    if len == 0 {
        return None;
    }
    // circular sliding window
    let mut best = 0usize;
    let mut hi = 0usize;
    for lo in 0..len {
        if hi < lo {
            hi = lo;
        }
        while hi + 1 < lo + len {
            let next = if hi + 1 < len { pts[hi + 1] } else { pts[hi + 1 - len] + 1.0 };
            if next - pts[lo] <= eps {
                hi += 1;
            } else {
                break;
            }
        }
        best = best.max(hi - lo + 1);
    }
    if (best as f64) < delta * n_len as f64 {
        return None;
    }
    let tail: Vec<f64> = f.alpha.iter().skip(1).map(|a| a.to_f64()).collect();
    let score = |d: u64| -> f64 {
        tail.iter()
            .enumerate()
            .map(|(i, a)| {
                let x = a * d as f64;
                let fr = x - x.floor();
                (n_len as f64).powi(i as i32 + 1) * fr.min(1.0 - fr)
            })
            .fold(0.0, f64::max)
    };
    let mut found: Option<(u64, f64, f64)> = None;
    for d in 1..=d_cap.max(1) {
        if let Some((_, _, obj)) = found {
            if d as f64 > obj {
                break;
            }
        }
        let s = score(d);
        let obj = (d as f64).max(s / eps);
        if found.map_or(true, |(_, _, o)| obj < o) {
            found = Some((d, s, obj));
        }
    }
    found.map(|(d, s, _)| Concentration { denominator: d, norm: s, count: best })
}
