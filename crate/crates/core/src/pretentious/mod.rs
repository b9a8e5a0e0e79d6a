//! Pretentious distances between 1-bounded multiplicative functions,
//! Dirichlet characters, and related sums.

mod characters;
mod inversion;
mod mrt;
mod twist;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::sieve::{mobius_segment, liouville_segment, primes_up_to, smallest_prime_factors};

pub use characters::{characters_mod, DirichletCharacter};
pub use inversion::{dirichlet_inversion, Inversion, INVERSION_SIGMAS};
pub use mrt::{mrt_lhs, mrt_lhs_complex, mrt_lhs_exact, MrtReport};
pub use twist::{default_resolution, m2_value, m_tilde, m_value, MTilde, MValue, TwistMin};

/// A multiplicative function tabulated on `[1, X]`.
///
/// Integer-valued functions also keep an exact table so sums over them can
/// be evaluated without rounding.
#[derive(Clone, Debug, PartialEq)]
pub struct MultFn {
    values: Vec<Complex64>,
    exact: Option<Vec<i64>>,
}

impl MultFn {
    /// Values `v[0..X]` are taken as `beta(1..=X)`.
    pub fn from_table(v: Vec<Complex64>) -> Self {
        let mut values = Vec::with_capacity(v.len() + 1);
        values.push(Complex64::new(0.0, 0.0));
        values.extend(v);
        MultFn { values, exact: None }
    }

    pub fn from_int_table(v: Vec<i64>) -> Self {
        let mut exact = Vec::with_capacity(v.len() + 1);
        exact.push(0);
        exact.extend(v);
        let values = exact.iter().map(|&x| Complex64::new(x as f64, 0.0)).collect();
        MultFn { values, exact: Some(exact) }
    }

    /// Build from values at prime powers, `f(p, k) = beta(p^k)`.
    pub fn from_prime_powers(x: u64, f: impl Fn(u64, u32) -> Complex64) -> Self {
        let spf = smallest_prime_factors(x as usize);
        let mut values = vec![Complex64::new(0.0, 0.0); x as usize + 1];
        if x >= 1 {
            values[1] = Complex64::new(1.0, 0.0);
        }
        for n in 2..=x as usize {
            let (pp, k, rest) = split_prime_power(n, &spf);
            values[n] = if rest == 1 { f(pp, k) } else { values[n / rest] * values[rest] };
        }
        MultFn { values, exact: None }
    }

    pub fn from_prime_powers_int(x: u64, f: impl Fn(u64, u32) -> i64) -> Self {
        let spf = smallest_prime_factors(x as usize);
        let mut exact = vec![0i64; x as usize + 1];
        if x >= 1 {
            exact[1] = 1;
        }
        for n in 2..=x as usize {
            let (pp, k, rest) = split_prime_power(n, &spf);
            exact[n] = if rest == 1 { f(pp, k) } else { exact[n / rest] * exact[rest] };
        }
        MultFn::from_int_table(exact.split_off(1))
    }

    pub fn one(x: u64) -> Self {
        MultFn::from_int_table(vec![1; x as usize])
    }

    pub fn mobius(x: u64) -> Result<Self> {
        let t = mobius_segment(1, x + 1)?;
        Ok(MultFn::from_int_table(t.iter().map(i64::from).collect()))
    }

    pub fn liouville(x: u64) -> Result<Self> {
        let t = liouville_segment(1, x + 1)?;
        Ok(MultFn::from_int_table(t.iter().map(i64::from).collect()))
    }

    /// `n -> n^{it}`.
    pub fn archimedean(x: u64, t: f64) -> Self {
        MultFn::from_table((1..=x).map(|n| Complex64::from_polar(1.0, t * (n as f64).ln())).collect())
    }

    pub fn character(chi: &DirichletCharacter, x: u64) -> Self {
        if chi.is_real() {
            MultFn::from_int_table((1..=x).map(|n| chi.value(n).re as i64).collect())
        } else {
            MultFn::from_table((1..=x).map(|n| chi.value(n)).collect())
        }
    }

    /// `n -> beta(n) conj(chi(n))`.
    pub fn twist_conj(&self, chi: &DirichletCharacter) -> Self {
        if let (Some(e), true) = (&self.exact, chi.is_real()) {
            return MultFn::from_int_table((1..e.len() as u64).map(|n| e[n as usize] * chi.value(n).re as i64).collect());
        }
        MultFn::from_table((1..self.values.len() as u64).map(|n| self.values[n as usize] * chi.value(n).conj()).collect())
    }

    /// Largest tabulated argument.
    pub fn x(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    pub fn get(&self, n: u64) -> Complex64 {
        self.values[n as usize]
    }

    pub fn get_exact(&self, n: u64) -> Option<i64> {
        self.exact.as_ref().map(|e| e[n as usize])
    }

    pub fn exact_table(&self) -> Option<&[i64]> {
        self.exact.as_deref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn is_real(&self) -> bool {
        self.exact.is_some() || self.values.iter().all(|v| v.im == 0.0)
    }

    pub(crate) fn ensure_covers(&self, x: u64) -> Result<()> {
        if x > self.x() {
            return Err(Error::TableCoverage { needed: x, have: self.x() });
        }
        Ok(())
    }

    /// `|beta(n)| <= 1` on the table.
    pub fn is_bounded(&self) -> bool {
        self.values.iter().all(|v| v.norm() <= 1.0 + 1e-12)
    }

    /// Multiplicativity: `beta(n)` equals the product over prime powers
    /// exactly dividing `n`, for every tabulated `n`.
    pub fn check_multiplicative(&self) -> Result<()> {
        let x = self.x() as usize;
        let spf = smallest_prime_factors(x);
        if x >= 1 {
            let one_ok = match &self.exact {
                Some(e) => e[1] == 1,
                None => (self.values[1] - 1.0).norm() <= 1e-12,
            };
            if !one_ok {
                return Err(Error::NotMultiplicative(1));
            }
        }
        for n in 2..=x {
            let (_, _, rest) = split_prime_power(n, &spf);
            if rest == 1 {
                continue;
            }
            let ok = match &self.exact {
                Some(e) => e[n] == e[n / rest] * e[rest],
                None => (self.values[n] - self.values[n / rest] * self.values[rest]).norm() <= 1e-9,
            };
            if !ok {
                return Err(Error::NotMultiplicative(n as u64));
            }
        }
        Ok(())
    }
}

/// `n = p^k * rest` with `p` the smallest prime factor and `p` not dividing `rest`.
fn split_prime_power(n: usize, spf: &[u32]) -> (u64, u32, usize) {
    let p = spf[n] as usize;
    let (mut m, mut k) = (n, 0);
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    (p as u64, k, m)
}

fn check_x(beta: &MultFn, other: &MultFn, x: u64) -> Result<()> {
    if x < 2 {
        return Err(Error::InvalidArgument(format!("X = {x} must be at least 2")));
    }
    beta.ensure_covers(x)?;
    other.ensure_covers(x)
}

/// `D(beta, beta'; X)^2 = sum_{p <= X} (1 - Re beta(p) conj(beta'(p))) / p`.
pub fn distance_sq(beta: &MultFn, other: &MultFn, x: u64) -> Result<f64> {
    check_x(beta, other, x)?;
    Ok(primes_up_to(x)
        .into_iter()
        .map(|p| (1.0 - (beta.get(p) * other.get(p).conj()).re) / p as f64)
        .sum())
}

pub fn distance(beta: &MultFn, other: &MultFn, x: u64) -> Result<f64> {
    distance_sq(beta, other, x).map(f64::sqrt)
}

/// Exact `D^2` for integer-valued functions.
pub fn distance_sq_exact(beta: &MultFn, other: &MultFn, x: u64) -> Result<Option<BigRational>> {
    check_x(beta, other, x)?;
    let (Some(a), Some(b)) = (&beta.exact, &other.exact) else {
        return Ok(None);
    };
    let mut acc = BigRational::from_integer(BigInt::from(0));
    for p in primes_up_to(x) {
        let num = 1 - a[p as usize] * b[p as usize];
        if num != 0 {
            acc += BigRational::new(BigInt::from(num), BigInt::from(p));
        }
    }
    Ok(Some(acc))
}

#[cfg(test)]
mod tests;
