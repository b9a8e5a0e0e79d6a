use num_complex::Complex64;

use super::{DirichletCharacter, MultFn};
use crate::error::{Error, Result};
use crate::sieve::Bits;

/// Window sums are recomputed from scratch this often in the float version.
const RESEED: u64 = 4096;

/// `sum_{N < n <= 2N} (sum_{n < v <= n + H0} a(v))^2` with a sliding window.
pub fn mrt_lhs_exact(a: impl Fn(u64) -> i64, n_len: u64, h0: u64) -> i128 {
    let mut w: i128 = (n_len + 1..=n_len + h0).map(|v| a(v) as i128).sum();
    let mut total: i128 = 0;
    for n in n_len + 1..=2 * n_len {
        // window for n is (n, n + H0]
        w += a(n + h0) as i128 - a(n) as i128;
        total += w * w;
    }
    total
}

/// Complex version of [`mrt_lhs_exact`], summing `|window|^2`.
pub fn mrt_lhs_complex(a: impl Fn(u64) -> Complex64, n_len: u64, h0: u64) -> f64 {
    let direct = |n: u64| -> Complex64 { (n + 1..=n + h0).map(&a).sum() };
    let mut total = 0.0;
    let mut w = Complex64::new(0.0, 0.0);
    for (i, n) in (n_len + 1..=2 * n_len).enumerate() {
        if i as u64 % RESEED == 0 {
            w = direct(n);
        } else {
            w += a(n + h0) - a(n);
        }
        total += w.norm_sqr();
    }
    total
}

#[derive(Clone, Debug, PartialEq)]
pub struct MrtReport {
    pub value: f64,
    /// Present when every factor is integer-valued.
    pub exact: Option<i128>,
    /// `value / (H0^2 N)`.
    pub ratio: f64,
}

/// `sum_{N < n <= 2N} |sum_{n < v <= n + H0} 1_S(v) beta(v) chi(v)|^2`.
pub fn mrt_lhs(
    beta: &MultFn,
    chi: Option<&DirichletCharacter>,
    n_len: u64,
    h0: u64,
    s: Option<&Bits>,
) -> Result<MrtReport> {
    if n_len == 0 || h0 == 0 {
        return Err(Error::InvalidArgument("N and H0 must be positive".into()));
    }
    let top = 2 * n_len + h0;
    beta.ensure_covers(top)?;
    if let Some(bits) = s {
        if (bits.len() as u64) <= top {
            return Err(Error::TableCoverage { needed: top, have: bits.len() as u64 - 1 });
        }
    }
    let in_s = |v: u64| s.map_or(true, |b| b[v as usize]);
    let norm = (h0 as f64).powi(2) * n_len as f64;
    let exact_chi = chi.map_or(true, |c| c.is_real());
    if let (Some(_), true) = (beta.exact_table(), exact_chi) {
        let a = |v: u64| -> i64 {
            if !in_s(v) {
                return 0;
            }
            let c = chi.map_or(1, |c| c.value(v).re as i64);
            beta.get_exact(v).unwrap() * c
        };
        let e = mrt_lhs_exact(a, n_len, h0);
        return Ok(MrtReport { value: e as f64, exact: Some(e), ratio: e as f64 / norm });
    }
    let a = |v: u64| -> Complex64 {
        if !in_s(v) {
            return Complex64::new(0.0, 0.0);
        }
        beta.get(v) * chi.map_or(Complex64::new(1.0, 0.0), |c| c.value(v))
    };
    let value = mrt_lhs_complex(a, n_len, h0);
    Ok(MrtReport { value, exact: None, ratio: value / norm })
}
