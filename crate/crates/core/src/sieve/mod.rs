//! Segmented sieves for the Möbius and Liouville functions, plus the sieve
//! sets used to restrict correlations to integers with prescribed prime
//! factors.

mod cache;
mod sets;

use rayon::prelude::*;

use crate::error::{Error, Result};

pub use cache::{cache_path, load_or_build, read_cache, write_cache};
pub use sets::{
    dense_set, minor_sets, pq_log, pq_sequence, prime_inverse_square_tail, r_plus, sqfree_surrogate,
    sqfree_surrogate_complex, surrogate_error_bound, surrogate_terms, Bits, DenseSieveSet, MinorSets,
};

/// Default segment length.
pub const DEFAULT_BLOCK: u64 = 1 << 22;

/// Largest admissible upper end of a segment.
pub const MAX_HI: u64 = 1 << 63;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithFn {
    Mobius,
    Liouville,
}

impl ArithFn {
    pub fn name(self) -> &'static str {
        match self {
            ArithFn::Mobius => "mobius",
            ArithFn::Liouville => "liouville",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "mobius" | "mu" => Some(ArithFn::Mobius),
            "liouville" | "lambda" => Some(ArithFn::Liouville),
            _ => None,
        }
    }
}

/// Values in `{-1, 0, 1}` on `[lo, hi)`, packed four to a byte with the
/// lowest integer in the low bits. Codes: `00 -> 0`, `01 -> +1`, `10 -> -1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MobiusTable {
    lo: u64,
    hi: u64,
    packed: Vec<u8>,
}

fn code(v: i8) -> u8 {
    match v {
        0 => 0b00,
        1 => 0b01,
        -1 => 0b10,
        _ => unreachable!("value {v} outside -1..=1"),
    }
}

fn pack(vals: &[i8]) -> Vec<u8> {
    vals.chunks(4)
        .map(|c| c.iter().enumerate().fold(0u8, |b, (j, &v)| b | (code(v) << (2 * j))))
        .collect()
}

impl MobiusTable {
    pub fn from_values(lo: u64, vals: &[i8]) -> Self {
        MobiusTable { lo, hi: lo + vals.len() as u64, packed: pack(vals) }
    }

    /// Validates that no reserved code appears.
    pub(crate) fn from_packed(lo: u64, hi: u64, packed: Vec<u8>) -> Result<Self> {
        let need = (hi - lo).div_ceil(4) as usize;
        if packed.len() != need {
            return Err(Error::CorruptCache(format!("expected {need} bytes, found {}", packed.len())));
        }
        for (i, b) in packed.iter().enumerate() {
            for j in 0..4 {
                let n = lo + 4 * i as u64 + j;
                if n < hi && (b >> (2 * j)) & 3 == 3 {
                    return Err(Error::CorruptCache(format!("reserved code at n = {n}")));
                }
            }
        }
        Ok(MobiusTable { lo, hi, packed })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }

    pub fn packed(&self) -> &[u8] {
        &self.packed
    }

    pub fn contains(&self, n: u64) -> bool {
        (self.lo..self.hi).contains(&n)
    }

    /// Value at `n`; panics outside the range.
    #[inline]
    pub fn get(&self, n: u64) -> i8 {
        assert!(self.contains(n), "{n} outside [{}, {})", self.lo, self.hi);
        let off = (n - self.lo) as usize;
        match (self.packed[off >> 2] >> (2 * (off & 3))) & 3 {
            0b01 => 1,
            0b10 => -1,
            _ => 0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = i8> + '_ {
        (self.lo..self.hi).map(move |n| self.get(n))
    }

    pub fn to_vec(&self) -> Vec<i8> {
        self.iter().collect()
    }

    pub fn sum(&self) -> i64 {
        self.iter().map(i64::from).sum()
    }
}

/// Primes `<= n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut comp = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !comp[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                comp[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Smallest prime factor of every `n <= limit` (`spf[0] = spf[1] = 0`).
pub fn smallest_prime_factors(limit: usize) -> Vec<u32> {
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

fn check_range(lo: u64, hi: u64) -> Result<()> {
    if lo == 0 {
        return Err(Error::BadRange { lo, hi, why: "segments start at 1" });
    }
    if hi < lo {
        return Err(Error::BadRange { lo, hi, why: "hi < lo" });
    }
    if hi > MAX_HI {
        return Err(Error::BadRange { lo, hi, why: "hi exceeds 2^63" });
    }
    Ok(())
}

/// One block, sieved with the given base primes (all primes `<= sqrt(hi)`).
fn sieve_block(kind: ArithFn, lo: u64, hi: u64, base: &[u64]) -> Vec<i8> {
    let len = (hi - lo) as usize;
    let mut rem: Vec<u64> = (lo..hi).collect();
    let mut val = vec![1i8; len];
    for &p in base {
        if p * p >= hi {
            break;
        }
        let first = lo.div_ceil(p) * p;
        let mut n = first;
        while n < hi {
            let i = (n - lo) as usize;
            match kind {
                ArithFn::Mobius => {
                    if val[i] != 0 {
                        rem[i] /= p;
                        if rem[i] % p == 0 {
                            val[i] = 0;
                        } else {
                            val[i] = -val[i];
                        }
                    }
                }
                ArithFn::Liouville => {
                    while rem[i] % p == 0 {
                        rem[i] /= p;
                        val[i] = -val[i];
                    }
                }
            }
            n += p;
        }
    }
    for (v, r) in val.iter_mut().zip(&rem) {
        if *r > 1 {
            *v = -*v;
        }
    }
    val
}

/// Values of `kind` on `[lo, hi)` sieved block by block in parallel.
pub fn arith_segment(kind: ArithFn, lo: u64, hi: u64, block: u64) -> Result<MobiusTable> {
    check_range(lo, hi)?;
    if block == 0 || block % 4 != 0 {
        return Err(Error::InvalidArgument(format!("block size {block} must be a positive multiple of 4")));
    }
    let base = primes_up_to(isqrt(hi.saturating_sub(1)));
    let starts: Vec<u64> = (lo..hi).step_by(block as usize).collect();
    let parts: Vec<Vec<u8>> = starts
        .par_iter()
        .map(|&s| pack(&sieve_block(kind, s, (s + block).min(hi), &base)))
        .collect();
    Ok(MobiusTable { lo, hi, packed: parts.concat() })
}

pub fn mobius_segment(lo: u64, hi: u64) -> Result<MobiusTable> {
    arith_segment(ArithFn::Mobius, lo, hi, DEFAULT_BLOCK)
}

pub fn liouville_segment(lo: u64, hi: u64) -> Result<MobiusTable> {
    arith_segment(ArithFn::Liouville, lo, hi, DEFAULT_BLOCK)
}
