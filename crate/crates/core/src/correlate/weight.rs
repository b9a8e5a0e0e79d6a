use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sieve::{liouville_segment, mobius_segment, Bits, MobiusTable};

/// Arithmetic weight `w(m)` for `1 <= m <= limit`.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    name: String,
    /// `values[m]`; index 0 unused.
    values: Vec<f64>,
}

impl Weight {
    fn from_table(name: &str, t: &MobiusTable) -> Self {
        let mut values = vec![0.0; t.hi() as usize];
        for m in t.lo()..t.hi() {
            values[m as usize] = t.get(m) as f64;
        }
        Weight { name: name.into(), values }
    }

    pub fn mobius(limit: u64) -> Result<Self> {
        Ok(Self::from_table("mobius", &mobius_segment(1, limit + 1)?))
    }

    pub fn liouville(limit: u64) -> Result<Self> {
        Ok(Self::from_table("liouville", &liouville_segment(1, limit + 1)?))
    }

    /// A cached or precomputed table starting at 1.
    pub fn from_mobius_table(name: &str, t: &MobiusTable) -> Result<Self> {
        if t.lo() != 1 {
            return Err(Error::InvalidArgument(format!("weight table must start at 1, starts at {}", t.lo())));
        }
        Ok(Self::from_table(name, t))
    }

    /// `values[i]` is `w(i + 1)`.
    pub fn from_values(name: impl Into<String>, values: &[f64]) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("weight value at m = {} is not finite", i + 1)));
        }
        let mut v = Vec::with_capacity(values.len() + 1);
        v.push(0.0);
        v.extend_from_slice(values);
        Ok(Weight { name: name.into(), values: v })
    }

    pub fn zero(limit: u64) -> Self {
        Weight { name: "zero".into(), values: vec![0.0; limit as usize + 1] }
    }

    /// Independent uniform signs.
    pub fn random_signs(limit: u64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = vec![0.0; limit as usize + 1];
        for v in values.iter_mut().skip(1) {
            *v = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        }
        Weight { name: format!("signs({seed})"), values }
    }

    /// `1_S w`, with bit `m` of `set` marking membership of `m`; indices
    /// past the end of `set` count as non-members.
    pub fn restrict(&self, set: &Bits) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(m, &v)| if set.get(m).is_some_and(|b| *b) { v } else { 0.0 })
            .collect();
        Weight { name: format!("1_S*{}", self.name), values }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn limit(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    /// `w(m)`; zero outside `1..=limit`.
    #[inline]
    pub fn get(&self, m: u64) -> f64 {
        self.values.get(m as usize).copied().unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}
