//! Coordinate scalars: exact rationals or `f64`.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

/// Tolerance used by the float flavor when deciding integrality mod 1.
pub const FLOAT_TOL: f64 = 1e-9;

/// A polynomial coefficient carried in both flavors so evaluation never converts.
#[derive(Clone, Debug, PartialEq)]
pub struct Coeff {
    pub exact: Q,
    pub float: f64,
}

impl Coeff {
    pub fn new(q: Q) -> Self {
        let float = ToPrimitive::to_f64(&q).unwrap_or(f64::NAN);
        Coeff { exact: q, float }
    }
}

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialOrd
    + Signed
    + Send
    + Sync
    + 'static
{
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn from_i128(v: i128) -> Self;
    fn from_q(q: &Q) -> Self;
    fn from_coeff(c: &Coeff) -> Self {
        Self::from_q(&c.exact)
    }
    fn to_f64(&self) -> f64;
    fn floor(&self) -> Self;

    /// Exact zero for rationals, `|x| <= FLOAT_TOL` for floats.
    fn near_zero(&self) -> bool;

    fn frac(&self) -> Self {
        self.clone() - self.floor()
    }

    /// Distance to the nearest integer.
    fn torus_norm(&self) -> Self {
        let f = self.frac();
        let g = Self::one() - f.clone();
        if f < g {
            f
        } else {
            g
        }
    }

    fn is_integral(&self) -> bool {
        self.torus_norm().near_zero()
    }

    /// Smallest `r <= cap` with `r x` integral.
    fn denominator_within(&self, cap: u64) -> Option<u64> {
        (1..=cap).find(|&r| (Self::from_i128(r as i128) * self.clone()).is_integral())
    }

    /// Nearest integer, ties broken toward zero.
    fn round_ties_zero(&self) -> Self {
        let fl = self.floor();
        let f = self.clone() - fl.clone();
        let half = Self::from_q(&Q::new(BigInt::from(1), BigInt::from(2)));
        if f < half {
            fl
        } else if f > half {
            fl + Self::one()
        } else if fl.is_negative() {
            fl + Self::one()
        } else {
            fl
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_i128(v: i128) -> Self {
        v as f64
    }
    fn from_q(q: &Q) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }
    fn from_coeff(c: &Coeff) -> Self {
        c.float
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn floor(&self) -> Self {
        f64::floor(*self)
    }
    fn near_zero(&self) -> bool {
        self.abs() <= FLOAT_TOL
    }
    fn frac(&self) -> Self {
        let f = *self - f64::floor(*self);
        if f >= 1.0 {
            0.0
        } else {
            f
        }
    }
}

impl Scalar for Q {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Q::from_integer(BigInt::from(v))
    }
    fn from_i128(v: i128) -> Self {
        Q::from_integer(BigInt::from(v))
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn floor(&self) -> Self {
        Q::floor(self)
    }
    fn near_zero(&self) -> bool {
        self.is_zero()
    }
    fn denominator_within(&self, cap: u64) -> Option<u64> {
        let d = denominator_u64(self);
        (d <= cap).then_some(d)
    }
}

/// Exact rational from a numerator/denominator pair.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// The exact dyadic rational equal to a finite float.
pub fn q_from_f64(x: f64) -> Q {
    Q::from_float(x).expect("finite float")
}

/// `max(|num|, den)` for a reduced fraction, saturating at `u64::MAX`.
pub fn height(x: &Q) -> u64 {
    let n = x.numer().abs();
    let d = x.denom().clone();
    let h = if n > d { n } else { d };
    h.to_u64().unwrap_or(u64::MAX)
}

pub fn denominator_u64(x: &Q) -> u64 {
    x.denom().to_u64().unwrap_or(u64::MAX)
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return a.max(b);
    }
    let g = a.gcd(&b);
    (a / g).saturating_mul(b)
}

/// Binomial coefficient `C(n, j)` for any integer `n` (falling factorial over `j!`).
pub fn binom(n: i64, j: usize) -> i128 {
    let mut c: i128 = 1;
    for i in 0..j as i128 {
        c = c * (n as i128 - i) / (i + 1);
    }
    c
}

pub fn i128_from_f64(x: f64) -> Option<i128> {
    i128::from_f64(x)
}
