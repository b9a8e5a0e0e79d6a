use std::fmt;

use crate::scalar::{q_from_f64, Scalar, Q};

/// A group element given by its Mal'cev coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement<S> {
    pub coords: Vec<S>,
}

impl<S: Scalar> GroupElement<S> {
    pub fn new(coords: Vec<S>) -> Self {
        GroupElement { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(Scalar::is_integral)
    }

    pub fn to_f64(&self) -> GroupElement<f64> {
        GroupElement::new(self.coords.iter().map(Scalar::to_f64).collect())
    }
}

impl GroupElement<f64> {
    /// Exact rational copy (every finite float is a dyadic rational).
    pub fn to_exact(&self) -> GroupElement<Q> {
        GroupElement::new(self.coords.iter().map(|&x| q_from_f64(x)).collect())
    }
}

impl<S: fmt::Display> fmt::Display for GroupElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A point of the nilmanifold, represented in the fundamental domain `[0,1)^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldPoint<S> {
    pub coords: Vec<S>,
}

impl<S: Scalar> ManifoldPoint<S> {
    pub(crate) fn new_unchecked(coords: Vec<S>) -> Self {
        ManifoldPoint { coords }
    }

    pub fn as_element(&self) -> GroupElement<S> {
        GroupElement::new(self.coords.clone())
    }

    pub fn to_f64(&self) -> ManifoldPoint<f64> {
        ManifoldPoint { coords: self.coords.iter().map(Scalar::to_f64).collect() }
    }
}

/// Horizontal character `eta(g) = a . psi(g) mod 1`, supported on the first
/// `m - m_2` coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HorizontalCharacter {
    pub a: Vec<i64>,
}

impl HorizontalCharacter {
    pub fn new(a: Vec<i64>) -> Self {
        HorizontalCharacter { a }
    }

    /// Pad a vector of horizontal coefficients with zeros up to dimension `m`.
    pub fn padded(horizontal: &[i64], m: usize) -> Self {
        let mut a = horizontal.to_vec();
        a.resize(m, 0);
        HorizontalCharacter { a }
    }

    /// `|eta|` as the sup norm of the coefficient vector.
    pub fn height(&self) -> i64 {
        self.a.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn is_trivial(&self) -> bool {
        self.a.iter().all(|&x| x == 0)
    }

    /// `a . x` without reduction mod 1.
    pub fn apply<S: Scalar>(&self, x: &[S]) -> S {
        let mut acc = S::zero();
        for (ai, xi) in self.a.iter().zip(x) {
            if *ai != 0 {
                acc = acc + S::from_i64(*ai) * xi.clone();
            }
        }
        acc
    }
}

impl fmt::Display for HorizontalCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.a.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}
