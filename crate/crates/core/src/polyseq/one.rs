use std::sync::Arc;

use super::{check_membership, TorusPoly};
use crate::error::{Error, Result};
use crate::nilgroup::{GroupElement, HorizontalCharacter, MalcevPresentation};
use crate::scalar::{binom, Scalar};

/// One-parameter sequence `psi(g(n)) = sum_{i<=d} w_i C(n, i)`.
#[derive(Clone, Debug)]
pub struct PolySeq1<S> {
    pres: Arc<MalcevPresentation>,
    coeffs: Vec<Vec<S>>,
}

impl<S: Scalar> PolySeq1<S> {
    pub fn new(pres: Arc<MalcevPresentation>, coeffs: Vec<Vec<S>>) -> Result<Self> {
        let d = pres.degree();
        if coeffs.len() > d + 1 {
            return Err(Error::InvalidArgument(format!("{} coefficients for degree {d}", coeffs.len())));
        }
        let mut coeffs = coeffs;
        coeffs.resize(d + 1, vec![S::zero(); pres.m()]);
        for (i, w) in coeffs.iter().enumerate() {
            check_membership(&pres, i, 0, w)?;
        }
        Ok(PolySeq1 { pres, coeffs })
    }

    pub(crate) fn new_unchecked(pres: Arc<MalcevPresentation>, coeffs: Vec<Vec<S>>) -> Self {
        PolySeq1 { pres, coeffs }
    }

    pub fn presentation(&self) -> &Arc<MalcevPresentation> {
        &self.pres
    }

    pub fn coeffs(&self) -> &[Vec<S>] {
        &self.coeffs
    }

    pub fn eval(&self, n: i64) -> GroupElement<S> {
        let mut out = vec![S::zero(); self.pres.m()];
        for (i, w) in self.coeffs.iter().enumerate() {
            let b = binom(n, i);
            if b == 0 {
                continue;
            }
            let bs = S::from_i128(b);
            for (o, x) in out.iter_mut().zip(w) {
                if !x.is_zero() {
                    *o = o.clone() + bs.clone() * x.clone();
                }
            }
        }
        GroupElement::new(out)
    }

    /// The orbit `n -> g0^n x`.
    pub fn from_orbit(pres: Arc<MalcevPresentation>, g0: &GroupElement<S>, x: &GroupElement<S>) -> Result<Self> {
        let two = super::PolySeq2::from_orbit(pres, g0, x)?;
        Ok(two.restrict_h0())
    }

    /// `eta o g` as a polynomial with coefficients `a . w_i`.
    pub fn char_compose(&self, eta: &HorizontalCharacter) -> Result<TorusPoly<S>> {
        self.pres.check_character(eta)?;
        Ok(TorusPoly::new(self.coeffs.iter().map(|w| eta.apply(w)).collect()))
    }

    pub fn to_f64(&self) -> PolySeq1<f64> {
        PolySeq1 {
            pres: self.pres.clone(),
            coeffs: self.coeffs.iter().map(|w| w.iter().map(Scalar::to_f64).collect()).collect(),
        }
    }
}
