//! Text form of a two-parameter sequence:
//!
//! ```text
//! [polyseq]
//! m = 3
//! d = 2
//! flavor = exact
//! [coefficients]
//! 1 0 : 1 0 0
//! 0 1 : 0 1/2 0
//! ```
//!
//! Omitted `(j, k)` pairs are zero.

use std::sync::Arc;

use super::PolySeq2;
use crate::error::{Error, Result};
use crate::nilgroup::parse_rational;
use crate::nilgroup::MalcevPresentation;
use crate::scalar::{Scalar, Q};
use crate::textfmt::{parse_num, Document, Section};

/// Per-flavor rendering of a single coordinate.
pub trait ScalarText: Scalar {
    const FLAVOR: &'static str;
    fn render(&self) -> String;
    fn read(s: &str, line: usize) -> Result<Self>;
}

impl ScalarText for f64 {
    const FLAVOR: &'static str = "float";
    fn render(&self) -> String {
        format!("{self:?}")
    }
    fn read(s: &str, line: usize) -> Result<Self> {
        if s.contains('/') {
            return parse_rational(s, line).map(|q| Scalar::to_f64(&q));
        }
        parse_num(s, line)
    }
}

impl ScalarText for Q {
    const FLAVOR: &'static str = "exact";
    fn render(&self) -> String {
        self.to_string()
    }
    fn read(s: &str, line: usize) -> Result<Self> {
        parse_rational(s, line)
    }
}

pub(crate) fn render_coefficients<S: ScalarText>(seq: &PolySeq2<S>) -> String {
    let mut s = String::new();
    for ((j, k), w) in seq.coeffs() {
        if w.iter().all(|x| x.is_zero()) {
            continue;
        }
        let vals: Vec<String> = w.iter().map(ScalarText::render).collect();
        s.push_str(&format!("{j} {k} : {}\n", vals.join(" ")));
    }
    s
}

pub(crate) fn parse_coefficients<S: ScalarText>(
    pres: Arc<MalcevPresentation>,
    sec: Option<&Section>,
) -> Result<PolySeq2<S>> {
    let m = pres.m();
    let mut seq = PolySeq2::identity(pres);
    let Some(sec) = sec else {
        return Ok(seq);
    };
    for l in &sec.lines {
        let (lhs, rhs) = l.text.split_once(':').ok_or_else(|| Error::Parse {
            line: l.lineno,
            msg: "coefficient lines read `j k : values`".into(),
        })?;
        let idx: Vec<usize> = lhs
            .split_whitespace()
            .map(|t| parse_num(t, l.lineno))
            .collect::<Result<_>>()?;
        if idx.len() != 2 {
            return Err(Error::Parse { line: l.lineno, msg: "expected two indices before ':'".into() });
        }
        let w: Vec<S> = rhs
            .split_whitespace()
            .map(|t| S::read(t, l.lineno))
            .collect::<Result<_>>()?;
        if w.len() != m {
            return Err(Error::Parse { line: l.lineno, msg: format!("expected {m} values, got {}", w.len()) });
        }
        seq.set_coeff(idx[0], idx[1], w)
            .map_err(|e| Error::Parse { line: l.lineno, msg: e.to_string() })?;
    }
    Ok(seq)
}

/// Check the `[polyseq]` header against a presentation and flavor.
pub(crate) fn check_header<S: ScalarText>(sec: &Section, pres: &MalcevPresentation) -> Result<()> {
    let (m, ml) = sec.require("m")?;
    let (d, dl) = sec.require("d")?;
    if parse_num::<usize>(&m, ml)? != pres.m() {
        return Err(Error::Parse { line: ml, msg: format!("m = {m} but the presentation has m = {}", pres.m()) });
    }
    if parse_num::<usize>(&d, dl)? != pres.degree() {
        return Err(Error::Parse { line: dl, msg: format!("d = {d} but the presentation has d = {}", pres.degree()) });
    }
    if let Some((f, fl)) = sec.get("flavor") {
        if f != S::FLAVOR {
            return Err(Error::Parse { line: fl, msg: format!("flavor {f:?}, expected {:?}", S::FLAVOR) });
        }
    }
    Ok(())
}

impl<S: ScalarText> PolySeq2<S> {
    pub fn to_text(&self) -> String {
        format!(
            "[polyseq]\nm = {}\nd = {}\nflavor = {}\n[coefficients]\n{}",
            self.pres.m(),
            self.pres.degree(),
            S::FLAVOR,
            render_coefficients(self)
        )
    }

    pub fn from_text(pres: Arc<MalcevPresentation>, text: &str) -> Result<Self> {
        let doc = Document::parse(text)?;
        check_header::<S>(doc.require("polyseq")?, &pres)?;
        parse_coefficients(pres, doc.section("coefficients"))
    }
}
