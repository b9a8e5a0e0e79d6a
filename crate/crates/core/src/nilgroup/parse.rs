//! Text format for presentations:
//!
//! ```text
//! [group]
//! m = 3
//! d = 2
//! filtration_dims = 3, 1
//! [brackets]
//! 1 2 3 1      # [V_1, V_2] = 1 * V_3   (1-based indices)
//! ```

use super::{MalcevPresentation, StructureConstant};
use crate::error::{Error, Result};
use crate::scalar::Q;
use crate::textfmt::{parse_list, parse_num, Document};

pub fn parse_rational(s: &str, line: usize) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse { line, msg: format!("bad rational {s:?}") };
    if let Some((n, d)) = s.split_once('/') {
        let n: num_bigint::BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: num_bigint::BigInt = d.trim().parse().map_err(|_| bad())?;
        if d == 0.into() {
            return Err(bad());
        }
        Ok(Q::new(n, d))
    } else if s.contains(['.', 'e', 'E']) {
        let f: f64 = s.parse().map_err(|_| bad())?;
        Q::from_float(f).ok_or_else(bad)
    } else {
        let n: num_bigint::BigInt = s.parse().map_err(|_| bad())?;
        Ok(Q::from_integer(n))
    }
}

impl MalcevPresentation {
    pub fn parse(text: &str) -> Result<Self> {
        let doc = Document::parse(text)?;
        let g = doc.require("group")?;
        let (m, ml) = g.require("m")?;
        let m: usize = parse_num(&m, ml)?;
        let (d, dl) = g.require("d")?;
        let d: usize = parse_num(&d, dl)?;
        let (dims, fl) = g.require("filtration_dims")?;
        let dims: Vec<usize> = parse_list(&dims, fl)?;
        let mut constants: Vec<StructureConstant> = Vec::new();
        let mut lines: Vec<(usize, usize, usize)> = Vec::new();
        if let Some(b) = doc.section("brackets") {
            for l in &b.lines {
                let parts: Vec<&str> = l.text.split_whitespace().collect();
                if parts.len() != 4 {
                    return Err(Error::Parse {
                        line: l.lineno,
                        msg: "bracket lines read `i j k coefficient`".into(),
                    });
                }
                let idx = |s: &str| -> Result<usize> {
                    let v: usize = parse_num(s, l.lineno)?;
                    if v == 0 || v > m {
                        return Err(Error::Parse { line: l.lineno, msg: format!("index {v} outside 1..={m}") });
                    }
                    Ok(v - 1)
                };
                let (i, j, k) = (idx(parts[0])?, idx(parts[1])?, idx(parts[2])?);
                constants.push((i, j, k, parse_rational(parts[3], l.lineno)?));
                lines.push((i, j, l.lineno));
            }
        }
        MalcevPresentation::build(m, d, dims, &constants).map_err(|e| {
            let at = |i: usize, j: usize| {
                lines
                    .iter()
                    .find(|(a, b, _)| (*a == i - 1 && *b == j - 1) || (*a == j - 1 && *b == i - 1))
                    .map(|x| x.2)
            };
            let line = match &e {
                Error::Antisymmetry { i, j } | Error::FiltrationViolation { i, j, .. } => at(*i, *j),
                Error::JacobiViolation { i, j, k } => at(*i, *j).or(at(*j, *k)).or(at(*i, *k)),
                _ => None,
            };
            match line {
                Some(line) => Error::Parse { line, msg: e.to_string() },
                None => e,
            }
        })
    }

    pub fn to_text(&self) -> String {
        let dims: Vec<String> = self.dims.iter().map(|x| x.to_string()).collect();
        let mut s = format!("[group]\nm = {}\nd = {}\nfiltration_dims = {}\n[brackets]\n", self.m, self.d, dims.join(", "));
        for (i, j, k, c) in &self.brackets.entries {
            if i < j {
                s.push_str(&format!("{} {} {} {}\n", i + 1, j + 1, k + 1, c));
            }
        }
        s
    }
}
