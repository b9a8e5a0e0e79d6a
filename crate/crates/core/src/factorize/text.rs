//! Text form of a factorization: the sequence header, the three factors in
//! the coefficient format of [`PolySeq2::to_text`], and one `[trace]` line
//! per peeled character.
//!
//! ```text
//! [factorization]
//! m = 1
//! d = 1
//! flavor = exact
//! N = 1000
//! H = 30
//! W = 2
//! q = 2
//! q_adjusted = 2
//! [trace]
//! eta = 2 | score = 0.002 | bound = 4 | denominator = 2
//! [epsilon]
//! 1 0 : 1/1000000
//! [g_prime]
//! [gamma]
//! 1 0 : 1/2
//! ```

use std::sync::Arc;

use super::{FactorizationResult, TraceStep};
use crate::error::{Error, Result};
use crate::nilgroup::{HorizontalCharacter, MalcevPresentation, SubgroupChain};
use crate::polyseq::text::{check_header, parse_coefficients, render_coefficients};
use crate::polyseq::ScalarText;
use crate::textfmt::{parse_list, parse_num, Document};

impl<S: ScalarText> FactorizationResult<S> {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "[factorization]\nm = {}\nd = {}\nflavor = {}\nN = {}\nH = {}\nW = {}\nq = {}\nq_adjusted = {}\n[trace]\n",
            self.root.m(),
            self.root.degree(),
            S::FLAVOR,
            self.n_len,
            self.h_len,
            self.w,
            self.q,
            self.q_adjusted
        );
        for t in &self.trace {
            let eta: Vec<String> = t.eta.a.iter().map(i64::to_string).collect();
            s.push_str(&format!(
                "eta = {} | score = {:?} | bound = {} | denominator = {}\n",
                eta.join(" "),
                t.score,
                t.bound,
                t.denominator
            ));
        }
        for (name, seq) in [("epsilon", &self.epsilon), ("g_prime", &self.g_prime), ("gamma", &self.gamma)] {
            s.push_str(&format!("[{name}]\n{}", render_coefficients(seq)));
        }
        s
    }

    pub fn from_text(root: Arc<MalcevPresentation>, text: &str) -> Result<Self> {
        let doc = Document::parse(text)?;
        let head = doc.require("factorization")?;
        check_header::<S>(head, &root)?;
        let num = |key: &str| -> Result<u64> {
            let (v, l) = head.require(key)?;
            parse_num(&v, l)
        };
        let (n_len, h_len, w, q, q_adjusted) = (num("N")?, num("H")?, num("W")?, num("q")?, num("q_adjusted")?);

        let mut chain = SubgroupChain::new(root.clone());
        let mut trace = Vec::new();
        for l in doc.section("trace").map(|s| s.lines.as_slice()).unwrap_or(&[]) {
            let mut fields = std::collections::HashMap::new();
            for part in l.text.split('|') {
                let (k, v) = part.split_once('=').ok_or_else(|| Error::Parse {
                    line: l.lineno,
                    msg: "trace fields read `key = value`".into(),
                })?;
                fields.insert(k.trim().to_string(), v.trim().to_string());
            }
            let get = |k: &str| {
                fields.get(k).cloned().ok_or_else(|| Error::Parse { line: l.lineno, msg: format!("trace line lacks {k:?}") })
            };
            let eta = HorizontalCharacter::new(parse_list(&get("eta")?, l.lineno)?);
            chain.push(&eta).map_err(|e| Error::Parse { line: l.lineno, msg: e.to_string() })?;
            trace.push(TraceStep {
                eta,
                score: parse_num(&get("score")?, l.lineno)?,
                bound: parse_num(&get("bound")?, l.lineno)?,
                denominator: parse_num(&get("denominator")?, l.lineno)?,
                dim: chain.leaf().m(),
            });
        }
        let epsilon = parse_coefficients(root.clone(), doc.section("epsilon"))?;
        let g_prime = parse_coefficients(root.clone(), doc.section("g_prime"))?;
        let gamma = parse_coefficients(root.clone(), doc.section("gamma"))?;
        let g_prime_leaf = g_prime.map_refit(chain.leaf().clone(), |x| chain.from_root(x))?;
        Ok(FactorizationResult {
            root,
            epsilon,
            g_prime,
            g_prime_leaf,
            gamma,
            chain,
            trace,
            w,
            q,
            q_adjusted,
            n_len,
            h_len,
        })
    }
}
