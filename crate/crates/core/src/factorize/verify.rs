use super::{is_periodic, max_rational_height, FactorizationResult};
use crate::equidist::{char_compose2, discrepancy, Bank, DiscrepancyReport, Progression, Sampler};
use crate::error::Result;
use crate::nilgroup::{sup_norm, GroupElement};
use crate::polyseq::{sample_grid, PolySeq2};
use crate::scalar::Scalar;

/// Grid points used for the reconstruction and support checks.
const CHECK_BUDGET: u64 = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    /// Empirical discrepancy of `h -> g'(n, h)` at a few `n`; informational only.
    pub discrepancy: Vec<(i64, DiscrepancyReport)>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn close<S: Scalar>(a: &GroupElement<S>, b: &GroupElement<S>) -> bool {
    if S::EXACT {
        return a == b;
    }
    let scale = 1.0 + sup_norm(&a.coords).max(sup_norm(&b.coords));
    a.coords.iter().zip(&b.coords).all(|(x, y)| (x.clone() - y.clone()).to_f64().abs() <= 1e-7 * scale)
}

/// Re-check every claim of a factorization against the original `g`.
pub fn verify_factorization<S: Scalar>(r: &FactorizationResult<S>, g: &PolySeq2<S>) -> Result<VerifyReport> {
    let root = &r.root;
    root.ensure_same(g.presentation())?;
    let (ns, hs) = sample_grid(r.n_len, r.h_len, CHECK_BUDGET);
    let mut checks = Vec::new();

    let mut worst = None;
    'outer: for &n in &ns {
        for &h in &hs {
            let e = r.epsilon.eval2(n, h);
            let gp = r.g_prime.eval2(n, h);
            let gm = r.gamma.eval2(n, h);
            let prod = root.mul_unchecked(&root.mul_unchecked(&e.coords, &gp.coords).coords, &gm.coords);
            if !close(&prod, &g.eval2(n, h)) {
                worst = Some((n, h));
                break 'outer;
            }
        }
    }
    checks.push(Check {
        name: "reconstruction",
        passed: worst.is_none(),
        detail: match worst {
            None => format!("{} grid points", ns.len() * hs.len()),
            Some((n, h)) => format!("epsilon g' gamma differs from g at ({n}, {h})"),
        },
    });

    let sm = r.epsilon.is_smooth(r.w as f64, r.n_len, r.h_len);
    checks.push(Check {
        name: "smoothness",
        passed: sm.smooth,
        detail: format!(
            "max dist {:.3e}, N-step {:.3e}, H-step {:.3e} against W = {}",
            sm.max_dist, sm.scaled_dn, sm.scaled_dh, r.w
        ),
    });

    let (passed, detail) = match max_rational_height(root, &r.gamma, r.q) {
        Ok(hgt) => (hgt <= r.w, format!("largest denominator {hgt} against W = {}", r.w)),
        Err(e) => (false, e.to_string()),
    };
    checks.push(Check { name: "rationality", passed, detail });

    let periodic = r.q >= 1 && is_periodic(root, &r.gamma, r.q);
    checks.push(Check { name: "periodicity", passed: periodic, detail: format!("q = {}", r.q) });

    let mut outside = None;
    for &n in ns.iter().take(8) {
        for &h in hs.iter().take(8) {
            if r.chain.from_root(&r.g_prime.eval2(n, h)).is_err() {
                outside = Some((n, h));
            }
        }
    }
    checks.push(Check {
        name: "support",
        passed: outside.is_none(),
        detail: match outside {
            None => format!("g' lies in a subgroup of dimension {}", r.subgroup().m()),
            Some((n, h)) => format!("g'({n}, {h}) leaves the subgroup"),
        },
    });

    let mut bad = Vec::new();
    for (i, step) in r.trace.iter().enumerate() {
        let level = if i == 0 { root.clone() } else { r.chain.levels[i - 1].child.clone() };
        let chain = &r.chain;
        let at_level = r.g_prime.map_refit(level, |x| {
            let mut cur = x.clone();
            for s in &chain.levels[..i] {
                cur = s.from_parent(&cur)?;
            }
            Ok(cur)
        });
        let vanishes = at_level
            .and_then(|s| char_compose2(&s, &step.eta))
            .map(|c| c.iter().all(|(_, v)| if S::EXACT { v.is_zero() } else { v.to_f64().abs() < 1e-7 }))
            .unwrap_or(false);
        if !vanishes {
            bad.push(i + 1);
        }
    }
    checks.push(Check {
        name: "trace",
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{} characters annihilate g'", r.trace.len())
        } else {
            format!("characters {bad:?} do not annihilate g'")
        },
    });

    let mut disc = Vec::new();
    let leaf = r.subgroup().clone();
    if leaf.horizontal_dim() > 0 {
        let bank = Bank::characters(leaf, 2)?;
        for n in [1, (r.n_len as i64 + 1) / 2, r.n_len as i64] {
            let row = r.g_prime_leaf.restrict_n(n);
            let s = Sampler::from_polyseq(format!("g'({n}, .)"), &row);
            disc.push((n, discrepancy(&s, &Progression::prefix(r.h_len), &bank)?));
        }
    }
    Ok(VerifyReport { checks, discrepancy: disc })
}
