use super::{correlation, BilinearTrace, Nilsequence, Weight};
use crate::equidist::TestFunction;
use crate::error::{Error, Result};
use crate::sieve::dense_set;

/// Smallest `W` with `q` in `(W/2, W]`, or 2 for `q = 1`.
pub fn default_w(q: u64) -> u64 {
    q.max(2)
}

/// `Q1 = H^0.96`, `P1 = Q1^{min(500 eps, 1/2)}`, clamped to `2 <= P1 <= Q1`.
pub fn scan_params(h_len: u64, eps: f64) -> (f64, f64) {
    let q1 = (h_len as f64).powf(0.96).max(2.0);
    let p1 = q1.powf((500.0 * eps).min(0.5)).max(2.0).min(q1);
    (p1, q1)
}

pub struct ScanSpec<'a> {
    pub experiment_id: String,
    pub seq: &'a Nilsequence,
    pub function: &'a TestFunction,
    pub h_list: &'a [u64],
    pub n_len: u64,
    pub eps: f64,
    pub weight: &'a Weight,
    /// Also run `1_S w` with the dense set built from `(P1, Q1)`.
    pub restricted: bool,
    /// Explicit `(P1, Q1)` instead of [`scan_params`].
    pub sieve: Option<(f64, f64)>,
    pub r_override: Option<u32>,
    /// Produces the trace at a given `H` when a factorization is available.
    pub trace: Option<&'a (dyn Fn(u64, &Weight) -> Result<BilinearTrace> + Sync)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub experiment_id: String,
    pub h_len: u64,
    pub n_len: u64,
    pub eps: f64,
    pub p1: f64,
    pub q1: f64,
    pub w: u64,
    pub q: u64,
    pub weight: String,
    pub restricted: bool,
    pub value: f64,
    /// Mean `|direct - trace| / H`; NaN without a trace.
    pub defect: f64,
    pub qmc_err: f64,
    pub seconds: f64,
    /// `log log H / log H`, kept for plotting.
    pub reference: f64,
}

pub fn csv_header() -> &'static str {
    "experiment_id,H,N,eps,P1,Q1,W,q,weight,restricted,value,defect,qmc_err,seconds"
}

impl ScanRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{:?},{:?},{:?},{},{},{},{},{:?},{:?},{:?},{:.3}",
            self.experiment_id,
            self.h_len,
            self.n_len,
            self.eps,
            self.p1,
            self.q1,
            self.w,
            self.q,
            self.weight,
            self.restricted,
            self.value,
            self.defect,
            self.qmc_err,
            self.seconds
        )
    }
}

/// One correlation per `H` (and per restriction), in ascending `H`.
pub fn decay_scan(spec: &ScanSpec) -> Result<Vec<ScanRow>> {
    if spec.h_list.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::InvalidArgument("H list must be strictly ascending".into()));
    }
    let mut rows = Vec::new();
    for &h in spec.h_list {
        let (p1, q1) = spec.sieve.unwrap_or_else(|| scan_params(h, spec.eps));
        let lh = (h as f64).ln();
        let mut weights = vec![(false, spec.weight.clone())];
        if spec.restricted {
            let set = dense_set(p1, q1, spec.n_len + h, spec.r_override)?;
            weights.push((true, spec.weight.restrict(&set.members)));
        }
        for (restricted, w) in weights {
            let rep = correlation(&w, spec.function, spec.seq, h, spec.n_len)?;
            let (mut wv, mut qv, mut defect, mut qmc_err) = (2, 1, f64::NAN, f64::NAN);
            let mut seconds = rep.seconds;
            if let Some(tr) = spec.trace {
                let t0 = std::time::Instant::now();
                let bt = tr(h, &w)?;
                seconds += t0.elapsed().as_secs_f64();
                (wv, qv, defect, qmc_err) = (bt.w, bt.q, bt.mean_defect(), bt.max_qmc_err);
            }
            rows.push(ScanRow {
                experiment_id: spec.experiment_id.clone(),
                h_len: h,
                n_len: spec.n_len,
                eps: spec.eps,
                p1,
                q1,
                w: wv,
                q: qv,
                weight: rep.weight,
                restricted,
                value: rep.value,
                defect,
                qmc_err,
                seconds,
                reference: lh.ln() / lh,
            });
        }
    }
    Ok(rows)
}
