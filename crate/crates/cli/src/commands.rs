use std::io::Write;
use std::path::PathBuf;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use nilcorr::correlate::{bilinear_trace, csv_header, decay_scan, BilinearTrace, Nilsequence, ScanSpec, Weight};
use nilcorr::equidist::{obstruction_search, obstruction_witness, total_discrepancy, Bank, Sampler};
use nilcorr::factorize::{factorize, verify_factorization, Schedule};
use nilcorr::pretentious::{distance_sq, distance_sq_exact, m2_value, m_tilde, m_value, MultFn};
use nilcorr::sieve::{arith_segment, dense_set, load_or_build, ArithFn, MobiusTable, DEFAULT_BLOCK};
use nilcorr::{Error, Q};

use crate::config::{ConfigError, ExperimentConfig};

pub enum Failure {
    Config(String),
    Runtime(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = Result<Value, Failure>;

pub struct Ctx<'a> {
    pub cfg: ExperimentConfig,
    pub seed: u64,
    pub cache_dir: Option<PathBuf>,
    pub out: &'a mut dyn Write,
}

/// `id@hash12`, carried by every output row.
pub fn tagged_id(cfg: &ExperimentConfig) -> String {
    format!("{}@{}", cfg.experiment_id(), &cfg.hash()[..12])
}

fn arith_kind(cfg: &ExperimentConfig, sec: &str, key: &str, default: &str) -> Result<ArithFn, Failure> {
    let s = cfg.get_str(sec, key).unwrap_or_else(|| default.into());
    ArithFn::parse(&s).ok_or_else(|| Failure::Config(format!("[{sec}] {key}: unknown function {s:?}")))
}

/// `mu` or `lambda` on `[lo, hi)`, through the cache when one is configured.
fn table(ctx: &Ctx, kind: ArithFn, lo: u64, hi: u64) -> Result<(MobiusTable, Option<bool>), Failure> {
    match &ctx.cache_dir {
        Some(dir) => {
            let (t, reused) = load_or_build(dir, kind, lo, hi)?;
            if reused {
                log::info!("reusing cached {} table [{lo}, {hi}) from {}", kind.name(), dir.display());
            } else {
                log::info!("sieved {} on [{lo}, {hi}) into {}", kind.name(), dir.display());
            }
            Ok((t, Some(reused)))
        }
        None => Ok((arith_segment(kind, lo, hi, DEFAULT_BLOCK)?, None)),
    }
}

pub fn sieve(ctx: &mut Ctx) -> Outcome {
    let kind = arith_kind(&ctx.cfg, "sieve", "kind", "mobius")?;
    let lo: u64 = ctx.cfg.get_or("sieve", "lo", 1)?;
    let hi: u64 = ctx.cfg.require("sieve", "hi")?;
    let (t, reused) = table(ctx, kind, lo, hi)?;
    let digest = hex::encode(Sha256::digest(t.packed()));
    let nonzero = t.iter().filter(|&v| v != 0).count();
    writeln!(ctx.out, "experiment_id,kind,lo,hi,sum,nonzero,sha256")?;
    writeln!(ctx.out, "{},{},{lo},{hi},{},{nonzero},{digest}", tagged_id(&ctx.cfg), kind.name(), t.sum())?;
    Ok(json!({
        "kind": kind.name(), "lo": lo, "hi": hi, "sum": t.sum(), "sha256": digest,
        "cache_reused": reused,
        "cache_dir": ctx.cache_dir.as_ref().map(|d| d.display().to_string()),
    }))
}

fn weight(ctx: &mut Ctx, limit: u64) -> Result<Weight, Failure> {
    let kind = ctx.cfg.get_str("weight", "kind").unwrap_or_else(|| "mobius".into());
    match kind.as_str() {
        "mobius" | "liouville" => {
            let f = ArithFn::parse(&kind).expect("known kind");
            let (t, _) = table(ctx, f, 1, limit + 1)?;
            Ok(Weight::from_mobius_table(&kind, &t)?)
        }
        "signs" => Ok(Weight::random_signs(limit, ctx.seed)),
        "zero" => Ok(Weight::zero(limit)),
        "table" => {
            let text = ctx.cfg.read_file("weight", "file")?;
            let vals = text
                .lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
                .map(|(i, l)| {
                    l.trim().parse::<f64>().map_err(|_| Failure::Config(format!("weight table line {}: {l:?}", i + 1)))
                })
                .collect::<Result<Vec<f64>, _>>()?;
            let name = ctx.cfg.get_str("weight", "name").unwrap_or_else(|| "table".into());
            Ok(Weight::from_values(name, &vals)?)
        }
        k => Err(Failure::Config(format!("[weight] kind: unknown weight {k:?}"))),
    }
}

fn schedule(cfg: &ExperimentConfig) -> Result<Schedule, Failure> {
    let modulus = cfg.get_or("factor", "modulus", 4u64)?;
    let smooth = cfg.get_or("factor", "smooth", 10.0f64)?;
    let cap = cfg.get_or("factor", "denominator_cap", 100u64)?;
    let steps = cfg.get_or("factor", "steps", 3usize)?;
    Ok(Schedule::doubling(modulus, smooth, cap, steps))
}

/// `corr` reads one `H` from `[corr]`; `scan` reads a list from `[scan]`.
pub fn scan(ctx: &mut Ctx, sec: &str) -> Outcome {
    let cfg = &ctx.cfg;
    let h_list: Vec<u64> = cfg.list(sec, "H")?.ok_or_else(|| Failure::Config(format!("[{sec}] needs H")))?;
    if h_list.is_empty() || (sec == "corr" && h_list.len() != 1) {
        return Err(Failure::Config(format!("[{sec}] H must hold {}", if sec == "corr" { "one value" } else { "a list" })));
    }
    let n_len: u64 = cfg.require(sec, "N")?;
    let eps: f64 = cfg.get_or(sec, "eps", 0.001)?;
    let restricted = cfg.flag(sec, "restricted")?;
    let sieve = match (cfg.get::<f64>(sec, "P1")?, cfg.get::<f64>(sec, "Q1")?) {
        (Some(p), Some(q)) => Some((p, q)),
        (None, None) => None,
        _ => return Err(Failure::Config(format!("[{sec}] give both P1 and Q1 or neither"))),
    };
    let r_override: Option<u32> = cfg.get(sec, "r_override")?;
    let with_trace = cfg.flag(sec, "trace")?;
    let samples: u64 = cfg.get_or(sec, "trace_samples", 8)?;

    let pres = ctx.cfg.presentation()?;
    let f = ctx.cfg.function(&pres)?;
    let seq = match ctx.cfg.sequence_kind()?.as_str() {
        "orbit" => {
            let (g0, x) = ctx.cfg.orbit::<f64>(&pres)?;
            Nilsequence::orbit(pres.clone(), g0, x)?
        }
        _ => Nilsequence::Poly(ctx.cfg.polyseq::<f64>(pres.clone())?),
    };
    let h_max = *h_list.iter().max().expect("nonempty");
    let exact = if with_trace { Some(ctx.cfg.polyseq::<Q>(pres.clone())?) } else { None };
    let fr = match &exact {
        Some(g) => Some(factorize(g, n_len, h_max, &schedule(&ctx.cfg)?)?),
        None => None,
    };
    let w = weight(ctx, n_len + h_max)?;
    let id = tagged_id(&ctx.cfg);

    let sample_n: Vec<i64> = (0..samples.max(1)).map(|i| (1 + i * n_len / samples.max(1)) as i64).collect();
    let trace_fn = |h: u64, w: &Weight| -> nilcorr::Result<BilinearTrace> {
        let (fr, g) = (fr.as_ref().expect("trace requested"), exact.as_ref().expect("trace requested"));
        bilinear_trace(fr, g, &f, w, h, None, &sample_n)
    };
    let spec = ScanSpec {
        experiment_id: id,
        seq: &seq,
        function: &f,
        h_list: &h_list,
        n_len,
        eps,
        weight: &w,
        restricted,
        sieve,
        r_override,
        trace: if with_trace { Some(&trace_fn) } else { None },
    };
    let rows = decay_scan(&spec)?;
    writeln!(ctx.out, "{}", csv_header())?;
    for r in &rows {
        writeln!(ctx.out, "{}", r.to_csv())?;
    }
    Ok(json!({
        "rows": rows.len(),
        "H": h_list,
        "N": n_len,
        "weight": w.name(),
        "function": f.label(),
        "values": rows.iter().map(|r| r.value).collect::<Vec<_>>(),
    }))
}

pub fn factor(ctx: &mut Ctx) -> Outcome {
    let pres = ctx.cfg.presentation()?;
    let g = ctx.cfg.polyseq::<Q>(pres)?;
    let n_len: u64 = ctx.cfg.require("factor", "N")?;
    let h_len: u64 = ctx.cfg.require("factor", "H")?;
    let fr = factorize(&g, n_len, h_len, &schedule(&ctx.cfg)?)?;
    let report = verify_factorization(&fr, &g)?;
    let id = tagged_id(&ctx.cfg);
    write!(ctx.out, "# {id}\n{}", fr.to_text())?;
    println!("experiment_id,check,passed,detail");
    for c in &report.checks {
        println!("{id},{},{},\"{}\"", c.name, c.passed, c.detail.replace('"', "'"));
    }
    let summary = json!({
        "q": fr.q,
        "W": fr.w,
        "iterations": fr.iterations(),
        "subgroup_dim": fr.subgroup().m(),
        "checks": report.checks.iter().map(|c| json!({"name": c.name, "passed": c.passed})).collect::<Vec<_>>(),
        "passed": report.passed(),
    });
    if !report.passed() {
        let names: Vec<&str> = report.failures().iter().map(|c| c.name).collect();
        return Err(Failure::Runtime(format!("verification failed: {}", names.join(", "))));
    }
    Ok(summary)
}

pub fn equidist(ctx: &mut Ctx) -> Outcome {
    let pres = ctx.cfg.presentation()?;
    let g = ctx.cfg.polyseq::<f64>(pres.clone())?;
    let n_len: u64 = ctx.cfg.require("equidist", "N")?;
    let delta: f64 = ctx.cfg.get_or("equidist", "delta", 1.0)?;
    let bound: u64 = ctx.cfg.get_or("equidist", "bank_bound", 3)?;
    let m_bound: u64 = ctx.cfg.get_or("equidist", "M", 10)?;
    let threshold: f64 = ctx.cfg.get_or("equidist", "threshold", 0.5)?;
    let id = tagged_id(&ctx.cfg);

    let bank = Bank::standard(pres, bound)?;
    let sampler = Sampler::from_polyseq2("g", &g, 0);
    let d = total_discrepancy(&sampler, n_len, delta, &bank)?;
    let g1 = g.restrict_h0();
    let obs = obstruction_search(&g1, n_len, m_bound)?;
    // a witness progression is only promised once the norm is this small
    let witness_limit = n_len as f64 / (8.0 * std::f64::consts::PI * m_bound as f64);
    let witness = match &obs {
        Some(o) if o.norm <= witness_limit => Some(obstruction_witness(&o.eta, &g1, n_len, threshold)?),
        Some(o) => {
            log::info!("obstruction norm {:.3} exceeds {witness_limit:.3}; no witness sought", o.norm);
            None
        }
        None => None,
    };
    writeln!(ctx.out, "experiment_id,N,delta,bank_size,deviation,worst,start,step,len,eta,norm,witness_abs_mean")?;
    let (eta, norm) = match &obs {
        Some(o) => (format!("{:?}", o.eta.a).replace(',', ""), format!("{:?}", o.norm)),
        None => ("none".into(), "NaN".into()),
    };
    let wm = witness.as_ref().map_or(f64::NAN, |w| w.abs_mean);
    writeln!(
        ctx.out,
        "{id},{n_len},{delta:?},{},{:?},{},{},{},{},{eta},{norm},{wm:?}",
        d.bank_size, d.deviation, d.worst_label, d.progression.start, d.progression.step, d.progression.len
    )?;
    Ok(json!({
        "deviation": d.deviation,
        "worst": d.worst_label,
        "bank_size": d.bank_size,
        "obstruction": obs.as_ref().map(|o| json!({"eta": o.eta.a, "norm": o.norm, "truncated": o.truncated})),
        "witness_abs_mean": witness.map(|w| w.abs_mean),
    }))
}

pub fn pretentious(ctx: &mut Ctx) -> Outcome {
    let cfg = &ctx.cfg;
    let kind = cfg.get_str("pretentious", "weight").unwrap_or_else(|| "mobius".into());
    let x: u64 = cfg.require("pretentious", "X")?;
    let y: u64 = cfg.get_or("pretentious", "Y", 1)?;
    let x_cap: u64 = cfg.get_or("pretentious", "X_cap", x)?;
    let res: Option<f64> = cfg.get("pretentious", "resolution")?;
    let beta = match kind.as_str() {
        "mobius" => MultFn::mobius(x_cap)?,
        "liouville" => MultFn::liouville(x_cap)?,
        k => return Err(Failure::Config(format!("[pretentious] weight: unknown function {k:?}"))),
    };
    let id = tagged_id(cfg);
    let one = MultFn::one(x_cap);
    let d2 = distance_sq(&beta, &one, x)?;
    let d2_exact = distance_sq_exact(&beta, &one, x)?;
    let m = m_value(&beta, x, res)?;
    let m2 = m2_value(&beta, x, y, res)?;
    let mt = m_tilde(&beta, x, y, x_cap, res)?;

    writeln!(ctx.out, "experiment_id,weight,quantity,X,value,detail")?;
    let exact = d2_exact.as_ref().map_or(String::new(), |q| format!("exact {q}"));
    writeln!(ctx.out, "{id},{kind},D2,{x},{d2:?},{exact}")?;
    writeln!(ctx.out, "{id},{kind},M,{x},{:?},t {:?}", m.value, m.t)?;
    writeln!(ctx.out, "{id},{kind},M2,{x},{:?},Y {y} q {} character {} t {:?}", m2.m.value, m2.q, m2.character, m2.m.t)?;
    for (xp, v) in &mt.ladder {
        writeln!(ctx.out, "{id},{kind},M2_ladder,{xp},{v:?},Y {y}")?;
    }
    writeln!(ctx.out, "{id},{kind},Mtilde,{x},{:?},attained at X = {}", mt.value, mt.x_at_min)?;
    Ok(json!({
        "D2": d2,
        "D2_exact": d2_exact.map(|q| q.to_string()),
        "M": m.value,
        "M2": m2.m.value,
        "Mtilde": mt.value,
    }))
}

pub fn densitycheck(ctx: &mut Ctx) -> Outcome {
    let cfg = &ctx.cfg;
    let n_len: u64 = cfg.require("densitycheck", "N")?;
    let r_override: Option<u32> = cfg.get("densitycheck", "r_override")?;
    let pairs: Vec<(f64, f64)> = match cfg.get_str("densitycheck", "pairs") {
        Some(s) => s
            .split(',')
            .map(|p| {
                let (a, b) = p.trim().split_once(':').ok_or_else(|| Failure::Config(format!("pair {p:?} must read P1:Q1")))?;
                let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Failure::Config(format!("bad number in pair {p:?}")));
                Ok((num(a)?, num(b)?))
            })
            .collect::<Result<_, Failure>>()?,
        None => vec![(cfg.require("densitycheck", "P1")?, cfg.require("densitycheck", "Q1")?)],
    };
    let id = tagged_id(cfg);
    writeln!(ctx.out, "experiment_id,N,P1,Q1,levels,count,deficit,log_ratio,deficit_over_ratio")?;
    let mut out = Vec::new();
    for (p1, q1) in pairs {
        let s = dense_set(p1, q1, n_len, r_override)?;
        let ratio = s.deficit / s.bound;
        writeln!(
            ctx.out,
            "{id},{n_len},{p1:?},{q1:?},{},{},{:?},{:?},{ratio:?}",
            s.levels_used, s.count, s.deficit, s.bound
        )?;
        out.push(json!({"P1": p1, "Q1": q1, "deficit": s.deficit, "bound": s.bound}));
    }
    Ok(json!({ "N": n_len, "rows": out }))
}
