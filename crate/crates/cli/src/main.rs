mod commands;
mod config;

use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde_json::json;

use commands::{Ctx, Failure};
use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "nilcorr", version, about = "Nilsequence correlation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for cached arithmetic tables.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Output file; stdout when absent. Provenance goes to `<out>.provenance.jsonl`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// `section.key=value`, applied after the config file.
    #[arg(long = "override", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand, Clone, Copy, Debug)]
enum Command {
    /// Build or reuse a Mobius/Liouville table.
    Sieve,
    /// One correlation row.
    Corr,
    /// Correlation rows over a list of H.
    Scan,
    /// Factorize a polynomial sequence and verify the result.
    Factor,
    /// Discrepancy against a test bank and an obstruction search.
    Equidist,
    /// Distances and twisted minima of a multiplicative function.
    Pretentious,
    /// Dense sieve set deficits.
    Densitycheck,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Sieve => "sieve",
            Command::Corr => "corr",
            Command::Scan => "scan",
            Command::Factor => "factor",
            Command::Equidist => "equidist",
            Command::Pretentious => "pretentious",
            Command::Densitycheck => "densitycheck",
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            log::error!("config: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            log::error!("{msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let path = cli.config.as_ref().ok_or_else(|| Failure::Config("--config PATH is required".into()))?;
    let mut cfg = ExperimentConfig::load(path, &cli.overrides)?;
    if let Some(s) = cli.seed {
        cfg.set("experiment", "seed", &s.to_string());
    }
    if let Some(t) = cli.threads {
        cfg.set("experiment", "threads", &t.to_string());
    }
    if let Some(d) = &cli.cache_dir {
        cfg.set("experiment", "cache_dir", &d.display().to_string());
    }
    let threads: usize = cfg.get_or("experiment", "threads", 0)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Runtime(format!("thread pool: {e}")))?;
    let seed = cfg.seed()?;
    let cache_dir = cfg.get_str("experiment", "cache_dir").map(PathBuf::from);

    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let t0 = Instant::now();
    let mut sink: Box<dyn Write> = match &cli.out {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).map_err(|e| Failure::Runtime(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut ctx = Ctx { cfg, seed, cache_dir, out: &mut *sink };
    let result = match cli.command {
        Command::Sieve => commands::sieve(&mut ctx),
        Command::Corr => commands::scan(&mut ctx, "corr"),
        Command::Scan => commands::scan(&mut ctx, "scan"),
        Command::Factor => commands::factor(&mut ctx),
        Command::Equidist => commands::equidist(&mut ctx),
        Command::Pretentious => commands::pretentious(&mut ctx),
        Command::Densitycheck => commands::densitycheck(&mut ctx),
    };
    let flushed = ctx.out.flush().map_err(|e| Failure::Runtime(e.to_string()));
    let result = result.and_then(|s| flushed.map(|_| s));

    // the hash is taken after the run so files read on demand are included
    let hash = ctx.cfg.hash();
    let (status, code, summary, error) = match &result {
        Ok(s) => ("ok", 0, s.clone(), None),
        Err(Failure::Config(m)) => ("config error", 2, json!(null), Some(m.clone())),
        Err(Failure::Runtime(m)) => ("runtime error", 1, json!(null), Some(m.clone())),
    };
    let record = json!({
        "experiment_id": commands::tagged_id(&ctx.cfg),
        "subcommand": cli.command.name(),
        "config": path.display().to_string(),
        "config_hash": hash,
        "versions": { "nilcorr": nilcorr::VERSION, "cli": env!("CARGO_PKG_VERSION") },
        "seed": seed,
        "threads": rayon::current_num_threads(),
        "started_unix": started,
        "seconds": t0.elapsed().as_secs_f64(),
        "status": status,
        "exit_code": code,
        "error": error,
        "summary": summary,
    });
    write_provenance(cli.out.as_ref(), &record)?;
    result.map(|_| ())
}

fn write_provenance(out: Option<&PathBuf>, record: &serde_json::Value) -> Result<(), Failure> {
    let line = format!("{record}\n");
    match out {
        Some(p) => {
            let mut name = p.as_os_str().to_owned();
            name.push(".provenance.jsonl");
            let mut f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(PathBuf::from(name))
                .map_err(|e| Failure::Runtime(format!("provenance: {e}")))?;
            f.write_all(line.as_bytes()).map_err(|e| Failure::Runtime(format!("provenance: {e}")))
        }
        None => {
            eprint!("{line}");
            Ok(())
        }
    }
}
