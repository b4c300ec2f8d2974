use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use csp_mimo::cli::{self, ExperimentKind};

#[derive(Parser, Debug)]
#[command(name = "csp-mimo", version = cli::build_version(), about = "Compressed-domain MIMO radar experiments")]
struct Args {
    /// roc | estimate | mismatch | resolvability | cr-match | single-run
    kind: ExperimentKind,
    /// Flat `key = value` config file.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory for CSV files and the manifest.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "CSP_MIMO_THREADS")]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("csp-mimo: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(args: Args) -> csp_mimo::Result<()> {
    let mut spec = cli::parse_config(&args.config)?;
    spec.kind = args.kind;
    if let Some(seed) = args.seed {
        spec.config.seed = seed;
    }
    if args.trials.is_some() {
        spec.trials = args.trials;
    }
    if let Some(out) = args.out {
        spec.out = out;
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(csp_mimo::Error::Config("--threads must be >= 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| csp_mimo::Error::Config(format!("thread pool: {e}")))?;
    let report = pool.install(|| cli::run(&spec, args.threads))?;
    for f in &report.csv_files {
        println!("{}", f.display());
    }
    println!("{}", report.manifest.display());
    Ok(())
}
