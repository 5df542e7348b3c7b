use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use switchgraph::bases::BasisKind;
use switchgraph::bench::{bench_scs, WARMUP_TRIALS};
use switchgraph::harness::{run_experiment, ConfigError, ExperimentConfig};
use switchgraph::scs::QUADRATIC_MEMORY_LIMIT;
use switchgraph::spine::Spine;
use switchgraph::verify::{run_suite, Suite};
use switchgraph::{Error, Graph};

#[derive(Debug, Parser)]
#[command(name = "switchgraph", version, about = "Online prediction of switching graph labelings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a random spanning tree, linearize it and print the spine as
    /// 1-based vertex ids.
    SampleSpine {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run an experiment described by a key = value config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output` in the config.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Master seed; overrides `seed` in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a verification suite and print one line per check.
    Verify {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(Suite::NAMES))]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Median per-trial time of the SCS engine for n = nmin, 2 nmin, ..., nmax.
    Bench {
        #[arg(long, value_parser = ["full", "btree"])]
        basis: String,
        #[arg(long)]
        nmin: usize,
        #[arg(long)]
        nmax: usize,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Permit the full basis above 4096 vertices.
        #[arg(long)]
        allow_quadratic: bool,
    },
}

fn usage(message: String) -> Error {
    ConfigError::Invalid { key: "arguments".into(), message }.into()
}

fn sample_spine(graph: PathBuf, seed: u64) -> Result<(), Error> {
    let g = Graph::from_file(&graph)?;
    let (_, spine) = Spine::sample(&g, seed)?;
    let ids: Vec<String> = spine.order().iter().map(|v| (v + 1).to_string()).collect();
    println!("{}", ids.join(" "));
    Ok(())
}

fn run(config: PathBuf, output: Option<PathBuf>, seed: Option<u64>) -> Result<(), Error> {
    let mut cfg = ExperimentConfig::from_file(&config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if output.is_some() {
        cfg.output = output;
    }
    let dir = cfg.output.clone().ok_or_else(|| usage("no output directory: set `output` in the config or pass --output".into()))?;
    let result = run_experiment(&cfg)?;
    result.write_outputs(&dir)?;
    print!("{}", result.summary_table());
    println!("wrote {} and {}", dir.join("results.csv").display(), dir.join("meta.txt").display());
    Ok(())
}

fn verify(suite: &str, seed: u64) -> Result<bool, Error> {
    let suite: Suite = suite.parse().map_err(usage)?;
    let checks = run_suite(suite, seed)?;
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {} failed", checks.len(), failed);
    Ok(failed == 0)
}

fn bench(basis: &str, nmin: usize, nmax: usize, trials: usize, seed: u64, allow_quadratic: bool) -> Result<(), Error> {
    let kind: BasisKind = basis.parse().map_err(|e: String| usage(e))?;
    if !nmin.is_power_of_two() || !nmax.is_power_of_two() || nmin > nmax {
        return Err(usage(format!("--nmin {nmin} and --nmax {nmax} must be powers of two with nmin <= nmax")));
    }
    if trials == 0 {
        return Err(usage("--trials must be positive".into()));
    }
    if kind == BasisKind::Full && nmax > QUADRATIC_MEMORY_LIMIT && !allow_quadratic {
        return Err(usage(format!("the full basis above n = {QUADRATIC_MEMORY_LIMIT} needs --allow-quadratic")));
    }
    println!("basis,n,trials,warmup,median_usec,active");
    let mut n = nmin;
    while n <= nmax {
        let row = bench_scs(kind, n, trials, seed, allow_quadratic)?;
        println!("{},{},{},{},{:.4},{}", kind.name(), n, row.trials, WARMUP_TRIALS, row.median_usec, row.active);
        n *= 2;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::SampleSpine { graph, seed } => sample_spine(graph, seed).map(|_| true),
        Command::Run { config, output, seed } => run(config, output, seed).map(|_| true),
        Command::Verify { suite, seed } => verify(&suite, seed),
        Command::Bench { basis, nmin, nmax, trials, seed, allow_quadratic } => bench(&basis, nmin, nmax, trials, seed, allow_quadratic).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}
