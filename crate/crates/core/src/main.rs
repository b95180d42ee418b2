use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gnmd::experiments::{
    format_threshold_table, linspace, run_percolation_duel, run_sweep, threshold_table,
    write_duel_csv, write_sweep_csv, SweepConfig,
};
use gnmd::oracle::{enumerate, uniformity_test};
use gnmd::rng::trial_rng;
use gnmd::{predict, report, Error, GraphSampler, Phase, SimpleGraph};

/// Caps the number of worker threads.
const THREADS_ENV: &str = "GNMD_THREADS";

#[derive(Parser)]
#[command(name = "gnmd", version, about = "Random graphs with bounded maximum degree")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the critical mean degree for d = 2..=dmax.
    Threshold {
        #[arg(long = "dmax")]
        d_max: usize,
    },
    /// Classify (d, mu) and predict the giant fraction.
    Predict {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        json: bool,
    },
    /// Draw one uniform graph and write it as an edge list.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Component sizes and degree counts of an edge-list file.
    Components {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Monte Carlo sweep over a mean-degree grid, written as CSV.
    Sweep(GridArgs),
    /// Bounded-degree model against percolated random regular graphs.
    Duel(GridArgs),
    /// Exhaustive enumeration and a uniformity test of the sampler.
    Oracle {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write every enumerated graph, blank-line separated.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    d: usize,
    #[arg(long = "mu-from")]
    mu_from: f64,
    #[arg(long = "mu-to")]
    mu_to: f64,
    #[arg(long)]
    steps: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    trials: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

impl GridArgs {
    fn config(&self) -> SweepConfig {
        SweepConfig {
            d: self.d,
            mu_grid: linspace(self.mu_from, self.mu_to, self.steps),
            n: self.n,
            trials: self.trials,
            seed: self.seed,
        }
    }
}

fn configure_threads() -> Result<(), Error> {
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let threads: usize = value
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_ENV}={value:?} is not a thread count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}

fn create(path: &PathBuf) -> Result<BufWriter<File>, Error> {
    Ok(BufWriter::new(File::create(path)?))
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map_or_else(|| "-".to_string(), |v| format!("{v:.8}"))
}

fn run(cli: Cli) -> Result<(), Error> {
    configure_threads()?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Threshold { d_max } => {
            write!(out, "{}", format_threshold_table(&threshold_table(d_max)?))?;
        }
        Command::Predict { d, mu, json } => {
            let p = predict(d, mu)?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&p).expect("serialisable"))?;
            } else {
                let phase = match p.phase {
                    Phase::Subcritical => "subcritical",
                    Phase::Supercritical => "supercritical",
                };
                writeln!(out, "d\t{}", p.d)?;
                writeln!(out, "mu\t{}", p.mu)?;
                writeln!(out, "lambda\t{:.10}", p.lambda)?;
                writeln!(out, "mu_star\t{}", p.mu_star.map_or("inf".to_string(), |v| format!("{v:.8}")))?;
                writeln!(out, "q\t{:.10}", p.q)?;
                writeln!(out, "phase\t{phase}")?;
                writeln!(out, "psi\t{}", fmt_opt(p.psi))?;
                writeln!(out, "theta\t{}", fmt_opt(p.theta))?;
                if p.near_critical {
                    writeln!(out, "warning\tnear-critical: mean degree within {} of the threshold", gnmd::giant::NEAR_CRITICAL_BAND)?;
                }
            }
        }
        Command::Sample { n, m, d, seed, out: path } => {
            let g = GraphSampler::new(n, m, d)?.sample(&mut trial_rng(seed, 0))?;
            match path {
                Some(path) => {
                    let mut file = create(&path)?;
                    g.write_edge_list(&mut file)?;
                    file.flush()?;
                }
                None => g.write_edge_list(&mut out)?,
            }
        }
        Command::Components { input, json } => {
            let g = SimpleGraph::read_edge_list(BufReader::new(File::open(&input)?))?;
            let r = report(&g);
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&r).expect("serialisable"))?;
            } else {
                writeln!(out, "n\t{}\nm\t{}", r.n, r.m)?;
                writeln!(out, "components\t{}", r.sizes.len())?;
                writeln!(out, "largest_fraction\t{:.6}", r.largest_fraction)?;
                writeln!(out, "second_fraction\t{:.6}", r.second_fraction)?;
                let counts: Vec<String> = r.degree_counts.iter().map(|c| c.to_string()).collect();
                writeln!(out, "degree_counts\t{}", counts.join(" "))?;
                let top: Vec<String> = r.sizes.iter().take(10).map(|s| s.to_string()).collect();
                writeln!(out, "largest_sizes\t{}", top.join(" "))?;
            }
        }
        Command::Sweep(args) => {
            let rows = run_sweep(&args.config())?;
            let mut file = create(&args.out)?;
            write_sweep_csv(&rows, &mut file)?;
            file.flush()?;
        }
        Command::Duel(args) => {
            let rows = run_percolation_duel(&args.config())?;
            let mut file = create(&args.out)?;
            write_duel_csv(&rows, &mut file)?;
            file.flush()?;
        }
        Command::Oracle { n, m, d, trials, seed, dump } => {
            let ensemble = enumerate(n, m, d)?;
            if let Some(path) = dump {
                let mut file = create(&path)?;
                for (i, edges) in ensemble.graphs().iter().enumerate() {
                    if i > 0 {
                        writeln!(file)?;
                    }
                    SimpleGraph::from_edges(n, d, edges.iter().copied())?.write_edge_list(&mut file)?;
                }
                file.flush()?;
            }
            let r = uniformity_test(&ensemble, trials, seed)?;
            writeln!(out, "count\t{}", r.count)?;
            writeln!(out, "trials\t{}", r.trials)?;
            writeln!(out, "tv_distance\t{:.6}", r.tv_distance)?;
            writeln!(out, "chi_square\t{:.3}", r.chi_square)?;
            writeln!(out, "degrees_of_freedom\t{}", r.degrees_of_freedom)?;
            writeln!(out, "chi_square_q999\t{}", r.chi_square_q999.map_or("-".into(), |q| format!("{q:.3}")))?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{line}");
            ExitCode::FAILURE
        }
    }
}
