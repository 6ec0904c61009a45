use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use dynmatch_harness::stream::vertex_count;
use dynmatch_harness::{generate_stream, read_stream, replay, run_suite, write_stream, ReplayConfig, StreamSpec, SuiteParams};

#[derive(Parser)]
#[command(name = "dynmatch", about = "Dynamic matching streams, replay and validation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an oblivious update stream.
    Gen {
        /// erdos-churn, sliding-window, clique-pm, bipartite-churn or file:PATH
        #[arg(long)]
        generator: String,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        delta: u32,
        #[arg(long = "len")]
        length: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        warmup: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        p_delete: f64,
        #[arg(long)]
        window: Option<usize>,
    },
    /// Replay a stream and write per-update metrics plus a summary.
    Run {
        #[arg(long)]
        stream: PathBuf,
        #[arg(long)]
        levels: u32,
        #[arg(long)]
        delta: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        oracle_every: usize,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        sample_p: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        summary: PathBuf,
    },
    /// Run one validation suite; exits nonzero when its gate fails.
    Validate {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        seeds: Option<u64>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        delta: Option<u32>,
        #[arg(long)]
        levels: Option<u32>,
        #[arg(long)]
        updates: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        sample_p: Option<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Gen { generator, n, delta, length, seed, out, warmup, p_delete, window } => {
            let mut spec = StreamSpec::new(generator.parse()?, n, delta, length, seed);
            spec.warmup = warmup;
            spec.p_delete = p_delete;
            spec.window = window;
            let events = generate_stream(&spec)?;
            write_stream(&out, &events)?;
            eprintln!("wrote {} events on {} vertices to {}", events.len(), vertex_count(&events), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { stream, levels, delta, seed, oracle_every, n, sample_p, out, summary } => {
            let events = read_stream(&stream).with_context(|| format!("reading {}", stream.display()))?;
            let config = ReplayConfig { n, delta, levels, algo_seed: seed, oracle_every, sample_p };
            let mut metrics = BufWriter::new(File::create(&out)?);
            let s = replay(&events, &config, &mut metrics)?;
            serde_json::to_writer_pretty(File::create(&summary)?, &s)?;
            eprintln!(
                "{} updates, mean {:.0} ns, p99 {} ns, min ratio {:.4}, final ratio {:.4}",
                s.updates, s.mean_ns, s.p99_ns, s.min_ratio, s.final_ratio
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { suite, seeds, n, delta, levels, updates, trials, sample_p, seed } => {
            let params = SuiteParams { n, delta, levels, updates, seeds, trials, sample_p, seed };
            let report = run_suite(&suite, &params)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}
