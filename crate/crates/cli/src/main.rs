use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hosync::reservoir::TrainOptions;
use hosync_cli::{
    cmd_metrics, cmd_simulate, cmd_sweep, cmd_train, cmd_xor, format_metrics, format_sweep_summary, format_train,
    format_xor, Global,
};

/// Coupled relaxation-oscillator reservoir simulator.
///
/// Exit status: 0 success, 1 internal error, 2 usage error, 3 malformed
/// input file, 4 invalid parameters, 5 stalled network, 6 insufficient
/// data, 7 file system error.
#[derive(Parser)]
#[command(name = "hosync", version, about, long_about)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "hosync-out")]
    out: PathBuf,
    /// Sweep worker threads; 0 = one per core.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Overrides the configured seed (network and sweep base seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the configured network and write one spike-train file per oscillator.
    Simulate,
    /// SHR and μ for pairs of spike-train files.
    Metrics {
        /// Spike-train files (at least two).
        #[arg(required = true, num_args = 2..)]
        files: Vec<PathBuf>,
        /// Pairs to evaluate as `i-j` (file positions); default all pairs.
        #[arg(long, value_delimiter = ',', value_parser = parse_pair)]
        pairs: Option<Vec<(usize, usize)>>,
    },
    /// Arnold-tongue map over the configured sweep (map.csv, map.pgm).
    Sweep {
        /// Suppress the progress line on stderr.
        #[arg(long)]
        quiet: bool,
    },
    /// XOR truth table through the configured pipeline.
    Xor {
        /// Readout weights file replacing the configured readout.
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Train the readout on a dataset CSV (in_*, feat_*, label).
    Train {
        dataset: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        learning_rate: f64,
        #[arg(long, default_value_t = 1000)]
        max_epochs: usize,
    },
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once('-').ok_or_else(|| format!("expected i-j, got `{s}`"))?;
    let p = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("`{v}`: {e}"));
    Ok((p(a)?, p(b)?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = Global {
        config: cli.config,
        out: cli.out,
        workers: cli.workers,
        seed: cli.seed,
    };
    let result = match cli.command {
        Command::Simulate => cmd_simulate(&g).map(|m| {
            for a in &m.artifacts {
                println!("wrote {}", g.out.join(&a.path).display());
            }
        }),
        Command::Metrics { files, pairs } => {
            cmd_metrics(&g, &files, pairs.as_deref()).map(|(rows, _)| print!("{}", format_metrics(&rows)))
        }
        Command::Sweep { quiet } => {
            let report = |done: usize, total: usize| {
                if done == total || done.is_multiple_of((total / 100).max(1)) {
                    eprint!("\rsweep: {done}/{total} cells");
                    if done == total {
                        eprintln!();
                    }
                    let _ = std::io::stderr().flush();
                }
            };
            let progress: Option<&(dyn Fn(usize, usize) + Sync)> = if quiet { None } else { Some(&report) };
            cmd_sweep(&g, progress).map(|(map, _)| print!("{}", format_sweep_summary(&map)))
        }
        Command::Xor { weights } => cmd_xor(&g, weights.as_deref()).map(|(rows, _)| print!("{}", format_xor(&rows))),
        Command::Train {
            dataset,
            learning_rate,
            max_epochs,
        } => {
            let opts = TrainOptions {
                learning_rate,
                max_epochs,
            };
            cmd_train(&g, &dataset, &opts).map(|(report, _)| print!("{}", format_train(&report)))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.category_code() as u8)
        }
    }
}
