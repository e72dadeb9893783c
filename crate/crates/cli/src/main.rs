use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dyntr::oracle::StreamConfig;
use dyntr::stream::{self, RunError, RunOptions};
use dyntr::{EngineKind, Mode};

#[derive(Parser)]
#[command(name = "dyntr", version, about = "Fully dynamic transitive reduction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay an update stream and print the answers to its queries.
    Run {
        /// Stream file; stdin when omitted or `-`.
        input: Option<PathBuf>,
        #[arg(long, default_value_t = EngineKind::Comb)]
        engine: EngineKind,
        /// Expected mode; must match the stream header.
        #[arg(long)]
        mode: Option<Mode>,
        /// Compare against the brute-force oracle after every update.
        #[arg(long)]
        check: bool,
        /// Per-update statistics as CSV.
        #[arg(long)]
        stats: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a generated random stream and write per-update statistics.
    Bench {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = Mode::Dag)]
        mode: Mode,
        #[arg(long, default_value_t = EngineKind::Comb)]
        engine: EngineKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Insert-only steps before the mixed phase.
        #[arg(long, default_value_t = 0)]
        build: usize,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out_csv: Option<PathBuf>,
    },
}

fn read_input(input: Option<PathBuf>) -> io::Result<String> {
    let mut text = String::new();
    match input {
        Some(p) if p.as_os_str() != "-" => File::open(p)?.read_to_string(&mut text)?,
        _ => io::stdin().read_to_string(&mut text)?,
    };
    Ok(text)
}

fn write_stats(path: Option<PathBuf>, rows: &[stream::StatRow]) -> io::Result<()> {
    match path {
        Some(p) => stream::write_csv(BufWriter::new(File::create(p)?), rows),
        None => stream::write_csv(io::stdout().lock(), rows),
    }
}

fn run(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Run { input, engine, mode, check, stats, seed } => {
            let text = read_input(input)?;
            if let Some(mode) = mode {
                let header = stream::parse_stream(&text)?;
                if header.mode != mode {
                    return Err(RunError::Parse {
                        line: 1,
                        msg: format!("header declares mode={} but --mode {mode} was given", header.mode),
                    });
                }
            }
            let out = stream::run_stream(&text, &RunOptions { engine, check, seed }).inspect_err(|e| {
                if let RunError::Check { reproducer, .. } = e {
                    eprint!("reproducer:\n{reproducer}");
                }
            })?;
            io::stdout().lock().write_all(out.output.as_bytes())?;
            if stats.is_some() {
                write_stats(stats, &out.stats)?;
            }
        }
        Command::Bench { n, steps, mode, engine, seed, build, out_csv } => {
            let mut cfg = StreamConfig::new(n, steps, mode, seed);
            cfg.build = build;
            let rows = stream::bench(&cfg, engine)?;
            write_stats(out_csv, &rows)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors count as malformed input.
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dyntr: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
