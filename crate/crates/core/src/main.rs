use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use pucci_lab::config::{parse_config, Command};
use pucci_lab::error::{Error, Result};
use pucci_lab::runner;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    EigLinear,
    EigPucci,
    Minmax,
    Exhaust,
    Select,
    Simulate,
    Saddle,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::EigLinear => Command::EigLinear,
            Cmd::EigPucci => Command::EigPucci,
            Cmd::Minmax => Command::Minmax,
            Cmd::Exhaust => Command::Exhaust,
            Cmd::Select => Command::Select,
            Cmd::Simulate => Command::Simulate,
            Cmd::Saddle => Command::Saddle,
        }
    }
}

/// Principal eigenvalues of Pucci operators and growth-optimal strategy experiments.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    command: Cmd,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for manifest.json and CSV files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn execute(args: &Args) -> Result<i32> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Input(format!("thread pool: {e}")))?;
    }
    let text = std::fs::read_to_string(&args.config)?;
    let mut cfg = parse_config(&text)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let outcome = runner::run(&cfg, args.command.into(), &args.out)?;
    for v in outcome.manifest["verdicts"].as_array().into_iter().flatten() {
        let mark = if v["passed"].as_bool() == Some(true) {
            "PASS"
        } else {
            "FAIL"
        };
        eprintln!(
            "{mark} {}: {}",
            v["name"].as_str().unwrap_or(""),
            v["detail"].as_str().unwrap_or("")
        );
    }
    if let Some(err) = outcome.manifest["error"].as_object() {
        eprintln!("error ({}): {}", err["kind"], err["message"]);
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            let name = Command::from(args.command).name();
            if let Err(w) = runner::write_error_manifest(&args.out, name, &e) {
                eprintln!("could not write manifest: {w}");
            }
            ExitCode::from(2)
        }
    }
}
