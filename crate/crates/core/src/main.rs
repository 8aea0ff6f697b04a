use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use linchpin::config::{parse_config, ExperimentConfig};
use linchpin::experiment::{write_enumeration, write_validation, Experiment};
use linchpin::Error;

#[derive(Parser)]
#[command(name = "linchpin", version, about = "Run linchpin-variable MCMC experiments from a config file")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured sampler and write trace CSV plus summary JSON.
    Run(Common),
    /// Run two samplers on the same target and summarize the difference.
    Compare(Common),
    /// Exact-matrix checks on a finite instance (rosenbrock grid or spike-slab).
    Validate(Common),
    /// Dump the exact spike-and-slab posterior over all indicator vectors.
    Enumerate(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `output.dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, Error> {
        let text = std::fs::read_to_string(&self.config).map_err(|e| Error::Config {
            key: "--config".into(),
            line: 0,
            message: format!("cannot read {}: {e}", self.config.display()),
        })?;
        let mut cfg = parse_config(&text)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.output.dir = out.clone();
        }
        Ok(cfg)
    }
}

fn print_paths(paths: &[PathBuf]) {
    for p in paths {
        println!("{}", p.display());
    }
}

fn execute(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Run(c) => print_paths(&Experiment::new(c.load()?)?.run()?),
        Command::Compare(c) => print_paths(&Experiment::new(c.load()?)?.compare()?),
        Command::Validate(c) => {
            let (report, path) = write_validation(&c.load()?)?;
            println!("{}", path.display());
            if !report.passed {
                eprintln!("validation failed for {}", report.instance);
                return Ok(ExitCode::from(2));
            }
        }
        Command::Enumerate(c) => print_paths(&write_enumeration(&c.load()?)?.1),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
