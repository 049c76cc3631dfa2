mod cli;
mod commands;
mod config;
mod report;
mod verify;

use std::process::ExitCode;

use clap::Parser;

use cli::{Cli, Command};
use config::RunConfig;
use report::{emit, Artifact};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or input files.
    Input(String),
    /// A numerical method failed on valid input.
    Numeric(String),
    Output(String),
    /// `verify` ran but some checks failed.
    ChecksFailed(usize),
}

impl From<projlog::Error> for CliError {
    fn from(e: projlog::Error) -> Self {
        if e.is_numeric() { CliError::Numeric(e.to_string()) } else { CliError::Input(e.to_string()) }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::ChecksFailed(_) => 1,
            CliError::Input(_) | CliError::Output(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

/// The invocation with flags that cannot change the data removed.
fn rerun_line() -> String {
    let mut out = vec!["projlog".to_string()];
    let mut args = std::env::args().skip(1);
    while let Some(a) = args.next() {
        if a == "--output" || a == "--workers" {
            args.next();
        } else if !(a.starts_with("--output=") || a.starts_with("--workers=")) {
            out.push(a);
        }
    }
    out.join(" ")
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::from_args(&cli.common)?;
    if let Some(w) = cfg.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Output(format!("worker pool: {e}")))?;
    }
    let mut failures = 0;
    let artifact = match &cli.command {
        Command::Kernel => commands::kernel(&mut cfg)?,
        Command::Potential => commands::potential(&mut cfg)?,
        Command::Measure => commands::measure(&mut cfg)?,
        Command::Sobolev(a) => commands::sobolev(&mut cfg, a)?,
        Command::Riesz(a) => commands::riesz(&mut cfg, a)?,
        Command::MaDensity => commands::ma_density_cmd(&mut cfg)?,
        Command::MaMass => commands::ma_mass(&mut cfg)?,
        Command::BallProfile(a) => commands::ball_profile(&mut cfg, a)?,
        Command::Prop25Check => commands::prop25(&mut cfg)?,
        Command::Constants => commands::constants(&cfg)?,
        Command::Sample(a) => commands::sample(&mut cfg, a)?,
        Command::Verify(a) => {
            if !a.all && a.checks.is_empty() {
                return Err(CliError::Input("verify: pass --all or name checks to run".into()));
            }
            let (t, f) = verify::run(&a.checks, cfg.seed, cfg.samples.unwrap_or(2_000))?;
            failures = f;
            Artifact::Csv(t)
        }
    };
    let artifact = match artifact {
        Artifact::Csv(mut t) => {
            let mut header = vec![
                format!("projlog {}", projlog::VERSION),
                format!("command: {}", cli.command.name()),
                format!("rerun: {}", rerun_line()),
                format!("config: {}", cfg.describe()),
            ];
            if let Some(m) = &cfg.measure_json {
                header.push(format!("measure: {m}"));
            }
            t.prepend_notes(header);
            Artifact::Csv(t)
        }
        json => json,
    };
    emit(&artifact, cli.command.name(), cfg.output.as_ref())?;
    if failures > 0 {
        return Err(CliError::ChecksFailed(failures));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Input(m) => eprintln!("error: {m}"),
                CliError::Numeric(m) => eprintln!("numerical failure: {m}"),
                CliError::Output(m) => eprintln!("output error: {m}"),
                CliError::ChecksFailed(n) => eprintln!("verify: {n} check(s) failed"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
