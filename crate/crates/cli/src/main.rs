//! `colmix`: command-line harness for the collision and mixing-entropy numerics.
//!
//! Exit codes: 0 success, 1 a checked invariant failed, 2 invalid input,
//! 3 a resource cap was exceeded.

mod commands;
mod config;
mod manifest;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};
use colmix::io::Units;
use serde_json::Value;

use crate::config::{parse_param, parse_units, ConfigFile, Overrides};

/// Input rejected before any computation ran.
#[derive(Debug)]
pub struct Invalid(String);

impl Invalid {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

impl fmt::Display for Invalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

#[derive(Parser, Debug)]
#[command(name = "colmix", version, about = "Collision-model friction and entropy-of-mixing laboratory")]
struct Cli {
    /// JSON config: {seed, units, dense_cap, command: {name, params}}.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Entropy unit for emitted values: nats or bits.
    #[arg(long, global = true, value_parser = parse_units)]
    units: Option<Units>,
    /// Largest Hilbert-space dimension d^N the dense paths may build.
    #[arg(long, global = true)]
    dense_cap: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "colmix-out")]
    out: PathBuf,
    /// Parameter override, `key=<json>`; repeatable.
    #[arg(long = "param", short = 'p', global = true, value_parser = parse_param)]
    params: Vec<(String, Value)>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Gibbs state of a Hamiltonian and its entropy.
    Gibbs,
    /// Sequential collisions: ledger CSV and the dissipation identity.
    Collide,
    /// Entropy of mixing over a grid of n, with extrapolation and plot data.
    MixSweep,
    /// Typicality, insertion-factor and increase-formula checks.
    Appendix,
    /// The full acceptance matrix.
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Gibbs => "gibbs",
            Command::Collide => "collide",
            Command::MixSweep => "mix-sweep",
            Command::Appendix => "appendix",
            Command::Verify => "verify",
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<colmix::Error>() {
        return if e.is_resource_cap() { 3 } else { 2 };
    }
    2
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let total = Instant::now();
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let overrides = Overrides { seed: cli.seed, units: cli.units, dense_cap: cli.dense_cap, params: cli.params };
    let mut config = config::resolve(cli.command.map(Command::name), file, overrides)?;
    let outcome = commands::run(&mut config)?;

    let mut timings: BTreeMap<String, f64> = outcome.timings_ms;
    timings.insert("total".into(), total.elapsed().as_secs_f64() * 1e3);
    let mut files = outcome.files;
    let mut snapshot = serde_json::to_string_pretty(&config)?;
    snapshot.push('\n');
    files.push(("config.json".into(), snapshot.into_bytes()));
    manifest::write_outputs(&cli.out, &config, &files, timings)?;

    for line in &outcome.lines {
        println!("{line}");
    }
    println!("wrote {} files and {} to {}", files.len(), manifest::MANIFEST_FILE, cli.out.display());
    Ok(outcome.ok)
}

fn main() -> ExitCode {
    let help = format!("Parameters (--param key=value) and their defaults:\n{}", commands::describe_params());
    let matches = Cli::command().after_help(help).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
