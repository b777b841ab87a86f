//! Command-line front end for the Monte-Carlo harness.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use ura_core::decoder::Method;
use ura_core::sim::{run_sweep, RunConfig, SupportRule, SweepAxis, SweepSection};
use ura_core::tree::{entropy_bound, sumrate_feasible};

#[derive(Parser)]
#[command(name = "urasim", version, about = "Unsourced random access over massive MIMO: Monte-Carlo simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one operating point.
    Run(Common),
    /// Simulate one row per value of the swept parameter.
    Sweep(Common),
    /// Report the OR-MAC entropy bound and sum-rate feasibility.
    Analyze(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration (defaults to the 32-slot reference setup).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "ebn0-db", value_delimiter = ',', allow_hyphen_values = true)]
    ebn0_db: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    ka: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    antennas: Vec<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// ml or nnls.
    #[arg(long)]
    decoder: Option<Method>,
    /// threshold:<nu>, topk:<delta> or auto.
    #[arg(long)]
    support: Option<String>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Record wall time in the CSV (makes output run-dependent).
    #[arg(long)]
    timing: bool,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_path(path)?,
            None => RunConfig::default(),
        };
        if let Some(t) = self.trials {
            cfg.run.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.run.seed = s;
        }
        if let Some(m) = self.decoder {
            cfg.decoder.method = m;
        }
        if let Some(s) = &self.support {
            cfg.support = s.parse::<SupportRule>()?;
        }
        if let Some(w) = self.workers {
            cfg.run.workers = w;
        }
        if self.timing {
            cfg.run.record_timing = true;
        }
        if let Some(out) = &self.out {
            cfg.run.output = Some(out.clone());
        }
        Ok(cfg)
    }

    fn lists(&self) -> [(SweepAxis, &Vec<f64>); 3] {
        [
            (SweepAxis::Ebn0Db, &self.ebn0_db),
            (SweepAxis::Ka, &self.ka),
            (SweepAxis::Antennas, &self.antennas),
        ]
    }
}

/// Applies single-valued flags to the config and returns the multi-valued one, if any.
fn apply_lists(cfg: &mut RunConfig, common: &Common) -> Result<Option<SweepSection>> {
    let mut sweep = None;
    for (axis, values) in common.lists() {
        match values.len() {
            0 => {}
            1 => *cfg = cfg.at(axis, values[0])?,
            _ => {
                if sweep.is_some() {
                    bail!("only one of --ebn0-db, --ka, --antennas may list several values");
                }
                sweep = Some(SweepSection {
                    axis,
                    values: values.clone(),
                });
            }
        }
    }
    Ok(sweep)
}

fn output(cfg: &RunConfig) -> Result<Box<dyn Write>> {
    Ok(match &cfg.run.output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn simulate(common: &Common, sweeping: bool) -> Result<()> {
    let mut cfg = common.load()?;
    let listed = apply_lists(&mut cfg, common)?;
    if sweeping {
        if let Some(s) = listed {
            cfg.sweep = Some(s);
        }
        if cfg.sweep.is_none() {
            bail!("sweep needs a multi-valued --ebn0-db, --ka or --antennas, or a [sweep] section");
        }
    } else {
        if listed.is_some() {
            bail!("run takes single values; use the sweep subcommand for lists");
        }
        cfg.sweep = None;
    }
    cfg.validate()?;
    run_sweep(&cfg, output(&cfg)?)?;
    Ok(())
}

fn analyze(common: &Common) -> Result<()> {
    let cfg = common.load()?;
    let profile = cfg.profile()?;
    let j = profile.bits_per_slot();
    let rate = profile.outer_rate();
    let kas: Vec<u64> = if common.ka.is_empty() {
        vec![cfg.users.active as u64]
    } else {
        common.ka.iter().map(|&k| k as u64).collect()
    };
    let mut out = csv::Writer::from_writer(output(&cfg)?);
    out.write_record(["Ka", "J", "R_out", "sum_rate_bits", "entropy_bound_bits", "feasible"])?;
    for ka in kas {
        out.write_record([
            ka.to_string(),
            j.to_string(),
            rate.to_string(),
            (ka as f64 * f64::from(j) * rate).to_string(),
            format!("{:.3}", entropy_bound(j, ka)),
            sumrate_feasible(j, ka, rate).to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(c) => simulate(c, false),
        Command::Sweep(c) => simulate(c, true),
        Command::Analyze(c) => analyze(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
