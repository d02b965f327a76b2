//! `duelopt`: run comparison-feedback optimization experiments and write
//! convergence traces as CSV.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use duelopt_core::harness::{
    run_experiment, run_sweep, write_trace_csv, Algorithm, DomainSpec, ExperimentConfig, PartialExperimentConfig,
    SweepAxis, SweepConfig, W1Spec,
};
use duelopt_core::{Error, ObjectiveKind};

#[derive(Parser)]
#[command(name = "duelopt", version, about = "Convex optimization from comparison feedback")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment; the trace goes to --out or stdout.
    Run {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Output CSV path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeat an experiment over several m or nu values.
    Sweep {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Comma-separated m values.
        #[arg(
            long,
            value_delimiter = ',',
            conflicts_with = "nu_values",
            required_unless_present = "nu_values"
        )]
        m_values: Vec<usize>,
        /// Comma-separated noise rates.
        #[arg(long, value_delimiter = ',')]
        nu_values: Vec<f64>,
        /// Directory for per-setting traces and summary.csv.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// quadratic | sinsum | l2l1
    #[arg(long)]
    objective: Option<ObjectiveKind>,
    #[arg(long)]
    dim: Option<usize>,
    /// pngd | batched | battling | batched-strong | battling-strong
    #[arg(long)]
    algo: Option<Algorithm>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Round budget overriding the theoretical one.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fill value for every coordinate of the initial point.
    #[arg(long)]
    w1_fill: Option<f64>,
    /// all | ball:R | box:LO:HI
    #[arg(long)]
    domain: Option<DomainSpec>,
    /// Resampling failure probability under noise.
    #[arg(long)]
    delta: Option<f64>,
}

impl ExperimentArgs {
    fn resolve(self, out: Option<PathBuf>) -> Result<ExperimentConfig, Error> {
        let file = match &self.config {
            Some(p) => PartialExperimentConfig::from_json_file(p)?,
            None => PartialExperimentConfig::default(),
        };
        let flags = PartialExperimentConfig {
            objective: self.objective,
            dim: self.dim,
            algo: self.algo,
            m: self.m,
            nu: self.nu,
            eps: self.eps,
            budget: self.budget,
            domain: self.domain,
            w1: self.w1_fill.map(W1Spec::Fill),
            seed: self.seed,
            delta: self.delta,
            out,
        };
        let cfg = file.overlay(flags).finish()?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { exp, out } => {
            let cfg = exp.resolve(out)?;
            let res = run_experiment(&cfg)?;
            if cfg.out.is_none() {
                let stdout = io::stdout();
                write_trace_csv(stdout.lock(), &res.trace, res.known_min)?;
            }
            let last = res.trace.last();
            eprintln!(
                "{} rounds, {} duels, {} multiwise queries, f_runmin {}",
                res.trace.rounds(),
                last.duel_queries,
                last.multiwise_queries,
                last.f_runmin
            );
        }
        Command::Sweep {
            exp,
            m_values,
            nu_values,
            out,
        } => {
            let sweep = if m_values.is_empty() {
                SweepAxis::Nu(nu_values)
            } else {
                SweepAxis::M(m_values)
            };
            let cfg = SweepConfig {
                base: exp.resolve(None)?,
                sweep,
                out_dir: out,
            };
            let results = run_sweep(&cfg)?;
            let mut err = io::stderr().lock();
            for r in &results {
                let reached = r.rounds_to_eps.map_or("-1".into(), |t| t.to_string());
                let _ = writeln!(err, "m={} nu={}: rounds_to_eps {reached}", r.config.m, r.config.nu);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 1 } else { 2 })
        }
    }
}
