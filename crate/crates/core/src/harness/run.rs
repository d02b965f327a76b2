use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, SweepAxis, SweepConfig};
use crate::error::{Error, Result};
use crate::objectives::Objective;
use crate::optimizers::{
    batched_ngd_run, battling_ngd_run, params_smooth, params_strong, phased_run, pngd_run, Mode, Trace,
};
use crate::oracles::ComparisonOracle;
use crate::vectorspace::Vector;

/// Round budget used when a config leaves `budget` unset and the theoretical
/// one is larger.
pub const MAX_DEFAULT_ROUNDS: u64 = 1_000_000;

/// Offset separating the oracle's noise stream from the direction stream.
const ORACLE_SEED_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;

/// A finished experiment.
#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub trace: Trace,
    pub known_min: Option<f64>,
    /// First round whose running minimum is within `eps` of the known
    /// minimum.
    pub rounds_to_eps: Option<u64>,
}

impl ExperimentResult {
    /// `(duel, multiwise)` counters at the round that reached `eps`, or the
    /// totals if it was never reached.
    pub fn queries_to_eps(&self) -> (u64, u64) {
        let r = match self.rounds_to_eps {
            Some(t) => self.trace.all().find(|r| r.round == t).unwrap_or(self.trace.last()),
            None => self.trace.last(),
        };
        (r.duel_queries, r.multiwise_queries)
    }
}

fn dist_sq(obj: &Objective, w1: &Vector) -> f64 {
    let d2 = match obj.known_minimizer() {
        Some(x) => w1.sub(x).map(|r| r.dot(&r).unwrap_or(0.0)).unwrap_or(0.0),
        None => 0.0,
    };
    if d2 > 0.0 {
        d2
    } else {
        log::warn!("initial distance to the minimizer is unknown or zero; using 1 in the parameter formulas");
        1.0
    }
}

fn capped(rounds: u64, budget: Option<u64>, warnings: &mut Vec<String>) -> u64 {
    match budget {
        Some(b) => b,
        None if rounds > MAX_DEFAULT_ROUNDS => {
            let msg = format!("theoretical budget of {rounds} rounds capped at {MAX_DEFAULT_ROUNDS}");
            log::warn!("{msg}");
            warnings.push(msg);
            MAX_DEFAULT_ROUNDS
        }
        None => rounds,
    }
}

/// Runs one experiment in memory.
pub fn execute(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let d = cfg.dim;
    let obj = cfg.objective.build(d)?;
    let dom = cfg.domain.build(d)?;
    let w1 = cfg.w1.build(d)?;
    let ds = dist_sq(&obj, &w1);
    let known_min = obj.known_min_value();
    let beta = obj.beta();
    let alpha = obj.alpha();

    let mut oracle = ComparisonOracle::new(obj, cfg.nu, cfg.seed.wrapping_add(ORACLE_SEED_OFFSET))?;
    if cfg.nu > 0.0 {
        oracle = oracle.with_resampling(cfg.delta)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mode = cfg.algo.mode();
    let mut warnings = Vec::new();

    let mut trace = if cfg.algo.is_phased() {
        let alpha = alpha.ok_or_else(|| Error::Config(format!("'{}' has no alpha", cfg.objective)))?;
        let sched = params_strong(cfg.eps, alpha, beta, d, ds, cfg.m, mode)?;
        let total = sched.total_rounds();
        let sched = sched.truncated(capped(total, cfg.budget, &mut warnings));
        phased_run(&mut oracle, &dom, &w1, &sched, &mut rng)?
    } else {
        let p = params_smooth(cfg.eps, beta, d, ds, cfg.m, mode)?;
        let p = p.with_rounds(capped(p.rounds, cfg.budget, &mut warnings));
        match mode {
            Mode::Single => pngd_run(&mut oracle, &dom, &w1, &p, &mut rng)?,
            Mode::Batched => batched_ngd_run(&mut oracle, &dom, &w1, &p, &mut rng)?,
            Mode::Battling => battling_ngd_run(&mut oracle, &dom, &w1, &p, &mut rng)?,
        }
    };
    trace.warnings.extend(warnings);
    let rounds_to_eps = known_min.and_then(|f| trace.first_round_reaching(f + cfg.eps).map(|r| r.round));
    Ok(ExperimentResult {
        config: cfg.clone(),
        trace,
        known_min,
        rounds_to_eps,
    })
}

/// Writes a trace as CSV:
/// `round,duel_queries,multiwise_queries,f_w,f_runmin[,subopt]`.
pub fn write_trace_csv<W: Write>(out: W, trace: &Trace, known_min: Option<f64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["round", "duel_queries", "multiwise_queries", "f_w", "f_runmin"];
    if known_min.is_some() {
        header.push("subopt");
    }
    w.write_record(&header)?;
    for r in trace.all() {
        let mut row = vec![
            r.round.to_string(),
            r.duel_queries.to_string(),
            r.multiwise_queries.to_string(),
            r.f_w.to_string(),
            r.f_runmin.to_string(),
        ];
        if let Some(f) = known_min {
            row.push((r.f_runmin - f).to_string());
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

fn write_csv_file(path: &Path, res: &ExperimentResult) -> Result<()> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_trace_csv(BufWriter::new(f), &res.trace, res.known_min)
}

/// Runs one experiment and writes its trace to `cfg.out` if set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let res = execute(cfg)?;
    for w in &res.trace.warnings {
        log::warn!("{w}");
    }
    if let Some(path) = &cfg.out {
        write_csv_file(path, &res)?;
    }
    Ok(res)
}

/// Runs every setting of a sweep in parallel, writes one trace per setting
/// and `summary.csv` to `out_dir`, and returns the results in setting order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<ExperimentResult>> {
    let settings = cfg.settings()?;
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::io(&cfg.out_dir, e))?;
    let results = settings.par_iter().map(run_experiment).collect::<Result<Vec<_>>>()?;
    let path = cfg.out_dir.join("summary.csv");
    let f = File::create(&path).map_err(|e| Error::io(&path, e))?;
    write_summary(BufWriter::new(f), &cfg.sweep, &results)?;
    Ok(results)
}

/// Summary rows: the swept value, rounds to `eps` (`-1` if never reached)
/// and the query counters at that round.
pub fn write_summary<W: Write>(out: W, axis: &SweepAxis, results: &[ExperimentResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([axis.name(), "rounds_to_eps", "duel_queries", "multiwise_queries"])?;
    for r in results {
        let key = match axis {
            SweepAxis::M(_) => r.config.m.to_string(),
            SweepAxis::Nu(_) => r.config.nu.to_string(),
        };
        let reached = r.rounds_to_eps.map_or("-1".to_string(), |t| t.to_string());
        let (duels, multi) = r.queries_to_eps();
        w.write_record([key, reached, duels.to_string(), multi.to_string()])?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}
