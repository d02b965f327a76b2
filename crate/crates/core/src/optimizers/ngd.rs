//! Normalized gradient descent driven by comparison feedback.
//!
//! Every algorithm follows the same round structure:
//!
//! 1. query the oracle around the current iterate `w` and turn the feedback
//!    into a normalized gradient estimate `g` (a signed average of random
//!    directions, `||g|| <= 1`);
//! 2. step `w <- project(w - eta g)`;
//! 3. duel the running minimum against the new `w` and keep the winner.
//!
//! They differ only in step 1.

use rand::Rng;

use super::params::{Mode, PhaseSchedule, SmoothParams};
use super::trace::{Trace, TraceRecord};
use crate::error::{check_dim, Error, Result};
use crate::oracles::{ComparisonOracle, Sign};
use crate::querysets::{build_unchecked, extract_unchecked, StructuredQuerySet};
use crate::vectorspace::{sample_sphere_unchecked, Domain, Vector};

/// Hooks into each round, for diagnostics and tests.
pub trait RoundObserver {
    /// The aggregated descent direction of `round` (1-based).
    fn on_direction(&mut self, _round: u64, _g: &Vector) {}

    /// The query set, winner index and extracted estimates of a battling round.
    fn on_battle(&mut self, _round: u64, _set: &StructuredQuerySet, _winner: usize, _estimates: &[Vector]) {}

    /// The iterate after projection.
    fn on_iterate(&mut self, _round: u64, _w: &Vector) {}
}

/// Observer that does nothing.
pub struct NoObserver;

impl RoundObserver for NoObserver {}

fn check_inputs(oracle: &ComparisonOracle, dom: &Domain, w1: &Vector) -> Result<()> {
    check_dim(oracle.objective().dim(), dom.dim())?;
    check_dim(dom.dim(), w1.dim())?;
    if !dom.contains(w1, 1e-9)? {
        return Err(Error::param("initial point lies outside the domain"));
    }
    Ok(())
}

fn check_mode(p: &SmoothParams, expected: Mode) -> Result<()> {
    p.validate()?;
    if p.mode != expected {
        return Err(Error::param(format!(
            "parameters are for {} mode but the algorithm needs {expected}",
            p.mode
        )));
    }
    Ok(())
}

fn record(oracle: &ComparisonOracle, round: u64, w: &Vector, runmin: &Vector) -> TraceRecord {
    let f = oracle.objective();
    TraceRecord {
        round,
        duel_queries: oracle.ledger().duel_queries(),
        multiwise_queries: oracle.ledger().multiwise_queries(),
        f_w: f.eval_unchecked(w),
        f_runmin: f.eval_unchecked(runmin),
    }
}

/// `sum_i coef_i * u_i`.
fn combine<'a>(d: usize, terms: impl Iterator<Item = (f64, &'a Vector)>) -> Vector {
    let mut g = Vector::from_raw(vec![0.0; d]);
    for (c, u) in terms {
        g.axpy_unchecked(c, u);
    }
    g
}

/// Shared round loop; `estimate` produces the descent direction at `w`.
fn descend<R, O, E>(
    oracle: &mut ComparisonOracle,
    dom: &Domain,
    w1: &Vector,
    p: &SmoothParams,
    rng: &mut R,
    observer: &mut O,
    mut estimate: E,
) -> Result<Trace>
where
    R: Rng + ?Sized,
    O: RoundObserver + ?Sized,
    E: FnMut(&mut ComparisonOracle, &Vector, &mut R, &mut O, u64) -> Vector,
{
    let mut w = w1.clone();
    let mut runmin = w1.clone();
    let mut trace = Trace::new(record(oracle, 0, &w, &runmin), runmin.clone());
    trace.records.reserve(p.rounds.min(1 << 24) as usize);
    for t in 1..=p.rounds {
        let g = estimate(oracle, &w, rng, observer, t);
        observer.on_direction(t, &g);
        w.axpy_unchecked(-p.eta, &g);
        w = dom.project(&w)?;
        observer.on_iterate(t, &w);
        if oracle.duel(&runmin, &w) != Sign::Minus {
            runmin = w.clone();
        }
        trace.records.push(record(oracle, t, &w, &runmin));
    }
    trace.final_point = runmin;
    Ok(trace)
}

/// Projected NGD with one duel `(w + gamma u, w - gamma u)` per round.
///
/// Consumes `2 * rounds` duels (times the resampling factor).
pub fn pngd_run<R: Rng + ?Sized>(
    oracle: &mut ComparisonOracle,
    dom: &Domain,
    w1: &Vector,
    p: &SmoothParams,
    rng: &mut R,
) -> Result<Trace> {
    pngd_run_observed(oracle, dom, w1, p, rng, &mut NoObserver)
}

pub fn pngd_run_observed<R: Rng + ?Sized, O: RoundObserver + ?Sized>(
    oracle: &mut ComparisonOracle,
    dom: &Domain,
    w1: &Vector,
    p: &SmoothParams,
    rng: &mut R,
    observer: &mut O,
) -> Result<Trace> {
    check_mode(p, Mode::Single)?;
    check_inputs(oracle, dom, w1)?;
    let d = w1.dim();
    let gamma = p.gamma;
    descend(oracle, dom, w1, p, rng, observer, |oracle, w, rng, _, _| {
        let u = sample_sphere_unchecked(d, 1.0, rng);
        let x = w.add_scaled(gamma, &u).expect("dimensions checked");
        let y = w.add_scaled(-gamma, &u).expect("dimensions checked");
        let o = oracle.duel(&x, &y);
        combine(d, std::iter::once((o.value(), &u)))
    })
}

/// Batched NGD: `m` duels along independent directions per round, averaged.
///
/// Consumes `(m + 1) * rounds` duels.
pub fn batched_ngd_run<R: Rng + ?Sized>(
    oracle: &mut ComparisonOracle,
    dom: &Domain,
    w1: &Vector,
    p: &SmoothParams,
    rng: &mut R,
) -> Result<Trace> {
    batched_ngd_run_observed(oracle, dom, w1, p, rng, &mut NoObserver)
}

pub fn batched_ngd_run_observed<R: Rng + ?Sized, O: RoundObserver + ?Sized>(
    oracle: &mut ComparisonOracle,
    dom: &Domain,
    w1: &Vector,
    p: &SmoothParams,
    rng: &mut R,
    observer: &mut O,
) -> Result<Trace> {
    check_mode(p, Mode::Batched)?;
    check_inputs(oracle, dom, w1)?;
    let d = w1.dim();
    let m = p.m;
    if m > d {
        return Err(Error::param(format!(
            "batched mode requires m <= d, got m = {m}, d = {d}"
        )));
    }
    let gamma = p.gamma;
    let weight = 1.0 / m as f64;
    descend(oracle, dom, w1, p, rng, observer, |oracle, w, rng, _, _| {
        let dirs: Vec<Vector> = (0..m).map(|_| sample_sphere_unchecked(d, 1.0, rng)).collect();
        let signs: Vec<Sign> = dirs
            .iter()
            .map(|u| {
                let x = w.add_scaled(gamma, u).expect("dimensions checked");
                let y = w.add_scaled(-gamma, u).expect("dimensions checked");
                oracle.duel(&x, &y)
            })
            .collect();
        combine(d, signs.iter().zip(&dirs).map(|(o, u)| (o.value() * weight, u)))
    })
}

/// Battling NGD: one winner query over the `2^l` structured points
/// (`l = floor(log2 m)`) per round; the winner yields `l` sign bits.
///
/// Consumes `rounds` multiwise queries and `rounds` duels.
pub fn battling_ngd_run<R: Rng + ?Sized>(
    oracle: &mut ComparisonOracle,
    dom: &Domain,
    w1: &Vector,
    p: &SmoothParams,
    rng: &mut R,
) -> Result<Trace> {
    battling_ngd_run_observed(oracle, dom, w1, p, rng, &mut NoObserver)
}

pub fn battling_ngd_run_observed<R: Rng + ?Sized, O: RoundObserver + ?Sized>(
    oracle: &mut ComparisonOracle,
    dom: &Domain,
    w1: &Vector,
    p: &SmoothParams,
    rng: &mut R,
    observer: &mut O,
) -> Result<Trace> {
    check_mode(p, Mode::Battling)?;
    check_inputs(oracle, dom, w1)?;
    let d = w1.dim();
    let l = p.ell_m();
    if l == 0 || l > d {
        return Err(Error::param(format!(
            "battling mode requires 1 <= floor(log2 m) <= d, got floor(log2 {}) = {l}, d = {d}",
            p.m
        )));
    }
    let gamma = p.gamma;
    let radius = 1.0 / (l as f64).sqrt();
    let weight = 1.0 / l as f64;
    descend(oracle, dom, w1, p, rng, observer, |oracle, w, rng, observer, t| {
        let dirs: Vec<Vector> = (0..l).map(|_| sample_sphere_unchecked(d, radius, rng)).collect();
        let set = build_unchecked(w.clone(), gamma, dirs);
        let winner = oracle.battle(set.points());
        let estimates = extract_unchecked(&set, winner);
        observer.on_battle(t, &set, winner, &estimates);
        combine(d, estimates.iter().map(|g| (weight, g)))
    })
}

/// Runs the base algorithm of `sched.mode` once per phase, warm-starting
/// each phase from the previous phase's output.
pub fn phased_run<R: Rng + ?Sized>(
    oracle: &mut ComparisonOracle,
    dom: &Domain,
    w1: &Vector,
    sched: &PhaseSchedule,
    rng: &mut R,
) -> Result<Trace> {
    phased_run_observed(oracle, dom, w1, sched, rng, &mut NoObserver)
}

pub fn phased_run_observed<R: Rng + ?Sized, O: RoundObserver + ?Sized>(
    oracle: &mut ComparisonOracle,
    dom: &Domain,
    w1: &Vector,
    sched: &PhaseSchedule,
    rng: &mut R,
    observer: &mut O,
) -> Result<Trace> {
    let base = match sched.mode {
        Mode::Batched => batched_ngd_run_observed::<R, O>,
        Mode::Battling => battling_ngd_run_observed::<R, O>,
        Mode::Single => {
            return Err(Error::param(
                "phase-wise runs need a batched or battling base algorithm",
            ))
        }
    };
    check_inputs(oracle, dom, w1)?;
    let mut trace = Trace::new(record(oracle, 0, w1, w1), w1.clone());
    if oracle.objective().alpha().is_none_or(|a| a <= 0.0) {
        trace.warnings.push(format!(
            "objective '{}' has no strong-convexity constant; the phase-wise guarantee does not apply",
            oracle.objective().name()
        ));
    }
    let mut w = w1.clone();
    for phase in &sched.phases {
        let p = sched.phase_params(phase);
        let part = base(oracle, dom, &w, &p, rng, observer)?;
        w = part.final_point.clone();
        trace.extend_with(part);
    }
    Ok(trace)
}
