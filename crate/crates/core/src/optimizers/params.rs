//! Step size, perturbation and round-budget schedules.
//!
//! All constants come from the convergence guarantees of the respective
//! algorithms: the step is `k sqrt(eps) / (20 sqrt(d beta))` where `k` is the
//! number of sign bits aggregated per round, and the round budget is the
//! explicit `400 d beta D / ((sqrt(2) - 1) eps k)` bound.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which feedback model an algorithm consumes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// One duel per round.
    Single,
    /// `m` independent duels per round.
    Batched,
    /// One multiwise winner query over `2^floor(log2 m)` points per round.
    Battling,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Single => "single",
            Mode::Batched => "batched",
            Mode::Battling => "battling",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(Mode::Single),
            "batched" => Ok(Mode::Batched),
            "battling" => Ok(Mode::Battling),
            other => Err(Error::Config(format!("unknown mode '{other}'"))),
        }
    }
}

/// `floor(log2 m)`, the number of sign bits one winner over `m` points yields.
pub fn ell_m(m: usize) -> usize {
    if m == 0 {
        0
    } else {
        m.ilog2() as usize
    }
}

fn sqrt_log_480() -> f64 {
    480f64.ln().sqrt()
}

/// Parameters of one smooth-case run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothParams {
    pub eta: f64,
    pub gamma: f64,
    pub rounds: u64,
    pub m: usize,
    pub mode: Mode,
}

impl SmoothParams {
    /// Hand-picked parameters, validated.
    pub fn new(eta: f64, gamma: f64, rounds: u64, m: usize, mode: Mode) -> Result<Self> {
        let p = SmoothParams {
            eta,
            gamma,
            rounds,
            m,
            mode,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::param(format!(
                "eta must be positive and finite, got {}",
                self.eta
            )));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::param(format!(
                "gamma must be positive and finite, got {}",
                self.gamma
            )));
        }
        if self.m == 0 {
            return Err(Error::param("m must be at least 1"));
        }
        if self.mode == Mode::Battling && self.ell_m() == 0 {
            return Err(Error::param(format!(
                "battling mode needs m >= 2 so that floor(log2 m) >= 1, got m = {}",
                self.m
            )));
        }
        Ok(())
    }

    pub fn ell_m(&self) -> usize {
        ell_m(self.m)
    }

    /// Sign bits aggregated per round: 1, `m` or `floor(log2 m)`.
    pub fn bits_per_round(&self) -> usize {
        bits_per_round(self.mode, self.m)
    }

    pub fn with_rounds(mut self, rounds: u64) -> Self {
        self.rounds = rounds;
        self
    }
}

fn bits_per_round(mode: Mode, m: usize) -> usize {
    match mode {
        Mode::Single => 1,
        Mode::Batched => m,
        Mode::Battling => ell_m(m),
    }
}

fn check_problem(eps: f64, beta: f64, d: usize, dist_sq: f64, m: usize, mode: Mode) -> Result<()> {
    for (name, v) in [("eps", eps), ("beta", beta), ("D", dist_sq)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::param(format!("{name} must be positive and finite, got {v}")));
        }
    }
    if d == 0 {
        return Err(Error::param("dimension d must be at least 1"));
    }
    match mode {
        Mode::Single => {}
        Mode::Batched => {
            if m == 0 || m > d {
                return Err(Error::param(format!(
                    "batched mode requires 1 <= m <= d, got m = {m}, d = {d}"
                )));
            }
        }
        Mode::Battling => {
            if m < 2 {
                return Err(Error::param(format!("battling mode requires m >= 2, got m = {m}")));
            }
            if ell_m(m) > d {
                return Err(Error::param(format!(
                    "battling mode requires floor(log2 m) <= d, got floor(log2 {m}) = {} > d = {d}",
                    ell_m(m)
                )));
            }
        }
    }
    Ok(())
}

fn step_size(eps: f64, beta: f64, d: usize, k: usize) -> f64 {
    k as f64 * eps.sqrt() / (20.0 * (d as f64 * beta).sqrt())
}

fn perturbation(eps: f64, beta: f64, d: usize, dist_sq: f64, mode: Mode, m: usize) -> f64 {
    let d = d as f64;
    let common = eps.powf(1.5) * (2.0 / beta).sqrt() / (beta * dist_sq * dist_sq * sqrt_log_480());
    match mode {
        Mode::Single => common / (480.0 * d),
        Mode::Batched => common / (960.0 * d * d.sqrt()),
        Mode::Battling => {
            let l = ell_m(m) as f64;
            common / (960.0 * d * l * (d * l).sqrt())
        }
    }
}

fn round_budget(eps: f64, beta: f64, d: usize, dist_sq: f64, k: usize) -> u64 {
    (400.0 * d as f64 * beta * dist_sq / ((SQRT_2 - 1.0) * eps * k as f64)).ceil() as u64
}

/// Smooth-case schedule for target accuracy `eps`, smoothness `beta`,
/// dimension `d` and squared initial distance bound `dist_sq >= ||w1 - x*||^2`.
///
/// Single mode ignores `m`.
pub fn params_smooth(eps: f64, beta: f64, d: usize, dist_sq: f64, m: usize, mode: Mode) -> Result<SmoothParams> {
    check_problem(eps, beta, d, dist_sq, m, mode)?;
    let m = if mode == Mode::Single { 1 } else { m };
    let k = bits_per_round(mode, m);
    Ok(SmoothParams {
        eta: step_size(eps, beta, d, k),
        gamma: perturbation(eps, beta, d, dist_sq, mode, m),
        rounds: round_budget(eps, beta, d, dist_sq, k),
        m,
        mode,
    })
}

/// One warm-started stage of the strongly convex schedule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Phase {
    pub eta: f64,
    pub gamma: f64,
    pub rounds: u64,
    pub eps: f64,
}

/// Phase-wise schedule for `alpha`-strongly convex objectives.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSchedule {
    pub k_eps: u32,
    pub t_base: u64,
    pub m: usize,
    pub mode: Mode,
    pub phases: Vec<Phase>,
}

impl PhaseSchedule {
    pub fn total_rounds(&self) -> u64 {
        self.phases.iter().map(|p| p.rounds).sum()
    }

    /// Drops rounds beyond `budget`, shortening the last kept phase.
    pub fn truncated(mut self, budget: u64) -> Self {
        let mut left = budget;
        let mut kept = Vec::new();
        for mut p in self.phases {
            if left == 0 {
                break;
            }
            p.rounds = p.rounds.min(left);
            left -= p.rounds;
            kept.push(p);
        }
        self.phases = kept;
        self
    }

    pub fn phase_params(&self, phase: &Phase) -> SmoothParams {
        SmoothParams {
            eta: phase.eta,
            gamma: phase.gamma,
            rounds: phase.rounds,
            m: self.m,
            mode: self.mode,
        }
    }
}

/// Strongly convex schedule: `ceil(log2(alpha/eps))` phases, the first of
/// length `ceil(t * D)` (at least `t`) and the rest of length `2t`, where
/// `t = ceil(800 d beta / ((sqrt(2) - 1) alpha))`. Phase targets start at
/// `400 d beta D / ((sqrt(2) - 1) t_1)` and halve every phase; step and
/// perturbation follow the smooth formulas of `mode` at each target.
///
/// When `eps >= alpha` no phase is needed and the schedule is a single
/// smooth run at `eps`.
pub fn params_strong(
    eps: f64,
    alpha: f64,
    beta: f64,
    d: usize,
    dist_sq: f64,
    m: usize,
    mode: Mode,
) -> Result<PhaseSchedule> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::param(format!("alpha must be positive, got {alpha}")));
    }
    check_problem(eps, beta, d, dist_sq, m, mode)?;
    let m = if mode == Mode::Single { 1 } else { m };
    let k_eps = (alpha / eps).log2().ceil();
    let t_base = (800.0 * d as f64 * beta / ((SQRT_2 - 1.0) * alpha)).ceil() as u64;
    if k_eps < 1.0 {
        let p = params_smooth(eps, beta, d, dist_sq, m, mode)?;
        return Ok(PhaseSchedule {
            k_eps: 0,
            t_base,
            m,
            mode,
            phases: vec![Phase {
                eta: p.eta,
                gamma: p.gamma,
                rounds: p.rounds,
                eps,
            }],
        });
    }
    let k_eps = k_eps as u32;
    let k = bits_per_round(mode, m);
    let t1 = ((t_base as f64 * dist_sq).ceil() as u64).max(t_base);
    let eps1 = 400.0 * d as f64 * beta * dist_sq / ((SQRT_2 - 1.0) * t1 as f64);
    let phases = (0..k_eps)
        .map(|k_idx| {
            let eps_k = eps1 / 2f64.powi(k_idx as i32);
            Phase {
                eta: step_size(eps_k, beta, d, k),
                gamma: perturbation(eps_k, beta, d, dist_sq, mode, m),
                rounds: if k_idx == 0 { t1 } else { 2 * t_base },
                eps: eps_k,
            }
        })
        .collect();
    Ok(PhaseSchedule {
        k_eps,
        t_base,
        m,
        mode,
        phases,
    })
}
