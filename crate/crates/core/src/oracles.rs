//! Comparison-feedback channels over an [`Objective`]: single duels, batches
//! of duels and multiwise winner queries, each optionally corrupted with
//! probability `nu`, plus majority-vote resampling and query accounting.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::objectives::Objective;
use crate::vectorspace::Vector;

/// Outcome of a duel `(x, y)`: `Plus` when `f(x) >= f(y)`, `Minus` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `sign(v)` with `sign(0) = +1`.
    #[inline]
    pub fn of(v: f64) -> Sign {
        if v >= 0.0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    #[inline]
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// Running count of feedback consumed. One duel per pairwise sign bit, one
/// multiwise query per winner observation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryLedger {
    duel_queries: u64,
    multiwise_queries: u64,
    total_feedback_bits: u64,
}

impl QueryLedger {
    pub fn duel_queries(&self) -> u64 {
        self.duel_queries
    }

    pub fn multiwise_queries(&self) -> u64 {
        self.multiwise_queries
    }

    pub fn total_feedback_bits(&self) -> u64 {
        self.total_feedback_bits
    }

    fn record_duel(&mut self) {
        self.duel_queries += 1;
        self.total_feedback_bits += 1;
    }

    fn record_multiwise(&mut self) {
        self.multiwise_queries += 1;
        self.total_feedback_bits += 1;
    }
}

/// Number of repeated queries whose majority is correct with probability at
/// least `1 - delta` under flip probability `nu` (Hoeffding):
/// `ceil(ln(2/delta) / (2 (0.5 - nu)^2))`.
pub fn resample_count(nu: f64, delta: f64) -> Result<u64> {
    check_nu(nu)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param(format!("delta must lie in (0, 1), got {delta}")));
    }
    let gap = 0.5 - nu;
    Ok(((2.0 / delta).ln() / (2.0 * gap * gap)).ceil() as u64)
}

fn check_nu(nu: f64) -> Result<()> {
    if (0.0..0.5).contains(&nu) {
        Ok(())
    } else {
        Err(Error::param(format!("noise nu must lie in [0, 0.5), got {nu}")))
    }
}

/// A single-run query channel. Owns its noise source and ledger.
#[derive(Clone, Debug)]
pub struct ComparisonOracle {
    objective: Objective,
    nu: f64,
    rng: ChaCha8Rng,
    ledger: QueryLedger,
    resample_delta: Option<f64>,
}

impl ComparisonOracle {
    pub fn new(objective: Objective, nu: f64, seed: u64) -> Result<Self> {
        check_nu(nu)?;
        Ok(ComparisonOracle {
            objective,
            nu,
            rng: ChaCha8Rng::seed_from_u64(seed),
            ledger: QueryLedger::default(),
            resample_delta: None,
        })
    }

    /// Noiseless oracle.
    pub fn exact(objective: Objective) -> Self {
        Self::new(objective, 0.0, 0).expect("nu = 0 is valid")
    }

    /// Routes every algorithm-level duel and winner query through majority
    /// voting with confidence `1 - delta`.
    pub fn with_resampling(mut self, delta: f64) -> Result<Self> {
        resample_count(self.nu, delta)?;
        self.resample_delta = Some(delta);
        Ok(self)
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }

    pub fn resample_delta(&self) -> Option<f64> {
        self.resample_delta
    }

    /// Raw oracle calls charged per algorithm-level query (1 without resampling).
    pub fn calls_per_query(&self) -> u64 {
        match self.resample_delta {
            Some(delta) => resample_count(self.nu, delta).expect("validated in with_resampling"),
            None => 1,
        }
    }

    #[inline]
    fn corrupt(&mut self) -> bool {
        self.nu > 0.0 && self.rng.random_bool(self.nu)
    }

    /// One noisy sign bit for `sign(f(x) - f(y))`.
    pub fn compare(&mut self, x: &Vector, y: &Vector) -> Result<Sign> {
        let d = self.objective.dim();
        check_dim(d, x.dim())?;
        check_dim(d, y.dim())?;
        Ok(self.compare_unchecked(x, y))
    }

    fn compare_unchecked(&mut self, x: &Vector, y: &Vector) -> Sign {
        let truth = Sign::of(self.objective.eval_unchecked(x) - self.objective.eval_unchecked(y));
        self.ledger.record_duel();
        if self.corrupt() {
            truth.flip()
        } else {
            truth
        }
    }

    /// Independent noisy sign bits for each pair.
    pub fn batched_compare(&mut self, pairs: &[(Vector, Vector)]) -> Result<Vec<Sign>> {
        if pairs.is_empty() {
            return Err(Error::param("batched comparison needs at least one pair"));
        }
        let d = self.objective.dim();
        for (x, y) in pairs {
            check_dim(d, x.dim())?;
            check_dim(d, y.dim())?;
        }
        Ok(pairs.iter().map(|(x, y)| self.compare_unchecked(x, y)).collect())
    }

    /// Index of the point with the smallest objective value (lowest index on
    /// ties). With probability `nu` a uniformly random other index is
    /// returned instead.
    pub fn battling_winner(&mut self, points: &[Vector]) -> Result<usize> {
        self.check_points(points)?;
        Ok(self.battling_winner_unchecked(points))
    }

    fn check_points(&self, points: &[Vector]) -> Result<()> {
        if points.len() < 2 {
            return Err(Error::param(format!(
                "multiwise query needs at least 2 points, got {}",
                points.len()
            )));
        }
        let d = self.objective.dim();
        points.iter().try_for_each(|p| check_dim(d, p.dim()))
    }

    fn battling_winner_unchecked(&mut self, points: &[Vector]) -> usize {
        let best = argmin(points.iter().map(|p| self.objective.eval_unchecked(p)));
        self.ledger.record_multiwise();
        if self.corrupt() {
            let k = self.rng.random_range(0..points.len() - 1);
            if k >= best {
                k + 1
            } else {
                k
            }
        } else {
            best
        }
    }

    /// Majority vote over `resample_count(nu, delta)` duels; ties go to `+1`.
    pub fn resampled_compare(&mut self, x: &Vector, y: &Vector, delta: f64) -> Result<Sign> {
        let n = resample_count(self.nu, delta)?;
        let d = self.objective.dim();
        check_dim(d, x.dim())?;
        check_dim(d, y.dim())?;
        Ok(self.majority_duel(x, y, n))
    }

    fn majority_duel(&mut self, x: &Vector, y: &Vector, n: u64) -> Sign {
        let plus = (0..n).filter(|_| self.compare_unchecked(x, y) == Sign::Plus).count() as u64;
        if 2 * plus >= n {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// Modal winner over `resample_count(nu, delta)` multiwise queries; ties
    /// go to the lowest index.
    pub fn resampled_winner(&mut self, points: &[Vector], delta: f64) -> Result<usize> {
        let n = resample_count(self.nu, delta)?;
        self.check_points(points)?;
        Ok(self.modal_winner(points, n))
    }

    fn modal_winner(&mut self, points: &[Vector], n: u64) -> usize {
        let mut votes = vec![0u64; points.len()];
        for _ in 0..n {
            votes[self.battling_winner_unchecked(points)] += 1;
        }
        // max_by_key keeps the last maximum; scan manually for the first
        let mut best = 0;
        for (i, &v) in votes.iter().enumerate() {
            if v > votes[best] {
                best = i;
            }
        }
        best
    }

    /// Algorithm-level duel: raw, or majority-voted when resampling is on.
    /// Dimensions are the caller's responsibility.
    pub(crate) fn duel(&mut self, x: &Vector, y: &Vector) -> Sign {
        match self.resample_delta {
            Some(_) => {
                let n = self.calls_per_query();
                self.majority_duel(x, y, n)
            }
            None => self.compare_unchecked(x, y),
        }
    }

    /// Algorithm-level winner query, see [`ComparisonOracle::duel`].
    pub(crate) fn battle(&mut self, points: &[Vector]) -> usize {
        debug_assert!(points.len() >= 2);
        match self.resample_delta {
            Some(_) => {
                let n = self.calls_per_query();
                self.modal_winner(points, n)
            }
            None => self.battling_winner_unchecked(points),
        }
    }
}

fn argmin(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for (i, v) in values.enumerate() {
        if i == 0 || v < best_val {
            best = i;
            best_val = v;
        }
    }
    best
}
