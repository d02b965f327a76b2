use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::ObjectiveKind;
use crate::optimizers::{ell_m, Mode};
use crate::vectorspace::{Domain, Vector};

/// Default failure probability for majority-vote resampling under noise.
pub const DEFAULT_DELTA: f64 = 0.01;

/// Algorithm selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Pngd,
    Batched,
    Battling,
    BatchedStrong,
    BattlingStrong,
}

impl Algorithm {
    pub fn mode(self) -> Mode {
        match self {
            Algorithm::Pngd => Mode::Single,
            Algorithm::Batched | Algorithm::BatchedStrong => Mode::Batched,
            Algorithm::Battling | Algorithm::BattlingStrong => Mode::Battling,
        }
    }

    pub fn is_phased(self) -> bool {
        matches!(self, Algorithm::BatchedStrong | Algorithm::BattlingStrong)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Pngd => "pngd",
            Algorithm::Batched => "batched",
            Algorithm::Battling => "battling",
            Algorithm::BatchedStrong => "batched-strong",
            Algorithm::BattlingStrong => "battling-strong",
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pngd" => Ok(Algorithm::Pngd),
            "batched" => Ok(Algorithm::Batched),
            "battling" => Ok(Algorithm::Battling),
            "batched-strong" => Ok(Algorithm::BatchedStrong),
            "battling-strong" => Ok(Algorithm::BattlingStrong),
            other => Err(Error::Config(format!(
                "unknown algorithm '{other}' (expected pngd | batched | battling | batched-strong | battling-strong)"
            ))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Decision domain as written in configs: `all`, `ball:R` (origin-centred)
/// or `box:LO:HI` (the cube `[LO, HI]^d`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DomainSpec {
    All,
    Ball(f64),
    Box(f64, f64),
}

impl DomainSpec {
    pub fn build(self, d: usize) -> Result<Domain> {
        match self {
            DomainSpec::All => Domain::all_space(d),
            DomainSpec::Ball(r) => Domain::ball(Vector::zeros(d)?, r),
            DomainSpec::Box(lo, hi) => Domain::uniform_box(d, lo, hi),
        }
    }
}

impl FromStr for DomainSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("invalid domain '{s}' (expected all | ball:R | box:LO:HI)"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["all"] => Ok(DomainSpec::All),
            ["ball", r] => {
                let r = num(r)?;
                if r > 0.0 && r.is_finite() {
                    Ok(DomainSpec::Ball(r))
                } else {
                    Err(Error::Config(format!("ball radius must be positive, got {r}")))
                }
            }
            ["box", lo, hi] => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                if lo <= hi && lo.is_finite() && hi.is_finite() {
                    Ok(DomainSpec::Box(lo, hi))
                } else {
                    Err(Error::Config(format!("box needs finite LO <= HI, got {lo}:{hi}")))
                }
            }
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for DomainSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DomainSpec> for String {
    fn from(d: DomainSpec) -> String {
        d.to_string()
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSpec::All => write!(f, "all"),
            DomainSpec::Ball(r) => write!(f, "ball:{r}"),
            DomainSpec::Box(lo, hi) => write!(f, "box:{lo}:{hi}"),
        }
    }
}

/// Initial point: every coordinate set to one value, or an explicit vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum W1Spec {
    Fill(f64),
    Explicit(Vec<f64>),
}

impl W1Spec {
    pub fn build(&self, d: usize) -> Result<Vector> {
        match self {
            W1Spec::Fill(v) => Vector::filled(d, *v),
            W1Spec::Explicit(c) => {
                if c.len() != d {
                    return Err(Error::Config(format!(
                        "explicit w1 has {} coordinates but dim is {d}",
                        c.len()
                    )));
                }
                Vector::new(c.clone())
            }
        }
    }
}

impl Default for W1Spec {
    fn default() -> Self {
        W1Spec::Fill(0.5)
    }
}

/// One experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub objective: ObjectiveKind,
    pub dim: usize,
    pub algo: Algorithm,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default)]
    pub nu: f64,
    pub eps: f64,
    /// Round budget; the theoretical budget (capped) when absent.
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default = "default_domain")]
    pub domain: DomainSpec,
    #[serde(default)]
    pub w1: W1Spec,
    pub seed: u64,
    /// Resampling failure probability used when `nu > 0`.
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_m() -> usize {
    1
}

fn default_domain() -> DomainSpec {
    DomainSpec::All
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

impl ExperimentConfig {
    /// Checks every constraint the selected algorithm imposes, naming the
    /// violated one.
    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Err(Error::Config(msg));
        if self.dim == 0 {
            return cfg("dim must be at least 1".into());
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return cfg(format!("eps must be positive, got {}", self.eps));
        }
        if !(0.0..0.5).contains(&self.nu) {
            return cfg(format!("nu must lie in [0, 0.5), got {}", self.nu));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return cfg(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        match self.algo.mode() {
            Mode::Single => {}
            Mode::Batched => {
                if self.m == 0 || self.m > self.dim {
                    return cfg(format!(
                        "{} requires 1 <= m <= dim, got m = {}, dim = {}",
                        self.algo, self.m, self.dim
                    ));
                }
            }
            Mode::Battling => {
                if self.m < 2 {
                    return cfg(format!("{} requires m >= 2, got m = {}", self.algo, self.m));
                }
                if ell_m(self.m) > self.dim {
                    return cfg(format!(
                        "{} requires floor(log2 m) <= dim, got floor(log2 {}) = {} > {}",
                        self.algo,
                        self.m,
                        ell_m(self.m),
                        self.dim
                    ));
                }
            }
        }
        if self.algo.is_phased() && self.objective.build(self.dim)?.alpha().is_none() {
            return cfg(format!(
                "{} needs a strongly convex objective; '{}' has no alpha",
                self.algo, self.objective
            ));
        }
        let dom = self.domain.build(self.dim).map_err(|e| Error::Config(e.to_string()))?;
        let w1 = self.w1.build(self.dim).map_err(|e| Error::Config(e.to_string()))?;
        if !dom.contains(&w1, 1e-9)? {
            return cfg(format!("w1 lies outside the domain {}", self.domain));
        }
        Ok(())
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        PartialExperimentConfig::from_json_file(path)?.finish()
    }
}

/// An [`ExperimentConfig`] with every field optional, for layering a
/// config file under command-line flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialExperimentConfig {
    pub objective: Option<ObjectiveKind>,
    pub dim: Option<usize>,
    pub algo: Option<Algorithm>,
    pub m: Option<usize>,
    pub nu: Option<f64>,
    pub eps: Option<f64>,
    pub budget: Option<u64>,
    pub domain: Option<DomainSpec>,
    pub w1: Option<W1Spec>,
    pub seed: Option<u64>,
    pub delta: Option<f64>,
    pub out: Option<PathBuf>,
}

impl PartialExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Fields set in `over` replace ours.
    pub fn overlay(self, over: PartialExperimentConfig) -> Self {
        PartialExperimentConfig {
            objective: over.objective.or(self.objective),
            dim: over.dim.or(self.dim),
            algo: over.algo.or(self.algo),
            m: over.m.or(self.m),
            nu: over.nu.or(self.nu),
            eps: over.eps.or(self.eps),
            budget: over.budget.or(self.budget),
            domain: over.domain.or(self.domain),
            w1: over.w1.or(self.w1),
            seed: over.seed.or(self.seed),
            delta: over.delta.or(self.delta),
            out: over.out.or(self.out),
        }
    }

    pub fn finish(self) -> Result<ExperimentConfig> {
        let missing = |f: &str| Error::Config(format!("missing required setting '{f}'"));
        Ok(ExperimentConfig {
            objective: self.objective.ok_or_else(|| missing("objective"))?,
            dim: self.dim.ok_or_else(|| missing("dim"))?,
            algo: self.algo.ok_or_else(|| missing("algo"))?,
            m: self.m.unwrap_or_else(default_m),
            nu: self.nu.unwrap_or(0.0),
            eps: self.eps.ok_or_else(|| missing("eps"))?,
            budget: self.budget,
            domain: self.domain.unwrap_or_else(default_domain),
            w1: self.w1.unwrap_or_default(),
            seed: self.seed.ok_or_else(|| missing("seed"))?,
            delta: self.delta.unwrap_or_else(default_delta),
            out: self.out,
        })
    }
}

/// Which parameter a sweep varies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    M(Vec<usize>),
    Nu(Vec<f64>),
}

impl SweepAxis {
    pub fn len(&self) -> usize {
        match self {
            SweepAxis::M(v) => v.len(),
            SweepAxis::Nu(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::M(_) => "m",
            SweepAxis::Nu(_) => "nu",
        }
    }
}

/// A base experiment repeated over a list of `m` or `nu` values.
///
/// Setting `i` runs with seed `base.seed + i`; traces and `summary.csv` go to
/// `out_dir`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: ExperimentConfig,
    pub sweep: SweepAxis,
    pub out_dir: PathBuf,
}

impl SweepConfig {
    /// The per-setting configs, validated.
    pub fn settings(&self) -> Result<Vec<ExperimentConfig>> {
        if self.sweep.is_empty() {
            return Err(Error::Config("sweep needs at least one value".into()));
        }
        let mut out = Vec::with_capacity(self.sweep.len());
        for i in 0..self.sweep.len() {
            let mut cfg = self.base.clone();
            cfg.seed = self.base.seed.wrapping_add(i as u64);
            let label = match &self.sweep {
                SweepAxis::M(ms) => {
                    cfg.m = ms[i];
                    format!("m{}", ms[i])
                }
                SweepAxis::Nu(nus) => {
                    cfg.nu = nus[i];
                    format!("nu{}", nus[i])
                }
            };
            cfg.out = Some(self.out_dir.join(format!("trace_{label}.csv")));
            cfg.validate()
                .map_err(|e| Error::Config(format!("sweep setting {label}: {e}")))?;
            out.push(cfg);
        }
        Ok(out)
    }
}
