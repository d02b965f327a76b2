//! Built-in convex test objectives and a central-difference gradient used to
//! validate estimators.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{check_dim, Error, Result};
use crate::vectorspace::Vector;

type EvalFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A deterministic objective together with the curvature metadata the
/// parameter schedules need.
#[derive(Clone)]
pub struct Objective {
    name: String,
    dim: usize,
    eval: Arc<EvalFn>,
    beta: f64,
    alpha: Option<f64>,
    known_min_value: Option<f64>,
    known_minimizer: Option<Vector>,
}

impl Objective {
    /// Wraps a user function. `beta` is the smoothness constant the caller
    /// vouches for.
    pub fn custom<F>(name: impl Into<String>, dim: usize, beta: f64, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(Error::param("objective dimension must be at least 1"));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::param(format!("beta must be positive, got {beta}")));
        }
        Ok(Objective {
            name: name.into(),
            dim,
            eval: Arc::new(f),
            beta,
            alpha: None,
            known_min_value: None,
            known_minimizer: None,
        })
    }

    pub fn with_strong_convexity(mut self, alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::param(format!("alpha must be non-negative, got {alpha}")));
        }
        self.alpha = Some(alpha);
        Ok(self)
    }

    /// Records the optimum. The stored value is checked against `eval` at
    /// the minimizer.
    pub fn with_known_minimum(mut self, minimizer: Vector, value: f64) -> Result<Self> {
        check_dim(self.dim, minimizer.dim())?;
        let at = (self.eval)(minimizer.as_slice());
        if (at - value).abs() > 1e-9 {
            return Err(Error::param(format!(
                "known minimum {value} disagrees with f(minimizer) = {at}"
            )));
        }
        self.known_minimizer = Some(minimizer);
        self.known_min_value = Some(value);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    pub fn known_min_value(&self) -> Option<f64> {
        self.known_min_value
    }

    pub fn known_minimizer(&self) -> Option<&Vector> {
        self.known_minimizer.as_ref()
    }

    pub fn eval(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim, x.dim())?;
        Ok((self.eval)(x.as_slice()))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &Vector) -> f64 {
        (self.eval)(x.as_slice())
    }
}

impl fmt::Debug for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Objective")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("beta", &self.beta)
            .field("alpha", &self.alpha)
            .field("known_min_value", &self.known_min_value)
            .finish_non_exhaustive()
    }
}

/// Names of the built-in objectives accepted by the harness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    Quadratic,
    Sinsum,
    L2l1,
}

impl ObjectiveKind {
    pub fn build(self, d: usize) -> Result<Objective> {
        match self {
            ObjectiveKind::Quadratic => make_quadratic(d),
            ObjectiveKind::Sinsum => make_sinsum(d),
            ObjectiveKind::L2l1 => make_l2l1(d),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ObjectiveKind::Quadratic => "quadratic",
            ObjectiveKind::Sinsum => "sinsum",
            ObjectiveKind::L2l1 => "l2l1",
        }
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadratic" => Ok(ObjectiveKind::Quadratic),
            "sinsum" => Ok(ObjectiveKind::Sinsum),
            "l2l1" => Ok(ObjectiveKind::L2l1),
            other => Err(Error::Config(format!(
                "unknown objective '{other}' (expected quadratic | sinsum | l2l1)"
            ))),
        }
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `f(x) = ||x||^2`, beta = alpha = 2, minimum 0 at the origin.
pub fn make_quadratic(d: usize) -> Result<Objective> {
    Objective::custom("quadratic", d, 2.0, |x| x.iter().map(|c| c * c).sum())?
        .with_strong_convexity(2.0)?
        .with_known_minimum(Vector::zeros(d)?, 0.0)
}

/// `f(x) = 3 + sum_i sin(x_i)`, beta = 1.
///
/// Only locally convex: the reported optimum `3 - d` at `(-pi/2, ..., -pi/2)`
/// is the minimum over the box `[-pi, pi]^d`.
pub fn make_sinsum(d: usize) -> Result<Objective> {
    Objective::custom("sinsum", d, 1.0, |x| 3.0 + x.iter().map(|c| c.sin()).sum::<f64>())?
        .with_known_minimum(Vector::filled(d, -FRAC_PI_2)?, 3.0 - d as f64)
}

/// `f(x) = ||x||_2^2 + 0.5 ||x||_1^2`, alpha = 2.
///
/// The Hessian of `0.5 ||x||_1^2` is `s s^T` (s the sign pattern) away from
/// the coordinate hyperplanes, whose top eigenvalue is `d`; beta is taken as
/// `2 + d`.
pub fn make_l2l1(d: usize) -> Result<Objective> {
    Objective::custom("l2l1", d, 2.0 + d as f64, |x| {
        let l2: f64 = x.iter().map(|c| c * c).sum();
        let l1: f64 = x.iter().map(|c| c.abs()).sum();
        l2 + 0.5 * l1 * l1
    })?
    .with_strong_convexity(2.0)?
    .with_known_minimum(Vector::zeros(d)?, 0.0)
}

/// Central finite-difference gradient with step `h`.
pub fn fd_gradient(obj: &Objective, x: &Vector, h: f64) -> Result<Vector> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::param(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    check_dim(obj.dim(), x.dim())?;
    let mut probe = x.clone().into_inner();
    let grad = (0..x.dim())
        .map(|i| {
            let orig = probe[i];
            probe[i] = orig + h;
            let up = (obj.eval)(&probe);
            probe[i] = orig - h;
            let down = (obj.eval)(&probe);
            probe[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect();
    Vector::new(grad)
}
