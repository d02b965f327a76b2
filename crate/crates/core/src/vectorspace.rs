//! Dense vectors, uniform sphere sampling and Euclidean projection onto the
//! supported decision domains.

use std::fmt;
use std::ops::Index;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// A point in the d-dimensional decision space.
///
/// Constructors reject empty and non-finite input; arithmetic on finite
/// vectors of matching length keeps the invariant for all practical inputs.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::param("vector dimension must be at least 1"));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::param(format!(
                "vector coordinate {i} is not finite ({})",
                coords[i]
            )));
        }
        Ok(Vector(coords))
    }

    pub fn zeros(d: usize) -> Result<Self> {
        Self::filled(d, 0.0)
    }

    pub fn filled(d: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; d])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Vector) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(dot_unchecked(&self.0, &other.0))
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        dot_unchecked(&self.0, &self.0).sqrt()
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|c| c * s).collect())
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &Vector) -> Result<()> {
        check_dim(self.dim(), x.dim())?;
        self.axpy_unchecked(a, x);
        Ok(())
    }

    /// `self + a * x` as a new vector.
    pub fn add_scaled(&self, a: f64, x: &Vector) -> Result<Vector> {
        let mut out = self.clone();
        out.axpy(a, x)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        self.add_scaled(-1.0, other)
    }

    pub fn distance(&self, other: &Vector) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }

    #[inline]
    pub(crate) fn axpy_unchecked(&mut self, a: f64, x: &Vector) {
        debug_assert_eq!(self.dim(), x.dim());
        for (s, xi) in self.0.iter_mut().zip(&x.0) {
            *s += a * xi;
        }
    }

    pub(crate) fn from_raw(coords: Vec<f64>) -> Vector {
        debug_assert!(!coords.is_empty());
        Vector(coords)
    }
}

#[inline]
fn dot_unchecked(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Vector::new(v)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

/// Convex decision set with a closed-form Euclidean projection.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    AllSpace(usize),
    Ball { center: Vector, radius: f64 },
    Box { lo: Vector, hi: Vector },
}

impl Domain {
    pub fn all_space(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::param("domain dimension must be at least 1"));
        }
        Ok(Domain::AllSpace(d))
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::param(format!(
                "ball radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Domain::Ball { center, radius })
    }

    pub fn cube(lo: Vector, hi: Vector) -> Result<Self> {
        check_dim(lo.dim(), hi.dim())?;
        if let Some(i) = (0..lo.dim()).find(|&i| lo[i] > hi[i]) {
            return Err(Error::param(format!(
                "box bounds inverted at coordinate {i}: lo={} > hi={}",
                lo[i], hi[i]
            )));
        }
        Ok(Domain::Box { lo, hi })
    }

    /// Axis-aligned box `[lo, hi]^d`.
    pub fn uniform_box(d: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::cube(Vector::filled(d, lo)?, Vector::filled(d, hi)?)
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::AllSpace(d) => *d,
            Domain::Ball { center, .. } => center.dim(),
            Domain::Box { lo, .. } => lo.dim(),
        }
    }

    /// Membership test with an absolute slack `tol`.
    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        check_dim(self.dim(), x.dim())?;
        Ok(match self {
            Domain::AllSpace(_) => true,
            Domain::Ball { center, radius } => x.distance(center)? <= radius + tol,
            Domain::Box { lo, hi } => (0..x.dim()).all(|i| x[i] >= lo[i] - tol && x[i] <= hi[i] + tol),
        })
    }

    /// Euclidean projection of `x` onto the domain.
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.dim(), x.dim())?;
        Ok(match self {
            Domain::AllSpace(_) => x.clone(),
            Domain::Ball { center, radius } => {
                let offset = x.sub(center)?;
                let dist = offset.norm();
                if dist <= *radius {
                    x.clone()
                } else {
                    // Rounding can leave the clamped point a few ulps outside the
                    // ball; shrink until it is inside so projection is idempotent.
                    let mut factor = radius / dist;
                    loop {
                        let p = center.add_scaled(factor, &offset)?;
                        if p.distance(center)? <= *radius {
                            break p;
                        }
                        factor *= 1.0 - f64::EPSILON;
                    }
                }
            }
            Domain::Box { lo, hi } => Vector::from_raw(
                x.as_slice()
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| c.clamp(lo[i], hi[i]))
                    .collect(),
            ),
        })
    }
}

/// Draws a point uniformly from the sphere of radius `r` in `d` dimensions by
/// normalizing a standard Gaussian vector.
pub fn sample_sphere<R: Rng + ?Sized>(d: usize, r: f64, rng: &mut R) -> Result<Vector> {
    if d == 0 {
        return Err(Error::param("sphere dimension must be at least 1"));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::param(format!(
            "sphere radius must be positive and finite, got {r}"
        )));
    }
    Ok(sample_sphere_unchecked(d, r, rng))
}

pub(crate) fn sample_sphere_unchecked<R: Rng + ?Sized>(d: usize, r: f64, rng: &mut R) -> Vector {
    loop {
        let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = dot_unchecked(&g, &g).sqrt();
        // all-zero draw has probability zero but would divide by zero
        if n > 0.0 {
            return Vector::from_raw(g.into_iter().map(|c| c / n * r).collect());
        }
    }
}
