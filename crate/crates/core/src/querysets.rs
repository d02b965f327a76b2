//! Sign-vector hypercube and the structured query set used by multiwise
//! winner feedback.
//!
//! A query set around a center `w` with directions `u_1..u_l` (each of norm
//! `1/sqrt(l)`) holds the `2^l` points `w + gamma * sum_i v_i u_i` for every
//! sign vector `v`. Two points whose vertices differ only in coordinate `i`
//! are mirror images along `u_i`, so the winner of one multiwise query
//! implies `l` pairwise comparisons, one per direction.

use crate::error::{check_dim, Error, Result};
use crate::vectorspace::Vector;

/// Largest supported hypercube dimension.
pub const MAX_CUBE_DIM: usize = 30;

/// A vertex of `{+1, -1}^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignVertex(Vec<i8>);

impl SignVertex {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::param("sign vertex needs at least one coordinate"));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::param("sign vertex entries must be +1 or -1"));
        }
        Ok(SignVertex(signs))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    /// The vertex with coordinate `i` negated.
    pub fn flipped(&self, i: usize) -> SignVertex {
        let mut s = self.0.clone();
        s[i] = -s[i];
        SignVertex(s)
    }

    /// The `n` single-flip neighbors, ordered by flipped coordinate.
    pub fn neighbors(&self) -> Vec<SignVertex> {
        (0..self.len()).map(|i| self.flipped(i)).collect()
    }

    pub fn hamming(&self, other: &SignVertex) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    /// Position in [`hypercube_vertices`] order: coordinate 0 is the most
    /// significant bit and `-1` sets it.
    pub fn index(&self) -> usize {
        self.0.iter().fold(0usize, |acc, &s| (acc << 1) | usize::from(s < 0))
    }

    /// Inverse of [`SignVertex::index`] for an `n`-dimensional cube.
    pub fn from_index(index: usize, n: usize) -> Result<SignVertex> {
        check_cube_dim(n)?;
        if index >= 1usize << n {
            return Err(Error::param(format!("vertex index {index} out of range for n = {n}")));
        }
        Ok(vertex_unchecked(index, n))
    }
}

fn vertex_unchecked(index: usize, n: usize) -> SignVertex {
    SignVertex(
        (0..n)
            .map(|i| if index >> (n - 1 - i) & 1 == 1 { -1 } else { 1 })
            .collect(),
    )
}

fn check_cube_dim(n: usize) -> Result<()> {
    if (1..=MAX_CUBE_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::param(format!(
            "hypercube dimension must be in 1..={MAX_CUBE_DIM}, got {n}"
        )))
    }
}

/// All `2^n` sign vectors in lexicographic order, `+1` before `-1`.
pub fn hypercube_vertices(n: usize) -> Result<Vec<SignVertex>> {
    check_cube_dim(n)?;
    Ok((0..1usize << n).map(|k| vertex_unchecked(k, n)).collect())
}

/// `neighbors` as a free function.
pub fn neighbors(v: &SignVertex) -> Vec<SignVertex> {
    v.neighbors()
}

/// The `2^l` points `center + gamma * U v`, indexed in hypercube order.
#[derive(Clone, Debug)]
pub struct StructuredQuerySet {
    center: Vector,
    gamma: f64,
    directions: Vec<Vector>,
    points: Vec<Vector>,
}

impl StructuredQuerySet {
    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn directions(&self) -> &[Vector] {
        &self.directions
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    /// Number of directions, `l`.
    pub fn cube_dim(&self) -> usize {
        self.directions.len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn vertex(&self, index: usize) -> Result<SignVertex> {
        SignVertex::from_index(index, self.cube_dim())
    }

    pub fn point(&self, v: &SignVertex) -> Result<&Vector> {
        check_dim(self.cube_dim(), v.len())?;
        Ok(&self.points[v.index()])
    }

    /// Indices of the points mirroring `index` along each direction, ordered
    /// by direction.
    pub fn neighbor_indices(&self, index: usize) -> Result<Vec<usize>> {
        self.check_index(index)?;
        let n = self.cube_dim();
        Ok((0..n).map(|i| index ^ (1 << (n - 1 - i))).collect())
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index < self.points.len() {
            Ok(())
        } else {
            Err(Error::param(format!(
                "point index {index} out of range for a set of {}",
                self.points.len()
            )))
        }
    }
}

/// Builds the query set. Each direction must have norm `1/sqrt(l)` (within
/// `1e-9`) and `1 <= l <= d`.
pub fn build_query_set(center: Vector, gamma: f64, directions: Vec<Vector>) -> Result<StructuredQuerySet> {
    let l = directions.len();
    let d = center.dim();
    if l == 0 || l > d {
        return Err(Error::param(format!(
            "number of directions must be in 1..=d ({d}), got {l}"
        )));
    }
    check_cube_dim(l)?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::param(format!("gamma must be positive, got {gamma}")));
    }
    let target = 1.0 / (l as f64).sqrt();
    for (i, u) in directions.iter().enumerate() {
        check_dim(d, u.dim())?;
        if (u.norm() - target).abs() > 1e-9 {
            return Err(Error::param(format!(
                "direction {i} has norm {} but 1/sqrt({l}) = {target} is required",
                u.norm()
            )));
        }
    }
    Ok(build_unchecked(center, gamma, directions))
}

pub(crate) fn build_unchecked(center: Vector, gamma: f64, directions: Vec<Vector>) -> StructuredQuerySet {
    let l = directions.len();
    let points = (0..1usize << l)
        .map(|k| {
            let mut p = center.clone();
            for (i, u) in directions.iter().enumerate() {
                let s = if k >> (l - 1 - i) & 1 == 1 { -gamma } else { gamma };
                p.axpy_unchecked(s, u);
            }
            p
        })
        .collect();
    StructuredQuerySet {
        center,
        gamma,
        directions,
        points,
    }
}

/// Per-direction normalized gradient estimates implied by the winner:
/// `g_i = -v_i u_i` where `v` is the winner's vertex.
///
/// The winner beat its mirror along `u_i`, so the duel
/// `(winner, mirror)` has sign `-1` and the direction from mirror to winner
/// is `v_i u_i`.
pub fn extract_gradient_estimates(qs: &StructuredQuerySet, winner: usize) -> Result<Vec<Vector>> {
    qs.check_index(winner)?;
    Ok(extract_unchecked(qs, winner))
}

pub(crate) fn extract_unchecked(qs: &StructuredQuerySet, winner: usize) -> Vec<Vector> {
    let l = qs.cube_dim();
    qs.directions
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let v_i = if winner >> (l - 1 - i) & 1 == 1 { -1.0 } else { 1.0 };
            u.scale(-v_i)
        })
        .collect()
}
