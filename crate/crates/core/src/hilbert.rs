//! Discretized Hilbert-space samples.
//!
//! Every supported space (L², products of L² spaces, plain ℝᵖ) is reduced to
//! coordinate vectors paired with strictly positive quadrature weights, so the
//! inner product is always `Σ_j q_j x_j y_j`. Downstream code only ever sees
//! inner products and interdistances.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Abscissae of one channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    knots: Vec<f64>,
}

impl Grid {
    pub fn new(knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 knots, got {}",
                knots.len()
            )));
        }
        if let Some(bad) = knots.iter().position(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid(format!("knot {bad} is not finite")));
        }
        if let Some(i) = knots.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!(
                "knots must be strictly increasing (knot {} = {} >= knot {} = {})",
                i,
                knots[i],
                i + 1,
                knots[i + 1]
            )));
        }
        Ok(Self { knots })
    }

    /// `m` equally spaced knots on `[start, end]`, both endpoints included.
    pub fn uniform(start: f64, end: f64, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 knots, got {m}"
            )));
        }
        let h = (end - start) / (m - 1) as f64;
        let mut knots: Vec<f64> = (0..m).map(|j| start + h * j as f64).collect();
        knots[m - 1] = end;
        Self::new(knots)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }
}

/// Trapezoid-rule weights on `grid`.
///
/// The weights sum to the interval length and integrate piecewise-linear
/// functions exactly.
pub fn trapezoid_weights(grid: &Grid) -> Vec<f64> {
    let t = grid.knots();
    let m = t.len();
    let mut q = vec![0.0; m];
    q[0] = (t[1] - t[0]) / 2.0;
    q[m - 1] = (t[m - 1] - t[m - 2]) / 2.0;
    for j in 1..m - 1 {
        q[j] = (t[j + 1] - t[j - 1]) / 2.0;
    }
    q
}

/// `Σ_j q_j x_j y_j`, checked.
pub fn inner_product(x: &[f64], y: &[f64], q: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            found: y.len(),
        });
    }
    if q.len() != x.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            found: q.len(),
        });
    }
    Ok(weighted_dot(x, y, q))
}

/// Unchecked inner product with a fixed left-to-right summation order.
#[inline]
pub(crate) fn weighted_dot(x: &[f64], y: &[f64], q: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .zip(q)
        .fold(0.0, |acc, ((a, b), w)| acc + w * a * b)
}

#[inline]
pub(crate) fn weighted_norm(x: &[f64], q: &[f64]) -> f64 {
    weighted_dot(x, x, q).sqrt()
}

/// Norm of `x - y` computed coordinatewise (no Gram cancellation).
#[inline]
pub(crate) fn weighted_distance(x: &[f64], y: &[f64], q: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .zip(q)
        .fold(0.0, |acc, ((a, b), w)| {
            let d = a - b;
            acc + w * d * d
        })
        .sqrt()
}

/// One named block of coordinates inside a [`WeightedSample`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub name: String,
    pub range: Range<usize>,
    /// `None` for plain Euclidean coordinates.
    pub grid: Option<Grid>,
}

/// `n` observations, each a row of `p` coordinates, with quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample {
    n: usize,
    p: usize,
    values: Vec<f64>,
    quad_weights: Vec<f64>,
    channels: Vec<Channel>,
}

impl WeightedSample {
    /// Builds and validates a sample from row-major values.
    pub fn new(
        rows: Vec<Vec<f64>>,
        quad_weights: Vec<f64>,
        channels: Vec<Channel>,
    ) -> Result<Self> {
        let p = quad_weights.len();
        let n = rows.len();
        let mut values = Vec::with_capacity(n * p);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != p {
                return Err(Error::InvalidSample(format!(
                    "row {i} has {} coordinates, expected {p}",
                    row.len()
                )));
            }
            values.extend(row);
        }
        Self::from_flat(n, values, quad_weights, channels)
    }

    pub fn from_flat(
        n: usize,
        values: Vec<f64>,
        quad_weights: Vec<f64>,
        channels: Vec<Channel>,
    ) -> Result<Self> {
        let p = quad_weights.len();
        if p == 0 {
            return Err(Error::InvalidSample("no coordinates".into()));
        }
        if values.len() != n * p {
            return Err(Error::Dimension {
                expected: n * p,
                found: values.len(),
            });
        }
        if let Some(j) = quad_weights
            .iter()
            .position(|q| !(*q > 0.0 && q.is_finite()))
        {
            return Err(Error::InvalidSample(format!(
                "quadrature weight {j} = {} is not strictly positive",
                quad_weights[j]
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSample(format!(
                "non-finite value in row {}, coordinate {}",
                k / p,
                k % p
            )));
        }
        let mut covered = 0;
        for ch in &channels {
            if ch.range.start != covered || ch.range.end > p || ch.range.is_empty() {
                return Err(Error::InvalidSample(format!(
                    "channel `{}` range {:?} does not tile the coordinates",
                    ch.name, ch.range
                )));
            }
            if let Some(g) = &ch.grid {
                if g.len() != ch.range.len() {
                    return Err(Error::InvalidSample(format!(
                        "channel `{}` has {} coordinates but a {}-knot grid",
                        ch.name,
                        ch.range.len(),
                        g.len()
                    )));
                }
            }
            covered = ch.range.end;
        }
        if !channels.is_empty() && covered != p {
            return Err(Error::InvalidSample(format!(
                "channels cover {covered} of {p} coordinates"
            )));
        }
        let channels = if channels.is_empty() {
            vec![Channel {
                name: "x".into(),
                range: 0..p,
                grid: None,
            }]
        } else {
            channels
        };
        Ok(Self {
            n,
            p,
            values,
            quad_weights,
            channels,
        })
    }

    /// Curves observed on a single grid, weighted by the trapezoid rule.
    pub fn on_grid(rows: Vec<Vec<f64>>, grid: Grid) -> Result<Self> {
        let q = trapezoid_weights(&grid);
        let channel = Channel {
            name: "x".into(),
            range: 0..grid.len(),
            grid: Some(grid),
        };
        Self::new(rows, q, vec![channel])
    }

    /// Plain ℝᵖ data (all quadrature weights equal to one).
    pub fn euclidean(rows: Vec<Vec<f64>>) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        Self::new(rows, vec![1.0; p], Vec::new())
    }

    /// Same weights and layout, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if !values.len().is_multiple_of(self.p) {
            return Err(Error::Dimension {
                expected: self.n * self.p,
                found: values.len(),
            });
        }
        Self::from_flat(
            values.len() / self.p,
            values,
            self.quad_weights.clone(),
            self.channels.clone(),
        )
    }

    /// Subsample keeping the listed rows in order.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(idx.len() * self.p);
        for &i in idx {
            values.extend_from_slice(self.row(i));
        }
        self.with_values(values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.p)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        weighted_dot(x, y, &self.quad_weights)
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        weighted_norm(x, &self.quad_weights)
    }

    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        weighted_distance(x, y, &self.quad_weights)
    }
}

/// Symmetric `n × n` matrix of pairwise inner products.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    inner: Vec<f64>,
}

impl GramMatrix {
    /// Wraps a row-major symmetric matrix, checking symmetry and the diagonal.
    pub fn from_rows(n: usize, inner: Vec<f64>) -> Result<Self> {
        if inner.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                found: inner.len(),
            });
        }
        for i in 0..n {
            if inner[i * n + i] < 0.0 {
                return Err(Error::InvalidSample(format!(
                    "negative diagonal entry {i} in Gram matrix"
                )));
            }
            for j in 0..i {
                if inner[i * n + j] != inner[j * n + i] {
                    return Err(Error::InvalidSample(format!(
                        "Gram matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { n, inner })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.inner
    }

    /// Smallest eigenvalue is at least `-tol * max(diag)`.
    pub fn is_psd(&self, tol: f64) -> bool {
        if self.n == 0 {
            return true;
        }
        let m = nalgebra::DMatrix::from_row_slice(self.n, self.n, &self.inner);
        let max_diag = (0..self.n).map(|i| self.get(i, i)).fold(0.0, f64::max);
        let eig = m.symmetric_eigenvalues();
        eig.iter().all(|&l| l >= -tol * max_diag)
    }
}

/// Inner products of every pair of rows.
///
/// Rows are processed in parallel but each entry uses the same sequential
/// sum, so the result does not depend on the thread schedule.
pub fn gram_matrix(sample: &WeightedSample) -> GramMatrix {
    let n = sample.n();
    let q = sample.quad_weights();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = sample.row(i);
            (i..n).map(|j| weighted_dot(xi, sample.row(j), q)).collect()
        })
        .collect();
    let mut inner = vec![0.0; n * n];
    for (i, row) in upper.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            let j = i + off;
            inner[i * n + j] = v;
            inner[j * n + i] = v;
        }
    }
    GramMatrix { n, inner }
}

/// Symmetric `n × n` matrix of interdistances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_rows(n: usize, d: Vec<f64>) -> Result<Self> {
        if d.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                found: d.len(),
            });
        }
        for i in 0..n {
            if d[i * n + i] != 0.0 {
                return Err(Error::InvalidSample(format!(
                    "nonzero self-distance at {i}"
                )));
            }
            for j in 0..i {
                let v = d[i * n + j];
                if !(v >= 0.0) || v != d[j * n + i] {
                    return Err(Error::InvalidSample(format!(
                        "distance ({i}, {j}) is negative or asymmetric"
                    )));
                }
            }
        }
        Ok(Self { n, d })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }
}

/// `d_ij = sqrt(max(0, G_ii - 2 G_ij + G_jj))`.
pub fn distance_matrix(gram: &GramMatrix) -> DistanceMatrix {
    let n = gram.n();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let sq = gram.get(i, i) - 2.0 * gram.get(i, j) + gram.get(j, j);
            let v = sq.max(0.0).sqrt();
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    DistanceMatrix { n, d }
}

/// Interdistances computed from coordinate differences.
///
/// Agrees with `distance_matrix(&gram_matrix(sample))` in exact arithmetic but
/// avoids the cancellation in `G_ii - 2 G_ij + G_jj` when some observations
/// are far larger than the distances of interest. In one dimension with unit
/// weights the result is exactly `|x_i - x_j|`.
pub fn sample_distances(sample: &WeightedSample) -> DistanceMatrix {
    let n = sample.n();
    let q = sample.quad_weights();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = sample.row(i);
            ((i + 1)..n)
                .map(|j| weighted_distance(xi, sample.row(j), q))
                .collect()
        })
        .collect();
    let mut d = vec![0.0; n * n];
    for (i, row) in upper.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            let j = i + 1 + off;
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    DistanceMatrix { n, d }
}
