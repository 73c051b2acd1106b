//! Comparison estimators: sample mean and principal components, the spatial
//! median, and spherical principal components.

use serde::{Deserialize, Serialize};

use crate::depth::TrimWeights;
use crate::error::{Error, Result};
use crate::estimators::{gram_pcs, trimmed_cov_pcs, TrimmedFit};
use crate::hilbert::WeightedSample;

/// Distances below this are treated as the iterate sitting on a data point.
pub const COINCIDENCE_TOL: f64 = 1e-12;

pub const MEDIAN_TOL: f64 = 1e-8;
pub const MEDIAN_MAX_ITER: usize = 500;

/// Sample mean with ordinary (untrimmed) principal components.
pub fn sample_mean_and_pcs(sample: &WeightedSample, components: usize) -> Result<TrimmedFit> {
    if sample.n() < 2 {
        return Err(Error::InvalidSample(format!(
            "sample principal components need n >= 2, got {}",
            sample.n()
        )));
    }
    trimmed_cov_pcs(sample, &TrimWeights::uniform(sample.n())?, components)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianResult {
    pub median: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Norm of the last update.
    pub final_step: f64,
    /// `Σ ‖X_i − m‖` at the start and after every iteration.
    pub objective: Vec<f64>,
}

fn objective(sample: &WeightedSample, m: &[f64]) -> f64 {
    sample.rows().map(|x| sample.distance(x, m)).sum()
}

/// Spatial median `argmin_m Σ ‖X_i − m‖` under the sample's norm.
///
/// Weiszfeld iteration started at the coordinatewise mean. When the iterate
/// lands on data points, the modified step of Vardi and Zhang (2000) is used:
/// it stops if the subgradient condition `‖R‖ ≤ η` holds, where `R` is the sum
/// of unit vectors towards the other points and `η` the number of coinciding
/// points, and otherwise moves off the anchor. Each step does not increase the
/// objective.
pub fn spatial_median(sample: &WeightedSample, tol: f64, max_iter: usize) -> Result<MedianResult> {
    let n = sample.n();
    if n == 0 {
        return Err(Error::InvalidSample(
            "spatial median of an empty sample".into(),
        ));
    }
    let p = sample.p();
    let mut m = crate::estimators::weighted_mean(sample, &vec![1.0; n])?;
    let mut trace = vec![objective(sample, &m)];
    let mut final_step = f64::INFINITY;

    for iter in 1..=max_iter {
        let mut num = vec![0.0; p];
        let mut denom = 0.0;
        let mut resid = vec![0.0; p];
        let mut coincide = 0usize;
        for x in sample.rows() {
            let d = sample.distance(x, &m);
            if d < COINCIDENCE_TOL {
                coincide += 1;
                continue;
            }
            let inv = 1.0 / d;
            denom += inv;
            for j in 0..p {
                num[j] += x[j] * inv;
                resid[j] += (x[j] - m[j]) * inv;
            }
        }
        if denom == 0.0 {
            // every point coincides with m
            return Ok(MedianResult {
                median: m,
                iterations: iter,
                converged: true,
                final_step: 0.0,
                objective: trace,
            });
        }
        let target: Vec<f64> = num.iter().map(|v| v / denom).collect();
        let next = if coincide == 0 {
            target
        } else {
            let r = sample.norm(&resid);
            let eta = coincide as f64;
            if r <= eta {
                return Ok(MedianResult {
                    median: m,
                    iterations: iter,
                    converged: true,
                    final_step: 0.0,
                    objective: trace,
                });
            }
            let keep = eta / r;
            target
                .iter()
                .zip(&m)
                .map(|(t, c)| (1.0 - keep) * t + keep * c)
                .collect()
        };
        final_step = sample.distance(&next, &m);
        m = next;
        trace.push(objective(sample, &m));
        if final_step <= tol * (1.0 + sample.norm(&m)) {
            return Ok(MedianResult {
                median: m,
                iterations: iter,
                converged: true,
                final_step,
                objective: trace,
            });
        }
    }
    Ok(MedianResult {
        median: m,
        iterations: max_iter,
        converged: false,
        final_step,
        objective: trace,
    })
}

/// Principal directions of the deviations from the spatial median, each
/// normalized to unit length, with covariance taken about zero.
///
/// The returned fit has `mean` set to the spatial median; its eigenvalues are
/// those of the normalized deviations and only the directions are meaningful.
/// Observations within [`COINCIDENCE_TOL`] of the median get zero weight.
pub fn spherical_pcs(sample: &WeightedSample, components: usize) -> Result<TrimmedFit> {
    if sample.n() < 2 {
        return Err(Error::InvalidSample(format!(
            "spherical principal components need n >= 2, got {}",
            sample.n()
        )));
    }
    let med = spatial_median(sample, MEDIAN_TOL, MEDIAN_MAX_ITER)?;
    spherical_pcs_about(sample, &med.median, components)
}

/// Spherical principal components about a given centre.
pub fn spherical_pcs_about(
    sample: &WeightedSample,
    center: &[f64],
    components: usize,
) -> Result<TrimmedFit> {
    let p = sample.p();
    if center.len() != p {
        return Err(Error::Dimension {
            expected: p,
            found: center.len(),
        });
    }
    let mut values = Vec::with_capacity(sample.n() * p);
    let mut w = Vec::with_capacity(sample.n());
    for x in sample.rows() {
        let d = sample.distance(x, center);
        if d < COINCIDENCE_TOL {
            values.extend(std::iter::repeat_n(0.0, p));
            w.push(0.0);
        } else {
            values.extend(x.iter().zip(center).map(|(v, c)| (v - c) / d));
            w.push(1.0);
        }
    }
    if w.iter().all(|&v| v == 0.0) {
        return Err(Error::Degenerate(
            "every observation coincides with the spatial median".into(),
        ));
    }
    let directions = sample.with_values(values)?;
    let origin = vec![0.0; p];
    let pcs = gram_pcs(&directions, &w, &origin, components);
    let weights = TrimWeights::from_values(w, crate::depth::TrimConfig::untrimmed())?;
    Ok(pcs.into_fit(center.to_vec(), weights))
}
