//! Trimmed mean, trimmed principal components, scores and the breakdown point.
//!
//! Principal components are obtained from the `m × m` weighted Gram matrix of
//! centred observations (`m` = number of positively weighted rows), never
//! from the `p × p` covariance, so the cost does not depend on the grid size.
//!
//! With `w̃_i = w_i / Σ w_j` and `Y_i = w̃_i^{1/2} (X_i − μ̂)`, if `c_k` is the
//! `k`-th unit eigenvector of `G_ij = ⟨Y_i, Y_j⟩` with eigenvalue `l_k`, then
//! `φ̂_k = Σ_i (c_ki / l_k^{1/2}) Y_i` and `λ̂_k = l_k`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::depth::{ceil_count, floor_count, TrimWeights};
use crate::error::{Error, Result};
use crate::hilbert::{weighted_dot, weighted_norm, WeightedSample};

/// Eigenvalues at or below this fraction of the largest are treated as null.
pub const NULL_EIGENVALUE_RTOL: f64 = 1e-12;

/// Relative gap under which neighbouring eigenvalues are reported as repeated.
pub const REPEATED_EIGENVALUE_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrimmedFit {
    /// Centre of the fit: the trimmed mean (or the spatial median for
    /// spherical components).
    pub mean: Vec<f64>,
    /// Non-increasing, strictly positive.
    pub eigenvalues: Vec<f64>,
    /// Row `k` holds the coefficients `a_ki` with `φ̂_k = Σ_i a_ki (X_i − mean)`.
    pub pc_coeffs: Vec<Vec<f64>>,
    /// Row `k` is `φ̂_k` evaluated on the coordinates.
    pub pc_values: Vec<Vec<f64>>,
    pub weights: TrimWeights,
    /// Fewer components than requested were available.
    pub truncated: bool,
    /// Empty spectrum, or some reported eigenvalue is numerically repeated
    /// (its eigenfunction is only defined up to a rotation within the span).
    pub degenerate: bool,
}

impl TrimmedFit {
    pub fn components(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// `Σ w_i X_i / Σ w_i`.
pub fn trimmed_mean(sample: &WeightedSample, w: &TrimWeights) -> Result<Vec<f64>> {
    check_weights(sample, w)?;
    weighted_mean(sample, &w.w)
}

pub(crate) fn weighted_mean(sample: &WeightedSample, w: &[f64]) -> Result<Vec<f64>> {
    let total: f64 = w.iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateTrim {
            n: w.len(),
            beta: f64::NAN,
        });
    }
    let mut acc = vec![0.0; sample.p()];
    for (row, &wi) in sample.rows().zip(w) {
        if wi > 0.0 {
            for (a, v) in acc.iter_mut().zip(row) {
                *a += wi * v;
            }
        }
    }
    acc.iter_mut().for_each(|a| *a /= total);
    Ok(acc)
}

fn check_weights(sample: &WeightedSample, w: &TrimWeights) -> Result<()> {
    if w.n() != sample.n() {
        return Err(Error::Dimension {
            expected: sample.n(),
            found: w.n(),
        });
    }
    if !(w.effective_n > 0.0) {
        return Err(Error::DegenerateTrim {
            n: w.n(),
            beta: w.config.beta,
        });
    }
    Ok(())
}

/// Principal components of the trimmed covariance operator, centred at the
/// trimmed mean computed from the same weights.
pub fn trimmed_cov_pcs(
    sample: &WeightedSample,
    w: &TrimWeights,
    components: usize,
) -> Result<TrimmedFit> {
    check_weights(sample, w)?;
    let mean = weighted_mean(sample, &w.w)?;
    let pcs = gram_pcs(sample, &w.w, &mean, components);
    Ok(pcs.into_fit(mean, w.clone()))
}

pub(crate) struct GramPcs {
    eigenvalues: Vec<f64>,
    pc_coeffs: Vec<Vec<f64>>,
    pc_values: Vec<Vec<f64>>,
    truncated: bool,
    degenerate: bool,
}

impl GramPcs {
    pub(crate) fn into_fit(self, mean: Vec<f64>, weights: TrimWeights) -> TrimmedFit {
        TrimmedFit {
            mean,
            eigenvalues: self.eigenvalues,
            pc_coeffs: self.pc_coeffs,
            pc_values: self.pc_values,
            weights,
            truncated: self.truncated,
            degenerate: self.degenerate,
        }
    }
}

/// Leading eigenpairs of `Σ w̃_i (X_i − c) ⊗ (X_i − c)` via the Gram route.
pub(crate) fn gram_pcs(
    sample: &WeightedSample,
    w: &[f64],
    center: &[f64],
    components: usize,
) -> GramPcs {
    let q = sample.quad_weights();
    let p = sample.p();
    let total: f64 = w.iter().sum();
    let support: Vec<usize> = (0..w.len()).filter(|&i| w[i] > 0.0).collect();
    let m = support.len();
    let root_w: Vec<f64> = support.iter().map(|&i| (w[i] / total).sqrt()).collect();

    let scaled: Vec<Vec<f64>> = support
        .iter()
        .zip(&root_w)
        .map(|(&i, &s)| {
            sample
                .row(i)
                .iter()
                .zip(center)
                .map(|(x, c)| s * (x - c))
                .collect()
        })
        .collect();

    let mut gram = DMatrix::<f64>::zeros(m, m);
    for a in 0..m {
        for b in a..m {
            let v = weighted_dot(&scaled[a], &scaled[b], q);
            gram[(a, b)] = v;
            gram[(b, a)] = v;
        }
    }
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let largest = order.first().map_or(0.0, |&k| eig.eigenvalues[k]);
    let available: Vec<usize> = if largest > 0.0 {
        order
            .iter()
            .copied()
            .filter(|&k| eig.eigenvalues[k] > NULL_EIGENVALUE_RTOL * largest)
            .collect()
    } else {
        Vec::new()
    };
    let kept = components.min(available.len());
    let truncated = components > kept;

    let mut eigenvalues = Vec::with_capacity(kept);
    let mut pc_coeffs = Vec::with_capacity(kept);
    let mut pc_values = Vec::with_capacity(kept);
    for &k in &available[..kept] {
        let l = eig.eigenvalues[k];
        let c = eig.eigenvectors.column(k);
        let mut coeff_support: Vec<f64> = (0..m).map(|a| c[a] / l.sqrt()).collect();
        let mut phi = vec![0.0; p];
        for (a, row) in scaled.iter().enumerate() {
            for (f, y) in phi.iter_mut().zip(row) {
                *f += coeff_support[a] * y;
            }
        }
        let norm = weighted_norm(&phi, q);
        let (_, peak) = phi.iter().fold((0.0f64, 0.0f64), |(best, val), &v| {
            if v.abs() > best {
                (v.abs(), v)
            } else {
                (best, val)
            }
        });
        let scale = if peak < 0.0 { -1.0 / norm } else { 1.0 / norm };
        phi.iter_mut().for_each(|f| *f *= scale);
        coeff_support.iter_mut().for_each(|a| *a *= scale);

        let mut coeffs = vec![0.0; w.len()];
        for (a, &i) in support.iter().enumerate() {
            coeffs[i] = coeff_support[a] * root_w[a];
        }
        eigenvalues.push(l);
        pc_coeffs.push(coeffs);
        pc_values.push(phi);
    }

    // `available` is a prefix of `order`; a reported eigenvalue is ambiguous if
    // it nearly equals its successor, including the first one left out
    let mut degenerate = eigenvalues.is_empty() && components > 0;
    for pos in 0..kept {
        if let Some(&next) = order.get(pos + 1) {
            let (l, ln) = (eig.eigenvalues[order[pos]], eig.eigenvalues[next]);
            if l - ln <= REPEATED_EIGENVALUE_RTOL * l {
                degenerate = true;
            }
        }
    }

    GramPcs {
        eigenvalues,
        pc_coeffs,
        pc_values,
        truncated,
        degenerate,
    }
}

/// Standardized scores `s_ik = ⟨X_i − μ̂, φ̂_k⟩ / λ̂_k^{1/2}`, one row per observation.
pub fn scores(sample: &WeightedSample, fit: &TrimmedFit) -> Result<Vec<Vec<f64>>> {
    if fit.mean.len() != sample.p() {
        return Err(Error::Dimension {
            expected: sample.p(),
            found: fit.mean.len(),
        });
    }
    let q = sample.quad_weights();
    let mut centred = vec![0.0; sample.p()];
    Ok(sample
        .rows()
        .map(|row| {
            for ((c, x), m) in centred.iter_mut().zip(row).zip(&fit.mean) {
                *c = x - m;
            }
            fit.pc_values
                .iter()
                .zip(&fit.eigenvalues)
                .map(|(phi, l)| weighted_dot(&centred, phi, q) / l.sqrt())
                .collect()
        })
        .collect())
}

/// Plain mean of the observations that received zero weight.
pub fn complement_mean(sample: &WeightedSample, w: &TrimWeights) -> Result<Vec<f64>> {
    check_weights(sample, w)?;
    let out: Vec<f64> =
        w.w.iter()
            .map(|&v| if v == 0.0 { 1.0 } else { 0.0 })
            .collect();
    if out.iter().all(|&v| v == 0.0) {
        return Err(Error::NoTrimmedObservations);
    }
    weighted_mean(sample, &out)
}

/// Finite-sample breakdown point `min(⌈αn⌉, ⌊βn⌋ + 2) / n`, kept as a fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BreakdownPoint {
    /// Smallest number of replaced observations that can break the estimator.
    pub outliers: usize,
    pub n: usize,
}

impl BreakdownPoint {
    pub fn fraction(&self) -> f64 {
        self.outliers as f64 / self.n as f64
    }
}

impl std::fmt::Display for BreakdownPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.outliers, self.n)
    }
}

/// Breakdown point of the trimmed mean and covariance; requires `α ≤ 0.5`,
/// `⌈αn⌉ ≥ 3` and `β ≤ 0.5`.
pub fn breakdown_point(n: usize, alpha: f64, beta: f64) -> Result<BreakdownPoint> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(Error::BreakdownHypothesis(format!(
            "alpha = {alpha} must satisfy 0 < alpha <= 0.5"
        )));
    }
    if !(0.0..=0.5).contains(&beta) {
        return Err(Error::BreakdownHypothesis(format!(
            "beta = {beta} must satisfy 0 <= beta <= 0.5"
        )));
    }
    let k_alpha = ceil_count(alpha, n);
    if k_alpha < 3 {
        return Err(Error::BreakdownHypothesis(format!(
            "ceil(alpha * n) = {k_alpha} must be at least 3 (alpha = {alpha}, n = {n})"
        )));
    }
    let k_beta = floor_count(beta, n) + 2;
    Ok(BreakdownPoint {
        outliers: k_alpha.min(k_beta),
        n,
    })
}
