//! Test-only oracles and random instance builders. Nothing here calls into the
//! library's numerical code, so agreement is an independent check.

#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn normal_matrix(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..p).map(|_| normal(rng)).collect())
        .collect()
}

/// Positive weights summing to roughly one, like a quadrature rule.
pub fn random_quadrature(rng: &mut ChaCha8Rng, p: usize) -> Vec<f64> {
    (0..p)
        .map(|_| rng.random_range(0.2..2.0) / p as f64)
        .collect()
}

pub fn dot_q(x: &[f64], y: &[f64], q: &[f64]) -> f64 {
    x.iter().zip(y).zip(q).map(|((a, b), w)| w * a * b).sum()
}

pub fn norm_q(x: &[f64], q: &[f64]) -> f64 {
    dot_q(x, x, q).sqrt()
}

/// Haar-ish orthogonal matrix by Gram-Schmidt on a Gaussian matrix (rows).
pub fn random_orthogonal(rng: &mut ChaCha8Rng, p: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(p);
    while basis.len() < p {
        let mut v: Vec<f64> = (0..p).map(|_| normal(rng)).collect();
        for _ in 0..2 {
            for b in &basis {
                let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            v.iter_mut().for_each(|x| *x /= n);
            basis.push(v);
        }
    }
    basis
}

pub fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// `U = Q^{-1/2} O Q^{1/2}`: preserves the inner product `Σ q_j x_j y_j`.
pub struct QuadratureUnitary {
    o: Vec<Vec<f64>>,
    sqrt_q: Vec<f64>,
}

impl QuadratureUnitary {
    pub fn new(rng: &mut ChaCha8Rng, q: &[f64]) -> Self {
        Self {
            o: random_orthogonal(rng, q.len()),
            sqrt_q: q.iter().map(|w| w.sqrt()).collect(),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let scaled: Vec<f64> = x.iter().zip(&self.sqrt_q).map(|(v, s)| v * s).collect();
        mat_vec(&self.o, &scaled)
            .into_iter()
            .zip(&self.sqrt_q)
            .map(|(v, s)| v / s)
            .collect()
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns eigenvalues
/// in descending order with matching unit eigenvectors.
pub fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut a: Vec<Vec<f64>> = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..n).map(|k| v[k][i]).collect())
        .collect();
    (values, vectors)
}

/// Weighted mean and the eigendecomposition of the `p × p` covariance
/// operator `C = Σ w̃_i (x_i - μ)(x_i - μ)ᵀ Q`, returned as eigenvalues and
/// eigenfunctions with unit `q`-norm.
pub fn covariance_oracle(
    rows: &[Vec<f64>],
    w: &[f64],
    q: &[f64],
) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let p = q.len();
    let total: f64 = w.iter().sum();
    let mut mean = vec![0.0; p];
    for (r, wi) in rows.iter().zip(w) {
        for j in 0..p {
            mean[j] += wi * r[j] / total;
        }
    }
    // symmetrized as Q^{1/2} Σ Q^{1/2}
    let sq: Vec<f64> = q.iter().map(|x| x.sqrt()).collect();
    let mut m = vec![vec![0.0; p]; p];
    for (r, wi) in rows.iter().zip(w) {
        let c: Vec<f64> = (0..p).map(|j| (r[j] - mean[j]) * sq[j]).collect();
        for a in 0..p {
            for b in 0..p {
                m[a][b] += wi / total * c[a] * c[b];
            }
        }
    }
    let (values, vectors) = jacobi_eigen(&m);
    let functions = vectors
        .into_iter()
        .map(|v| v.iter().zip(&sq).map(|(x, s)| x / s).collect())
        .collect();
    (mean, values, functions)
}

/// Brute-force α-radii and max-ranks from raw 1-D points.
pub fn brute_radii_1d(xs: &[f64], k: usize) -> (Vec<f64>, Vec<usize>) {
    let radii: Vec<f64> = xs
        .iter()
        .map(|&x| {
            let mut row: Vec<f64> = xs.iter().map(|&y| (x - y).abs()).collect();
            row.sort_by(f64::total_cmp);
            row[k - 1]
        })
        .collect();
    let ranks = radii
        .iter()
        .map(|&r| radii.iter().filter(|&&s| s <= r).count())
        .collect();
    (radii, ranks)
}

/// `√2 sin(πkt)` evaluated on `t`.
pub fn sine(k: usize, t: &[f64]) -> Vec<f64> {
    t.iter()
        .map(|&x| 2f64.sqrt() * (std::f64::consts::PI * k as f64 * x).sin())
        .collect()
}

pub fn uniform_knots(m: usize) -> Vec<f64> {
    (0..m).map(|j| j as f64 / (m - 1) as f64).collect()
}

/// Two clusters of curves on a 50-point grid: `big` around zero and `small`
/// around `5 φ₁`, each with small smooth noise.
pub fn two_cluster_curves(rng: &mut ChaCha8Rng, big: usize, small: usize) -> Vec<Vec<f64>> {
    let t = uniform_knots(50);
    let phis: Vec<Vec<f64>> = (1..=4).map(|k| sine(k, &t)).collect();
    let shift = sine(1, &t);
    (0..big + small)
        .map(|i| {
            let mut row = vec![0.0; t.len()];
            for (k, phi) in phis.iter().enumerate() {
                let z = 0.3 * normal(rng) / (k + 1) as f64;
                row.iter_mut().zip(phi).for_each(|(r, f)| *r += z * f);
            }
            if i >= big {
                row.iter_mut().zip(&shift).for_each(|(r, f)| *r += 5.0 * f);
            }
            row
        })
        .collect()
}
