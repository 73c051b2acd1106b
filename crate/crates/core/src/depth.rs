//! α-radii and rank-based trimming weights.
//!
//! The α-radius of observation `i` is the distance to its `⌈αn⌉`-th closest
//! sample point, counting the observation itself at distance zero. Small radii
//! mark dense regions; outliers get large radii. Weights are a non-increasing
//! function of the radius rank.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::DistanceMatrix;

/// Rounds `x` to the nearest integer when it is within floating-point noise of
/// one, so that e.g. `0.2 * 100` counts as exactly 20.
pub(crate) fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r
    } else {
        x
    }
}

/// `⌈alpha * n⌉`, robust to representation error in `alpha`.
pub fn ceil_count(alpha: f64, n: usize) -> usize {
    let x = snap(alpha * n as f64).ceil();
    if x <= 0.0 {
        0
    } else {
        x as usize
    }
}

/// `⌊beta * n⌋`, robust to representation error in `beta`.
pub fn floor_count(beta: f64, n: usize) -> usize {
    let x = snap(beta * n as f64).floor();
    if x <= 0.0 {
        0
    } else {
        x as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusProfile {
    pub alpha: f64,
    pub radii: Vec<f64>,
    /// Max-ranks: `ranks[i] = #{j : radii[j] <= radii[i]}`, see [`max_ranks`].
    pub ranks: Vec<usize>,
}

impl RadiusProfile {
    pub fn n(&self) -> usize {
        self.radii.len()
    }
}

/// Relative gap below which two sorted radii count as tied.
///
/// Interdistances are only accurate to a few ulps, so radii that are equal in
/// exact arithmetic (mirror-image points, for instance) may differ in the last
/// bits. Adjacent sorted radii closer than this are merged into one tie group.
pub const RADIUS_TIE_RTOL: f64 = 1e-10;

/// Max-ranks of `values`; tied values share the largest rank of their group.
///
/// Ties are exact equality or, after sorting, a chain of neighbours whose
/// relative gap is at most [`RADIUS_TIE_RTOL`].
pub fn max_ranks(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n {
            let (prev, next) = (values[order[end - 1]], values[order[end]]);
            if next - prev > RADIUS_TIE_RTOL * next.abs() {
                break;
            }
            end += 1;
        }
        for &i in &order[start..end] {
            ranks[i] = end;
        }
        start = end;
    }
    ranks
}

/// α-radii of every observation together with their max-ranks.
pub fn alpha_radii(d: &DistanceMatrix, alpha: f64) -> Result<RadiusProfile> {
    let n = d.n();
    let k = ceil_count(alpha, n);
    if !(alpha > 0.0) || !alpha.is_finite() || k == 0 || k > n {
        return Err(Error::InvalidAlpha { alpha, n });
    }
    let mut buf = vec![0.0; n];
    let radii: Vec<f64> = (0..n)
        .map(|i| {
            buf.copy_from_slice(d.row(i));
            let (_, kth, _) = buf.select_nth_unstable_by(k - 1, f64::total_cmp);
            *kth
        })
        .collect();
    let ranks = max_ranks(&radii);
    Ok(RadiusProfile {
        alpha,
        radii,
        ranks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TrimMode {
    /// Indicator weights.
    Hard,
    /// Smooth ramp from 1 at rank fraction `1 - beta1` down to 0 at `1 - beta`.
    Soft { beta1: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrimConfig {
    pub alpha: f64,
    pub beta: f64,
    #[serde(flatten)]
    pub mode: TrimMode,
}

impl TrimConfig {
    pub fn hard(alpha: f64, beta: f64) -> Result<Self> {
        let c = Self {
            alpha,
            beta,
            mode: TrimMode::Hard,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn soft(alpha: f64, beta: f64, beta1: f64) -> Result<Self> {
        let c = Self {
            alpha,
            beta,
            mode: TrimMode::Soft { beta1 },
        };
        c.validate()?;
        Ok(c)
    }

    /// No trimming at all (every weight is one).
    pub fn untrimmed() -> Self {
        Self {
            alpha: 0.5,
            beta: 0.0,
            mode: TrimMode::Hard,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 0.5) {
            return Err(Error::InvalidConfig(format!(
                "alpha = {} must lie in (0, 0.5]",
                self.alpha
            )));
        }
        if !(self.beta >= 0.0 && self.beta <= 0.5) {
            return Err(Error::InvalidConfig(format!(
                "beta = {} must lie in [0, 0.5]",
                self.beta
            )));
        }
        if let TrimMode::Soft { beta1 } = self.mode {
            if !(beta1 > self.beta && beta1 <= 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "soft mode needs beta < beta1 <= 1, got beta = {}, beta1 = {beta1}",
                    self.beta
                )));
            }
        }
        Ok(())
    }
}

/// Soft-rejection weight function.
///
/// With `a = 1 - beta1` and `b = 1 - beta`, returns 1 on `[0, a]`, 0 on
/// `[b, 1]`, and on `[a, b]` the cubic
/// `(t - b) [1/(a - b) + (t - a)(2t - (a + b))/(b - a)³]`,
/// which is non-increasing with zero slope at both ends.
pub fn soft_weight_g(t: f64, beta: f64, beta1: f64) -> Result<f64> {
    if !(beta1 > beta) || !(0.0..=1.0).contains(&beta) || beta1 > 1.0 {
        return Err(Error::InvalidConfig(format!(
            "soft weight needs 0 <= beta < beta1 <= 1, got beta = {beta}, beta1 = {beta1}"
        )));
    }
    let a = 1.0 - beta1;
    let b = 1.0 - beta;
    Ok(if t <= a {
        1.0
    } else if t >= b {
        0.0
    } else {
        let width = b - a;
        (t - b) * (1.0 / (a - b) + (t - a) * (2.0 * t - (a + b)) / (width * width * width))
    })
}

/// Per-observation weights in `[0, 1]` and the configuration behind them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrimWeights {
    pub w: Vec<f64>,
    pub config: TrimConfig,
    pub effective_n: f64,
}

impl TrimWeights {
    /// Arbitrary weights in `[0, 1]` with a positive total.
    pub fn from_values(w: Vec<f64>, config: TrimConfig) -> Result<Self> {
        if let Some(i) = w.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidConfig(format!(
                "weight {i} = {} outside [0, 1]",
                w[i]
            )));
        }
        let effective_n: f64 = w.iter().sum();
        if !(effective_n > 0.0) {
            return Err(Error::DegenerateTrim {
                n: w.len(),
                beta: config.beta,
            });
        }
        Ok(Self {
            w,
            config,
            effective_n,
        })
    }

    /// All weights equal to one.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_values(vec![1.0; n], TrimConfig::untrimmed())
    }

    pub fn n(&self) -> usize {
        self.w.len()
    }

    /// Number of observations with a strictly positive weight.
    pub fn support(&self) -> usize {
        self.w.iter().filter(|&&v| v > 0.0).count()
    }

    /// Indices of observations with zero weight.
    pub fn trimmed(&self) -> Vec<usize> {
        self.w
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Converts radius ranks into weights `g(rank / n)`.
///
/// An observation keeps positive weight iff `rank / n < 1 - beta`. With
/// `beta = 0` nothing is trimmed and all weights are one.
pub fn trim_weights(profile: &RadiusProfile, config: &TrimConfig) -> Result<TrimWeights> {
    config.validate()?;
    let n = profile.n();
    if n == 0 {
        return Err(Error::DegenerateTrim {
            n,
            beta: config.beta,
        });
    }
    if config.beta == 0.0 {
        return TrimWeights::from_values(vec![1.0; n], *config);
    }
    // rank/n < 1 - beta  <=>  rank < (1 - beta) n, compared on the snapped count
    let cutoff = snap((1.0 - config.beta) * n as f64);
    let w = profile
        .ranks
        .iter()
        .map(|&rank| {
            if (rank as f64) >= cutoff {
                return Ok(0.0);
            }
            match config.mode {
                TrimMode::Hard => Ok(1.0),
                TrimMode::Soft { beta1 } => {
                    soft_weight_g(rank as f64 / n as f64, config.beta, beta1).map(|g| g.max(0.0))
                }
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    TrimWeights::from_values(w, *config)
}

/// Radii, then weights, straight from a distance matrix.
pub fn depth_weights(d: &DistanceMatrix, config: &TrimConfig) -> Result<TrimWeights> {
    let profile = alpha_radii(d, config.alpha)?;
    trim_weights(&profile, config)
}
