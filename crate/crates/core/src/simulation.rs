//! Monte Carlo study of the location and first-component estimators.
//!
//! Curves follow `X(t) = Σ_k Z_k λ_k^{1/2} φ_k(t)` with `φ_k(t) = √2 sin(πkt)`
//! and i.i.d. standard normal scores, observed on an equally spaced grid.
//! Outliers are produced either by shifting the mean along `φ₁` or by
//! inflating the variance along `φ₂`.
//!
//! Randomness: replication `r` of model `m` draws from a ChaCha8 generator
//! seeded with `seed_from_u64(seed)` on stream `(m << 32) | r`. Any single
//! replication can be regenerated on its own, and the thread schedule never
//! changes the result.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::{
    sample_mean_and_pcs, spatial_median, spherical_pcs_about, MEDIAN_MAX_ITER, MEDIAN_TOL,
};
use crate::depth::{alpha_radii, snap, trim_weights, RadiusProfile, TrimConfig};
use crate::error::{Error, Result};
use crate::estimators::{trimmed_cov_pcs, trimmed_mean};
use crate::hilbert::{sample_distances, weighted_distance, weighted_norm, Grid, WeightedSample};

/// `√2 sin(πkt)`, the `k`-th eigenfunction of both models.
pub fn basis_function(k: usize, t: f64) -> f64 {
    2f64.sqrt() * (PI * k as f64 * t).sin()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum SimModel {
    /// `λ_k = 1/{k(k+1)}`, truncated at 1000 terms.
    SlowDecay,
    /// `λ_k = 2^{-k}`, truncated at 10 terms.
    FastDecay,
}

impl TryFrom<u8> for SimModel {
    type Error = String;

    fn try_from(id: u8) -> std::result::Result<Self, String> {
        match id {
            1 => Ok(SimModel::SlowDecay),
            2 => Ok(SimModel::FastDecay),
            other => Err(format!("unknown model {other}, expected 1 or 2")),
        }
    }
}

impl From<SimModel> for u8 {
    fn from(m: SimModel) -> u8 {
        m.id()
    }
}

impl SimModel {
    pub fn id(self) -> u8 {
        match self {
            SimModel::SlowDecay => 1,
            SimModel::FastDecay => 2,
        }
    }

    pub fn truncation(self) -> usize {
        match self {
            SimModel::SlowDecay => 1000,
            SimModel::FastDecay => 10,
        }
    }

    /// `λ_k` for `k >= 1`.
    pub fn eigenvalue(self, k: usize) -> f64 {
        let k = k as f64;
        match self {
            SimModel::SlowDecay => 1.0 / (k * (k + 1.0)),
            SimModel::FastDecay => 0.5f64.powf(k),
        }
    }

    pub fn eigenvalues(self) -> Vec<f64> {
        (1..=self.truncation())
            .map(|k| self.eigenvalue(k))
            .collect()
    }
}

/// Scaled basis `λ_k^{1/2} φ_k(t_j)` of a model on a grid.
#[derive(Debug, Clone)]
pub struct ModelBasis {
    grid: Grid,
    /// `truncation × m`, row-major.
    scaled: Vec<f64>,
    terms: usize,
}

impl ModelBasis {
    pub fn new(model: SimModel, grid: &Grid) -> Self {
        let terms = model.truncation();
        let mut scaled = Vec::with_capacity(terms * grid.len());
        for k in 1..=terms {
            let s = model.eigenvalue(k).sqrt();
            scaled.extend(grid.knots().iter().map(|&t| s * basis_function(k, t)));
        }
        Self {
            grid: grid.clone(),
            scaled,
            terms,
        }
    }

    /// Draws `n` curves; scores are consumed row by row, term by term.
    pub fn sample<R: rand::Rng>(&self, n: usize, rng: &mut R) -> Result<WeightedSample> {
        let m = self.grid.len();
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            let mut row = vec![0.0; m];
            for k in 0..self.terms {
                let z: f64 = StandardNormal.sample(rng);
                let basis = &self.scaled[k * m..(k + 1) * m];
                for (x, b) in row.iter_mut().zip(basis) {
                    *x += z * b;
                }
            }
            rows.push(row);
        }
        WeightedSample::on_grid(rows, self.grid.clone())
    }
}

pub fn generate_sample<R: rand::Rng>(
    model: SimModel,
    n: usize,
    grid: &Grid,
    rng: &mut R,
) -> Result<WeightedSample> {
    ModelBasis::new(model, grid).sample(n, rng)
}

fn single_grid(sample: &WeightedSample) -> Result<&Grid> {
    match sample.channels() {
        [ch] => ch.grid.as_ref().ok_or_else(|| {
            Error::InvalidSample("contamination needs curves observed on a grid".into())
        }),
        _ => Err(Error::InvalidSample(
            "contamination needs a single-channel sample".into(),
        )),
    }
}

fn integral_count(x: f64, field: &str) -> Result<usize> {
    let c = snap(x);
    if c < 0.0 || c.fract() != 0.0 {
        return Err(Error::Config {
            field: field.into(),
            message: format!("{x} observations is not a whole number"),
        });
    }
    Ok(c as usize)
}

fn add_to_rows(
    sample: &WeightedSample,
    shifts: &[(usize, f64)],
    k: usize,
) -> Result<WeightedSample> {
    let grid = single_grid(sample)?;
    let phi: Vec<f64> = grid.knots().iter().map(|&t| basis_function(k, t)).collect();
    let p = sample.p();
    let mut values = sample.values().to_vec();
    for &(i, c) in shifts {
        for (v, f) in values[i * p..(i + 1) * p].iter_mut().zip(&phi) {
            *v += c * f;
        }
    }
    sample.with_values(values)
}

/// Adds `3φ₁` to the first `nε` curves.
pub fn contaminate_mean(sample: &WeightedSample, epsilon: f64) -> Result<WeightedSample> {
    let count = integral_count(sample.n() as f64 * epsilon, "epsilon")?;
    if count > sample.n() {
        return Err(Error::Config {
            field: "epsilon".into(),
            message: format!("{epsilon} exceeds 1"),
        });
    }
    let shifts: Vec<(usize, f64)> = (0..count).map(|i| (i, 3.0)).collect();
    add_to_rows(sample, &shifts, 1)
}

/// Adds `3φ₂` to the first `nε/2` curves and subtracts it from the next `nε/2`.
pub fn contaminate_pc(sample: &WeightedSample, epsilon: f64) -> Result<WeightedSample> {
    let half = integral_count(sample.n() as f64 * epsilon / 2.0, "epsilon")?;
    if 2 * half > sample.n() {
        return Err(Error::Config {
            field: "epsilon".into(),
            message: format!("{epsilon} exceeds 1"),
        });
    }
    let shifts: Vec<(usize, f64)> = (0..half)
        .map(|i| (i, 3.0))
        .chain((half..2 * half).map(|i| (i, -3.0)))
        .collect();
    add_to_rows(sample, &shifts, 2)
}

/// `‖μ̂‖`; the true mean of both models is zero.
pub fn mean_error(estimate: &[f64], quad_weights: &[f64]) -> f64 {
    weighted_norm(estimate, quad_weights)
}

/// `min(‖φ̂ − φ‖, ‖φ̂ + φ‖)`: the error up to the arbitrary eigenfunction sign.
pub fn pc_error(estimate: &[f64], truth: &[f64], quad_weights: &[f64]) -> f64 {
    let minus = weighted_distance(estimate, truth, quad_weights);
    let flipped: Vec<f64> = truth.iter().map(|t| -t).collect();
    let plus = weighted_distance(estimate, &flipped, quad_weights);
    minus.min(plus)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Contamination {
    /// Shift along the first eigenfunction; scored with location estimators.
    MeanShift,
    /// Symmetric inflation along the second eigenfunction; scored with
    /// first-component estimators.
    PcInflate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EstimatorSpec {
    Mean,
    Median,
    Hard { alpha: f64, beta: f64 },
    Soft { alpha: f64, beta: f64, beta1: f64 },
    SamplePc,
    SphericalPc,
    HardPc { alpha: f64, beta: f64 },
    SoftPc { alpha: f64, beta: f64, beta1: f64 },
}

fn two_digits(x: f64) -> String {
    let s = format!("{x:.2}");
    s.strip_prefix('0').map(str::to_owned).unwrap_or(s)
}

impl EstimatorSpec {
    pub fn label(&self) -> String {
        match *self {
            EstimatorSpec::Mean => "Mean".into(),
            EstimatorSpec::Median => "Median".into(),
            EstimatorSpec::Hard { alpha, beta } => {
                format!("Hard({},{})", two_digits(alpha), two_digits(beta))
            }
            EstimatorSpec::Soft { alpha, beta, .. } => {
                format!("Soft({},{})", two_digits(alpha), two_digits(beta))
            }
            EstimatorSpec::SamplePc => "Sample p.c.".into(),
            EstimatorSpec::SphericalPc => "Spherical p.c.".into(),
            EstimatorSpec::HardPc { alpha, beta } => {
                format!("Hard({},{}) p.c.", two_digits(alpha), two_digits(beta))
            }
            EstimatorSpec::SoftPc { alpha, beta, .. } => {
                format!("Soft({},{}) p.c.", two_digits(alpha), two_digits(beta))
            }
        }
    }

    pub fn is_location(&self) -> bool {
        matches!(
            self,
            EstimatorSpec::Mean
                | EstimatorSpec::Median
                | EstimatorSpec::Hard { .. }
                | EstimatorSpec::Soft { .. }
        )
    }

    pub fn trim_config(&self) -> Option<Result<TrimConfig>> {
        match *self {
            EstimatorSpec::Hard { alpha, beta } | EstimatorSpec::HardPc { alpha, beta } => {
                Some(TrimConfig::hard(alpha, beta))
            }
            EstimatorSpec::Soft { alpha, beta, beta1 }
            | EstimatorSpec::SoftPc { alpha, beta, beta1 } => {
                Some(TrimConfig::soft(alpha, beta, beta1))
            }
            _ => None,
        }
    }

    /// Mean, median and six trimmed means.
    pub fn location_suite() -> Vec<Self> {
        let mut v = vec![EstimatorSpec::Mean, EstimatorSpec::Median];
        for (alpha, beta) in [(0.2, 0.2), (0.5, 0.2), (0.2, 0.5), (0.5, 0.5)] {
            v.push(EstimatorSpec::Hard { alpha, beta });
        }
        for alpha in [0.2, 0.5] {
            v.push(EstimatorSpec::Soft {
                alpha,
                beta: 0.2,
                beta1: 0.5,
            });
        }
        v
    }

    /// Sample, spherical and six trimmed first components.
    pub fn component_suite() -> Vec<Self> {
        let mut v = vec![EstimatorSpec::SamplePc, EstimatorSpec::SphericalPc];
        for (alpha, beta) in [(0.2, 0.2), (0.5, 0.2), (0.2, 0.5), (0.5, 0.5)] {
            v.push(EstimatorSpec::HardPc { alpha, beta });
        }
        for alpha in [0.2, 0.5] {
            v.push(EstimatorSpec::SoftPc {
                alpha,
                beta: 0.2,
                beta1: 0.5,
            });
        }
        v
    }
}

fn default_n() -> usize {
    100
}
fn default_grid_points() -> usize {
    50
}
fn default_replications() -> usize {
    500
}
fn default_epsilons() -> Vec<f64> {
    vec![0.0, 0.1, 0.2, 0.3, 0.4]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub models: Vec<SimModel>,
    #[serde(default = "default_n")]
    pub n: usize,
    /// Equally spaced points on `[0, 1]`, endpoints included.
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    pub contamination: Contamination,
    pub estimators: Vec<EstimatorSpec>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    pub seed: u64,
}

impl SimConfig {
    /// The location study (mean-shift outliers, all location estimators).
    pub fn location_study(seed: u64) -> Self {
        Self {
            models: vec![SimModel::SlowDecay, SimModel::FastDecay],
            n: default_n(),
            grid_points: default_grid_points(),
            epsilons: default_epsilons(),
            contamination: Contamination::MeanShift,
            estimators: EstimatorSpec::location_suite(),
            replications: default_replications(),
            seed,
        }
    }

    /// The first-component study (variance-inflating outliers).
    pub fn component_study(seed: u64) -> Self {
        Self {
            contamination: Contamination::PcInflate,
            estimators: EstimatorSpec::component_suite(),
            ..Self::location_study(seed)
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::uniform(0.0, 1.0, self.grid_points)
    }

    pub fn validate(&self) -> Result<()> {
        let field = |f: String, message: String| Error::Config { field: f, message };
        if self.models.is_empty() {
            return Err(field(
                "models".into(),
                "at least one model is required".into(),
            ));
        }
        if self.n < 2 {
            return Err(field("n".into(), format!("need n >= 2, got {}", self.n)));
        }
        if self.grid_points < 2 {
            return Err(field("grid_points".into(), "need at least 2 points".into()));
        }
        if self.replications == 0 {
            return Err(field("replications".into(), "must be positive".into()));
        }
        if self.estimators.is_empty() {
            return Err(field(
                "estimators".into(),
                "at least one estimator is required".into(),
            ));
        }
        for (i, &eps) in self.epsilons.iter().enumerate() {
            let path = format!("epsilons[{i}]");
            if !(0.0..=0.5).contains(&eps) {
                return Err(field(path, format!("{eps} outside [0, 0.5]")));
            }
            let per_row = match self.contamination {
                Contamination::MeanShift => self.n as f64 * eps,
                Contamination::PcInflate => self.n as f64 * eps / 2.0,
            };
            integral_count(per_row, &path).map_err(|_| {
                field(
                    path.clone(),
                    format!(
                        "n * epsilon = {} must give a whole number of outliers per group",
                        self.n as f64 * eps
                    ),
                )
            })?;
        }
        for (i, est) in self.estimators.iter().enumerate() {
            let path = format!("estimators[{i}]");
            if est.is_location() != (self.contamination == Contamination::MeanShift) {
                return Err(field(
                    path,
                    format!(
                        "{} does not match {:?} contamination",
                        est.label(),
                        self.contamination
                    ),
                ));
            }
            if let Some(Err(e)) = est.trim_config() {
                return Err(field(path, e.to_string()));
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

/// Generator for one replication of one model.
pub fn replication_rng(seed: u64, model: SimModel, replication: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((model.id() as u64) << 32) | replication as u64);
    rng
}

/// Lazily shared distances and radii for one contaminated sample.
struct DepthCache<'a> {
    sample: &'a WeightedSample,
    distances: Option<crate::hilbert::DistanceMatrix>,
    radii: Vec<RadiusProfile>,
}

impl<'a> DepthCache<'a> {
    fn new(sample: &'a WeightedSample) -> Self {
        Self {
            sample,
            distances: None,
            radii: Vec::new(),
        }
    }

    fn profile(&mut self, alpha: f64) -> Result<&RadiusProfile> {
        if let Some(pos) = self.radii.iter().position(|r| r.alpha == alpha) {
            return Ok(&self.radii[pos]);
        }
        let sample = self.sample;
        let d = self
            .distances
            .get_or_insert_with(|| sample_distances(sample));
        let profile = alpha_radii(d, alpha)?;
        self.radii.push(profile);
        Ok(self.radii.last().unwrap())
    }
}

fn evaluate(spec: &EstimatorSpec, cache: &mut DepthCache<'_>, phi1: &[f64]) -> Result<f64> {
    let sample = cache.sample;
    let q = sample.quad_weights();
    let first_pc = |fit: crate::estimators::TrimmedFit| -> Result<f64> {
        fit.pc_values
            .first()
            .map(|phi| pc_error(phi, phi1, q))
            .ok_or_else(|| Error::Degenerate("no positive eigenvalue".into()))
    };
    match spec {
        EstimatorSpec::Mean => {
            let w = crate::depth::TrimWeights::uniform(sample.n())?;
            Ok(mean_error(&trimmed_mean(sample, &w)?, q))
        }
        EstimatorSpec::Median => {
            let r = spatial_median(sample, MEDIAN_TOL, MEDIAN_MAX_ITER)?;
            if !r.converged {
                return Err(Error::Degenerate("spatial median did not converge".into()));
            }
            Ok(mean_error(&r.median, q))
        }
        EstimatorSpec::SamplePc => first_pc(sample_mean_and_pcs(sample, 1)?),
        EstimatorSpec::SphericalPc => {
            let r = spatial_median(sample, MEDIAN_TOL, MEDIAN_MAX_ITER)?;
            if !r.converged {
                return Err(Error::Degenerate("spatial median did not converge".into()));
            }
            first_pc(spherical_pcs_about(sample, &r.median, 1)?)
        }
        trimmed => {
            let config = trimmed.trim_config().expect("trimmed estimator")?;
            let profile = cache.profile(config.alpha)?;
            let w = trim_weights(profile, &config)?;
            if trimmed.is_location() {
                Ok(mean_error(&trimmed_mean(sample, &w)?, q))
            } else {
                first_pc(trimmed_cov_pcs(sample, &w, 1)?)
            }
        }
    }
}

/// Per-replication errors indexed `[model][epsilon][estimator]`; `None` marks
/// an estimator failure.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationErrors {
    pub errors: Vec<Vec<Vec<Option<f64>>>>,
    pub seconds: Vec<Vec<Vec<f64>>>,
}

/// Runs a single replication (all models, contamination levels and estimators).
pub fn replicate(
    config: &SimConfig,
    bases: &[ModelBasis],
    replication: usize,
) -> Result<ReplicationErrors> {
    let grid = config.grid()?;
    let phi1: Vec<f64> = grid.knots().iter().map(|&t| basis_function(1, t)).collect();
    let mut errors = Vec::with_capacity(config.models.len());
    let mut seconds = Vec::with_capacity(config.models.len());
    for (model, basis) in config.models.iter().zip(bases) {
        let mut rng = replication_rng(config.seed, *model, replication);
        let clean = basis.sample(config.n, &mut rng)?;
        let mut per_eps = Vec::with_capacity(config.epsilons.len());
        let mut per_eps_time = Vec::with_capacity(config.epsilons.len());
        for &eps in &config.epsilons {
            let sample = match config.contamination {
                Contamination::MeanShift => contaminate_mean(&clean, eps)?,
                Contamination::PcInflate => contaminate_pc(&clean, eps)?,
            };
            let mut cache = DepthCache::new(&sample);
            let mut row = Vec::with_capacity(config.estimators.len());
            let mut times = Vec::with_capacity(config.estimators.len());
            for spec in &config.estimators {
                let start = Instant::now();
                row.push(evaluate(spec, &mut cache, &phi1).ok());
                times.push(start.elapsed().as_secs_f64());
            }
            per_eps.push(row);
            per_eps_time.push(times);
        }
        errors.push(per_eps);
        seconds.push(per_eps_time);
    }
    Ok(ReplicationErrors { errors, seconds })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub estimator: String,
    pub model: u8,
    pub epsilon: f64,
    /// `sqrt(mean of squared errors)` over the successful replications.
    pub rmse: f64,
    /// Replications that contributed to `rmse`.
    pub reps: usize,
    pub failures: usize,
    /// Total time spent in this estimator across replications. Not
    /// serialized, so report files stay bit-identical across reruns.
    #[serde(skip_serializing, default)]
    pub elapsed_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub schema_version: u32,
    pub seed: u64,
    pub config_hash: String,
    pub replications: usize,
    pub rows: Vec<SimRow>,
}

impl SimReport {
    pub fn get(&self, estimator: &str, model: u8, epsilon: f64) -> Option<&SimRow> {
        self.rows.iter().find(|r| {
            r.estimator == estimator && r.model == model && (r.epsilon - epsilon).abs() < 1e-12
        })
    }

    /// `estimator,model,epsilon,rmse,reps,failures,seed` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("estimator,model,epsilon,rmse,reps,failures,seed\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                csv_field(&r.estimator),
                r.model,
                crate::io::format_f64(r.epsilon),
                crate::io::format_f64(r.rmse),
                r.reps,
                r.failures,
                self.seed
            );
        }
        out
    }

    /// Plain-text table, one line per estimator and model, epsilons across.
    pub fn to_table(&self) -> String {
        type Cells = (String, Vec<(f64, f64)>);
        let mut grouped: BTreeMap<(u8, usize), Cells> = BTreeMap::new();
        let mut order: Vec<String> = Vec::new();
        for r in &self.rows {
            if !order.contains(&r.estimator) {
                order.push(r.estimator.clone());
            }
            let idx = order.iter().position(|e| e == &r.estimator).unwrap();
            grouped
                .entry((r.model, idx))
                .or_insert_with(|| (r.estimator.clone(), Vec::new()))
                .1
                .push((r.epsilon, r.rmse));
        }
        let mut out = String::new();
        let mut last_model = 0;
        for ((model, _), (name, cells)) in grouped {
            if model != last_model {
                let _ = write!(out, "Model {model}\n{:<20}", "estimator");
                for (eps, _) in &cells {
                    let _ = write!(out, "{:>8}", two_digits(*eps));
                }
                out.push('\n');
                last_model = model;
            }
            let _ = write!(out, "{name:<20}");
            for (_, rmse) in &cells {
                let _ = write!(out, "{:>8}", two_digits(*rmse));
            }
            out.push('\n');
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Runs every replication and aggregates root-mean-squared errors.
///
/// Replications run in parallel; the reduction is a sequential sum in
/// replication order, so the report is identical for any thread count.
pub fn run_study(config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    let grid = config.grid()?;
    let bases: Vec<ModelBasis> = config
        .models
        .iter()
        .map(|m| ModelBasis::new(*m, &grid))
        .collect();
    let reps: Vec<ReplicationErrors> = (0..config.replications)
        .into_par_iter()
        .map(|r| replicate(config, &bases, r))
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (mi, model) in config.models.iter().enumerate() {
        for (si, spec) in config.estimators.iter().enumerate() {
            for (ei, &eps) in config.epsilons.iter().enumerate() {
                let mut sum_sq = 0.0;
                let mut used = 0;
                let mut elapsed = 0.0;
                for rep in &reps {
                    elapsed += rep.seconds[mi][ei][si];
                    if let Some(e) = rep.errors[mi][ei][si] {
                        sum_sq += e * e;
                        used += 1;
                    }
                }
                let rmse = if used > 0 {
                    (sum_sq / used as f64).sqrt()
                } else {
                    f64::NAN
                };
                rows.push(SimRow {
                    estimator: spec.label(),
                    model: model.id(),
                    epsilon: eps,
                    rmse,
                    reps: used,
                    failures: config.replications - used,
                    elapsed_secs: elapsed,
                });
            }
        }
    }
    Ok(SimReport {
        schema_version: 1,
        seed: config.seed,
        config_hash: config.hash(),
        replications: config.replications,
        rows,
    })
}
