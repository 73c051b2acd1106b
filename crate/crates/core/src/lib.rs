//! Interdistance-based data depth and trimmed estimation of the mean and
//! covariance operator for samples in inner-product spaces.
//!
//! The pipeline is: [`hilbert`] turns observations into coordinates with
//! quadrature weights and computes interdistances; [`depth`] converts them into
//! α-radii and rank-based weights; [`estimators`] forms the trimmed mean and
//! principal components. [`baselines`] holds the comparison estimators and
//! [`simulation`] the Monte Carlo harness.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod cli;
pub mod depth;
pub mod error;
pub mod estimators;
pub mod hilbert;
pub mod io;
pub mod simulation;

pub use depth::{
    alpha_radii, soft_weight_g, trim_weights, RadiusProfile, TrimConfig, TrimMode, TrimWeights,
};
pub use error::{Error, Result};
pub use estimators::{
    breakdown_point, complement_mean, scores, trimmed_cov_pcs, trimmed_mean, BreakdownPoint,
    TrimmedFit,
};
pub use hilbert::{
    distance_matrix, gram_matrix, inner_product, sample_distances, trapezoid_weights,
    DistanceMatrix, GramMatrix, Grid, WeightedSample,
};
