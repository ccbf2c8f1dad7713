//! Stacked Monte Carlo (StackMC).
//!
//! StackMC post-processes an existing set of Monte Carlo samples: it fits a
//! surrogate to the samples with K-fold cross-validation, uses the held-out
//! predictions as a control variate, and corrects the plain sample mean
//! without drawing any new samples of the integrand.
//!
//! The crate is organised bottom-up:
//!
//! * [`domain`]: points, data sets, distributions, fold partitions, RNG streams
//!   and the small set of statistics the estimators need.
//! * [`samplers`]: simple sampling, Latin hypercube, scrambled Halton and
//!   importance sampling.
//! * [`fitters`]: least-squares surrogates (linear, per-dimension cubic,
//!   Fourier, Walsh) with analytic or sampled means.
//! * [`engine`]: the StackMC estimators themselves.
//! * [`testfunctions`]: benchmark integrands with reference means.
//! * [`harness`]: repeated-trial experiments, presets and result emission.

pub mod domain;
pub mod engine;
pub mod error;
pub mod fitters;
pub mod harness;
pub mod samplers;
pub mod testfunctions;

pub use crate::domain::{
    DataSet, Distribution, FoldPartition, MomentTable, Point, RngStream, CoordinateLaw,
};
pub use crate::engine::{AlphaMethod, EstimateReport, FoldResult, FoldStatistic, MeanMode};
pub use crate::error::{Error, Result};
pub use crate::fitters::{FitModel, FitterKind, FitterSpec, FourierFrequencies};
pub use crate::samplers::SamplerSpec;
pub use crate::testfunctions::TestFunction;
