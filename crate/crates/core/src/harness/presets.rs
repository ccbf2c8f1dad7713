//! Desk-scale versions of the six reference experiments.

use crate::domain::Distribution;
use crate::engine::{AlphaMethod, FoldStatistic, MeanMode, DEFAULT_REPEATS};
use crate::error::{Error, Result};
use crate::fitters::{FitterKind, FitterSpec, FourierFrequencies, DEFAULT_MC_MEAN_SAMPLES};
use crate::samplers::SamplerSpec;
use crate::testfunctions::TestFunction;

use super::config::{ExperimentConfig, Folds, OutputSpec, Variant};

pub const PRESET_NAMES: [&str; 6] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6"];

pub const DEFAULT_SEED: u64 = 20_160_205;

/// One-line description of each preset, in [`PRESET_NAMES`] order.
pub const PRESET_SUMMARIES: [&str; 6] = [
    "quadratic on U[0,1], linear fit, leave-one-out; improved vs original alpha",
    "10-D Rosenbrock on [-3,3]^10, cubic and Fourier fits, 5 folds",
    "10-D Rosenbrock, Latin hypercube on [-3,3]^10, cubic fit; bootstrap repair",
    "10-D Rosenbrock, scrambled Halton under N(0, 2^2), cubic fit; bootstrap repair",
    "10-D Rosenbrock, importance sampling from a quadratic proposal, cubic fit",
    "Four Peaks on 16 bits (T = 2), second-order Walsh fit, 5 folds",
];

fn rosenbrock_box() -> (TestFunction, Distribution) {
    (
        TestFunction::Rosenbrock { dim: 10 },
        Distribution::UniformBox {
            lo: vec![-3.0; 10],
            hi: vec![3.0; 10],
        },
    )
}

fn base(name: &str, function: TestFunction, distribution: Distribution) -> ExperimentConfig {
    ExperimentConfig {
        name: name.to_string(),
        n_grid: Vec::new(),
        trials: 300,
        seed: DEFAULT_SEED,
        threads: None,
        folds: Folds::Fixed(5),
        single_fits: false,
        function,
        distribution,
        sampler: SamplerSpec::Simple,
        variant: Variant::Plain,
        mean_mode: MeanMode::Analytic,
        fitters: vec![FitterSpec::poly3()],
        alpha: vec![AlphaMethod::default()],
        output: OutputSpec::default(),
    }
}

/// The configuration of a named preset.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let cfg = match name {
        "fig1" => {
            let mut c = base(
                name,
                TestFunction::Quadratic1d,
                Distribution::UniformBox {
                    lo: vec![0.0],
                    hi: vec![1.0],
                },
            );
            c.n_grid = vec![4, 5, 6, 8, 12, 16, 24, 32];
            c.trials = 20_000;
            c.folds = Folds::LeaveOneOut;
            c.fitters = vec![FitterSpec::linear()];
            c.alpha = vec![
                AlphaMethod::default(),
                AlphaMethod::Original,
                AlphaMethod::Improved {
                    assume_unbiased_g: true,
                    statistic: FoldStatistic::default(),
                },
            ];
            c
        }
        "fig2" => {
            let (f, p) = rosenbrock_box();
            let mut c = base(name, f, p);
            c.n_grid = vec![40, 80, 160, 320, 640];
            // the basis exactly as printed: cos(j u - pi), sin(j u - pi), j = 1..6
            let fourier = FitterSpec::new(FitterKind::Fourier {
                harmonics: 6,
                frequencies: FourierFrequencies::Literal,
            });
            c.fitters = vec![FitterSpec::poly3(), fourier];
            c.single_fits = true;
            c
        }
        "fig3" => {
            let (f, p) = rosenbrock_box();
            let mut c = base(name, f, p);
            c.n_grid = vec![40, 160, 640];
            c.sampler = SamplerSpec::LatinHypercube;
            c.variant = Variant::Quasimc {
                n_repeats: DEFAULT_REPEATS,
            };
            c
        }
        "fig4" => {
            let mut c = base(
                name,
                TestFunction::Rosenbrock { dim: 10 },
                Distribution::GaussianIid {
                    mu: 0.0,
                    sigma: 2.0,
                    dim: 10,
                },
            );
            c.n_grid = vec![40, 160, 640];
            c.sampler = SamplerSpec::Halton {
                scramble: true,
                burn_in: None,
            };
            c.variant = Variant::Quasimc {
                n_repeats: DEFAULT_REPEATS,
            };
            c
        }
        "fig5" => {
            let (f, p) = rosenbrock_box();
            let mut c = base(name, f, p);
            c.n_grid = vec![80, 160, 320];
            c.sampler = SamplerSpec::Importance {
                q: Distribution::ProductQuadratic {
                    lo: vec![-3.0; 10],
                    hi: vec![3.0; 10],
                },
            };
            c.variant = Variant::Importance {
                n_mean: DEFAULT_MC_MEAN_SAMPLES,
            };
            c
        }
        "fig6" => {
            let mut c = base(
                name,
                TestFunction::FourPeaks { dim: 16, t: Some(2) },
                Distribution::UniformBits { dim: 16 },
            );
            c.n_grid = vec![50, 100, 200, 400];
            c.trials = 500;
            c.fitters = vec![FitterSpec::walsh(2)];
            c
        }
        other => {
            return Err(Error::UnknownPreset {
                name: other.to_string(),
                valid: PRESET_NAMES.to_vec(),
            })
        }
    };
    Ok(cfg)
}
