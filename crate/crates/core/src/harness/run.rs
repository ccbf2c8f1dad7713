//! Repeated paired trials over a grid of sample sizes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::stats::{mean, mean_and_stderr};
use crate::domain::{DataSet, Distribution, FoldPartition, RngStream};
use crate::engine::{self, AlphaMethod, FoldResult, MeanMode};
use crate::error::{Error, Result};

use super::config::{ExperimentConfig, Variant};

/// Aggregated squared error of one estimator at one sample size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub n: usize,
    pub estimator: String,
    pub mse: f64,
    pub stderr: f64,
    pub trials: usize,
}

impl ResultRow {
    /// A single trial has no spread; its stderr is reported as 0.
    pub fn stderr_is_degenerate(&self) -> bool {
        self.trials < 2
    }
}

/// Mean and standard error of the per-trial difference of squared errors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairedDiff {
    pub mean: f64,
    pub stderr: f64,
}

impl PairedDiff {
    /// `a` is worse than `b` by more than `z` standard errors.
    pub fn worse_by(&self, z: f64) -> bool {
        self.mean > z * self.stderr
    }

    /// `a` is better than `b` by more than `z` standard errors.
    pub fn better_by(&self, z: f64) -> bool {
        -self.mean > z * self.stderr
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub reference: f64,
    pub estimators: Vec<String>,
    pub rows: Vec<ResultRow>,
    /// `sq[grid index][estimator index][trial]`.
    sq: Vec<Vec<Vec<f64>>>,
}

impl ExperimentResult {
    fn grid_index(&self, n: usize) -> Option<usize> {
        self.config.n_grid.iter().position(|&m| m == n)
    }

    fn estimator_index(&self, name: &str) -> Option<usize> {
        self.estimators.iter().position(|e| e == name)
    }

    /// Per-trial squared errors of `estimator` at sample size `n`.
    pub fn squared_errors(&self, n: usize, estimator: &str) -> Option<&[f64]> {
        let g = self.grid_index(n)?;
        let e = self.estimator_index(estimator)?;
        Some(&self.sq[g][e])
    }

    pub fn row(&self, n: usize, estimator: &str) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.n == n && r.estimator == estimator)
    }

    pub fn mse(&self, n: usize, estimator: &str) -> Option<f64> {
        self.row(n, estimator).map(|r| r.mse)
    }

    /// Paired comparison `a - b` of squared errors at `n`.
    pub fn paired(&self, n: usize, a: &str, b: &str) -> Option<PairedDiff> {
        let sa = self.squared_errors(n, a)?;
        let sb = self.squared_errors(n, b)?;
        let d: Vec<f64> = sa.iter().zip(sb).map(|(x, y)| x - y).collect();
        let (mean, stderr) = mean_and_stderr(&d);
        Some(PairedDiff { mean, stderr })
    }

    /// Paired comparison of `a` against `scale * b`.
    pub fn paired_scaled(&self, n: usize, a: &str, b: &str, scale: f64) -> Option<PairedDiff> {
        let sa = self.squared_errors(n, a)?;
        let sb = self.squared_errors(n, b)?;
        let d: Vec<f64> = sa.iter().zip(sb).map(|(x, y)| x - scale * y).collect();
        let (mean, stderr) = mean_and_stderr(&d);
        Some(PairedDiff { mean, stderr })
    }
}

/// Estimator names reported by an experiment, in output order.
pub fn estimator_names(cfg: &ExperimentConfig) -> Vec<String> {
    let mut names = vec!["mc".to_string()];
    if cfg.fitters.len() == 1 {
        names.push("fit_alone".into());
    } else {
        names.extend(cfg.fitters.iter().map(|f| format!("fit_alone:{}", f.label())));
    }
    names.push("stackmc".into());
    names.extend(cfg.alpha[1..].iter().map(|a| format!("stackmc@{}", a.label())));
    if cfg.fitters.len() > 1 && cfg.single_fits {
        names.extend(cfg.fitters.iter().map(|f| format!("stackmc:{}", f.label())));
    }
    if let Variant::Quasimc { .. } = cfg.variant {
        names.push("stackmc_boot".into());
    }
    names
}

/// Stream id of trial `trial` at sample size `n`.
pub fn stream_id(n: usize, trial: usize) -> u64 {
    ((n as u64) << 32) | trial as u64
}

// FNV-1a, so per-estimator streams depend only on the estimator's name
fn name_key(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

struct Trial<'a> {
    cfg: &'a ExperimentConfig,
    n: usize,
    stream: u64,
    mean_p: &'a Distribution,
    mode: MeanMode,
}

impl Trial<'_> {
    fn rng_for(&self, role: &str) -> RngStream {
        RngStream::substream(self.cfg.seed ^ name_key(role), self.stream)
    }

    fn run(&self) -> Result<Vec<f64>> {
        let cfg = self.cfg;
        let mut rng = RngStream::substream(cfg.seed, self.stream);
        let (points, weights) = cfg.sampler.draw(&cfg.distribution, self.n, &mut rng)?;
        let values = points
            .iter()
            .map(|x| cfg.function.evaluate(x))
            .collect::<Result<Vec<_>>>()?;
        let raw = match weights {
            Some(w) => DataSet::with_weights(points, values, w)?,
            None => DataSet::new(points, values)?,
        };
        // the estimators all work on the targets f p/q (p/q = 1 without weights)
        let data = DataSet::new(raw.points().to_vec(), raw.weighted_values())?;
        let k = cfg.folds.for_n(self.n);
        let partition = FoldPartition::shuffled(self.n, k, &mut rng)?;

        let mut out = vec![mean(data.values())?];
        for f in &cfg.fitters {
            let mut r = self.rng_for(&format!("fit_alone:{}", f.label()));
            out.push(engine::fit_alone(&data, f, self.mean_p, self.mode, &mut r)?);
        }
        let folds: Vec<Vec<FoldResult>> = cfg
            .fitters
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let mut r = self.rng_for(&format!("folds:{i}:{}", f.label()));
                engine::run_folds(&data, &partition, f, self.mean_p, self.mode, &mut r)
            })
            .collect::<Result<_>>()?;
        for &method in &cfg.alpha {
            out.push(engine::estimate_from_folds(&folds, method)?.0);
        }
        if cfg.fitters.len() > 1 && cfg.single_fits {
            for single in &folds {
                let (est, _) =
                    engine::estimate_from_folds(std::slice::from_ref(single), cfg.alpha[0])?;
                out.push(est);
            }
        }
        if let Variant::Quasimc { n_repeats } = cfg.variant {
            let mut r = self.rng_for("stackmc_boot");
            let rep = engine::stackmc_quasimc(
                &data,
                k,
                &cfg.fitters,
                self.mean_p,
                n_repeats,
                &mut r,
                self.mode,
                cfg.alpha[0],
            )?;
            out.push(rep.estimate);
        }
        Ok(out)
    }
}

/// Run every trial of every sample size and aggregate squared errors.
///
/// Trials run on a pool of `threads` workers (all cores when `None` or 0);
/// the result does not depend on the thread count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let reference = cfg.function.reference_mean(&cfg.distribution)?;
    let estimators = estimator_names(cfg);
    let mean_p = cfg.mean_distribution();
    let mode = cfg.effective_mean_mode();

    let jobs: Vec<(usize, usize)> = cfg
        .n_grid
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |t| (n, t)))
        .collect();
    let run_job = |&(n, trial): &(usize, usize)| -> Result<Vec<f64>> {
        let stream = stream_id(n, trial);
        let t = Trial {
            cfg,
            n,
            stream,
            mean_p,
            mode,
        };
        t.run()
            .and_then(|est| match est.iter().position(|v| !v.is_finite()) {
                Some(i) => Err(Error::Fit(format!(
                    "estimator {} produced {}",
                    estimators[i], est[i]
                ))),
                None => Ok(est),
            })
            .map_err(|source| Error::Trial {
                trial,
                n,
                stream,
                source: Box::new(source),
            })
    };
    let threads = cfg.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Unsupported(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<Result<Vec<f64>>> = pool.install(|| jobs.par_iter().map(run_job).collect());

    let ne = estimators.len();
    let mut sq = vec![vec![Vec::with_capacity(cfg.trials); ne]; cfg.n_grid.len()];
    for (job, outcome) in jobs.iter().zip(outcomes) {
        let est = outcome?;
        let g = cfg.n_grid.iter().position(|&m| m == job.0).unwrap_or(0);
        for (e, v) in est.iter().enumerate() {
            sq[g][e].push((v - reference).powi(2));
        }
    }
    let mut rows = Vec::with_capacity(cfg.n_grid.len() * ne);
    for (g, &n) in cfg.n_grid.iter().enumerate() {
        for (e, name) in estimators.iter().enumerate() {
            let (mse, stderr) = mean_and_stderr(&sq[g][e]);
            rows.push(ResultRow {
                n,
                estimator: name.clone(),
                mse,
                stderr,
                trials: cfg.trials,
            });
        }
    }
    Ok(ExperimentResult {
        config: cfg.clone(),
        reference,
        estimators,
        rows,
        sq,
    })
}

/// Label of an alpha method as it appears in estimator names.
pub fn alpha_estimator_name(cfg: &ExperimentConfig, method: &AlphaMethod) -> Option<String> {
    let i = cfg.alpha.iter().position(|a| a == method)?;
    Some(if i == 0 {
        "stackmc".to_string()
    } else {
        format!("stackmc@{}", method.label())
    })
}
