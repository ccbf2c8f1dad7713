//! StackMC estimators.
//!
//! Every estimator follows the same pipeline: fit each fitter once per fold
//! on the fold's held-in points, record its mean `ghat_k` and its
//! predictions at the held-out points, pick one global coefficient vector
//! `alpha`, and combine
//!
//! ```text
//! estimate = (1/K) sum_k [ sum_i alpha_i ghat_k^(i)
//!                          + (1/m_k) sum_{j in fold k} (f_j - sum_i alpha_i g_k^(i)(x_j)) ]
//! ```
//!
//! The variants differ only in the targets (`f` or `f p/q`), in how `ghat_k`
//! is computed (closed form or sampled), in the held-in sets (complement or
//! bootstrap without replacement), and in how `alpha` is estimated.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::domain::stats::{mean, sample_cov};
use crate::domain::{DataSet, Distribution, FoldPartition, Point, RngStream};
use crate::error::{Error, Result};
use crate::fitters::{self, FitModel, FitterSpec, DEFAULT_MC_MEAN_SAMPLES};

/// Eigenvalues of `W` below this fraction of the largest are dropped.
pub const W_EIGEN_CUTOFF: f64 = 1e-10;

/// A control variate whose spread is below this fraction of the target's
/// spread is treated as uninformative and gets `alpha = 0`.
pub const DEGENERATE_RATIO: f64 = 1e-12;

/// Default number of partition/bootstrap repeats for quasi-MC data.
pub const DEFAULT_REPEATS: usize = 10;

/// How each fold's fit mean `ghat_k` is obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum MeanMode {
    #[default]
    Analytic,
    MonteCarlo { n_mean: usize },
}


impl MeanMode {
    pub fn monte_carlo_default() -> Self {
        MeanMode::MonteCarlo {
            n_mean: DEFAULT_MC_MEAN_SAMPLES,
        }
    }
}

/// Which samples feed the per-fold means `gtilde_k`, `ftilde_k` of the
/// improved alpha estimator.
///
/// `HeldOut` averages the fold fit's predictions and the true values over the
/// fold's own held-out points; with `K = N` these are the single held-out
/// pair. `HeldIn` averages the fold fit's predictions and the true values over
/// the points the fold was trained on. `HeldOutPoints` skips the per-fold
/// averaging and uses one sample per held-out point,
/// `a_j = g_k(x_j) - ghat_k` and `c_j = f_j`, which gives N samples instead
/// of K; with `K = N` it coincides with `HeldOut`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FoldStatistic {
    HeldOut,
    HeldIn,
    #[default]
    HeldOutPoints,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum AlphaMethod {
    /// `cov(g, f) / var(g)` over all held-out predictions.
    Original,
    /// `cov(a, c) / (var(a) + b_g^2)` over folds, where
    /// `a_k = gtilde_k - ghat_k`, `c_k = ftilde_k` and `b_g = mean(a)`.
    Improved {
        #[serde(default)]
        assume_unbiased_g: bool,
        #[serde(default)]
        statistic: FoldStatistic,
    },
    /// A fixed coefficient applied to every fitter.
    Fixed { value: f64 },
}

impl Default for AlphaMethod {
    fn default() -> Self {
        AlphaMethod::Improved {
            assume_unbiased_g: false,
            statistic: FoldStatistic::default(),
        }
    }
}

impl AlphaMethod {
    pub fn label(&self) -> String {
        match self {
            AlphaMethod::Original => "original".into(),
            AlphaMethod::Improved {
                assume_unbiased_g,
                statistic,
            } => {
                let mut s = String::from("improved");
                match statistic {
                    FoldStatistic::HeldOutPoints => {}
                    FoldStatistic::HeldOut => s.push_str("_folds"),
                    FoldStatistic::HeldIn => s.push_str("_heldin"),
                }
                if *assume_unbiased_g {
                    s.push_str("_unbiased");
                }
                s
            }
            AlphaMethod::Fixed { value } => format!("fixed_{value}"),
        }
    }
}

/// One fold of one fitter.
#[derive(Clone, Debug, PartialEq)]
pub struct FoldResult {
    pub fold: usize,
    /// Mean of the fold fit under the target (or proposal) distribution.
    pub ghat: f64,
    /// Held-out indices, in the order of `heldout_g` / `heldout_f`.
    pub heldout: Vec<usize>,
    pub heldout_g: Vec<f64>,
    pub heldout_f: Vec<f64>,
    /// Mean of the fold fit's predictions over its held-in points.
    pub heldin_gtilde: f64,
    /// Mean of the targets over the held-in points.
    pub heldin_ftilde: f64,
}

impl FoldResult {
    pub fn m(&self) -> usize {
        self.heldout.len()
    }

    pub fn heldout_gtilde(&self) -> f64 {
        self.heldout_g.iter().sum::<f64>() / self.m() as f64
    }

    pub fn heldout_ftilde(&self) -> f64 {
        self.heldout_f.iter().sum::<f64>() / self.m() as f64
    }

    /// `(a, c)` samples of this fold for the improved alpha.
    fn alpha_samples(&self, which: FoldStatistic, a: &mut Vec<f64>, c: &mut Vec<f64>) {
        match which {
            FoldStatistic::HeldOut => {
                a.push(self.heldout_gtilde() - self.ghat);
                c.push(self.heldout_ftilde());
            }
            FoldStatistic::HeldIn => {
                a.push(self.heldin_gtilde - self.ghat);
                c.push(self.heldin_ftilde);
            }
            FoldStatistic::HeldOutPoints => {
                a.extend(self.heldout_g.iter().map(|g| g - self.ghat));
                c.extend_from_slice(&self.heldout_f);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub estimate: f64,
    /// One coefficient per fitter (averaged over repeats for bootstrap runs).
    pub alpha: Vec<f64>,
    /// `folds[i][k]`: fitter `i`, fold `k` (first repeat for bootstrap runs).
    pub folds: Vec<Vec<FoldResult>>,
    pub method: String,
    /// Plain sample mean of the targets.
    pub mc_baseline: f64,
    /// Mean of a fit trained on all samples, when requested.
    pub fit_alone: Option<f64>,
    /// Per-repeat estimates of the bootstrap variant.
    pub repeat_estimates: Vec<f64>,
}

/// Samples in the form the fold machinery consumes.
struct Targets<'a> {
    points: &'a [Point],
    y: &'a [f64],
}

fn check_partition(n: usize, partition: &FoldPartition) -> Result<()> {
    if partition.n() != n {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} indices but the data set has {n}",
            partition.n()
        )));
    }
    Ok(())
}

fn fit_mean(
    model: &FitModel,
    p: &Distribution,
    mode: MeanMode,
    rng: &mut RngStream,
) -> Result<f64> {
    match mode {
        MeanMode::Analytic => fitters::analytic_mean(model, p),
        MeanMode::MonteCarlo { n_mean } => fitters::mc_mean(model, p, n_mean, rng),
    }
}

fn run_folds_on(
    t: &Targets<'_>,
    partition: &FoldPartition,
    spec: &FitterSpec,
    p: &Distribution,
    mode: MeanMode,
    rng: &mut RngStream,
) -> Result<Vec<FoldResult>> {
    check_partition(t.points.len(), partition)?;
    let spec = spec.bound_to(p);
    (0..partition.k())
        .map(|k| {
            let wrap = |e: Error| Error::Fold {
                fold: k,
                source: Box::new(e),
            };
            let heldin = partition.heldin(k);
            let heldout = partition.heldout(k);
            let x_in: Vec<Point> = heldin.iter().map(|&i| t.points[i].clone()).collect();
            let y_in: Vec<f64> = heldin.iter().map(|&i| t.y[i]).collect();
            let model = fitters::train(&spec, &x_in, &y_in).map_err(wrap)?;
            let mut fold_rng = rng.fork(k as u64);
            let ghat = fit_mean(&model, p, mode, &mut fold_rng).map_err(wrap)?;
            let g_in = model.eval_many(&x_in);
            Ok(FoldResult {
                fold: k,
                ghat,
                heldout: heldout.to_vec(),
                heldout_g: model.eval_many(heldout.iter().map(|&i| &t.points[i])),
                heldout_f: heldout.iter().map(|&i| t.y[i]).collect(),
                heldin_gtilde: g_in.iter().sum::<f64>() / g_in.len() as f64,
                heldin_ftilde: y_in.iter().sum::<f64>() / y_in.len() as f64,
            })
        })
        .collect()
}

/// Train `spec` on every fold's held-in points and record its held-out
/// behaviour. `p` is the distribution `ghat_k` is taken under.
pub fn run_folds(
    data: &DataSet,
    partition: &FoldPartition,
    spec: &FitterSpec,
    p: &Distribution,
    mode: MeanMode,
    rng: &mut RngStream,
) -> Result<Vec<FoldResult>> {
    let t = Targets {
        points: data.points(),
        y: data.values(),
    };
    run_folds_on(&t, partition, spec, p, mode, rng)
}

/// Solve `W alpha = u` by eigen-decomposition pseudo-inverse, where
/// `W_ij = cov(a_i, a_j) + b_i b_j` and `u_i = cov(a_i, c)`.
///
/// Returns all zeros when `W` carries no signal relative to `var(c)`.
fn solve_alpha(a: &[Vec<f64>], c: &[f64], bias: Option<&[f64]>) -> Result<Vec<f64>> {
    let nf = a.len();
    let mut w = DMatrix::zeros(nf, nf);
    let mut u = DVector::zeros(nf);
    for i in 0..nf {
        u[i] = sample_cov(&a[i], c)?;
        for j in 0..=i {
            let mut v = sample_cov(&a[i], &a[j])?;
            if let Some(b) = bias {
                v += b[i] * b[j];
            }
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    let var_c = sample_cov(c, c)?;
    if nf == 1 {
        // scalar path, kept free of eigen-solver rounding
        if w[(0, 0)] <= DEGENERATE_RATIO * var_c || w[(0, 0)] <= 0.0 {
            return Ok(vec![0.0]);
        }
        return Ok(vec![u[0] / w[(0, 0)]]);
    }
    let eig = SymmetricEigen::new(w);
    let lmax = eig.eigenvalues.max();
    if lmax.is_nan() || lmax <= DEGENERATE_RATIO * var_c || lmax <= 0.0 {
        return Ok(vec![0.0; nf]);
    }
    let cutoff = W_EIGEN_CUTOFF * lmax;
    let mut alpha = DVector::zeros(nf);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > cutoff {
            let v = eig.eigenvectors.column(k);
            alpha += v * (v.dot(&u) / lambda);
        }
    }
    Ok(alpha.iter().copied().collect())
}

/// `cov(g, f) / var(g)`; zero when `var(g) <= 1e-12 var(f)`.
pub fn alpha_original(g: &[f64], f: &[f64]) -> Result<f64> {
    Ok(solve_alpha(&[g.to_vec()], f, None)?[0])
}

/// Improved alpha with the default [`FoldStatistic`].
pub fn alpha_improved(folds: &[FoldResult], assume_unbiased_g: bool) -> Result<f64> {
    alpha_improved_with(folds, assume_unbiased_g, FoldStatistic::default())
}

pub fn alpha_improved_with(
    folds: &[FoldResult],
    assume_unbiased_g: bool,
    statistic: FoldStatistic,
) -> Result<f64> {
    Ok(alpha_multi(&[folds.to_vec()], assume_unbiased_g, statistic)?[0])
}

/// `alpha = W^+ u` over fitters, from per-fold statistics.
fn alpha_multi(
    folds: &[Vec<FoldResult>],
    assume_unbiased_g: bool,
    statistic: FoldStatistic,
) -> Result<Vec<f64>> {
    let mut a = Vec::with_capacity(folds.len());
    let mut c = Vec::new();
    for (i, fr) in folds.iter().enumerate() {
        let mut ai = Vec::new();
        let mut ci = Vec::new();
        for r in fr {
            r.alpha_samples(statistic, &mut ai, &mut ci);
        }
        a.push(ai);
        if i == 0 {
            c = ci;
        }
    }
    let bias: Vec<f64> = if assume_unbiased_g {
        vec![0.0; a.len()]
    } else {
        a.iter().map(|ai| mean(ai)).collect::<Result<_>>()?
    };
    solve_alpha(&a, &c, Some(&bias))
}

fn choose_alpha(folds: &[Vec<FoldResult>], method: AlphaMethod) -> Result<Vec<f64>> {
    match method {
        AlphaMethod::Fixed { value } => Ok(vec![value; folds.len()]),
        AlphaMethod::Original => {
            let g: Vec<Vec<f64>> = folds
                .iter()
                .map(|fr| fr.iter().flat_map(|r| r.heldout_g.iter().copied()).collect())
                .collect();
            let f: Vec<f64> = folds[0]
                .iter()
                .flat_map(|r| r.heldout_f.iter().copied())
                .collect();
            solve_alpha(&g, &f, None)
        }
        AlphaMethod::Improved {
            assume_unbiased_g,
            statistic,
        } => alpha_multi(folds, assume_unbiased_g, statistic),
    }
}

/// Fold-averaged corrected estimate for a given alpha.
pub fn combine(folds: &[Vec<FoldResult>], alpha: &[f64]) -> f64 {
    let k = folds[0].len();
    let mut total = 0.0;
    for fold in 0..k {
        let base = &folds[0][fold];
        let mut control = 0.0;
        let mut resid = 0.0;
        for (i, fr) in folds.iter().enumerate() {
            control += alpha[i] * fr[fold].ghat;
        }
        for j in 0..base.m() {
            let g: f64 = folds
                .iter()
                .enumerate()
                .map(|(i, fr)| alpha[i] * fr[fold].heldout_g[j])
                .sum();
            resid += base.heldout_f[j] - g;
        }
        total += control + resid / base.m() as f64;
    }
    total / k as f64
}

/// Alpha and estimate from already computed fold results (one inner vector
/// per fitter, all over the same partition).
pub fn estimate_from_folds(
    folds: &[Vec<FoldResult>],
    method: AlphaMethod,
) -> Result<(f64, Vec<f64>)> {
    if folds.is_empty() || folds[0].len() < 2 {
        return Err(Error::InvalidPartition("need at least one fitter and two folds".into()));
    }
    let alpha = choose_alpha(folds, method)?;
    if let Some(bad) = alpha.iter().find(|a| !a.is_finite()) {
        return Err(Error::Fit(format!("alpha is not finite ({bad})")));
    }
    let est = combine(folds, &alpha);
    Ok((est, alpha))
}

#[allow(clippy::too_many_arguments)]
fn stackmc_on(
    t: &Targets<'_>,
    partition: &FoldPartition,
    specs: &[FitterSpec],
    p: &Distribution,
    method: AlphaMethod,
    mode: MeanMode,
    rng: &mut RngStream,
    tag: &str,
) -> Result<EstimateReport> {
    if specs.is_empty() {
        return Err(Error::InvalidData("need at least one fitter".into()));
    }
    let folds = specs
        .iter()
        .map(|s| run_folds_on(t, partition, s, p, mode, rng))
        .collect::<Result<Vec<_>>>()?;
    let (estimate, alpha) = estimate_from_folds(&folds, method)?;
    Ok(EstimateReport {
        estimate,
        alpha,
        folds,
        method: format!("{tag}/{}", method.label()),
        mc_baseline: mean(t.y)?,
        fit_alone: None,
        repeat_estimates: Vec::new(),
    })
}

/// StackMC with a single fitter.
pub fn stackmc_estimate(
    data: &DataSet,
    partition: &FoldPartition,
    spec: &FitterSpec,
    p: &Distribution,
    method: AlphaMethod,
    mode: MeanMode,
    rng: &mut RngStream,
) -> Result<EstimateReport> {
    let t = Targets {
        points: data.points(),
        y: data.values(),
    };
    stackmc_on(&t, partition, std::slice::from_ref(spec), p, method, mode, rng, "stackmc")
}

/// StackMC combining several fitters through `alpha = W^+ u`.
#[allow(clippy::too_many_arguments)]
pub fn stackmc_multi(
    data: &DataSet,
    partition: &FoldPartition,
    specs: &[FitterSpec],
    p: &Distribution,
    mode: MeanMode,
    assume_unbiased_g: bool,
    statistic: FoldStatistic,
    rng: &mut RngStream,
) -> Result<EstimateReport> {
    let t = Targets {
        points: data.points(),
        y: data.values(),
    };
    let method = AlphaMethod::Improved {
        assume_unbiased_g,
        statistic,
    };
    stackmc_on(&t, partition, specs, p, method, mode, rng, "stackmc_multi")
}

/// StackMC for correlated (quasi-MC) samples: every repeat draws a fresh
/// K-fold partition and replaces each held-in set by a random subset of all
/// N samples of the same size; the result is the mean over repeats.
#[allow(clippy::too_many_arguments)]
pub fn stackmc_quasimc(
    data: &DataSet,
    k: usize,
    specs: &[FitterSpec],
    p: &Distribution,
    n_repeats: usize,
    rng: &mut RngStream,
    mode: MeanMode,
    method: AlphaMethod,
) -> Result<EstimateReport> {
    if n_repeats == 0 {
        return Err(Error::InvalidData("need at least one repeat".into()));
    }
    let t = Targets {
        points: data.points(),
        y: data.values(),
    };
    let mut estimates = Vec::with_capacity(n_repeats);
    let mut alpha_sum = vec![0.0; specs.len()];
    let mut first_folds = None;
    for _ in 0..n_repeats {
        let partition = FoldPartition::shuffled(data.len(), k, rng)?.bootstrap_heldin(rng);
        let r = stackmc_on(&t, &partition, specs, p, method, mode, rng, "stackmc_boot")?;
        estimates.push(r.estimate);
        for (s, a) in alpha_sum.iter_mut().zip(&r.alpha) {
            *s += a;
        }
        first_folds.get_or_insert(r.folds);
    }
    Ok(EstimateReport {
        estimate: mean(&estimates)?,
        alpha: alpha_sum.iter().map(|s| s / n_repeats as f64).collect(),
        folds: first_folds.unwrap_or_default(),
        method: format!("stackmc_boot/{}", method.label()),
        mc_baseline: mean(t.y)?,
        fit_alone: None,
        repeat_estimates: estimates,
    })
}

/// StackMC on importance-sampled data: fits target `f p/q`, fold means are
/// sampled under `q` with `n_mean` draws.
#[allow(clippy::too_many_arguments)]
pub fn stackmc_importance(
    data: &DataSet,
    partition: &FoldPartition,
    specs: &[FitterSpec],
    q: &Distribution,
    n_mean: usize,
    rng: &mut RngStream,
    method: AlphaMethod,
) -> Result<EstimateReport> {
    if data.weights().is_none() {
        return Err(Error::InvalidData(
            "importance-sampled StackMC needs importance weights".into(),
        ));
    }
    let y = data.weighted_values();
    let t = Targets {
        points: data.points(),
        y: &y,
    };
    stackmc_on(
        &t,
        partition,
        specs,
        q,
        method,
        MeanMode::MonteCarlo { n_mean },
        rng,
        "stackmc_is",
    )
}

/// Mean of a single fit trained on all samples (targets weighted when the
/// data carry importance weights; `p` is then the proposal).
pub fn fit_alone(
    data: &DataSet,
    spec: &FitterSpec,
    p: &Distribution,
    mode: MeanMode,
    rng: &mut RngStream,
) -> Result<f64> {
    let y = data.weighted_values();
    let model = fitters::train(&spec.bound_to(p), data.points(), &y)?;
    fit_mean(&model, p, mode, rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_data(xs: &[f64], f: impl Fn(f64) -> f64) -> DataSet {
        let points = xs.iter().map(|&x| Point::new(vec![x]).unwrap()).collect();
        DataSet::new(points, xs.iter().map(|&x| f(x)).collect()).unwrap()
    }

    fn unit() -> Distribution {
        Distribution::uniform_box(vec![0.0], vec![1.0]).unwrap()
    }

    fn uniform_xs(n: usize, seed: u64) -> Vec<f64> {
        let mut r = RngStream::new(seed);
        (0..n).map(|_| r.uniform()).collect()
    }

    fn synthetic_fold(fold: usize, ghat: f64, g: &[f64], f: &[f64]) -> FoldResult {
        FoldResult {
            fold,
            ghat,
            heldout: (0..g.len()).map(|j| fold * g.len() + j).collect(),
            heldout_g: g.to_vec(),
            heldout_f: f.to_vec(),
            heldin_gtilde: 0.0,
            heldin_ftilde: 0.0,
        }
    }

    #[test]
    fn alpha_original_hand_values() {
        let f = [1.0, 2.0, 3.0];
        assert!((alpha_original(&f, &f).unwrap() - 1.0).abs() < 1e-15);
        let g: Vec<f64> = f.iter().map(|v| -2.0 * v).collect();
        assert!((alpha_original(&g, &f).unwrap() + 0.5).abs() < 1e-15);
        let a = alpha_original(&[2.0, 4.0, 7.0], &f).unwrap();
        assert!((a - 15.0 / 38.0).abs() < 1e-15);
        assert_eq!(alpha_original(&[1.0, 1.0, 1.0], &f).unwrap(), 0.0);
        assert_eq!(alpha_original(&[1.0, 1.0], &[2.0, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn alpha_improved_hand_value() {
        // a = gtilde - ghat = [1,2,3], c = [2,4,6]: cov 2, var 1, b_g 2
        let folds: Vec<FoldResult> = [1.0, 2.0, 3.0]
            .iter()
            .zip([2.0, 4.0, 6.0])
            .enumerate()
            .map(|(k, (&a, c))| synthetic_fold(k, 0.5, &[a + 0.5], &[c]))
            .collect();
        let alpha = alpha_improved(&folds, false).unwrap();
        assert!((alpha - 0.4).abs() < 1e-15);
        assert!((alpha_improved(&folds, true).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn alpha_improved_degenerate_is_zero() {
        let folds: Vec<FoldResult> = (0..4)
            .map(|k| synthetic_fold(k, 1.0, &[3.0], &[k as f64]))
            .collect();
        assert_eq!(alpha_improved(&folds, true).unwrap(), 0.0);
    }

    #[test]
    fn improved_matches_original_under_leave_one_out_with_constant_ghat() {
        let g = [0.3, 1.2, -0.4, 2.2, 0.9, 1.7];
        let f = [0.1, 1.5, -0.2, 2.5, 0.4, 1.9];
        let folds: Vec<FoldResult> = (0..6)
            .map(|k| synthetic_fold(k, 0.77, &[g[k]], &[f[k]]))
            .collect();
        let orig = alpha_original(&g, &f).unwrap();
        let imp = alpha_improved(&folds, true).unwrap();
        assert!((orig - imp).abs() < 1e-13, "{orig} vs {imp}");
    }

    #[test]
    fn constant_data_recovers_constant() {
        let data = line_data(&uniform_xs(20, 1), |_| 4.25);
        let part = FoldPartition::contiguous(20, 5).unwrap();
        let folds = run_folds(&data, &part, &FitterSpec::poly3(), &unit(), MeanMode::Analytic, &mut RngStream::new(0)).unwrap();
        for r in &folds {
            assert!((r.ghat - 4.25).abs() < 1e-12);
            assert!(r.heldout_g.iter().all(|g| (g - 4.25).abs() < 1e-12));
        }
        for method in [AlphaMethod::Original, AlphaMethod::default(), AlphaMethod::Fixed { value: 0.3 }] {
            let r = stackmc_estimate(&data, &part, &FitterSpec::poly3(), &unit(), method, MeanMode::Analytic, &mut RngStream::new(0)).unwrap();
            assert!((r.estimate - 4.25).abs() < 1e-12);
        }
    }

    #[test]
    fn leave_one_out_has_singleton_folds() {
        let data = line_data(&uniform_xs(7, 2), |x| x * x);
        let part = FoldPartition::leave_one_out(7).unwrap();
        let folds = run_folds(&data, &part, &FitterSpec::linear(), &unit(), MeanMode::Analytic, &mut RngStream::new(0)).unwrap();
        assert_eq!(folds.len(), 7);
        assert!(folds.iter().all(|r| r.heldout_g.len() == 1));
    }

    #[test]
    fn exact_model_class_has_zero_residuals() {
        let data = line_data(&uniform_xs(20, 3), |x| (x - 0.2).powi(2));
        let part = FoldPartition::contiguous(20, 5).unwrap();
        let folds = run_folds(&data, &part, &FitterSpec::poly3(), &unit(), MeanMode::Analytic, &mut RngStream::new(0)).unwrap();
        for r in &folds {
            for (g, f) in r.heldout_g.iter().zip(&r.heldout_f) {
                assert!((g - f).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn zero_alpha_gives_sample_mean() {
        let data = line_data(&uniform_xs(20, 4), |x| x.exp());
        let part = FoldPartition::contiguous(20, 4).unwrap();
        let r = stackmc_estimate(&data, &part, &FitterSpec::linear(), &unit(), AlphaMethod::Fixed { value: 0.0 }, MeanMode::Analytic, &mut RngStream::new(0)).unwrap();
        let m = mean(data.values()).unwrap();
        assert!((r.estimate - m).abs() <= 1e-12 * m.abs());
        assert_eq!(r.mc_baseline, m);
    }

    #[test]
    fn exact_fit_collapses_to_integral() {
        let data = line_data(&uniform_xs(16, 5), |x| (x - 0.2).powi(2));
        let part = FoldPartition::contiguous(16, 4).unwrap();
        let unbiased = AlphaMethod::Improved { assume_unbiased_g: true, statistic: FoldStatistic::HeldOut };
        let r = stackmc_estimate(&data, &part, &FitterSpec::poly3(), &unit(), unbiased, MeanMode::Analytic, &mut RngStream::new(0)).unwrap();
        assert!((r.estimate - 0.52 / 3.0).abs() < 1e-6);
        let r = stackmc_estimate(&data, &part, &FitterSpec::poly3(), &unit(), AlphaMethod::Original, MeanMode::Analytic, &mut RngStream::new(0)).unwrap();
        assert!((r.alpha[0] - 1.0).abs() < 1e-6);
        assert!((r.estimate - 0.52 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn multi_with_one_fitter_matches_single() {
        let data = line_data(&uniform_xs(30, 6), |x| (3.0 * x).sin());
        let part = FoldPartition::contiguous(30, 5).unwrap();
        let single = stackmc_estimate(&data, &part, &FitterSpec::poly3(), &unit(), AlphaMethod::default(), MeanMode::Analytic, &mut RngStream::new(0)).unwrap();
        let multi = stackmc_multi(&data, &part, &[FitterSpec::poly3()], &unit(), MeanMode::Analytic, false, FoldStatistic::default(), &mut RngStream::new(0)).unwrap();
        assert!((single.estimate - multi.estimate).abs() < 1e-14);
    }

    #[test]
    fn duplicated_fitter_matches_single() {
        let data = line_data(&uniform_xs(30, 7), |x| (3.0 * x).sin() + x);
        let part = FoldPartition::contiguous(30, 5).unwrap();
        let single = stackmc_multi(&data, &part, &[FitterSpec::linear()], &unit(), MeanMode::Analytic, false, FoldStatistic::HeldOut, &mut RngStream::new(0)).unwrap();
        let dup = stackmc_multi(&data, &part, &[FitterSpec::linear(), FitterSpec::linear()], &unit(), MeanMode::Analytic, false, FoldStatistic::HeldOut, &mut RngStream::new(0)).unwrap();
        assert!((single.estimate - dup.estimate).abs() < 1e-10 * single.estimate.abs().max(1.0));
        assert!((dup.alpha[0] - dup.alpha[1]).abs() < 1e-8);
        assert!((dup.alpha[0] + dup.alpha[1] - single.alpha[0]).abs() < 1e-8);
    }

    #[test]
    fn independent_unit_fits_reduce_by_n_fit() {
        // two fitters with var(a_i) = 1, cov(a_1, a_2) = 0, cov(a_i, c) = 1
        let a1 = [1.0, -1.0, 1.0, -1.0];
        let a2 = [1.0, 1.0, -1.0, -1.0];
        let scale = (3.0f64).sqrt() / 2.0;
        let a = vec![
            a1.iter().map(|v| v * scale * 2.0 / 3f64.sqrt()).collect::<Vec<_>>(),
            a2.iter().map(|v| v * scale * 2.0 / 3f64.sqrt()).collect::<Vec<_>>(),
        ];
        let c: Vec<f64> = (0..4).map(|k| a[0][k] + a[1][k]).collect();
        let u: Vec<f64> = a.iter().map(|ai| sample_cov(ai, &c).unwrap()).collect();
        let alpha = solve_alpha(&a, &c, None).unwrap();
        let w11 = sample_cov(&a[0], &a[0]).unwrap();
        assert!((u[0] - w11).abs() < 1e-12 && (u[1] - w11).abs() < 1e-12);
        let reduction: f64 = u.iter().zip(&alpha).map(|(u, a)| u * a).sum();
        // N_fit * c_u / c_w with c_u = c_w
        assert!((reduction - 2.0 * u[0] * u[0] / w11).abs() < 1e-12);
    }

    #[test]
    fn quasimc_on_constant_data() {
        let data = line_data(&uniform_xs(25, 8), |_| -1.5);
        let r = stackmc_quasimc(&data, 5, &[FitterSpec::poly3()], &unit(), DEFAULT_REPEATS, &mut RngStream::new(1), MeanMode::Analytic, AlphaMethod::default()).unwrap();
        assert_eq!(r.repeat_estimates.len(), 10);
        assert!((r.estimate + 1.5).abs() < 1e-12);
    }

    #[test]
    fn importance_with_unit_weights_matches_plain() {
        let xs = uniform_xs(30, 9);
        let plain = line_data(&xs, |x| x.powi(3) + x);
        let weighted = DataSet::with_weights(plain.points().to_vec(), plain.values().to_vec(), vec![1.0; 30]).unwrap();
        let part = FoldPartition::contiguous(30, 5).unwrap();
        let a = stackmc_estimate(&plain, &part, &FitterSpec::linear(), &unit(), AlphaMethod::default(), MeanMode::MonteCarlo { n_mean: 300 }, &mut RngStream::new(3)).unwrap();
        let b = stackmc_importance(&weighted, &part, &[FitterSpec::linear()], &unit(), 300, &mut RngStream::new(3), AlphaMethod::default()).unwrap();
        assert_eq!(a.estimate, b.estimate);
    }

    #[test]
    fn importance_zero_alpha_is_weighted_mean() {
        let xs = uniform_xs(20, 10);
        let base = line_data(&xs, |x| 1.0 + x);
        let w: Vec<f64> = xs.iter().map(|x| 0.5 + x).collect();
        let data = DataSet::with_weights(base.points().to_vec(), base.values().to_vec(), w).unwrap();
        let part = FoldPartition::contiguous(20, 5).unwrap();
        let r = stackmc_importance(&data, &part, &[FitterSpec::linear()], &unit(), 50, &mut RngStream::new(0), AlphaMethod::Fixed { value: 0.0 }).unwrap();
        let want = mean(&data.weighted_values()).unwrap();
        assert!((r.estimate - want).abs() < 1e-12);
        assert!(stackmc_importance(&base, &part, &[FitterSpec::linear()], &unit(), 50, &mut RngStream::new(0), AlphaMethod::default()).is_err());
    }

    #[test]
    fn importance_constant_with_unit_weights() {
        let base = line_data(&uniform_xs(20, 11), |_| 2.0);
        let data = DataSet::with_weights(base.points().to_vec(), base.values().to_vec(), vec![1.0; 20]).unwrap();
        let part = FoldPartition::contiguous(20, 5).unwrap();
        let r = stackmc_importance(&data, &part, &[FitterSpec::poly3()], &unit(), 300, &mut RngStream::new(0), AlphaMethod::default()).unwrap();
        assert!((r.estimate - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fold_errors_carry_the_fold_index() {
        let data = line_data(&uniform_xs(10, 12), |x| x);
        let part = FoldPartition::contiguous(10, 2).unwrap();
        let bits = Distribution::bits(1).unwrap();
        let err = run_folds(&data, &part, &FitterSpec::poly3(), &bits, MeanMode::Analytic, &mut RngStream::new(0)).unwrap_err();
        assert!(matches!(err, Error::Fold { fold: 0, .. }));
    }
}
