//! Experiment descriptions and their TOML form.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::domain::Distribution;
use crate::engine::{AlphaMethod, MeanMode, DEFAULT_REPEATS};
use crate::error::{Error, Result};
use crate::fitters::{self, FitterSpec, DEFAULT_MC_MEAN_SAMPLES};
use crate::samplers::SamplerSpec;
use crate::testfunctions::TestFunction;

/// Number of folds: a fixed `K`, or leave-one-out (`K = n` for every `n`).
///
/// Written as an integer or as the string `"leave_one_out"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Folds {
    Fixed(usize),
    LeaveOneOut,
}

impl Folds {
    pub fn for_n(self, n: usize) -> usize {
        match self {
            Folds::Fixed(k) => k,
            Folds::LeaveOneOut => n,
        }
    }
}

impl Serialize for Folds {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Folds::Fixed(k) => s.serialize_u64(*k as u64),
            Folds::LeaveOneOut => s.serialize_str("leave_one_out"),
        }
    }
}

impl<'de> Deserialize<'de> for Folds {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct FoldsVisitor;

        impl Visitor<'_> for FoldsVisitor {
            type Value = Folds;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a fold count or \"leave_one_out\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Folds, E> {
                Ok(Folds::Fixed(v as usize))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Folds, E> {
                usize::try_from(v)
                    .map(Folds::Fixed)
                    .map_err(|_| E::custom("fold count must be nonnegative"))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Folds, E> {
                match v {
                    "leave_one_out" | "n" => Ok(Folds::LeaveOneOut),
                    other => Err(E::custom(format!("unknown fold mode `{other}`"))),
                }
            }
        }

        d.deserialize_any(FoldsVisitor)
    }
}

/// Which StackMC variant the experiment runs next to plain MC.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Variant {
    #[default]
    Plain,
    /// Also run the bootstrap repair for correlated samples.
    Quasimc {
        #[serde(default = "default_repeats")]
        n_repeats: usize,
    },
    /// Importance-sampled data; fold means are sampled under the proposal.
    Importance {
        #[serde(default = "default_n_mean")]
        n_mean: usize,
    },
}

fn default_repeats() -> usize {
    DEFAULT_REPEATS
}

fn default_n_mean() -> usize {
    DEFAULT_MC_MEAN_SAMPLES
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmitFormat {
    Csv,
    Json,
    Svg,
}

impl EmitFormat {
    pub fn extension(self) -> &'static str {
        match self {
            EmitFormat::Csv => "csv",
            EmitFormat::Json => "json",
            EmitFormat::Svg => "svg",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_emit")]
    pub emit: Vec<EmitFormat>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            emit: default_emit(),
        }
    }
}

fn default_dir() -> PathBuf {
    PathBuf::from("results")
}

fn default_emit() -> Vec<EmitFormat> {
    vec![EmitFormat::Csv, EmitFormat::Json, EmitFormat::Svg]
}

fn default_alpha() -> Vec<AlphaMethod> {
    vec![AlphaMethod::default()]
}

fn default_sampler() -> SamplerSpec {
    SamplerSpec::Simple
}

/// A complete experiment: what to integrate, how to sample it, which
/// estimators to compare, and over which sample sizes.
///
/// The first entry of `alpha` is the primary method, reported as `stackmc`;
/// further entries are reported as `stackmc@<method>`. With several fitters
/// and `single_fits = true`, each fitter is also run on its own as
/// `stackmc:<fitter>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; absent or 0 uses every available core.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub folds: Folds,
    #[serde(default)]
    pub single_fits: bool,
    pub function: TestFunction,
    pub distribution: Distribution,
    #[serde(default = "default_sampler")]
    pub sampler: SamplerSpec,
    #[serde(default)]
    pub variant: Variant,
    #[serde(default)]
    pub mean_mode: MeanMode,
    pub fitters: Vec<FitterSpec>,
    #[serde(default = "default_alpha")]
    pub alpha: Vec<AlphaMethod>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// The distribution the fold means are taken under.
    pub fn mean_distribution(&self) -> &Distribution {
        match (&self.variant, &self.sampler) {
            (Variant::Importance { .. }, SamplerSpec::Importance { q }) => q,
            _ => &self.distribution,
        }
    }

    pub fn effective_mean_mode(&self) -> MeanMode {
        match self.variant {
            Variant::Importance { n_mean } => MeanMode::MonteCarlo { n_mean },
            _ => self.mean_mode,
        }
    }

    /// Check everything, reporting every problem at once.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let mut check = |what: &str, r: Result<()>| {
            if let Err(e) = r {
                errs.push(format!("{what}: {e}"));
            }
        };
        check("function", self.function.validate());
        check("distribution", self.distribution.validate());
        let dims_ok = self.function.dim() == self.distribution.dim();
        if !dims_ok {
            check(
                "distribution",
                Err(Error::DimensionMismatch {
                    expected: self.function.dim(),
                    got: self.distribution.dim(),
                }),
            );
        }
        if self.distribution.validate().is_ok() {
            check("sampler", self.sampler.validate(&self.distribution));
            if dims_ok && self.function.validate().is_ok() {
                check(
                    "function",
                    self.function.reference_mean(&self.distribution).map(|_| ()),
                );
            }
        }
        if self.name.trim().is_empty() {
            errs.push("name: must not be empty".into());
        }
        if self.n_grid.is_empty() {
            errs.push("n_grid: must list at least one sample size".into());
        }
        let min_n = match self.folds {
            Folds::Fixed(k) => {
                if k < 2 {
                    errs.push(format!("folds: need at least 2, got {k}"));
                }
                k.max(2)
            }
            Folds::LeaveOneOut => 2,
        };
        for &n in &self.n_grid {
            if n < min_n {
                errs.push(format!("n_grid: sample size {n} is below the fold count {min_n}"));
            }
        }
        if self.trials == 0 {
            errs.push("trials: need at least 1".into());
        }
        if self.fitters.is_empty() {
            errs.push("fitters: need at least one".into());
        }
        if self.alpha.is_empty() {
            errs.push("alpha: need at least one method".into());
        }
        for (i, a) in self.alpha.iter().enumerate() {
            if let AlphaMethod::Fixed { value } = a {
                if !value.is_finite() {
                    errs.push(format!("alpha[{i}]: fixed value must be finite"));
                }
            }
        }
        let mean_p = self.mean_distribution().clone();
        let mode = self.effective_mean_mode();
        for (i, f) in self.fitters.iter().enumerate() {
            if let Err(e) = f.validate() {
                errs.push(format!("fitters[{i}]: {e}"));
            }
            if let Some(domain) = &f.domain {
                if domain.len() != self.distribution.dim() {
                    errs.push(format!(
                        "fitters[{i}]: domain has {} entries for a {}-dimensional problem",
                        domain.len(),
                        self.distribution.dim()
                    ));
                }
            }
            if mode == MeanMode::Analytic && !fitters::has_analytic_mean(f, &mean_p) {
                errs.push(format!(
                    "fitters[{i}]: no closed-form mean for {} under {}; use mean_mode = monte_carlo",
                    f.label(),
                    mean_p.kind_name()
                ));
            }
        }
        match (&self.variant, &self.sampler) {
            (Variant::Importance { n_mean }, SamplerSpec::Importance { .. }) => {
                if *n_mean == 0 {
                    errs.push("variant: n_mean must be at least 1".into());
                }
            }
            (Variant::Importance { .. }, _) => {
                errs.push("variant: importance variant needs an importance sampler".into())
            }
            (_, SamplerSpec::Importance { .. }) => {
                errs.push("sampler: importance sampler needs the importance variant".into())
            }
            (Variant::Quasimc { n_repeats }, _) if *n_repeats == 0 => {
                errs.push("variant: n_repeats must be at least 1".into())
            }
            _ => {}
        }
        if let MeanMode::MonteCarlo { n_mean } = self.mean_mode {
            if n_mean == 0 {
                errs.push("mean_mode: n_mean must be at least 1".into());
            }
        }
        if self.output.emit.is_empty() {
            errs.push("output.emit: list at least one format".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }
}
