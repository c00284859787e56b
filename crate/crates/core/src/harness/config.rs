//! Experiment configuration.
//!
//! A config is a TOML document. Sections may be written as tables or as
//! flat dotted keys; both parse to the same thing:
//!
//! ```toml
//! dataset.source = "csv"
//! dataset.path = "votes.csv"
//! dataset.schema = "votes"
//! experiment.methods = ["standard", "weighted", "p_up", "tdown30", "regression"]
//! experiment.base_seed = 0
//! experiment.n_seeds = 10
//! train.l2_lambda = 1.0
//! ```
//!
//! Every key has a default; the run manifest writes all of them back out, so
//! a manifest is itself a config that reproduces the run.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cost_model::{Orientation, RatingScale};
use crate::datasets::{load_csv, Dataset, Schema, SplitSpec};
use crate::error::{Error, Result};
use crate::learners::TrainConfig;
use crate::rng;
use crate::sampling::Strategy;
use crate::synthetic::SyntheticConfig;

/// A training method compared by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Method {
    /// Cross-entropy with unit weights.
    Standard,
    /// Cross-entropy weighted by |Δ|.
    Weighted,
    /// Resample or filter the training set, then standard cross-entropy.
    Sampled(Strategy),
    /// Squared-error regression on Δ, classified by sign.
    Regression,
}

impl Method {
    pub const DEFAULT_SET: [Method; 7] = [
        Method::Standard,
        Method::Weighted,
        Method::Sampled(Strategy::PUp),
        Method::Sampled(Strategy::TDown(30)),
        Method::Sampled(Strategy::TDown(50)),
        Method::Sampled(Strategy::TDown(70)),
        Method::Regression,
    ];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Standard => f.write_str("standard"),
            Method::Weighted => f.write_str("weighted"),
            Method::Sampled(s) => s.fmt(f),
            Method::Regression => f.write_str("regression"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s {
            "standard" => Ok(Method::Standard),
            "weighted" => Ok(Method::Weighted),
            "regression" => Ok(Method::Regression),
            other => other
                .parse::<Strategy>()
                .map(Method::Sampled)
                .map_err(|_| Error::Config(format!("unknown method {other:?}"))),
        }
    }
}

impl TryFrom<String> for Method {
    type Error = Error;

    fn try_from(s: String) -> Result<Method> {
        s.parse()
    }
}

impl From<Method> for String {
    fn from(m: Method) -> String {
        m.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Synthetic,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemaKind {
    Votes,
    Threshold,
    Rating,
    PrecomputedDelta,
}

impl FromStr for SchemaKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "votes" => Ok(SchemaKind::Votes),
            "threshold" => Ok(SchemaKind::Threshold),
            "rating" => Ok(SchemaKind::Rating),
            "precomputed_delta" => Ok(SchemaKind::PrecomputedDelta),
            other => Err(Error::Config(format!("unknown schema {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DatasetConfig {
    pub source: SourceKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schema: Option<SchemaKind>,
    /// Threshold schema: decision threshold.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// Rating schema: scale midpoint, bounds and sign convention. The bounds
    /// default to `1` and `2·midpoint − 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub midpoint: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale_low: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale_high: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientation: Option<Orientation>,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            source: SourceKind::Synthetic,
            path: None,
            schema: None,
            tau: None,
            midpoint: None,
            scale_low: None,
            scale_high: None,
            orientation: None,
        }
    }
}

impl DatasetConfig {
    /// Fills the rating bounds so the manifest states them.
    fn resolve_defaults(&mut self) {
        if self.schema == Some(SchemaKind::Rating) {
            if let Some(mid) = self.midpoint {
                self.scale_low.get_or_insert(1.0);
                self.scale_high.get_or_insert(2.0 * mid - 1.0);
            }
        }
    }

    pub fn schema(&self) -> Result<Schema> {
        let kind = self
            .schema
            .ok_or_else(|| Error::Config("dataset.schema is required for csv sources".into()))?;
        Ok(match kind {
            SchemaKind::Votes => Schema::Votes,
            SchemaKind::PrecomputedDelta => Schema::PrecomputedDelta,
            SchemaKind::Threshold => Schema::Threshold {
                tau: self
                    .tau
                    .ok_or_else(|| Error::Config("threshold schema needs dataset.tau".into()))?,
            },
            SchemaKind::Rating => {
                let midpoint = self
                    .midpoint
                    .ok_or_else(|| Error::Config("rating schema needs dataset.midpoint".into()))?;
                let orientation = self.orientation.ok_or_else(|| {
                    Error::Config(
                        "rating schema needs dataset.orientation \
                         (midpoint_minus_score or score_minus_midpoint)"
                            .into(),
                    )
                })?;
                let low = self.scale_low.unwrap_or(1.0);
                let high = self.scale_high.unwrap_or(2.0 * midpoint - 1.0);
                Schema::Rating(RatingScale::new(low, high, midpoint, orientation)?)
            }
        })
    }

    pub fn load(&self) -> Result<Dataset> {
        let path = self
            .path
            .as_ref()
            .ok_or_else(|| Error::Config("dataset.path is required for csv sources".into()))?;
        load_csv(path, &self.schema()?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub methods: Vec<Method>,
    /// Seeds are `base_seed .. base_seed + n_seeds` unless `seeds` is given.
    pub base_seed: u64,
    pub n_seeds: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    /// Training-set sizes for scaling curves.
    pub scaling_sizes: Vec<usize>,
    pub histogram_bins: usize,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            methods: Method::DEFAULT_SET.to_vec(),
            base_seed: 0,
            n_seeds: 10,
            seeds: None,
            scaling_sizes: Vec::new(),
            histogram_bins: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Text,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Not written to the manifest, which lives inside it.
    #[serde(skip)]
    pub dir: PathBuf,
    /// Forms of the aggregate table to write. Per-run, histogram and scaling
    /// data are always CSV.
    pub formats: Vec<Format>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
            formats: vec![Format::Csv, Format::Text],
        }
    }
}

/// Random-generator identity. Reports are only reproducible under the same
/// generator, so a manifest naming a different one is refused.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeneratorSection {
    pub rng: String,
    pub gaussian: String,
}

impl Default for GeneratorSection {
    fn default() -> Self {
        GeneratorSection {
            rng: rng::GENERATOR_NAME.to_string(),
            gaussian: rng::GAUSSIAN_NAME.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub dataset: DatasetConfig,
    /// Synthetic source parameters; the seed comes from each run.
    pub synthetic: SyntheticParams,
    /// Split fractions; the seed comes from each run.
    pub split: SplitParams,
    pub train: TrainConfig,
    pub experiment: ExperimentSection,
    pub output: OutputSection,
    pub generator: GeneratorSection,
}

/// [`SyntheticConfig`] without its seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticParams {
    pub n: usize,
    pub dim: usize,
    pub weight_norm: f64,
    pub noise_sigma: f64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        let d = SyntheticConfig::default();
        SyntheticParams {
            n: d.n,
            dim: d.dim,
            weight_norm: d.weight_norm,
            noise_sigma: d.noise_sigma,
        }
    }
}

impl SyntheticParams {
    pub fn with_seed(&self, seed: u64) -> SyntheticConfig {
        SyntheticConfig {
            n: self.n,
            dim: self.dim,
            weight_norm: self.weight_norm,
            noise_sigma: self.noise_sigma,
            seed,
        }
    }
}

/// [`SplitSpec`] without its seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitParams {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
    pub stratify_on_sign: bool,
}

impl Default for SplitParams {
    fn default() -> Self {
        let d = SplitSpec::default();
        SplitParams {
            train: d.train,
            validation: d.validation,
            test: d.test,
            stratify_on_sign: d.stratify_on_sign,
        }
    }
}

impl SplitParams {
    pub fn with_seed(&self, seed: u64) -> SplitSpec {
        SplitSpec {
            train: self.train,
            validation: self.validation,
            test: self.test,
            seed,
            stratify_on_sign: self.stratify_on_sign,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let mut cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.dataset.resolve_defaults();
        Ok(cfg)
    }

    /// Reads a config file. A relative `dataset.path` is taken relative to
    /// the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let Some(p) = cfg.dataset.path.as_mut() {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    /// The seeds every method runs under, in order.
    pub fn seeds(&self) -> Vec<u64> {
        match &self.experiment.seeds {
            Some(s) => s.clone(),
            None => (0..self.experiment.n_seeds as u64)
                .map(|i| self.experiment.base_seed.wrapping_add(i))
                .collect(),
        }
    }

    /// Copy with the seed list spelled out, as written to the manifest.
    pub fn resolved(&self) -> ExperimentConfig {
        let mut cfg = self.clone();
        cfg.experiment.seeds = Some(self.seeds());
        cfg.experiment.n_seeds = cfg.experiment.seeds.as_ref().map_or(0, Vec::len);
        cfg.dataset.resolve_defaults();
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        if self.experiment.methods.is_empty() {
            return Err(Error::Config("experiment.methods is empty".into()));
        }
        let seeds = self.seeds();
        if seeds.len() < 2 {
            return Err(Error::Config(format!(
                "confidence intervals need at least 2 seeds, got {}",
                seeds.len()
            )));
        }
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != seeds.len() {
            return Err(Error::Config("experiment.seeds contains duplicates".into()));
        }
        if self.experiment.histogram_bins == 0 {
            return Err(Error::Config("experiment.histogram_bins must be positive".into()));
        }
        if self.output.formats.is_empty() {
            return Err(Error::Config("output.formats is empty".into()));
        }
        let default_gen = GeneratorSection::default();
        if self.generator != default_gen {
            return Err(Error::Config(format!(
                "config was produced with generator {:?} / {:?}; this build uses {:?} / {:?}",
                self.generator.rng, self.generator.gaussian, default_gen.rng, default_gen.gaussian
            )));
        }
        self.split.with_seed(0).validate()?;
        self.train.validate()?;
        match self.dataset.source {
            SourceKind::Synthetic => self.synthetic.with_seed(0).validate()?,
            SourceKind::Csv => {
                self.dataset.schema()?;
                if self.dataset.path.is_none() {
                    return Err(Error::Config("dataset.path is required for csv sources".into()));
                }
            }
        }
        Ok(())
    }

    /// Flat `section.key = value` rendering of the resolved config, one key
    /// per line in sorted order.
    pub fn to_flat_toml(&self) -> Result<String> {
        let value = toml::Value::try_from(self.resolved())
            .map_err(|e| Error::Config(format!("serializing config: {e}")))?;
        let mut lines = Vec::new();
        flatten("", &value, &mut lines);
        lines.sort();
        let mut out = lines.join("\n");
        out.push('\n');
        Ok(out)
    }
}

fn flatten(prefix: &str, value: &toml::Value, out: &mut Vec<String>) {
    match value {
        toml::Value::Table(t) => {
            for (k, v) in t {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, out);
            }
        }
        other => out.push(format!("{prefix} = {other}")),
    }
}
