//! Training and evaluating every method over a set of seeds.

use std::borrow::Cow;

use serde::Serialize;

use crate::datasets::{split, subsample_train, Dataset, Splits};
use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, Method, SourceKind};
use crate::learners::{fit_delta_regression, fit_logistic, Standardizer, TrainConfig};
use crate::metrics::{aggregate, delta_histogram, evaluate, AggregateReport, HistogramBin, MetricReport};
use crate::sampling::SamplingPlan;
use crate::synthetic::generate;

/// Outcome of one (method, seed) training run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub method: Method,
    pub seed: u64,
    /// Size of the training split handed to the method.
    pub n_train: usize,
    /// Examples actually fitted, after any sampling.
    pub n_fit: usize,
    pub report: MetricReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodAggregate {
    pub method: Method,
    pub n_train: usize,
    pub report: AggregateReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentOutcome {
    pub records: Vec<RunRecord>,
    /// One row per method, or per (training size, method) for scaling runs.
    pub aggregates: Vec<MethodAggregate>,
    /// Δ histogram of the first seed's full dataset.
    pub histogram: Vec<HistogramBin>,
    pub scaling: bool,
}

/// Trains `method` on `train` and evaluates it on `test`.
///
/// Standardization, when enabled, is fitted on `train` before any sampling.
/// `seed` only affects P_up resampling.
pub fn run_method(
    method: Method,
    train: &Dataset,
    test: &Dataset,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<RunRecord> {
    let (train, test) = if cfg.standardize {
        let s = Standardizer::fit(train)?;
        (Cow::Owned(s.transform(train)?), Cow::Owned(s.transform(test)?))
    } else {
        (Cow::Borrowed(train), Cow::Borrowed(test))
    };
    let (model, n_fit) = match method {
        Method::Standard => (fit_logistic(&train, &vec![1.0; train.len()], cfg)?, train.len()),
        Method::Weighted => {
            let costs: Vec<f64> = train.examples().iter().map(|e| e.cost()).collect();
            (fit_logistic(&train, &costs, cfg)?, train.len())
        }
        Method::Sampled(strategy) => {
            let sampled = SamplingPlan { strategy, seed }.apply(&train)?;
            (fit_logistic(&sampled, &vec![1.0; sampled.len()], cfg)?, sampled.len())
        }
        Method::Regression => (fit_delta_regression(&train, cfg)?, train.len()),
    };
    let report = evaluate(&test, &model.predict_dataset(&test)?)?;
    Ok(RunRecord {
        method,
        seed,
        n_train: train.len(),
        n_fit,
        report,
    })
}

/// Where a run's data comes from: regenerated per seed, or loaded once.
enum Source {
    Synthetic,
    Loaded(Dataset),
}

impl Source {
    fn open(cfg: &ExperimentConfig) -> Result<Source> {
        Ok(match cfg.dataset.source {
            SourceKind::Synthetic => Source::Synthetic,
            SourceKind::Csv => Source::Loaded(cfg.dataset.load()?),
        })
    }

    fn for_seed(&self, cfg: &ExperimentConfig, seed: u64) -> Result<Cow<'_, Dataset>> {
        match self {
            Source::Synthetic => Ok(Cow::Owned(generate(&cfg.synthetic.with_seed(seed))?.0)),
            Source::Loaded(ds) => Ok(Cow::Borrowed(ds)),
        }
    }
}

/// The dataset a config describes, as seen by its first seed.
pub fn load_dataset(cfg: &ExperimentConfig) -> Result<Dataset> {
    let seed = cfg.seeds().first().copied().unwrap_or(cfg.experiment.base_seed);
    Ok(Source::open(cfg)?.for_seed(cfg, seed)?.into_owned())
}

fn wrap(method: Method, seed: u64) -> impl FnOnce(Error) -> Error {
    move |e| Error::Run {
        method: method.to_string(),
        seed,
        source: Box::new(e),
    }
}

fn splits_for(source: &Source, cfg: &ExperimentConfig, seed: u64) -> Result<Splits> {
    let data = source.for_seed(cfg, seed)?;
    split(&data, &cfg.split.with_seed(seed))
}

#[cfg(feature = "parallel")]
fn per_seed<T: Send>(seeds: &[u64], f: impl Fn(u64) -> Result<T> + Sync) -> Result<Vec<T>> {
    use rayon::prelude::*;
    // collect every outcome first so the reported failure is the earliest seed's
    let outcomes: Vec<Result<T>> = seeds.par_iter().map(|&s| f(s)).collect();
    outcomes.into_iter().collect()
}

#[cfg(not(feature = "parallel"))]
fn per_seed<T>(seeds: &[u64], f: impl Fn(u64) -> Result<T>) -> Result<Vec<T>> {
    seeds.iter().map(|&s| f(s)).collect()
}

/// Runs every configured method on every seed's split and aggregates per
/// method. All methods of a seed share one split. Records are ordered by
/// seed, then by method in config order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let source = Source::open(cfg)?;
    let seeds = cfg.seeds();
    let methods = &cfg.experiment.methods;
    let per_seed_records = per_seed(&seeds, |seed| {
        let splits = splits_for(&source, cfg, seed)?;
        methods
            .iter()
            .map(|&m| run_method(m, &splits.train, &splits.test, &cfg.train, seed).map_err(wrap(m, seed)))
            .collect::<Result<Vec<_>>>()
    })?;
    let records: Vec<RunRecord> = per_seed_records.into_iter().flatten().collect();
    let n_train = records.first().map_or(0, |r| r.n_train);
    let aggregates = methods
        .iter()
        .map(|&m| aggregate_where(&records, |r| r.method == m, m, n_train))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentOutcome {
        histogram: histogram(&source, cfg, seeds[0])?,
        records,
        aggregates,
        scaling: false,
    })
}

/// Like [`run_experiment`], but each seed's training split is first
/// subsampled to every size in `experiment.scaling_sizes`; the test split
/// stays fixed. Aggregates are ordered by size, then method.
pub fn run_scaling(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let sizes = &cfg.experiment.scaling_sizes;
    if sizes.is_empty() {
        return Err(Error::Config("experiment.scaling_sizes is empty".into()));
    }
    if (1..sizes.len()).any(|i| sizes[..i].contains(&sizes[i])) {
        return Err(Error::Config("experiment.scaling_sizes contains duplicates".into()));
    }
    let source = Source::open(cfg)?;
    let seeds = cfg.seeds();
    let methods = &cfg.experiment.methods;
    let per_seed_records = per_seed(&seeds, |seed| {
        let splits = splits_for(&source, cfg, seed)?;
        let mut out = Vec::with_capacity(sizes.len() * methods.len());
        for &size in sizes {
            let train = subsample_train(&splits.train, size, seed)?;
            for &m in methods {
                out.push(run_method(m, &train, &splits.test, &cfg.train, seed).map_err(wrap(m, seed))?);
            }
        }
        Ok(out)
    })?;
    let records: Vec<RunRecord> = per_seed_records.into_iter().flatten().collect();
    let mut aggregates = Vec::with_capacity(sizes.len() * methods.len());
    for &size in sizes {
        for &m in methods {
            aggregates.push(aggregate_where(&records, |r| r.method == m && r.n_train == size, m, size)?);
        }
    }
    Ok(ExperimentOutcome {
        histogram: histogram(&source, cfg, seeds[0])?,
        records,
        aggregates,
        scaling: true,
    })
}

fn aggregate_where(
    records: &[RunRecord],
    keep: impl Fn(&RunRecord) -> bool,
    method: Method,
    n_train: usize,
) -> Result<MethodAggregate> {
    let reports: Vec<MetricReport> = records.iter().filter(|r| keep(r)).map(|r| r.report).collect();
    Ok(MethodAggregate {
        method,
        n_train,
        report: aggregate(&reports)?,
    })
}

fn histogram(source: &Source, cfg: &ExperimentConfig, seed: u64) -> Result<Vec<HistogramBin>> {
    delta_histogram(source.for_seed(cfg, seed)?.as_ref(), cfg.experiment.histogram_bins)
}
