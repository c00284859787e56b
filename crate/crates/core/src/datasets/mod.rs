//! Datasets of costed examples, CSV ingestion and stratified splitting.

mod csv_io;
mod split;

pub use csv_io::{load_csv, read_csv, write_csv, Schema};
pub use split::{
    largest_remainder, split, split_indices, subsample_train, SplitSpec, Splits,
};

use serde::{Deserialize, Serialize};

use crate::cost_model::{CostedExample, Label};
use crate::error::{Error, Result};

/// Where the Δ values of a dataset came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostSource {
    Votes,
    Threshold,
    Rating,
    Rewards,
    Synthetic,
    Precomputed,
}

impl CostSource {
    pub fn as_str(self) -> &'static str {
        match self {
            CostSource::Votes => "votes",
            CostSource::Threshold => "threshold",
            CostSource::Rating => "rating",
            CostSource::Rewards => "rewards",
            CostSource::Synthetic => "synthetic",
            CostSource::Precomputed => "precomputed",
        }
    }
}

/// An ordered collection of costed examples sharing one feature dimension.
///
/// Empty datasets are representable (a filter may legitimately produce one);
/// operations that need data reject them.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    cost_source: CostSource,
    dim: usize,
    examples: Vec<CostedExample>,
    class_counts: [usize; 2],
}

impl Dataset {
    /// Builds a dataset, checking the shared dimension. `dim` is taken from
    /// the first example.
    pub fn new(
        name: impl Into<String>,
        cost_source: CostSource,
        examples: Vec<CostedExample>,
    ) -> Result<Self> {
        let dim = examples.first().map_or(0, |e| e.features.len());
        Self::with_dim(name, cost_source, dim, examples)
    }

    pub fn with_dim(
        name: impl Into<String>,
        cost_source: CostSource,
        dim: usize,
        examples: Vec<CostedExample>,
    ) -> Result<Self> {
        let mut class_counts = [0; 2];
        for ex in &examples {
            if ex.features.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: ex.features.len(),
                });
            }
            if !ex.delta.is_finite() {
                return Err(Error::NonFinite("delta"));
            }
            class_counts[ex.label().index()] += 1;
        }
        Ok(Dataset {
            name: name.into(),
            cost_source,
            dim,
            examples,
            class_counts,
        })
    }

    /// Convenience constructor from parallel feature rows and costs.
    pub fn from_parts(
        name: impl Into<String>,
        cost_source: CostSource,
        features: Vec<Vec<f64>>,
        deltas: Vec<f64>,
    ) -> Result<Self> {
        if features.len() != deltas.len() {
            return Err(Error::LengthMismatch {
                expected: features.len(),
                got: deltas.len(),
            });
        }
        let examples = features
            .into_iter()
            .zip(deltas)
            .map(|(x, d)| CostedExample::new(x, d))
            .collect::<Result<Vec<_>>>()?;
        Self::new(name, cost_source, examples)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cost_source(&self) -> CostSource {
        self.cost_source
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn examples(&self) -> &[CostedExample] {
        &self.examples
    }

    pub fn get(&self, i: usize) -> Option<&CostedExample> {
        self.examples.get(i)
    }

    pub fn deltas(&self) -> impl Iterator<Item = f64> + '_ {
        self.examples.iter().map(|e| e.delta)
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.examples.iter().map(|e| e.label())
    }

    pub fn class_count(&self, label: Label) -> usize {
        self.class_counts[label.index()]
    }

    /// Indices of the examples in `label`'s class, ascending.
    pub fn class_indices(&self, label: Label) -> Vec<usize> {
        self.examples
            .iter()
            .enumerate()
            .filter(|(_, e)| e.label() == label)
            .map(|(i, _)| i)
            .collect()
    }

    /// New dataset made of the examples at `indices`, in that order.
    /// Indices may repeat. Panics on an out-of-range index.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let examples: Vec<_> = indices.iter().map(|&i| self.examples[i].clone()).collect();
        let mut class_counts = [0; 2];
        for ex in &examples {
            class_counts[ex.label().index()] += 1;
        }
        Dataset {
            name: self.name.clone(),
            cost_source: self.cost_source,
            dim: self.dim,
            examples,
            class_counts,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Dataset {
        self.name = name.into();
        self
    }

    /// Copy of the dataset with every Δ multiplied by `c`.
    pub fn scale_deltas(&self, c: f64) -> Result<Dataset> {
        let examples = self
            .examples
            .iter()
            .map(|e| CostedExample::new(e.features.clone(), e.delta * c))
            .collect::<Result<Vec<_>>>()?;
        Dataset::with_dim(self.name.clone(), self.cost_source, self.dim, examples)
    }

    /// Copy with features replaced, e.g. after standardization.
    pub(crate) fn map_features(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Dataset {
        let examples = self
            .examples
            .iter()
            .map(|e| CostedExample {
                features: f(&e.features),
                delta: e.delta,
            })
            .collect();
        Dataset {
            name: self.name.clone(),
            cost_source: self.cost_source,
            dim: self.dim,
            examples,
            class_counts: self.class_counts,
        }
    }
}
