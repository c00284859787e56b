use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::cost_model::{
    rating_to_delta, threshold_to_delta, votes_to_delta, CostedExample, RatingScale, VoteCount,
};
use crate::datasets::{CostSource, Dataset};
use crate::error::{Error, Result};

/// How the trailing annotation columns of a CSV row become Δ.
///
/// Feature columns come first and are named `f0, f1, …`; the schema columns
/// follow: `n_yes,n_no` | `z` | `score` | `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schema {
    Votes,
    Threshold { tau: f64 },
    Rating(RatingScale),
    PrecomputedDelta,
}

impl Schema {
    pub fn columns(&self) -> &'static [&'static str] {
        match self {
            Schema::Votes => &["n_yes", "n_no"],
            Schema::Threshold { .. } => &["z"],
            Schema::Rating(_) => &["score"],
            Schema::PrecomputedDelta => &["delta"],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Schema::Votes => "votes",
            Schema::Threshold { .. } => "threshold",
            Schema::Rating(_) => "rating",
            Schema::PrecomputedDelta => "precomputed_delta",
        }
    }

    fn cost_source(&self) -> CostSource {
        match self {
            Schema::Votes => CostSource::Votes,
            Schema::Threshold { .. } => CostSource::Threshold,
            Schema::Rating(_) => CostSource::Rating,
            Schema::PrecomputedDelta => CostSource::Precomputed,
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_csv(file, &path.display().to_string(), &name, schema)
}

/// Reads a dataset from any reader. `origin` names the source in error
/// messages.
pub fn read_csv<R: Read>(reader: R, origin: &str, name: &str, schema: &Schema) -> Result<Dataset> {
    let parse_err = |line: u64, message: String| Error::Parse {
        path: origin.to_string(),
        line,
        message,
    };

    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);

    let header = rdr
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    let schema_cols = schema.columns();
    if header.len() < schema_cols.len() {
        return Err(parse_err(1, format!("header must end with {}", schema_cols.join(","))));
    }
    let dim = header.len() - schema_cols.len();
    for (j, col) in header.iter().enumerate() {
        let expected = if j < dim {
            format!("f{j}")
        } else {
            schema_cols[j - dim].to_string()
        };
        if col.trim() != expected {
            return Err(parse_err(
                1,
                format!("column {} is {col:?}, expected {expected:?}", j + 1),
            ));
        }
    }

    let mut examples = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(parse_err(
                line,
                format!("expected {} columns, found {}", header.len(), record.len()),
            ));
        }
        let real = |j: usize| -> Result<f64> {
            let field = record[j].trim();
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(line, format!("column {}: {field:?} is not a number", j + 1)))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("column {}: non-finite value", j + 1)));
            }
            Ok(v)
        };
        let count = |j: usize| -> Result<u64> {
            let field = record[j].trim();
            field.parse().map_err(|_| {
                parse_err(line, format!("column {}: {field:?} is not a vote count", j + 1))
            })
        };

        let features = (0..dim).map(real).collect::<Result<Vec<_>>>()?;
        let delta = match schema {
            Schema::Votes => votes_to_delta(VoteCount::new(count(dim)?, count(dim + 1)?)),
            Schema::Threshold { tau } => threshold_to_delta(real(dim)?, *tau)?,
            Schema::Rating(scale) => {
                rating_to_delta(real(dim)?, scale).map_err(|e| parse_err(line, e.to_string()))?
            }
            Schema::PrecomputedDelta => real(dim)?,
        };
        examples.push(CostedExample::new(features, delta)?);
    }
    if examples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Dataset::with_dim(name, schema.cost_source(), dim, examples)
}

/// Writes `dataset` in the precomputed-Δ schema. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_csv<W: Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let to_io = |e: csv::Error| Error::io("<csv>", std::io::Error::other(e));
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (0..dataset.dim()).map(|j| format!("f{j}")).collect();
    header.push("delta".into());
    wtr.write_record(&header).map_err(to_io)?;
    for ex in dataset.examples() {
        let row = ex
            .features
            .iter()
            .chain(std::iter::once(&ex.delta))
            .map(|v| format!("{v:?}"));
        wtr.write_record(row).map_err(to_io)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}
