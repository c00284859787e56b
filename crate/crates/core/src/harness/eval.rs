//! Scoring externally produced predictions.
//!
//! A predictions file is CSV with header `index,label` or
//! `index,label,score`. `index` is the 0-based row of the dataset, each
//! exactly once in any order; `label` is `-1` or `+1`.

use std::io::Read;
use std::path::Path;

use crate::cost_model::Label;
use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::metrics::{evaluate, MetricReport, Predictions, Scores};

/// How to read the optional `score` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreKind {
    Probability,
    Delta,
}

impl std::str::FromStr for ScoreKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "probability" => Ok(ScoreKind::Probability),
            "delta" => Ok(ScoreKind::Delta),
            other => Err(Error::invalid(format!(
                "score kind must be probability or delta, got {other:?}"
            ))),
        }
    }
}

pub fn read_predictions<R: Read>(reader: R, origin: &str, n: usize, kind: ScoreKind) -> Result<Predictions> {
    let parse_err = |line: u64, message: String| Error::Parse {
        path: origin.to_string(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let has_score = match header.iter().collect::<Vec<_>>().as_slice() {
        ["index", "label"] => false,
        ["index", "label", "score"] => true,
        other => {
            return Err(parse_err(
                1,
                format!("expected header index,label[,score], got {}", other.join(",")),
            ))
        }
    };
    let mut labels: Vec<Option<Label>> = vec![None; n];
    let mut scores = vec![0.0; n];
    for (row, record) in rdr.records().enumerate() {
        let line = row as u64 + 2;
        let record = record.map_err(|e| parse_err(line, e.to_string()))?;
        let index: usize = record[0]
            .parse()
            .map_err(|_| parse_err(line, format!("bad index {:?}", &record[0])))?;
        if index >= n {
            return Err(parse_err(line, format!("index {index} out of range for {n} examples")));
        }
        if labels[index].is_some() {
            return Err(parse_err(line, format!("index {index} appears twice")));
        }
        labels[index] = Some(record[1].parse().map_err(|e: Error| parse_err(line, e.to_string()))?);
        if has_score {
            scores[index] = record[2]
                .parse()
                .map_err(|_| parse_err(line, format!("bad score {:?}", &record[2])))?;
        }
    }
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.ok_or_else(|| Error::invalid(format!("{origin}: no prediction for index {i}"))))
        .collect::<Result<Vec<_>>>()?;
    if !has_score {
        return Ok(Predictions::new(labels));
    }
    let scores = match kind {
        ScoreKind::Probability => Scores::Probability(scores),
        ScoreKind::Delta => Scores::Delta(scores),
    };
    Predictions::with_scores(labels, scores)
}

pub fn evaluate_file(dataset: &Dataset, path: impl AsRef<Path>, kind: ScoreKind) -> Result<MetricReport> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let preds = read_predictions(file, &path.display().to_string(), dataset.len(), kind)?;
    evaluate(dataset, &preds)
}
