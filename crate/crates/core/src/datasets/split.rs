use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::cost_model::Label;
use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::rng::{self, Stream};

/// Train/validation/test fractions and the shuffle seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitSpec {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
    pub seed: u64,
    pub stratify_on_sign: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train: 0.8,
            validation: 0.1,
            test: 0.1,
            seed: 0,
            stratify_on_sign: true,
        }
    }
}

impl SplitSpec {
    pub fn fractions(&self) -> [f64; 3] {
        [self.train, self.validation, self.test]
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.fractions();
        if f.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::invalid(format!("split fractions must be positive, got {f:?}")));
        }
        let sum: f64 = f.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("split fractions sum to {sum}, not 1")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Splits {
    pub train: Dataset,
    pub validation: Dataset,
    pub test: Dataset,
}

/// Apportions `total` items to `fractions` (summing to 1) with the
/// largest-remainder rule. Ties go to the earlier slot. The result sums to
/// `total` exactly.
pub fn largest_remainder(total: usize, fractions: &[f64]) -> Vec<usize> {
    let quotas: Vec<f64> = fractions.iter().map(|f| f * total as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..fractions.len()).collect();
    // stable sort keeps ties in slot order
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra)
    });
    for &j in order.iter().take(total.saturating_sub(assigned)) {
        counts[j] += 1;
    }
    counts
}

/// Index partition behind [`split`]. Each part is sorted ascending.
///
/// Within each class (or the whole dataset when not stratifying) indices are
/// shuffled and cut by largest-remainder counts. A class just large enough
/// to populate every split but whose rounded share of some split is zero
/// has that split topped up to one example, taken from the largest share.
pub fn split_indices(dataset: &Dataset, spec: &SplitSpec) -> Result<[Vec<usize>; 3]> {
    spec.validate()?;
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let groups: Vec<(Option<Label>, Vec<usize>)> = if spec.stratify_on_sign {
        [Label::Neg, Label::Pos]
            .into_iter()
            .map(|l| (Some(l), dataset.class_indices(l)))
            .filter(|(_, idx)| !idx.is_empty())
            .collect()
    } else {
        vec![(None, (0..dataset.len()).collect())]
    };

    let mut rng = rng::stream(spec.seed, Stream::Split);
    let mut parts: [Vec<usize>; 3] = Default::default();
    for (label, mut idx) in groups {
        if idx.len() < 3 {
            return Err(match label {
                Some(label) => Error::ClassTooSmall {
                    label,
                    count: idx.len(),
                },
                None => Error::invalid(format!(
                    "{} examples cannot populate train/validation/test",
                    idx.len()
                )),
            });
        }
        idx.shuffle(&mut rng);
        let mut counts = largest_remainder(idx.len(), &spec.fractions());
        while let Some(empty) = counts.iter().position(|&c| c == 0) {
            let donor = (0..3).max_by_key(|&j| (counts[j], std::cmp::Reverse(j))).unwrap();
            counts[donor] -= 1;
            counts[empty] += 1;
        }
        let mut rest = idx.as_slice();
        for (part, &c) in parts.iter_mut().zip(&counts) {
            let (head, tail) = rest.split_at(c);
            part.extend_from_slice(head);
            rest = tail;
        }
    }
    for part in &mut parts {
        part.sort_unstable();
    }
    Ok(parts)
}

pub fn split(dataset: &Dataset, spec: &SplitSpec) -> Result<Splits> {
    let [train, validation, test] = split_indices(dataset, spec)?;
    let name = dataset.name();
    Ok(Splits {
        train: dataset.subset(&train).with_name(format!("{name}/train")),
        validation: dataset.subset(&validation).with_name(format!("{name}/validation")),
        test: dataset.subset(&test).with_name(format!("{name}/test")),
    })
}

/// Uniform subsample of `n_target` examples without replacement, stratified
/// on sign with per-class counts apportioned by largest remainder. The
/// selected examples keep their original relative order, so
/// `n_target == train.len()` returns `train` unchanged.
pub fn subsample_train(train: &Dataset, n_target: usize, seed: u64) -> Result<Dataset> {
    let n = train.len();
    if n_target == 0 || n_target > n {
        return Err(Error::invalid(format!(
            "cannot subsample {n_target} examples from a training set of {n}"
        )));
    }
    let classes = [Label::Neg, Label::Pos];
    let fractions: Vec<f64> = classes
        .iter()
        .map(|&l| train.class_count(l) as f64 / n as f64)
        .collect();
    let counts = largest_remainder(n_target, &fractions);

    let mut rng = rng::stream(seed, Stream::Subsample);
    let mut chosen = Vec::with_capacity(n_target);
    for (&label, &k) in classes.iter().zip(&counts) {
        let mut idx = train.class_indices(label);
        idx.shuffle(&mut rng);
        chosen.extend_from_slice(&idx[..k]);
    }
    chosen.sort_unstable();
    Ok(train.subset(&chosen))
}
