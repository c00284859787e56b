//! Training-set transforms driven by cost: |Δ|-proportional upsampling and
//! top-k% filtering, both applied within each class so class balance is
//! unchanged (P_up) or shrinks proportionally (Tdown).

use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use crate::cost_model::Label;
use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::rng::{self, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Uniform,
    PUp,
    /// Keep the top `k` percent of each class by |Δ|, `k` in 1..=100.
    TDown(u8),
}

impl Strategy {
    pub fn tdown(k: u32) -> Result<Strategy> {
        if (1..=100).contains(&k) {
            Ok(Strategy::TDown(k as u8))
        } else {
            Err(Error::invalid(format!("tdown percentage must be in 1..=100, got {k}")))
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Uniform => f.write_str("uniform"),
            Strategy::PUp => f.write_str("p_up"),
            Strategy::TDown(k) => write!(f, "tdown{k}"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Strategy> {
        match s {
            "uniform" => Ok(Strategy::Uniform),
            "p_up" => Ok(Strategy::PUp),
            _ => match s.strip_prefix("tdown").map(str::parse::<u32>) {
                Some(Ok(k)) => Strategy::tdown(k),
                _ => Err(Error::invalid(format!("unknown sampling strategy {s:?}"))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingPlan {
    pub strategy: Strategy,
    pub seed: u64,
}

impl SamplingPlan {
    pub fn apply(&self, dataset: &Dataset) -> Result<Dataset> {
        match self.strategy {
            Strategy::Uniform => Ok(uniform_passthrough(dataset)),
            Strategy::PUp => p_up_resample(dataset, self.seed),
            Strategy::TDown(k) => tdown_filter(dataset, k),
        }
    }
}

pub fn uniform_passthrough(dataset: &Dataset) -> Dataset {
    dataset.clone()
}

/// Indices drawn by [`p_up_resample`], sorted ascending.
///
/// Each class present in `dataset` gets as many draws (with replacement) as
/// it has examples; a draw picks example `i` with probability
/// `|Δᵢ| / Σ_class |Δⱼ|`. Zero-cost examples are outside the support.
pub fn p_up_indices(dataset: &Dataset, seed: u64) -> Result<Vec<usize>> {
    let mut rng = rng::stream(seed, Stream::Resample);
    let mut drawn = Vec::with_capacity(dataset.len());
    for label in [Label::Neg, Label::Pos] {
        let members = dataset.class_indices(label);
        if members.is_empty() {
            continue;
        }
        let support: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&i| dataset.examples()[i].cost() > 0.0)
            .collect();
        if support.is_empty() {
            return Err(Error::ZeroCostClass(label));
        }
        let law = WeightedIndex::new(support.iter().map(|&i| dataset.examples()[i].cost()))
            .map_err(|e| Error::invalid(format!("p_up weights: {e}")))?;
        drawn.extend((0..members.len()).map(|_| support[law.sample(&mut rng)]));
    }
    drawn.sort_unstable();
    Ok(drawn)
}

/// Per-class resampling with replacement, probability proportional to |Δ|.
pub fn p_up_resample(dataset: &Dataset, seed: u64) -> Result<Dataset> {
    Ok(dataset.subset(&p_up_indices(dataset, seed)?))
}

/// Indices kept by [`tdown_filter`], sorted ascending.
///
/// Within each class, examples are ranked by |Δ| descending (ties by index)
/// and the first `ceil(k/100 · n_class)` are kept.
pub fn tdown_indices(dataset: &Dataset, k: u8) -> Result<Vec<usize>> {
    if !(1..=100).contains(&k) {
        return Err(Error::invalid(format!("tdown percentage must be in 1..=100, got {k}")));
    }
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut kept = Vec::new();
    for label in [Label::Neg, Label::Pos] {
        let mut members = dataset.class_indices(label);
        let keep = (members.len() * k as usize).div_ceil(100);
        let cost = |i: usize| dataset.examples()[i].cost();
        members.sort_by(|&a, &b| cost(b).total_cmp(&cost(a)).then(a.cmp(&b)));
        kept.extend_from_slice(&members[..keep]);
    }
    kept.sort_unstable();
    Ok(kept)
}

/// Per-class top-k% filter by |Δ|.
pub fn tdown_filter(dataset: &Dataset, k: u8) -> Result<Dataset> {
    Ok(dataset.subset(&tdown_indices(dataset, k)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::Strategy;
    use crate::datasets::CostSource;
    use proptest::prelude::*;

    fn dataset(deltas: &[f64]) -> Dataset {
        let features = (0..deltas.len()).map(|i| vec![i as f64]).collect();
        Dataset::from_parts("s", CostSource::Precomputed, features, deltas.to_vec()).unwrap()
    }

    #[test]
    fn strategy_names() {
        for s in ["uniform", "p_up", "tdown30", "tdown100"] {
            assert_eq!(s.parse::<Strategy>().unwrap().to_string(), s);
        }
        assert!("tdown0".parse::<Strategy>().is_err());
        assert!("tdown101".parse::<Strategy>().is_err());
        assert!("tdownx".parse::<Strategy>().is_err());
        assert!("weighted".parse::<Strategy>().is_err());
    }

    #[test]
    fn p_up_equal_costs_keeps_size() {
        let ds = dataset(&[1.0, 1.0]);
        for seed in 0..20 {
            let out = p_up_resample(&ds, seed).unwrap();
            assert_eq!(out.len(), 2);
        }
    }

    #[test]
    fn p_up_never_draws_zero_cost() {
        // Δ = 0 is class +1, so this class holds costs [2, 0]
        let ds = dataset(&[2.0, 0.0, -1.0]);
        for seed in 0..200 {
            let idx = p_up_indices(&ds, seed).unwrap();
            assert!(!idx.contains(&1));
            assert_eq!(idx.len(), 3);
        }
    }

    #[test]
    fn p_up_zero_cost_class_rejected() {
        let ds = dataset(&[0.0, 0.0, -1.0]);
        assert!(matches!(p_up_resample(&ds, 1), Err(Error::ZeroCostClass(Label::Pos))));
    }

    #[test]
    fn p_up_seeded() {
        let ds = dataset(&[1.0, 2.0, 3.0, -1.0, -5.0]);
        assert_eq!(p_up_indices(&ds, 4).unwrap(), p_up_indices(&ds, 4).unwrap());
    }

    #[test]
    fn tdown_cases() {
        let distinct: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let kept = tdown_indices(&dataset(&distinct), 30).unwrap();
        assert_eq!(kept, vec![7, 8, 9]);

        let kept = tdown_indices(&dataset(&[5.0, 5.0, 1.0, 1.0]), 50).unwrap();
        assert_eq!(kept, vec![0, 1]);

        let ds = dataset(&[1.0, -2.0, 0.5, -0.1, 3.0]);
        assert_eq!(tdown_filter(&ds, 100).unwrap(), ds);

        // ceil keeps one example of a singleton class
        let kept = tdown_indices(&dataset(&[1.0, -4.0, -2.0, -3.0]), 30).unwrap();
        assert_eq!(kept, vec![0, 1]);

        // ties broken by index
        let kept = tdown_indices(&dataset(&[2.0, 2.0, 2.0]), 50).unwrap();
        assert_eq!(kept, vec![0, 1]);
    }

    #[test]
    fn tdown_rejects_bad_input() {
        assert!(tdown_filter(&dataset(&[1.0]), 0).is_err());
        assert!(tdown_filter(&dataset(&[1.0]), 101).is_err());
        assert!(matches!(tdown_filter(&dataset(&[]), 50), Err(Error::EmptyDataset)));
    }

    #[test]
    fn passthrough_is_identity() {
        for ds in [dataset(&[]), dataset(&[1.0]), dataset(&[1.0, -2.0, 0.0])] {
            assert_eq!(uniform_passthrough(&ds), ds);
            let plan = SamplingPlan {
                strategy: Strategy::Uniform,
                seed: 0,
            };
            assert_eq!(plan.apply(&ds).unwrap(), ds);
        }
    }

    proptest! {
        #[test]
        fn p_up_preserves_class_counts(
            deltas in prop::collection::vec((0.01f64..5.0, any::<bool>()), 1..60),
            seed in any::<u64>(),
        ) {
            let deltas: Vec<f64> = deltas.into_iter().map(|(m, s)| if s { m } else { -m }).collect();
            let ds = dataset(&deltas);
            let out = p_up_resample(&ds, seed).unwrap();
            for label in [Label::Neg, Label::Pos] {
                prop_assert_eq!(out.class_count(label), ds.class_count(label));
            }
        }

        #[test]
        fn tdown_is_nested_and_separating(
            deltas in prop::collection::vec(-5.0f64..5.0, 1..60),
            k1 in 1u8..=100,
            k2 in 1u8..=100,
        ) {
            let ds = dataset(&deltas);
            let (lo, hi) = (k1.min(k2), k1.max(k2));
            let small = tdown_indices(&ds, lo).unwrap();
            let large = tdown_indices(&ds, hi).unwrap();
            prop_assert!(small.iter().all(|i| large.contains(i)));

            for label in [Label::Neg, Label::Pos] {
                let members = ds.class_indices(label);
                let cost = |i: &usize| ds.examples()[*i].cost();
                let kept_min = members.iter().filter(|i| small.contains(i)).map(cost).fold(f64::INFINITY, f64::min);
                let dropped_max = members.iter().filter(|i| !small.contains(i)).map(cost).fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(kept_min >= dropped_max);
            }
        }
    }
}
