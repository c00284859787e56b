//! Normalized Excess Cost, error rate and their multi-seed aggregates.
//!
//! NEC is the cost-weighted error with costs normalized to mean one:
//!
//! ```text
//! NEC = Σ |Δ_i| · 1[ŷ_i ≠ sign(Δ_i)] / Σ |Δ_i|
//! ```
//!
//! Under uniform costs it equals the error rate; `error_rate / nec > 1`
//! means the mistakes sit on low-cost (ambiguous) examples.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::cost_model::Label;
use crate::datasets::Dataset;
use crate::error::{Error, Result};

/// Half-width added on each side of a zero-width Δ range in [`delta_histogram`].
pub const DEGENERATE_HISTOGRAM_HALF_WIDTH: f64 = 0.5;

/// Two-sided confidence level of [`aggregate`].
pub const CONFIDENCE_LEVEL: f64 = 0.95;

/// Continuous outputs attached to predictions.
#[derive(Debug, Clone, PartialEq)]
pub enum Scores {
    /// p̂(x) ∈ [0, 1].
    Probability(Vec<f64>),
    /// Δ̂(x), an estimate of the signed cost.
    Delta(Vec<f64>),
}

impl Scores {
    pub fn values(&self) -> &[f64] {
        match self {
            Scores::Probability(v) | Scores::Delta(v) => v,
        }
    }
}

/// Per-example decisions, index-aligned with a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Predictions {
    labels: Vec<Label>,
    scores: Option<Scores>,
}

impl Predictions {
    pub fn new(labels: Vec<Label>) -> Self {
        Predictions {
            labels,
            scores: None,
        }
    }

    pub fn with_scores(labels: Vec<Label>, scores: Scores) -> Result<Self> {
        if scores.values().len() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: labels.len(),
                got: scores.values().len(),
            });
        }
        if scores.values().iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite("scores"));
        }
        if let Scores::Probability(p) = &scores {
            if p.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::invalid("probability scores must lie in [0, 1]"));
            }
        }
        Ok(Predictions {
            labels,
            scores: Some(scores),
        })
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn scores(&self) -> Option<&Scores> {
        self.scores.as_ref()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

fn check_aligned(dataset: &Dataset, preds: &Predictions) -> Result<()> {
    if dataset.len() != preds.len() {
        return Err(Error::LengthMismatch {
            expected: dataset.len(),
            got: preds.len(),
        });
    }
    Ok(())
}

pub fn nec(dataset: &Dataset, preds: &Predictions) -> Result<f64> {
    check_aligned(dataset, preds)?;
    let mut lost = 0.0;
    let mut total = 0.0;
    for (ex, &y) in dataset.examples().iter().zip(preds.labels()) {
        let cost = ex.cost();
        total += cost;
        if y != ex.label() {
            lost += cost;
        }
    }
    if total == 0.0 {
        return Err(Error::DegenerateCosts);
    }
    Ok(lost / total)
}

pub fn error_rate(dataset: &Dataset, preds: &Predictions) -> Result<f64> {
    check_aligned(dataset, preds)?;
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let wrong = dataset
        .labels()
        .zip(preds.labels())
        .filter(|(truth, y)| truth != *y)
        .count();
    Ok(wrong as f64 / dataset.len() as f64)
}

/// Mean absolute error of Δ̂ against Δ. Needs [`Scores::Delta`].
pub fn delta_mae(dataset: &Dataset, preds: &Predictions) -> Result<f64> {
    check_aligned(dataset, preds)?;
    let Some(Scores::Delta(est)) = preds.scores() else {
        return Err(Error::MissingScores);
    };
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let sum: f64 = dataset.deltas().zip(est).map(|(d, e)| (e - d).abs()).sum();
    Ok(sum / dataset.len() as f64)
}

/// Metrics of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub nec: f64,
    pub error_rate: f64,
    /// `error_rate / nec`; `None` when NEC is zero.
    pub ratio: Option<f64>,
    pub delta_mae: Option<f64>,
    pub n: usize,
}

/// NEC, error rate and their ratio; Δ-MAE when the scores are Δ estimates.
pub fn evaluate(dataset: &Dataset, preds: &Predictions) -> Result<MetricReport> {
    let nec = nec(dataset, preds)?;
    let error_rate = error_rate(dataset, preds)?;
    let delta_mae = match preds.scores() {
        Some(Scores::Delta(_)) => Some(delta_mae(dataset, preds)?),
        _ => None,
    };
    Ok(MetricReport {
        nec,
        error_rate,
        ratio: ratio(error_rate, nec),
        delta_mae,
        n: dataset.len(),
    })
}

pub fn ratio(error_rate: f64, nec: f64) -> Option<f64> {
    (nec > 0.0).then(|| error_rate / nec)
}

/// Mean and symmetric confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub mean: f64,
    pub half_width: f64,
}

impl Interval {
    /// Student-t interval at [`CONFIDENCE_LEVEL`] with `n − 1` degrees of freedom.
    pub fn from_samples(xs: &[f64]) -> Result<Interval> {
        let n = xs.len();
        if n < 2 {
            return Err(Error::TooFewReports(n));
        }
        if xs.iter().all(|&x| x == xs[0]) {
            return Ok(Interval {
                mean: xs[0],
                half_width: 0.0,
            });
        }
        let nf = n as f64;
        let mean = xs.iter().sum::<f64>() / nf;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0);
        let t = t_quantile(0.5 + CONFIDENCE_LEVEL / 2.0, nf - 1.0);
        Ok(Interval {
            mean,
            half_width: t * var.sqrt() / nf.sqrt(),
        })
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.mean).abs() <= self.half_width
    }
}

fn t_quantile(p: f64, dof: f64) -> f64 {
    StudentsT::new(0.0, 1.0, dof)
        .expect("dof >= 1 is a valid Student-t")
        .inverse_cdf(p)
}

/// Per-metric confidence intervals over seeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub nec: Interval,
    pub error_rate: Interval,
    pub delta_mae: Option<Interval>,
    pub n_seeds: usize,
}

impl AggregateReport {
    /// `error_rate.mean / nec.mean`, the ratio column of the report tables.
    pub fn ratio(&self) -> Option<f64> {
        ratio(self.error_rate.mean, self.nec.mean)
    }
}

pub fn aggregate(reports: &[MetricReport]) -> Result<AggregateReport> {
    if reports.len() < 2 {
        return Err(Error::TooFewReports(reports.len()));
    }
    let column = |f: fn(&MetricReport) -> f64| reports.iter().map(f).collect::<Vec<_>>();
    let maes: Option<Vec<f64>> = reports.iter().map(|r| r.delta_mae).collect();
    Ok(AggregateReport {
        nec: Interval::from_samples(&column(|r| r.nec))?,
        error_rate: Interval::from_samples(&column(|r| r.error_rate))?,
        delta_mae: maes.map(|m| Interval::from_samples(&m)).transpose()?,
        n_seeds: reports.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub low: f64,
    pub high: f64,
    pub count: usize,
}

/// Equal-width histogram of Δ over `[min Δ, max Δ]`. Bins are half-open
/// except the last, which includes its upper edge.
pub fn delta_histogram(dataset: &Dataset, bins: usize) -> Result<Vec<HistogramBin>> {
    if bins == 0 {
        return Err(Error::invalid("histogram needs at least one bin"));
    }
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let (mut lo, mut hi) = dataset
        .deltas()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d), hi.max(d)));
    if lo == hi {
        lo -= DEGENERATE_HISTOGRAM_HALF_WIDTH;
        hi += DEGENERATE_HISTOGRAM_HALF_WIDTH;
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for d in dataset.deltas() {
        let k = (((d - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(k, count)| HistogramBin {
            low: lo + k as f64 * width,
            high: if k + 1 == bins { hi } else { lo + (k + 1) as f64 * width },
            count,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost_model::label_of;
    use crate::datasets::CostSource;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn dataset(deltas: &[f64]) -> Dataset {
        let features = vec![vec![]; deltas.len()];
        Dataset::from_parts("m", CostSource::Precomputed, features, deltas.to_vec()).unwrap()
    }

    /// Predictions that are correct except at `wrong`.
    fn preds_wrong_at(ds: &Dataset, wrong: &[usize]) -> Predictions {
        Predictions::new(
            ds.labels()
                .enumerate()
                .map(|(i, l)| if wrong.contains(&i) { l.flipped() } else { l })
                .collect(),
        )
    }

    #[test]
    fn nec_hand_values() {
        let ds = dataset(&[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(nec(&ds, &preds_wrong_at(&ds, &[2])).unwrap(), 0.25);

        let ds = dataset(&[2.0, 1.0, 1.0]);
        assert_eq!(nec(&ds, &preds_wrong_at(&ds, &[0])).unwrap(), 0.5);
        let p = preds_wrong_at(&ds, &[1]);
        assert_eq!(nec(&ds, &p).unwrap(), 0.25);
        assert_abs_diff_eq!(error_rate(&ds, &p).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn nec_ignores_zero_cost_examples() {
        let ds = dataset(&[2.0, 0.0, -2.0]);
        // Δ = 0 is labelled +1; predicting −1 there costs nothing
        let p = preds_wrong_at(&ds, &[1]);
        assert_eq!(nec(&ds, &p).unwrap(), 0.0);
        assert_abs_diff_eq!(error_rate(&ds, &p).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_and_misaligned_inputs() {
        let ds = dataset(&[0.0, 0.0]);
        assert!(matches!(
            nec(&ds, &preds_wrong_at(&ds, &[])),
            Err(Error::DegenerateCosts)
        ));
        let ds = dataset(&[1.0, -1.0]);
        assert!(matches!(
            nec(&ds, &Predictions::new(vec![Label::Pos])),
            Err(Error::LengthMismatch { expected: 2, got: 1 })
        ));
        let empty = dataset(&[]);
        assert!(matches!(
            error_rate(&empty, &Predictions::new(vec![])),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn error_rate_bounds() {
        let ds = dataset(&[1.0, -2.0, 3.0]);
        assert_eq!(error_rate(&ds, &preds_wrong_at(&ds, &[])).unwrap(), 0.0);
        assert_eq!(error_rate(&ds, &preds_wrong_at(&ds, &[0, 1, 2])).unwrap(), 1.0);
        assert_eq!(nec(&ds, &preds_wrong_at(&ds, &[0, 1, 2])).unwrap(), 1.0);
        assert_abs_diff_eq!(
            error_rate(&ds, &preds_wrong_at(&ds, &[1])).unwrap(),
            0.3333,
            epsilon = 1e-4
        );
    }

    #[test]
    fn delta_mae_values() {
        let ds = dataset(&[1.0, -1.0]);
        let labels: Vec<Label> = ds.labels().collect();
        let exact = Predictions::with_scores(labels.clone(), Scores::Delta(vec![1.0, -1.0])).unwrap();
        assert_eq!(delta_mae(&ds, &exact).unwrap(), 0.0);
        let half = Predictions::with_scores(labels.clone(), Scores::Delta(vec![0.5, -0.5])).unwrap();
        assert_eq!(delta_mae(&ds, &half).unwrap(), 0.5);

        let ds = dataset(&[2.0]);
        let p = Predictions::with_scores(vec![Label::Neg], Scores::Delta(vec![-1.0])).unwrap();
        assert_eq!(delta_mae(&ds, &p).unwrap(), 3.0);

        let no_scores = Predictions::new(vec![Label::Pos]);
        assert!(matches!(delta_mae(&ds, &no_scores), Err(Error::MissingScores)));
        let prob = Predictions::with_scores(vec![Label::Pos], Scores::Probability(vec![0.7])).unwrap();
        assert!(matches!(delta_mae(&ds, &prob), Err(Error::MissingScores)));
    }

    #[test]
    fn probability_scores_validated() {
        assert!(Predictions::with_scores(vec![Label::Pos], Scores::Probability(vec![1.2])).is_err());
        assert!(Predictions::with_scores(vec![Label::Pos], Scores::Delta(vec![1.0, 2.0])).is_err());
    }

    #[test]
    fn evaluate_fills_ratio_and_mae() {
        let ds = dataset(&[2.0, 1.0, -1.0]);
        let p = Predictions::with_scores(
            vec![Label::Pos, Label::Neg, Label::Neg],
            Scores::Delta(vec![2.0, -1.0, -1.0]),
        )
        .unwrap();
        let r = evaluate(&ds, &p).unwrap();
        assert_eq!(r.nec, 0.25);
        assert_abs_diff_eq!(r.ratio.unwrap(), (1.0 / 3.0) / 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(r.delta_mae.unwrap(), 2.0 / 3.0, epsilon = 1e-15);

        let perfect = Predictions::new(ds.labels().collect());
        assert_eq!(evaluate(&ds, &perfect).unwrap().ratio, None);
    }

    fn report(nec: f64, err: f64) -> MetricReport {
        MetricReport {
            nec,
            error_rate: err,
            ratio: ratio(err, nec),
            delta_mae: None,
            n: 10,
        }
    }

    #[test]
    fn aggregate_zero_variance() {
        let agg = aggregate(&[report(0.05, 0.1); 3]).unwrap();
        assert_eq!(agg.nec.mean, 0.05);
        assert_eq!(agg.nec.half_width, 0.0);
        assert_eq!(agg.n_seeds, 3);
        assert_eq!(agg.delta_mae, None);
    }

    #[test]
    fn aggregate_two_samples_closed_form() {
        // t_{0.975,1} = tan(0.95·π/2) (Cauchy quantile); sd of {0.04, 0.06} is 0.01·√2
        let t = (0.95 * std::f64::consts::FRAC_PI_2).tan();
        let expected = t * (0.01 * 2f64.sqrt()) / 2f64.sqrt();
        let agg = aggregate(&[report(0.04, 0.0), report(0.06, 0.0)]).unwrap();
        assert_abs_diff_eq!(agg.nec.mean, 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(agg.nec.half_width, expected, epsilon = 1e-9);
        assert_abs_diff_eq!(agg.nec.half_width, 0.1271, epsilon = 1e-4);
    }

    #[test]
    fn aggregate_needs_two_reports() {
        assert!(matches!(aggregate(&[report(0.1, 0.1)]), Err(Error::TooFewReports(1))));
        assert!(matches!(aggregate(&[]), Err(Error::TooFewReports(0))));
    }

    #[test]
    fn aggregate_mae_only_when_every_report_has_it() {
        let mut a = report(0.1, 0.2);
        let mut b = report(0.2, 0.3);
        a.delta_mae = Some(1.0);
        b.delta_mae = Some(3.0);
        assert_abs_diff_eq!(aggregate(&[a, b]).unwrap().delta_mae.unwrap().mean, 2.0);
        b.delta_mae = None;
        assert_eq!(aggregate(&[a, b]).unwrap().delta_mae, None);
    }

    #[test]
    fn t_interval_coverage() {
        // 10 draws of c + N(0, 0.01²): the interval should cover c ~95% of the time
        use rand::SeedableRng;
        use rand_distr::{Distribution, Normal};
        let noise = Normal::new(0.0, 0.01).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let trials = 4000;
        let covered = (0..trials)
            .filter(|_| {
                let xs: Vec<f64> = (0..10).map(|_| 0.05 + noise.sample(&mut rng)).collect();
                Interval::from_samples(&xs).unwrap().contains(0.05)
            })
            .count();
        let rate = covered as f64 / trials as f64;
        // binomial sd at p = 0.95 over 4000 trials is ~0.0034
        assert!((rate - 0.95).abs() < 0.015, "coverage {rate}");
    }

    #[test]
    fn histogram_cases() {
        let h = delta_histogram(&dataset(&[-1.0, 1.0]), 2).unwrap();
        assert_eq!(h.iter().map(|b| b.count).collect::<Vec<_>>(), vec![1, 1]);
        assert_eq!((h[0].low, h[0].high, h[1].high), (-1.0, 0.0, 1.0));

        let h = delta_histogram(&dataset(&[0.0, 0.0, 0.0]), 1).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h[0].count, 3);
        assert!(h[0].low < 0.0 && h[0].high > 0.0);

        let deltas: Vec<f64> = (0..1000).map(|i| ((i * 7919) % 1000) as f64 / 37.0 - 9.0).collect();
        let h = delta_histogram(&dataset(&deltas), 10).unwrap();
        assert_eq!(h.iter().map(|b| b.count).sum::<usize>(), 1000);

        assert!(delta_histogram(&dataset(&[1.0]), 0).is_err());
        assert!(matches!(delta_histogram(&dataset(&[]), 3), Err(Error::EmptyDataset)));
    }

    proptest! {
        #[test]
        fn uniform_cost_reduces_to_error_rate(
            signs in prop::collection::vec(any::<bool>(), 1..50),
            flips in prop::collection::vec(any::<bool>(), 50),
            c in 1e-3f64..1e3,
        ) {
            let deltas: Vec<f64> = signs.iter().map(|&s| if s { c } else { -c }).collect();
            let ds = dataset(&deltas);
            let p = Predictions::new(ds.labels().zip(&flips).map(|(l, &f)| if f { l.flipped() } else { l }).collect());
            prop_assert!((nec(&ds, &p).unwrap() - error_rate(&ds, &p).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn nec_and_error_in_unit_interval(
            deltas in prop::collection::vec(-10.0f64..10.0, 1..40),
            labels in prop::collection::vec(any::<bool>(), 40),
        ) {
            prop_assume!(deltas.iter().any(|d| *d != 0.0));
            let ds = dataset(&deltas);
            let p = Predictions::new(labels[..deltas.len()].iter().map(|&b| if b { Label::Pos } else { Label::Neg }).collect());
            let r = evaluate(&ds, &p).unwrap();
            prop_assert!((0.0..=1.0).contains(&r.nec));
            prop_assert!((0.0..=1.0).contains(&r.error_rate));
        }

        #[test]
        fn histogram_conserves_count(deltas in prop::collection::vec(-1e3f64..1e3, 1..200), bins in 1usize..30) {
            let h = delta_histogram(&dataset(&deltas), bins).unwrap();
            prop_assert_eq!(h.len(), bins);
            prop_assert_eq!(h.iter().map(|b| b.count).sum::<usize>(), deltas.len());
        }

        #[test]
        fn labels_follow_sign(d in -1e3f64..1e3) {
            let ds = dataset(&[d]);
            prop_assert_eq!(ds.examples()[0].label(), label_of(d));
        }
    }
}
