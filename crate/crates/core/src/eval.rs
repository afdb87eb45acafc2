//! Detection metrics: confusion counts, threshold sweeps, ROC/AUC, CDFs and
//! a histogram overlap measure for comparing score distributions.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::DetectorConfig;
use crate::error::{Error, Result};
use crate::format::labels::WindowLabel;
use crate::indicator::Verdict;
use crate::sim::scene::Scenario;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl Confusion {
    pub fn add(&mut self, predicted: bool, actual: bool) {
        match (predicted, actual) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, false) => self.tn += 1,
            (false, true) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.total())
    }

    /// TP / (TP + FN); zero when there are no positives.
    pub fn tpr(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// FP / (FP + TN); zero when there are no negatives.
    pub fn fpr(&self) -> f64 {
        ratio(self.fp, self.fp + self.tn)
    }
}

pub fn confusion(predictions: &[bool], labels: &[bool]) -> Result<Confusion> {
    if predictions.len() != labels.len() {
        return Err(Error::Misaligned(format!(
            "{} predictions vs {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    let mut c = Confusion::default();
    for (&p, &l) in predictions.iter().zip(labels) {
        c.add(p, l);
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocCurve {
    /// Sorted by ascending threshold, from (1, 1) at -∞ to (0, 0) at +∞.
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

/// ROC of the rule `score ≥ η` over every distinct score.
///
/// The area is computed from the exact curve. When `resolution` is non-zero
/// and smaller than the number of points, the returned points are thinned
/// to about `resolution` entries (endpoints kept) for plotting.
pub fn roc_sweep(scores: &[f64], labels: &[bool], resolution: usize) -> Result<RocCurve> {
    if scores.len() != labels.len() {
        return Err(Error::Misaligned(format!(
            "{} scores vs {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let positives = labels.iter().filter(|&&l| l).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass {
            positives,
            negatives,
        });
    }
    let mut ranked: Vec<(f64, bool)> = scores.iter().copied().zip(labels.iter().copied()).collect();
    if ranked.iter().any(|(s, _)| s.is_nan()) {
        return Err(Error::Domain("NaN score".into()));
    }
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));

    // Walk thresholds from high to low.
    let mut descending = vec![RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < ranked.len() {
        let threshold = ranked[i].0;
        while i < ranked.len() && ranked[i].0 == threshold {
            if ranked[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        descending.push(RocPoint {
            threshold,
            fpr: fp as f64 / negatives as f64,
            tpr: tp as f64 / positives as f64,
        });
    }
    descending.push(RocPoint {
        threshold: f64::NEG_INFINITY,
        fpr: 1.0,
        tpr: 1.0,
    });

    let auc = descending
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0)
        .sum::<f64>()
        .clamp(0.0, 1.0);

    let mut points: Vec<RocPoint> = descending.into_iter().rev().collect();
    if resolution >= 2 && points.len() > resolution {
        let stride = (points.len() - 1) as f64 / (resolution - 1) as f64;
        let last = points.len() - 1;
        points = (0..resolution)
            .map(|j| points[((j as f64 * stride).round() as usize).min(last)])
            .collect();
    }
    Ok(RocCurve { points, auc })
}

/// Accuracy/TPR/FPR of `score ≥ η` at one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub threshold: f64,
    pub accuracy: f64,
    pub tpr: f64,
    pub fpr: f64,
}

pub fn threshold_sweep(
    scores: &[f64],
    labels: &[bool],
    thresholds: &[f64],
) -> Result<Vec<SweepPoint>> {
    thresholds
        .iter()
        .map(|&threshold| {
            let predictions: Vec<bool> = scores.iter().map(|&s| s >= threshold).collect();
            let c = confusion(&predictions, labels)?;
            Ok(SweepPoint {
                threshold,
                accuracy: c.accuracy(),
                tpr: c.tpr(),
                fpr: c.fpr(),
            })
        })
        .collect()
}

/// `steps` evenly spaced thresholds spanning the score range.
pub fn threshold_grid(scores: &[f64], steps: usize) -> Vec<f64> {
    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lo.is_finite() && hi.is_finite()) || steps < 2 {
        return vec![lo];
    }
    (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect()
}

/// Empirical CDF as sorted `(value, P[X ≤ value])` pairs.
pub fn empirical_cdf(values: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, v)| (v, (i + 1) as f64 / n))
        .collect()
}

/// Bhattacharyya coefficient of two samples, histogrammed on `bins` shared
/// bins over their joint range: 1 for identical distributions, 0 for
/// disjoint ones.
pub fn bhattacharyya(a: &[f64], b: &[f64], bins: usize) -> f64 {
    if a.is_empty() || b.is_empty() || bins == 0 {
        return 0.0;
    }
    let lo = a.iter().chain(b).copied().fold(f64::INFINITY, f64::min);
    let hi = a.iter().chain(b).copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        return 1.0;
    }
    let hist = |xs: &[f64]| {
        let mut h = vec![0.0; bins];
        for &x in xs {
            let i = (((x - lo) / (hi - lo)) * bins as f64) as usize;
            h[i.min(bins - 1)] += 1.0 / xs.len() as f64;
        }
        h
    };
    let (ha, hb) = (hist(a), hist(b));
    ha.iter().zip(&hb).map(|(p, q)| (p * q).sqrt()).sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioSummary {
    pub scenario: Scenario,
    pub windows: usize,
    pub correct: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvaluationReport {
    pub threshold: f64,
    pub confusion: Confusion,
    pub accuracy: f64,
    pub tpr: f64,
    pub fpr: f64,
    pub per_scenario: Vec<ScenarioSummary>,
    /// Absent when only one class is present.
    pub roc: Option<RocCurve>,
    pub cdf_present: Vec<(f64, f64)>,
    pub cdf_absent: Vec<(f64, f64)>,
}

/// Window-level labels: a window is occupied if any of its streams is.
pub fn window_truth(labels: &[WindowLabel]) -> BTreeMap<u64, (bool, Scenario)> {
    let mut truth: BTreeMap<u64, (bool, Scenario)> = BTreeMap::new();
    for l in labels {
        truth
            .entry(l.window_index)
            .and_modify(|(occupied, _)| *occupied |= l.label)
            .or_insert((l.label, l.scenario));
    }
    truth
}

/// Scores verdicts against labels, matched by window index.
pub fn evaluate(
    verdicts: &[Verdict],
    labels: &[WindowLabel],
    config: &DetectorConfig,
    roc_resolution: usize,
) -> Result<EvaluationReport> {
    let truth = window_truth(labels);
    let mut by_window = BTreeMap::new();
    for v in verdicts {
        if by_window.insert(v.window_index, v).is_some() {
            return Err(Error::Misaligned(format!(
                "duplicate verdict for window {}",
                v.window_index
            )));
        }
    }
    if let Some(w) = truth.keys().find(|w| !by_window.contains_key(w)) {
        return Err(Error::Misaligned(format!(
            "window {w} has a label but no verdict"
        )));
    }
    if let Some(w) = by_window.keys().find(|w| !truth.contains_key(w)) {
        return Err(Error::Misaligned(format!(
            "window {w} has a verdict but no label"
        )));
    }

    let mut c = Confusion::default();
    let mut per: BTreeMap<Scenario, (usize, usize)> = BTreeMap::new();
    let (mut scores, mut actual) = (Vec::new(), Vec::new());
    for (w, v) in &by_window {
        let (occupied, scenario) = truth[w];
        let predicted = v.final_decision(config);
        c.add(predicted, occupied);
        let entry = per.entry(scenario).or_default();
        entry.0 += 1;
        entry.1 += usize::from(predicted == occupied);
        scores.push(v.overall);
        actual.push(occupied);
    }
    let roc = match roc_sweep(&scores, &actual, roc_resolution) {
        Ok(r) => Some(r),
        Err(Error::SingleClass { .. }) => None,
        Err(e) => return Err(e),
    };
    let split = |want: bool| -> Vec<f64> {
        scores
            .iter()
            .zip(&actual)
            .filter(|(_, &a)| a == want)
            .map(|(&s, _)| s)
            .collect()
    };
    Ok(EvaluationReport {
        threshold: config.threshold,
        confusion: c,
        accuracy: c.accuracy(),
        tpr: c.tpr(),
        fpr: c.fpr(),
        per_scenario: per
            .into_iter()
            .map(|(scenario, (windows, correct))| ScenarioSummary {
                scenario,
                windows,
                correct,
                accuracy: ratio(correct, windows),
            })
            .collect(),
        roc,
        cdf_present: empirical_cdf(&split(true)),
        cdf_absent: empirical_cdf(&split(false)),
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn confusion_rates() {
        let c = Confusion {
            tp: 146,
            fn_: 1,
            tn: 120,
            fp: 2,
        };
        assert!((c.tpr() - 146.0 / 147.0).abs() < 1e-15);
        assert!((c.fpr() - 2.0 / 122.0).abs() < 1e-15);
        assert!((c.tpr() - 0.9932).abs() < 5e-5);
        assert!((c.fpr() - 0.0164).abs() < 5e-5);
    }

    #[test]
    fn perfect_and_inverted_predictions() {
        let labels = [true, false, true, false, false];
        let c = confusion(&labels, &labels).unwrap();
        assert_eq!((c.accuracy(), c.fpr(), c.tpr()), (1.0, 0.0, 1.0));
        let inverted: Vec<bool> = labels.iter().map(|l| !l).collect();
        assert_eq!(confusion(&inverted, &labels).unwrap().accuracy(), 0.0);
        assert!(confusion(&labels[..2], &labels).is_err());
    }

    #[test]
    fn separated_scores_have_unit_auc() {
        let roc = roc_sweep(&[0.9, 0.8, 0.1, 0.2], &[true, true, false, false], 0).unwrap();
        assert_eq!(roc.auc, 1.0);
        let first = roc.points.first().unwrap();
        let last = roc.points.last().unwrap();
        assert_eq!((first.fpr, first.tpr), (1.0, 1.0));
        assert_eq!((last.fpr, last.tpr), (0.0, 0.0));
        assert!(roc
            .points
            .windows(2)
            .all(|w| w[0].threshold <= w[1].threshold));
    }

    #[test]
    fn identical_distributions_have_half_auc() {
        let scores: Vec<f64> = (0..200).map(|i| (i % 100) as f64).collect();
        let labels: Vec<bool> = (0..200).map(|i| i < 100).collect();
        assert!((roc_sweep(&scores, &labels, 0).unwrap().auc - 0.5).abs() < 1e-12);
        let tied = roc_sweep(&[1.0; 4], &[true, false, true, false], 0).unwrap();
        assert_eq!(tied.auc, 0.5);
    }

    #[test]
    fn single_class_is_rejected() {
        assert!(matches!(
            roc_sweep(&[0.1, 0.2], &[true, true], 0),
            Err(Error::SingleClass {
                positives: 2,
                negatives: 0
            })
        ));
    }

    #[test]
    fn resolution_thins_points() {
        let scores: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        let labels: Vec<bool> = (0..1000).map(|i| i % 3 == 0).collect();
        let full = roc_sweep(&scores, &labels, 0).unwrap();
        let thin = roc_sweep(&scores, &labels, 50).unwrap();
        assert_eq!(thin.points.len(), 50);
        assert_eq!(thin.auc, full.auc);
        assert_eq!(thin.points[0], full.points[0]);
        assert_eq!(thin.points[49], *full.points.last().unwrap());
    }

    #[test]
    fn overlap_extremes() {
        let a = [0.0, 0.1, 0.2];
        assert!((bhattacharyya(&a, &a, 10) - 1.0).abs() < 1e-12);
        assert_eq!(bhattacharyya(&a, &[5.0, 5.1], 10), 0.0);
    }

    fn verdict(w: u64, overall: f64, raw: bool) -> Verdict {
        Verdict {
            window_index: w,
            overall,
            raw_decision: raw,
            smoothed_decision: Some(raw),
        }
    }

    fn label(w: u64, stream: u16, label: bool) -> WindowLabel {
        let scenario = if label {
            Scenario::Human
        } else {
            Scenario::Empty
        };
        WindowLabel {
            window_index: w,
            stream,
            label,
            scenario,
        }
    }

    #[test]
    fn evaluate_aligns_by_window() {
        let config = DetectorConfig::default();
        let verdicts = [
            verdict(1, 0.9, true),
            verdict(0, 0.1, false),
            verdict(2, 0.5, true),
        ];
        let labels = [
            label(0, 0, false),
            label(0, 1, false),
            label(1, 0, true),
            label(2, 1, false),
        ];
        let r = evaluate(&verdicts, &labels, &config, 0).unwrap();
        assert_eq!(
            r.confusion,
            Confusion {
                tp: 1,
                fp: 1,
                tn: 1,
                fn_: 0
            }
        );
        assert_eq!(r.per_scenario.len(), 2);
        assert!(r.roc.is_some());

        assert!(evaluate(&verdicts[..2], &labels, &config, 0).is_err());
        assert!(evaluate(&[verdict(9, 0.0, false)], &labels[..1], &config, 0).is_err());
    }

    proptest! {
        #[test]
        fn evaluate_ignores_window_order(
            entries in proptest::collection::vec((0.0f64..1.0, any::<bool>(), any::<bool>()), 2..40),
            seed in any::<u64>(),
        ) {
            let config = DetectorConfig::default();
            let verdicts: Vec<Verdict> = entries.iter().enumerate().map(|(i, e)| verdict(i as u64, e.0, e.1)).collect();
            let labels: Vec<WindowLabel> = entries.iter().enumerate().map(|(i, e)| label(i as u64, 0, e.2)).collect();
            let mut shuffled = verdicts.clone();
            let n = shuffled.len();
            for i in 0..n {
                shuffled.swap(i, (seed as usize).wrapping_mul(i + 7) % n);
            }
            let a = evaluate(&verdicts, &labels, &config, 0).unwrap();
            let b = evaluate(&shuffled, &labels, &config, 0).unwrap();
            prop_assert_eq!(a.confusion, b.confusion);
            prop_assert_eq!(a.roc.map(|r| r.auc), b.roc.map(|r| r.auc));
        }

        #[test]
        fn auc_in_unit_interval_and_rates_monotone(
            scores in proptest::collection::vec(-1.0f64..1.0, 2..60),
            flips in proptest::collection::vec(any::<bool>(), 60),
        ) {
            let mut labels: Vec<bool> = flips[..scores.len()].to_vec();
            labels[0] = true;
            labels[1] = false;
            let roc = roc_sweep(&scores, &labels, 0).unwrap();
            prop_assert!((0.0..=1.0).contains(&roc.auc));
            for w in roc.points.windows(2) {
                prop_assert!(w[1].tpr <= w[0].tpr && w[1].fpr <= w[0].fpr);
            }
        }
    }
}
