//! Presence indicator: window and overall statistics, threshold decision,
//! and majority-vote smoothing.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::config::{DetectorConfig, StatisticMode};
use crate::error::{Error, Result};

/// Per-stream statistic φ of one window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowStatistic {
    pub phi: f64,
    pub stream_id: u16,
    pub window_index: u64,
}

/// Decision for one window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub window_index: u64,
    /// Φ, summed over streams.
    pub overall: f64,
    pub raw_decision: bool,
    /// Majority of the last `m` raw decisions; `None` during warm-up.
    pub smoothed_decision: Option<bool>,
}

impl Verdict {
    /// Smoothed decision, with warm-up windows resolved by the safety mode.
    pub fn final_decision(&self, config: &DetectorConfig) -> bool {
        self.smoothed_decision
            .unwrap_or_else(|| config.safety_mode.warmup_decision())
    }
}

/// φ from the per-entry statistics ψ of one window.
pub fn window_statistic(
    psi: &[f64],
    stream_id: u16,
    window_index: u64,
    mode: StatisticMode,
) -> WindowStatistic {
    let sum: f64 = psi.iter().sum();
    let phi = match mode {
        StatisticMode::Sum => sum,
        StatisticMode::Mean if psi.is_empty() => 0.0,
        StatisticMode::Mean => sum / psi.len() as f64,
    };
    WindowStatistic {
        phi,
        stream_id,
        window_index,
    }
}

/// Φ: sum of φ over the streams of one window.
pub fn overall_statistic(stats: &[WindowStatistic]) -> Result<f64> {
    let first = stats
        .first()
        .ok_or_else(|| Error::EmptyInput("no stream statistics for window".into()))?;
    if let Some(other) = stats.iter().find(|s| s.window_index != first.window_index) {
        return Err(Error::Misaligned(format!(
            "window {} mixed with window {}",
            first.window_index, other.window_index
        )));
    }
    Ok(stats.iter().map(|s| s.phi).sum())
}

/// Present iff Φ ≥ η.
pub fn decide(overall: f64, threshold: f64) -> bool {
    overall >= threshold
}

/// Streaming majority vote over the last `m` raw decisions.
#[derive(Debug, Clone)]
pub struct Smoother {
    span: usize,
    recent: VecDeque<bool>,
}

impl Smoother {
    pub fn new(span: usize) -> Result<Self> {
        if span == 0 || span.is_multiple_of(2) {
            return Err(Error::param(
                "smooth_windows",
                "must be a positive odd number",
            ));
        }
        Ok(Self {
            span,
            recent: VecDeque::with_capacity(span),
        })
    }

    pub fn push(&mut self, raw: bool) -> Option<bool> {
        if self.recent.len() == self.span {
            self.recent.pop_front();
        }
        self.recent.push_back(raw);
        (self.recent.len() == self.span)
            .then(|| 2 * self.recent.iter().filter(|&&d| d).count() > self.span)
    }
}

pub fn smooth(decisions: &[bool], span: usize) -> Result<Vec<Option<bool>>> {
    let mut smoother = Smoother::new(span)?;
    Ok(decisions.iter().map(|&d| smoother.push(d)).collect())
}

/// Turns per-stream statistics into ordered verdicts. Windows are ordered
/// by index; a window missing some of the streams seen elsewhere is still
/// scored over the streams present.
pub fn verdicts(stats: &[WindowStatistic], config: &DetectorConfig) -> Result<Vec<Verdict>> {
    let mut grouped: std::collections::BTreeMap<u64, Vec<WindowStatistic>> = Default::default();
    for s in stats {
        grouped.entry(s.window_index).or_default().push(*s);
    }
    let streams = grouped.values().map(Vec::len).max().unwrap_or(0);
    let mut smoother = Smoother::new(config.smooth_windows)?;
    grouped
        .into_iter()
        .map(|(window_index, group)| {
            if group.len() < streams {
                log::warn!(
                    "window {window_index}: {} of {streams} streams present",
                    group.len()
                );
            }
            let overall = overall_statistic(&group)?;
            let raw_decision = decide(overall, config.threshold);
            Ok(Verdict {
                window_index,
                overall,
                raw_decision,
                smoothed_decision: smoother.push(raw_decision),
            })
        })
        .collect()
}
