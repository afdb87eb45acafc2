//! End-to-end glue: frames → windows → per-stream statistics → verdicts.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::baseline::baseline_window_statistic;
use crate::config::DetectorConfig;
use crate::detector::detect_window;
use crate::error::Result;
use crate::frame::{assemble_windows, CsiFrame, CsiWindow};
use crate::indicator::{verdicts, window_statistic, Verdict, WindowStatistic};
use crate::preprocess::preprocess;

/// Which motion detector produces the per-stream window statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorKind {
    /// Multi-layer autocorrelation across subcarriers.
    Subcarrier,
    /// Lag-one autocorrelation of each subcarrier over time.
    TimeBaseline,
}

/// φ for one window of one stream.
pub fn score_window(
    window: &CsiWindow,
    config: &DetectorConfig,
    kind: DetectorKind,
) -> Result<WindowStatistic> {
    let normalized = preprocess(window)?;
    match kind {
        DetectorKind::Subcarrier => {
            let psi = detect_window(&normalized, config)?;
            Ok(window_statistic(
                &psi,
                window.stream_id(),
                window.index,
                config.statistic_mode,
            ))
        }
        DetectorKind::TimeBaseline => {
            let b = baseline_window_statistic(&normalized)?;
            Ok(WindowStatistic {
                phi: b.phi_time,
                stream_id: b.stream_id,
                window_index: b.window_index,
            })
        }
    }
}

/// Scores every window in parallel; output is ordered by (window, stream).
pub fn score_windows(
    windows: &BTreeMap<u16, Vec<CsiWindow>>,
    config: &DetectorConfig,
    kind: DetectorKind,
) -> Result<Vec<WindowStatistic>> {
    let all: Vec<&CsiWindow> = windows.values().flatten().collect();
    let mut stats = all
        .par_iter()
        .map(|w| score_window(w, config, kind))
        .collect::<Result<Vec<_>>>()?;
    stats.sort_by_key(|s| (s.window_index, s.stream_id));
    Ok(stats)
}

/// Full detector over a recording.
pub fn run_detector(
    frames: &[CsiFrame],
    nominal_rate: f64,
    config: &DetectorConfig,
    kind: DetectorKind,
) -> Result<Vec<Verdict>> {
    let windows = assemble_windows(frames, config, nominal_rate)?;
    let stats = score_windows(&windows, config, kind)?;
    verdicts(&stats, config)
}
