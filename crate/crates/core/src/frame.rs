//! CSI frames, fixed-length windows, and window assembly from a frame stream.

use std::collections::BTreeMap;

use crate::config::DetectorConfig;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Inter-frame gaps must stay within this fraction of the nominal period.
pub const GAP_TOLERANCE: f64 = 0.5;

/// One packet's channel estimate on one Tx-Rx stream.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiFrame {
    pub timestamp_us: u64,
    pub stream_id: u16,
    pub values: Vec<Complex64>,
    /// Linear AGC gain reported with the packet, if any. Diagnostic only.
    pub agc_gain: Option<f64>,
}

impl CsiFrame {
    pub fn new(
        timestamp_us: u64,
        stream_id: u16,
        values: Vec<Complex64>,
        agc_gain: Option<f64>,
    ) -> Result<Self> {
        if let Some(i) = values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::Domain(format!(
                "non-finite CSI value at subcarrier {i}"
            )));
        }
        Ok(Self {
            timestamp_us,
            stream_id,
            values,
            agc_gain,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `window_len` consecutive frames of one stream.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiWindow {
    /// Position on the global window grid, shared across streams.
    pub index: u64,
    frames: Vec<CsiFrame>,
    nominal_rate: f64,
}

impl CsiWindow {
    pub fn new(index: u64, frames: Vec<CsiFrame>, nominal_rate: f64) -> Result<Self> {
        if frames.len() < 2 {
            return Err(Error::InvalidWindow(format!(
                "need at least 2 frames, got {}",
                frames.len()
            )));
        }
        if !(nominal_rate.is_finite() && nominal_rate > 0.0) {
            return Err(Error::param("nominal_rate", "must be positive"));
        }
        let first = &frames[0];
        let period_us = 1e6 / nominal_rate;
        for (i, pair) in frames.windows(2).enumerate() {
            let next = &pair[1];
            if next.stream_id != first.stream_id {
                return Err(Error::InvalidWindow(format!(
                    "frame {} belongs to another stream",
                    i + 1
                )));
            }
            if next.len() != first.len() {
                return Err(Error::InvalidWindow(format!(
                    "frame {} changes subcarrier count",
                    i + 1
                )));
            }
            if !gap_ok(pair[0].timestamp_us, next.timestamp_us, period_us) {
                return Err(Error::InvalidWindow(format!(
                    "gap before frame {} is outside tolerance",
                    i + 1
                )));
            }
        }
        Ok(Self {
            index,
            frames,
            nominal_rate,
        })
    }

    pub fn frames(&self) -> &[CsiFrame] {
        &self.frames
    }

    pub fn nominal_rate(&self) -> f64 {
        self.nominal_rate
    }

    pub fn stream_id(&self) -> u16 {
        self.frames[0].stream_id
    }

    /// Number of frames (T).
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Number of subcarriers (K).
    pub fn subcarriers(&self) -> usize {
        self.frames[0].len()
    }

    pub fn start_us(&self) -> u64 {
        self.frames[0].timestamp_us
    }
}

fn gap_ok(prev_us: u64, next_us: u64, period_us: f64) -> bool {
    if next_us <= prev_us {
        return false;
    }
    let gap = (next_us - prev_us) as f64;
    (gap - period_us).abs() <= GAP_TOLERANCE * period_us
}

/// Splits a frame stream into fixed-length windows, one list per stream.
///
/// Within each stream a gap outside tolerance (or a non-increasing
/// timestamp) drops the partial window in progress and starts a new run.
/// Trailing frames that do not fill a window are dropped. Window indices
/// are placed on a grid anchored at the earliest timestamp of the whole
/// input so that windows of different streams covering the same interval
/// share an index.
pub fn assemble_windows(
    frames: &[CsiFrame],
    config: &DetectorConfig,
    nominal_rate: f64,
) -> Result<BTreeMap<u16, Vec<CsiWindow>>> {
    config.validate()?;
    if !(nominal_rate.is_finite() && nominal_rate > 0.0) {
        return Err(Error::param("nominal_rate", "must be positive"));
    }
    let mut out = BTreeMap::new();
    let Some(origin) = frames.iter().map(|f| f.timestamp_us).min() else {
        return Ok(out);
    };

    let mut by_stream: BTreeMap<u16, Vec<usize>> = BTreeMap::new();
    for (i, f) in frames.iter().enumerate() {
        by_stream.entry(f.stream_id).or_default().push(i);
    }

    let period_us = 1e6 / nominal_rate;
    let step = config.step();
    let step_us = period_us * step as f64;

    for (stream, idx) in by_stream {
        let expected = frames[idx[0]].len();
        if let Some(&bad) = idx.iter().find(|&&i| frames[i].len() != expected) {
            return Err(Error::ShapeMismatch {
                frame: bad,
                stream,
                expected,
                found: frames[bad].len(),
            });
        }

        let mut windows = Vec::new();
        let mut run_start = 0;
        for k in 1..=idx.len() {
            let breaks = k == idx.len()
                || !gap_ok(
                    frames[idx[k - 1]].timestamp_us,
                    frames[idx[k]].timestamp_us,
                    period_us,
                );
            if !breaks {
                continue;
            }
            let run = &idx[run_start..k];
            let mut start = 0;
            while start + config.window_len <= run.len() {
                let members: Vec<CsiFrame> = run[start..start + config.window_len]
                    .iter()
                    .map(|&i| frames[i].clone())
                    .collect();
                let offset = (members[0].timestamp_us - origin) as f64;
                let index = (offset / step_us).round() as u64;
                windows.push(CsiWindow::new(index, members, nominal_rate)?);
                start += step;
            }
            run_start = k;
        }
        out.insert(stream, windows);
    }
    Ok(out)
}
