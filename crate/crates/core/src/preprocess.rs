//! Amplitude extraction and per-entry power normalization.
//!
//! Dividing each CSI entry by its summed amplitude removes any gain that is
//! common to all subcarriers of that entry, which is how residual AGC steps
//! are cancelled. Phase is dropped here and never reaches the detector.

use crate::error::{Error, Result};
use crate::frame::CsiWindow;
use crate::matrix::RowMatrix;

/// T × K matrix of CSI amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeWindow {
    pub values: RowMatrix,
    pub stream_id: u16,
    pub window_index: u64,
}

impl AmplitudeWindow {
    pub fn new(values: RowMatrix, stream_id: u16, window_index: u64) -> Result<Self> {
        if values
            .as_slice()
            .iter()
            .any(|v| !(v.is_finite() && *v >= 0.0))
        {
            return Err(Error::Domain(
                "amplitudes must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            values,
            stream_id,
            window_index,
        })
    }
}

/// Row-normalized amplitudes: every row sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedWindow {
    pub values: RowMatrix,
    /// Per-row amplitude sums that were divided out.
    pub row_sums: Vec<f64>,
    pub stream_id: u16,
    pub window_index: u64,
}

impl NormalizedWindow {
    /// Number of entries (T).
    pub fn len(&self) -> usize {
        self.values.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.rows() == 0
    }

    /// Number of subcarriers (K).
    pub fn subcarriers(&self) -> usize {
        self.values.cols()
    }
}

pub fn amplitude(window: &CsiWindow) -> AmplitudeWindow {
    let frames = window.frames();
    let mut values = RowMatrix::zeros(frames.len(), window.subcarriers());
    for (t, frame) in frames.iter().enumerate() {
        for (out, v) in values.row_mut(t).iter_mut().zip(&frame.values) {
            *out = v.norm();
        }
    }
    AmplitudeWindow {
        values,
        stream_id: window.stream_id(),
        window_index: window.index,
    }
}

/// s(t): summed amplitude of each row.
pub fn row_power(amp: &AmplitudeWindow) -> Vec<f64> {
    amp.values.iter_rows().map(|r| r.iter().sum()).collect()
}

pub fn normalize(amp: &AmplitudeWindow) -> Result<NormalizedWindow> {
    let sums = row_power(amp);
    if let Some(row) = sums.iter().position(|&s| s <= 0.0) {
        return Err(Error::DegenerateFrame { row });
    }
    let mut values = amp.values.clone();
    for (t, &s) in sums.iter().enumerate() {
        for v in values.row_mut(t) {
            *v /= s;
        }
    }
    Ok(NormalizedWindow {
        values,
        row_sums: sums,
        stream_id: amp.stream_id,
        window_index: amp.window_index,
    })
}

/// [`amplitude`] followed by [`normalize`].
pub fn preprocess(window: &CsiWindow) -> Result<NormalizedWindow> {
    normalize(&amplitude(window))
}
