use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spacing-to-center ratio above which the frequency-flat reflection
/// assumption starts to break down.
const FLAT_REFLECTION_RATIO: f64 = 1e-2;

/// Frequency layout of an OFDM channel: `count` subcarriers spaced `spacing`
/// Hz apart, centered on `center_freq`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubcarrierGrid {
    center_freq: f64,
    spacing: f64,
    count: usize,
}

impl SubcarrierGrid {
    pub fn new(center_freq: f64, spacing: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::param(
                "count",
                format!("need at least 2 subcarriers, got {count}"),
            ));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::param(
                "spacing",
                format!("must be positive, got {spacing}"),
            ));
        }
        if !(center_freq.is_finite() && center_freq > 0.0) {
            return Err(Error::param(
                "center_freq",
                format!("must be positive, got {center_freq}"),
            ));
        }
        let grid = Self {
            center_freq,
            spacing,
            count,
        };
        if spacing / center_freq > FLAT_REFLECTION_RATIO {
            log::warn!(
                "subcarrier spacing {spacing} Hz is large relative to center {center_freq} Hz; \
                 per-subcarrier reflection is no longer approximately flat"
            );
        }
        if grid.frequency(0) <= 0.0 {
            return Err(Error::param(
                "count",
                "lowest subcarrier frequency is not positive",
            ));
        }
        Ok(grid)
    }

    /// 80 MHz channel 155 (5775 MHz) with 234 usable subcarriers at 312.5 kHz.
    pub fn channel_155() -> Self {
        Self {
            center_freq: 5.775e9,
            spacing: 312.5e3,
            count: 234,
        }
    }

    pub fn center_freq(&self) -> f64 {
        self.center_freq
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Frequency of subcarrier `index`, counted from the lowest.
    pub fn frequency(&self, index: usize) -> f64 {
        let offset = index as f64 - (self.count as f64 - 1.0) / 2.0;
        self.center_freq + offset * self.spacing
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.frequency(i)).collect()
    }
}

impl Default for SubcarrierGrid {
    fn default() -> Self {
        Self::channel_155()
    }
}
