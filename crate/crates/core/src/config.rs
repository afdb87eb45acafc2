//! Detector configuration and its flat `key=value` file representation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How per-entry motion statistics are folded into one window statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum StatisticMode {
    /// Average over the window's entries; keeps the threshold independent of
    /// window length.
    #[default]
    Mean,
    /// Plain sum over the window's entries.
    Sum,
}

/// Autocovariance estimator along the subcarrier axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AutocovMode {
    /// Biased estimator without mean removal.
    #[default]
    Raw,
    /// Subtract the sequence mean before estimating (ablation mode).
    Centered,
}

/// What a smoothed verdict reports before `smooth_windows` raw decisions exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SafetyMode {
    /// Warm-up windows report "present".
    #[default]
    On,
    /// Warm-up windows report "absent".
    Off,
}

impl SafetyMode {
    pub fn warmup_decision(self) -> bool {
        matches!(self, SafetyMode::On)
    }
}

macro_rules! keyword_enum {
    ($ty:ty { $($variant:path => $name:literal),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($name => Ok($variant),)+
                    other => Err(Error::Config(format!(
                        "unknown {} `{other}`", stringify!($ty)
                    ))),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($variant => $name,)+ })
            }
        }
    };
}

keyword_enum!(StatisticMode { StatisticMode::Mean => "mean", StatisticMode::Sum => "sum" });
keyword_enum!(AutocovMode { AutocovMode::Raw => "raw", AutocovMode::Centered => "centered" });
keyword_enum!(SafetyMode { SafetyMode::On => "on", SafetyMode::Off => "off" });

/// Parameters of the full detection pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Frames per window (T).
    pub window_len: usize,
    /// Frames shared by consecutive windows; 0 gives non-overlapping windows.
    pub overlap: usize,
    /// Autocorrelation layers (n).
    pub layers: usize,
    /// Windows in the majority vote (m); odd.
    pub smooth_windows: usize,
    /// Presence threshold on the overall statistic.
    pub threshold: f64,
    pub statistic_mode: StatisticMode,
    /// Subcarrier lag at which the motion statistic is read.
    pub lag_index: usize,
    pub autocov_mode: AutocovMode,
    pub safety_mode: SafetyMode,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            window_len: 20,
            overlap: 0,
            layers: 3,
            smooth_windows: 3,
            threshold: 0.43,
            statistic_mode: StatisticMode::Mean,
            lag_index: 1,
            autocov_mode: AutocovMode::Raw,
            safety_mode: SafetyMode::On,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_len < 2 {
            return Err(Error::param("window_len", "must be at least 2"));
        }
        if self.overlap >= self.window_len {
            return Err(Error::param("overlap", "must be smaller than window_len"));
        }
        if self.layers == 0 {
            return Err(Error::param("layers", "must be at least 1"));
        }
        if self.smooth_windows == 0 || self.smooth_windows.is_multiple_of(2) {
            return Err(Error::param(
                "smooth_windows",
                "must be a positive odd number",
            ));
        }
        if self.lag_index == 0 {
            return Err(Error::param("lag_index", "must be at least 1"));
        }
        if !self.threshold.is_finite() {
            return Err(Error::param("threshold", "must be finite"));
        }
        Ok(())
    }

    /// Frames between the starts of consecutive windows.
    pub fn step(&self) -> usize {
        self.window_len - self.overlap
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad value `{value}` for `{key}`")))
        }
        match key.trim() {
            "window_len" => self.window_len = num(key, value)?,
            "overlap" => self.overlap = num(key, value)?,
            "layers" => self.layers = num(key, value)?,
            "smooth_windows" => self.smooth_windows = num(key, value)?,
            "threshold" => self.threshold = num(key, value)?,
            "statistic_mode" => self.statistic_mode = value.parse()?,
            "lag_index" => self.lag_index = num(key, value)?,
            "autocov_mode" => self.autocov_mode = value.parse()?,
            "safety_mode" => self.safety_mode = value.parse()?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Parses a flat `key=value` file on top of the defaults. Blank lines and
    /// lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", n + 1)))?;
            config
                .set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {e}", n + 1)))?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn to_text(&self) -> String {
        format!(
            "window_len={}\noverlap={}\nlayers={}\nsmooth_windows={}\nthreshold={}\n\
             statistic_mode={}\nlag_index={}\nautocov_mode={}\nsafety_mode={}\n",
            self.window_len,
            self.overlap,
            self.layers,
            self.smooth_windows,
            self.threshold,
            self.statistic_mode,
            self.lag_index,
            self.autocov_mode,
            self.safety_mode,
        )
    }
}
