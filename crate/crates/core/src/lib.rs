//! Device-free presence detection from Wi-Fi channel state information.
//!
//! The detector works across the subcarriers of each CSI entry instead of
//! across time, so a one-second window is enough to see a breathing
//! occupant. The crate contains:
//!
//! * [`sim`]: a multipath channel simulator producing labeled CSI streams;
//! * [`preprocess`]: amplitude extraction and per-entry normalization;
//! * [`detector`]: the subcarrier-dimension multi-layer autocorrelation
//!   detector;
//! * [`indicator`]: window statistics, thresholding and smoothing;
//! * [`baseline`]: a time-dimension comparison detector;
//! * [`eval`] and [`format`]: metrics and on-disk formats.

pub mod baseline;
pub mod config;
pub mod detector;
pub mod error;
pub mod eval;
pub mod format;
pub mod frame;
pub mod grid;
pub mod indicator;
pub mod matrix;
pub mod pipeline;
pub mod preprocess;
pub mod sim;

pub use config::{AutocovMode, DetectorConfig, SafetyMode, StatisticMode};
pub use error::{Error, Result};
pub use frame::{assemble_windows, CsiFrame, CsiWindow};
pub use grid::SubcarrierGrid;
pub use indicator::{Verdict, WindowStatistic};
pub use matrix::RowMatrix;
pub use pipeline::{run_detector, score_window, score_windows, DetectorKind};
pub use preprocess::{AmplitudeWindow, NormalizedWindow};
pub use sim::{RadioModel, Scenario, SceneSpec};
