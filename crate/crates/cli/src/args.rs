use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use csi_presence::sim::DEFAULT_SNR_DB;
use csi_presence::{
    AutocovMode, DetectorConfig, DetectorKind, SafetyMode, Scenario, StatisticMode,
};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "csipd",
    version,
    about = "Simulate, detect and evaluate in-cabin presence from Wi-Fi CSI"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a labeled CSI recording for one cabin scenario.
    Simulate(SimulateArgs),
    /// Run the detector over a CSI file and emit per-window verdicts.
    Detect(DetectArgs),
    /// Score verdicts against a labels sidecar.
    Evaluate(EvaluateArgs),
    /// Sweep the threshold and report the ROC curve and its AUC.
    Roc(RocArgs),
    /// Compare single-layer, multi-layer and time-dimension detectors.
    CompareBaseline(CompareArgs),
}

/// Options shared by every subcommand. Detector flags override values read
/// from `--config`.
#[derive(Debug, Args)]
pub struct Common {
    /// Seed for every random draw.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Detector config file of `key=value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, alias = "window_len")]
    pub window_len: Option<usize>,
    #[arg(long)]
    pub overlap: Option<usize>,
    #[arg(long)]
    pub layers: Option<usize>,
    #[arg(long, alias = "smooth_windows")]
    pub smooth_windows: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub threshold: Option<f64>,
    #[arg(long, alias = "statistic_mode")]
    pub statistic_mode: Option<StatisticMode>,
    #[arg(long, alias = "lag_index")]
    pub lag_index: Option<usize>,
    #[arg(long, alias = "autocov_mode")]
    pub autocov_mode: Option<AutocovMode>,
    #[arg(long, alias = "safety_mode")]
    pub safety_mode: Option<SafetyMode>,
}

impl Common {
    pub fn detector_config(&self) -> CliResult<DetectorConfig> {
        let mut config = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                DetectorConfig::parse(&text)?
            }
            None => DetectorConfig::default(),
        };
        if let Some(v) = self.window_len {
            config.window_len = v;
        }
        if let Some(v) = self.overlap {
            config.overlap = v;
        }
        if let Some(v) = self.layers {
            config.layers = v;
        }
        if let Some(v) = self.smooth_windows {
            config.smooth_windows = v;
        }
        if let Some(v) = self.threshold {
            config.threshold = v;
        }
        if let Some(v) = self.statistic_mode {
            config.statistic_mode = v;
        }
        if let Some(v) = self.lag_index {
            config.lag_index = v;
        }
        if let Some(v) = self.autocov_mode {
            config.autocov_mode = v;
        }
        if let Some(v) = self.safety_mode {
            config.safety_mode = v;
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EncodingArg {
    Text,
    Binary,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DetectorArg {
    Subcarrier,
    TimeBaseline,
}

impl From<DetectorArg> for DetectorKind {
    fn from(d: DetectorArg) -> Self {
        match d {
            DetectorArg::Subcarrier => DetectorKind::Subcarrier,
            DetectorArg::TimeBaseline => DetectorKind::TimeBaseline,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    /// CSI output file; labels and metadata are written next to it.
    #[arg(long)]
    pub out: PathBuf,
    /// empty, human (alias breathing), dog (alias pet) or cat.
    #[arg(long, default_value = "human")]
    pub scenario: Scenario,
    /// Recording length in seconds.
    #[arg(long, default_value_t = 60.0)]
    pub duration: f64,
    /// Frame rate in Hz.
    #[arg(long, default_value_t = 20.0)]
    pub rate: f64,
    #[arg(long, default_value_t = DEFAULT_SNR_DB, allow_negative_numbers = true)]
    pub snr_db: f64,
    /// Multiplier on the moving body's radar cross-section.
    #[arg(long, default_value_t = 1.0)]
    pub rcs_scale: f64,
    /// Tx-Rx links to simulate.
    #[arg(long, default_value_t = 2)]
    pub streams: usize,
    /// Override the breathing amplitude (m).
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Override the breathing rate (Hz).
    #[arg(long)]
    pub breathing_rate: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    pub encoding: EncodingArg,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub common: Common,
    /// CSI file to analyse.
    #[arg(long)]
    pub input: PathBuf,
    /// Verdict CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "subcarrier")]
    pub detector: DetectorArg,
    /// Also write every per-entry lag sequence to this CSV.
    #[arg(long)]
    pub lag_series: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub input: PathBuf,
    /// Labels sidecar; defaults to the one written by `simulate`.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Directory for report.json, sweep.csv and cdf.csv; report to stdout
    /// when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "subcarrier")]
    pub detector: DetectorArg,
    /// Thresholds in the accuracy sweep.
    #[arg(long, default_value_t = 101)]
    pub sweep_steps: usize,
}

#[derive(Debug, Args)]
pub struct RocArgs {
    #[command(flatten)]
    pub common: Common,
    /// CSI files, each with a labels sidecar; scores are pooled.
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// ROC curve CSV; only the AUC is printed when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "subcarrier")]
    pub detector: DetectorArg,
    /// Maximum number of curve points kept (0 keeps all).
    #[arg(long, default_value_t = 0)]
    pub resolution: usize,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: Common,
    /// CSI files, each with a labels sidecar; scores are pooled.
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// JSON report; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
