use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::SubcarrierGrid;
use crate::sim::path::{static_cfr, PathSet};
use crate::sim::scene::SceneSpec;

/// Default per-subcarrier SNR of the preset scenes (dB, RMS static channel
/// amplitude over noise standard deviation).
pub const DEFAULT_SNR_DB: f64 = 40.0;

/// Piecewise-constant receiver gain left over after imperfect AGC
/// compensation. The level is redrawn after a geometric dwell time.
#[derive(Debug, Clone, PartialEq)]
pub struct AgcProcess {
    levels: Vec<f64>,
    mean_dwell_s: f64,
}

impl AgcProcess {
    pub fn new(levels: Vec<f64>, mean_dwell_s: f64) -> Result<Self> {
        if levels.is_empty() || levels.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(Error::param("levels", "need one or more positive gains"));
        }
        if !(mean_dwell_s.is_finite() && mean_dwell_s > 0.0) {
            return Err(Error::param("mean_dwell_s", "must be positive"));
        }
        Ok(Self {
            levels,
            mean_dwell_s,
        })
    }

    pub fn constant(gain: f64) -> Result<Self> {
        Self::new(vec![gain], 1.0)
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn mean_dwell_s(&self) -> f64 {
        self.mean_dwell_s
    }

    pub fn is_constant(&self) -> bool {
        self.levels.len() == 1
    }
}

impl Default for AgcProcess {
    /// ±20 % steps with a 2 s mean dwell.
    fn default() -> Self {
        Self {
            levels: vec![0.8, 0.9, 1.0, 1.1, 1.2],
            mean_dwell_s: 2.0,
        }
    }
}

/// Transmitter/receiver chain applied on top of the propagation model.
#[derive(Debug, Clone, PartialEq)]
pub struct RadioModel {
    pub tx_gain: f64,
    pub rx_gain: f64,
    /// Standard deviation of the additive complex Gaussian noise on each
    /// subcarrier (total over both quadratures).
    pub noise_sigma: f64,
    pub agc: AgcProcess,
}

impl Default for RadioModel {
    fn default() -> Self {
        Self {
            tx_gain: 1.0,
            rx_gain: 1.0,
            noise_sigma: 0.0,
            agc: AgcProcess::default(),
        }
    }
}

impl RadioModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.tx_gain.is_finite() && self.tx_gain > 0.0) {
            return Err(Error::param("tx_gain", "must be positive"));
        }
        if !(self.rx_gain.is_finite() && self.rx_gain > 0.0) {
            return Err(Error::param("rx_gain", "must be positive"));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::param("noise_sigma", "must be non-negative"));
        }
        Ok(())
    }

    pub fn link_gain(&self) -> f64 {
        self.tx_gain * self.rx_gain
    }

    /// Default radio for `scene`: stepping AGC, unit gains, and noise at
    /// [`DEFAULT_SNR_DB`].
    pub fn for_scene(scene: &SceneSpec, grid: &SubcarrierGrid) -> Result<Self> {
        Self::default().with_snr_db(scene.links.iter().map(|l| &l.paths), grid, DEFAULT_SNR_DB)
    }

    /// Sets `noise_sigma` so that the RMS static channel amplitude, averaged
    /// over the given links, sits `snr_db` above the noise.
    pub fn with_snr_db<'a>(
        mut self,
        links: impl IntoIterator<Item = &'a PathSet>,
        grid: &SubcarrierGrid,
        snr_db: f64,
    ) -> Result<Self> {
        let mut power = 0.0;
        let mut n = 0usize;
        for paths in links {
            let h = static_cfr(paths, grid)?;
            power += h.iter().map(Complex64::norm_sqr).sum::<f64>();
            n += h.len();
        }
        if n == 0 {
            return Err(Error::EmptyInput(
                "no links to calibrate noise against".into(),
            ));
        }
        let rms = (power / n as f64).sqrt() * self.link_gain();
        self.noise_sigma = rms * 10f64.powf(-snr_db / 20.0);
        Ok(self)
    }
}
