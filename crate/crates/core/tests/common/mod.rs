#![allow(dead_code)]

use std::collections::BTreeMap;

use csi_presence::detector::detect_window;
use csi_presence::eval::roc_sweep;
use csi_presence::preprocess::preprocess;
use csi_presence::sim::{synthesize, PresetParams, RadioModel, Scenario, SceneSpec};
use csi_presence::{
    assemble_windows, score_windows, CsiWindow, DetectorConfig, DetectorKind, SubcarrierGrid,
};
use rayon::prelude::*;

pub const RATE: f64 = 20.0;

/// Labeled windows drawn from several independently seeded cabins.
pub struct Corpus {
    pub recordings: Vec<(bool, BTreeMap<u16, Vec<CsiWindow>>)>,
}

pub struct CorpusSpec {
    pub scenes: u64,
    pub windows_per_scene: usize,
    pub window_len: usize,
    /// Multiplier on the moving body's RCS.
    pub rcs_scale: f64,
    pub streams: usize,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            scenes: 10,
            windows_per_scene: 50,
            window_len: 20,
            rcs_scale: 1.0,
            streams: 2,
        }
    }
}

pub fn recording(
    scenario: Scenario,
    scene_seed: u64,
    spec: &CorpusSpec,
) -> BTreeMap<u16, Vec<CsiWindow>> {
    let grid = SubcarrierGrid::channel_155();
    let mut params = PresetParams::for_scenario(scenario);
    params.motile_rcs *= spec.rcs_scale;
    params.streams = spec.streams;
    let scene = SceneSpec::preset(scenario, &params, scene_seed).unwrap();
    let radio = RadioModel::for_scene(&scene, &grid).unwrap();
    let duration = (spec.windows_per_scene * spec.window_len) as f64 / RATE;
    let syn = synthesize(&scene, &radio, duration, RATE, &grid, scene_seed ^ 0xabcd).unwrap();
    let config = DetectorConfig {
        window_len: spec.window_len,
        ..Default::default()
    };
    assemble_windows(&syn.frames, &config, RATE).unwrap()
}

impl Corpus {
    /// `scenes` empty cabins and `scenes` cabins with a breathing occupant.
    pub fn build(spec: &CorpusSpec) -> Self {
        Self::build_classes(spec, Scenario::Human)
    }

    pub fn build_classes(spec: &CorpusSpec, occupied: Scenario) -> Self {
        Self::from_jobs(spec, [Scenario::Empty, occupied])
    }

    /// `scenes` cabins of one scenario.
    pub fn single(spec: &CorpusSpec, scenario: Scenario) -> Self {
        Self::from_jobs(spec, [scenario])
    }

    fn from_jobs<const N: usize>(spec: &CorpusSpec, scenarios: [Scenario; N]) -> Self {
        let jobs: Vec<(Scenario, u64)> = scenarios
            .into_iter()
            .flat_map(|s| (0..spec.scenes).map(move |i| (s, 1000 + i)))
            .collect();
        let recordings = jobs
            .par_iter()
            .map(|&(s, seed)| (s.occupied(), recording(s, seed, spec)))
            .collect();
        Self { recordings }
    }

    pub fn windows(&self) -> usize {
        self.recordings
            .iter()
            .map(|(_, r)| r.values().next().map_or(0, Vec::len))
            .sum()
    }

    /// Φ and label for every window.
    pub fn scores(&self, config: &DetectorConfig, kind: DetectorKind) -> (Vec<f64>, Vec<bool>) {
        let mut scores = Vec::new();
        let mut labels = Vec::new();
        for (occupied, windows) in &self.recordings {
            let stats = score_windows(windows, config, kind).unwrap();
            let mut per_window: BTreeMap<u64, f64> = BTreeMap::new();
            for s in stats {
                *per_window.entry(s.window_index).or_default() += s.phi;
            }
            labels.extend(std::iter::repeat_n(*occupied, per_window.len()));
            scores.extend(per_window.into_values());
        }
        (scores, labels)
    }

    pub fn auc(&self, config: &DetectorConfig, kind: DetectorKind) -> f64 {
        let (s, l) = self.scores(config, kind);
        roc_sweep(&s, &l, 0).unwrap().auc
    }

    /// Per-entry ψ values pooled by class: (static, motile).
    pub fn psi(&self, config: &DetectorConfig) -> (Vec<f64>, Vec<f64>) {
        let (mut still, mut moving) = (Vec::new(), Vec::new());
        for (occupied, windows) in &self.recordings {
            let values: Vec<f64> = windows
                .values()
                .flatten()
                .collect::<Vec<_>>()
                .par_iter()
                .flat_map_iter(|w| detect_window(&preprocess(w).unwrap(), config).unwrap())
                .collect();
            if *occupied {
                moving.extend(values);
            } else {
                still.extend(values);
            }
        }
        (still, moving)
    }
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

pub fn std_dev(x: &[f64]) -> f64 {
    let m = mean(x);
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}
