//! Fixtures shared by the criterion benchmarks under `benches/`.

use csi_presence::sim::{synthesize, PresetParams, RadioModel, Scenario, SceneSpec, Synthesis};
use csi_presence::{assemble_windows, CsiWindow, DetectorConfig, SubcarrierGrid};

pub const RATE: f64 = 20.0;

pub fn scene(scenario: Scenario, seed: u64) -> SceneSpec {
    SceneSpec::preset(scenario, &PresetParams::for_scenario(scenario), seed).expect("preset scene")
}

pub fn recording(scenario: Scenario, seconds: f64, seed: u64) -> Synthesis {
    let grid = SubcarrierGrid::channel_155();
    let scene = scene(scenario, seed);
    let radio = RadioModel::for_scene(&scene, &grid).expect("radio");
    synthesize(&scene, &radio, seconds, RATE, &grid, seed).expect("synthesis")
}

/// First stream-0 window of a fresh breathing recording.
pub fn breathing_window(window_len: usize) -> CsiWindow {
    let config = DetectorConfig {
        window_len,
        ..Default::default()
    };
    let syn = recording(Scenario::Human, window_len as f64 / RATE, 1);
    let mut windows = assemble_windows(&syn.frames, &config, RATE).expect("windows");
    windows
        .remove(&0)
        .and_then(|w| w.into_iter().next())
        .expect("one window")
}
