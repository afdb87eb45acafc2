//! Synthetic CSI generator built on a multipath radar-equation model.

pub mod path;
pub mod radio;
mod rng;
pub mod scene;
pub mod synth;

pub use path::{
    dynamic_cfr, dynamic_cfr_factorized, dynamic_cfr_frozen_amplitude, path_response, static_cfr,
    MotionProfile, Path, PathSegment, PathSet, Waveform, MAX_MICRO_MOTION, SPEED_OF_LIGHT,
};
pub use radio::{AgcProcess, RadioModel, DEFAULT_SNR_DB};
pub use scene::{LinkScene, PresetParams, Scenario, SceneSpec};
pub use synth::{synthesize, Synthesis};
