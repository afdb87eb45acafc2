//! Labeled scene presets for an in-cabin link: an empty cabin, a breathing
//! occupant, or a pet. Preset geometry is a convention of this crate, drawn
//! from a seed, and reported through [`SceneSpec::metadata`].

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::path::{MotionProfile, Path, PathSegment, PathSet, Waveform};
use crate::sim::rng::{child_rng, DOMAIN_SCENE};

/// Effective receive aperture used as the last segment's RCS (m²).
pub const RX_APERTURE: f64 = 0.01;

const DIRECT_PATH_RANGE: (f64, f64) = (1.2, 1.8);
const CLUTTER_SEGMENT_RANGE: (f64, f64) = (0.4, 1.6);
const CLUTTER_RCS_RANGE: (f64, f64) = (0.3, 1.5);
const BODY_SEGMENT_RANGE: (f64, f64) = (0.5, 1.0);

/// Occupancy class of a recording.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scenario {
    Empty,
    Human,
    Dog,
    Cat,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::Empty,
        Scenario::Human,
        Scenario::Dog,
        Scenario::Cat,
    ];

    /// Ground-truth presence label.
    pub fn occupied(self) -> bool {
        self != Scenario::Empty
    }

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Empty => "empty",
            Scenario::Human => "human",
            Scenario::Dog => "dog",
            Scenario::Cat => "cat",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "empty" => Ok(Scenario::Empty),
            "human" | "breathing" => Ok(Scenario::Human),
            "dog" | "pet" => Ok(Scenario::Dog),
            "cat" => Ok(Scenario::Cat),
            other => Err(Error::param(
                "scenario",
                format!("unknown scenario `{other}`"),
            )),
        }
    }
}

/// Tunable knobs of the scene presets.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetParams {
    /// Static paths per link, the first being the direct Tx-Rx path.
    pub clutter_paths: usize,
    /// Tx-Rx links (one per Tx antenna).
    pub streams: usize,
    /// Peak path-length change of the motile path (m).
    pub motion_amplitude: f64,
    /// Breathing rate (Hz).
    pub motion_rate: f64,
    pub waveform: Waveform,
    /// RCS of the moving body (m²).
    pub motile_rcs: f64,
}

impl PresetParams {
    pub fn for_scenario(scenario: Scenario) -> Self {
        let (motion_amplitude, motion_rate, motile_rcs) = match scenario {
            Scenario::Empty => (0.0, 0.3, 1.0),
            Scenario::Human => (0.008, 0.3, 1.0),
            Scenario::Dog => (0.004, 0.5, 0.2),
            Scenario::Cat => (0.003, 0.45, 0.1),
        };
        Self {
            clutter_paths: 10,
            streams: 2,
            motion_amplitude,
            motion_rate,
            waveform: Waveform::Sine,
            motile_rcs,
        }
    }
}

/// One Tx-Rx link of a scene.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkScene {
    pub stream_id: u16,
    pub paths: PathSet,
}

/// A complete simulated cabin: its class label and per-link paths.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub scenario: Scenario,
    pub links: Vec<LinkScene>,
    pub metadata: Vec<(String, String)>,
}

impl SceneSpec {
    pub fn new(scenario: Scenario, links: Vec<LinkScene>) -> Result<Self> {
        if links.is_empty() {
            return Err(Error::param("links", "a scene needs at least one link"));
        }
        Ok(Self {
            scenario,
            links,
            metadata: Vec::new(),
        })
    }

    /// True if any link contains a moving path.
    pub fn has_motion(&self) -> bool {
        self.links.iter().any(|l| l.paths.has_motion())
    }

    /// Builds a preset scene. The static clutter depends only on `seed` and
    /// the link, so presets sharing a seed share their cabin geometry.
    pub fn preset(scenario: Scenario, params: &PresetParams, seed: u64) -> Result<Self> {
        if params.streams == 0 {
            return Err(Error::param("streams", "need at least one link"));
        }
        if params.clutter_paths == 0 {
            return Err(Error::param(
                "clutter_paths",
                "need at least one static path",
            ));
        }
        let motion = if scenario.occupied() {
            let mut rng = child_rng(seed, DOMAIN_SCENE, u64::MAX);
            let phase = rng.random_range(0.0..TAU);
            Some(MotionProfile::new(
                params.motion_amplitude,
                params.motion_rate,
                params.waveform,
                phase,
            )?)
        } else {
            None
        };

        let mut links = Vec::with_capacity(params.streams);
        for link in 0..params.streams {
            let mut rng = child_rng(seed, DOMAIN_SCENE, link as u64);
            let mut paths = Vec::with_capacity(params.clutter_paths + 1);
            let direct = uniform(&mut rng, DIRECT_PATH_RANGE);
            paths.push(Path::new(
                vec![PathSegment::new(direct, RX_APERTURE)?],
                None,
            )?);
            for _ in 1..params.clutter_paths {
                let bounces = if rng.random_bool(0.7) { 1 } else { 2 };
                let mut segments = Vec::with_capacity(bounces + 1);
                for _ in 0..bounces {
                    segments.push(PathSegment::new(
                        uniform(&mut rng, CLUTTER_SEGMENT_RANGE),
                        uniform(&mut rng, CLUTTER_RCS_RANGE),
                    )?);
                }
                segments.push(PathSegment::new(
                    uniform(&mut rng, CLUTTER_SEGMENT_RANGE),
                    RX_APERTURE,
                )?);
                paths.push(Path::new(segments, None)?);
            }
            if let Some(motion) = &motion {
                let mut body = child_rng(seed, DOMAIN_SCENE, (1 << 32) + link as u64);
                let to_body = uniform(&mut body, BODY_SEGMENT_RANGE);
                let to_rx = uniform(&mut body, BODY_SEGMENT_RANGE);
                paths.push(Path::new(
                    vec![
                        PathSegment::new(to_body, params.motile_rcs)?,
                        PathSegment::new(to_rx, RX_APERTURE)?,
                    ],
                    Some(motion.clone()),
                )?);
            }
            links.push(LinkScene {
                stream_id: link as u16,
                paths: PathSet::new(paths),
            });
        }

        let mut scene = Self::new(scenario, links)?;
        scene.metadata = vec![
            ("scenario".into(), scenario.to_string()),
            ("scene_seed".into(), seed.to_string()),
            ("clutter_paths".into(), params.clutter_paths.to_string()),
            ("streams".into(), params.streams.to_string()),
            ("rx_aperture_m2".into(), RX_APERTURE.to_string()),
        ];
        if let Some(m) = &motion {
            scene.metadata.extend([
                (
                    "motion_amplitude_m".into(),
                    params.motion_amplitude.to_string(),
                ),
                ("motion_rate_hz".into(), params.motion_rate.to_string()),
                ("motion_waveform".into(), format!("{:?}", params.waveform)),
                ("motion_phase_rad".into(), m.phase_offset().to_string()),
                ("motile_rcs_m2".into(), params.motile_rcs.to_string()),
            ]);
        }
        Ok(scene)
    }
}

fn uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    rng.random_range(lo..hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_names_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
        }
        assert_eq!("breathing".parse::<Scenario>().unwrap(), Scenario::Human);
        assert!("ghost".parse::<Scenario>().is_err());
    }

    #[test]
    fn presets_share_clutter_for_a_seed() {
        let empty = SceneSpec::preset(
            Scenario::Empty,
            &PresetParams::for_scenario(Scenario::Empty),
            4,
        )
        .unwrap();
        let human = SceneSpec::preset(
            Scenario::Human,
            &PresetParams::for_scenario(Scenario::Human),
            4,
        )
        .unwrap();
        assert_eq!(empty.links.len(), 2);
        for (e, h) in empty.links.iter().zip(&human.links) {
            assert_eq!(e.paths.len(), 10);
            assert_eq!(h.paths.len(), 11);
            assert_eq!(&h.paths.paths()[..10], e.paths.paths());
        }
        assert!(!empty.has_motion());
        assert!(human.has_motion());
    }

    #[test]
    fn pet_motion_is_weaker_than_human() {
        let human = PresetParams::for_scenario(Scenario::Human);
        for pet in [Scenario::Dog, Scenario::Cat] {
            let p = PresetParams::for_scenario(pet);
            assert!((0.002..=0.005).contains(&p.motion_amplitude));
            assert!(p.motion_rate > human.motion_rate);
            assert!(p.motile_rcs < human.motile_rcs);
        }
        assert!((0.005..=0.012).contains(&human.motion_amplitude));
    }
}
