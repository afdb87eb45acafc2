use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::format::labels::WindowLabel;
use crate::frame::{CsiFrame, CsiWindow};
use crate::grid::SubcarrierGrid;
use crate::sim::path::{accumulate_at, static_cfr, Path, PathSet};
use crate::sim::radio::{AgcProcess, RadioModel};
use crate::sim::rng::{child_rng, DOMAIN_AGC, DOMAIN_NOISE};
use crate::sim::scene::{Scenario, SceneSpec};

/// Output of [`synthesize`]: frames ordered by time then stream, with one
/// ground-truth label per frame.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub frames: Vec<CsiFrame>,
    pub labels: Vec<u8>,
    pub scenario: Scenario,
    pub rate: f64,
    pub grid: SubcarrierGrid,
    pub metadata: Vec<(String, String)>,
}

impl Synthesis {
    /// Per-window labels: a window is motile if any of its frames is.
    pub fn window_labels(&self, windows: &BTreeMap<u16, Vec<CsiWindow>>) -> Vec<WindowLabel> {
        let by_key: HashMap<(u64, u16), u8> = self
            .frames
            .iter()
            .zip(&self.labels)
            .map(|(f, &l)| ((f.timestamp_us, f.stream_id), l))
            .collect();
        let mut out = Vec::new();
        for (&stream, list) in windows {
            for w in list {
                let motile = w
                    .frames()
                    .iter()
                    .any(|f| by_key.get(&(f.timestamp_us, stream)) == Some(&1));
                out.push(WindowLabel {
                    window_index: w.index,
                    stream,
                    label: motile,
                    scenario: self.scenario,
                });
            }
        }
        out.sort_by_key(|l| (l.window_index, l.stream));
        out
    }
}

struct LinkModel {
    stream_id: u16,
    static_part: Vec<Complex64>,
    motile: Vec<Path>,
}

impl LinkModel {
    fn new(stream_id: u16, paths: &PathSet, grid: &SubcarrierGrid) -> Result<Self> {
        let (motile, still): (Vec<Path>, Vec<Path>) =
            paths.paths().iter().cloned().partition(Path::is_motile);
        let static_part = if still.is_empty() {
            vec![Complex64::new(0.0, 0.0); grid.count()]
        } else {
            static_cfr(&PathSet::new(still), grid)?
        };
        Ok(Self {
            stream_id,
            static_part,
            motile,
        })
    }

    fn ideal(&self, t: f64, grid: &SubcarrierGrid) -> Result<Vec<Complex64>> {
        let mut h = self.static_part.clone();
        for path in &self.motile {
            accumulate_at(path, t, grid, &mut h)?;
        }
        Ok(h)
    }
}

/// AGC gain per frame for one link.
fn agc_track(agc: &AgcProcess, frames: usize, rate: f64, seed: u64, link: u16) -> Vec<f64> {
    let levels = agc.levels();
    if agc.is_constant() {
        return vec![levels[0]; frames];
    }
    let switch_p = (1.0 / (agc.mean_dwell_s() * rate)).min(1.0);
    let mut level = levels[0];
    (0..frames)
        .map(|k| {
            let mut rng = child_rng(seed, DOMAIN_AGC ^ ((link as u64) << 48), k as u64);
            if k == 0 || rng.random_bool(switch_p) {
                level = levels[rng.random_range(0..levels.len())];
            }
            level
        })
        .collect()
}

/// Generates `duration × rate` frames per link of `scene`.
///
/// Each measured value is `G_agc(t) · G_Tx · G_Rx · Ĥ(t, f) + ε`, with ε
/// circular complex Gaussian of total standard deviation
/// `radio.noise_sigma`. Randomness comes from one child generator per
/// frame index, so the output depends only on `seed`.
pub fn synthesize(
    scene: &SceneSpec,
    radio: &RadioModel,
    duration: f64,
    rate: f64,
    grid: &SubcarrierGrid,
    seed: u64,
) -> Result<Synthesis> {
    radio.validate()?;
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::param("rate", "must be positive"));
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::param("duration", "must be positive"));
    }
    let count = (duration * rate + 1e-9).floor() as usize;
    if count == 0 {
        return Err(Error::param(
            "duration",
            "duration × rate must be at least 1",
        ));
    }

    let links = scene
        .links
        .iter()
        .map(|l| LinkModel::new(l.stream_id, &l.paths, grid))
        .collect::<Result<Vec<_>>>()?;
    let agc: Vec<Vec<f64>> = links
        .iter()
        .map(|l| agc_track(&radio.agc, count, rate, seed, l.stream_id))
        .collect();
    let quadrature = Normal::new(0.0, radio.noise_sigma / 2f64.sqrt())
        .map_err(|e| Error::param("noise_sigma", e.to_string()))?;
    let gain = radio.link_gain();
    let label = u8::from(scene.has_motion());

    let per_index: Vec<Vec<CsiFrame>> = (0..count)
        .into_par_iter()
        .map(|k| {
            let t = k as f64 / rate;
            let timestamp_us = (t * 1e6).round() as u64;
            let mut rng = child_rng(seed, DOMAIN_NOISE, k as u64);
            links
                .iter()
                .zip(&agc)
                .map(|(link, agc)| {
                    let g = agc[k] * gain;
                    let mut values = link.ideal(t, grid)?;
                    for v in values.iter_mut() {
                        *v *= g;
                        if radio.noise_sigma > 0.0 {
                            *v += Complex64::new(
                                quadrature.sample(&mut rng),
                                quadrature.sample(&mut rng),
                            );
                        }
                    }
                    CsiFrame::new(timestamp_us, link.stream_id, values, Some(agc[k]))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let frames: Vec<CsiFrame> = per_index.into_iter().flatten().collect();
    let labels = vec![label; frames.len()];
    let mut metadata = scene.metadata.clone();
    metadata.extend([
        ("seed".into(), seed.to_string()),
        ("noise_sigma".into(), radio.noise_sigma.to_string()),
        ("agc_levels".into(), format!("{:?}", radio.agc.levels())),
        (
            "agc_mean_dwell_s".into(),
            radio.agc.mean_dwell_s().to_string(),
        ),
    ]);
    Ok(Synthesis {
        frames,
        labels,
        scenario: scene.scenario,
        rate,
        grid: *grid,
        metadata,
    })
}
