//! Multipath propagation model: per-path radar-equation response and the
//! static and motion-modulated channel frequency response.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::SubcarrierGrid;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Largest path-length excursion accepted as micro-motion (m).
pub const MAX_MICRO_MOTION: f64 = 0.05;

const RANDOM_COMPONENTS: usize = 8;

/// One propagation segment ending at a scatterer (or at the receiver, for the
/// last segment of a path, where `rcs` is the receive aperture).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSegment {
    pub base_length: f64,
    pub rcs: f64,
}

impl PathSegment {
    pub fn new(base_length: f64, rcs: f64) -> Result<Self> {
        if !(base_length.is_finite() && base_length > 0.0) {
            return Err(Error::param(
                "base_length",
                format!("must be positive, got {base_length}"),
            ));
        }
        if !(rcs.is_finite() && rcs > 0.0) {
            return Err(Error::param("rcs", format!("must be positive, got {rcs}")));
        }
        Ok(Self { base_length, rcs })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Waveform {
    Sine,
    Triangle,
    /// Sum of a few sinusoids spread over `[0.5, 1.5] × rate` with
    /// seeded random phases and weights.
    BandLimitedRandom {
        seed: u64,
    },
}

/// Periodic change of a path's total length.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionProfile {
    amplitude: f64,
    rate: f64,
    waveform: Waveform,
    phase_offset: f64,
    // (relative frequency, phase, weight) for the random waveform
    components: Vec<(f64, f64, f64)>,
}

impl MotionProfile {
    pub fn new(amplitude: f64, rate: f64, waveform: Waveform, phase_offset: f64) -> Result<Self> {
        if !(0.0..=MAX_MICRO_MOTION).contains(&amplitude) {
            return Err(Error::param(
                "amplitude",
                format!("must lie in [0, {MAX_MICRO_MOTION}] m, got {amplitude}"),
            ));
        }
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::param(
                "rate",
                format!("must be positive, got {rate}"),
            ));
        }
        if !phase_offset.is_finite() {
            return Err(Error::param("phase_offset", "must be finite"));
        }
        let components = match waveform {
            Waveform::BandLimitedRandom { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let raw: Vec<(f64, f64, f64)> = (0..RANDOM_COMPONENTS)
                    .map(|_| {
                        (
                            rng.random_range(0.5..1.5),
                            rng.random_range(0.0..TAU),
                            rng.random_range(0.5..1.0),
                        )
                    })
                    .collect();
                let total: f64 = raw.iter().map(|c| c.2).sum();
                raw.into_iter().map(|(f, p, w)| (f, p, w / total)).collect()
            }
            _ => Vec::new(),
        };
        Ok(Self {
            amplitude,
            rate,
            waveform,
            phase_offset,
            components,
        })
    }

    pub fn sine(amplitude: f64, rate: f64) -> Result<Self> {
        Self::new(amplitude, rate, Waveform::Sine, 0.0)
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn waveform(&self) -> Waveform {
        self.waveform
    }

    pub fn phase_offset(&self) -> f64 {
        self.phase_offset
    }

    /// Path-length change ΔR(t) in meters; bounded by the amplitude.
    pub fn displacement(&self, t: f64) -> f64 {
        let arg = TAU * self.rate * t + self.phase_offset;
        let unit = match self.waveform {
            Waveform::Sine => arg.sin(),
            Waveform::Triangle => {
                let x = (arg / TAU - 0.25).rem_euclid(1.0);
                4.0 * (x - 0.5).abs() - 1.0
            }
            Waveform::BandLimitedRandom { .. } => self
                .components
                .iter()
                .map(|&(f, p, w)| w * (TAU * f * self.rate * t + p + self.phase_offset).sin())
                .sum(),
        };
        self.amplitude * unit
    }
}

/// A propagation path of `M` segments through `M - 1` scatterers.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    segments: Vec<PathSegment>,
    motion: Option<MotionProfile>,
}

impl Path {
    pub fn new(segments: Vec<PathSegment>, motion: Option<MotionProfile>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::param(
                "segments",
                "a path needs at least one segment",
            ));
        }
        Ok(Self { segments, motion })
    }

    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    pub fn motion(&self) -> Option<&MotionProfile> {
        self.motion.as_ref()
    }

    /// True if the path length changes over time.
    pub fn is_motile(&self) -> bool {
        self.motion.as_ref().is_some_and(|m| m.amplitude > 0.0)
    }

    pub fn base_lengths(&self) -> Vec<f64> {
        self.segments.iter().map(|s| s.base_length).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.base_length).sum()
    }

    /// ΔR_l(t), zero for a motionless path.
    pub fn displacement(&self, t: f64) -> f64 {
        self.motion.as_ref().map_or(0.0, |m| m.displacement(t))
    }

    /// Segment lengths at time `t`; the excursion is shared equally by all
    /// segments so that their sum changes by exactly ΔR_l(t).
    pub fn lengths_at(&self, t: f64) -> Vec<f64> {
        let share = self.displacement(t) / self.segments.len() as f64;
        self.segments
            .iter()
            .map(|s| s.base_length + share)
            .collect()
    }

    /// Product of the per-segment radar-equation factors σ / (4πR²).
    fn attenuation(&self, lengths: &[f64]) -> f64 {
        self.segments
            .iter()
            .zip(lengths)
            .map(|(s, &r)| s.rcs / (4.0 * PI * r * r))
            .product()
    }

    fn scatterer_phase(&self) -> f64 {
        (self.segments.len() - 1) as f64 * PI
    }

    fn check_lengths(&self, lengths: &[f64]) -> Result<()> {
        if lengths.len() != self.segments.len() {
            return Err(Error::DimensionMismatch {
                expected: self.segments.len(),
                found: lengths.len(),
            });
        }
        if let Some(r) = lengths.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return Err(Error::Domain(format!(
                "segment length must be positive, got {r}"
            )));
        }
        Ok(())
    }
}

/// The set of propagation paths of one Tx-Rx link.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSet(Vec<Path>);

impl PathSet {
    pub fn new(paths: Vec<Path>) -> Self {
        Self(paths)
    }

    pub fn paths(&self) -> &[Path] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn has_motion(&self) -> bool {
        self.0.iter().any(Path::is_motile)
    }

    /// Paths of both sets, `self` first.
    pub fn union(&self, other: &PathSet) -> PathSet {
        PathSet(self.0.iter().chain(&other.0).cloned().collect())
    }

    fn require_paths(&self) -> Result<()> {
        if self.0.is_empty() {
            return Err(Error::Domain("path set is empty".into()));
        }
        Ok(())
    }
}

impl FromIterator<Path> for PathSet {
    fn from_iter<I: IntoIterator<Item = Path>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Complex response of one path at `freq` for the given segment lengths,
/// with unit Tx/Rx gains.
pub fn path_response(path: &Path, freq: f64, lengths: &[f64]) -> Result<Complex64> {
    path.check_lengths(lengths)?;
    let total: f64 = lengths.iter().sum();
    let phase = TAU * freq / SPEED_OF_LIGHT * total + path.scatterer_phase();
    Ok(Complex64::from_polar(path.attenuation(lengths), phase))
}

/// Adds one path's response over the whole grid to `acc`. Amplitude is
/// evaluated at `amp_lengths`, phase at `phase_lengths`.
fn accumulate(
    path: &Path,
    amp_lengths: &[f64],
    phase_lengths: &[f64],
    grid: &SubcarrierGrid,
    acc: &mut [Complex64],
) -> Result<()> {
    path.check_lengths(amp_lengths)?;
    path.check_lengths(phase_lengths)?;
    let amp = path.attenuation(amp_lengths);
    let total: f64 = phase_lengths.iter().sum();
    let offset = path.scatterer_phase();
    for (i, h) in acc.iter_mut().enumerate() {
        let phase = TAU * grid.frequency(i) / SPEED_OF_LIGHT * total + offset;
        *h += Complex64::from_polar(amp, phase);
    }
    Ok(())
}

/// Adds the exact (re-evaluated length) response of `path` at time `t`.
pub(crate) fn accumulate_at(
    path: &Path,
    t: f64,
    grid: &SubcarrierGrid,
    acc: &mut [Complex64],
) -> Result<()> {
    let lengths = path.lengths_at(t);
    accumulate(path, &lengths, &lengths, grid, acc)
}

/// Channel frequency response of a static scene at base lengths.
pub fn static_cfr(paths: &PathSet, grid: &SubcarrierGrid) -> Result<Vec<Complex64>> {
    paths.require_paths()?;
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.count()];
    for path in paths.paths() {
        let lengths = path.base_lengths();
        accumulate(path, &lengths, &lengths, grid, &mut acc)?;
    }
    Ok(acc)
}

/// Channel frequency response at time `t`, re-evaluating every segment
/// length (amplitude and phase) under motion.
pub fn dynamic_cfr(paths: &PathSet, t: f64, grid: &SubcarrierGrid) -> Result<Vec<Complex64>> {
    dynamic_cfr_impl(paths, t, grid, false)
}

/// As [`dynamic_cfr`] but with every path's amplitude held at its base
/// lengths; only the phase follows the motion.
pub fn dynamic_cfr_frozen_amplitude(
    paths: &PathSet,
    t: f64,
    grid: &SubcarrierGrid,
) -> Result<Vec<Complex64>> {
    dynamic_cfr_impl(paths, t, grid, true)
}

fn dynamic_cfr_impl(
    paths: &PathSet,
    t: f64,
    grid: &SubcarrierGrid,
    freeze_amplitude: bool,
) -> Result<Vec<Complex64>> {
    check_time(t)?;
    paths.require_paths()?;
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.count()];
    for path in paths.paths() {
        let lengths = path.lengths_at(t);
        if freeze_amplitude {
            accumulate(path, &path.base_lengths(), &lengths, grid, &mut acc)?;
        } else {
            accumulate(path, &lengths, &lengths, grid, &mut acc)?;
        }
    }
    Ok(acc)
}

/// Factorized form: each path's static response rotated by the phase of
/// its length change, `H'_l(f) · exp(j 2π f ΔR_l(t) / c)`.
pub fn dynamic_cfr_factorized(
    paths: &PathSet,
    t: f64,
    grid: &SubcarrierGrid,
) -> Result<Vec<Complex64>> {
    check_time(t)?;
    paths.require_paths()?;
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.count()];
    for path in paths.paths() {
        let lengths = path.base_lengths();
        let delta = path.displacement(t);
        for (i, h) in acc.iter_mut().enumerate() {
            let f = grid.frequency(i);
            let rotation = Complex64::from_polar(1.0, TAU * f / SPEED_OF_LIGHT * delta);
            *h += path_response(path, f, &lengths)? * rotation;
        }
    }
    Ok(acc)
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::param("t", format!("must be non-negative, got {t}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(r: f64, s: f64) -> PathSegment {
        PathSegment::new(r, s).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    /// Phase folded into (-π, π].
    fn wrapped(z: Complex64) -> f64 {
        z.arg()
    }

    #[test]
    fn single_segment_at_wavelength_one_meter() {
        let path = Path::new(vec![seg(1.0, 1.0)], None).unwrap();
        let h = path_response(&path, SPEED_OF_LIGHT, &[1.0]).unwrap();
        assert!(close(h.norm(), 1.0 / (4.0 * PI), 1e-15));
        assert!(close(wrapped(h), 0.0, 1e-9));
    }

    #[test]
    fn inverse_square_in_length() {
        let path = Path::new(vec![seg(1.0, 1.0)], None).unwrap();
        let near = path_response(&path, 5e9, &[1.0]).unwrap().norm();
        let far = path_response(&path, 5e9, &[2.0]).unwrap().norm();
        assert!(close(near / far, 4.0, 1e-12));
    }

    #[test]
    fn two_segments_quarter_wavelength() {
        let path = Path::new(vec![seg(1.0, 1.0), seg(1.0, 1.0)], None).unwrap();
        let h = path_response(&path, SPEED_OF_LIGHT / 4.0, &[1.0, 1.0]).unwrap();
        assert!(close(h.norm(), (1.0 / (4.0 * PI)).powi(2), 1e-15));
        // π (travel) + π (one scatterer) = 2π
        assert!(close(wrapped(h).abs(), 0.0, 1e-9));
    }

    #[test]
    fn non_positive_length_is_domain_error() {
        let path = Path::new(vec![seg(1.0, 1.0)], None).unwrap();
        assert!(matches!(
            path_response(&path, 5e9, &[0.0]),
            Err(Error::Domain(_))
        ));
        assert!(path_response(&path, 5e9, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn static_cfr_single_and_doubled_paths() {
        let grid = SubcarrierGrid::new(5.8e9, 312.5e3, 16).unwrap();
        let path = Path::new(vec![seg(0.8, 0.3), seg(1.1, 0.01)], None).unwrap();
        let one = static_cfr(&PathSet::new(vec![path.clone()]), &grid).unwrap();
        for (i, h) in one.iter().enumerate() {
            let direct = path_response(&path, grid.frequency(i), &path.base_lengths()).unwrap();
            assert!((h - direct).norm() <= 1e-18);
        }
        let two = static_cfr(&PathSet::new(vec![path.clone(), path]), &grid).unwrap();
        for (a, b) in one.iter().zip(&two) {
            assert!((b - 2.0 * a).norm() <= 1e-18);
        }
    }

    #[test]
    fn half_wavelength_difference_interferes_destructively() {
        let grid = SubcarrierGrid::new(5.8e9, 312.5e3, 3).unwrap();
        let f = grid.frequency(1);
        let a = Path::new(vec![seg(1.5, 1.0)], None).unwrap();
        let b = Path::new(vec![seg(1.5 + SPEED_OF_LIGHT / (2.0 * f), 1.0)], None).unwrap();
        let ha = path_response(&a, f, &a.base_lengths()).unwrap().norm();
        let hb = path_response(&b, f, &b.base_lengths()).unwrap().norm();
        let sum = static_cfr(&PathSet::new(vec![a, b]), &grid).unwrap()[1].norm();
        assert!(close(sum, (ha - hb).abs(), 1e-12 * ha));
    }

    #[test]
    fn empty_set_is_domain_error() {
        let grid = SubcarrierGrid::channel_155();
        assert!(static_cfr(&PathSet::new(vec![]), &grid).is_err());
        assert!(dynamic_cfr(&PathSet::new(vec![]), 0.0, &grid).is_err());
    }

    #[test]
    fn motionless_scene_is_time_invariant() {
        let grid = SubcarrierGrid::channel_155();
        let still = MotionProfile::sine(0.0, 0.3).unwrap();
        let paths = PathSet::new(vec![
            Path::new(vec![seg(1.4, 0.01)], None).unwrap(),
            Path::new(vec![seg(0.9, 0.5), seg(0.7, 0.01)], Some(still)).unwrap(),
        ]);
        let reference = static_cfr(&paths, &grid).unwrap();
        for t in [0.0, 0.37, 2.0, 11.5] {
            assert_eq!(dynamic_cfr(&paths, t, &grid).unwrap(), reference);
        }
    }

    #[test]
    fn dynamic_equals_static_at_time_zero() {
        let grid = SubcarrierGrid::channel_155();
        for waveform in [Waveform::Sine, Waveform::Triangle] {
            let m = MotionProfile::new(0.008, 0.3, waveform, 0.0).unwrap();
            let paths = PathSet::new(vec![Path::new(
                vec![seg(0.9, 0.5), seg(0.7, 0.01)],
                Some(m),
            )
            .unwrap()]);
            let s = static_cfr(&paths, &grid).unwrap();
            let d = dynamic_cfr(&paths, 0.0, &grid).unwrap();
            for (a, b) in s.iter().zip(&d) {
                assert!((a - b).norm() <= 1e-12 * a.norm());
            }
        }
    }

    #[test]
    fn sine_motion_phase_tracks_displacement() {
        let grid = SubcarrierGrid::channel_155();
        let (amp, rate) = (0.008, 0.3);
        let m = MotionProfile::sine(amp, rate).unwrap();
        let path = Path::new(vec![seg(1.0, 0.5), seg(1.2, 0.01)], Some(m)).unwrap();
        let paths = PathSet::new(vec![path.clone()]);
        let h0 = static_cfr(&paths, &grid).unwrap();
        for t in [0.4, 1.1, 2.9] {
            let ht = dynamic_cfr_frozen_amplitude(&paths, t, &grid).unwrap();
            for i in [0, 117, 233] {
                let f = grid.frequency(i);
                let expected = TAU * f / SPEED_OF_LIGHT * amp * (TAU * rate * t).sin();
                let rotation = ht[i] / h0[i];
                let want = Complex64::from_polar(1.0, expected);
                assert!((rotation - want).norm() < 1e-9, "t={t} i={i}");
            }
            // Same value through direct re-evaluation of every segment length.
            let direct = dynamic_cfr(&paths, t, &grid).unwrap();
            for i in [0, 117, 233] {
                let f = grid.frequency(i);
                let by_hand = path_response(&path, f, &path.lengths_at(t)).unwrap();
                assert!((direct[i] - by_hand).norm() <= 1e-12 * by_hand.norm());
            }
        }
    }

    #[test]
    fn triangle_and_random_waveforms_stay_bounded() {
        let tri = MotionProfile::new(0.01, 0.5, Waveform::Triangle, 0.0).unwrap();
        assert!(close(tri.displacement(0.0), 0.0, 1e-15));
        assert!(close(tri.displacement(0.5), 0.01, 1e-15));
        assert!(close(tri.displacement(1.5), -0.01, 1e-15));
        let rnd =
            MotionProfile::new(0.01, 0.5, Waveform::BandLimitedRandom { seed: 9 }, 0.0).unwrap();
        let peak = (0..2000)
            .map(|k| rnd.displacement(k as f64 * 0.01).abs())
            .fold(0.0, f64::max);
        assert!(peak <= 0.01 + 1e-15 && peak > 0.002);
    }

    #[test]
    fn motion_profile_validation() {
        assert!(MotionProfile::sine(0.06, 0.3).is_err());
        assert!(MotionProfile::sine(-0.001, 0.3).is_err());
        assert!(MotionProfile::sine(0.005, 0.0).is_err());
        assert!(PathSegment::new(0.0, 1.0).is_err());
        assert!(PathSegment::new(1.0, 0.0).is_err());
        assert!(Path::new(vec![], None).is_err());
    }
}
