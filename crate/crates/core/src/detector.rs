//! Subcarrier-dimension motion detector.
//!
//! Each window's time-averaged normalized CFR serves as the static
//! reference. Subtracting it leaves a residual per entry that is white along
//! the subcarrier axis when nothing moves, and smooth (strongly
//! autocorrelated) when a path length is changing. The motion statistic is
//! the lag-one value of an iterated autocorrelation of that residual.

use crate::config::{AutocovMode, DetectorConfig};
use crate::error::{Error, Result};
use crate::matrix::RowMatrix;
use crate::preprocess::NormalizedWindow;

/// A residual row whose norm is below this fraction of its entry's norm is
/// treated as exactly flat (no motion evidence).
pub const FLAT_TOLERANCE: f64 = 1e-10;

/// Per-subcarrier time mean of a normalized window.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkCfr {
    pub values: Vec<f64>,
}

/// Normalized window minus its benchmark CFR.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualWindow {
    pub values: RowMatrix,
}

/// Autocorrelation sequence indexed by subcarrier lag.
#[derive(Debug, Clone, PartialEq)]
pub struct LagSeries {
    pub values: Vec<f64>,
    pub layer: usize,
}

impl LagSeries {
    pub fn at(&self, lag: usize) -> Option<f64> {
        self.values.get(lag).copied()
    }
}

pub fn benchmark_cfr(win: &NormalizedWindow) -> BenchmarkCfr {
    let rows = win.values.rows() as f64;
    let mut values = vec![0.0; win.values.cols()];
    for row in win.values.iter_rows() {
        for (acc, v) in values.iter_mut().zip(row) {
            *acc += v;
        }
    }
    values.iter_mut().for_each(|v| *v /= rows);
    BenchmarkCfr { values }
}

pub fn residual(win: &NormalizedWindow, bench: &BenchmarkCfr) -> Result<ResidualWindow> {
    if bench.values.len() != win.values.cols() {
        return Err(Error::DimensionMismatch {
            expected: win.values.cols(),
            found: bench.values.len(),
        });
    }
    let mut values = win.values.clone();
    for t in 0..values.rows() {
        for (v, b) in values.row_mut(t).iter_mut().zip(&bench.values) {
            *v -= b;
        }
    }
    Ok(ResidualWindow { values })
}

/// Biased sample autocovariance at lag `k`: `(1/K) Σ_{i≥k} x[i-k]·x[i]`,
/// without mean removal.
pub fn sample_autocov(x: &[f64], k: usize) -> Result<f64> {
    if k >= x.len() {
        return Err(Error::LagOutOfRange {
            lag: k,
            len: x.len(),
        });
    }
    Ok(lag_product(x, k) / x.len() as f64)
}

#[inline]
fn lag_product(x: &[f64], k: usize) -> f64 {
    x[..x.len() - k]
        .iter()
        .zip(&x[k..])
        .map(|(a, b)| a * b)
        .sum()
}

/// Autocovariance at every lag `0..K`.
pub fn autocov_sequence(x: &[f64], mode: AutocovMode) -> Vec<f64> {
    let centered;
    let x = match mode {
        AutocovMode::Raw => x,
        AutocovMode::Centered => {
            let mean = x.iter().sum::<f64>() / x.len() as f64;
            centered = x.iter().map(|v| v - mean).collect::<Vec<_>>();
            &centered
        }
    };
    let n = x.len() as f64;
    (0..x.len()).map(|k| lag_product(x, k) / n).collect()
}

/// Layer-one autocorrelation `γ̂(k) / γ̂(0)`. `None` when the input is
/// identically zero.
pub fn acf(x: &[f64]) -> Option<LagSeries> {
    acf_with(x, AutocovMode::Raw)
}

pub fn acf_with(x: &[f64], mode: AutocovMode) -> Option<LagSeries> {
    if x.is_empty() {
        return None;
    }
    let gamma = autocov_sequence(x, mode);
    let zero = gamma[0];
    if zero.is_nan() || zero <= 0.0 {
        return None;
    }
    Some(LagSeries {
        values: gamma.into_iter().map(|g| g / zero).collect(),
        layer: 1,
    })
}

/// `n`-layer autocorrelation: layer `j + 1` is the autocorrelation of the
/// full layer-`j` lag sequence (lag 0 included), renormalized by its own
/// lag-0 value. `n = 1` is [`acf`].
pub fn multi_layer_acf(x: &[f64], layers: usize) -> Option<LagSeries> {
    multi_layer_acf_with(x, layers, AutocovMode::Raw)
}

pub fn multi_layer_acf_with(x: &[f64], layers: usize, mode: AutocovMode) -> Option<LagSeries> {
    if layers == 0 {
        return None;
    }
    let mut series = acf_with(x, mode)?;
    for layer in 2..=layers {
        let next = acf_with(&series.values, mode)?;
        series = LagSeries {
            values: next.values,
            layer,
        };
    }
    Some(series)
}

/// Per-entry layer-`n` lag sequences of a window; `None` marks a flat
/// residual row.
pub fn window_lag_series(
    win: &NormalizedWindow,
    config: &DetectorConfig,
) -> Result<Vec<Option<LagSeries>>> {
    config.validate()?;
    if win.len() < 2 {
        return Err(Error::InvalidWindow(
            "detector needs at least 2 entries".into(),
        ));
    }
    if config.lag_index >= win.subcarriers() {
        return Err(Error::LagOutOfRange {
            lag: config.lag_index,
            len: win.subcarriers(),
        });
    }
    let bench = benchmark_cfr(win);
    let res = residual(win, &bench)?;
    Ok((0..res.values.rows())
        .map(|t| {
            let row = res.values.row(t);
            let energy: f64 = row.iter().map(|v| v * v).sum();
            let scale: f64 = win.values.row(t).iter().map(|v| v * v).sum();
            if energy <= FLAT_TOLERANCE * FLAT_TOLERANCE * scale {
                None
            } else {
                multi_layer_acf_with(row, config.layers, config.autocov_mode)
            }
        })
        .collect())
}

/// Motion statistic ψ_n(t) for every entry of the window: the layer-n
/// autocorrelation of the residual at the configured lag (one subcarrier
/// spacing by default). Flat residual rows report 0.
pub fn detect_window(win: &NormalizedWindow, config: &DetectorConfig) -> Result<Vec<f64>> {
    Ok(window_lag_series(win, config)?
        .into_iter()
        .map(|s| s.and_then(|s| s.at(config.lag_index)).unwrap_or(0.0))
        .collect())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    use super::*;

    fn normalized(rows: &[Vec<f64>]) -> NormalizedWindow {
        NormalizedWindow {
            values: RowMatrix::from_rows(rows).unwrap(),
            row_sums: vec![1.0; rows.len()],
            stream_id: 0,
            window_index: 0,
        }
    }

    /// Straight double loop over all index pairs.
    fn autocov_oracle(x: &[f64], k: usize) -> f64 {
        let mut acc = 0.0;
        for i in 0..x.len() {
            for j in 0..x.len() {
                if j == i + k {
                    acc += x[i] * x[j];
                }
            }
        }
        acc / x.len() as f64
    }

    fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.sample(StandardNormal)).collect()
    }

    #[test]
    fn alternating_sequence() {
        let x = [1.0, -1.0, 1.0, -1.0];
        assert_eq!(sample_autocov(&x, 0).unwrap(), 1.0);
        assert_eq!(sample_autocov(&x, 1).unwrap(), -0.75);
        assert_eq!(acf(&x).unwrap().values[1], -0.75);
        assert!(matches!(
            sample_autocov(&x, 4),
            Err(Error::LagOutOfRange { lag: 4, len: 4 })
        ));
    }

    #[test]
    fn last_lag_is_single_product() {
        let x = [0.3, -2.0, 5.0, 1.5, 4.0];
        assert_eq!(sample_autocov(&x, 4).unwrap(), 0.3 * 4.0 / 5.0);
    }

    #[test]
    fn zero_signal_has_no_acf() {
        assert!(acf(&[0.0; 8]).is_none());
        assert!(multi_layer_acf(&[0.0; 8], 3).is_none());
    }

    #[test]
    fn slow_sinusoid_is_highly_correlated() {
        let k = 234;
        let x: Vec<f64> = (0..k)
            .map(|i| (std::f64::consts::TAU * i as f64 / k as f64).sin())
            .collect();
        assert!(acf(&x).unwrap().values[1] > 0.9);
    }

    #[test]
    fn one_layer_is_acf() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = gaussian(&mut rng, 50);
        assert_eq!(
            multi_layer_acf(&x, 1).unwrap().values,
            acf(&x).unwrap().values
        );
        let three = multi_layer_acf(&x, 3).unwrap();
        assert_eq!(three.layer, 3);
        assert_eq!(three.values[0], 1.0);
        assert_eq!(three.values.len(), 50);
    }

    #[test]
    fn white_noise_lag_one_null_distribution() {
        let k = 234;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (mut abs_sum, mut sum, mut sum3) = (0.0, 0.0, 0.0);
        for _ in 0..1000 {
            let x = gaussian(&mut rng, k);
            let r1 = acf(&x).unwrap().values[1];
            abs_sum += r1.abs();
            sum += r1;
            sum3 += multi_layer_acf(&x, 3).unwrap().values[1];
        }
        assert!(abs_sum / 1000.0 < 3.0 / (k as f64).sqrt());
        assert!((sum / 1000.0).abs() < 0.03);
        assert!((sum3 / 1000.0).abs() < 0.05);
    }

    #[test]
    fn centered_mode_removes_offset() {
        let x: Vec<f64> = (0..64)
            .map(|i| 5.0 + if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let raw = acf_with(&x, AutocovMode::Raw).unwrap().values[1];
        let centered = acf_with(&x, AutocovMode::Centered).unwrap().values[1];
        assert!(raw > 0.8);
        assert!((centered + 63.0 / 64.0).abs() < 1e-12);
    }

    #[test]
    fn benchmark_examples() {
        let r = vec![0.1, 0.3, 0.6];
        let same = normalized(&[r.clone(), r.clone(), r.clone()]);
        for (got, want) in benchmark_cfr(&same).values.iter().zip(&r) {
            assert!((got - want).abs() < 1e-15);
        }

        let c = [0.2, 0.3, 0.5];
        let a = vec![0.25, 0.2, 0.55];
        let b: Vec<f64> = a.iter().zip(&c).map(|(a, c)| 2.0 * c - a).collect();
        let bench = benchmark_cfr(&normalized(&[a, b]));
        for (got, want) in bench.values.iter().zip(c) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn residual_examples() {
        let r = vec![0.1, 0.3, 0.6];
        let win = normalized(&[r.clone(), r.clone()]);
        let res = residual(&win, &benchmark_cfr(&win)).unwrap();
        assert!(res.values.as_slice().iter().all(|&v| v == 0.0));

        let bench = BenchmarkCfr { values: r.clone() };
        let bumped = normalized(&[vec![0.1, 0.35, 0.6]]);
        let res = residual(&bumped, &bench).unwrap();
        assert!((res.values[(0, 1)] - 0.05).abs() < 1e-15);
        assert_eq!(res.values[(0, 0)], 0.0);

        let short = BenchmarkCfr {
            values: vec![0.5, 0.5],
        };
        assert!(residual(&win, &short).is_err());
    }

    #[test]
    fn static_window_has_zero_statistics() {
        let r = vec![0.1, 0.2, 0.3, 0.4];
        let win = normalized(&vec![r; 20]);
        let psi = detect_window(&win, &DetectorConfig::default()).unwrap();
        assert_eq!(psi, vec![0.0; 20]);
    }

    #[test]
    fn lag_index_must_fit() {
        let win = normalized(&vec![vec![0.5, 0.5]; 4]);
        let config = DetectorConfig {
            lag_index: 2,
            ..Default::default()
        };
        assert!(detect_window(&win, &config).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn autocov_matches_double_loop(x in proptest::collection::vec(-10.0f64..10.0, 1..80), k_frac in 0.0f64..1.0) {
            let k = ((x.len() as f64) * k_frac) as usize % x.len();
            let fast = sample_autocov(&x, k).unwrap();
            prop_assert!((fast - autocov_oracle(&x, k)).abs() <= 1e-12);
        }

        #[test]
        fn acf_is_bounded(x in proptest::collection::vec(-10.0f64..10.0, 2..64)) {
            if let Some(s) = acf(&x) {
                prop_assert_eq!(s.values[0], 1.0);
                prop_assert!(s.values.iter().all(|v| v.abs() <= 1.0));
            }
        }

        #[test]
        fn acf_is_scale_invariant(
            x in proptest::collection::vec(-10.0f64..10.0, 2..64),
            c in prop_oneof![-100.0f64..-0.01, 0.01f64..100.0],
        ) {
            let scaled: Vec<f64> = x.iter().map(|v| v * c).collect();
            match (multi_layer_acf(&x, 3), multi_layer_acf(&scaled, 3)) {
                (Some(a), Some(b)) => {
                    for (u, v) in a.values.iter().zip(&b.values) {
                        prop_assert!((u - v).abs() <= 1e-9);
                    }
                }
                (None, None) => {}
                _ => prop_assert!(false, "flatness must not depend on scale"),
            }
        }
    }
}
