//! Time-dimension comparison detector: every subcarrier is an independent
//! time series and the statistic is its lag-one autocorrelation, averaged
//! over subcarriers.

use crate::detector::FLAT_TOLERANCE;
use crate::error::{Error, Result};
use crate::preprocess::NormalizedWindow;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineStatistic {
    pub phi_time: f64,
    pub stream_id: u16,
    pub window_index: u64,
}

/// Mean over subcarriers of the mean-removed, biased lag-one time
/// autocorrelation. Constant series contribute zero.
pub fn baseline_window_statistic(win: &NormalizedWindow) -> Result<BaselineStatistic> {
    let t = win.len();
    if t < 3 {
        return Err(Error::InvalidWindow(format!(
            "baseline needs at least 3 entries, got {t}"
        )));
    }
    let k = win.subcarriers();
    let mut series = vec![0.0; t];
    let mut total = 0.0;
    for i in 0..k {
        for (s, v) in series.iter_mut().zip(win.values.column(i)) {
            *s = v;
        }
        let mean = series.iter().sum::<f64>() / t as f64;
        let scale: f64 = series.iter().map(|v| v * v).sum();
        series.iter_mut().for_each(|v| *v -= mean);
        let c0: f64 = series.iter().map(|v| v * v).sum();
        if c0 <= FLAT_TOLERANCE * FLAT_TOLERANCE * scale {
            continue;
        }
        let c1: f64 = series.windows(2).map(|w| w[0] * w[1]).sum();
        total += c1 / c0;
    }
    Ok(BaselineStatistic {
        phi_time: total / k as f64,
        stream_id: win.stream_id,
        window_index: win.window_index,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::TAU;

    use super::*;
    use crate::matrix::RowMatrix;

    fn window(rows: Vec<Vec<f64>>) -> NormalizedWindow {
        let n = rows.len();
        NormalizedWindow {
            values: RowMatrix::from_rows(&rows).unwrap(),
            row_sums: vec![1.0; n],
            stream_id: 0,
            window_index: 0,
        }
    }

    #[test]
    fn static_window_is_zero() {
        let w = window(vec![vec![0.25; 4]; 20]);
        assert_eq!(baseline_window_statistic(&w).unwrap().phi_time, 0.0);
    }

    #[test]
    fn too_short_window_is_rejected() {
        assert!(baseline_window_statistic(&window(vec![vec![0.5, 0.5]; 2])).is_err());
    }

    /// Rows p + 0.1·sin(ω t)·q with Σq = 0 stay normalized; every subcarrier
    /// carries the same sampled sinusoid, whose biased lag-one ACF tends to
    /// cos(ω)·(T-1)/T over many periods.
    #[test]
    fn sampled_sinusoid_approaches_cosine() {
        let rate = 20.0;
        let omega = TAU * 0.3 / rate;
        let t_len = 4000;
        let p = [0.3, 0.2, 0.25, 0.25];
        let q = [1.0, -1.0, 0.5, -0.5];
        let rows = (0..t_len)
            .map(|t| {
                let s = (omega * t as f64).sin();
                p.iter().zip(&q).map(|(p, q)| p + 0.1 * s * q).collect()
            })
            .collect();
        let got = baseline_window_statistic(&window(rows)).unwrap().phi_time;
        let want = omega.cos() * (t_len as f64 - 1.0) / t_len as f64;
        assert!((got - want).abs() < 2e-3, "{got} vs {want}");
        assert!((want - 0.9956).abs() < 1e-3);
    }
}
