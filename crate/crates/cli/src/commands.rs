use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use csi_presence::detector::window_lag_series;
use csi_presence::eval::{evaluate, roc_sweep, threshold_grid, threshold_sweep, window_truth};
use csi_presence::format::{
    read_csi, read_labels, write_csi, write_labels, CsiFile, CsiHeader, Encoding, SampleFormat,
    WindowLabel,
};
use csi_presence::indicator::verdicts;
use csi_presence::preprocess::preprocess;
use csi_presence::sim::{synthesize, PresetParams, RadioModel, SceneSpec};
use csi_presence::{
    assemble_windows, score_windows, CsiWindow, DetectorConfig, DetectorKind, SubcarrierGrid,
    Verdict,
};
use log::info;
use serde_json::json;

use crate::args::{
    Command, CompareArgs, DetectArgs, EncodingArg, EvaluateArgs, RocArgs, SimulateArgs,
};
use crate::error::{CliError, CliResult};

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Simulate(a) => simulate(&a),
        Command::Detect(a) => detect(&a),
        Command::Evaluate(a) => evaluate_cmd(&a),
        Command::Roc(a) => roc(&a),
        Command::CompareBaseline(a) => compare(&a),
    }
}

/// Labels sidecar written next to a CSI file.
pub fn labels_path(csi: &Path) -> PathBuf {
    csi.with_extension("labels.csv")
}

pub fn meta_path(csi: &Path) -> PathBuf {
    csi.with_extension("meta")
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn simulate(a: &SimulateArgs) -> CliResult<()> {
    let config = a.common.detector_config()?;
    let grid = SubcarrierGrid::channel_155();
    let mut params = PresetParams::for_scenario(a.scenario);
    params.streams = a.streams;
    params.motile_rcs *= a.rcs_scale;
    if let Some(v) = a.amplitude {
        params.motion_amplitude = v;
    }
    if let Some(v) = a.breathing_rate {
        params.motion_rate = v;
    }
    let scene = SceneSpec::preset(a.scenario, &params, a.common.seed)?;
    let radio =
        RadioModel::default().with_snr_db(scene.links.iter().map(|l| &l.paths), &grid, a.snr_db)?;
    let syn = synthesize(&scene, &radio, a.duration, a.rate, &grid, a.common.seed)?;
    let windows = assemble_windows(&syn.frames, &config, a.rate)?;
    let labels = syn.window_labels(&windows);

    let file = CsiFile {
        header: CsiHeader {
            format: SampleFormat::Complex,
            grid,
            rate_hz: a.rate,
            streams: a.streams,
        },
        frames: syn.frames,
    };
    let encoding = match a.encoding {
        EncodingArg::Text => Encoding::Text,
        EncodingArg::Binary => Encoding::Binary,
    };
    write_csi(&a.out, &file, encoding)?;
    write_labels(&labels_path(&a.out), &labels)?;

    let mut meta = create(&meta_path(&a.out))?;
    writeln!(meta, "duration_s={}", a.duration)?;
    writeln!(meta, "rate_hz={}", a.rate)?;
    writeln!(meta, "snr_db={}", a.snr_db)?;
    writeln!(meta, "rcs_scale={}", a.rcs_scale)?;
    for (k, v) in &syn.metadata {
        writeln!(meta, "{k}={v}")?;
    }
    write!(meta, "{}", config.to_text())?;
    meta.flush()?;

    let window_count = labels
        .iter()
        .map(|l| l.window_index)
        .collect::<BTreeSet<_>>()
        .len();
    info!(
        "{} frames, {window_count} windows, noise sigma {:.3e}",
        file.frames.len(),
        radio.noise_sigma
    );
    println!(
        "wrote {} frames ({window_count} windows, scenario {}) to {}",
        file.frames.len(),
        a.scenario,
        a.out.display()
    );
    Ok(())
}

fn with_path(path: &Path) -> impl Fn(csi_presence::Error) -> csi_presence::Error + '_ {
    move |e| match e {
        csi_presence::Error::Io(io) => csi_presence::Error::Io(io::Error::new(
            io.kind(),
            format!("{}: {io}", path.display()),
        )),
        other => other,
    }
}

fn load_labels(path: &Path) -> CliResult<Vec<WindowLabel>> {
    Ok(read_labels(path).map_err(with_path(path))?)
}

fn load_windows(input: &Path, config: &DetectorConfig) -> CliResult<BTreeMap<u16, Vec<CsiWindow>>> {
    let file = read_csi(input).map_err(with_path(input))?;
    if file.frames.is_empty() {
        return Err(csi_presence::Error::EmptyInput(format!(
            "{} holds no frames",
            input.display()
        ))
        .into());
    }
    Ok(assemble_windows(&file.frames, config, file.header.rate_hz)?)
}

fn check_finite(verdicts: &[Verdict]) -> CliResult<()> {
    match verdicts.iter().find(|v| !v.overall.is_finite()) {
        Some(v) => Err(CliError::Internal(format!(
            "non-finite statistic in window {}",
            v.window_index
        ))),
        None => Ok(()),
    }
}

fn detect(a: &DetectArgs) -> CliResult<()> {
    let config = a.common.detector_config()?;
    let windows = load_windows(&a.input, &config)?;
    let stats = score_windows(&windows, &config, a.detector.into())?;
    let verdicts = verdicts(&stats, &config)?;
    check_finite(&verdicts)?;

    let mut out = output(a.out.as_deref())?;
    writeln!(out, "window_index,phi_overall,raw,smoothed")?;
    for v in &verdicts {
        writeln!(
            out,
            "{},{},{},{}",
            v.window_index,
            v.overall,
            u8::from(v.raw_decision),
            u8::from(v.final_decision(&config))
        )?;
    }
    out.flush()?;

    if let Some(path) = &a.lag_series {
        let mut out = create(path)?;
        writeln!(out, "window_index,stream,row,lag,value")?;
        for w in windows.values().flatten() {
            let series = window_lag_series(&preprocess(w)?, &config)?;
            for (row, s) in series.iter().enumerate() {
                for (lag, value) in s.iter().flat_map(|s| s.values.iter().enumerate()) {
                    writeln!(out, "{},{},{row},{lag},{value}", w.index, w.stream_id())?;
                }
            }
        }
        out.flush()?;
    }
    Ok(())
}

fn evaluate_cmd(a: &EvaluateArgs) -> CliResult<()> {
    let config = a.common.detector_config()?;
    let windows = load_windows(&a.input, &config)?;
    let labels = load_labels(a.labels.as_deref().unwrap_or(&labels_path(&a.input)))?;
    let stats = score_windows(&windows, &config, a.detector.into())?;
    let verdicts = verdicts(&stats, &config)?;
    check_finite(&verdicts)?;
    let report = evaluate(&verdicts, &labels, &config, 200)?;

    let Some(dir) = &a.out else {
        println!("{}", serde_json::to_string_pretty(&report)?);
        return Ok(());
    };
    fs::create_dir_all(dir)?;
    let mut json = create(&dir.join("report.json"))?;
    serde_json::to_writer_pretty(&mut json, &report)?;
    writeln!(json)?;
    json.flush()?;

    let truth = window_truth(&labels);
    let scores: Vec<f64> = verdicts.iter().map(|v| v.overall).collect();
    let actual: Vec<bool> = verdicts.iter().map(|v| truth[&v.window_index].0).collect();
    let sweep = threshold_sweep(&scores, &actual, &threshold_grid(&scores, a.sweep_steps))?;
    let mut csv = create(&dir.join("sweep.csv"))?;
    writeln!(csv, "threshold,accuracy,tpr,fpr")?;
    for p in &sweep {
        writeln!(csv, "{},{},{},{}", p.threshold, p.accuracy, p.tpr, p.fpr)?;
    }
    csv.flush()?;

    let mut csv = create(&dir.join("cdf.csv"))?;
    writeln!(csv, "class,phi_overall,cdf")?;
    for (class, cdf) in [
        ("present", &report.cdf_present),
        ("absent", &report.cdf_absent),
    ] {
        for (x, p) in cdf {
            writeln!(csv, "{class},{x},{p}")?;
        }
    }
    csv.flush()?;

    println!(
        "accuracy={:.4} tpr={:.4} fpr={:.4} threshold={}",
        report.accuracy, report.tpr, report.fpr, report.threshold
    );
    Ok(())
}

struct Recording {
    windows: BTreeMap<u16, Vec<CsiWindow>>,
    truth: BTreeMap<u64, bool>,
}

fn load_recordings(inputs: &[PathBuf], config: &DetectorConfig) -> CliResult<Vec<Recording>> {
    inputs
        .iter()
        .map(|input| {
            let labels = load_labels(&labels_path(input))?;
            Ok(Recording {
                windows: load_windows(input, config)?,
                truth: window_truth(&labels)
                    .into_iter()
                    .map(|(w, (l, _))| (w, l))
                    .collect(),
            })
        })
        .collect()
}

/// Overall statistic and truth for every window of every recording.
fn pooled_scores(
    recordings: &[Recording],
    config: &DetectorConfig,
    kind: DetectorKind,
) -> CliResult<(Vec<f64>, Vec<bool>)> {
    let (mut scores, mut labels) = (Vec::new(), Vec::new());
    for r in recordings {
        let mut overall: BTreeMap<u64, f64> = BTreeMap::new();
        for s in score_windows(&r.windows, config, kind)? {
            *overall.entry(s.window_index).or_default() += s.phi;
        }
        for (w, phi) in overall {
            let label = r.truth.get(&w).ok_or_else(|| {
                CliError::Data(csi_presence::Error::Misaligned(format!(
                    "window {w} has no label"
                )))
            })?;
            if !phi.is_finite() {
                return Err(CliError::Internal(format!(
                    "non-finite statistic in window {w}"
                )));
            }
            scores.push(phi);
            labels.push(*label);
        }
    }
    Ok((scores, labels))
}

fn roc(a: &RocArgs) -> CliResult<()> {
    let config = a.common.detector_config()?;
    let recordings = load_recordings(&a.input, &config)?;
    let (scores, labels) = pooled_scores(&recordings, &config, a.detector.into())?;
    let curve = roc_sweep(&scores, &labels, a.resolution)?;
    if let Some(path) = &a.out {
        let mut csv = create(path)?;
        writeln!(csv, "threshold,fpr,tpr")?;
        for p in &curve.points {
            writeln!(csv, "{},{},{}", p.threshold, p.fpr, p.tpr)?;
        }
        csv.flush()?;
    }
    println!("auc={:.6} windows={}", curve.auc, scores.len());
    Ok(())
}

fn compare(a: &CompareArgs) -> CliResult<()> {
    let config = a.common.detector_config()?;
    let recordings = load_recordings(&a.input, &config)?;
    let auc = |config: &DetectorConfig, kind| -> CliResult<(f64, usize, usize)> {
        let (scores, labels) = pooled_scores(&recordings, config, kind)?;
        let positives = labels.iter().filter(|&&l| l).count();
        Ok((
            roc_sweep(&scores, &labels, 0)?.auc,
            positives,
            labels.len() - positives,
        ))
    };
    let single = DetectorConfig {
        layers: 1,
        ..config.clone()
    };
    let (auc_single, positives, negatives) = auc(&single, DetectorKind::Subcarrier)?;
    let (auc_multi, ..) = auc(&config, DetectorKind::Subcarrier)?;
    let (auc_time, ..) = auc(&config, DetectorKind::TimeBaseline)?;
    let report = json!({
        "window_len": config.window_len,
        "positives": positives,
        "negatives": negatives,
        "layers": config.layers,
        "auc_single_layer": auc_single,
        "auc_multi_layer": auc_multi,
        "auc_time_baseline": auc_time,
    });
    let mut out = output(a.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}
