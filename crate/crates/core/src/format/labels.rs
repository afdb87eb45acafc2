use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::scene::Scenario;

pub const LABELS_HEADER: &str = "window_index,stream,label,scenario";

/// Ground truth for one window of one stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowLabel {
    pub window_index: u64,
    pub stream: u16,
    pub label: bool,
    pub scenario: Scenario,
}

pub fn write_labels_to<W: Write>(mut out: W, labels: &[WindowLabel]) -> Result<()> {
    writeln!(out, "{LABELS_HEADER}")?;
    for l in labels {
        writeln!(
            out,
            "{},{},{},{}",
            l.window_index,
            l.stream,
            u8::from(l.label),
            l.scenario
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_labels_from<R: BufRead>(input: R, path: &Path) -> Result<Vec<WindowLabel>> {
    let perr = |line: usize, reason: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut out = Vec::new();
    let mut saw_header = false;
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if !saw_header {
            if line != LABELS_HEADER {
                return Err(perr(n + 1, format!("expected header `{LABELS_HEADER}`")));
            }
            saw_header = true;
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(perr(n + 1, format!("expected 4 fields, found {}", f.len())));
        }
        let bad = |what: &str, v: &str| perr(n + 1, format!("bad {what} `{v}`"));
        out.push(WindowLabel {
            window_index: f[0].parse().map_err(|_| bad("window_index", f[0]))?,
            stream: f[1].parse().map_err(|_| bad("stream", f[1]))?,
            label: match f[2] {
                "0" => false,
                "1" => true,
                v => return Err(bad("label", v)),
            },
            scenario: f[3].parse().map_err(|_| bad("scenario", f[3]))?,
        });
    }
    if !saw_header {
        return Err(Error::EmptyInput(format!("{} is empty", path.display())));
    }
    Ok(out)
}

pub fn write_labels(path: &Path, labels: &[WindowLabel]) -> Result<()> {
    write_labels_to(BufWriter::new(File::create(path)?), labels)
}

pub fn read_labels(path: &Path) -> Result<Vec<WindowLabel>> {
    read_labels_from(BufReader::new(File::open(path)?), path)
}
