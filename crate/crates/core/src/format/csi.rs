//! CSI recording format.
//!
//! Text mode:
//!
//! ```text
//! #rapidpd-csi v1
//! #format=complex
//! #subcarriers=234
//! #rate_hz=2.0000000000000000e1
//! #center_hz=5.7750000000000000e9
//! #spacing_hz=3.1250000000000000e5
//! #streams=2
//! t_us,stream,agc,re0,im0,...
//! ```
//!
//! One CSV row per frame; `agc` is empty when the frame carries no gain,
//! amplitude files carry `a0,a1,...`. Floats use 17 significant digits, so
//! the text form round-trips `f64` exactly.
//!
//! Binary mode mirrors the same fields in little-endian order: the magic
//! `RPDCSI`, a `u16` version, the header, a `u64` frame count, and then one
//! record per frame prefixed by its `u32` byte length.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frame::CsiFrame;
use crate::grid::SubcarrierGrid;

pub const TEXT_MAGIC: &str = "#rapidpd-csi";
pub const BINARY_MAGIC: &[u8; 6] = b"RPDCSI";
pub const VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleFormat {
    Amplitude,
    Complex,
}

impl SampleFormat {
    fn name(self) -> &'static str {
        match self {
            SampleFormat::Amplitude => "amplitude",
            SampleFormat::Complex => "complex",
        }
    }

    fn code(self) -> u8 {
        match self {
            SampleFormat::Amplitude => 0,
            SampleFormat::Complex => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    Text,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsiHeader {
    pub format: SampleFormat,
    pub grid: SubcarrierGrid,
    pub rate_hz: f64,
    pub streams: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsiFile {
    pub header: CsiHeader,
    pub frames: Vec<CsiFrame>,
}

impl CsiFile {
    /// Checks every frame against the header's subcarrier count.
    pub fn validate(&self) -> Result<()> {
        let k = self.header.grid.count();
        if let Some((i, f)) = self.frames.iter().enumerate().find(|(_, f)| f.len() != k) {
            return Err(Error::Domain(format!(
                "frame {i} has {} subcarriers, header declares {k}",
                f.len()
            )));
        }
        Ok(())
    }
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_text<W: Write>(mut out: W, file: &CsiFile) -> Result<()> {
    file.validate()?;
    let h = &file.header;
    writeln!(out, "{TEXT_MAGIC} v{VERSION}")?;
    writeln!(out, "#format={}", h.format.name())?;
    writeln!(out, "#subcarriers={}", h.grid.count())?;
    writeln!(out, "#rate_hz={}", float(h.rate_hz))?;
    writeln!(out, "#center_hz={}", float(h.grid.center_freq()))?;
    writeln!(out, "#spacing_hz={}", float(h.grid.spacing()))?;
    writeln!(out, "#streams={}", h.streams)?;
    let mut line = String::new();
    for f in &file.frames {
        line.clear();
        line.push_str(&f.timestamp_us.to_string());
        line.push(',');
        line.push_str(&f.stream_id.to_string());
        line.push(',');
        if let Some(g) = f.agc_gain {
            line.push_str(&float(g));
        }
        for v in &f.values {
            match h.format {
                SampleFormat::Complex => {
                    line.push(',');
                    line.push_str(&float(v.re));
                    line.push(',');
                    line.push_str(&float(v.im));
                }
                SampleFormat::Amplitude => {
                    line.push(',');
                    line.push_str(&float(v.norm()));
                }
            }
        }
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_text<R: BufRead>(input: R, path: &Path) -> Result<CsiFile> {
    let perr = |line: usize, reason: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut lines = input.lines().enumerate();
    let (_, first) = lines
        .next()
        .ok_or_else(|| Error::EmptyInput(format!("{} is empty", path.display())))?;
    let first = first?;
    let version = first
        .strip_prefix(TEXT_MAGIC)
        .map(str::trim)
        .ok_or_else(|| perr(1, format!("missing `{TEXT_MAGIC}` magic")))?;
    if version != format!("v{VERSION}") {
        return Err(Error::Version(version.to_string()));
    }

    let (mut format, mut count, mut rate, mut center, mut spacing, mut streams) =
        (None, None, None, None, None, None);
    let mut frames = Vec::new();
    for (n, line) in lines {
        let lineno = n + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if let Some(kv) = line.strip_prefix('#') {
            if !frames.is_empty() {
                return Err(perr(lineno, "header line after data".into()));
            }
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| perr(lineno, "expected #key=value".into()))?;
            let num = |v: &str| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| perr(lineno, format!("bad number `{v}`")))
            };
            let int = |v: &str| {
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| perr(lineno, format!("bad integer `{v}`")))
            };
            match key.trim() {
                "format" => {
                    format = Some(match value.trim() {
                        "complex" => SampleFormat::Complex,
                        "amplitude" => SampleFormat::Amplitude,
                        other => return Err(perr(lineno, format!("unknown format `{other}`"))),
                    })
                }
                "subcarriers" => count = Some(int(value)?),
                "rate_hz" => rate = Some(num(value)?),
                "center_hz" => center = Some(num(value)?),
                "spacing_hz" => spacing = Some(num(value)?),
                "streams" => streams = Some(int(value)?),
                other => return Err(perr(lineno, format!("unknown header key `{other}`"))),
            }
            continue;
        }

        let (Some(format), Some(k)) = (format, count) else {
            return Err(perr(
                lineno,
                "data row before format/subcarriers header".into(),
            ));
        };
        let fields: Vec<&str> = line.split(',').collect();
        let per_value = if format == SampleFormat::Complex {
            2
        } else {
            1
        };
        let expected = 3 + k * per_value;
        if fields.len() != expected {
            return Err(perr(
                lineno,
                format!(
                    "expected {k} subcarriers ({expected} fields), found {} fields",
                    fields.len()
                ),
            ));
        }
        let t_us = fields[0]
            .parse::<u64>()
            .map_err(|_| perr(lineno, format!("bad timestamp `{}`", fields[0])))?;
        let stream = fields[1]
            .parse::<u16>()
            .map_err(|_| perr(lineno, format!("bad stream `{}`", fields[1])))?;
        let agc = if fields[2].is_empty() {
            None
        } else {
            Some(
                fields[2]
                    .parse::<f64>()
                    .map_err(|_| perr(lineno, format!("bad agc `{}`", fields[2])))?,
            )
        };
        let nums = fields[3..]
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| perr(lineno, format!("bad value `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let values = match format {
            SampleFormat::Complex => nums
                .chunks_exact(2)
                .map(|c| Complex64::new(c[0], c[1]))
                .collect(),
            SampleFormat::Amplitude => nums.into_iter().map(|a| Complex64::new(a, 0.0)).collect(),
        };
        frames.push(
            CsiFrame::new(t_us, stream, values, agc).map_err(|e| perr(lineno, e.to_string()))?,
        );
    }

    let missing = |key: &str| perr(1, format!("header is missing `{key}`"));
    let grid = SubcarrierGrid::new(
        center.ok_or_else(|| missing("center_hz"))?,
        spacing.ok_or_else(|| missing("spacing_hz"))?,
        count.ok_or_else(|| missing("subcarriers"))?,
    )?;
    Ok(CsiFile {
        header: CsiHeader {
            format: format.ok_or_else(|| missing("format"))?,
            grid,
            rate_hz: rate.ok_or_else(|| missing("rate_hz"))?,
            streams: streams.ok_or_else(|| missing("streams"))?,
        },
        frames,
    })
}

pub fn write_binary<W: Write>(mut out: W, file: &CsiFile) -> Result<()> {
    file.validate()?;
    let h = &file.header;
    out.write_all(BINARY_MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&[h.format.code()])?;
    out.write_all(&(h.grid.count() as u32).to_le_bytes())?;
    out.write_all(&h.rate_hz.to_le_bytes())?;
    out.write_all(&h.grid.center_freq().to_le_bytes())?;
    out.write_all(&h.grid.spacing().to_le_bytes())?;
    out.write_all(&(h.streams as u32).to_le_bytes())?;
    out.write_all(&(file.frames.len() as u64).to_le_bytes())?;
    let mut record = Vec::new();
    for f in &file.frames {
        record.clear();
        record.extend_from_slice(&f.timestamp_us.to_le_bytes());
        record.extend_from_slice(&f.stream_id.to_le_bytes());
        record.push(u8::from(f.agc_gain.is_some()));
        record.extend_from_slice(&f.agc_gain.unwrap_or(0.0).to_le_bytes());
        for v in &f.values {
            match h.format {
                SampleFormat::Complex => {
                    record.extend_from_slice(&v.re.to_le_bytes());
                    record.extend_from_slice(&v.im.to_le_bytes());
                }
                SampleFormat::Amplitude => record.extend_from_slice(&v.norm().to_le_bytes()),
            }
        }
        out.write_all(&(record.len() as u32).to_le_bytes())?;
        out.write_all(&record)?;
    }
    out.flush()?;
    Ok(())
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::Parse {
                path: self.path.to_path_buf(),
                line: 0,
                reason: format!("truncated at byte {}", self.pos),
            });
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.array()?))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.array()?))
    }
}

pub fn read_binary(bytes: &[u8], path: &Path) -> Result<CsiFile> {
    if bytes.is_empty() {
        return Err(Error::EmptyInput(format!("{} is empty", path.display())));
    }
    let perr = |record: usize, reason: String| Error::Parse {
        path: path.to_path_buf(),
        line: record,
        reason,
    };
    let mut cur = Cursor {
        buf: bytes,
        pos: 0,
        path,
    };
    if cur.take(BINARY_MAGIC.len())? != BINARY_MAGIC {
        return Err(perr(0, "missing binary magic".into()));
    }
    let version = cur.u16()?;
    if version != VERSION {
        return Err(Error::Version(format!("v{version}")));
    }
    let format = match cur.u8()? {
        0 => SampleFormat::Amplitude,
        1 => SampleFormat::Complex,
        other => return Err(perr(0, format!("unknown format code {other}"))),
    };
    let k = cur.u32()? as usize;
    let rate_hz = cur.f64()?;
    let center = cur.f64()?;
    let spacing = cur.f64()?;
    let streams = cur.u32()? as usize;
    let count = cur.u64()? as usize;
    let grid = SubcarrierGrid::new(center, spacing, k)?;

    let per_value = if format == SampleFormat::Complex {
        16
    } else {
        8
    };
    let expected_len = 8 + 2 + 1 + 8 + k * per_value;
    let mut frames = Vec::with_capacity(count);
    for record in 1..=count {
        let len = cur.u32()? as usize;
        if len != expected_len {
            return Err(perr(
                record,
                format!("record length {len}, expected {expected_len} for {k} subcarriers"),
            ));
        }
        let t_us = cur.u64()?;
        let stream = cur.u16()?;
        let has_agc = cur.u8()? != 0;
        let agc = cur.f64()?;
        let mut values = Vec::with_capacity(k);
        for _ in 0..k {
            values.push(match format {
                SampleFormat::Complex => Complex64::new(cur.f64()?, cur.f64()?),
                SampleFormat::Amplitude => Complex64::new(cur.f64()?, 0.0),
            });
        }
        frames.push(
            CsiFrame::new(t_us, stream, values, has_agc.then_some(agc))
                .map_err(|e| perr(record, e.to_string()))?,
        );
    }
    if cur.pos != bytes.len() {
        return Err(perr(
            count,
            format!("{} trailing bytes", bytes.len() - cur.pos),
        ));
    }
    Ok(CsiFile {
        header: CsiHeader {
            format,
            grid,
            rate_hz,
            streams,
        },
        frames,
    })
}

pub fn write_csi(path: &Path, file: &CsiFile, encoding: Encoding) -> Result<()> {
    let out = BufWriter::new(File::create(path)?);
    match encoding {
        Encoding::Text => write_text(out, file),
        Encoding::Binary => write_binary(out, file),
    }
}

/// Reads either encoding, detected from the leading magic bytes.
pub fn read_csi(path: &Path) -> Result<CsiFile> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.is_empty() {
        return Err(Error::EmptyInput(format!("{} is empty", path.display())));
    }
    if bytes.starts_with(BINARY_MAGIC) {
        read_binary(&bytes, path)
    } else {
        read_text(BufReader::new(bytes.as_slice()), path)
    }
}
