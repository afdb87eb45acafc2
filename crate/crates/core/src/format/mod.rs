//! On-disk formats: CSI recordings (text and binary) and window labels.

pub mod csi;
pub mod labels;

pub use csi::{read_csi, write_csi, CsiFile, CsiHeader, Encoding, SampleFormat};
pub use labels::{read_labels, write_labels, WindowLabel};
