//! Baseband IQ recordings.
//!
//! Three headerless-or-minimal on-disk layouts are supported, always chosen by
//! an explicit tag:
//!
//! - `f32le`: interleaved `I0, Q0, I1, Q1, ..` little-endian IEEE-754 binary32.
//! - `s16le`: interleaved little-endian two's-complement 16-bit integers,
//!   scaled by 1/32768 on load.
//! - `csv`: a header line `i,q` followed by one decimal `i,q` pair per line.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;

use crate::fsutil::write_atomic;
use crate::{Error, Result};

const S16_SCALE: f64 = 32768.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IqFormat {
    F32Le,
    S16Le,
    Csv,
}

impl IqFormat {
    pub fn tag(self) -> &'static str {
        match self {
            IqFormat::F32Le => "f32le",
            IqFormat::S16Le => "s16le",
            IqFormat::Csv => "csv",
        }
    }

    fn frame_bytes(self) -> Option<usize> {
        match self {
            IqFormat::F32Le => Some(8),
            IqFormat::S16Le => Some(4),
            IqFormat::Csv => None,
        }
    }
}

impl fmt::Display for IqFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for IqFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f32le" => Ok(IqFormat::F32Le),
            "s16le" => Ok(IqFormat::S16Le),
            "csv" => Ok(IqFormat::Csv),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

/// Complex baseband samples with their sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct IqRecording {
    samples: Vec<Complex64>,
    sample_rate_hz: f64,
    origin: String,
}

impl IqRecording {
    pub fn new(samples: Vec<Complex64>, sample_rate_hz: f64, origin: impl Into<String>) -> Result<Self> {
        if !(sample_rate_hz > 0.0 && sample_rate_hz.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        if samples.is_empty() {
            return Err(Error::InsufficientData("recording has no samples".into()));
        }
        Ok(IqRecording {
            samples,
            sample_rate_hz,
            origin: origin.into(),
        })
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }
}

/// Reads a recording in the given format.
pub fn load_iq(path: &Path, format: IqFormat, sample_rate_hz: f64) -> Result<IqRecording> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    let samples = decode_iq(&bytes, format)?;
    IqRecording::new(samples, sample_rate_hz, path.display().to_string())
}

/// Decodes an in-memory buffer.
pub fn decode_iq(bytes: &[u8], format: IqFormat) -> Result<Vec<Complex64>> {
    if let Some(frame) = format.frame_bytes() {
        let whole = bytes.len() - bytes.len() % frame;
        if whole != bytes.len() {
            return Err(Error::TruncatedFrame { offset: whole as u64 });
        }
    }
    match format {
        IqFormat::F32Le => Ok(bytes
            .chunks_exact(8)
            .map(|c| {
                let i = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
                let q = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
                Complex64::new(i as f64, q as f64)
            })
            .collect()),
        IqFormat::S16Le => Ok(bytes
            .chunks_exact(4)
            .map(|c| {
                let i = i16::from_le_bytes([c[0], c[1]]);
                let q = i16::from_le_bytes([c[2], c[3]]);
                Complex64::new(i as f64 / S16_SCALE, q as f64 / S16_SCALE)
            })
            .collect()),
        IqFormat::Csv => decode_csv(bytes),
    }
}

fn decode_csv(bytes: &[u8]) -> Result<Vec<Complex64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(1, e.to_string()))?
        .clone();
    if headers.len() != 2 || &headers[0] != "i" || &headers[1] != "q" {
        return Err(Error::parse(1, "expected header `i,q`"));
    }
    let mut samples = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::parse(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != 2 {
            return Err(Error::parse(line, "expected two fields"));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::parse(line, format!("not a number: `{s}`")))
        };
        samples.push(Complex64::new(parse(&record[0])?, parse(&record[1])?));
    }
    Ok(samples)
}

/// Encodes samples in the given format.
pub fn encode_iq(samples: &[Complex64], format: IqFormat) -> Vec<u8> {
    match format {
        IqFormat::F32Le => {
            let mut out = Vec::with_capacity(samples.len() * 8);
            for s in samples {
                out.extend_from_slice(&(s.re as f32).to_le_bytes());
                out.extend_from_slice(&(s.im as f32).to_le_bytes());
            }
            out
        }
        IqFormat::S16Le => {
            let quantize = |x: f64| (x * S16_SCALE).round().clamp(-32768.0, 32767.0) as i16;
            let mut out = Vec::with_capacity(samples.len() * 4);
            for s in samples {
                out.extend_from_slice(&quantize(s.re).to_le_bytes());
                out.extend_from_slice(&quantize(s.im).to_le_bytes());
            }
            out
        }
        IqFormat::Csv => {
            let mut out = String::with_capacity(samples.len() * 24 + 4);
            out.push_str("i,q\n");
            for s in samples {
                out.push_str(&format!("{},{}\n", s.re, s.im));
            }
            out.into_bytes()
        }
    }
}

/// Writes a recording atomically. Inverse of [`load_iq`] for the same tag.
pub fn write_iq(recording: &IqRecording, path: &Path, format: IqFormat) -> Result<()> {
    let bytes = encode_iq(recording.samples(), format);
    write_atomic(path, |w| w.write_all(&bytes))?;
    Ok(())
}

/// One analysis window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window<'a> {
    pub index: usize,
    pub start: usize,
    pub samples: &'a [Complex64],
    /// Set when the window was truncated by the end of the recording.
    pub partial: bool,
}

/// Iterator over `window_len`-sample windows advancing by `hop`.
#[derive(Debug, Clone)]
pub struct Windows<'a> {
    samples: &'a [Complex64],
    window_len: usize,
    hop: usize,
    next: usize,
    count: usize,
}

impl<'a> Iterator for Windows<'a> {
    type Item = Window<'a>;

    fn next(&mut self) -> Option<Window<'a>> {
        if self.next >= self.count {
            return None;
        }
        let index = self.next;
        self.next += 1;
        let start = index * self.hop;
        let end = (start + self.window_len).min(self.samples.len());
        Some(Window {
            index,
            start,
            samples: &self.samples[start..end],
            partial: end - start < self.window_len,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.count - self.next;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Windows<'_> {}

/// Windows start at multiples of `hop` and stop once a window reaches the
/// end of the recording, giving `⌈(n − window_len)/hop⌉ + 1` windows. The
/// last window is truncated and flagged when it would run past the end.
pub fn window_iter(recording: &IqRecording, window_len: usize, hop: usize) -> Result<Windows<'_>> {
    windows(recording.samples(), window_len, hop)
}

pub(crate) fn windows(samples: &[Complex64], window_len: usize, hop: usize) -> Result<Windows<'_>> {
    if window_len == 0 || hop == 0 {
        return Err(Error::InvalidParameter(
            "window length and hop must be at least 1".into(),
        ));
    }
    let n = samples.len();
    let count = if window_len >= n {
        1
    } else {
        (n - window_len).div_ceil(hop) + 1
    };
    Ok(Windows {
        samples,
        window_len,
        hop,
        next: 0,
        count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(n: usize) -> IqRecording {
        let samples = (0..n).map(|i| Complex64::new(i as f64, 0.0)).collect();
        IqRecording::new(samples, 1.0, "test").unwrap()
    }

    #[test]
    fn decode_single_f32_frame() {
        let mut bytes = 1.0f32.to_le_bytes().to_vec();
        bytes.extend_from_slice(&(-1.0f32).to_le_bytes());
        assert_eq!(decode_iq(&bytes, IqFormat::F32Le).unwrap(), vec![Complex64::new(1.0, -1.0)]);
    }

    #[test]
    fn decode_s16_scaling() {
        let mut bytes = 16384i16.to_le_bytes().to_vec();
        bytes.extend_from_slice(&0i16.to_le_bytes());
        assert_eq!(decode_iq(&bytes, IqFormat::S16Le).unwrap(), vec![Complex64::new(0.5, 0.0)]);
    }

    #[test]
    fn truncated_frame_reports_offset() {
        let bytes = vec![0u8; 8 * 3 + 5];
        match decode_iq(&bytes, IqFormat::F32Le) {
            Err(Error::TruncatedFrame { offset }) => assert_eq!(offset, 24),
            other => panic!("unexpected {other:?}"),
        }
        match decode_iq(&[0u8; 6], IqFormat::S16Le) {
            Err(Error::TruncatedFrame { offset }) => assert_eq!(offset, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_tag() {
        assert!(matches!("wav".parse::<IqFormat>(), Err(Error::UnknownFormat(_))));
        for f in [IqFormat::F32Le, IqFormat::S16Le, IqFormat::Csv] {
            assert_eq!(f.tag().parse::<IqFormat>().unwrap(), f);
        }
    }

    #[test]
    fn csv_errors_carry_line() {
        let text = b"i,q\n1,2\n3,x\n";
        match decode_iq(text, IqFormat::Csv) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(decode_iq(b"a,b\n1,2\n", IqFormat::Csv).is_err());
    }

    #[test]
    fn s16_quantization_bound() {
        let samples = vec![Complex64::new(0.123456, -0.987654), Complex64::new(-1.0, 0.99999)];
        let back = decode_iq(&encode_iq(&samples, IqFormat::S16Le), IqFormat::S16Le).unwrap();
        for (a, b) in samples.iter().zip(&back) {
            assert!((a.re - b.re).abs() <= 1.0 / 32768.0);
            assert!((a.im - b.im).abs() <= 1.0 / 32768.0);
        }
    }

    #[test]
    fn csv_text_round_trip() {
        let samples = vec![Complex64::new(0.1, -2.5e-7), Complex64::new(1.0 / 3.0, 42.0)];
        let back = decode_iq(&encode_iq(&samples, IqFormat::Csv), IqFormat::Csv).unwrap();
        for (a, b) in samples.iter().zip(&back) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn windows_even_split() {
        let r = rec(10);
        let w: Vec<_> = window_iter(&r, 5, 5).unwrap().collect();
        assert_eq!(w.len(), 2);
        assert!(w.iter().all(|w| !w.partial && w.samples.len() == 5));
    }

    #[test]
    fn windows_overlapping() {
        let r = rec(10);
        let starts: Vec<_> = window_iter(&r, 4, 3).unwrap().map(|w| (w.start, w.partial)).collect();
        assert_eq!(starts, vec![(0, false), (3, false), (6, false)]);
        let starts: Vec<_> = window_iter(&r, 4, 4).unwrap().map(|w| (w.start, w.partial)).collect();
        assert_eq!(starts, vec![(0, false), (4, false), (8, true)]);
    }

    #[test]
    fn windows_degenerate() {
        let r = rec(10);
        assert_eq!(window_iter(&r, 10, 3).unwrap().count(), 1);
        let w: Vec<_> = window_iter(&r, 25, 1).unwrap().collect();
        assert_eq!(w.len(), 1);
        assert!(w[0].partial);
        assert_eq!(w[0].samples.len(), 10);
        assert!(window_iter(&r, 0, 1).is_err());
    }

    #[test]
    fn recording_invariants() {
        assert!(IqRecording::new(vec![], 1.0, "x").is_err());
        assert!(IqRecording::new(vec![Complex64::new(0.0, 0.0)], 0.0, "x").is_err());
    }
}
