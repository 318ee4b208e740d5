use num_complex::Complex64;
use rayon::prelude::*;

use crate::recording::{windows, IqRecording};
use crate::{Error, Result};

/// Root mean square magnitude, `√(mean |z|²)`.
pub fn rms(samples: &[Complex64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    (samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / samples.len() as f64).sqrt()
}

/// Threshold applied to one span of the recording.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSegment {
    pub start: usize,
    pub len: usize,
    pub rms: f64,
    pub threshold: f64,
}

/// Per-sample impulse flags.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseMask {
    pub flags: Vec<bool>,
    pub alpha: f64,
    /// One entry for a global threshold, one per window otherwise.
    pub segments: Vec<ThresholdSegment>,
}

impl ImpulseMask {
    /// The threshold of the first (in global mode, only) segment.
    pub fn threshold(&self) -> f64 {
        self.segments[0].threshold
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn flagged(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    /// Mask with the given flags and no threshold information, e.g. to mark
    /// burst spans rather than individual impulses.
    pub fn from_flags(flags: Vec<bool>) -> Self {
        let len = flags.len();
        ImpulseMask {
            flags,
            alpha: f64::NAN,
            segments: vec![ThresholdSegment {
                start: 0,
                len,
                rms: f64::NAN,
                threshold: f64::NAN,
            }],
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    Ok(())
}

fn flag_span(samples: &[Complex64], start: usize, alpha: f64) -> (ThresholdSegment, Vec<bool>) {
    let w_rms = rms(samples);
    let threshold = alpha * w_rms;
    let limit = threshold * threshold;
    let flags = samples.iter().map(|z| z.norm_sqr() > limit).collect();
    let seg = ThresholdSegment {
        start,
        len: samples.len(),
        rms: w_rms,
        threshold,
    };
    (seg, flags)
}

/// Flags `|z| > α · W_rms` with `W_rms` taken over the whole recording.
pub fn impulse_mask(recording: &IqRecording, alpha: f64) -> Result<ImpulseMask> {
    check_alpha(alpha)?;
    let (seg, flags) = flag_span(recording.samples(), 0, alpha);
    Ok(ImpulseMask {
        flags,
        alpha,
        segments: vec![seg],
    })
}

/// Like [`impulse_mask`] but with `W_rms` recomputed on consecutive
/// non-overlapping windows of `window_len` samples.
pub fn impulse_mask_windowed(recording: &IqRecording, alpha: f64, window_len: usize) -> Result<ImpulseMask> {
    check_alpha(alpha)?;
    let parts: Vec<(ThresholdSegment, Vec<bool>)> = windows(recording.samples(), window_len, window_len)?
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|w| flag_span(w.samples, w.start, alpha))
        .collect();
    let mut flags = Vec::with_capacity(recording.len());
    let mut segments = Vec::with_capacity(parts.len());
    for (seg, f) in parts {
        segments.push(seg);
        flags.extend(f);
    }
    Ok(ImpulseMask { flags, alpha, segments })
}
