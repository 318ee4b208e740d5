use num_complex::Complex64;

use super::mask::ImpulseMask;
use crate::recording::IqRecording;
use crate::{Error, Result};

/// Fewest unflagged samples accepted by [`background_stats`].
pub const MIN_BACKGROUND_SAMPLES: usize = 100;

const HISTOGRAM_BINS: usize = 101;
const HISTOGRAM_SPAN_SIGMAS: f64 = 5.0;

/// Moments of one real component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentStats {
    pub mean: f64,
    pub variance: f64,
    pub excess_kurtosis: f64,
}

impl ComponentStats {
    pub fn from_values(values: impl Iterator<Item = f64> + Clone) -> Self {
        let mut n = 0usize;
        let mut sum = 0.0;
        for v in values.clone() {
            n += 1;
            sum += v;
        }
        let mean = sum / n as f64;
        let (mut m2, mut m4) = (0.0, 0.0);
        for v in values {
            let d2 = (v - mean) * (v - mean);
            m2 += d2;
            m4 += d2 * d2;
        }
        m2 /= n as f64;
        m4 /= n as f64;
        ComponentStats {
            mean,
            variance: m2,
            excess_kurtosis: m4 / (m2 * m2) - 3.0,
        }
    }
}

/// Equal-width histogram; `edges.len() == counts.len() + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// Histogram over `[lo, hi]`; values outside are dropped.
    pub fn build(values: impl Iterator<Item = f64>, lo: f64, hi: f64, bins: usize) -> Self {
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins).map(|i| lo + i as f64 * width).collect();
        let mut counts = vec![0u64; bins];
        for v in values {
            if v < lo || v > hi || !v.is_finite() {
                continue;
            }
            let idx = (((v - lo) / width) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        Histogram { edges, counts }
    }

    /// CSV with columns `lo,hi,count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lo,hi,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", self.edges[i], self.edges[i + 1], c));
        }
        out
    }
}

/// Off-burst diagnostics used to judge the impulse threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundStats {
    pub count: usize,
    pub i: ComponentStats,
    pub q: ComponentStats,
    pub histogram_i: Histogram,
    pub histogram_q: Histogram,
}

/// Mean, variance and excess kurtosis of I and Q over the unflagged samples.
pub fn background_stats(recording: &IqRecording, mask: &ImpulseMask) -> Result<BackgroundStats> {
    if mask.len() != recording.len() {
        return Err(Error::InvalidParameter(format!(
            "mask has {} flags for {} samples",
            mask.len(),
            recording.len()
        )));
    }
    let background = || {
        recording
            .samples()
            .iter()
            .zip(&mask.flags)
            .filter(|(_, &f)| !f)
            .map(|(z, _)| *z)
    };
    let count = background().count();
    if count < MIN_BACKGROUND_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "{count} background samples, need at least {MIN_BACKGROUND_SAMPLES}"
        )));
    }
    let i = ComponentStats::from_values(background().map(|z: Complex64| z.re));
    let q = ComponentStats::from_values(background().map(|z: Complex64| z.im));
    let span = HISTOGRAM_SPAN_SIGMAS * (0.5 * (i.variance + q.variance)).sqrt();
    let span = if span > 0.0 { span } else { 1.0 };
    Ok(BackgroundStats {
        count,
        i,
        q,
        histogram_i: Histogram::build(background().map(|z| z.re), -span, span, HISTOGRAM_BINS),
        histogram_q: Histogram::build(background().map(|z| z.im), -span, span, HISTOGRAM_BINS),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_of_known_values() {
        let s = ComponentStats::from_values([1.0, -1.0, 1.0, -1.0].into_iter());
        assert_eq!(s.mean, 0.0);
        assert_eq!(s.variance, 1.0);
        assert_eq!(s.excess_kurtosis, -2.0);
    }

    #[test]
    fn too_few_background_samples() {
        let rec = IqRecording::new(vec![Complex64::new(1.0, 0.0); 150], 1.0, "t").unwrap();
        let mut flags = vec![true; 150];
        flags[..99].iter_mut().for_each(|f| *f = false);
        let err = background_stats(&rec, &ImpulseMask::from_flags(flags)).unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)));
    }

    #[test]
    fn histogram_counts_everything_in_range() {
        let h = Histogram::build([0.0, 0.5, 1.0, 2.0].into_iter(), 0.0, 1.0, 4);
        assert_eq!(h.counts.iter().sum::<u64>(), 3);
        assert_eq!(h.counts[3], 1);
        assert!(h.to_csv().starts_with("lo,hi,count\n"));
    }
}
