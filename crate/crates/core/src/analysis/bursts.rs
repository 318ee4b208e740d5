use num_complex::Complex64;
use rayon::prelude::*;

use super::mask::ImpulseMask;
use crate::recording::IqRecording;
use crate::{Error, Result};

/// Burst segmentation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurstConfig {
    /// Bursts shorter than this are discarded.
    pub min_duration_s: f64,
    /// Unflagged gaps up to this length are bridged.
    pub gap_tolerance_s: f64,
    /// Optional wider bridge that overrides `gap_tolerance_s`, used to join
    /// pulse trains whose spacing exceeds the gap tolerance.
    pub bridge_s: Option<f64>,
}

impl Default for BurstConfig {
    fn default() -> Self {
        BurstConfig {
            min_duration_s: 0.5e-3,
            gap_tolerance_s: 0.3e-6,
            bridge_s: None,
        }
    }
}

// Rounds up, ignoring float noise such as 0.5e-3 * 2.6e6 = 1300.0000000000002.
fn ceil_samples(seconds: f64, sample_rate_hz: f64) -> usize {
    let x = seconds * sample_rate_hz;
    (x - 1e-9 * x.abs().max(1.0)).ceil().max(0.0) as usize
}

impl BurstConfig {
    fn validate(&self) -> Result<()> {
        let ok = |x: f64| x >= 0.0 && x.is_finite();
        if !ok(self.min_duration_s) || !ok(self.gap_tolerance_s) || !self.bridge_s.is_none_or(ok) {
            return Err(Error::InvalidParameter(format!(
                "burst durations must be finite and nonnegative: {self:?}"
            )));
        }
        Ok(())
    }

    /// Longest bridged gap, in samples.
    pub fn gap_samples(&self, sample_rate_hz: f64) -> usize {
        ceil_samples(self.bridge_s.unwrap_or(self.gap_tolerance_s), sample_rate_hz)
    }

    /// Shortest kept burst, in samples (at least 1).
    pub fn min_samples(&self, sample_rate_hz: f64) -> usize {
        ceil_samples(self.min_duration_s, sample_rate_hz).max(1)
    }
}

/// A span `[start, end)` of the recording.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurstEvent {
    pub start: usize,
    pub end: usize,
    /// Mean of `|z|²` over the span.
    pub mean_power: f64,
    /// Impulsive state in `1..M`, once clustered.
    pub cluster: Option<u8>,
    /// Index of the bridged burst this span belongs to.
    pub burst: usize,
}

impl BurstEvent {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    pub fn duration_s(&self, sample_rate_hz: f64) -> f64 {
        self.len() as f64 / sample_rate_hz
    }
}

fn mean_power(samples: &[Complex64]) -> f64 {
    samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / samples.len() as f64
}

/// Maximal flagged runs with short gaps bridged, minus the runs that are
/// too short. Events are sorted and disjoint.
pub fn detect_bursts(recording: &IqRecording, mask: &ImpulseMask, config: &BurstConfig) -> Result<Vec<BurstEvent>> {
    config.validate()?;
    if mask.len() != recording.len() {
        return Err(Error::InvalidParameter(format!(
            "mask has {} flags for {} samples",
            mask.len(),
            recording.len()
        )));
    }
    let rate = recording.sample_rate_hz();
    let max_gap = config.gap_samples(rate);
    let min_len = config.min_samples(rate);

    let mut spans: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    let flags = &mask.flags;
    while i < flags.len() {
        if !flags[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < flags.len() && flags[i] {
            i += 1;
        }
        match spans.last_mut() {
            Some(last) if start - last.1 <= max_gap => last.1 = i,
            _ => spans.push((start, i)),
        }
    }

    let samples = recording.samples();
    Ok(spans
        .into_iter()
        .filter(|(s, e)| e - s >= min_len)
        .enumerate()
        .map(|(burst, (start, end))| BurstEvent {
            start,
            end,
            mean_power: mean_power(&samples[start..end]),
            cluster: None,
            burst,
        })
        .collect())
}

/// Power change-point settings for [`split_bursts`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitConfig {
    /// Minimum log-likelihood gain for accepting a cut.
    pub penalty: f64,
    /// Shortest segment produced by a cut.
    pub min_segment: usize,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            penalty: 5.0,
            min_segment: 2,
        }
    }
}

/// Splits one burst into segments of homogeneous power.
///
/// Within a segment `|z|²` of circular complex Gaussian noise is exponential,
/// so a segment of length `L` and mean power `μ` scores `L·ln μ` (negative
/// log-likelihood up to constants). Binary segmentation keeps cutting at the
/// best point while the score drops by more than `penalty`.
pub fn split_burst(samples: &[Complex64], event: &BurstEvent, config: &SplitConfig) -> Vec<BurstEvent> {
    let power: Vec<f64> = samples[event.start..event.end].iter().map(|z| z.norm_sqr()).collect();
    let mut prefix = Vec::with_capacity(power.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for p in &power {
        acc += p;
        prefix.push(acc);
    }
    let cost = |a: usize, b: usize| {
        let len = (b - a) as f64;
        let mean = ((prefix[b] - prefix[a]) / len).max(f64::MIN_POSITIVE);
        len * mean.ln()
    };
    let min_seg = config.min_segment.max(1);

    let mut out = Vec::new();
    // stack of pending spans, right half pushed first so output stays ordered
    let mut pending = vec![(0usize, power.len())];
    while let Some((a, b)) = pending.pop() {
        let mut best: Option<(usize, f64)> = None;
        if b - a >= 2 * min_seg {
            let whole = cost(a, b);
            for k in a + min_seg..=b - min_seg {
                let gain = whole - cost(a, k) - cost(k, b);
                if best.is_none_or(|(_, g)| gain > g) {
                    best = Some((k, gain));
                }
            }
        }
        match best {
            Some((k, gain)) if gain > config.penalty => {
                pending.push((k, b));
                pending.push((a, k));
            }
            _ => {
                let len = (b - a) as f64;
                out.push(BurstEvent {
                    start: event.start + a,
                    end: event.start + b,
                    mean_power: (prefix[b] - prefix[a]) / len,
                    cluster: None,
                    burst: event.burst,
                });
            }
        }
    }
    out
}

/// Applies [`split_burst`] to every event, keeping order.
pub fn split_bursts(recording: &IqRecording, events: &[BurstEvent], config: &SplitConfig) -> Vec<BurstEvent> {
    let samples = recording.samples();
    events
        .par_iter()
        .map(|e| split_burst(samples, e, config))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(flags: &[bool]) -> (IqRecording, ImpulseMask) {
        let samples = flags
            .iter()
            .map(|&f| Complex64::new(if f { 2.0 } else { 0.1 }, 0.0))
            .collect();
        let rec = IqRecording::new(samples, 1.0, "t").unwrap();
        (rec, ImpulseMask::from_flags(flags.to_vec()))
    }

    fn cfg(min: f64, gap: f64) -> BurstConfig {
        BurstConfig {
            min_duration_s: min,
            gap_tolerance_s: gap,
            bridge_s: None,
        }
    }

    fn spans(events: &[BurstEvent]) -> Vec<(usize, usize)> {
        events.iter().map(|e| (e.start, e.end)).collect()
    }

    #[test]
    fn no_flags_no_bursts() {
        let (rec, mask) = setup(&[false; 20]);
        assert!(detect_bursts(&rec, &mask, &cfg(0.0, 1.0)).unwrap().is_empty());
    }

    #[test]
    fn min_duration_boundary() {
        let mut flags = vec![false; 20];
        flags[5..10].iter_mut().for_each(|f| *f = true);
        let (rec, mask) = setup(&flags);
        assert_eq!(spans(&detect_bursts(&rec, &mask, &cfg(5.0, 0.0)).unwrap()), vec![(5, 10)]);
        flags[9] = false;
        let (rec, mask) = setup(&flags);
        assert!(detect_bursts(&rec, &mask, &cfg(5.0, 0.0)).unwrap().is_empty());
    }

    #[test]
    fn gap_bridging() {
        // runs [2,5) and [7,10): gap of 2 samples
        let mut flags = vec![false; 15];
        for i in (2..5).chain(7..10) {
            flags[i] = true;
        }
        let (rec, mask) = setup(&flags);
        let merged = detect_bursts(&rec, &mask, &cfg(1.0, 2.0)).unwrap();
        assert_eq!(spans(&merged), vec![(2, 10)]);
        // mean power over the bridged span includes the gap samples
        let expected = (6.0 * 4.0 + 2.0 * 0.01) / 8.0;
        assert!((merged[0].mean_power - expected).abs() < 1e-12);
        let apart = detect_bursts(&rec, &mask, &cfg(1.0, 1.0)).unwrap();
        assert_eq!(spans(&apart), vec![(2, 5), (7, 10)]);
        let bridged = detect_bursts(
            &rec,
            &mask,
            &BurstConfig {
                bridge_s: Some(2.0),
                ..cfg(1.0, 0.0)
            },
        )
        .unwrap();
        assert_eq!(spans(&bridged), vec![(2, 10)]);
    }

    #[test]
    fn tolerance_rounds_up_to_samples() {
        let c = BurstConfig::default();
        assert_eq!(c.gap_samples(2.6e6), 1);
        assert_eq!(c.min_samples(2.6e6), 1300);
    }

    #[test]
    fn split_finds_power_step() {
        let mut samples = Vec::new();
        // alternating signs keep |z|² exactly constant within each level
        for i in 0..40 {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            samples.push(Complex64::new(s * 0.1, 0.0));
        }
        for _ in 0..40 {
            samples.push(Complex64::new(1.0, 0.0));
        }
        let event = BurstEvent {
            start: 0,
            end: 80,
            mean_power: 0.0,
            cluster: None,
            burst: 0,
        };
        let parts = split_burst(&samples, &event, &SplitConfig::default());
        assert_eq!(spans(&parts), vec![(0, 40), (40, 80)]);
        assert!((parts[1].mean_power - 1.0).abs() < 1e-12);
    }

    #[test]
    fn split_leaves_flat_burst_alone() {
        let samples = vec![Complex64::new(0.5, 0.5); 64];
        let event = BurstEvent {
            start: 0,
            end: 64,
            mean_power: 0.5,
            cluster: None,
            burst: 3,
        };
        let parts = split_burst(&samples, &event, &SplitConfig::default());
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].burst, 3);
    }
}
