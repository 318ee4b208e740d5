use std::fmt;
use std::str::FromStr;

use super::bursts::{detect_bursts, split_bursts, BurstConfig, BurstEvent, SplitConfig};
use super::kmeans::kmeans_1d;
use super::mask::{impulse_mask, impulse_mask_windowed, ImpulseMask};
use super::stats::{background_stats, BackgroundStats, ComponentStats};
use crate::kvtext::KvDocument;
use crate::model::{correlation_from_duration, ModelProfile};
use crate::recording::IqRecording;
use crate::{Error, Result};

const REPORT_FORMAT: &str = "burstnoise-report/1";

/// Scale on which segment powers are clustered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterFeature {
    /// `10·log10(mean |z|²)`.
    PowerDb,
    /// `mean |z|²`.
    Power,
}

impl ClusterFeature {
    pub fn tag(self) -> &'static str {
        match self {
            ClusterFeature::PowerDb => "power-db",
            ClusterFeature::Power => "power",
        }
    }

    pub fn apply(self, mean_power: f64) -> f64 {
        match self {
            ClusterFeature::PowerDb => 10.0 * mean_power.max(f64::MIN_POSITIVE).log10(),
            ClusterFeature::Power => mean_power,
        }
    }
}

impl fmt::Display for ClusterFeature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ClusterFeature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power-db" => Ok(ClusterFeature::PowerDb),
            "power" => Ok(ClusterFeature::Power),
            other => Err(Error::Config(format!("unknown cluster feature `{other}`"))),
        }
    }
}

/// Settings for [`estimate_profile`].
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    /// Threshold scale `α` in `th = α · W_rms`.
    pub alpha: f64,
    /// Recompute `W_rms` per window of this many samples instead of globally.
    pub threshold_window: Option<usize>,
    pub bursts: BurstConfig,
    /// Change-point refinement of bursts; `None` keeps whole bursts.
    pub split: Option<SplitConfig>,
    /// Number of impulsive clusters, `M − 1`.
    pub clusters: usize,
    pub feature: ClusterFeature,
    pub kmeans_max_iters: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            alpha: 3.0,
            threshold_window: None,
            bursts: BurstConfig::default(),
            split: Some(SplitConfig::default()),
            clusters: 3,
            feature: ClusterFeature::PowerDb,
            kmeans_max_iters: 100,
        }
    }
}

impl AnalysisConfig {
    pub fn to_kv(&self) -> KvDocument {
        let mut doc = KvDocument::new();
        doc.set_f64("alpha", self.alpha)
            .set(
                "threshold_window",
                self.threshold_window.map_or("global".to_string(), |w| w.to_string()),
            )
            .set_f64("min_duration_s", self.bursts.min_duration_s)
            .set_f64("gap_tolerance_s", self.bursts.gap_tolerance_s)
            .set(
                "bridge_s",
                self.bursts.bridge_s.map_or("none".to_string(), |b| b.to_string()),
            )
            .set(
                "split_penalty",
                self.split.map_or("none".to_string(), |s| s.penalty.to_string()),
            )
            .set(
                "split_min_segment",
                self.split.map_or("none".to_string(), |s| s.min_segment.to_string()),
            )
            .set("clusters", self.clusters)
            .set("feature", self.feature)
            .set("kmeans_max_iters", self.kmeans_max_iters);
        doc
    }
}

/// Estimated model plus the diagnostics behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationReport {
    pub profile: ModelProfile,
    /// Mean run length of each state, in samples.
    pub durations: Vec<f64>,
    /// Bridged bursts that passed the minimum duration.
    pub burst_count: usize,
    /// Labelled segments (equal to the bursts when splitting is off).
    pub events: Vec<BurstEvent>,
    /// Cluster centres on the configured feature scale, ascending.
    pub centroids: Vec<f64>,
    pub background: BackgroundStats,
    pub threshold: f64,
    pub rms: f64,
    pub num_samples: usize,
    pub sample_rate_hz: f64,
    pub origin: String,
    pub config: AnalysisConfig,
}

impl EstimationReport {
    pub fn to_kv(&self) -> KvDocument {
        let mut doc = self.profile.to_kv();
        doc.set("format", REPORT_FORMAT)
            .set_vec("durations", &self.durations)
            .set("burst_count", self.burst_count)
            .set("segment_count", self.events.len())
            .set_vec("cluster_centroids", &self.centroids)
            .set("samples", self.num_samples)
            .set_f64("sample_rate_hz", self.sample_rate_hz)
            .set_f64("rms", self.rms)
            .set_f64("threshold", self.threshold)
            .set("origin", &self.origin);
        doc.extend_prefixed("background", &background_kv(&self.background));
        doc.extend_prefixed("config", &self.config.to_kv());
        doc
    }

    /// Per-segment CSV: `start,end,mean_power,cluster,burst`.
    pub fn events_csv(&self) -> String {
        events_csv(&self.events)
    }

    /// Checks `r = 1 − 1/(d_0 (1 − p_0))` against the estimates.
    pub fn check_consistency(&self, tolerance: f64) -> Result<f64> {
        check_estimates(&self.profile, &self.durations, tolerance)
    }
}

/// Background moments as report keys.
pub fn background_kv(stats: &BackgroundStats) -> KvDocument {
    let mut doc = KvDocument::new();
    let mut put = |name: &str, c: &ComponentStats| {
        doc.set_f64(format!("{name}_mean"), c.mean)
            .set_f64(format!("{name}_variance"), c.variance)
            .set_f64(format!("{name}_excess_kurtosis"), c.excess_kurtosis);
    };
    put("i", &stats.i);
    put("q", &stats.q);
    doc.set("count", stats.count);
    doc
}

/// `start,end,mean_power,cluster,burst` rows.
pub fn events_csv(events: &[BurstEvent]) -> String {
    let mut out = String::from("start,end,mean_power,cluster,burst\n");
    for e in events {
        let cluster = e.cluster.map_or(String::new(), |c| c.to_string());
        out.push_str(&format!("{},{},{},{},{}\n", e.start, e.end, e.mean_power, cluster, e.burst));
    }
    out
}

/// Reads `state_probs`, `state_sigmas`, `correlation` and `durations` from a
/// report or hand-written parameter table.
pub fn parse_estimates(doc: &KvDocument) -> Result<(ModelProfile, Vec<f64>)> {
    let profile = ModelProfile::from_kv(doc)?;
    let durations = doc.get_vec("durations")?;
    if durations.len() != profile.num_states() {
        return Err(Error::Config(format!(
            "{} durations for {} states",
            durations.len(),
            profile.num_states()
        )));
    }
    if durations.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(Error::Config(format!("durations must be positive: {durations:?}")));
    }
    Ok((profile, durations))
}

/// Recomputes `r` from `(d_0, p_0)` and compares it with the stated value.
/// Returns the recomputed correlation.
pub fn check_estimates(profile: &ModelProfile, durations: &[f64], tolerance: f64) -> Result<f64> {
    let d0 = *durations
        .first()
        .ok_or_else(|| Error::Config("no durations".into()))?;
    let r = correlation_from_duration(d0, profile.state_probs()[0])?;
    if (r - profile.correlation()).abs() > tolerance {
        return Err(Error::InconsistentMeasurement { value: r });
    }
    Ok(r)
}

fn run_lengths(labels: &[u8], states: usize) -> Vec<f64> {
    let mut total = vec![0usize; states];
    let mut runs = vec![0usize; states];
    let mut i = 0;
    while i < labels.len() {
        let s = labels[i];
        let start = i;
        while i < labels.len() && labels[i] == s {
            i += 1;
        }
        total[s as usize] += i - start;
        runs[s as usize] += 1;
    }
    total
        .iter()
        .zip(&runs)
        .map(|(&t, &r)| if r == 0 { f64::NAN } else { t as f64 / r as f64 })
        .collect()
}

/// Fits the modified Markov-Middleton model to a recording.
///
/// Every labelled segment assigns its samples to an impulsive state; all
/// remaining samples form the background state 0. Then
///
/// - `p̂_m` is the fraction of samples in state `m`, with `p̂_0 = 1 − Σ p̂_m`;
/// - `σ̂_m` is the pooled I/Q sample standard deviation of state `m`;
/// - `d̂_m` is the mean length of maximal runs of state `m`;
/// - `r̂ = 1 − 1/(d̂_0 (1 − p̂_0))`.
pub fn estimate_profile(recording: &IqRecording, config: &AnalysisConfig) -> Result<EstimationReport> {
    if config.clusters == 0 {
        return Err(Error::InvalidParameter("need at least one impulsive cluster".into()));
    }
    if config.clusters + 1 > crate::synth::MAX_STATES {
        return Err(Error::InvalidParameter("too many clusters".into()));
    }
    let mask = match config.threshold_window {
        Some(w) => impulse_mask_windowed(recording, config.alpha, w)?,
        None => impulse_mask(recording, config.alpha)?,
    };
    let bursts = detect_bursts(recording, &mask, &config.bursts)?;
    if bursts.is_empty() {
        return Err(Error::InsufficientData("no bursts detected".into()));
    }
    let mut events = match &config.split {
        Some(split) => split_bursts(recording, &bursts, split),
        None => bursts.clone(),
    };
    let features: Vec<f64> = events.iter().map(|e| config.feature.apply(e.mean_power)).collect();
    let clustering = kmeans_1d(&features, config.clusters, config.kmeans_max_iters)?;
    for (e, &l) in events.iter_mut().zip(&clustering.labels) {
        e.cluster = Some(l as u8 + 1);
    }

    let n = recording.len();
    let states = config.clusters + 1;
    let mut labels = vec![0u8; n];
    for e in &events {
        labels[e.start..e.end].fill(e.cluster.unwrap_or(0));
    }

    let mut counts = vec![0usize; states];
    let mut sums = vec![(0.0f64, 0.0f64); states];
    for (z, &l) in recording.samples().iter().zip(&labels) {
        counts[l as usize] += 1;
        sums[l as usize].0 += z.re;
        sums[l as usize].1 += z.im;
    }
    if let Some(m) = counts.iter().position(|&c| c < 2) {
        return Err(Error::InsufficientData(format!(
            "state {m} holds {} samples",
            counts[m]
        )));
    }
    let means: Vec<(f64, f64)> = sums
        .iter()
        .zip(&counts)
        .map(|(&(si, sq), &c)| (si / c as f64, sq / c as f64))
        .collect();
    let mut sq = vec![0.0f64; states];
    for (z, &l) in recording.samples().iter().zip(&labels) {
        let (mi, mq) = means[l as usize];
        sq[l as usize] += (z.re - mi).powi(2) + (z.im - mq).powi(2);
    }
    let sigmas: Vec<f64> = sq
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| (s / (2 * (c - 1)) as f64).sqrt())
        .collect();

    let mut probs: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
    probs[0] = 1.0 - probs[1..].iter().sum::<f64>();
    let durations = run_lengths(&labels, states);
    let r = correlation_from_duration(durations[0], probs[0])?;
    if let Some(m) = (1..states).find(|&m| sigmas[m] <= sigmas[0]) {
        return Err(Error::InsufficientData(format!(
            "impulsive state {m} is not louder than the background (σ {} vs {})",
            sigmas[m], sigmas[0]
        )));
    }
    let profile = ModelProfile::new(probs, sigmas.clone(), r)?;
    // the constructor sorts by σ; keep durations aligned with it
    let mut order: Vec<usize> = (0..states).collect();
    order.sort_by(|&a, &b| sigmas[a].total_cmp(&sigmas[b]));
    let durations = order.iter().map(|&i| durations[i]).collect();

    let off_burst = ImpulseMask::from_flags(labels.iter().map(|&l| l != 0).collect());
    let background = background_stats(recording, &off_burst)?;

    Ok(EstimationReport {
        profile,
        durations,
        burst_count: bursts.len(),
        events,
        centroids: clustering.centroids,
        background,
        threshold: mask.threshold(),
        rms: mask.segments[0].rms,
        num_samples: n,
        sample_rate_hz: recording.sample_rate_hz(),
        origin: recording.origin().to_string(),
        config: config.clone(),
    })
}
