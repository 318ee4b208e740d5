//! Plot-ready CSVs, one file per figure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use burstnoise::analysis::{BackgroundStats, ClusterFeature, ComponentStats, EstimationReport, Histogram};
use burstnoise::fsutil::write_string_atomic;
use burstnoise::harness::BerPoint;
use burstnoise::synth::{NoiseRealization, NoiseSamples};
use statrs::distribution::{ContinuousCDF, Normal};

fn normal_cdf(x: f64, mean: f64, var: f64) -> f64 {
    Normal::new(mean, var.sqrt()).map_or(f64::NAN, |n| n.cdf(x))
}

fn histogram_rows(out: &mut String, name: &str, h: &Histogram, stats: &ComponentStats, count: usize) {
    for (i, &c) in h.counts.iter().enumerate() {
        let (lo, hi) = (h.edges[i], h.edges[i + 1]);
        let expected = count as f64 * (normal_cdf(hi, stats.mean, stats.variance) - normal_cdf(lo, stats.mean, stats.variance));
        let _ = writeln!(out, "{name},{lo},{hi},{c},{expected}");
    }
}

/// Background I/Q histograms with the fitted Gaussian bin counts.
pub fn background_histograms(dir: &Path, bg: &BackgroundStats) -> std::io::Result<()> {
    let mut out = String::from("component,lo,hi,count,gaussian\n");
    histogram_rows(&mut out, "i", &bg.histogram_i, &bg.i, bg.count);
    histogram_rows(&mut out, "q", &bg.histogram_q, &bg.q, bg.count);
    write_string_atomic(&dir.join("fig3_background_hist.csv"), &out)
}

/// Burst segments with their magnitude and cluster label.
pub fn burst_clusters(dir: &Path, report: &EstimationReport, feature: ClusterFeature) -> std::io::Result<()> {
    let mut out = String::from("start,end,duration_s,magnitude,feature,cluster\n");
    for e in &report.events {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            e.start,
            e.end,
            e.duration_s(report.sample_rate_hz),
            e.mean_power.sqrt(),
            feature.apply(e.mean_power),
            e.cluster.map_or(String::new(), |c| c.to_string())
        );
    }
    write_string_atomic(&dir.join("fig4_burst_clusters.csv"), &out)
}

/// Leading samples of a synthetic realization.
pub fn synthetic_trace(dir: &Path, noise: &NoiseRealization, len: usize, rate: f64, seed: u64) -> std::io::Result<()> {
    let mut out = format!("# seed={seed}\nindex,time_s,i,q,magnitude,state\n");
    for k in 0..len {
        let (i, q) = match &noise.samples {
            NoiseSamples::Real(v) => (v[k], 0.0),
            NoiseSamples::Complex(v) => (v[k].re, v[k].im),
        };
        let _ = writeln!(out, "{k},{},{i},{q},{},{}", k as f64 / rate, i.hypot(q), noise.states[k]);
    }
    write_string_atomic(&dir.join("fig5_synthetic.csv"), &out)
}

/// BER per SNR with one column per detector.
pub fn ber_curves(dir: &Path, points: &[BerPoint]) -> std::io::Result<()> {
    let mut detectors: Vec<&str> = points.iter().map(|p| p.detector.tag()).collect();
    detectors.dedup();
    let mut rows: Vec<(f64, BTreeMap<&str, f64>)> = Vec::new();
    for p in points {
        match rows.iter_mut().find(|(snr, _)| *snr == p.snr_db) {
            Some((_, bers)) => {
                bers.insert(p.detector.tag(), p.ber);
            }
            None => rows.push((p.snr_db, BTreeMap::from([(p.detector.tag(), p.ber)]))),
        }
    }
    let mut out = String::from("snr_db");
    for d in &detectors {
        let _ = write!(out, ",ber_{d}");
    }
    out.push('\n');
    for (snr, bers) in &rows {
        let _ = write!(out, "{snr}");
        for d in &detectors {
            let _ = write!(out, ",{}", bers.get(d).map_or(String::new(), |b| b.to_string()));
        }
        out.push('\n');
    }
    write_string_atomic(&dir.join("fig6_ber.csv"), &out)
}
