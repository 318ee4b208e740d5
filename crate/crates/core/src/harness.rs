//! Monte-Carlo BER runs for LDPC-coded BPSK over bursty impulsive noise.
//!
//! Per codeword trial: random information bits, systematic encoding, BPSK
//! mapping (bit 0 ↦ +1), additive real-valued noise from the scaled profile,
//! soft detection, sum-product decoding and error counting on the
//! information bits.
//!
//! Trial `t` at SNR index `i` draws everything from
//! `derive_seed(seed, [i, t])`, so both detectors see the same bits and the
//! same noise. Trials run in parallel batches but are accounted in trial
//! order, stopping exactly at the trial that reaches the error target, which
//! makes the results independent of the thread count.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::coding::{LdpcCode, SumProductDecoder, DEFAULT_MAX_ITERS};
use crate::detector::{awgn_llrs, bcjr_llrs, DetectorInput};
use crate::model::ModelProfile;
use crate::rng::{derive_seed, stream_rng, BITS_STREAM};
use crate::synth::{synthesize_noise, NoiseSamples, SampleMode};
use crate::{Error, Result};

/// Which noise power the Eb/N0 axis refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SnrConvention {
    /// Mixture power `Σ p_m σ²_m`.
    #[default]
    TotalPower,
    /// Background power `σ²_0`.
    BackgroundPower,
}

impl SnrConvention {
    pub fn tag(self) -> &'static str {
        match self {
            SnrConvention::TotalPower => "total",
            SnrConvention::BackgroundPower => "background",
        }
    }

    fn reference_power(self, profile: &ModelProfile) -> f64 {
        match self {
            SnrConvention::TotalPower => profile.mixture_power(),
            SnrConvention::BackgroundPower => profile.state_variances()[0],
        }
    }
}

impl fmt::Display for SnrConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for SnrConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "total" => Ok(SnrConvention::TotalPower),
            "background" => Ok(SnrConvention::BackgroundPower),
            other => Err(Error::Config(format!(
                "unknown SNR convention `{other}` (expected total or background)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorKind {
    /// Forward-backward over the noise states.
    Bcjr,
    /// Single Gaussian with the background variance.
    Awgn,
}

impl DetectorKind {
    pub fn tag(self) -> &'static str {
        match self {
            DetectorKind::Bcjr => "bcjr",
            DetectorKind::Awgn => "awgn",
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bcjr" => Ok(DetectorKind::Bcjr),
            "awgn" => Ok(DetectorKind::Awgn),
            other => Err(Error::Config(format!("unknown detector `{other}` (expected bcjr or awgn)"))),
        }
    }
}

/// Noise variance per real dimension for unit-energy BPSK at `Eb/N0` (dB).
pub fn noise_variance_for(snr_db: f64, code_rate: f64) -> f64 {
    1.0 / (2.0 * code_rate * 10f64.powf(snr_db / 10.0))
}

/// Eb/N0 in dB that `profile` represents under `convention`.
pub fn profile_snr_db(profile: &ModelProfile, convention: SnrConvention, code_rate: f64) -> f64 {
    -10.0 * (2.0 * code_rate * convention.reference_power(profile)).log10()
}

/// Scales all standard deviations by one factor so that the reference power
/// matches `snr_db`. Ratios between states and `r` are unchanged.
pub fn scale_profile_to_snr(
    profile: &ModelProfile,
    snr_db: f64,
    convention: SnrConvention,
    code_rate: f64,
) -> Result<ModelProfile> {
    if !snr_db.is_finite() {
        return Err(Error::InvalidParameter(format!("SNR must be finite, got {snr_db}")));
    }
    if !(code_rate > 0.0 && code_rate <= 1.0) {
        return Err(Error::InvalidParameter(format!("code rate must be in (0, 1], got {code_rate}")));
    }
    let target = noise_variance_for(snr_db, code_rate);
    profile.scaled((target / convention.reference_power(profile)).sqrt())
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub profile: ModelProfile,
    pub code: LdpcCode,
    pub detector: DetectorKind,
    pub snr_db: Vec<f64>,
    pub convention: SnrConvention,
    pub max_codewords: u64,
    /// Bit errors after which a point stops early.
    pub target_errors: u64,
    pub max_iters: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(profile: ModelProfile, code: LdpcCode, detector: DetectorKind, snr_db: Vec<f64>, seed: u64) -> Self {
        ExperimentConfig {
            profile,
            code,
            detector,
            snr_db,
            convention: SnrConvention::default(),
            max_codewords: 10_000,
            target_errors: 100,
            max_iters: DEFAULT_MAX_ITERS,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.snr_db.is_empty() {
            return Err(Error::Config("SNR grid is empty".into()));
        }
        if let Some(s) = self.snr_db.iter().find(|s| !s.is_finite()) {
            return Err(Error::Config(format!("SNR grid contains {s}")));
        }
        if self.max_codewords == 0 {
            return Err(Error::Config("max codewords must be at least 1".into()));
        }
        if self.target_errors == 0 {
            return Err(Error::Config("target error count must be at least 1".into()));
        }
        if self.code.k() == 0 {
            return Err(Error::Config("code has no information bits".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerPoint {
    pub snr_db: f64,
    pub convention: SnrConvention,
    pub detector: DetectorKind,
    pub bit_errors: u64,
    pub bits: u64,
    pub ber: f64,
    pub codewords: u64,
    /// Fraction of codewords whose decoder reached a zero syndrome.
    pub convergence_rate: f64,
    pub seed: u64,
    /// Stopped by the codeword budget before reaching the error target.
    pub low_confidence: bool,
}

struct TrialResult {
    bit_errors: u64,
    converged: bool,
}

fn run_trial(config: &ExperimentConfig, noise: &ModelProfile, snr_idx: usize, trial: u64) -> Result<TrialResult> {
    let code = &config.code;
    let n = code.n();
    let trial_seed = derive_seed(config.seed, &[snr_idx as u64, trial]);
    let mut rng = stream_rng(trial_seed, BITS_STREAM);
    let info: Vec<u8> = (0..code.k()).map(|_| rng.random::<bool>() as u8).collect();
    let word = code.encode(&info)?;
    let z = match synthesize_noise(noise, n, trial_seed, SampleMode::Real)?.samples {
        NoiseSamples::Real(v) => v,
        NoiseSamples::Complex(_) => unreachable!("real mode requested"),
    };
    let y: Vec<f64> = word
        .iter()
        .zip(&z)
        .map(|(&b, &z)| if b == 0 { 1.0 } else { -1.0 } + z)
        .collect();
    let llrs = match config.detector {
        DetectorKind::Bcjr => bcjr_llrs(&DetectorInput::new(&y, noise))?,
        DetectorKind::Awgn => awgn_llrs(&y, noise.state_variances()[0])?,
    };
    let out = SumProductDecoder::new(code).decode(llrs.as_slice(), config.max_iters);
    let bit_errors = out.info_bits.iter().zip(&info).filter(|(a, b)| a != b).count() as u64;
    Ok(TrialResult {
        bit_errors,
        converged: out.converged,
    })
}

fn run_point(config: &ExperimentConfig, snr_idx: usize) -> Result<BerPoint> {
    let snr_db = config.snr_db[snr_idx];
    let noise = scale_profile_to_snr(&config.profile, snr_db, config.convention, config.code.rate())?;
    let batch = (rayon::current_num_threads() as u64 * 8).max(8);
    let (mut errors, mut codewords, mut converged) = (0u64, 0u64, 0u64);
    'outer: while codewords < config.max_codewords {
        let end = (codewords + batch).min(config.max_codewords);
        let results = (codewords..end)
            .into_par_iter()
            .map(|t| run_trial(config, &noise, snr_idx, t))
            .collect::<Result<Vec<_>>>()?;
        for r in results {
            errors += r.bit_errors;
            codewords += 1;
            converged += r.converged as u64;
            if errors >= config.target_errors {
                break 'outer;
            }
        }
    }
    let bits = codewords * config.code.k() as u64;
    Ok(BerPoint {
        snr_db,
        convention: config.convention,
        detector: config.detector,
        bit_errors: errors,
        bits,
        ber: errors as f64 / bits as f64,
        codewords,
        convergence_rate: converged as f64 / codewords as f64,
        seed: config.seed,
        low_confidence: errors < config.target_errors,
    })
}

/// One [`BerPoint`] per SNR grid entry, in grid order.
pub fn run_ber(config: &ExperimentConfig) -> Result<Vec<BerPoint>> {
    config.validate()?;
    (0..config.snr_db.len()).map(|i| run_point(config, i)).collect()
}

pub const BER_CSV_HEADER: &str =
    "snr_db,convention,detector,ber,bit_errors,bits,codewords,convergence_rate,seed,low_confidence";

pub fn write_ber_csv(out: &mut dyn Write, points: &[BerPoint]) -> std::io::Result<()> {
    writeln!(out, "{BER_CSV_HEADER}")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            p.snr_db,
            p.convention,
            p.detector,
            p.ber,
            p.bit_errors,
            p.bits,
            p.codewords,
            p.convergence_rate,
            p.seed,
            p.low_confidence
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::peg_regular;

    #[test]
    fn scaling_examples() {
        let t1 = ModelProfile::table1();
        let same = profile_snr_db(&t1, SnrConvention::TotalPower, 0.5);
        let again = scale_profile_to_snr(&t1, same, SnrConvention::TotalPower, 0.5).unwrap();
        for (a, b) in again.state_sigmas().iter().zip(t1.state_sigmas()) {
            assert!((a - b).abs() < 1e-15);
        }

        let up = scale_profile_to_snr(&t1, same + 20.0 * 2f64.log10(), SnrConvention::TotalPower, 0.5).unwrap();
        for (a, b) in up.state_sigmas().iter().zip(t1.state_sigmas()) {
            assert!((a - b / 2.0).abs() < 1e-15);
        }

        let unit = scale_profile_to_snr(&t1, 0.0, SnrConvention::TotalPower, 0.5).unwrap();
        assert!((unit.mixture_power() - 1.0).abs() < 1e-12);
        let factor = (1.0 / t1.mixture_power()).sqrt();
        assert!((unit.state_sigmas()[3] - 0.183 * factor).abs() < 1e-12);
        assert_eq!(unit.correlation(), t1.correlation());

        let bg = scale_profile_to_snr(&t1, 0.0, SnrConvention::BackgroundPower, 0.5).unwrap();
        assert!((bg.state_variances()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tags_parse() {
        assert_eq!("total".parse::<SnrConvention>().unwrap(), SnrConvention::TotalPower);
        assert!(matches!("peak".parse::<SnrConvention>(), Err(Error::Config(_))));
        assert_eq!("awgn".parse::<DetectorKind>().unwrap(), DetectorKind::Awgn);
    }

    #[test]
    fn very_high_snr_is_error_free() {
        let code = peg_regular(96, 3, 6, 1).unwrap();
        let mut cfg = ExperimentConfig::new(ModelProfile::table1(), code, DetectorKind::Bcjr, vec![60.0], 3);
        cfg.max_codewords = 20;
        let pts = run_ber(&cfg).unwrap();
        assert_eq!(pts[0].bit_errors, 0);
        assert_eq!(pts[0].codewords, 20);
        assert!(pts[0].low_confidence);
        assert_eq!(pts[0].convergence_rate, 1.0);
    }

    #[test]
    fn stops_at_target_independent_of_threads() {
        let code = peg_regular(96, 3, 6, 1).unwrap();
        let mut cfg = ExperimentConfig::new(ModelProfile::table1(), code, DetectorKind::Awgn, vec![-2.0], 9);
        cfg.target_errors = 50;
        cfg.max_codewords = 500;
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| run_ber(&cfg).unwrap());
        let b = four.install(|| run_ber(&cfg).unwrap());
        assert_eq!(a, b);
        assert!(a[0].bit_errors >= 50);
        assert!(!a[0].low_confidence);
    }

    #[test]
    fn invalid_configs() {
        let code = peg_regular(96, 3, 6, 1).unwrap();
        let mut cfg = ExperimentConfig::new(ModelProfile::table1(), code, DetectorKind::Bcjr, vec![], 0);
        assert!(matches!(run_ber(&cfg), Err(Error::Config(_))));
        cfg.snr_db = vec![1.0];
        cfg.max_codewords = 0;
        assert!(matches!(run_ber(&cfg), Err(Error::Config(_))));
    }
}
