//! Synthetic bursty impulsive noise.
//!
//! The hidden state path and the Gaussian emissions are drawn from two
//! independent streams under the same seed ([`rng::STATE_STREAM`] and
//! [`rng::EMISSION_STREAM`]), so the state path for a given seed is the same
//! whether real or complex samples are requested.
//!
//! [`synthesize_noise_blocked`] splits the output into fixed-length blocks,
//! each generated from its own derived seed. Blocks can be produced in
//! parallel, but the chain restarts from the stationary law at every block
//! boundary. Use [`synthesize_noise`] when state continuity matters.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::model::ModelProfile;
use crate::recording::IqRecording;
use crate::rng::{self, derive_seed};
use crate::{Error, Result};

/// Largest supported state count (states are stored as `u8`).
pub const MAX_STATES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    Real,
    Complex,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSamples {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl NoiseSamples {
    pub fn len(&self) -> usize {
        match self {
            NoiseSamples::Real(v) => v.len(),
            NoiseSamples::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Complex view; real samples get a zero Q component.
    pub fn to_complex(&self) -> Vec<Complex64> {
        match self {
            NoiseSamples::Real(v) => v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            NoiseSamples::Complex(v) => v.clone(),
        }
    }
}

/// A generated noise sequence together with its hidden state path.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRealization {
    pub states: Vec<u8>,
    pub samples: NoiseSamples,
    pub profile: ModelProfile,
    pub seed: u64,
}

impl NoiseRealization {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn into_recording(self, sample_rate_hz: f64) -> Result<IqRecording> {
        let origin = format!("synthetic seed={}", self.seed);
        IqRecording::new(self.samples.to_complex(), sample_rate_hz, origin)
    }
}

fn draw_categorical(cumulative: &[f64], u: f64) -> u8 {
    let idx = cumulative.partition_point(|&c| c <= u);
    idx.min(cumulative.len() - 1) as u8
}

fn cumulative(p: &[f64]) -> Vec<f64> {
    p.iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

fn check_len(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("sequence length must be at least 1".into()));
    }
    Ok(())
}

/// Draws a state path of length `n`: the first state from the stationary
/// law, then stay with probability `r` or redraw from the stationary law.
pub fn sample_state_sequence(profile: &ModelProfile, n: usize, seed: u64) -> Result<Vec<u8>> {
    check_len(n)?;
    let mut rng = rng::stream_rng(seed, rng::STATE_STREAM);
    let cdf = cumulative(profile.state_probs());
    let r = profile.correlation();
    let mut states = Vec::with_capacity(n);
    let mut current = draw_categorical(&cdf, rng.random::<f64>());
    states.push(current);
    for _ in 1..n {
        let u: f64 = rng.random();
        if u >= r {
            // (u - r) / (1 - r) is again uniform on [0, 1)
            current = draw_categorical(&cdf, (u - r) / (1.0 - r));
        }
        states.push(current);
    }
    Ok(states)
}

fn emit(profile: &ModelProfile, states: &[u8], seed: u64, mode: SampleMode) -> NoiseSamples {
    let mut rng = rng::stream_rng(seed, rng::EMISSION_STREAM);
    let sigmas = profile.state_sigmas();
    match mode {
        SampleMode::Real => NoiseSamples::Real(
            states
                .iter()
                .map(|&s| sigmas[s as usize] * rng.sample::<f64, _>(StandardNormal))
                .collect(),
        ),
        SampleMode::Complex => NoiseSamples::Complex(
            states
                .iter()
                .map(|&s| {
                    let sigma = sigmas[s as usize];
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(sigma * re, sigma * im)
                })
                .collect(),
        ),
    }
}

/// Single-stream noise generation; the state chain is continuous over all
/// `n` samples.
pub fn synthesize_noise(
    profile: &ModelProfile,
    n: usize,
    seed: u64,
    mode: SampleMode,
) -> Result<NoiseRealization> {
    let states = sample_state_sequence(profile, n, seed)?;
    let samples = emit(profile, &states, seed, mode);
    Ok(NoiseRealization {
        states,
        samples,
        profile: profile.clone(),
        seed,
    })
}

/// Block-parallel generation. Block `b` covers samples
/// `[b·block_len, (b+1)·block_len)` and is generated by [`synthesize_noise`]
/// under `derive_seed(seed, [b])`. Output depends only on the arguments,
/// never on the thread count.
pub fn synthesize_noise_blocked(
    profile: &ModelProfile,
    n: usize,
    block_len: usize,
    seed: u64,
    mode: SampleMode,
) -> Result<NoiseRealization> {
    check_len(n)?;
    if block_len == 0 {
        return Err(Error::InvalidParameter("block length must be at least 1".into()));
    }
    let blocks = n.div_ceil(block_len);
    let parts: Vec<NoiseRealization> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let len = block_len.min(n - b * block_len);
            synthesize_noise(profile, len, derive_seed(seed, &[b as u64]), mode)
        })
        .collect::<Result<_>>()?;
    let mut states = Vec::with_capacity(n);
    let mut samples = match mode {
        SampleMode::Real => NoiseSamples::Real(Vec::with_capacity(n)),
        SampleMode::Complex => NoiseSamples::Complex(Vec::with_capacity(n)),
    };
    for part in parts {
        states.extend_from_slice(&part.states);
        match (&mut samples, part.samples) {
            (NoiseSamples::Real(all), NoiseSamples::Real(v)) => all.extend(v),
            (NoiseSamples::Complex(all), NoiseSamples::Complex(v)) => all.extend(v),
            _ => unreachable!("mode is fixed for all blocks"),
        }
    }
    Ok(NoiseRealization {
        states,
        samples,
        profile: profile.clone(),
        seed,
    })
}
