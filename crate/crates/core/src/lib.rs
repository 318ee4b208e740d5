//! Bursty impulsive noise toolkit.
//!
//! Models interference as a hidden Markov chain over Gaussian noise states
//! (the Markov-Middleton family), estimates the model from complex baseband
//! recordings, synthesizes matching noise, and measures how a detector that
//! tracks the hidden noise state compares with a plain AWGN detector on an
//! LDPC-coded BPSK link.
//!
//! Module map:
//!
//! - [`model`]: closed-form model math (state probabilities and variances,
//!   transition matrix, mean durations, correlation, mixture pdf).
//! - [`synth`]: seeded noise generation.
//! - [`recording`]: IQ file formats and windowed access.
//! - [`analysis`]: thresholding, burst segmentation, clustering, estimation.
//! - [`detector`]: forward-backward MAP detector and AWGN baseline.
//! - [`coding`]: LDPC codes, alist I/O, encoder and sum-product decoder.
//! - [`harness`]: Monte-Carlo BER experiments.

pub mod analysis;
pub mod coding;
pub mod detector;
mod error;
pub mod fsutil;
pub mod harness;
pub mod kvtext;
pub mod model;
pub mod recording;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
pub use model::{MiddletonParams, ModelProfile, TransitionMatrix};
pub use num_complex::Complex64;
pub use recording::IqRecording;

/// Nominal recorder sample rate in Hz.
pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 2.6e6;
