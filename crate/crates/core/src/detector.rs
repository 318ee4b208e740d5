//! Soft BPSK detectors for bursty impulsive noise.
//!
//! BPSK symbols `x ∈ {+1, −1}` (bit 0 ↦ +1) pass through `y = x + z`, where
//! `z` follows a [`ModelProfile`]. Both detectors return log-likelihood
//! ratios `log P(x = +1 | y) − log P(x = −1 | y)`, so positive values favour
//! bit 0.
//!
//! [`bcjr_llrs`] runs the forward-backward recursion over the hidden noise
//! states. [`awgn_llrs`] is the memoryless single-Gaussian baseline.

use std::f64::consts::PI;

use crate::model::ModelProfile;
use crate::{Error, Result};

/// Bit log-likelihood ratios, positive favouring bit 0 / symbol +1.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrSequence(Vec<f64>);

impl LlrSequence {
    pub fn new(llrs: Vec<f64>) -> Self {
        LlrSequence(llrs)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Hard bit decisions (`llr < 0` ↦ 1).
    pub fn hard_bits(&self) -> Vec<u8> {
        self.0.iter().map(|&l| u8::from(l < 0.0)).collect()
    }
}

/// Received samples and the noise model used to interpret them.
#[derive(Debug, Clone, Copy)]
pub struct DetectorInput<'a> {
    pub y: &'a [f64],
    pub profile: &'a ModelProfile,
    /// A-priori symbol LLRs; zero when absent.
    pub symbol_priors: Option<&'a [f64]>,
}

impl<'a> DetectorInput<'a> {
    pub fn new(y: &'a [f64], profile: &'a ModelProfile) -> Self {
        DetectorInput {
            y,
            profile,
            symbol_priors: None,
        }
    }

    pub fn with_priors(mut self, priors: &'a [f64]) -> Self {
        self.symbol_priors = Some(priors);
        self
    }

    fn validate(&self) -> Result<()> {
        if let Some(k) = self.y.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!("sample {k} is not finite")));
        }
        if let Some(p) = self.symbol_priors {
            if p.len() != self.y.len() {
                return Err(Error::Input(format!(
                    "{} priors for {} samples",
                    p.len(),
                    self.y.len()
                )));
            }
            if p.iter().any(|v| v.is_nan()) {
                return Err(Error::Input("prior LLRs contain NaN".into()));
            }
        }
        Ok(())
    }
}

/// `2 y / σ²` for unit-energy BPSK in Gaussian noise of variance `σ²`.
pub fn awgn_llrs(y: &[f64], noise_variance: f64) -> Result<LlrSequence> {
    if !(noise_variance > 0.0 && noise_variance.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise variance must be positive, got {noise_variance}"
        )));
    }
    Ok(LlrSequence(y.iter().map(|&v| 2.0 * v / noise_variance).collect()))
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn log_gauss(z: f64, var: f64, log_norm: f64) -> f64 {
    -z * z / (2.0 * var) - log_norm
}

/// A-posteriori symbol LLRs from the forward-backward recursion over noise
/// states.
///
/// The state chain starts in its stationary law and moves by
/// `P_ij = r·[i = j] + (1 − r)·p_j`. At each step the branch metric is
/// `P(s_j | s_i) · P(x) · N(y − x; 0, σ²_j)`. Forward and backward vectors are
/// renormalised after every step and emissions are handled in the log
/// domain, which keeps long sequences with large σ spreads finite. The
/// output includes the symbol priors (it is a posterior, not extrinsic).
pub fn bcjr_llrs(input: &DetectorInput<'_>) -> Result<LlrSequence> {
    input.validate()?;
    let profile = input.profile;
    let y = input.y;
    let n = y.len();
    let prior = |k: usize| input.symbol_priors.map_or(0.0, |p| p[k]);

    if profile.num_states() == 1 {
        let var = profile.state_variances()[0];
        let mut out = awgn_llrs(y, var)?.into_vec();
        if let Some(p) = input.symbol_priors {
            out.iter_mut().zip(p).for_each(|(l, p)| *l += p);
        }
        return Ok(LlrSequence(out));
    }

    let m = profile.num_states();
    let r = profile.correlation();
    let p = profile.state_probs();
    let vars = profile.state_variances();
    let log_norms: Vec<f64> = vars.iter().map(|v| 0.5 * (2.0 * PI * v).ln()).collect();
    let log_p: Vec<f64> = p.iter().map(|v| v.ln()).collect();

    // per-step, per-state log likelihoods of y given x = +1 and x = -1
    let mut like_plus = vec![0.0; n * m];
    let mut like_minus = vec![0.0; n * m];
    let mut log_emit = vec![0.0; n * m];
    for k in 0..n {
        let lp_plus = -softplus(-prior(k));
        let lp_minus = -softplus(prior(k));
        for s in 0..m {
            let a = log_gauss(y[k] - 1.0, vars[s], log_norms[s]);
            let b = log_gauss(y[k] + 1.0, vars[s], log_norms[s]);
            like_plus[k * m + s] = a;
            like_minus[k * m + s] = b;
            log_emit[k * m + s] = log_sum_exp([lp_plus + a, lp_minus + b].into_iter());
        }
    }

    // forward: log of the predicted state law before observing y_k
    let mut log_pred = vec![0.0; n * m];
    log_pred[..m].copy_from_slice(&log_p);
    let mut alpha = vec![0.0; m];
    for k in 0..n - 1 {
        let row = &log_pred[k * m..(k + 1) * m];
        let terms: Vec<f64> = (0..m).map(|s| row[s] + log_emit[k * m + s]).collect();
        let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for s in 0..m {
            alpha[s] = (terms[s] - max).exp();
            total += alpha[s];
        }
        for s in 0..m {
            let next = r * alpha[s] / total + (1.0 - r) * p[s];
            log_pred[(k + 1) * m + s] = next.ln();
        }
    }

    // backward, emitting LLRs on the way
    let mut llrs = vec![0.0; n];
    let mut log_beta = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for k in (0..n).rev() {
        let lp_plus = -softplus(-prior(k));
        let lp_minus = -softplus(prior(k));
        let base = |s: usize| log_pred[k * m + s] + log_beta[s];
        let num = log_sum_exp((0..m).map(|s| base(s) + lp_plus + like_plus[k * m + s]));
        let den = log_sum_exp((0..m).map(|s| base(s) + lp_minus + like_minus[k * m + s]));
        llrs[k] = num - den;

        if k > 0 {
            let g: Vec<f64> = (0..m).map(|s| log_emit[k * m + s] + log_beta[s]).collect();
            let max = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for s in 0..m {
                weights[s] = (g[s] - max).exp();
            }
            let mixed: f64 = (0..m).map(|s| p[s] * weights[s]).sum();
            let mut b: Vec<f64> = (0..m).map(|s| r * weights[s] + (1.0 - r) * mixed).collect();
            let total: f64 = b.iter().sum();
            b.iter_mut().for_each(|v| *v /= total);
            for s in 0..m {
                log_beta[s] = b[s].ln();
            }
        }
    }

    if let Some(k) = llrs.iter().position(|v| v.is_nan()) {
        return Err(Error::Numeric(format!("LLR {k} is NaN")));
    }
    Ok(LlrSequence(llrs))
}
