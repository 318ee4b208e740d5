//! Markov-Middleton model mathematics.
//!
//! The noise sample at each instant is a zero-mean Gaussian whose variance is
//! selected by a hidden state `m ∈ {0, .., M-1}`. State 0 is the impulse-free
//! background. The canonical Class A parameterization derives the state
//! probabilities from a truncated Poisson law in the impulsive index `A` and
//! the variances from `A`, the background-to-impulse ratio `Γ` and the total
//! power `σ²`. The hidden state follows a Markov chain that either stays put
//! with probability `r` or redraws from the stationary law.
//!
//! Standard deviations in a [`ModelProfile`] are per real component. For
//! complex baseband data the I and Q components are independent draws with
//! the same per-state standard deviation.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::kvtext::KvDocument;
use crate::{Error, Result};

/// Tolerance used when validating probability vectors.
pub const PROB_TOLERANCE: f64 = 1e-9;

const PROFILE_FORMAT: &str = "burstnoise-profile/1";
const MIDDLETON_FORMAT: &str = "burstnoise-middleton/1";

/// Canonical Class A parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiddletonParams {
    /// Impulsive index `A`.
    pub impulsive_index: f64,
    /// Background-to-impulse power ratio `Γ`.
    pub gamma: f64,
    /// Total noise power `σ²`.
    pub total_power: f64,
    /// Number of states `M`, background included.
    pub num_states: usize,
}

impl MiddletonParams {
    pub fn new(impulsive_index: f64, gamma: f64, total_power: f64, num_states: usize) -> Result<Self> {
        let params = MiddletonParams {
            impulsive_index,
            gamma,
            total_power,
            num_states,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.impulsive_index > 0.0 && self.impulsive_index.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "impulsive index must be positive, got {}",
                self.impulsive_index
            )));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if !(self.total_power > 0.0 && self.total_power.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "total power must be positive, got {}",
                self.total_power
            )));
        }
        if self.num_states == 0 {
            return Err(Error::InvalidParameter("state count must be at least 1".into()));
        }
        Ok(())
    }

    /// Builds the profile implied by the Class A laws, with correlation `r`.
    pub fn profile(&self, r: f64) -> Result<ModelProfile> {
        let probs = middleton_state_probs(self.impulsive_index, self.num_states)?;
        let sigmas = middleton_state_vars(self)?.into_iter().map(f64::sqrt).collect();
        ModelProfile::new(probs, sigmas, r)
    }

    pub fn to_kv(&self) -> KvDocument {
        let mut doc = KvDocument::new();
        doc.set("format", MIDDLETON_FORMAT)
            .set_f64("impulsive_index", self.impulsive_index)
            .set_f64("gamma", self.gamma)
            .set_f64("total_power", self.total_power)
            .set("states", self.num_states);
        doc
    }

    pub fn from_kv(doc: &KvDocument) -> Result<Self> {
        MiddletonParams::new(
            doc.get_f64("impulsive_index")?,
            doc.get_f64("gamma")?,
            doc.get_f64("total_power")?,
            doc.parse_value("states")?,
        )
    }
}

/// Truncated Poisson state probabilities `p_m ∝ A^m / m!`, `m < M`.
pub fn middleton_state_probs(impulsive_index: f64, num_states: usize) -> Result<Vec<f64>> {
    if !(impulsive_index > 0.0 && impulsive_index.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "impulsive index must be positive, got {impulsive_index}"
        )));
    }
    if num_states == 0 {
        return Err(Error::InvalidParameter("state count must be at least 1".into()));
    }
    // log-domain terms; the common e^{-A} factor cancels in the normalization
    let ln_a = impulsive_index.ln();
    let mut log_terms = Vec::with_capacity(num_states);
    let mut ln_fact = 0.0;
    for m in 0..num_states {
        if m > 0 {
            ln_fact += (m as f64).ln();
        }
        log_terms.push(m as f64 * ln_a - ln_fact);
    }
    let max = log_terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = log_terms.iter().map(|t| (t - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// Per-state variances `σ²_m = σ² (m/A + Γ) / (1 + Γ)`.
pub fn middleton_state_vars(params: &MiddletonParams) -> Result<Vec<f64>> {
    params.validate()?;
    let MiddletonParams {
        impulsive_index: a,
        gamma,
        total_power,
        num_states,
    } = *params;
    Ok((0..num_states)
        .map(|m| total_power * (m as f64 / a + gamma) / (1.0 + gamma))
        .collect())
}

fn validate_probs(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidParameter("empty probability vector".into()));
    }
    if p.iter().any(|&x| !(0.0..=1.0).contains(&x) || !x.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "probabilities must lie in [0, 1]: {p:?}"
        )));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROB_TOLERANCE {
        return Err(Error::InvalidParameter(format!(
            "probabilities sum to {sum}, expected 1"
        )));
    }
    Ok(())
}

fn validate_correlation(r: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidParameter(format!(
            "correlation must lie in [0, 1], got {r}"
        )));
    }
    Ok(())
}

/// The modified Markov-Middleton parameter set: per-state probabilities,
/// per-component standard deviations and the chain correlation.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelProfile {
    state_probs: Vec<f64>,
    state_sigmas: Vec<f64>,
    r: f64,
}

impl ModelProfile {
    /// Validates and builds a profile. States are reordered by ascending
    /// standard deviation so that state 0 is the background.
    pub fn new(state_probs: Vec<f64>, state_sigmas: Vec<f64>, r: f64) -> Result<Self> {
        if state_probs.len() != state_sigmas.len() {
            return Err(Error::InvalidParameter(format!(
                "{} probabilities but {} standard deviations",
                state_probs.len(),
                state_sigmas.len()
            )));
        }
        if state_probs.len() > crate::synth::MAX_STATES {
            return Err(Error::InvalidParameter(format!(
                "at most {} states are supported",
                crate::synth::MAX_STATES
            )));
        }
        validate_probs(&state_probs)?;
        validate_correlation(r)?;
        if state_sigmas.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "standard deviations must be positive: {state_sigmas:?}"
            )));
        }
        let mut order: Vec<usize> = (0..state_probs.len()).collect();
        order.sort_by(|&a, &b| state_sigmas[a].total_cmp(&state_sigmas[b]));
        Ok(ModelProfile {
            state_probs: order.iter().map(|&i| state_probs[i]).collect(),
            state_sigmas: order.iter().map(|&i| state_sigmas[i]).collect(),
            r,
        })
    }

    /// The four-state profile estimated from the field recording.
    pub fn table1() -> Self {
        ModelProfile::new(
            vec![0.54, 0.13, 0.11, 0.22],
            vec![0.010, 0.066, 0.112, 0.183],
            0.979,
        )
        .expect("reference profile is valid")
    }

    pub fn num_states(&self) -> usize {
        self.state_probs.len()
    }

    pub fn state_probs(&self) -> &[f64] {
        &self.state_probs
    }

    pub fn state_sigmas(&self) -> &[f64] {
        &self.state_sigmas
    }

    pub fn state_variances(&self) -> Vec<f64> {
        self.state_sigmas.iter().map(|s| s * s).collect()
    }

    pub fn correlation(&self) -> f64 {
        self.r
    }

    /// Per-component mixture power `Σ p_m σ²_m`.
    pub fn mixture_power(&self) -> f64 {
        self.state_probs
            .iter()
            .zip(&self.state_sigmas)
            .map(|(p, s)| p * s * s)
            .sum()
    }

    /// Multiplies every standard deviation by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        ModelProfile::new(
            self.state_probs.clone(),
            self.state_sigmas.iter().map(|s| s * factor).collect(),
            self.r,
        )
    }

    pub fn with_correlation(&self, r: f64) -> Result<Self> {
        ModelProfile::new(self.state_probs.clone(), self.state_sigmas.clone(), r)
    }

    pub fn transition_matrix(&self) -> TransitionMatrix {
        TransitionMatrix::from_parts(self.r, &self.state_probs)
    }

    pub fn to_kv(&self) -> KvDocument {
        let mut doc = KvDocument::new();
        doc.set("format", PROFILE_FORMAT)
            .set("states", self.num_states())
            .set_vec("state_probs", &self.state_probs)
            .set_vec("state_sigmas", &self.state_sigmas)
            .set_f64("correlation", self.r);
        doc
    }

    /// Reads a profile from a key-value document. Documents holding canonical
    /// Middleton parameters are expanded with their `correlation` key
    /// (default 0).
    pub fn from_kv(doc: &KvDocument) -> Result<Self> {
        if doc.contains("impulsive_index") {
            let params = MiddletonParams::from_kv(doc)?;
            let r = if doc.contains("correlation") {
                doc.get_f64("correlation")?
            } else {
                0.0
            };
            return params.profile(r);
        }
        let probs = doc.get_vec("state_probs")?;
        let sigmas = doc.get_vec("state_sigmas")?;
        if let Some(states) = doc.get("states") {
            let states: usize = states
                .parse()
                .map_err(|_| Error::Config(format!("bad state count `{states}`")))?;
            if states != probs.len() {
                return Err(Error::Config(format!(
                    "declared {states} states but found {} probabilities",
                    probs.len()
                )));
            }
        }
        ModelProfile::new(probs, sigmas, doc.get_f64("correlation")?)
    }
}

/// Row-stochastic state transition matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl TransitionMatrix {
    /// Wraps a dense row-major matrix after checking it is row-stochastic.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::InvalidParameter("empty transition matrix".into()));
        }
        let mut entries = Vec::with_capacity(size * size);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::InvalidParameter(format!("row {i} has wrong length")));
            }
            validate_probs(row)
                .map_err(|e| Error::InvalidParameter(format!("row {i}: {e}")))?;
            entries.extend_from_slice(row);
        }
        Ok(TransitionMatrix { size, entries })
    }

    fn from_parts(r: f64, p: &[f64]) -> Self {
        let size = p.len();
        let mut entries = Vec::with_capacity(size * size);
        for i in 0..size {
            for (j, &pj) in p.iter().enumerate() {
                let stay = if i == j { r } else { 0.0 };
                entries.push(stay + (1.0 - r) * pj);
            }
        }
        TransitionMatrix { size, entries }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.entries[from * self.size + to]
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.entries[from * self.size..(from + 1) * self.size]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.size)
    }

    fn is_irreducible(&self) -> bool {
        // every state must reach every other along positive entries
        let n = self.size;
        (0..n).all(|start| {
            let mut seen = vec![false; n];
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(i) = stack.pop() {
                for (j, s) in seen.iter_mut().enumerate() {
                    if !*s && self.get(i, j) > 0.0 {
                        *s = true;
                        stack.push(j);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        })
    }
}

/// `P_ij = r·[i = j] + (1 - r)·p_j`.
pub fn transition_matrix(r: f64, p: &[f64]) -> Result<TransitionMatrix> {
    validate_correlation(r)?;
    validate_probs(p)?;
    Ok(TransitionMatrix::from_parts(r, p))
}

/// Mean sojourn time of each state in samples, `1 / ((1 - r)(1 - p_m))`.
pub fn mean_state_durations(r: f64, p: &[f64]) -> Result<Vec<f64>> {
    validate_correlation(r)?;
    validate_probs(p)?;
    p.iter()
        .enumerate()
        .map(|(state, &pm)| {
            let leave = (1.0 - r) * (1.0 - pm);
            if leave <= 0.0 {
                Err(Error::InfiniteDuration { state })
            } else {
                Ok(1.0 / leave)
            }
        })
        .collect()
}

/// Correlation implied by the mean background run length `d0` and the
/// background probability `p0`: `r = 1 - 1 / (d0 (1 - p0))`.
pub fn correlation_from_duration(d0: f64, p0: f64) -> Result<f64> {
    if !(d0 > 0.0 && d0.is_finite()) || !(0.0..1.0).contains(&p0) {
        return Err(Error::InvalidParameter(format!(
            "need d0 > 0 and p0 in [0, 1), got d0 = {d0}, p0 = {p0}"
        )));
    }
    let value = 1.0 - 1.0 / (d0 * (1.0 - p0));
    if !(0.0..1.0).contains(&value) {
        return Err(Error::InconsistentMeasurement { value });
    }
    Ok(value)
}

/// Gaussian mixture density of a real noise sample.
pub fn noise_pdf(z: f64, profile: &ModelProfile) -> f64 {
    let norm = (2.0 * PI).sqrt();
    profile
        .state_probs()
        .iter()
        .zip(profile.state_sigmas())
        .map(|(p, s)| p / (s * norm) * (-(z * z) / (2.0 * s * s)).exp())
        .sum()
}

/// Solves `π P = π`, `Σ π = 1` for an irreducible chain.
pub fn stationary_distribution(matrix: &TransitionMatrix) -> Result<Vec<f64>> {
    let n = matrix.size();
    if !matrix.is_irreducible() {
        return Err(Error::Numeric(
            "transition matrix is not irreducible; stationary law is not unique".into(),
        ));
    }
    // (Pᵀ - I) π = 0 with the last equation replaced by Σ π = 1
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = matrix.get(j, i) - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;
    let pi = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Numeric("singular stationary system".into()))?;
    if pi.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite stationary solution".into()));
    }
    Ok(pi.iter().map(|&v| v.max(0.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn state_probs_examples() {
        assert_eq!(middleton_state_probs(3.7, 1).unwrap(), vec![1.0]);
        assert_close(&middleton_state_probs(1.0, 2).unwrap(), &[0.5, 0.5], 1e-15);
        assert_close(
            &middleton_state_probs(0.1, 3).unwrap(),
            &[0.904977, 0.090498, 0.004525],
            1e-5,
        );
    }

    #[test]
    fn state_probs_reject_bad_input() {
        assert!(matches!(middleton_state_probs(0.0, 3), Err(Error::InvalidParameter(_))));
        assert!(matches!(middleton_state_probs(-1.0, 3), Err(Error::InvalidParameter(_))));
        assert!(matches!(middleton_state_probs(1.0, 0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn state_vars_examples() {
        let p = MiddletonParams::new(1.0, 0.1, 1.0, 2).unwrap();
        assert_close(&middleton_state_vars(&p).unwrap(), &[0.090909, 1.0], 1e-6);
        let p = MiddletonParams::new(0.5, 0.01, 2.0, 3).unwrap();
        assert_close(
            &middleton_state_vars(&p).unwrap(),
            &[0.019802, 3.980198, 7.940594],
            1e-5,
        );
        let p = MiddletonParams::new(0.3, 0.2, 5.0, 4).unwrap();
        let v0 = middleton_state_vars(&p).unwrap()[0];
        assert!((v0 - 5.0 * 0.2 / 1.2).abs() < 1e-15);
    }

    #[test]
    fn middleton_params_validation() {
        assert!(MiddletonParams::new(1.0, 0.0, 1.0, 2).is_err());
        assert!(MiddletonParams::new(1.0, 0.1, -1.0, 2).is_err());
        assert!(MiddletonParams::new(1.0, 0.1, 1.0, 0).is_err());
    }

    #[test]
    fn transition_matrix_examples() {
        let p = [0.2, 0.3, 0.5];
        let memoryless = transition_matrix(0.0, &p).unwrap();
        for row in memoryless.rows() {
            assert_close(row, &p, 0.0);
        }
        let frozen = transition_matrix(1.0, &p).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(frozen.get(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }
        let half = transition_matrix(0.5, &[0.5, 0.5]).unwrap();
        assert_close(half.row(0), &[0.75, 0.25], 1e-15);
        assert_close(half.row(1), &[0.25, 0.75], 1e-15);
        assert!(transition_matrix(1.5, &p).is_err());
        assert!(transition_matrix(0.5, &[0.5, 0.6]).is_err());
    }

    #[test]
    fn duration_examples() {
        assert_close(&mean_state_durations(0.0, &[0.5, 0.5]).unwrap(), &[2.0, 2.0], 1e-12);
        let d = mean_state_durations(0.979, &[0.54, 0.13, 0.11, 0.22]).unwrap();
        // 1 / (0.021 · 0.46)
        assert!((d[0] - 103.5197).abs() < 1e-4);
        assert_close(&mean_state_durations(0.9, &[0.8, 0.2]).unwrap(), &[50.0, 12.5], 1e-9);
        assert!(matches!(
            mean_state_durations(1.0, &[0.5, 0.5]),
            Err(Error::InfiniteDuration { .. })
        ));
        assert!(matches!(
            mean_state_durations(0.5, &[1.0, 0.0]),
            Err(Error::InfiniteDuration { state: 0 })
        ));
    }

    #[test]
    fn correlation_examples() {
        assert!((correlation_from_duration(105.0, 0.54).unwrap() - 0.979).abs() < 5e-4);
        assert_eq!(correlation_from_duration(2.0, 0.5).unwrap(), 0.0);
        assert!((correlation_from_duration(50.0, 0.8).unwrap() - 0.9).abs() < 1e-12);
        match correlation_from_duration(1.0, 0.5) {
            Err(Error::InconsistentMeasurement { value }) => assert_eq!(value, -1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pdf_examples() {
        let single = ModelProfile::new(vec![1.0], vec![1.0], 0.3).unwrap();
        for z in [-2.0, 0.0, 0.7] {
            let expected = (-(z * z) / 2.0f64).exp() / (2.0 * PI).sqrt();
            assert!((noise_pdf(z, &single) - expected).abs() < 1e-15);
        }
        let two = ModelProfile::new(vec![0.5, 0.5], vec![1.0, 2.0], 0.0).unwrap();
        assert!((noise_pdf(0.0, &two) - 0.299207).abs() < 1e-6);
    }

    #[test]
    fn stationary_examples() {
        let p = [0.54, 0.13, 0.11, 0.22];
        let pi = stationary_distribution(&transition_matrix(0.979, &p).unwrap()).unwrap();
        assert_close(&pi, &p, 1e-6);
        let pi = stationary_distribution(&transition_matrix(0.0, &[0.3, 0.7]).unwrap()).unwrap();
        assert_close(&pi, &[0.3, 0.7], 1e-12);
        let identity = transition_matrix(1.0, &[0.5, 0.5]).unwrap();
        assert!(matches!(stationary_distribution(&identity), Err(Error::Numeric(_))));
    }

    #[test]
    fn profile_orders_states_by_sigma() {
        let prof = ModelProfile::new(vec![0.2, 0.8], vec![0.5, 0.01], 0.9).unwrap();
        assert_eq!(prof.state_sigmas(), &[0.01, 0.5]);
        assert_eq!(prof.state_probs(), &[0.8, 0.2]);
    }

    #[test]
    fn profile_rejects_invalid() {
        assert!(ModelProfile::new(vec![0.5, 0.4], vec![1.0, 2.0], 0.5).is_err());
        assert!(ModelProfile::new(vec![0.5, 0.5], vec![1.0, 0.0], 0.5).is_err());
        assert!(ModelProfile::new(vec![0.5, 0.5], vec![1.0, 2.0], 1.1).is_err());
        assert!(ModelProfile::new(vec![1.0], vec![1.0, 2.0], 0.5).is_err());
    }

    #[test]
    fn profile_text_round_trip() {
        let prof = ModelProfile::table1();
        let text = prof.to_kv().render();
        let back = ModelProfile::from_kv(&KvDocument::parse(&text).unwrap()).unwrap();
        assert_eq!(back, prof);
        assert!((prof.mixture_power() - 9.3677e-3).abs() < 1e-9);
    }

    #[test]
    fn middleton_text_expands_to_profile() {
        let params = MiddletonParams::new(0.5, 0.01, 2.0, 3).unwrap();
        let mut doc = params.to_kv();
        doc.set_f64("correlation", 0.8);
        let prof = ModelProfile::from_kv(&doc).unwrap();
        assert_eq!(prof, params.profile(0.8).unwrap());
        assert_eq!(MiddletonParams::from_kv(&doc).unwrap(), params);
    }
}
