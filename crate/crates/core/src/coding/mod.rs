//! Binary LDPC codes: parity-check structure, systematic encoding, alist
//! interchange, PEG construction and sum-product decoding.

mod alist;
mod decoder;
mod gf2;
mod peg;

use std::path::Path;

pub use alist::{parse_alist, write_alist};
pub use decoder::{boxplus, DecodeOutcome, SumProductDecoder, DEFAULT_MAX_ITERS};
pub use peg::peg_regular;

use crate::{Error, Result};
use gf2::EchelonForm;

/// Sparse parity-check matrix with a systematic encoder.
#[derive(Debug, Clone)]
pub struct LdpcCode {
    n: usize,
    check_to_vars: Vec<Vec<usize>>,
    var_to_checks: Vec<Vec<usize>>,
    echelon: EchelonForm,
}

impl LdpcCode {
    /// Builds a code of length `n` from the variable indices of each check.
    pub fn from_checks(n: usize, checks: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("code length must be positive".into()));
        }
        let mut var_to_checks = vec![Vec::new(); n];
        let mut check_to_vars = Vec::with_capacity(checks.len());
        for (c, mut vars) in checks.into_iter().enumerate() {
            vars.sort_unstable();
            if vars.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidParameter(format!("check {c} repeats a variable")));
            }
            if let Some(&v) = vars.iter().find(|&&v| v >= n) {
                return Err(Error::InvalidParameter(format!(
                    "check {c} references variable {v} >= n = {n}"
                )));
            }
            for &v in &vars {
                var_to_checks[v].push(c);
            }
            check_to_vars.push(vars);
        }
        if let Some(v) = var_to_checks.iter().position(|c| c.is_empty()) {
            return Err(Error::InvalidParameter(format!(
                "variable {v} is not connected to any check"
            )));
        }
        let echelon = EchelonForm::new(n, &check_to_vars);
        Ok(LdpcCode {
            n,
            check_to_vars,
            var_to_checks,
            echelon,
        })
    }

    /// Loads a code from an alist file.
    pub fn load_alist(path: &Path) -> Result<Self> {
        parse_alist(&std::fs::read_to_string(path)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Information length `n − rank(H)`.
    pub fn k(&self) -> usize {
        self.n - self.echelon.rank()
    }

    /// Number of parity checks (rows of H, including dependent ones).
    pub fn num_checks(&self) -> usize {
        self.check_to_vars.len()
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n as f64
    }

    pub fn check_vars(&self, check: usize) -> &[usize] {
        &self.check_to_vars[check]
    }

    pub fn var_checks(&self, var: usize) -> &[usize] {
        &self.var_to_checks[var]
    }

    pub fn checks(&self) -> &[Vec<usize>] {
        &self.check_to_vars
    }

    pub fn num_edges(&self) -> usize {
        self.check_to_vars.iter().map(Vec::len).sum()
    }

    /// Codeword positions that carry the information bits, ascending.
    pub fn info_positions(&self) -> &[usize] {
        self.echelon.free_columns()
    }

    /// Systematic encoding: `bits` land on [`Self::info_positions`] and the
    /// remaining positions are solved from the parity checks.
    pub fn encode(&self, bits: &[u8]) -> Result<Vec<u8>> {
        if self.k() == 0 {
            return Err(Error::EncodingSetup("code has no information positions".into()));
        }
        if bits.len() != self.k() {
            return Err(Error::InvalidParameter(format!(
                "expected {} information bits, got {}",
                self.k(),
                bits.len()
            )));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidParameter("bits must be 0 or 1".into()));
        }
        Ok(self.echelon.encode(bits))
    }

    /// Indices of unsatisfied checks for a hard-decision word.
    pub fn syndrome(&self, word: &[u8]) -> Vec<usize> {
        self.check_to_vars
            .iter()
            .enumerate()
            .filter(|(_, vars)| vars.iter().fold(0u8, |acc, &v| acc ^ word[v]) == 1)
            .map(|(c, _)| c)
            .collect()
    }

    pub fn is_codeword(&self, word: &[u8]) -> bool {
        word.len() == self.n
            && self
                .check_to_vars
                .iter()
                .all(|vars| vars.iter().fold(0u8, |acc, &v| acc ^ word[v]) == 0)
    }

    /// Information bits of a codeword.
    pub fn extract_info(&self, word: &[u8]) -> Vec<u8> {
        self.info_positions().iter().map(|&p| word[p]).collect()
    }
}

#[cfg(test)]
pub(crate) fn hamming_7_4() -> LdpcCode {
    LdpcCode::from_checks(
        7,
        vec![vec![0, 1, 3, 4], vec![0, 2, 3, 5], vec![1, 2, 3, 6]],
    )
    .unwrap()
}
