use super::LdpcCode;

pub const DEFAULT_MAX_ITERS: usize = 50;

// keeps infinities (and inf - inf) out of the messages
const LLR_CLAMP: f64 = 1e12;

/// Exact pairwise check-node combination
/// `2·atanh(tanh(a/2)·tanh(b/2))`, evaluated in a form that does not overflow.
pub fn boxplus(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    sign * a.abs().min(b.abs()) + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    /// Hard decisions on the information positions.
    pub info_bits: Vec<u8>,
    pub codeword: Vec<u8>,
    /// True only if `codeword` satisfies every check.
    pub converged: bool,
    pub iterations: usize,
}

/// Flooding sum-product decoder with reusable message buffers.
#[derive(Debug, Clone)]
pub struct SumProductDecoder<'a> {
    code: &'a LdpcCode,
    // edges are numbered check by check
    check_start: Vec<usize>,
    edge_var: Vec<usize>,
    var_edges: Vec<Vec<usize>>,
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    total: Vec<f64>,
    forward: Vec<f64>,
    hard: Vec<u8>,
}

impl<'a> SumProductDecoder<'a> {
    pub fn new(code: &'a LdpcCode) -> Self {
        let mut check_start = Vec::with_capacity(code.num_checks() + 1);
        let mut edge_var = Vec::with_capacity(code.num_edges());
        let mut var_edges = vec![Vec::new(); code.n()];
        check_start.push(0);
        for vars in code.checks() {
            for &v in vars {
                var_edges[v].push(edge_var.len());
                edge_var.push(v);
            }
            check_start.push(edge_var.len());
        }
        let e = edge_var.len();
        let max_deg = code.checks().iter().map(Vec::len).max().unwrap_or(0);
        SumProductDecoder {
            code,
            check_start,
            edge_var,
            var_edges,
            v2c: vec![0.0; e],
            c2v: vec![0.0; e],
            total: vec![0.0; code.n()],
            forward: vec![0.0; max_deg + 1],
            hard: vec![0; code.n()],
        }
    }

    fn syndrome_ok(&self) -> bool {
        self.check_start.windows(2).all(|w| {
            self.edge_var[w[0]..w[1]]
                .iter()
                .fold(0u8, |acc, &v| acc ^ self.hard[v])
                == 0
        })
    }

    fn harden(&mut self) {
        for (h, &t) in self.hard.iter_mut().zip(&self.total) {
            *h = u8::from(t < 0.0);
        }
    }

    /// Decodes channel LLRs (positive favours bit 0).
    ///
    /// # Panics
    /// If `llrs.len()` differs from the code length.
    pub fn decode(&mut self, llrs: &[f64], max_iters: usize) -> DecodeOutcome {
        assert_eq!(llrs.len(), self.code.n(), "LLR count must equal code length");
        let channel: Vec<f64> = llrs
            .iter()
            .map(|&l| if l.is_nan() { 0.0 } else { l.clamp(-LLR_CLAMP, LLR_CLAMP) })
            .collect();
        self.total.copy_from_slice(&channel);
        self.harden();
        let mut iterations = 0;
        let mut converged = self.syndrome_ok();
        for (e, &v) in self.edge_var.iter().enumerate() {
            self.v2c[e] = channel[v];
        }
        while !converged && iterations < max_iters {
            iterations += 1;
            for w in self.check_start.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                let deg = hi - lo;
                if deg == 1 {
                    self.c2v[lo] = 0.0;
                    continue;
                }
                // prefix combinations in `forward`, suffix accumulated on the way back
                self.forward[0] = self.v2c[lo];
                for i in 1..deg {
                    self.forward[i] = boxplus(self.forward[i - 1], self.v2c[lo + i]);
                }
                let mut suffix = self.v2c[hi - 1];
                self.c2v[hi - 1] = self.forward[deg - 2];
                for i in (1..deg - 1).rev() {
                    self.c2v[lo + i] = boxplus(self.forward[i - 1], suffix);
                    suffix = boxplus(suffix, self.v2c[lo + i]);
                }
                self.c2v[lo] = suffix;
            }
            for (v, edges) in self.var_edges.iter().enumerate() {
                let sum = channel[v] + edges.iter().map(|&e| self.c2v[e]).sum::<f64>();
                self.total[v] = sum;
                for &e in edges {
                    self.v2c[e] = (sum - self.c2v[e]).clamp(-LLR_CLAMP, LLR_CLAMP);
                }
            }
            self.harden();
            converged = self.syndrome_ok();
        }
        DecodeOutcome {
            info_bits: self.code.extract_info(&self.hard),
            codeword: self.hard.clone(),
            converged,
            iterations,
        }
    }
}
