//! Row echelon form of a parity-check matrix over GF(2).
//!
//! Pivots are taken from the rightmost column leftwards, so a matrix of the
//! form `[A | I]` keeps its information positions on the left.

#[derive(Debug, Clone)]
pub(crate) struct EchelonForm {
    n: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
    free: Vec<usize>,
}

fn get(row: &[u64], c: usize) -> bool {
    (row[c / 64] >> (c % 64)) & 1 == 1
}

impl EchelonForm {
    pub(crate) fn new(n: usize, checks: &[Vec<usize>]) -> Self {
        let words = n.div_ceil(64);
        let mut active: Vec<Vec<u64>> = checks
            .iter()
            .map(|vars| {
                let mut row = vec![0u64; words];
                for &v in vars {
                    row[v / 64] ^= 1 << (v % 64);
                }
                row
            })
            .collect();
        let mut rows = Vec::new();
        let mut pivots = Vec::new();
        let mut is_pivot = vec![false; n];
        for c in (0..n).rev() {
            let Some(pos) = active.iter().position(|r| get(r, c)) else {
                continue;
            };
            let pivot = active.swap_remove(pos);
            for row in active.iter_mut().filter(|r| get(r, c)) {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a ^= b;
                }
            }
            rows.push(pivot);
            pivots.push(c);
            is_pivot[c] = true;
            if active.is_empty() {
                break;
            }
        }
        let free = (0..n).filter(|&c| !is_pivot[c]).collect();
        EchelonForm {
            n,
            rows,
            pivots,
            free,
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub(crate) fn free_columns(&self) -> &[usize] {
        &self.free
    }

    /// Places `info` on the free columns and back-substitutes the pivots.
    pub(crate) fn encode(&self, info: &[u8]) -> Vec<u8> {
        let mut word = vec![0u64; self.n.div_ceil(64)];
        for (&c, &b) in self.free.iter().zip(info) {
            word[c / 64] |= (b as u64 & 1) << (c % 64);
        }
        // pivot t only involves free columns and pivots found after it
        for t in (0..self.rows.len()).rev() {
            let parity = self.rows[t]
                .iter()
                .zip(&word)
                .map(|(a, b)| (a & b).count_ones())
                .sum::<u32>()
                & 1;
            let c = self.pivots[t];
            word[c / 64] |= (parity as u64) << (c % 64);
        }
        (0..self.n).map(|c| get(&word, c) as u8).collect()
    }
}
