//! alist sparse-matrix interchange.
//!
//! Layout (1-based indices, zero entries are padding):
//!
//! ```text
//! n m
//! max_col_degree max_row_degree
//! <n column degrees>
//! <m row degrees>
//! <n lines: row indices of each column>
//! <m lines: column indices of each row>
//! ```

use std::fmt::Write as _;

use super::LdpcCode;
use crate::{Error, Result};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next_numbers(&mut self, what: &str) -> Result<(usize, Vec<usize>)> {
        for (idx, line) in self.inner.by_ref() {
            self.last = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let nums = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::parse(idx + 1, format!("bad integer `{t}` in {what}")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok((idx + 1, nums));
        }
        Err(Error::parse(self.last + 1, format!("unexpected end of file, expected {what}")))
    }

    fn exact(&mut self, what: &str, count: usize) -> Result<(usize, Vec<usize>)> {
        let (line, nums) = self.next_numbers(what)?;
        if nums.len() != count {
            return Err(Error::parse(
                line,
                format!("{what}: expected {count} values, found {}", nums.len()),
            ));
        }
        Ok((line, nums))
    }
}

fn read_list(
    lines: &mut Lines<'_>,
    what: &str,
    degree: usize,
    max_degree: usize,
    bound: usize,
) -> Result<Vec<usize>> {
    let (line, nums) = lines.next_numbers(what)?;
    if nums.len() > max_degree.max(degree) {
        return Err(Error::parse(line, format!("{what}: too many entries")));
    }
    let entries: Vec<usize> = nums.iter().copied().filter(|&x| x != 0).collect();
    if entries.len() != degree {
        return Err(Error::parse(
            line,
            format!("{what}: header says degree {degree}, list has {}", entries.len()),
        ));
    }
    if let Some(&bad) = entries.iter().find(|&&x| x > bound) {
        return Err(Error::parse(line, format!("{what}: index {bad} out of range 1..={bound}")));
    }
    Ok(entries.into_iter().map(|x| x - 1).collect())
}

/// Parses alist text. Column and row sections must describe the same matrix.
pub fn parse_alist(text: &str) -> Result<LdpcCode> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let (_, dims) = lines.exact("dimensions", 2)?;
    let (n, m) = (dims[0], dims[1]);
    if n == 0 || m == 0 {
        return Err(Error::parse(lines.last, "dimensions must be positive"));
    }
    let (line, maxes) = lines.exact("maximum degrees", 2)?;
    let (max_col, max_row) = (maxes[0], maxes[1]);
    let (_, col_deg) = lines.exact("column degrees", n)?;
    let (_, row_deg) = lines.exact("row degrees", m)?;
    if col_deg.iter().max() != Some(&max_col) || row_deg.iter().max() != Some(&max_row) {
        return Err(Error::parse(line, "maximum degrees disagree with degree lists"));
    }
    if col_deg.iter().sum::<usize>() != row_deg.iter().sum::<usize>() {
        return Err(Error::parse(line, "column and row degrees count different edge totals"));
    }
    let mut cols = Vec::with_capacity(n);
    for (j, &d) in col_deg.iter().enumerate() {
        cols.push(read_list(&mut lines, &format!("column {}", j + 1), d, max_col, m)?);
    }
    let mut rows = Vec::with_capacity(m);
    for (i, &d) in row_deg.iter().enumerate() {
        rows.push(read_list(&mut lines, &format!("row {}", i + 1), d, max_row, n)?);
    }
    // cross-check the two views
    let mut from_cols = vec![Vec::new(); m];
    for (j, col) in cols.iter().enumerate() {
        for &i in col {
            from_cols[i].push(j);
        }
    }
    for (i, (a, b)) in from_cols.iter_mut().zip(rows.iter()).enumerate() {
        let mut b = b.clone();
        a.sort_unstable();
        b.sort_unstable();
        if *a != b {
            return Err(Error::parse(lines.last, format!("row {} disagrees with column lists", i + 1)));
        }
    }
    LdpcCode::from_checks(n, rows)
}

/// Renders a code as alist text, zero-padding short lists.
pub fn write_alist(code: &LdpcCode) -> String {
    let n = code.n();
    let m = code.num_checks();
    let col_deg: Vec<usize> = (0..n).map(|v| code.var_checks(v).len()).collect();
    let row_deg: Vec<usize> = (0..m).map(|c| code.check_vars(c).len()).collect();
    let max_col = col_deg.iter().copied().max().unwrap_or(0);
    let max_row = row_deg.iter().copied().max().unwrap_or(0);
    let join = |v: &mut dyn Iterator<Item = usize>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    let _ = writeln!(out, "{n} {m}");
    let _ = writeln!(out, "{max_col} {max_row}");
    let _ = writeln!(out, "{}", join(&mut col_deg.iter().copied()));
    let _ = writeln!(out, "{}", join(&mut row_deg.iter().copied()));
    for v in 0..n {
        let list = code.var_checks(v);
        let mut it = list.iter().map(|c| c + 1).chain(std::iter::repeat_n(0, max_col - list.len()));
        let _ = writeln!(out, "{}", join(&mut it));
    }
    for c in 0..m {
        let list = code.check_vars(c);
        let mut it = list.iter().map(|v| v + 1).chain(std::iter::repeat_n(0, max_row - list.len()));
        let _ = writeln!(out, "{}", join(&mut it));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const HAMMING_ALIST: &str = "7 3\n3 4\n2 2 2 3 1 1 1\n4 4 4\n\
1 2 0\n1 3 0\n2 3 0\n1 2 3\n1 0 0\n2 0 0\n3 0 0\n\
1 2 4 5\n1 3 4 6\n2 3 4 7\n";

    #[test]
    fn hamming_from_alist() {
        let code = parse_alist(HAMMING_ALIST).unwrap();
        assert_eq!((code.n(), code.k()), (7, 4));
        assert_eq!(code.check_vars(0), &[0, 1, 3, 4]);
    }

    #[test]
    fn alist_round_trip() {
        let code = parse_alist(HAMMING_ALIST).unwrap();
        let again = parse_alist(&write_alist(&code)).unwrap();
        assert_eq!(again.checks(), code.checks());
    }

    #[test]
    fn inconsistent_degree_header() {
        // column 1 claims degree 3 but lists two rows
        let bad = HAMMING_ALIST.replacen("2 2 2 3 1 1 1", "3 2 2 3 1 1 1", 1);
        let err = parse_alist(&bad).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
    }

    #[test]
    fn malformed_index_reports_line() {
        let bad = HAMMING_ALIST.replacen("1 2 4 5", "1 2 4 9", 1);
        match parse_alist(&bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 12),
            other => panic!("unexpected {other:?}"),
        }
        match parse_alist("7 3\n3 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mismatched_views_rejected() {
        let bad = HAMMING_ALIST.replacen("1 2 4 5\n1 3 4 6", "1 2 4 6\n1 3 4 5", 1);
        assert!(parse_alist(&bad).is_err());
    }
}
