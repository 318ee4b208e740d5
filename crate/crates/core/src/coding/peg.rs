use rand::seq::IndexedRandom;

use super::LdpcCode;
use crate::rng::stream_rng;
use crate::{Error, Result};

/// Regular LDPC code from progressive edge growth.
///
/// Every variable gets `dv` edges and every check ends with `dc`. Each new
/// edge goes to a check outside the deepest reachable neighbourhood of the
/// variable, which keeps short cycles out. Ties between equally loaded checks
/// are broken by `seed`.
pub fn peg_regular(n: usize, dv: usize, dc: usize, seed: u64) -> Result<LdpcCode> {
    if n == 0 || dv == 0 || dc == 0 {
        return Err(Error::InvalidParameter("n, dv and dc must be positive".into()));
    }
    if !(n * dv).is_multiple_of(dc) {
        return Err(Error::InvalidParameter(format!(
            "n·dv = {} is not a multiple of dc = {dc}",
            n * dv
        )));
    }
    let m = n * dv / dc;
    if dv > m {
        return Err(Error::InvalidParameter(format!("dv = {dv} exceeds {m} checks")));
    }
    let mut rng = stream_rng(seed, 0);
    let mut check_vars: Vec<Vec<usize>> = vec![Vec::with_capacity(dc); m];
    let mut var_checks: Vec<Vec<usize>> = vec![Vec::with_capacity(dv); n];

    let mut seen_check = vec![usize::MAX; m];
    let mut in_next = vec![usize::MAX; m];
    let mut seen_var = vec![usize::MAX; n];
    let mut stamp = 0usize;

    for v in 0..n {
        for _ in 0..dv {
            let open = |c: usize, cv: &[Vec<usize>], vc: &[usize]| cv[c].len() < dc && !vc.contains(&c);
            // breadth-first growth of the set of checks reachable from v
            stamp += 1;
            let mut frontier: Vec<usize> = var_checks[v].clone();
            for &c in &frontier {
                seen_check[c] = stamp;
            }
            seen_var[v] = stamp;
            while !frontier.is_empty() {
                let mut next = Vec::new();
                for &c in &frontier {
                    for &u in &check_vars[c] {
                        if seen_var[u] == stamp {
                            continue;
                        }
                        seen_var[u] = stamp;
                        for &c2 in &var_checks[u] {
                            if seen_check[c2] != stamp {
                                next.push(c2);
                            }
                        }
                    }
                }
                next.sort_unstable();
                next.dedup();
                for &c in &next {
                    in_next[c] = stamp;
                }
                let uncovered = (0..m)
                    .filter(|&c| seen_check[c] != stamp && in_next[c] != stamp)
                    .any(|c| open(c, &check_vars, &var_checks[v]));
                if !uncovered || next.is_empty() {
                    break;
                }
                for &c in &next {
                    seen_check[c] = stamp;
                }
                frontier = next;
            }
            let mut candidates: Vec<usize> = (0..m)
                .filter(|&c| seen_check[c] != stamp && open(c, &check_vars, &var_checks[v]))
                .collect();
            if candidates.is_empty() {
                candidates = (0..m).filter(|&c| open(c, &check_vars, &var_checks[v])).collect();
            }
            let Some(min_deg) = candidates.iter().map(|&c| check_vars[c].len()).min() else {
                return Err(Error::EncodingSetup(format!(
                    "no check left for variable {v}; try another seed"
                )));
            };
            candidates.retain(|&c| check_vars[c].len() == min_deg);
            let &c = candidates.choose(&mut rng).expect("nonempty");
            check_vars[c].push(v);
            var_checks[v].push(c);
        }
    }
    LdpcCode::from_checks(n, check_vars)
}
