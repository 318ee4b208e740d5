//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use burstnoise::ModelProfile;

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

fn log_normal(z: f64, var: f64) -> f64 {
    -0.5 * (2.0 * PI * var).ln() - z * z / (2.0 * var)
}

/// Symbol LLRs by summing the joint law over every state path and every
/// symbol path.
pub fn brute_force_llrs(y: &[f64], profile: &ModelProfile, priors: Option<&[f64]>) -> Vec<f64> {
    let n = y.len();
    let m = profile.num_states();
    let p = profile.state_probs();
    let r = profile.correlation();
    let var = profile.state_variances();
    let trans = |i: usize, j: usize| if i == j { r + (1.0 - r) * p[j] } else { (1.0 - r) * p[j] };
    // P(x = +1) = 1 / (1 + e^-L)
    let log_px = |k: usize, plus: bool| {
        let l = priors.map_or(0.0, |pr| pr[k]);
        let s = if plus { -l } else { l };
        -(s.exp().ln_1p())
    };
    let mut num = vec![f64::NEG_INFINITY; n];
    let mut den = vec![f64::NEG_INFINITY; n];
    let mut states = vec![0usize; n];
    for code in 0..m.pow(n as u32) {
        let mut c = code;
        for s in states.iter_mut() {
            *s = c % m;
            c /= m;
        }
        let mut log_s = p[states[0]].ln();
        for i in 1..n {
            log_s += trans(states[i - 1], states[i]).ln();
        }
        for bits in 0..1usize << n {
            let mut lj = log_s;
            for i in 0..n {
                let plus = (bits >> i) & 1 == 0;
                let x = if plus { 1.0 } else { -1.0 };
                lj += log_px(i, plus) + log_normal(y[i] - x, var[states[i]]);
            }
            for k in 0..n {
                if (bits >> k) & 1 == 0 {
                    num[k] = log_add(num[k], lj);
                } else {
                    den[k] = log_add(den[k], lj);
                }
            }
        }
    }
    num.iter().zip(&den).map(|(a, b)| a - b).collect()
}

/// Memoryless mixture LLR.
pub fn mixture_llr(y: f64, profile: &ModelProfile) -> f64 {
    let var = profile.state_variances();
    let mut num = f64::NEG_INFINITY;
    let mut den = f64::NEG_INFINITY;
    for (p, v) in profile.state_probs().iter().zip(&var) {
        num = log_add(num, p.ln() + log_normal(y - 1.0, *v));
        den = log_add(den, p.ln() + log_normal(y + 1.0, *v));
    }
    num - den
}

#[allow(clippy::too_many_arguments)]
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb) = (f(a), f(b));
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(f, a, b, fa, fm, fb, whole, tol, 50)
}
