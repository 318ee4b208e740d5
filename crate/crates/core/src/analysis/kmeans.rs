use crate::{Error, Result};

/// Output of [`kmeans_1d`].
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    /// Cluster centres in ascending order.
    pub centroids: Vec<f64>,
    /// Cluster index of each input value, matching `centroids`.
    pub labels: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
    /// Within-cluster sum of squares after each assignment step.
    pub inertia_trace: Vec<f64>,
}

impl KMeansResult {
    pub fn inertia(&self) -> f64 {
        self.inertia_trace.last().copied().unwrap_or(0.0)
    }
}

fn nearest(value: f64, centroids: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = (value - centroids[0]).abs();
    for (j, &c) in centroids.iter().enumerate().skip(1) {
        let d = (value - c).abs();
        // strict comparison sends ties to the lower index
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    best
}

fn quantile_init(sorted: &[f64], k: usize) -> Vec<f64> {
    let pick = |vals: &[f64]| -> Vec<f64> {
        (0..k)
            .map(|j| {
                let q = (2 * j + 1) as f64 / (2 * k) as f64;
                vals[((q * vals.len() as f64) as usize).min(vals.len() - 1)]
            })
            .collect()
    };
    let init = pick(sorted);
    if init.windows(2).all(|w| w[0] < w[1]) {
        return init;
    }
    // repeated values collapsed some quantiles; fall back to distinct values
    let mut distinct = sorted.to_vec();
    distinct.dedup();
    pick(&distinct)
}

/// Lloyd's algorithm on scalars.
///
/// Centroids start at the `(2j+1)/(2k)` quantiles of the data. The loop stops
/// when an assignment pass changes nothing or after `max_iters` passes.
/// Values are processed in sorted order, so the result does not depend on the
/// order of the input.
pub fn kmeans_1d(values: &[f64], k: usize, max_iters: usize) -> Result<KMeansResult> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("k-means values must be finite".into()));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let distinct = 1 + sorted.windows(2).filter(|w| w[0] != w[1]).count();
    if sorted.is_empty() || k > distinct {
        return Err(Error::DegenerateClusters {
            k,
            distinct: if sorted.is_empty() { 0 } else { distinct },
        });
    }

    let mut centroids = quantile_init(&sorted, k);
    let mut labels: Vec<usize> = Vec::new();
    let mut inertia_trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iters.max(1) {
        iterations += 1;
        let next: Vec<usize> = sorted.iter().map(|&v| nearest(v, &centroids)).collect();
        let inertia = sorted
            .iter()
            .zip(&next)
            .map(|(&v, &l)| (v - centroids[l]).powi(2))
            .sum();
        inertia_trace.push(inertia);
        if next == labels {
            converged = true;
            break;
        }
        labels = next;
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for (&v, &l) in sorted.iter().zip(&labels) {
            sums[l] += v;
            counts[l] += 1;
        }
        for j in 0..k {
            if counts[j] > 0 {
                centroids[j] = sums[j] / counts[j] as f64;
            }
        }
    }

    // ascending centroids with labels renumbered to match
    let mut rank: Vec<usize> = (0..k).collect();
    rank.sort_by(|&a, &b| centroids[a].total_cmp(&centroids[b]));
    let mut new_index = vec![0; k];
    for (new, &old) in rank.iter().enumerate() {
        new_index[old] = new;
    }
    let mut out_labels = vec![0; values.len()];
    for (pos, &orig) in order.iter().enumerate() {
        out_labels[orig] = new_index[labels[pos]];
    }
    Ok(KMeansResult {
        centroids: rank.iter().map(|&j| centroids[j]).collect(),
        labels: out_labels,
        iterations,
        converged,
        inertia_trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separated_clusters() {
        let mut v = vec![5.0; 50];
        v.extend(vec![0.1; 50]);
        let res = kmeans_1d(&v, 2, 100).unwrap();
        assert!((res.centroids[0] - 0.1).abs() < 1e-12);
        assert!((res.centroids[1] - 5.0).abs() < 1e-12);
        for (x, l) in v.iter().zip(&res.labels) {
            assert_eq!(*l, if *x < 1.0 { 0 } else { 1 });
        }
        assert!(res.converged);
    }

    #[test]
    fn single_cluster_is_mean() {
        let v = [1.0, 2.0, 3.0, 10.0];
        let res = kmeans_1d(&v, 1, 10).unwrap();
        assert!((res.centroids[0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_distinct_values() {
        let v = [1.0, 1.0, 2.0, 2.0];
        assert!(matches!(
            kmeans_1d(&v, 3, 10),
            Err(Error::DegenerateClusters { k: 3, distinct: 2 })
        ));
        assert!(kmeans_1d(&[], 1, 10).is_err());
        assert!(kmeans_1d(&v, 0, 10).is_err());
    }

    #[test]
    fn repeated_values_still_get_distinct_seeds() {
        let mut v = vec![0.0; 90];
        v.extend([5.0, 9.0, 10.0]);
        let res = kmeans_1d(&v, 3, 50).unwrap();
        assert_eq!(res.centroids[0], 0.0);
        assert!(res.centroids.windows(2).all(|w| w[0] < w[1]));
    }
}
