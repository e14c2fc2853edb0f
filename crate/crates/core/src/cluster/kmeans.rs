use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ClusterError, Method, Partition};

pub const MAX_ITERATIONS: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMeansOptions {
    pub k: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Independent seedings; the lowest objective wins.
    pub restarts: usize,
}

impl KMeansOptions {
    pub fn new(k: usize, seed: u64) -> Self {
        Self { k, seed, max_iterations: MAX_ITERATIONS, restarts: 10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub partition: Partition,
    /// Centroid of each label.
    pub centroids: Vec<Vec<f64>>,
    /// Within-cluster sum of squares.
    pub objective: f64,
    /// Objective after each assignment step of the winning run.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Result<KMeansResult, ClusterError> {
    kmeans_with(points, &KMeansOptions::new(k, seed))
}

pub fn kmeans_with(points: &[Vec<f64>], opts: &KMeansOptions) -> Result<KMeansResult, ClusterError> {
    let n = points.len();
    if opts.k == 0 || opts.k > n {
        return Err(ClusterError::KOutOfRange { k: opts.k, n });
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(ClusterError::Ragged);
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(ClusterError::NonFinite);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<KMeansResult> = None;
    for _ in 0..opts.restarts.max(1) {
        let run = lloyd(points, seed_centroids(points, opts.k, &mut rng), opts.max_iterations);
        if best.as_ref().is_none_or(|b| run.objective < b.objective) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one run"))
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding.
fn seed_centroids(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &points[chosen[0]])).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    pick = Some(i);
                    if u < w {
                        break;
                    }
                    u -= w;
                }
            }
            pick.expect("positive total has a positive weight")
        } else {
            // Remaining points coincide with centroids; take any unchosen one.
            let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen.push(next);
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(p, &points[next]));
        }
    }
    chosen.into_iter().map(|i| points[i].clone()).collect()
}

fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(p, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn lloyd(points: &[Vec<f64>], mut centroids: Vec<Vec<f64>>, max_iterations: usize) -> KMeansResult {
    let n = points.len();
    let k = centroids.len();
    let dim = points[0].len();
    let mut labels = vec![usize::MAX; n];
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iterations {
        iterations += 1;
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let (c, _) = nearest(p, &centroids);
            if labels[i] != c {
                labels[i] = c;
                changed = true;
            }
        }
        // An empty cluster takes the point farthest from its own centroid.
        for c in 0..k {
            if labels.contains(&c) {
                continue;
            }
            let far = (0..n)
                .filter(|&i| labels.iter().filter(|&&l| l == labels[i]).count() > 1)
                .max_by(|&a, &b| {
                    sq_dist(&points[a], &centroids[labels[a]])
                        .total_cmp(&sq_dist(&points[b], &centroids[labels[b]]))
                        .then(b.cmp(&a))
                })
                .expect("k <= n leaves a cluster with two points");
            labels[far] = c;
            centroids[c] = points[far].clone();
            changed = true;
        }
        trace.push(objective(points, &labels, &centroids));
        if !changed && iterations > 1 {
            converged = true;
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (s, v) in sums[l].iter_mut().zip(p) {
                *s += v;
            }
        }
        for c in 0..k {
            centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
        }
    }
    let obj = objective(points, &labels, &centroids);
    let partition = Partition::from_raw(&labels, Method::KMeans);
    // Reorder centroids to follow the relabelled clusters.
    let mut ordered = vec![Vec::new(); k];
    for (i, &raw) in labels.iter().enumerate() {
        ordered[partition.labels[i]] = centroids[raw].clone();
    }
    KMeansResult { partition, centroids: ordered, objective: obj, trace, iterations, converged }
}

fn objective(points: &[Vec<f64>], labels: &[usize], centroids: &[Vec<f64>]) -> f64 {
    points.iter().zip(labels).map(|(p, &l)| sq_dist(p, &centroids[l])).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(xs: &[f64]) -> Vec<Vec<f64>> {
        xs.iter().map(|&x| vec![x]).collect()
    }

    #[test]
    fn two_obvious_groups() {
        let r = kmeans(&pts(&[0.0, 1.0, 9.0, 10.0]), 2, 1).unwrap();
        assert_eq!(r.partition.labels, [0, 0, 1, 1]);
        assert_eq!(r.centroids, [vec![0.5], vec![9.5]]);
        assert_eq!(r.objective, 1.0);
        assert!(r.converged);
    }

    #[test]
    fn k_equals_n_and_k_one() {
        let p = pts(&[3.0, 1.0, 4.0, 1.5, 9.0]);
        let r = kmeans(&p, 5, 2).unwrap();
        assert_eq!(r.objective, 0.0);
        assert_eq!(r.partition.k, 5);
        let r = kmeans(&p, 1, 2).unwrap();
        assert!((r.centroids[0][0] - 3.7).abs() < 1e-12);
        assert!(kmeans(&p, 6, 2).is_err() && kmeans(&p, 0, 2).is_err());
    }

    #[test]
    fn duplicates_with_k_equal_n() {
        let r = kmeans(&pts(&[1.0, 1.0, 1.0]), 3, 0).unwrap();
        assert_eq!(r.partition.k, 3);
        assert_eq!(r.objective, 0.0);
    }

    #[test]
    fn trace_non_increasing_and_seed_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p: Vec<Vec<f64>> =
            (0..60).map(|_| vec![rng.random_range(0.0..10.0), rng.random_range(0.0..10.0)]).collect();
        let opts = KMeansOptions { restarts: 1, ..KMeansOptions::new(5, 77) };
        let a = kmeans_with(&p, &opts).unwrap();
        assert!(a.trace.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{:?}", a.trace);
        let b = kmeans_with(&p, &opts).unwrap();
        assert_eq!(a, b);
        assert!(a.partition.members().iter().all(|m| !m.is_empty()));
    }
}
