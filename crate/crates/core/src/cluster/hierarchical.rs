use alloc::vec;
use alloc::vec::Vec;

use super::{ClusterError, DistanceMatrix, Method, Partition};

/// One agglomeration step. Clusters `0..n` are the input points; the cluster
/// formed at step `s` gets id `n + s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub n: usize,
    pub merges: Vec<Merge>,
}

/// Single-linkage agglomeration. Ties go to the pair with the lowest slot
/// indices, where a merged cluster keeps the lower slot of its two parts.
pub fn single_linkage(dist: &DistanceMatrix) -> Dendrogram {
    let n = dist.len();
    let mut d: Vec<Vec<f64>> = dist.to_rows();
    let mut active = vec![true; n];
    let mut id: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    for step in 0..n.saturating_sub(1) {
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..n {
            if !active[i] {
                continue;
            }
            for j in i + 1..n {
                if active[j] && d[i][j] < best.0 {
                    best = (d[i][j], i, j);
                }
            }
        }
        let (height, i, j) = best;
        let (a, b) = if id[i] < id[j] { (id[i], id[j]) } else { (id[j], id[i]) };
        size[i] += size[j];
        merges.push(Merge { a, b, height, size: size[i] });
        active[j] = false;
        id[i] = n + step;
        for m in 0..n {
            if active[m] && m != i {
                let v = d[i][m].min(d[j][m]);
                d[i][m] = v;
                d[m][i] = v;
            }
        }
    }
    Dendrogram { n, merges }
}

/// Partition left after the first `n - k` merges.
pub fn cut_dendrogram(dend: &Dendrogram, k: usize) -> Result<Partition, ClusterError> {
    let n = dend.n;
    if k == 0 || k > n {
        return Err(ClusterError::KOutOfRange { k, n });
    }
    // Union-find over cluster ids 0..2n-1.
    let mut parent: Vec<usize> = (0..2 * n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (s, m) in dend.merges.iter().take(n - k).enumerate() {
        let ra = find(&mut parent, m.a);
        let rb = find(&mut parent, m.b);
        parent[ra] = n + s;
        parent[rb] = n + s;
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    Ok(Partition::from_raw(&roots, Method::SingleLinkage))
}

#[cfg(test)]
mod tests {
    use super::super::distance_matrix;
    use super::*;
    use rand::{Rng, SeedableRng};

    fn dend(points: &[f64]) -> Dendrogram {
        let pts: Vec<Vec<f64>> = points.iter().map(|&p| vec![p]).collect();
        single_linkage(&distance_matrix(&pts).unwrap())
    }

    #[test]
    fn two_points() {
        let d = dend(&[1.0, 4.0]);
        assert_eq!(d.merges, [Merge { a: 0, b: 1, height: 3.0, size: 2 }]);
    }

    #[test]
    fn three_points_by_hand() {
        let d = dend(&[0.0, 1.0, 3.0]);
        assert_eq!(d.merges[0], Merge { a: 0, b: 1, height: 1.0, size: 2 });
        assert_eq!(d.merges[1], Merge { a: 2, b: 3, height: 2.0, size: 3 });
        assert_eq!(cut_dendrogram(&d, 2).unwrap().labels, [0, 0, 1]);
        assert_eq!(cut_dendrogram(&d, 1).unwrap().labels, [0, 0, 0]);
        assert_eq!(cut_dendrogram(&d, 3).unwrap().labels, [0, 1, 2]);
        assert!(cut_dendrogram(&d, 0).is_err() && cut_dendrogram(&d, 4).is_err());
    }

    #[test]
    fn ties_take_lowest_pair() {
        let d = dend(&[0.0, 1.0, 2.0, 3.0]);
        assert_eq!((d.merges[0].a, d.merges[0].b), (0, 1));
        assert_eq!((d.merges[1].a, d.merges[1].b), (2, 4));
        assert_eq!((d.merges[2].a, d.merges[2].b), (3, 5));
    }

    #[test]
    fn heights_monotone_and_nested() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(21);
        for _ in 0..30 {
            let pts: Vec<Vec<f64>> =
                (0..12).map(|_| vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)]).collect();
            let d = single_linkage(&distance_matrix(&pts).unwrap());
            assert_eq!(d.merges.len(), 11);
            assert!(d.merges.windows(2).all(|w| w[0].height <= w[1].height));
            assert_eq!(d.merges.last().unwrap().size, 12);
            for k in 2..=12 {
                let fine = cut_dendrogram(&d, k).unwrap();
                let coarse = cut_dendrogram(&d, k - 1).unwrap();
                assert_eq!(fine.k, k);
                for i in 0..12 {
                    for j in 0..12 {
                        if fine.labels[i] == fine.labels[j] {
                            assert_eq!(coarse.labels[i], coarse.labels[j]);
                        }
                    }
                }
            }
        }
    }
}
