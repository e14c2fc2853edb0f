//! Clustering of federal units by life expectancy.

mod hierarchical;
mod kmeans;
mod report;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use libm::sqrt;

use crate::reference::{Cohort, LeColumn, LifeTable};
use crate::types::UfCode;

pub use hierarchical::{cut_dendrogram, single_linkage, Dendrogram, Merge};
pub use kmeans::{kmeans, kmeans_with, KMeansOptions, KMeansResult, MAX_ITERATIONS};
pub use report::{cluster_report, contingency, isolated_together, rand_index, ClusterReport};

pub const DEFAULT_K: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClusterError {
    #[error("need at least {needed} points, found {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("k = {k} outside 1..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("ragged feature rows")]
    Ragged,
    #[error("non-finite feature value")]
    NonFinite,
    #[error("partitions cover different units")]
    Mismatch,
    #[error("life table has no row for {0}")]
    MissingUf(UfCode),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    SingleLinkage,
    KMeans,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::SingleLinkage => "single",
            Method::KMeans => "kmeans",
        }
    }
}

/// Cluster assignment of every point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    /// Labels in `0..k`, numbered in order of first appearance.
    pub labels: Vec<usize>,
    pub k: usize,
    pub method: Method,
}

impl Partition {
    /// Relabels arbitrary cluster ids in first-appearance order.
    pub fn from_raw(raw: &[usize], method: Method) -> Self {
        let mut map: Vec<(usize, usize)> = Vec::new();
        let labels = raw
            .iter()
            .map(|r| match map.iter().find(|(from, _)| from == r) {
                Some(&(_, to)) => to,
                None => {
                    map.push((*r, map.len()));
                    map.len() - 1
                }
            })
            .collect();
        Self { labels, k: map.len(), method }
    }

    /// Point indices of each cluster.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = alloc::vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }
}

/// Life-expectancy features per UF, in years.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub ufs: Vec<UfCode>,
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub standardized: bool,
}

fn column_label(column: LeColumn) -> &'static str {
    match column {
        LeColumn::Birth => "birth",
        LeColumn::After60 => "after60",
        LeColumn::After65 => "after65",
    }
}

fn cohort_label(cohort: Cohort) -> &'static str {
    match cohort {
        Cohort::Total => "total",
        Cohort::Male => "male",
        Cohort::Female => "female",
    }
}

impl FeatureMatrix {
    pub fn new(ufs: Vec<UfCode>, names: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self, ClusterError> {
        if rows.len() != ufs.len() || rows.iter().any(|r| r.len() != names.len()) {
            return Err(ClusterError::Ragged);
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(ClusterError::NonFinite);
        }
        Ok(Self { ufs, names, rows, standardized: false })
    }

    /// One column per `(column, cohort)` pair, one row per UF in table order.
    pub fn from_table(table: &LifeTable, columns: &[LeColumn], cohorts: &[Cohort]) -> Result<Self, ClusterError> {
        let ufs = table.ufs();
        let mut names = Vec::new();
        for &c in columns {
            for &h in cohorts {
                names.push(format!("{}_{}", column_label(c), cohort_label(h)));
            }
        }
        let mut rows = Vec::with_capacity(ufs.len());
        for &uf in &ufs {
            let mut row = Vec::with_capacity(names.len());
            for &c in columns {
                for &h in cohorts {
                    row.push(table.years(uf, c, h).ok_or(ClusterError::MissingUf(uf))?);
                }
            }
            rows.push(row);
        }
        Self::new(ufs, names, rows)
    }

    /// Centres every column and scales it to unit sample standard deviation.
    /// Constant columns are only centred.
    pub fn standardize(&self) -> Self {
        let n = self.rows.len();
        let mut out = self.clone();
        out.standardized = true;
        if n < 2 {
            return out;
        }
        for j in 0..self.names.len() {
            let m = self.rows.iter().map(|r| r[j]).sum::<f64>() / n as f64;
            let var = self.rows.iter().map(|r| (r[j] - m) * (r[j] - m)).sum::<f64>() / (n - 1) as f64;
            let sd = sqrt(var);
            for r in &mut out.rows {
                r[j] -= m;
                if sd > 0.0 {
                    r[j] /= sd;
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Packed symmetric Euclidean distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Row-major full matrix.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(<[f64]>::to_vec).collect()
    }
}

pub fn distance_matrix(points: &[Vec<f64>]) -> Result<DistanceMatrix, ClusterError> {
    let n = points.len();
    if n < 2 {
        return Err(ClusterError::TooFewPoints { needed: 2, found: n });
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(ClusterError::Ragged);
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(ClusterError::NonFinite);
    }
    let mut data = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = sqrt(points[i].iter().zip(&points[j]).map(|(a, b)| (a - b) * (a - b)).sum());
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    Ok(DistanceMatrix { n, data })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::load_reference_tables;
    use alloc::vec;
    use rand::{Rng, SeedableRng};

    #[test]
    fn distance_examples() {
        let d = distance_matrix(&[vec![0.0, 0.0], vec![3.0, 4.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(d.get(0, 1), 5.0);
        assert_eq!(d.get(0, 2), 0.0);
        assert_eq!(d.get(1, 1), 0.0);
        assert!(distance_matrix(&[vec![1.0]]).is_err());
        assert_eq!(distance_matrix(&[vec![1.0], vec![1.0, 2.0]]), Err(ClusterError::Ragged));
    }

    #[test]
    fn bundled_birth_distance() {
        let (table, _) = load_reference_tables().unwrap();
        let f = FeatureMatrix::from_table(&table, &[LeColumn::Birth], &[Cohort::Total]).unwrap();
        let d = distance_matrix(&f.rows).unwrap();
        let al = UfCode::from_abbrev("AL").unwrap().index();
        let sc = UfCode::from_abbrev("SC").unwrap().index();
        assert!((d.get(al, sc) - 6.76).abs() < 1e-9);
        assert_eq!(f.names, ["birth_total"]);
    }

    #[test]
    fn metric_axioms_on_random_points() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(4);
        for _ in 0..50 {
            let pts: Vec<Vec<f64>> = (0..10).map(|_| (0..3).map(|_| rng.random_range(-5.0..5.0)).collect()).collect();
            let d = distance_matrix(&pts).unwrap();
            for i in 0..10 {
                assert_eq!(d.get(i, i), 0.0);
                for j in 0..10 {
                    assert_eq!(d.get(i, j), d.get(j, i));
                    for k in 0..10 {
                        assert!(d.get(i, k) <= d.get(i, j) + d.get(j, k) + 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn standardize_columns() {
        let f = FeatureMatrix::new(
            UfCode::all().take(3).collect(),
            vec!["a".into(), "b".into()],
            vec![vec![1.0, 5.0], vec![2.0, 5.0], vec![3.0, 5.0]],
        )
        .unwrap();
        let s = f.standardize();
        assert_eq!(s.rows.iter().map(|r| r[0]).collect::<Vec<_>>(), [-1.0, 0.0, 1.0]);
        assert!(s.rows.iter().all(|r| r[1] == 0.0));
    }

    #[test]
    fn partition_relabels() {
        let p = Partition::from_raw(&[7, 3, 7, 9], Method::KMeans);
        assert_eq!(p.labels, [0, 1, 0, 2]);
        assert_eq!(p.k, 3);
        assert_eq!(p.members(), vec![vec![0, 2], vec![1], vec![3]]);
    }
}
