use alloc::vec;
use alloc::vec::Vec;

use super::{ClusterError, Partition};
use crate::types::UfCode;

/// Fraction of point pairs on which two partitions agree about co-membership.
/// Defined as 1 for fewer than two points.
pub fn rand_index(a: &Partition, b: &Partition) -> Result<f64, ClusterError> {
    let n = a.labels.len();
    if b.labels.len() != n {
        return Err(ClusterError::Mismatch);
    }
    if n < 2 {
        return Ok(1.0);
    }
    let mut agree = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            let sa = a.labels[i] == a.labels[j];
            let sb = b.labels[i] == b.labels[j];
            if sa == sb {
                agree += 1;
            }
        }
    }
    Ok(agree as f64 / (n * (n - 1) / 2) as f64)
}

/// `table[i][j]` counts points with label `i` in `a` and `j` in `b`.
pub fn contingency(a: &Partition, b: &Partition) -> Result<Vec<Vec<usize>>, ClusterError> {
    if a.labels.len() != b.labels.len() {
        return Err(ClusterError::Mismatch);
    }
    let mut t = vec![vec![0; b.k]; a.k];
    for (&la, &lb) in a.labels.iter().zip(&b.labels) {
        t[la][lb] += 1;
    }
    Ok(t)
}

/// Whether `group` forms exactly one cluster of the partition.
pub fn isolated_together(p: &Partition, ufs: &[UfCode], group: &[UfCode]) -> bool {
    let idx: Vec<usize> = group.iter().filter_map(|g| ufs.iter().position(|u| u == g)).collect();
    if idx.is_empty() || idx.len() != group.len() {
        return false;
    }
    let label = p.labels[idx[0]];
    p.labels.iter().enumerate().all(|(i, &l)| (l == label) == idx.contains(&i))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterReport {
    pub ufs: Vec<UfCode>,
    pub primary: Partition,
    pub secondary: Partition,
    pub rand_index: f64,
    pub contingency: Vec<Vec<usize>>,
    /// Groups checked for isolation and whether each partition isolates them.
    pub isolation: Vec<(Vec<UfCode>, bool, bool)>,
}

/// Compares two partitions of the same UFs and checks which of `groups`
/// each one isolates.
pub fn cluster_report(
    ufs: &[UfCode],
    primary: &Partition,
    secondary: &Partition,
    groups: &[Vec<UfCode>],
) -> Result<ClusterReport, ClusterError> {
    if primary.labels.len() != ufs.len() {
        return Err(ClusterError::Mismatch);
    }
    Ok(ClusterReport {
        ufs: ufs.to_vec(),
        primary: primary.clone(),
        secondary: secondary.clone(),
        rand_index: rand_index(primary, secondary)?,
        contingency: contingency(primary, secondary)?,
        isolation: groups
            .iter()
            .map(|g| (g.clone(), isolated_together(primary, ufs, g), isolated_together(secondary, ufs, g)))
            .collect(),
    })
}
