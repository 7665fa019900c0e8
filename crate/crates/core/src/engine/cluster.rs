use serde::Serialize;

use crate::error::{Result, TopoError};
use crate::tda::TopoDescriptor;

/// Partition of clients into `m` non-empty clusters.
///
/// Cluster indices are ordered by each cluster's smallest client id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    m: usize,
}

impl ClusterAssignment {
    /// Builds an assignment, renumbering labels by first appearance.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        if labels.is_empty() {
            return Err(TopoError::Input("cluster assignment needs at least one client".into()));
        }
        let mut map: Vec<(usize, usize)> = Vec::new();
        let mut out = Vec::with_capacity(labels.len());
        for &l in labels {
            let id = match map.iter().find(|(raw, _)| *raw == l) {
                Some(&(_, id)) => id,
                None => {
                    map.push((l, map.len()));
                    map.len() - 1
                }
            };
            out.push(id);
        }
        Ok(Self {
            labels: out,
            m: map.len(),
        })
    }

    /// Everyone in cluster 0.
    pub fn single(k: usize) -> Self {
        Self {
            labels: vec![0; k],
            m: 1,
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, client: usize) -> usize {
        self.labels[client]
    }

    pub fn num_clusters(&self) -> usize {
        self.m
    }

    pub fn num_clients(&self) -> usize {
        self.labels.len()
    }

    pub fn members(&self, cluster: usize) -> Vec<usize> {
        (0..self.labels.len()).filter(|&k| self.labels[k] == cluster).collect()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.m];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Average-linkage agglomerative clustering of L2-normalised descriptors.
pub fn cluster_clients(descs: &[TopoDescriptor], m: usize) -> Result<ClusterAssignment> {
    let k = descs.len();
    if m == 0 || m > k {
        return Err(TopoError::Config(format!(
            "cannot form {m} clusters from {k} clients"
        )));
    }
    let unit: Vec<Vec<f64>> = descs.iter().map(TopoDescriptor::normalized).collect();
    let dist: Vec<Vec<f64>> = unit
        .iter()
        .map(|a| unit.iter().map(|b| euclidean(a, b)).collect())
        .collect();
    Ok(average_linkage(&dist, m))
}

/// Agglomerates singletons down to `m` clusters on a distance matrix.
///
/// Ties go to the pair whose (smallest member, smallest member) is
/// lexicographically lowest; clusters are kept sorted by smallest member so
/// a strict `<` scan implements that.
pub(crate) fn average_linkage(dist: &[Vec<f64>], m: usize) -> ClusterAssignment {
    let mut clusters: Vec<Vec<usize>> = (0..dist.len()).map(|i| vec![i]).collect();
    let linkage = |a: &[usize], b: &[usize]| {
        let total: f64 = a.iter().flat_map(|&i| b.iter().map(move |&j| dist[i][j])).sum();
        total / (a.len() * b.len()) as f64
    };
    while clusters.len() > m {
        let mut best = (f64::INFINITY, 0, 1);
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let d = linkage(&clusters[a], &clusters[b]);
                if d < best.0 {
                    best = (d, a, b);
                }
            }
        }
        let (_, a, b) = best;
        let merged = clusters.remove(b);
        clusters[a].extend(merged);
        clusters[a].sort_unstable();
    }
    let mut labels = vec![0; dist.len()];
    for (c, members) in clusters.iter().enumerate() {
        for &i in members {
            labels[i] = c;
        }
    }
    ClusterAssignment {
        labels,
        m: clusters.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desc(head: [f64; 2]) -> TopoDescriptor {
        let mut v = vec![0.0; 48];
        v[0] = head[0];
        v[1] = head[1];
        TopoDescriptor::from_values(v).unwrap()
    }

    #[test]
    fn trivial_counts() {
        let descs: Vec<_> = (0..5).map(|i| desc([1.0, i as f64])).collect();
        assert_eq!(cluster_clients(&descs, 1).unwrap().labels(), &[0; 5]);
        assert_eq!(cluster_clients(&descs, 5).unwrap().labels(), &[0, 1, 2, 3, 4]);
        assert!(cluster_clients(&descs, 6).unwrap_err().is_config());
        assert!(cluster_clients(&descs, 0).is_err());
    }

    #[test]
    fn planted_directions_are_recovered() {
        // normalisation makes direction, not magnitude, the signal
        let descs = vec![
            desc([1.0, 0.01]),
            desc([0.02, 3.0]),
            desc([5.0, 0.0]),
            desc([0.0, 0.5]),
        ];
        assert_eq!(cluster_clients(&descs, 2).unwrap().labels(), &[0, 1, 0, 1]);
    }

    #[test]
    fn equal_distances_merge_lowest_pair() {
        let d = vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]];
        assert_eq!(average_linkage(&d, 2).labels(), &[0, 0, 1]);
    }

    #[test]
    fn labels_renumbered_by_first_appearance() {
        let a = ClusterAssignment::from_labels(&[4, 4, 1, 4, 7]).unwrap();
        assert_eq!(a.labels(), &[0, 0, 1, 0, 2]);
        assert_eq!(a.cluster_sizes(), vec![3, 1, 1]);
        assert_eq!(a.members(0), vec![0, 1, 3]);
    }
}
