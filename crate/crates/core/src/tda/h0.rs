use super::cloud::DistanceMatrix;
use super::diagram::{PersistenceDiagram, PersistencePair};
use super::union_find::DisjointSets;

/// Edges sorted by (weight, i, j).
pub(crate) fn sorted_edges(dist: &DistanceMatrix) -> Vec<(usize, usize, f64)> {
    let mut edges: Vec<_> = dist.edges().collect();
    edges.sort_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    edges
}

/// Zero-dimensional persistence of the Vietoris–Rips filtration.
///
/// Kruskal over ascending edges; every vertex is born at 0 and the merge
/// kills the component whose smallest point index is larger. The pair list
/// holds one entry per vertex: `n - 1` finite deaths sorted ascending, then the
/// single essential class.
pub fn h0_persistence(dist: &DistanceMatrix) -> PersistenceDiagram {
    let n = dist.len();
    let mut sets = DisjointSets::new(n);
    let mut pairs = Vec::with_capacity(n);
    for (i, j, w) in sorted_edges(dist) {
        if sets.union(i, j).is_some() {
            pairs.push(PersistencePair { birth: 0.0, death: w, dim: 0 });
            if pairs.len() + 1 == n {
                break;
            }
        }
    }
    pairs.push(PersistencePair { birth: 0.0, death: f64::INFINITY, dim: 0 });
    PersistenceDiagram::new(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tda::cloud::{pairwise_distances, PointCloud};

    fn line(xs: &[f64]) -> DistanceMatrix {
        pairwise_distances(&PointCloud::new(xs.iter().map(|&x| vec![x]).collect()).unwrap())
    }

    #[test]
    fn single_point() {
        let d = h0_persistence(&line(&[2.0]));
        assert_eq!(d.pairs.len(), 1);
        assert_eq!(d.pairs[0].birth, 0.0);
        assert!(d.pairs[0].death.is_infinite());
    }

    #[test]
    fn three_points_on_a_line() {
        let d = h0_persistence(&line(&[0.0, 1.0, 3.0]));
        assert_eq!(d.finite_deaths(0), vec![1.0, 2.0]);
        assert_eq!(d.essential_count(0), 1);
        assert_eq!(d.pairs.len(), 3);
    }

    #[test]
    fn duplicate_points_die_at_zero() {
        let d = h0_persistence(&line(&[4.0, 4.0]));
        assert_eq!(d.finite_deaths(0), vec![0.0]);
    }
}
