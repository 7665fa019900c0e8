use serde::{Deserialize, Serialize};

use super::cluster::{euclidean, ClusterAssignment};
use crate::error::{Result, TopoError};
use crate::model::ModelParams;
use crate::tda::TopoDescriptor;

/// How pTopoFL weights clients inside a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightingMode {
    /// `n_k · exp(-‖φ̂_k − φ̂_C‖) · t_k`.
    #[default]
    DescriptorExp,
    /// Softmax of `-λ·dist` to the size-weighted cluster barycenter, times trust.
    WassersteinSoftmax,
}

fn unit_vectors(descs: &[TopoDescriptor]) -> Vec<Vec<f64>> {
    descs.iter().map(TopoDescriptor::normalized).collect()
}

fn check_lengths(descs: &[TopoDescriptor], sizes: &[usize], trust: &[f64], a: &ClusterAssignment) -> Result<()> {
    let k = a.num_clients();
    if descs.len() != k || sizes.len() != k || trust.len() != k {
        return Err(TopoError::Input("descriptor, size, trust and assignment lengths differ".into()));
    }
    if sizes.contains(&0) {
        return Err(TopoError::Input("client sizes must be positive".into()));
    }
    Ok(())
}

fn normalize_within_clusters(raw: &[f64], a: &ClusterAssignment) -> Vec<f64> {
    let mut totals = vec![0.0; a.num_clusters()];
    for (k, &w) in raw.iter().enumerate() {
        totals[a.label(k)] += w;
    }
    raw.iter()
        .enumerate()
        .map(|(k, &w)| {
            let t = totals[a.label(k)];
            if t > 0.0 {
                w / t
            } else {
                // every member fully suppressed: fall back to uniform
                1.0 / a.cluster_sizes()[a.label(k)] as f64
            }
        })
        .collect()
}

/// Per-client weights, summing to 1 inside each cluster.
///
/// With `use_exp = false` the descriptor factor is dropped, leaving
/// `n_k · t_k` (FedAvg weighting when trust is all ones).
pub fn intra_cluster_weights(
    descs: &[TopoDescriptor],
    sizes: &[usize],
    trust: &[f64],
    assignment: &ClusterAssignment,
    use_exp: bool,
) -> Result<Vec<f64>> {
    check_lengths(descs, sizes, trust, assignment)?;
    let unit = unit_vectors(descs);
    let dim = unit.first().map_or(0, Vec::len);
    let mut centers = vec![vec![0.0; dim]; assignment.num_clusters()];
    for (k, u) in unit.iter().enumerate() {
        for (c, x) in centers[assignment.label(k)].iter_mut().zip(u) {
            *c += x;
        }
    }
    for (c, size) in centers.iter_mut().zip(assignment.cluster_sizes()) {
        c.iter_mut().for_each(|x| *x /= size as f64);
    }
    let raw: Vec<f64> = (0..sizes.len())
        .map(|k| {
            let topo = if use_exp {
                (-euclidean(&unit[k], &centers[assignment.label(k)])).exp()
            } else {
                1.0
            };
            sizes[k] as f64 * topo * trust[k]
        })
        .collect();
    Ok(normalize_within_clusters(&raw, assignment))
}

/// `softmax(-λ·d)`, shifted by the minimum distance for stability.
pub fn wasserstein_softmax_weights(dists: &[f64], lambda: f64) -> Vec<f64> {
    if dists.is_empty() {
        return Vec::new();
    }
    let lo = dists.iter().copied().fold(f64::INFINITY, f64::min);
    let e: Vec<f64> = dists.iter().map(|d| (-lambda * (d - lo)).exp()).collect();
    let total: f64 = e.iter().sum();
    e.iter().map(|v| v / total).collect()
}

/// Alternate weighting: within each cluster, softmax over distances of the
/// normalised descriptors to the size-weighted cluster barycenter, times trust.
pub fn softmax_cluster_weights(
    descs: &[TopoDescriptor],
    sizes: &[usize],
    trust: &[f64],
    assignment: &ClusterAssignment,
    lambda: f64,
) -> Result<Vec<f64>> {
    check_lengths(descs, sizes, trust, assignment)?;
    let unit = unit_vectors(descs);
    let mut raw = vec![0.0; sizes.len()];
    for c in 0..assignment.num_clusters() {
        let members = assignment.members(c);
        let total: f64 = members.iter().map(|&k| sizes[k] as f64).sum();
        let mut center = vec![0.0; unit[members[0]].len()];
        for &k in &members {
            for (acc, x) in center.iter_mut().zip(&unit[k]) {
                *acc += sizes[k] as f64 / total * x;
            }
        }
        let dists: Vec<f64> = members.iter().map(|&k| euclidean(&unit[k], &center)).collect();
        for (&k, s) in members.iter().zip(wasserstein_softmax_weights(&dists, lambda)) {
            raw[k] = s * trust[k];
        }
    }
    Ok(normalize_within_clusters(&raw, assignment))
}

/// Entrywise weighted average of parameter vectors.
pub fn aggregate_cluster(models: &[&ModelParams], weights: &[f64]) -> Result<ModelParams> {
    let first = models
        .first()
        .ok_or_else(|| TopoError::Input("nothing to aggregate".into()))?;
    if models.len() != weights.len() {
        return Err(TopoError::Input("one weight per model required".into()));
    }
    if models.iter().any(|m| m.dim() != first.dim()) {
        return Err(TopoError::Input("model dimensions differ".into()));
    }
    if (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 || weights.iter().any(|w| *w < 0.0) {
        return Err(TopoError::Input("aggregation weights must be non-negative and sum to 1".into()));
    }
    let mut out = ModelParams::zeros(first.dim());
    for (m, &w) in models.iter().zip(weights) {
        for (acc, x) in out.weights.iter_mut().zip(&m.weights) {
            *acc += w * x;
        }
        out.bias += w * m.bias;
    }
    Ok(out)
}

/// Blends each cluster model with the client-count-weighted consensus:
/// `(1 − β)·θ_C + β·θ̄`.
pub fn blend_clusters(cluster_models: &[ModelParams], cluster_sizes: &[usize], beta: f64) -> Result<Vec<ModelParams>> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(TopoError::Config(format!("beta_blend must lie in [0, 1], got {beta}")));
    }
    if cluster_models.len() != cluster_sizes.len() {
        return Err(TopoError::Input("one size per cluster model required".into()));
    }
    let k: usize = cluster_sizes.iter().sum();
    let weights: Vec<f64> = cluster_sizes.iter().map(|&s| s as f64 / k as f64).collect();
    let refs: Vec<&ModelParams> = cluster_models.iter().collect();
    let consensus = aggregate_cluster(&refs, &weights)?;
    Ok(cluster_models
        .iter()
        .map(|m| ModelParams {
            weights: m
                .weights
                .iter()
                .zip(&consensus.weights)
                .map(|(a, g)| (1.0 - beta) * a + beta * g)
                .collect(),
            bias: (1.0 - beta) * m.bias + beta * consensus.bias,
        })
        .collect())
}

/// Both sides of `Σα‖g_k − ḡ_α‖² = Σα‖g_k − ḡ‖² − ‖ḡ_α − ḡ‖²`, where ḡ is
/// the uniform mean and ḡ_α the α-weighted mean.
pub fn variance_identity_check(grads: &[Vec<f64>], alpha: &[f64]) -> (f64, f64) {
    let k = grads.len() as f64;
    let dim = grads.first().map_or(0, Vec::len);
    let mut mean = vec![0.0; dim];
    let mut weighted = vec![0.0; dim];
    for (g, &a) in grads.iter().zip(alpha) {
        for j in 0..dim {
            mean[j] += g[j] / k;
            weighted[j] += a * g[j];
        }
    }
    let sq = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    let lhs = grads.iter().zip(alpha).map(|(g, &a)| a * sq(g, &weighted)).sum();
    let spread: f64 = grads.iter().zip(alpha).map(|(g, &a)| a * sq(g, &mean)).sum();
    (lhs, spread - sq(&weighted, &mean))
}
