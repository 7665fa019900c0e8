//! Server side: clustering, trust, topology-weighted aggregation, cluster
//! blending, drift tracking and the baseline aggregators.

mod aggregate;
mod cluster;
mod drift;
mod federation;
mod trust;

pub use aggregate::{
    aggregate_cluster, blend_clusters, intra_cluster_weights, softmax_cluster_weights, variance_identity_check,
    wasserstein_softmax_weights, WeightingMode,
};
pub use cluster::{cluster_clients, ClusterAssignment};
pub use drift::{topological_drift, SignatureHistory};
pub use federation::{
    client_topology, compute_topologies, ClientData, ClientTopology, Evaluation, Federation, FederationConfig, Method,
    RoundSummary,
};
pub use trust::{trust_from_z, trust_scores, TrustReport};
