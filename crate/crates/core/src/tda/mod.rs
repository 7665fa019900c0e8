//! Vietoris–Rips persistent homology (H0 and H1), diagram statistics, the
//! fixed-length client descriptor, and diagram matching distances.

mod assignment;
pub mod cloud;
pub mod descriptor;
pub mod diagram;
mod h0;
mod h1;
mod union_find;
pub mod wasserstein;

pub use assignment::solve as solve_assignment;
pub use cloud::{pairwise_distances, DistanceMatrix, PointCloud};
pub use descriptor::{
    cloud_topology, descriptor, descriptor_barycenter, descriptor_from_diagram, CloudTopology, TopoDescriptor,
    layout, BETTI_RESOLUTION, DESCRIPTOR_LEN, SCALAR_COUNT,
};
pub use diagram::{
    amplitude, betti_curve, count_above_median, median, percentile, persistence_entropy, PersistenceDiagram,
    PersistencePair,
};
pub use h0::h0_persistence;
pub use h1::h1_persistence;
pub use wasserstein::{bottleneck_distance, wasserstein_distance};
