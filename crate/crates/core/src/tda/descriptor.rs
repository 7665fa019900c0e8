use rand::Rng;
use serde::{Deserialize, Serialize};

use super::cloud::{pairwise_distances, PointCloud};
use super::diagram::{
    amplitude, betti_curve, count_above_median, percentile, persistence_entropy, PersistenceDiagram,
};
use super::{h0::h0_persistence, h1::h1_persistence};
use crate::error::{Result, TopoError};

/// Betti-curve samples per homology dimension in the canonical layout.
pub const BETTI_RESOLUTION: usize = 20;
/// Number of scalar statistics ahead of the two Betti curves.
pub const SCALAR_COUNT: usize = 8;
/// Canonical descriptor length: 8 scalars + 2 x 20 curve samples.
pub const DESCRIPTOR_LEN: usize = SCALAR_COUNT + 2 * BETTI_RESOLUTION;

/// Offsets of the scalar block.
pub mod layout {
    pub const BETTI0: usize = 0;
    pub const BETTI1: usize = 1;
    pub const ENTROPY0: usize = 2;
    pub const ENTROPY1: usize = 3;
    pub const AMPLITUDE0: usize = 4;
    pub const AMPLITUDE1: usize = 5;
    pub const PERSISTENT0: usize = 6;
    pub const PERSISTENT1: usize = 7;
    pub const CURVE0: usize = 8;
}

/// Fixed-layout topological summary of one client's data:
/// `[β0, β1, H0, H1, A0, A1, n0, n1, b0[L], b1[L]]`.
///
/// This is the only thing a client sends the server about its data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TopoDescriptor {
    values: Vec<f64>,
}

impl TopoDescriptor {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() < SCALAR_COUNT || !(values.len() - SCALAR_COUNT).is_multiple_of(2) {
            return Err(TopoError::Input(format!(
                "descriptor length {} does not fit the 8 + 2L layout",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(TopoError::Input("descriptor entries must be finite".into()));
        }
        Ok(Self { values })
    }

    pub fn zeros(resolution: usize) -> Self {
        Self {
            values: vec![0.0; SCALAR_COUNT + 2 * resolution],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn resolution(&self) -> usize {
        (self.values.len() - SCALAR_COUNT) / 2
    }

    pub fn curve(&self, dim: u8) -> &[f64] {
        let l = self.resolution();
        let start = SCALAR_COUNT + dim as usize * l;
        &self.values[start..start + l]
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Unit-norm copy; the zero vector is returned unchanged.
    pub fn normalized(&self) -> Vec<f64> {
        let norm = self.norm();
        if norm > 0.0 {
            self.values.iter().map(|v| v / norm).collect()
        } else {
            self.values.clone()
        }
    }

    /// Wire payload: little-endian IEEE-754 doubles in layout order.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        self.values.iter().flat_map(|v| v.to_le_bytes()).collect()
    }

    pub fn from_le_bytes(bytes: &[u8]) -> Result<Self> {
        if !bytes.len().is_multiple_of(8) {
            return Err(TopoError::Input(format!("payload of {} bytes is not a whole number of doubles", bytes.len())));
        }
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        Self::from_values(values)
    }
}

/// Persistence diagrams of a (possibly subsampled) cloud, H0 and H1 together.
#[derive(Debug, Clone)]
pub struct CloudTopology {
    pub diagram: PersistenceDiagram,
    pub points_used: usize,
}

/// Subsamples to at most `n_sub` points and computes H0 and H1.
///
/// H1 is truncated at the 95th percentile of pairwise distances.
pub fn cloud_topology<R: Rng + ?Sized>(cloud: &PointCloud, n_sub: usize, rng: &mut R) -> Result<CloudTopology> {
    if n_sub < 2 {
        return Err(TopoError::Config(format!("n_sub must be at least 2, got {n_sub}")));
    }
    let sub;
    let cloud = if cloud.len() > n_sub {
        let mut idx = rand::seq::index::sample(rng, cloud.len(), n_sub).into_vec();
        idx.sort_unstable();
        sub = cloud.select(&idx);
        &sub
    } else {
        cloud
    };
    let dist = pairwise_distances(cloud);
    let mut diagram = h0_persistence(&dist);
    if cloud.len() >= 3 {
        let offdiag: Vec<f64> = dist.edges().map(|e| e.2).collect();
        let max_scale = percentile(&offdiag, 95.0).unwrap_or(0.0);
        if max_scale > 0.0 {
            diagram.extend(h1_persistence(&dist, max_scale, n_sub)?);
        }
    }
    Ok(CloudTopology {
        diagram,
        points_used: cloud.len(),
    })
}

/// Assembles the fixed descriptor layout from a diagram.
pub fn descriptor_from_diagram(diag: &PersistenceDiagram, resolution: usize) -> TopoDescriptor {
    let mut values = Vec::with_capacity(SCALAR_COUNT + 2 * resolution);
    values.push(diag.essential_count(0) as f64);
    values.push(diag.in_dim(1).filter(|p| p.persistence() > 0.0).count() as f64);
    values.push(persistence_entropy(diag, 0));
    values.push(persistence_entropy(diag, 1));
    values.push(amplitude(diag, 0));
    values.push(amplitude(diag, 1));
    values.push(count_above_median(diag, 0) as f64);
    values.push(count_above_median(diag, 1) as f64);
    values.extend(betti_curve(diag, 0, resolution));
    values.extend(betti_curve(diag, 1, resolution));
    TopoDescriptor { values }
}

pub fn descriptor<R: Rng + ?Sized>(
    cloud: &PointCloud,
    n_sub: usize,
    resolution: usize,
    rng: &mut R,
) -> Result<TopoDescriptor> {
    if resolution == 0 {
        return Err(TopoError::Config("Betti-curve resolution must be at least 1".into()));
    }
    let topo = cloud_topology(cloud, n_sub, rng)?;
    Ok(descriptor_from_diagram(&topo.diagram, resolution))
}

/// Weighted entrywise mean of descriptors, the descriptor-space stand-in for
/// the diagram barycenter.
pub fn descriptor_barycenter(descs: &[TopoDescriptor], weights: &[f64]) -> Result<TopoDescriptor> {
    let first = descs
        .first()
        .ok_or_else(|| TopoError::Input("barycenter of an empty descriptor list".into()))?;
    if weights.len() != descs.len() {
        return Err(TopoError::Input("one weight per descriptor required".into()));
    }
    if weights.iter().any(|w| !(*w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(TopoError::Input("weights must be non-negative and sum to 1".into()));
    }
    if descs.iter().any(|d| d.len() != first.len()) {
        return Err(TopoError::Input("descriptor lengths differ".into()));
    }
    let mut values = vec![0.0; first.len()];
    for (d, &w) in descs.iter().zip(weights) {
        for (acc, v) in values.iter_mut().zip(&d.values) {
            *acc += w * v;
        }
    }
    Ok(TopoDescriptor { values })
}
