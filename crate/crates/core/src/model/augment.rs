use crate::error::{Result, TopoError};
use crate::tda::{layout, TopoDescriptor};

use super::data::LabeledDataset;

/// Number of columns appended by [`augment_features`].
pub const AUGMENT_LEN: usize = 4;

/// Client-level statistics appended to every feature row.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentStats {
    /// Centroid of the client's training features.
    pub centroid: Vec<f64>,
    pub h0_entropy: f64,
    pub h1_entropy: f64,
    /// Mid-scale H0 Betti-curve value divided by the subsample size, so it
    /// stays in `[0, 1]` whatever the subsample.
    pub mid_betti0: f64,
}

impl AugmentStats {
    pub fn from_descriptor(desc: &TopoDescriptor, centroid: Vec<f64>, points_used: usize) -> Self {
        let v = desc.values();
        let curve = desc.curve(0);
        let mid = curve.get(curve.len() / 2).copied().unwrap_or(0.0);
        Self {
            centroid,
            h0_entropy: v[layout::ENTROPY0],
            h1_entropy: v[layout::ENTROPY1],
            mid_betti0: mid / points_used.max(1) as f64,
        }
    }
}

/// Appends `[‖x - centroid‖, H0 entropy, H1 entropy, mid Betti-0]` to each row.
pub fn augment_features(data: &LabeledDataset, stats: &AugmentStats) -> Result<LabeledDataset> {
    if stats.centroid.len() != data.dim() {
        return Err(TopoError::Input(format!(
            "centroid has {} entries for {}-dimensional data",
            stats.centroid.len(),
            data.dim()
        )));
    }
    let rows = data
        .features()
        .iter()
        .map(|x| {
            let dist = x
                .iter()
                .zip(&stats.centroid)
                .map(|(a, c)| (a - c) * (a - c))
                .sum::<f64>()
                .sqrt();
            let mut row = Vec::with_capacity(x.len() + AUGMENT_LEN);
            row.extend_from_slice(x);
            row.extend([dist, stats.h0_entropy, stats.h1_entropy, stats.mid_betti0]);
            row
        })
        .collect();
    data.with_features(rows)
}
